"""Phase-randomisation sources, prime helpers and LUT sizing limits.

Three sources share one interface:

* :class:`IndependentSource` draws a fresh uniform phase per pixel from a
  seeded PCG64 stream.
* :class:`PhaseLut` is a finite pool of precomputed ``(cos, sin)`` pairs read
  cyclically.  The cursor is never reset, so consecutive sub-frames and frames
  pick up where the previous one stopped.
* :class:`FlatSource` always yields ``1 + 0j`` and stands in for ``N_LUT = 0``.

Every source consumes phases in row-major raster order.
"""

import math
import struct
from dataclasses import dataclass

import numpy as np

from . import _backend
from .field import as_image

TWO_PI = 2.0 * math.pi


class PhaseSource:
    """Base class for stateful phase factor streams."""

    #: total number of phase factors handed out so far
    consumed = 0

    def take(self, n):
        """Return the next ``n`` phase factors as separate ``(re, im)`` arrays."""
        raise NotImplementedError

    def next_phase(self):
        re, im = self.take(1)
        return complex(re[0], im[0])

    def modulate(self, amplitude):
        """Multiply ``amplitude`` by the next ``amplitude.size`` phase factors."""
        amplitude = np.ascontiguousarray(amplitude, dtype=np.float64)
        re, im = self.take(amplitude.size)
        return _backend.kernels.pair_modulate(amplitude, re, im)

    def clone(self):
        raise NotImplementedError


class IndependentSource(PhaseSource):
    """Fresh uniform phases on [0, 2pi) from ``numpy.random.PCG64(seed)``.

    The double stream of PCG64 does not depend on how requests are chunked,
    so ``take(a)`` followed by ``take(b)`` equals ``take(a + b)``.
    """

    def __init__(self, seed):
        self.seed = int(seed)
        self._rng = np.random.Generator(np.random.PCG64(self.seed))
        self.consumed = 0

    def phases(self, n):
        """Raw phase angles for the next ``n`` draws."""
        self.consumed += n
        return TWO_PI * self._rng.random(n)

    def take(self, n):
        phi = self.phases(n)
        return np.cos(phi), np.sin(phi)

    def clone(self):
        other = IndependentSource.__new__(IndependentSource)
        other.seed = self.seed
        other._rng = np.random.Generator(np.random.PCG64(0))
        other._rng.bit_generator.state = self._rng.bit_generator.state
        other.consumed = self.consumed
        return other

    def __repr__(self):
        return f"IndependentSource(seed={self.seed})"


class PhaseLut(PhaseSource):
    """Cyclic lookup table of unit phase factors with a persistent cursor."""

    def __init__(self, re, im, cursor=0):
        re = np.ascontiguousarray(re, dtype=np.float64)
        im = np.ascontiguousarray(im, dtype=np.float64)
        if re.ndim != 1 or re.shape != im.shape or re.size < 1:
            raise ValueError("LUT needs matching 1-D re/im arrays of length >= 1")
        self.re = re
        self.im = im
        self.cursor = int(cursor) % re.size
        self.consumed = 0

    @classmethod
    def from_complex(cls, entries, cursor=0):
        entries = np.asarray(entries, dtype=np.complex128).reshape(-1)
        return cls(entries.real.copy(), entries.imag.copy(), cursor)

    def __len__(self):
        return self.re.size

    @property
    def entries(self):
        return self.re + 1j * self.im

    def indices(self, n):
        """Table indices the next ``n`` draws will read, without consuming them."""
        return (self.cursor + np.arange(n, dtype=np.int64)) % self.re.size

    def take(self, n):
        idx = self.indices(n)
        self.cursor = int((self.cursor + n) % self.re.size)
        self.consumed += n
        return self.re[idx], self.im[idx]

    def modulate(self, amplitude):
        out, self.cursor = _backend.kernels.lut_modulate(amplitude, self.re, self.im, self.cursor)
        self.consumed += out.size
        return out

    def clone(self):
        other = PhaseLut(self.re, self.im, self.cursor)
        other.consumed = self.consumed
        return other

    def __repr__(self):
        return f"PhaseLut(n_lut={len(self)}, cursor={self.cursor})"


class FlatSource(PhaseSource):
    """Zero phase everywhere: the degenerate ``N_LUT = 0`` case."""

    def __init__(self):
        self.consumed = 0

    def take(self, n):
        self.consumed += n
        return np.ones(n), np.zeros(n)

    def clone(self):
        other = FlatSource()
        other.consumed = self.consumed
        return other

    def __repr__(self):
        return "FlatSource()"


def flat_phase_source():
    return FlatSource()


def build_lut(seed, n_lut):
    """Fill a LUT of length ``n_lut`` with the first ``n_lut`` draws of
    ``IndependentSource(seed)``.

    Sharing the stream means a table of length ``N_x*N_y*N_SF`` replays an
    independent run exactly.
    """
    n_lut = int(n_lut)
    if n_lut < 1:
        raise ValueError(f"n_lut must be >= 1, got {n_lut}; use flat_phase_source() for 0")
    re, im = IndependentSource(seed).take(n_lut)
    return PhaseLut(re, im)


def make_source(kind, seed=0):
    """Build a source from a short description.

    ``kind`` is ``"independent"``, ``"flat"``, ``"lut:N"`` or an integer LUT
    length (0 meaning flat).
    """
    if isinstance(kind, (int, np.integer)):
        return flat_phase_source() if kind == 0 else build_lut(seed, kind)
    kind = str(kind).strip().lower()
    if kind == "independent":
        return IndependentSource(seed)
    if kind == "flat":
        return flat_phase_source()
    if kind.startswith("lut:"):
        try:
            n = int(kind[4:])
        except ValueError:
            raise ValueError(f"bad LUT length in source {kind!r}") from None
        if n < 0:
            raise ValueError(f"LUT length must be >= 0 in source {kind!r}")
        return flat_phase_source() if n == 0 else build_lut(seed, n)
    raise ValueError(f"unknown phase source {kind!r}")


def apply_phase(image, source):
    """Randomise the phase of a real amplitude image, one factor per pixel."""
    return source.modulate(as_image(image))


# -- primes -----------------------------------------------------------------

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n):
    """Deterministic Miller-Rabin, exact for all n < 3.3e24."""
    n = int(n)
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime_above(n):
    """Smallest prime strictly greater than ``n``."""
    k = max(int(n) + 1, 2)
    while not is_prime(k):
        k += 1
    return k


def primes_up_to(n):
    """All primes ``<= n`` via a sieve of Eratosthenes."""
    n = int(n)
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve).tolist()


# -- sizing limits ----------------------------------------------------------

@dataclass(frozen=True)
class LutHardLimits:
    subframe_independence_min: int
    exact_equivalence_min: int
    row_period_min: int


def hard_limits(n_x, n_y, n_sf):
    """Minimum LUT lengths for sub-frame independence, exact equivalence with
    an independent generator, and avoiding row-periodic phase patterns."""
    for name, v in (("n_x", n_x), ("n_y", n_y), ("n_sf", n_sf)):
        if int(v) < 1:
            raise ValueError(f"{name} must be >= 1, got {v}")
    n_x, n_y, n_sf = int(n_x), int(n_y), int(n_sf)
    return LutHardLimits(n_sf, n_x * n_y * n_sf, max(n_x, n_y))


# -- binary LUT files -------------------------------------------------------

LUT_MAGIC = b"HLUT"
LUT_VERSION = 1
_LUT_HEADER = struct.Struct("<4sIQ")


def save_lut(lut, path):
    """Write ``HLUT`` | u32 version | u64 length | length x (f64 re, f64 im), little-endian."""
    body = np.empty((len(lut), 2), dtype="<f8")
    body[:, 0] = lut.re
    body[:, 1] = lut.im
    with open(path, "wb") as fh:
        fh.write(_LUT_HEADER.pack(LUT_MAGIC, LUT_VERSION, len(lut)))
        fh.write(body.tobytes())


def load_lut(path):
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _LUT_HEADER.size:
        raise ValueError(f"{path}: truncated LUT header")
    magic, version, length = _LUT_HEADER.unpack_from(data)
    if magic != LUT_MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    if version != LUT_VERSION:
        raise ValueError(f"{path}: unsupported LUT version {version}")
    expected = _LUT_HEADER.size + 16 * length
    if len(data) != expected or length < 1:
        raise ValueError(f"{path}: expected {expected} bytes for {length} entries, got {len(data)}")
    body = np.frombuffer(data, dtype="<f8", offset=_LUT_HEADER.size).reshape(length, 2)
    return PhaseLut(body[:, 0].astype(np.float64), body[:, 1].astype(np.float64))
