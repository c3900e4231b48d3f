"""Hologram generation: quantisation, OSPR sub-frames and Gerchberg-Saxton.

Binary-phase holograms are real, so their replay field is conjugate
symmetric.  Targets therefore sit in the upper half of the replay plane
(flush to row 0, centred horizontally) and the lower half carries the twin.
"""

import struct
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import _backend
from .field import as_field, as_image, dft2, idft2, intensity

# sub-frames per FFT batch are capped so a batch stays under this many pixels
_BATCH_PIXELS = 1 << 22


class SchemeMismatchError(ValueError):
    """A binary-only operation received a non-binary hologram."""


class FrameFormatError(ValueError):
    """A packed frame file is malformed."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


@dataclass(frozen=True)
class QuantisationScheme:
    """Finite set of pixel values the SLM can display."""

    levels: tuple
    name: str = "custom"

    def __post_init__(self):
        levels = tuple(complex(v) for v in self.levels)
        if not levels:
            raise ValueError("quantisation scheme needs at least one level")
        if not all(np.isfinite(v.real) and np.isfinite(v.imag) for v in levels):
            raise ValueError("quantisation levels must be finite")
        if len(levels) > 255:
            raise ValueError("at most 255 levels are supported")
        object.__setattr__(self, "levels", levels)

    @property
    def is_binary(self):
        return self.levels == (1 + 0j, -1 + 0j)

    @property
    def level_array(self):
        return np.array(self.levels, dtype=np.complex128)


BINARY_PHASE = QuantisationScheme((1, -1), name="binary")


def quantise_indices(H, scheme=BINARY_PHASE):
    """Index (into ``scheme.levels``) of the nearest level for every pixel.

    Ties go to the earlier level, which for binary phase sends ``Re H == 0``
    to +1.
    """
    H = as_field(H)
    if scheme.is_binary:
        return _backend.kernels.binary_quantise(H)
    levels = scheme.level_array
    dist = np.abs(H[..., None] - levels) ** 2
    return np.argmin(dist, axis=-1).astype(np.uint8)


def quantise(H, scheme=BINARY_PHASE):
    """Snap each pixel of ``H`` to the nearest permitted level."""
    return scheme.level_array[quantise_indices(H, scheme)]


@dataclass
class SubFrameSet:
    """A stack of quantised holograms stored as level indices.

    ``indices`` has shape ``(n_sf, N_y, N_x)``; ``frames[n]`` is the complex
    hologram of sub-frame ``n``.
    """

    indices: np.ndarray
    scheme: QuantisationScheme = BINARY_PHASE

    def __post_init__(self):
        self.indices = np.asarray(self.indices, dtype=np.uint8)
        if self.indices.ndim != 3 or self.indices.shape[0] < 1:
            raise ValueError(f"expected (n_sf, N_y, N_x) indices, got shape {self.indices.shape}")
        if self.indices.max(initial=0) >= len(self.scheme.levels):
            raise ValueError("level index out of range for scheme")

    def __len__(self):
        return self.indices.shape[0]

    def __getitem__(self, n):
        return self.scheme.level_array[self.indices[n]]

    def __iter__(self):
        for n in range(len(self)):
            yield self[n]

    @property
    def shape(self):
        """``(N_y, N_x)`` of each sub-frame."""
        return self.indices.shape[1:]

    def equals(self, other):
        return self.scheme == other.scheme and np.array_equal(self.indices, other.indices)


@dataclass
class TargetSpec:
    """Target amplitude image and where it lives in the replay plane.

    ``placement`` is ``"upper"`` (rows ``0 .. N_y/2 - 1``, image centred
    horizontally and flush to row 0) or ``"full"`` (whole plane, image centred).
    ``measurement_region`` defaults to the placement minus the DC pixel.
    """

    image: np.ndarray
    n_x: int
    n_y: int
    placement: str = "upper"
    measurement_region: np.ndarray = dc_field(default=None, repr=False)

    def __post_init__(self):
        self.image = as_image(self.image)
        if self.n_x < 1 or self.n_y < 1:
            raise ValueError("replay plane dimensions must be >= 1")
        if self.placement not in ("upper", "full"):
            raise ValueError(f"unknown placement {self.placement!r}")
        ph, pw = self.placement_shape
        ih, iw = self.image.shape
        if ih > ph or iw > pw:
            raise ValueError(f"image {iw}x{ih} does not fit placement {pw}x{ph}")
        if self.measurement_region is not None:
            region = np.asarray(self.measurement_region, dtype=bool)
            if region.shape != (self.n_y, self.n_x):
                raise ValueError("measurement region must cover the replay plane shape")
            if not region.any():
                raise ValueError("measurement region is empty")
            self.measurement_region = region

    @property
    def placement_shape(self):
        rows = max(self.n_y // 2, 1) if self.placement == "upper" else self.n_y
        return rows, self.n_x

    @property
    def offset(self):
        """``(row, col)`` of the image's top-left corner in the replay plane."""
        ph, pw = self.placement_shape
        ih, iw = self.image.shape
        row = 0 if self.placement == "upper" else (ph - ih) // 2
        return row, (pw - iw) // 2

    def placement_mask(self):
        mask = np.zeros((self.n_y, self.n_x), dtype=bool)
        ph, pw = self.placement_shape
        mask[:ph, :pw] = True
        return mask

    def region(self):
        if self.measurement_region is not None:
            return self.measurement_region
        region = self.placement_mask()
        region[0, 0] = False
        if not region.any():
            raise ValueError("measurement region is empty")
        return region

    def image_mask(self):
        """Pixels covered by the copied image."""
        mask = np.zeros((self.n_y, self.n_x), dtype=bool)
        r, c = self.offset
        ih, iw = self.image.shape
        mask[r : r + ih, c : c + iw] = True
        return mask


def embed_target(spec, n_x=None, n_y=None):
    """Full replay-plane amplitude image with the target copied into place."""
    if (n_x is not None and n_x != spec.n_x) or (n_y is not None and n_y != spec.n_y):
        spec = TargetSpec(spec.image, n_x or spec.n_x, n_y or spec.n_y, spec.placement)
    out = np.zeros((spec.n_y, spec.n_x))
    r, c = spec.offset
    ih, iw = spec.image.shape
    out[r : r + ih, c : c + iw] = spec.image
    return out


def _batches(n_sf, n_pixels):
    step = max(1, _BATCH_PIXELS // max(n_pixels, 1))
    for start in range(0, n_sf, step):
        yield start, min(step, n_sf - start)


def ospr_generate(spec, n_sf, source, scheme=BINARY_PHASE):
    """One-Step Phase-Retrieval: ``n_sf`` independently randomised, quantised
    back-propagations of the target.

    Phases are drawn from ``source`` continuously across sub-frames.
    """
    n_sf = int(n_sf)
    if n_sf < 1:
        raise ValueError("n_sf must be >= 1")
    target = embed_target(spec)
    indices = np.empty((n_sf,) + target.shape, dtype=np.uint8)
    for start, count in _batches(n_sf, target.size):
        stack = np.broadcast_to(target, (count,) + target.shape)
        R = source.modulate(stack)
        indices[start : start + count] = quantise_indices(idft2(R), scheme)
    return SubFrameSet(indices, scheme)


def subframe_intensities(frames):
    """Replay intensity ``|F{H'_n}|**2`` of every sub-frame, shape ``(n_sf, N_y, N_x)``."""
    levels = frames.scheme.level_array
    out = np.empty(frames.indices.shape)
    n_pixels = frames.indices[0].size
    for start, count in _batches(len(frames), n_pixels):
        out[start : start + count] = intensity(dft2(levels[frames.indices[start : start + count]]))
    return out


def reconstruct_average(frames):
    """Time-averaged replay intensity over all sub-frames."""
    levels = frames.scheme.level_array
    acc = np.zeros(frames.shape)
    n_pixels = frames.indices[0].size
    for start, count in _batches(len(frames), n_pixels):
        acc += intensity(dft2(levels[frames.indices[start : start + count]])).sum(axis=0)
    return acc / len(frames)


def _phase_only(H):
    mag = np.abs(H)
    out = np.ones_like(H)
    nz = mag > 0
    out[nz] = H[nz] / mag[nz]
    return out


def gs_generate(spec, iterations, source, scheme=BINARY_PHASE, return_errors=False):
    """Gerchberg-Saxton with a phase-only hologram plane, quantised once at the end.

    The target amplitude is rescaled so its energy equals the phase-only
    hologram's (``N_x * N_y``); the iterates do not depend on that scale.
    With ``return_errors`` the per-iteration replay amplitude error
    ``mean((|F{H_k}| - T)**2)`` over the full plane is returned as well; it is
    non-increasing.
    """
    iterations = int(iterations)
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    target = embed_target(spec)
    energy = np.sum(target**2)
    scale = np.sqrt(target.size / energy) if energy > 0 else 1.0
    amp = target * scale

    R = source.modulate(target) * scale
    errors = []
    for _ in range(iterations):
        hologram = _phase_only(idft2(R))
        G = dft2(hologram)
        mag = np.abs(G)
        errors.append(float(np.mean((mag - amp) ** 2)))
        R = amp * _phase_only(G)
    final = quantise(hologram, scheme)
    if return_errors:
        return final, errors
    return final


# -- binary frame packing ---------------------------------------------------

def _require_binary(frames):
    if not frames.scheme.is_binary:
        raise SchemeMismatchError(f"packing needs binary phase frames, got scheme {frames.scheme.name!r}")


def pack_binary_frames(frames):
    """One bit per pixel, MSB first, +1 -> 1 and -1 -> 0, rows padded to whole bytes."""
    _require_binary(frames)
    bits = (frames.indices == 0).astype(np.uint8)
    return _backend.kernels.pack_rows(bits).tobytes()


def unpack_binary_frames(data, n_x, n_y, n_frames):
    stride = (n_x + 7) // 8
    expected = stride * n_y * n_frames
    if len(data) != expected:
        raise FrameFormatError(f"expected {expected} payload bytes, got {len(data)}", min(len(data), expected))
    packed = np.frombuffer(data, dtype=np.uint8).reshape(n_frames, n_y, stride)
    bits = np.unpackbits(packed, axis=-1, count=n_x, bitorder="big")
    return SubFrameSet((bits == 0).astype(np.uint8), BINARY_PHASE)


FRAME_MAGIC = b"HBIN"
FRAME_VERSION = 1
_FRAME_HEADER = struct.Struct("<4sIIII")


def write_frames_file(path, frames):
    """Header ``HBIN`` | u32 version | u32 N_x | u32 N_y | u32 n_frames, then the packed payload."""
    payload = pack_binary_frames(frames)
    n_y, n_x = frames.shape
    with open(path, "wb") as fh:
        fh.write(_FRAME_HEADER.pack(FRAME_MAGIC, FRAME_VERSION, n_x, n_y, len(frames)))
        fh.write(payload)
    return len(payload) // len(frames)


def read_frames_file(path):
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _FRAME_HEADER.size:
        raise FrameFormatError("truncated header", len(data))
    magic, version, n_x, n_y, n_frames = _FRAME_HEADER.unpack_from(data)
    if magic != FRAME_MAGIC:
        raise FrameFormatError(f"bad magic {magic!r}", 0)
    if version != FRAME_VERSION:
        raise FrameFormatError(f"unsupported version {version}", 4)
    if n_x < 1 or n_y < 1 or n_frames < 1:
        raise FrameFormatError(f"bad dimensions {n_x}x{n_y}x{n_frames}", 8)
    frame_bytes = (n_x + 7) // 8 * n_y
    payload = data[_FRAME_HEADER.size :]
    if len(payload) != frame_bytes * n_frames:
        raise FrameFormatError(
            f"payload holds {len(payload)} bytes, header promises {frame_bytes * n_frames}",
            _FRAME_HEADER.size + min(len(payload), frame_bytes * n_frames),
        )
    return unpack_binary_frames(payload, n_x, n_y, n_frames)


def frames_to_gray(frames):
    """8-bit images of each sub-frame: +1 -> 255, -1 -> 0."""
    _require_binary(frames)
    return np.where(frames.indices == 0, 255, 0).astype(np.uint8)
