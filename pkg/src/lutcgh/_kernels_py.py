"""Pure-numpy implementations of the per-pixel kernels.

Must stay bit-identical to ``_kernels.pyx``: both compute the real and
imaginary parts as separate ``amp * re`` / ``amp * im`` products.
"""

import numpy as np


def lut_modulate(amp, re, im, cursor):
    amp = np.ascontiguousarray(amp, dtype=np.float64)
    n_lut = re.shape[0]
    n = amp.size
    idx = (cursor + np.arange(n, dtype=np.int64)) % n_lut
    out = np.empty(amp.shape, dtype=np.complex128)
    flat = amp.reshape(-1)
    out.real.reshape(-1)[:] = flat * re[idx]
    out.imag.reshape(-1)[:] = flat * im[idx]
    return out, int((cursor + n) % n_lut)


def pair_modulate(amp, re, im):
    amp = np.ascontiguousarray(amp, dtype=np.float64)
    out = np.empty(amp.shape, dtype=np.complex128)
    out.real[...] = amp * re.reshape(amp.shape)
    out.imag[...] = amp * im.reshape(amp.shape)
    return out


def binary_quantise(H):
    # level index 0 is +1, 1 is -1; Re == 0 resolves to +1
    return (np.asarray(H).real < 0.0).astype(np.uint8)


def pack_rows(bits):
    return np.packbits(np.asarray(bits, dtype=np.uint8), axis=-1, bitorder="big")
