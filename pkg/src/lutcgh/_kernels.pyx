# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-pixel kernels: cyclic LUT modulation, binary quantisation, bit packing."""

import numpy as np

# np.packbits is vectorised and beats a scalar loop, so packing is shared
from ._kernels_py import pack_rows  # noqa: F401


def lut_modulate(amp, const double[::1] re, const double[::1] im, Py_ssize_t cursor):
    a = np.ascontiguousarray(amp, dtype=np.float64)
    cdef const double[::1] af = a.reshape(-1)
    cdef Py_ssize_t n = af.shape[0]
    cdef Py_ssize_t n_lut = re.shape[0]
    out = np.empty(n, dtype=np.complex128)
    cdef double[::1] ov = out.view(np.float64)
    cdef Py_ssize_t i
    cdef Py_ssize_t k = cursor % n_lut
    cdef double v
    with nogil:
        for i in range(n):
            v = af[i]
            ov[2 * i] = v * re[k]
            ov[2 * i + 1] = v * im[k]
            k += 1
            if k == n_lut:
                k = 0
    return out.reshape(a.shape), k


def pair_modulate(amp, const double[::1] re, const double[::1] im):
    a = np.ascontiguousarray(amp, dtype=np.float64)
    cdef const double[::1] af = a.reshape(-1)
    cdef Py_ssize_t n = af.shape[0]
    out = np.empty(n, dtype=np.complex128)
    cdef double[::1] ov = out.view(np.float64)
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            ov[2 * i] = af[i] * re[i]
            ov[2 * i + 1] = af[i] * im[i]
    return out.reshape(a.shape)


def binary_quantise(H):
    h = np.ascontiguousarray(H, dtype=np.complex128)
    cdef const double[::1] hv = h.reshape(-1).view(np.float64)
    cdef Py_ssize_t n = hv.shape[0] // 2
    out = np.empty(n, dtype=np.uint8)
    cdef unsigned char[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            ov[i] = 1 if hv[2 * i] < 0.0 else 0
    return out.reshape(h.shape)
