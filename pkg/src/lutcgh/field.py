"""Complex fields and the unitary 2-D DFT pair used for far-field propagation.

Fields are plain numpy arrays of shape ``(..., N_y, N_x)``: row index is ``y``
(downwards), column index is ``x`` (rightwards), origin top-left.  Frequency
indices are unshifted, so DC sits at ``[0, 0]``.  Leading axes are batch axes,
which lets a whole stack of sub-frames go through one FFT call.
"""

import numpy as np
import scipy.fft as spfft


class InvalidFieldError(ValueError):
    """Raised for empty, non-2-D or non-finite fields."""


def as_field(f):
    """Validate ``f`` and return it as a complex128 array."""
    f = np.asarray(f)
    if f.ndim < 2:
        raise InvalidFieldError(f"field must be at least 2-D, got shape {f.shape}")
    if f.shape[-1] < 1 or f.shape[-2] < 1:
        raise InvalidFieldError(f"field dimensions must be >= 1, got shape {f.shape}")
    f = f.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(f)):
        raise InvalidFieldError("field contains NaN or Inf")
    return f


def as_image(img):
    """Validate a real amplitude image with values in [0, 1]."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2 or img.shape[0] < 1 or img.shape[1] < 1:
        raise InvalidFieldError(f"image must be a non-empty 2-D array, got shape {img.shape}")
    if not np.all(np.isfinite(img)):
        raise InvalidFieldError("image contains NaN or Inf")
    if img.min() < 0.0 or img.max() > 1.0:
        raise InvalidFieldError("image amplitudes must lie in [0, 1]")
    return img


def dft2(f):
    """Forward DFT with symmetric ``1/sqrt(N_x N_y)`` scaling over the last two axes."""
    return spfft.fft2(as_field(f), norm="ortho")


def idft2(F):
    """Inverse of :func:`dft2`, with the same symmetric scaling."""
    return spfft.ifft2(as_field(F), norm="ortho")


def intensity(F):
    """Element-wise ``|F|**2`` (not clamped)."""
    F = np.asarray(F)
    return F.real * F.real + F.imag * F.imag


def total_energy(f):
    """Sum of ``|f|**2`` over all elements."""
    return float(np.sum(intensity(f)))
