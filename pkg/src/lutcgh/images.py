"""Grayscale image I/O and built-in synthetic targets.

Only 8-bit single-channel PNG and binary PGM (P5) are accepted; a pixel
value ``v`` becomes amplitude ``v / 255``.
"""

import numpy as np
from PIL import Image
from scipy import ndimage


class ImageFormatError(ValueError):
    """The file decodes but is not an 8-bit grayscale PNG/PGM."""


SYNTHETIC_PREFIX = "synthetic:"


def load_grayscale(path):
    """Read ``path`` as a float64 amplitude array in [0, 1]."""
    try:
        img = Image.open(path)
        img.load()
    except FileNotFoundError:
        raise
    except OSError as exc:
        if isinstance(exc, PermissionError):
            raise
        raise ImageFormatError(f"{path}: cannot decode image ({exc})") from exc
    if img.format not in ("PNG", "PPM"):
        raise ImageFormatError(f"{path}: unsupported format {img.format}; use PNG or PGM")
    if img.mode != "L":
        raise ImageFormatError(f"{path}: expected 8-bit grayscale, got mode {img.mode!r}")
    return np.asarray(img, dtype=np.float64) / 255.0


def save_grayscale(path, data):
    """Write a uint8 array as PNG, or PGM when the suffix is ``.pgm``."""
    data = np.asarray(data, dtype=np.uint8)
    fmt = "PPM" if str(path).lower().endswith(".pgm") else "PNG"
    Image.fromarray(data, mode="L").save(path, format=fmt)


def resample(img, width, height):
    """Bilinear resample of an amplitude image; a no-op at the same size."""
    img = np.asarray(img, dtype=np.float64)
    if img.shape == (height, width):
        return img
    out = Image.fromarray(img.astype(np.float32), mode="F").resize((width, height), Image.BILINEAR)
    return np.clip(np.asarray(out, dtype=np.float64), 0.0, 1.0)


# -- synthetic targets ------------------------------------------------------

def rectangle(height, width, fill=0.5):
    """Centred filled rectangle covering ``fill`` of each dimension."""
    img = np.zeros((height, width))
    h, w = max(1, round(height * fill)), max(1, round(width * fill))
    r, c = (height - h) // 2, (width - w) // 2
    img[r : r + h, c : c + w] = 1.0
    return img


def checkerboard(height, width, square=8):
    y, x = np.mgrid[0:height, 0:width]
    return (((y // square) + (x // square)) % 2).astype(np.float64)


def radial_ramp(height, width):
    """1 at the centre falling linearly to 0 at the corners."""
    y, x = np.mgrid[0:height, 0:width]
    r = np.hypot((y - (height - 1) / 2) / height, (x - (width - 1) / 2) / width)
    return np.clip(1.0 - r / r.max(), 0.0, 1.0)


def texture(height, width, seed=5, sigma=2.0):
    """Smoothed uniform noise stretched to [0, 1]; a stand-in for natural images."""
    rng = np.random.default_rng(seed)
    a = ndimage.gaussian_filter(rng.random((height, width)), sigma, mode="wrap")
    return (a - a.min()) / (a.max() - a.min())


SYNTHETIC = {
    "rectangle": rectangle,
    "checkerboard": checkerboard,
    "ramp": radial_ramp,
    "texture": texture,
}


def load_target(path, width, height):
    """Load a target image (or ``synthetic:NAME``) at ``width x height``."""
    path = str(path)
    if path.startswith(SYNTHETIC_PREFIX):
        name = path[len(SYNTHETIC_PREFIX) :]
        if name not in SYNTHETIC:
            raise ImageFormatError(f"unknown synthetic target {name!r}; choose from {sorted(SYNTHETIC)}")
        return SYNTHETIC[name](height, width)
    return resample(load_grayscale(path), width, height)
