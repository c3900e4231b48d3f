"""Reconstruction error measures and run statistics."""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage


@dataclass
class ErrorRecord:
    """One measurement of the sweep.

    ``n_lut`` is the table length, with 0 meaning flat phase and
    :data:`INDEPENDENT` meaning the independent baseline source.
    """

    image_id: str
    n_lut: int
    run_index: int
    n_sf: int
    resolution: tuple
    mse: float
    seed: int = 0
    nmse: float = None

    def __post_init__(self):
        if not self.image_id:
            raise ValueError("image_id must be non-empty")
        if not self.mse >= 0:
            raise ValueError(f"mse must be >= 0, got {self.mse}")

    @property
    def sort_key(self):
        return (self.image_id, self.n_lut, self.run_index)


#: ``n_lut`` marker for records produced with the independent source
INDEPENDENT = -1


def mse(recon, target, region=None):
    """Amplitude MSE with a least-squares scale.

    ``recon`` is an intensity, ``target`` an amplitude.  Over ``region`` (a
    boolean mask, default everything) let ``A = sqrt(recon)`` and ``T =
    target``; the result is ``mean((alpha*A - T)**2)`` with ``alpha =
    <A,T>/<A,A>`` (0 when ``A`` vanishes).
    """
    recon = np.asarray(recon, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if recon.shape != target.shape:
        raise ValueError(f"shape mismatch: recon {recon.shape} vs target {target.shape}")
    if region is None:
        A, T = recon.ravel(), target.ravel()
    else:
        region = np.asarray(region, dtype=bool)
        if region.shape != recon.shape:
            raise ValueError(f"region shape {region.shape} does not match {recon.shape}")
        if not region.any():
            raise ValueError("measurement region is empty")
        A, T = recon[region], target[region]
    A = np.sqrt(np.maximum(A, 0.0))
    aa = float(np.dot(A, A))
    alpha = float(np.dot(A, T)) / aa if aa > 0 else 0.0
    return float(np.mean((alpha * A - T) ** 2))


@dataclass
class NmseCalibration:
    """Per-image mean MSE at the reference LUT length."""

    reference: dict = field(default_factory=dict)
    reference_image: str = "Mandrill"
    reference_n_lut: int = 1000

    def __post_init__(self):
        if self.reference_image not in self.reference:
            raise KeyError(f"reference image {self.reference_image!r} missing from calibration")
        for k, v in self.reference.items():
            if not v > 0:
                raise ValueError(f"calibration value for {k!r} must be > 0, got {v}")

    def ratio(self, image_id):
        if image_id not in self.reference:
            raise KeyError(f"image {image_id!r} has no calibration value")
        return self.reference[self.reference_image] / self.reference[image_id]


def nmse(record, cal):
    """Rescale ``record.mse`` so every image matches the reference image at the reference length."""
    return record.mse * cal.ratio(record.image_id)


@dataclass(frozen=True)
class Aggregate:
    mean: float
    std: float
    lower: float
    upper: float
    count: int

    @property
    def sem(self):
        return self.std / math.sqrt(self.count) if self.count > 1 else float("nan")


def aggregate(values):
    """Mean, unbiased sample std and the mean -/+ 2 std band.

    A single value gets ``std = nan``.
    """
    values = np.asarray(list(values), dtype=np.float64)
    if values.size == 0:
        raise ValueError("cannot aggregate an empty list")
    mean = float(values.mean())
    std = float(values.std(ddof=1)) if values.size > 1 else float("nan")
    return Aggregate(mean, std, mean - 2 * std, mean + 2 * std, int(values.size))


def edge_interior_masks(mask, width=1):
    """Split a boolean shape into its boundary band (``width`` pixels) and interior."""
    mask = np.asarray(mask, dtype=bool)
    interior = ndimage.binary_erosion(mask, iterations=width, border_value=0)
    return mask & ~interior, interior


def edge_interior_ratio(recon, mask, width=1):
    """Mean reconstructed energy on the boundary band over that in the interior."""
    recon = np.asarray(recon, dtype=np.float64)
    edge, interior = edge_interior_masks(mask, width)
    if not edge.any() or not interior.any():
        raise ValueError("shape too small to have both an edge band and an interior")
    return float(recon[edge].mean() / recon[interior].mean())


def mean_pairwise_correlation(fields):
    """Mean Pearson correlation over all distinct pairs of equally sized arrays."""
    X = np.asarray([np.asarray(f, dtype=np.float64).ravel() for f in fields])
    if X.shape[0] < 2:
        raise ValueError("need at least two fields")
    C = np.corrcoef(X)
    iu = np.triu_indices(X.shape[0], k=1)
    return float(C[iu].mean())
