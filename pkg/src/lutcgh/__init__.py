"""Lookup-table phase randomisation for OSPR and Gerchberg-Saxton holograms."""

from ._backend import BACKEND, available as available_backends, use_backend
from .cgh import (
    BINARY_PHASE,
    QuantisationScheme,
    SubFrameSet,
    TargetSpec,
    embed_target,
    gs_generate,
    ospr_generate,
    pack_binary_frames,
    quantise,
    reconstruct_average,
)
from .field import dft2, idft2, intensity, total_energy
from .metrics import ErrorRecord, NmseCalibration, aggregate, mse, nmse
from .random_phase import (
    FlatSource,
    IndependentSource,
    PhaseLut,
    apply_phase,
    build_lut,
    flat_phase_source,
    hard_limits,
    is_prime,
    next_prime_above,
)

__version__ = "0.1.0"
