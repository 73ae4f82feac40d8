"""Finite-volume solver for systems of nonlocal conservation laws with
space-time memory kernels.

The heavy lifting lives in the compiled extension; this package re-exports
its public surface.
"""

from ._core import (
    ModelError,
    ModelSpec,
    NumericsError,
    PiecewiseConstant,
    ScaledTemporalKernel,
    SpatialKernel,
    TemporalKernel,
    cfl_lambda_max,
    custom_model,
    delta_study,
    keyfitz_kranzer_preset,
    l1_distance,
    lf_flux,
    mesh_study,
    observed_rate,
    piecewise_constant,
    simulate,
    validate_model,
    verify,
)

__all__ = [
    "ModelError",
    "ModelSpec",
    "NumericsError",
    "PiecewiseConstant",
    "ScaledTemporalKernel",
    "SpatialKernel",
    "TemporalKernel",
    "cfl_lambda_max",
    "custom_model",
    "delta_study",
    "keyfitz_kranzer_preset",
    "l1_distance",
    "lf_flux",
    "mesh_study",
    "observed_rate",
    "piecewise_constant",
    "simulate",
    "validate_model",
    "verify",
]

__version__ = "0.1.0"
