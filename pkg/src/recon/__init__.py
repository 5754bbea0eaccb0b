"""Density-compensated adjoint and unrolled reconstructions."""

from .correction import CORRECTION_REGISTRY, CorrectionKind, CorrectionOp, small_cnn_apply
from .model import UnrolledModel, build_model, create_model
from .reconstruct import dc_adjoint_recon, data_consistency_residual, unrolled_forward

__all__ = [
    "CORRECTION_REGISTRY",
    "CorrectionKind",
    "CorrectionOp",
    "UnrolledModel",
    "build_model",
    "create_model",
    "dc_adjoint_recon",
    "data_consistency_residual",
    "small_cnn_apply",
    "unrolled_forward",
]
