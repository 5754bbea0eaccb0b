"""Density compensation weights."""

from .pipe_menon import PipeMenonReport, apply_dc, density_gram, pipe_menon, pipe_menon_report

__all__ = ["PipeMenonReport", "apply_dc", "density_gram", "pipe_menon", "pipe_menon_report"]
