"""Refinement studies built on the solver: consistency and convergence tables."""

from .consistency import consistency_residual, consistency_study
from .convergence import convergence_study, eikonal_error

__all__ = [
	"consistency_residual",
	"consistency_study",
	"convergence_study",
	"eikonal_error",
]
