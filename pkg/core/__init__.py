"""Numerical core of the stratified HJB solver.

Expose stable submodules for external imports and tooling.
"""

# Explicitly import submodules so that names in __all__ are real attributes
from . import errors as errors  # noqa: F401
from . import models as models  # noqa: F401
from . import expr as expr  # noqa: F401
from . import grid as grid  # noqa: F401
from . import controls as controls  # noqa: F401
from . import hjsd_loader as hjsd_loader  # noqa: F401
from . import stratification as stratification  # noqa: F401
from . import solver as solver  # noqa: F401
from . import trajectory as trajectory  # noqa: F401
from . import vtk_writer as vtk_writer  # noqa: F401
from . import pipeline as pipeline  # noqa: F401

__all__ = [
	"errors",
	"models",
	"expr",
	"grid",
	"controls",
	"hjsd_loader",
	"stratification",
	"solver",
	"trajectory",
	"vtk_writer",
	"pipeline",
]
