"""UI components for the solver viewer."""

from .figures import render_dynamics_panel, render_residual_panel, render_strata_panel, render_value_panel
from .run_summary import render_run_summary

__all__ = [
    "render_run_summary",
    "render_value_panel",
    "render_dynamics_panel",
    "render_strata_panel",
    "render_residual_panel",
]
