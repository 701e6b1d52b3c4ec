"""Plotly figures for solved problems: value, dynamics, strata and residuals.

3D problems are shown on one z-slice, picked by node index.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
import pandas as pd
import plotly.express as px
import plotly.figure_factory as ff
import plotly.graph_objects as go

from .theme import theme_tokens
from app.theme import FONT_STACK
from core.models import Trace
from core.solver import ValueField
from core.stratification import StratifiedDomain
from core.trajectory import DynamicsField
from core.vtk_writer import owning_strata

TOKENS = theme_tokens()

__all__ = [
    "slice_field",
    "build_value_figure",
    "build_dynamics_figure",
    "build_stratification_figure",
    "build_residual_figure",
]


def _layout(fig: go.Figure, *, square: bool = True) -> go.Figure:
    fig.update_layout(
        margin=dict(l=40, r=20, t=30, b=40),
        font=dict(family=FONT_STACK, color=TOKENS.label_color, size=TOKENS.label_size),
        hoverlabel=dict(font=dict(family=FONT_STACK, size=TOKENS.label_size)),
        plot_bgcolor=TOKENS.neutral_white,
    )
    if square:
        fig.update_yaxes(scaleanchor="x", scaleratio=1)
    return fig


def slice_field(domain: StratifiedDomain, values: np.ndarray, z_index: int | None = None) -> np.ndarray:
    """Nodal values as a ``(Ny, Nx)`` array; 3D fields are cut at ``z_index``."""

    grid = domain.grid
    shaped = grid.shape_field(values)
    if grid.dimension == 3:
        index = grid.counts[2] // 2 if z_index is None else int(z_index)
        if not 0 <= index < grid.counts[2]:
            raise ValueError(f"z_index must lie in [0, {grid.counts[2] - 1}], got {index}")
        shaped = shaped[:, :, index]
    return shaped.T


def build_value_figure(
    domain: StratifiedDomain,
    field: ValueField,
    traces: Sequence[Trace] = (),
    *,
    z_index: int | None = None,
) -> go.Figure:
    """Heatmap of the value function with level sets and trajectories on top."""

    xs, ys = domain.grid.axis_coordinates()[:2]
    plane = slice_field(domain, field.values, z_index)
    fig = go.Figure(
        go.Heatmap(x=xs, y=ys, z=plane, colorscale=TOKENS.value_scale, colorbar=dict(title="u"))
    )
    fig.add_trace(
        go.Contour(
            x=xs,
            y=ys,
            z=plane,
            ncontours=TOKENS.contour_levels,
            contours=dict(coloring="none"),
            line=dict(color=TOKENS.contour_color, width=1),
            showscale=False,
            hoverinfo="skip",
        )
    )
    for path in traces:
        points = np.asarray(path.points)
        fig.add_trace(
            go.Scatter(
                x=points[:, 0],
                y=points[:, 1],
                mode="lines",
                line=dict(color=TOKENS.trace_color, width=2),
                name=f"from {tuple(round(c, 3) for c in path.start)}",
            )
        )
    fig.update_layout(showlegend=bool(traces))
    return _layout(fig)


def build_dynamics_figure(
    domain: StratifiedDomain,
    dynamics: DynamicsField,
    *,
    stride: int | None = None,
    z_index: int | None = None,
) -> go.Figure:
    """Quiver plot of the optimal velocity, subsampled every ``stride`` nodes."""

    grid = domain.grid
    xs, ys = grid.axis_coordinates()[:2]
    step = stride or max(1, max(grid.counts[:2]) // 25)
    u = slice_field(domain, dynamics.vectors[:, 0], z_index)[::step, ::step]
    v = slice_field(domain, dynamics.vectors[:, 1], z_index)[::step, ::step]
    gx, gy = np.meshgrid(xs[::step], ys[::step])
    fig = ff.create_quiver(
        gx.ravel(),
        gy.ravel(),
        u.ravel(),
        v.ravel(),
        scale=0.5 * step * grid.dx / max(float(np.max(np.hypot(u, v))), 1e-12),
        line=dict(color=TOKENS.quiver_color, width=1),
        name="optimal dynamics",
    )
    return _layout(fig)


def build_stratification_figure(
    domain: StratifiedDomain,
    *,
    color_by: str = "stratum",
    z_index: int | None = None,
) -> go.Figure:
    """Map of the strata, coloured by dimension, running cost or speed."""

    xs, ys = domain.grid.axis_coordinates()[:2]
    if color_by == "stratum":
        stratum, _ = owning_strata(domain)
        plane = slice_field(domain, stratum, z_index)
        palette = TOKENS.stratum_palette[: domain.dimension + 1]
        scale = [(i / max(len(palette) - 1, 1), color) for i, color in enumerate(palette)]
        heatmap = go.Heatmap(
            x=xs, y=ys, z=plane, zmin=0, zmax=domain.dimension, colorscale=scale, colorbar=dict(title="dim")
        )
    elif color_by in ("running_cost", "speed"):
        _, sampled = owning_strata(domain, "cost_values" if color_by == "running_cost" else "speed_values")
        plane = slice_field(domain, sampled, z_index)
        title = "cost" if color_by == "running_cost" else "speed"
        heatmap = go.Heatmap(x=xs, y=ys, z=plane, colorscale=TOKENS.cost_scale, colorbar=dict(title=title))
    else:
        raise ValueError(f"color_by must be 'stratum', 'running_cost' or 'speed', got {color_by!r}")
    return _layout(go.Figure(heatmap))


def build_residual_figure(residuals: Sequence[float]) -> go.Figure:
    """Sup-norm residual per sweep on a log scale."""

    frame = pd.DataFrame({"sweep": np.arange(1, len(residuals) + 1), "residual": list(residuals)})
    fig = px.line(frame, x="sweep", y="residual", log_y=True, color_discrete_sequence=[TOKENS.residual_color])
    fig.update_xaxes(showgrid=True, gridcolor=TOKENS.grid_color)
    fig.update_yaxes(showgrid=True, gridcolor=TOKENS.grid_color)
    return _layout(fig, square=False)
