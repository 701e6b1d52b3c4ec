"""Figure panels for the viewer."""

from __future__ import annotations

import streamlit as st

from core.pipeline import Solution
from visualization.charts import (
    build_dynamics_figure,
    build_residual_figure,
    build_stratification_figure,
    build_value_figure,
)


def _z_index(solution: Solution, key: str) -> int | None:
    grid = solution.domain.grid
    if grid.dimension < 3:
        return None
    axis = grid.axis_coordinates()[2]
    middle = grid.counts[2] // 2
    chosen = st.select_slider(
        "z slice",
        options=list(range(grid.counts[2])),
        value=middle,
        format_func=lambda i: f"z = {axis[i]:.3g}",
        key=key,
    )
    return int(chosen)


def render_value_panel(solution: Solution) -> None:
    z_index = _z_index(solution, "value-z")
    st.plotly_chart(
        build_value_figure(solution.domain, solution.field, solution.traces, z_index=z_index),
        use_container_width=True,
    )


def render_dynamics_panel(solution: Solution) -> None:
    z_index = _z_index(solution, "dynamics-z")
    st.plotly_chart(
        build_dynamics_figure(solution.domain, solution.dynamics, z_index=z_index),
        use_container_width=True,
    )


def render_strata_panel(solution: Solution) -> None:
    color_by = st.radio(
        "Colour by", ("stratum", "running_cost", "speed"), horizontal=True, key="strata-color"
    )
    z_index = _z_index(solution, "strata-z")
    st.plotly_chart(
        build_stratification_figure(solution.domain, color_by=color_by, z_index=z_index),
        use_container_width=True,
    )


def render_residual_panel(solution: Solution) -> None:
    st.plotly_chart(build_residual_figure(solution.field.residuals), use_container_width=True)
