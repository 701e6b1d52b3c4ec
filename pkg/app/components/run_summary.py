"""Summary card for a finished solve."""

from __future__ import annotations

from html import escape
from textwrap import dedent

import streamlit as st

from core.pipeline import Solution, point_values


def _metric(label: str, value: str, tone: str = "") -> str:
    modifier = f" metric__value--{tone}" if tone else ""
    return (
        f'<div class="metric"><div class="metric__value{modifier}">{escape(value)}</div>'
        f'<div class="metric__label">{escape(label)}</div></div>'
    )


def render_run_summary(solution: Solution) -> None:
    """Render convergence metrics, point values and stratification warnings."""

    field = solution.field
    metrics = "".join(
        (
            _metric("status", "converged" if field.converged else "not converged", "ok" if field.converged else "bad"),
            _metric("sweeps", str(field.iterations)),
            _metric("residual", f"{field.residual:.2e}"),
            _metric("wall time", f"{solution.wall_time:.1f}s"),
            _metric("h", f"{solution.config.h:g}"),
        )
    )
    st.markdown(
        dedent(
            f"""
            <div class="card">
              <p class="card__title">Run</p>
              {metrics}
            </div>
            """
        ),
        unsafe_allow_html=True,
    )

    values = point_values(solution.domain, field)
    if values:
        st.dataframe(
            {"point": list(values), "u": [round(v, 6) for v in values.values()]},
            hide_index=True,
            use_container_width=True,
        )
    for diagnostic in solution.domain.diagnostics:
        where = f"line {diagnostic.line}: " if diagnostic.line is not None else ""
        st.warning(f"{where}{diagnostic.message}")
    if field.penalized is not None and field.penalized.any():
        st.warning(f"{int(field.penalized.sum())} node(s) have every control penalized")
