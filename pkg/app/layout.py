"""Layout of the viewer: problem and solver controls on the left, results on the right."""

from __future__ import annotations

from typing import Tuple

import streamlit as st

from app.components import (
    render_dynamics_panel,
    render_residual_panel,
    render_run_summary,
    render_strata_panel,
    render_value_panel,
)
from config import DEFAULT_TAU, load_settings
from core.errors import HJSDError
from core.hjsd_loader import parse_hjsd
from core.models import SolverConfig
from core.pipeline import Solution, solve_problem
from data.problems import REFERENCE_PROBLEMS, problem_text

UPLOAD_OPTION = "upload a file"
SESSION_KEY = "solution"


def _parse_traces(text: str, dimension: int) -> Tuple[Tuple[float, ...], ...]:
    """``"x,y; x,y"`` into start points; raises ``ValueError`` on bad input."""

    starts = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        values = tuple(float(part) for part in chunk.split(","))
        if len(values) != dimension:
            raise ValueError(f"trace start {chunk!r} needs {dimension} coordinates")
        starts.append(values)
    return tuple(starts)


def _problem_source() -> Tuple[str | None, str]:
    names = list(REFERENCE_PROBLEMS) + [UPLOAD_OPTION]
    choice = st.selectbox(
        "Problem",
        names,
        format_func=lambda n: n if n == UPLOAD_OPTION else f"{n}: {REFERENCE_PROBLEMS[n].description}",
    )
    if choice == UPLOAD_OPTION:
        upload = st.file_uploader("Problem file", type=["hjsd"])
        if upload is None:
            return None, "upload"
        return upload.getvalue().decode("utf-8"), upload.name
    default_nodes = 41 if REFERENCE_PROBLEMS[choice].dimension == 2 else 21
    nodes = st.number_input("Nodes per axis", min_value=5, max_value=401, value=default_nodes, step=2)
    return problem_text(choice, int(nodes)), choice


def render_viewer() -> None:
    """Render the controls, run the solver on demand and show the results."""

    settings = load_settings()
    controls, results = st.columns([1, 3], gap="large")
    with controls:
        text, source = _problem_source()
        h = st.number_input("Time step h", min_value=1e-4, max_value=0.99, value=0.1, format="%.4f")
        tau = st.number_input("Tolerance", min_value=1e-12, value=DEFAULT_TAU, format="%.1e")
        traces_text = st.text_input("Trace starts", placeholder="0,0.9; 0.5,-0.5")
        run_clicked = st.button("Solve", type="primary", disabled=text is None)

    if run_clicked and text is not None:
        try:
            problem = parse_hjsd(text, source=source)
            starts = _parse_traces(traces_text, problem.dimension)
            config = SolverConfig(
                h=float(h),
                tau=float(tau),
                threads=settings.threads,
                stencil_cache_mb=settings.stencil_cache_mb,
            )
            with st.spinner("Solving..."):
                st.session_state[SESSION_KEY] = solve_problem(problem, config, starts)
        except (HJSDError, ValueError) as exc:
            with results:
                st.error(str(exc))
            return

    solution: Solution | None = st.session_state.get(SESSION_KEY)
    with results:
        if solution is None:
            st.info("Pick a problem and press Solve.")
            return
        render_run_summary(solution)
        value_tab, dynamics_tab, strata_tab, residual_tab = st.tabs(
            ["Value function", "Optimal dynamics", "Stratification", "Residuals"]
        )
        with value_tab:
            render_value_panel(solution)
        with dynamics_tab:
            render_dynamics_panel(solution)
        with strata_tab:
            render_strata_panel(solution)
        with residual_tab:
            render_residual_panel(solution)


__all__ = ["render_viewer"]
