"""Streamlit theming for the solver viewer."""

from __future__ import annotations

from dataclasses import dataclass
from textwrap import dedent

import streamlit as st


@dataclass(frozen=True)
class Palette:
	"""Colours shared by the CSS and the summary cards."""

	background: str = "#f7f8fb"
	surface: str = "#ffffff"
	primary: str = "#2563eb"
	border: str = "rgba(148, 163, 184, 0.18)"
	text_primary: str = "#0f172a"
	text_secondary: str = "#6b7280"
	success: str = "#16a34a"
	warning: str = "#f59e0b"
	danger: str = "#dc2626"


PALETTE = Palette()

# Shared font family used across the viewer and the plotly figures.
FONT_STACK = '"Inter", "SF Pro Display", "Segoe UI", "Helvetica Neue", sans-serif'


def build_global_css(palette: Palette = PALETTE) -> str:
	"""Return the CSS injected into every page."""

	return dedent(
		f"""
		:root {{
			--app-bg: {palette.background};
			--app-text: {palette.text_primary};
			--app-text-muted: {palette.text_secondary};
			--card-bg: {palette.surface};
			--card-border: {palette.border};
			--card-radius: 1.25rem;
			--font-family: {FONT_STACK};
		}}

		html, body, [class*="css"] {{
			font-family: var(--font-family);
			color: var(--app-text);
		}}

		.stApp {{
			background: var(--app-bg);
		}}

		.card {{
			background: var(--card-bg);
			border: 1px solid var(--card-border);
			border-radius: var(--card-radius);
			padding: 1.1rem 1.35rem;
			margin-bottom: 1rem;
		}}

		.card__title {{
			font-size: .85rem;
			text-transform: uppercase;
			letter-spacing: .04em;
			color: var(--app-text-muted);
			margin: 0 0 .5rem;
		}}

		.metric {{
			display: inline-block;
			margin-right: 2rem;
		}}

		.metric__value {{
			font-size: 1.4rem;
			font-weight: 600;
		}}

		.metric__value--ok {{ color: {palette.success}; }}
		.metric__value--warn {{ color: {palette.warning}; }}
		.metric__value--bad {{ color: {palette.danger}; }}

		.metric__label {{
			font-size: .8rem;
			color: var(--app-text-muted);
		}}
		"""
	)


def apply_theme() -> None:
	"""Inject custom CSS into the current Streamlit app."""

	st.markdown(f"<style>{build_global_css()}</style>", unsafe_allow_html=True)


__all__ = ["PALETTE", "Palette", "FONT_STACK", "apply_theme", "build_global_css"]
