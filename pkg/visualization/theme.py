"""Shared Plotly theme tokens for the solver's figures."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ThemeTokens:
    label_color: str = "#475569"
    label_size: int = 12
    grid_color: str = "#EEF2FF"
    value_scale: str = "Viridis"
    cost_scale: str = "Cividis"
    contour_color: str = "rgba(255, 255, 255, 0.55)"
    contour_levels: int = 20
    trace_color: str = "#F97316"
    quiver_color: str = "#1D4ED8"
    residual_color: str = "#2563EB"
    neutral_white: str = "#FFFFFF"
    # One colour per stratum dimension: points, lines, surfaces, volumes.
    stratum_palette: tuple[str, ...] = (
        "#FF3B30",
        "#F59E0B",
        "#22C55E",
        "#94A3B8",
    )


_TOKENS = ThemeTokens()


def theme_tokens() -> ThemeTokens:
    """Return the shared visualization tokens."""

    return _TOKENS
