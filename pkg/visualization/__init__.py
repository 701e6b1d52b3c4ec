"""Plotly figures for solved problems."""

__all__ = ["charts", "theme"]
