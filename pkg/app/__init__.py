"""app package: Streamlit viewer for solved problems."""

__all__ = ["main", "layout", "theme", "components"]
