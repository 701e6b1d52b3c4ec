"""Streamlit application entrypoint: ``streamlit run app/main.py``."""

from __future__ import annotations

import logging
import sys
from pathlib import Path

import streamlit as st

PROJECT_ROOT = Path(__file__).resolve().parent.parent
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from app.layout import render_viewer
from app.theme import apply_theme
from config import load_settings


def main() -> None:
    """Entry point for the Streamlit app."""

    st.set_page_config(
        page_title="Stratified HJB solver",
        layout="wide",
        initial_sidebar_state="collapsed",
    )
    logging.basicConfig(level=getattr(logging, load_settings().log_level, logging.INFO))
    apply_theme()
    st.title("Stratified HJB solver")
    render_viewer()


if __name__ == "__main__":
    main()
