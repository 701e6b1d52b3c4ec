"""Shared fixtures and builders for the test suite."""

from __future__ import annotations

from pathlib import Path

import pytest

from core.hjsd_loader import parse_hjsd
from core.stratification import StratifiedDomain, build_domain

FIXTURES = Path(__file__).resolve().parent / "fixtures"


def domain_from(text: str) -> StratifiedDomain:
    return build_domain(parse_hjsd(text))


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def unit_region() -> StratifiedDomain:
    """Single region on a 5x5 grid with unit speed, cost and discount."""

    return domain_from("#HJSD2D 5 5 -1 1 -1 1 3 4\n#S 0 0 1 1 1\n")


@pytest.fixture
def segment_domain() -> StratifiedDomain:
    """Point target above a slow segment on a 21x21 grid."""

    return domain_from(
        "#HJSD2D 21 21 -1 1 -1 1 3 16\n"
        "#P 0 0.5 0 1\n"
        "#P -0.5 0 2 1e-4\n"
        "#P 0.5 0 2 1e-4\n"
        "#LY 0 -0.5 0.5 1 0.25*(1+4*abs(x)) 1e-4\n"
        "#S 0.3 0.3 1 5 1e-4\n"
    )
