import pytest

from core.hjsd_loader import load_problem, parse_hjsd
from core.models import SolverConfig
from core.solver import solve
from core.stratification import build_domain
from data.problems import (
    FIXTURES_DIR,
    REFERENCE_PROBLEMS,
    constant_problem,
    problem_text,
    write_problem_files,
)


@pytest.mark.parametrize("name", sorted(REFERENCE_PROBLEMS))
def test_shipped_files_match_the_generators(name):
    path = FIXTURES_DIR / f"{name}.hjsd"
    assert path.read_text(encoding="utf-8") == problem_text(name)
    assert load_problem(path).dimension == REFERENCE_PROBLEMS[name].dimension


@pytest.mark.parametrize(("name", "nodes"), [("segment", 21), ("lanes", 21), ("fence", 41), ("eikonal", 21)])
def test_reference_geometry_builds_on_coarse_grids(name, nodes):
    domain = build_domain(parse_hjsd(problem_text(name, nodes)))
    assert domain.grid.counts == (nodes, nodes)
    assert domain.diagnostics == ()


def test_write_problem_files(tmp_path):
    written = write_problem_files(tmp_path / "problems", nodes=11)
    assert sorted(path.stem for path in written) == sorted(REFERENCE_PROBLEMS)
    assert load_problem(tmp_path / "problems" / "segment.hjsd").header.counts == (11, 11)


def test_unknown_problem_name():
    with pytest.raises(ValueError, match="unknown reference problem"):
        problem_text("maze")


def test_constant_problem_solves_to_one():
    domain = build_domain(parse_hjsd(constant_problem(nodes=7, cost="2", discount=2.0)))
    field = solve(domain, SolverConfig(h=0.25, tau=1e-10))
    assert field.values == pytest.approx([1.0] * domain.grid.n_nodes, abs=1e-8)
