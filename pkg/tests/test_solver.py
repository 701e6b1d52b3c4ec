import numpy as np
import pytest

from core.errors import ConfigError
from core.hjsd_loader import parse_hjsd
from core.models import ComponentId, SolverConfig
from core.solver import (
    SchemeOperator,
    candidate_value,
    default_penalty,
    hamiltonian_value,
    iterate,
    resolve_config,
    solve,
    update_node,
)
from core.stratification import build_domain
from data.problems import segment_problem
from tests.conftest import domain_from

QUADRATIC_COST = "#HJSD2D 5 5 -1 1 -1 1 3 4\n#S 0 0 1 1+x^2 0.5\n"


def test_constant_data_give_a_constant_solution(unit_region):
    field = solve(unit_region, SolverConfig(h=0.5, tau=1e-10))
    assert field.converged
    np.testing.assert_allclose(field.values, 1.0, atol=1e-9)
    assert field.penalized is not None and not field.penalized.any()


def test_first_sweeps_halve_the_residual(unit_region):
    sweeps = iterate(unit_region, SolverConfig(h=0.5))
    residuals = [next(sweeps).residual for _ in range(3)]
    assert residuals == pytest.approx([0.5, 0.25, 0.125])


def test_sweep_budget_is_reported_as_unconverged(unit_region):
    field = solve(unit_region, SolverConfig(h=0.5, max_iterations=3))
    assert not field.converged
    assert field.iterations == 3
    assert len(field.residuals) == 3


def test_candidate_values_by_hand(unit_region):
    config = SolverConfig(h=0.5)
    centre = unit_region.grid.flat_index((2, 2))
    region = ComponentId(2, 0)
    zeros = np.zeros(unit_region.grid.n_nodes)
    assert candidate_value(unit_region, zeros, centre, region, 0, config) == pytest.approx(0.5)

    x = unit_region.grid.node_coordinates()[:, 0]
    assert candidate_value(unit_region, x, centre, region, 0, config) == pytest.approx(0.75)

    # Control 2 points along -x and leaves the box from the lower-left corner.
    assert candidate_value(unit_region, zeros, 0, region, 2, config) == pytest.approx(10.0)


def test_candidate_needs_a_node_of_the_closure(segment_domain):
    line = ComponentId(1, 0)
    with pytest.raises(ValueError, match="closure"):
        candidate_value(segment_domain, np.zeros(segment_domain.grid.n_nodes), 0, line, 0, SolverConfig(h=0.2))


@pytest.mark.parametrize("text", [QUADRATIC_COST, None])
def test_vectorised_update_matches_the_scalar_loop(segment_domain, text):
    domain = segment_domain if text is None else domain_from(text)
    config = SolverConfig(h=0.2)
    values = np.random.default_rng(11).uniform(0.0, 1.0, domain.grid.n_nodes)
    with SchemeOperator(domain, config) as operator:
        new, component, control, _ = operator.apply(values)
    for node in range(domain.grid.n_nodes):
        value, (cid, index) = update_node(domain, values, node, config)
        assert new[node] == pytest.approx(value, abs=1e-12)
        assert domain.components[component[node]].cid == cid
        assert control[node] == index


def test_scheme_is_monotone_and_contracting(segment_domain):
    rng = np.random.default_rng(5)
    n = segment_domain.grid.n_nodes
    h = 0.2
    factor = 1.0 - segment_domain.c_min * h
    with SchemeOperator(segment_domain, SolverConfig(h=h)) as operator:
        for _ in range(50):
            u = rng.uniform(-1.0, 1.0, n)
            v = u + rng.uniform(0.0, 0.5, n)
            su = operator.apply(u)[0]
            sv = operator.apply(v)[0]
            assert (su <= sv).all()
            assert np.max(np.abs(sv - su)) <= factor * np.max(np.abs(v - u)) + 1e-12


def test_constant_shift_scales_by_the_discount_factor(unit_region):
    rng = np.random.default_rng(9)
    with SchemeOperator(unit_region, SolverConfig(h=0.1)) as operator:
        for _ in range(20):
            u = rng.uniform(0.0, 1.0, unit_region.grid.n_nodes)
            shift = rng.uniform(-1.0, 1.0)
            base = operator.apply(u)[0]
            shifted = operator.apply(u + shift)[0]
            np.testing.assert_allclose(shifted - base, 0.9 * shift, atol=1e-12)


def test_solution_is_bounded_by_cost_over_discount():
    domain = domain_from(QUADRATIC_COST)
    field = solve(domain, SolverConfig(h=0.2, tau=1e-9))
    assert field.converged
    assert field.sup_norm <= domain.bound / domain.c_min + 1e-9
    assert field.values.min() >= 1.0 / 0.5 - 1e-6


@pytest.mark.parametrize(
    ("overrides", "fragment"),
    [
        ({"h": 1.0}, "h * c_max"),
        ({"h": -0.1}, "positive"),
        ({"tau": 0.0}, "tolerance"),
        ({"penalty": 0.5}, "must exceed"),
        ({"threads": 0}, "threads"),
        ({"max_iterations": 0}, "max_iterations"),
    ],
)
def test_invalid_configuration_is_rejected(unit_region, overrides, fragment):
    config = SolverConfig(**{"h": 0.5, **overrides})
    with pytest.raises(ConfigError, match=fragment.replace("*", r"\*")):
        resolve_config(unit_region, config)


def test_defaults_are_filled_from_the_domain(segment_domain):
    resolved = resolve_config(segment_domain, SolverConfig(h=0.2))
    assert resolved.penalty == pytest.approx(default_penalty(segment_domain))
    assert resolved.penalty > segment_domain.bound / segment_domain.c_min
    assert resolved.max_iterations == 10 * (21 + 21) * 5


def test_thread_count_does_not_change_results(segment_domain):
    one = solve(segment_domain, SolverConfig(h=0.2, threads=1))
    three = solve(segment_domain, SolverConfig(h=0.2, threads=3))
    np.testing.assert_array_equal(one.values, three.values)
    np.testing.assert_array_equal(one.component, three.component)
    np.testing.assert_array_equal(one.control, three.control)
    assert one.iterations == three.iterations


def test_stencil_cache_does_not_change_results(segment_domain):
    cached = solve(segment_domain, SolverConfig(h=0.2, max_iterations=20))
    rebuilt = solve(segment_domain, SolverConfig(h=0.2, max_iterations=20, stencil_cache_mb=0))
    np.testing.assert_array_equal(cached.values, rebuilt.values)


def test_hamiltonian_by_hand(unit_region):
    assert hamiltonian_value(unit_region, (0.0, 0.0), 0.0, (1.0, 0.0)) == pytest.approx(0.0)
    assert hamiltonian_value(unit_region, (0.0, 0.0), 2.0, (1.0, 0.0)) == pytest.approx(2.0)
    only_east = {0: np.array([True, False, False, False])}
    assert hamiltonian_value(unit_region, 12, 2.0, (1.0, 0.0), admissible=only_east) == pytest.approx(0.0)


def test_hamiltonian_takes_the_max_over_labels(segment_domain):
    target = segment_domain.node_of((0.0, 0.5))
    # The target point has zero cost and unit discount; the region adds -b a.p terms.
    value = hamiltonian_value(segment_domain, target, 1.0, (0.0, 0.0))
    assert value == pytest.approx(1.0)


def _brute_force(n=5, h=0.2, sweeps=400):
    """Plain-loop value iteration for one region with b=1, c=1, l=1+x^2 and four controls."""

    dx = 2.0 / (n - 1)
    penalty = 20.0
    controls = [(np.cos(2 * np.pi * m / 4), np.sin(2 * np.pi * m / 4)) for m in range(4)]
    u = [[0.0] * n for _ in range(n)]
    for _ in range(sweeps):
        new = [[0.0] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                x, y = -1.0 + i * dx, -1.0 + j * dx
                best = float("inf")
                for ax, ay in controls:
                    ti, tj = (x + h * ax + 1.0) / dx, (y + h * ay + 1.0) / dx
                    if min(ti, tj) < -1e-9 or max(ti, tj) > n - 1 + 1e-9:
                        value = penalty
                    else:
                        ti, tj = min(max(ti, 0.0), n - 1.0), min(max(tj, 0.0), n - 1.0)
                        ci, cj = min(int(ti), n - 2), min(int(tj), n - 2)
                        s, t = ti - ci, tj - cj
                        if s >= t:
                            inner = (1 - s) * u[ci][cj] + (s - t) * u[ci + 1][cj] + t * u[ci + 1][cj + 1]
                        else:
                            inner = (1 - t) * u[ci][cj] + (t - s) * u[ci][cj + 1] + s * u[ci + 1][cj + 1]
                        value = (1 - h) * inner + h * (1 + x * x)
                    best = min(best, value)
                new[i][j] = best
        u = new
    return np.array([u[i][j] for j in range(n) for i in range(n)])


def test_solve_agrees_with_a_plain_loop_iteration():
    domain = domain_from("#HJSD2D 5 5 -1 1 -1 1 3 4\n#S 0 0 1 1+x^2 1\n")
    field = solve(domain, SolverConfig(h=0.2, tau=1e-13, max_iterations=400))
    np.testing.assert_allclose(field.values, _brute_force(), atol=1e-10)


def test_reference_segment_candidates_at_the_target():
    domain = build_domain(parse_hjsd(segment_problem()))
    config = SolverConfig(h=0.1)
    target = domain.node_of((0.0, 0.75))
    zeros = np.zeros(domain.grid.n_nodes)
    assert candidate_value(domain, zeros, target, ComponentId(0, 0), 0, config) == 0.0
    assert candidate_value(domain, zeros, target, ComponentId(2, 0), 5, config) == pytest.approx(0.5)
    assert update_node(domain, zeros, target, config) == (0.0, (ComponentId(0, 0), 0))
