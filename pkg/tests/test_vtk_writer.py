import numpy as np
import pytest

from core.errors import OutputError
from core.hjsd_loader import parse_hjsd
from core.models import SolverConfig, Trace
from core.solver import solve
from core.stratification import build_domain
from core.trajectory import extract_dynamics
from core.vtk_writer import owning_strata, traces_path, write_traces_vtk, write_vtk
from data.problems import plate_problem
from tests.vtk_reader import read_vtk


@pytest.fixture
def segment_solution(segment_domain):
    field = solve(segment_domain, SolverConfig(h=0.2))
    return segment_domain, field, extract_dynamics(segment_domain, field)


def test_value_file_layout(tmp_path, segment_solution):
    domain, field, dynamics = segment_solution
    path = write_vtk(domain, field, dynamics, tmp_path / "out.vtk")
    data = read_vtk(path)
    assert data.dataset == "STRUCTURED_GRID"
    assert data.dimensions == (21, 21, 1)
    assert data.order == ["value", "stratum_dim", "optimal_dynamics", "stratum", "running_cost"]
    np.testing.assert_array_equal(data.points[:, :2], domain.grid.node_coordinates())
    np.testing.assert_array_equal(data.points[:, 2], 0.0)
    np.testing.assert_array_equal(data.arrays["value"], field.values)
    np.testing.assert_array_equal(data.arrays["optimal_dynamics"][:, :2], dynamics.vectors)
    assert not traces_path(path).exists()


def test_owning_stratum_and_cost(segment_domain):
    stratum, cost = owning_strata(segment_domain)
    grid = segment_domain.grid
    assert stratum[segment_domain.node_of((0.0, 0.5))] == 0
    assert stratum[segment_domain.node_of((0.2, 0.0))] == 1
    assert cost[segment_domain.node_of((0.2, 0.0))] == pytest.approx(0.25 * (1 + 4 * 0.2))
    assert stratum[grid.flat_index((0, 0))] == 2
    assert cost[grid.flat_index((0, 0))] == pytest.approx(5.0)


def test_three_dimensional_file_keeps_z(tmp_path):
    domain = build_domain(parse_hjsd(plate_problem(nodes=9, controls=(3, 4, 2))))
    field = solve(domain, SolverConfig(h=0.2, max_iterations=3))
    dynamics = extract_dynamics(domain, field, allow_unconverged=True)
    data = read_vtk(write_vtk(domain, field, dynamics, tmp_path / "plate.vtk"))
    assert data.dimensions == (9, 9, 9)
    np.testing.assert_array_equal(data.points, domain.grid.node_coordinates())


def test_traces_are_written_next_to_the_value_file(tmp_path, segment_solution):
    domain, field, dynamics = segment_solution
    traces = [
        Trace(start=(0.0, 0.0), points=((0.0, 0.0), (0.1, 0.0), (0.2, 0.0)), reason="max_steps"),
        Trace(start=(0.5, 0.5), points=((0.5, 0.5),), reason="stationary"),
    ]
    write_vtk(domain, field, dynamics, tmp_path / "out.vtk", traces)
    data = read_vtk(tmp_path / "out.traj.vtk")
    assert data.dataset == "POLYDATA"
    assert data.lines == [[0, 1, 2], [3]]
    np.testing.assert_allclose(data.points[:, 0], [0.0, 0.1, 0.2, 0.5])


def test_traces_path_keeps_the_directory(tmp_path):
    assert traces_path(tmp_path / "run" / "value.vtk") == tmp_path / "run" / "value.traj.vtk"


def test_unwritable_target_is_an_output_error(tmp_path, segment_solution):
    domain, field, dynamics = segment_solution
    with pytest.raises(OutputError) as info:
        write_vtk(domain, field, dynamics, tmp_path / "missing" / "out.vtk")
    assert info.value.exit_code == 1
    with pytest.raises(OutputError):
        write_traces_vtk([], tmp_path / "missing" / "t.vtk")


def test_owning_speed_is_zero_on_points(segment_domain):
    _, speed = owning_strata(segment_domain, "speed_values")
    assert speed[segment_domain.node_of((0.0, 0.5))] == 0.0
    assert speed[segment_domain.node_of((0.2, 0.0))] == pytest.approx(1.0)
    with pytest.raises(ValueError, match="sampled"):
        owning_strata(segment_domain, "discount")
