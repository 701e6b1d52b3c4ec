import pytest

from config import load_settings
from core.cli import main, parse_point
from core.hjsd_loader import parse_hjsd
from core.models import SolverConfig
from core.pipeline import run, solve_problem, summary_table
from tests.vtk_reader import read_vtk

TARGET = "#HJSD2D 11 11 -1 1 -1 1 3 8\n#P 0 0 0 1\n#S 0.5 0.5 1 1 1e-4\n"
CROSSING = "#HJSD2D 11 11 -1 1 -1 1 3 8\n#LX 0 -0.6 0.2 1 1 1\n#LX 0 -0.2 0.6 1 1 1\n#S 0.5 0.5 1 1 1\n"


@pytest.fixture
def problem_path(tmp_path):
    path = tmp_path / "target.hjsd"
    path.write_text(TARGET, encoding="utf-8")
    return path


def test_run_writes_the_value_file_and_reports_point_values(tmp_path):
    summary = run(parse_hjsd(TARGET), SolverConfig(h=0.2), tmp_path / "out.vtk")
    assert summary.exit_code == 0
    assert summary.converged
    assert summary.output == tmp_path / "out.vtk"
    assert summary.trajectory_output is None
    assert len(summary.residuals) == summary.iterations
    assert summary.point_values == {"#P@2 (0, 0)": pytest.approx(0.0)}
    assert read_vtk(summary.output).dimensions == (11, 11, 1)
    table = summary_table(summary)
    assert table.loc["converged", "value"]
    assert "u at #P@2 (0, 0)" in table.index


def test_solve_problem_traces_in_memory():
    solution = solve_problem(parse_hjsd(TARGET), SolverConfig(h=0.2), [(0.6, 0.0)])
    (path,) = solution.traces
    assert path.start == (0.6, 0.0)
    assert solution.config.penalty is not None


def test_cli_success(problem_path, capsys):
    assert main(["--input", str(problem_path), "--h", "0.2", "--threads", "2"]) == 0
    assert problem_path.with_suffix(".vtk").exists()
    assert "converged" in capsys.readouterr().out


def test_cli_writes_trajectories(problem_path, tmp_path):
    output = tmp_path / "value.vtk"
    args = ["--input", str(problem_path), "--h", "0.2", "--output", str(output)]
    assert main([*args, "--trace", "0.6,0", "--trace", "-0.4,0.4"]) == 0
    assert len(read_vtk(tmp_path / "value.traj.vtk").lines) == 2


def test_cli_trace_step_budget(problem_path, tmp_path):
    output = tmp_path / "value.vtk"
    args = ["--input", str(problem_path), "--h", "0.2", "--output", str(output), "--trace", "0.6,0"]
    assert main([*args, "--trace-steps", "2", "--trace-dt", "0.2"]) == 0
    (polyline,) = read_vtk(tmp_path / "value.traj.vtk").lines
    assert len(polyline) == 3


def test_cli_reports_non_convergence_but_still_writes(problem_path):
    assert main(["--input", str(problem_path), "--h", "0.2", "--max-iters", "1"]) == 3
    assert problem_path.with_suffix(".vtk").exists()


def test_cli_stratification_error(tmp_path):
    path = tmp_path / "crossing.hjsd"
    path.write_text(CROSSING, encoding="utf-8")
    assert main(["--input", str(path), "--h", "0.2"]) == 2
    assert not path.with_suffix(".vtk").exists()


@pytest.mark.parametrize(
    "extra",
    [
        ["--h", "1.5"],
        ["--h", "0.2", "--tau", "0"],
        ["--h", "0.2", "--trace", "0,0,0"],
        ["--h", "0.2", "--trace", "0.6,0", "--trace-steps", "0"],
        ["--h", "0.2", "--trace-dt", "-0.1"],
        ["--h", "0.2", "--output", "/nonexistent-dir/out.vtk"],
    ],
)
def test_cli_configuration_and_output_errors(problem_path, extra):
    assert main(["--input", str(problem_path), *extra]) == 1


def test_cli_parse_error(tmp_path):
    path = tmp_path / "broken.hjsd"
    path.write_text("#HJSD2D 11 11 -1 1 -1 1 3\n", encoding="utf-8")
    assert main(["--input", str(path), "--h", "0.2"]) == 1
    assert main(["--input", str(tmp_path / "absent.hjsd"), "--h", "0.2"]) == 1


def test_usage_errors_exit_with_one(problem_path):
    with pytest.raises(SystemExit) as info:
        main(["--input", str(problem_path)])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["--input", str(problem_path), "--h", "0.2", "--trace", "a,b"])
    assert info.value.code == 1


def test_parse_point():
    assert parse_point("0.5,-1") == (0.5, -1.0)
    assert parse_point("1,2,3") == (1.0, 2.0, 3.0)


def test_settings_come_from_the_environment(monkeypatch):
    monkeypatch.setenv("HJSD_THREADS", "3")
    monkeypatch.setenv("HJSD_STENCIL_CACHE_MB", "not-a-number")
    monkeypatch.setenv("HJSD_LOG_LEVEL", "debug")
    settings = load_settings()
    assert settings.threads == 3
    assert settings.stencil_cache_mb == 512
    assert settings.log_level == "DEBUG"
