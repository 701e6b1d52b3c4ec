import numpy as np
import pytest

from core.errors import ProblemFileError, StratificationError
from core.grid import BoxGrid
from core.hjsd_loader import parse_hjsd
from core.models import ComponentId
from core.stratification import build_domain, flood_fill_regions, project_geometry
from data.problems import lanes_problem, plate_problem, segment_problem
from tests.conftest import domain_from

FENCE = (
    "#HJSD2D 11 11 -1 1 -1 1 3 8\n"
    "#P -0.6 -0.6 1 1e-4\n"
    "#P -0.6 0.6 1 1e-4\n"
    "#P 0.6 -0.6 1 1e-4\n"
    "#P 0.6 0.6 1 1e-4\n"
    "#LX -0.6 -0.6 0.6 10 1 1e-4\n"
    "#LX 0.6 -0.6 0.6 10 1 1e-4\n"
    "#LY -0.6 -0.6 0.6 10 1 1e-4\n"
    "#LY 0.6 -0.6 0.6 10 1 1e-4\n"
)


def _node(domain, i, j, k=None):
    return domain.grid.flat_index((i, j) if k is None else (i, j, k))


def test_segment_components_and_labels(segment_domain):
    domain = segment_domain
    assert [c.cid for c in domain.components] == [
        ComponentId(0, 0),
        ComponentId(0, 1),
        ComponentId(0, 2),
        ComponentId(1, 0),
        ComponentId(2, 0),
    ]
    line = domain.components[3]
    assert line.nodes.size == 9
    assert line.closure.size == 11
    assert domain.labels(_node(domain, 5, 10)) == (ComponentId(0, 1), ComponentId(1, 0), ComponentId(2, 0))
    assert domain.labels(_node(domain, 10, 10)) == (ComponentId(1, 0), ComponentId(2, 0))
    assert domain.labels(_node(domain, 10, 15)) == (ComponentId(0, 0), ComponentId(2, 0))
    assert domain.labels(0) == (ComponentId(2, 0),)
    assert domain.diagnostics == ()


def test_bounds_come_from_sampled_data(segment_domain):
    assert segment_domain.bound == pytest.approx(5.0)
    assert segment_domain.c_min == pytest.approx(1e-4)
    assert segment_domain.c_max == pytest.approx(1.0)


def test_every_node_is_labelled_and_labels_are_sorted(segment_domain):
    counts = np.diff(segment_domain.label_ptr)
    assert (counts >= 1).all()
    for node in range(segment_domain.grid.n_nodes):
        indices = segment_domain.label_indices(node)
        assert list(indices) == sorted(indices)


def test_open_sets_partition_the_grid(segment_domain):
    owners = np.concatenate([c.nodes for c in segment_domain.components])
    assert owners.size == segment_domain.grid.n_nodes
    assert np.unique(owners).size == owners.size


def test_project_geometry_snaps_lines():
    problem = parse_hjsd("#HJSD2D 21 21 -1 1 -1 1 3 4\n#LY 0 -0.5 0.5 1 1 1\n")
    grid = BoxGrid(problem.header.counts, problem.header.lower, problem.header.upper)
    (line,) = project_geometry(grid, problem.directives)
    assert line.k == 1
    assert line.frame.axes == (0,)
    assert line.frame.anchor == (0, 10)
    assert (line.frame.lo, line.frame.hi) == ((5,), (15,))
    np.testing.assert_array_equal(grid.multi_index(line.nodes)[:, 0], np.arange(6, 15))


def test_fence_splits_the_box_into_two_regions():
    domain = domain_from(FENCE + "#S 0 0 1 1 1\n#S 0.9 0.9 1 1 1e-4\n")
    inner, outer = (c for c in domain.components if c.k == 2)
    assert inner.nodes.size == 25
    assert outer.nodes.size == 72
    side = _node(domain, 2, 5)
    assert ComponentId(2, 0) in domain.labels(side)
    assert ComponentId(2, 1) in domain.labels(side)
    # The inner region only touches the corner diagonally.
    corner = _node(domain, 2, 2)
    assert domain.labels(corner) == (
        ComponentId(0, 0),
        ComponentId(1, 0),
        ComponentId(1, 2),
        ComponentId(2, 1),
    )


def test_line_clipped_by_the_box_keeps_its_ends():
    domain = domain_from("#HJSD2D 11 11 -1 1 -1 1 3 8\n#LX 0 -2 2 1 1 1\n#S -0.5 0 1 1 1\n#S 0.5 0 1 1 1\n")
    line = domain.components[0]
    assert line.nodes.size == 11
    np.testing.assert_array_equal(line.nodes, line.closure)
    assert [c.nodes.size for c in domain.components[1:]] == [55, 55]
    assert domain.diagnostics == ()


def test_undeclared_end_points_are_warnings():
    domain = domain_from("#HJSD2D 11 11 -1 1 -1 1 3 8\n#LX 0 -0.6 0.6 1 1 1\n#S 0.5 0.5 1 1 1\n")
    (diagnostic,) = domain.diagnostics
    assert diagnostic.severity == "warning"
    assert diagnostic.line == 2
    assert "end-point" in diagnostic.message


@pytest.mark.parametrize(
    ("text", "fragment"),
    [
        (FENCE + "#S 0 0 1 1 1\n", "belongs to no component"),
        (FENCE + "#S -0.6 0 1 1 1\n#S 0 0 1 1 1\n", "lower-dimensional component"),
        ("#HJSD2D 11 11 -1 1 -1 1 3 8\n#S 0 0 1 1 1\n#S 0.5 0.5 1 1 1\n", "same region"),
        ("#HJSD2D 11 11 -1 1 -1 1 3 8\n#LX 0 0.01 0.02 1 1 1\n#S 0.5 0.5 1 1 1\n", "degenerate"),
        (
            "#HJSD2D 11 11 -1 1 -1 1 3 8\n#LX 0 -0.6 0.2 1 1 1\n#LX 0 -0.2 0.6 1 1 1\n#S 0.5 0.5 1 1 1\n",
            "overlaps",
        ),
        ("#HJSD2D 11 11 -1 1 -1 1 3 8\n#P 2 0 1 1\n#S 0.5 0.5 1 1 1\n", "outside the box"),
    ],
)
def test_bad_geometry_is_a_stratification_error(text, fragment):
    with pytest.raises(StratificationError) as info:
        domain_from(text)
    assert fragment in str(info.value)
    assert info.value.exit_code == 2


def test_point_cost_must_be_constant():
    with pytest.raises(ProblemFileError, match="constant"):
        domain_from("#HJSD2D 11 11 -1 1 -1 1 3 8\n#P 0 0 x 1\n#S 0.5 0.5 1 1 1\n")


def test_flood_fill_stops_at_lower_strata():
    grid = BoxGrid(counts=(5, 5), lower=(-1.0, -1.0), upper=(1.0, 1.0))
    wall = grid.flat_index([(2, j) for j in range(5)])
    left, right = flood_fill_regions(grid, wall, [(-1.0, 0.0), (1.0, 0.0)])
    assert left.size == right.size == 10
    assert (grid.multi_index(left)[:, 0] < 2).all()


def test_lower_dimensional_components_win_shared_nodes():
    domain = build_domain(parse_hjsd(plate_problem(nodes=21, controls=(3, 4, 2))))
    centre = _node(domain, 10, 10, 10)
    plane = next(c for c in domain.components if c.k == 2)
    assert centre not in set(plane.nodes.tolist())
    assert domain.labels(centre) == (
        ComponentId(0, 1),
        ComponentId(1, 0),
        ComponentId(2, 0),
        ComponentId(3, 0),
    )
    assert domain.diagnostics == ()


@pytest.fixture(scope="module")
def segment_201():
    return build_domain(parse_hjsd(segment_problem()))


def test_reference_segment_geometry_at_full_resolution(segment_201):
    domain = segment_201
    target, left, right, line, region = domain.components
    assert tuple(domain.grid.multi_index(int(target.nodes[0]))) == (100, 175)
    np.testing.assert_array_equal(domain.grid.multi_index(line.nodes)[:, 0], np.arange(51, 150))
    assert (domain.grid.multi_index(line.nodes)[:, 1] == 100).all()
    assert line.closure.size == 101
    assert region.nodes.size == 201 * 201 - 101 - 1
    assert domain.diagnostics == ()


@pytest.mark.parametrize(
    ("point", "labels"),
    [
        ((0.5, 0.0), (ComponentId(0, 2), ComponentId(1, 0), ComponentId(2, 0))),
        ((0.0, 0.0), (ComponentId(1, 0), ComponentId(2, 0))),
        ((0.3, 0.3), (ComponentId(2, 0),)),
    ],
)
def test_reference_segment_labels(segment_201, point, labels):
    assert segment_201.labels(segment_201.node_of(point)) == labels


def test_removing_an_end_point_warns():
    text = lanes_problem(nodes=21).replace("#P 0.5 0.5 1 1e-4\n", "")
    domain = domain_from(text)
    (diagnostic,) = domain.diagnostics
    assert "end-point" in diagnostic.message
