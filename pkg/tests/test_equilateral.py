# tests/test_equilateral.py
import itertools

import numpy as np
import pytest

from ghlab.exceptions import InputError
from ghlab.services.equilateral import (
    cross_polytope_vertices,
    ed_evidence,
    equilateral_search,
    hypercube_vertices,
    is_equilateral,
    normalized,
    regular_simplex,
    space_spread,
)
from ghlab.services.metric_core import FiniteMetricSpace
from ghlab.services.normed_models import PointConfig, l1, l2, line, linf, pairwise_distances, sample_subspace, scale_config


def test_unit_square_is_equilateral_in_linf():
    report = is_equilateral(PointConfig(linf(2), hypercube_vertices(2, 4)))
    assert report.success
    assert report.spread == 0.0
    assert report.common_distance == 1.0


def test_unit_square_is_not_equilateral_in_l2():
    report = is_equilateral(PointConfig(l2(2), hypercube_vertices(2, 4)))
    assert not report.success
    assert report.relative_spread == pytest.approx(1 - 1 / np.sqrt(2))


def test_cross_polytope_is_equilateral_in_l1():
    report = is_equilateral(PointConfig(l1(3), cross_polytope_vertices(3, 6)))
    assert report.success
    assert report.common_distance == 1.0


@pytest.mark.parametrize("m", [2, 3, 4])
def test_regular_simplex_has_unit_edges(m):
    D = pairwise_distances(PointConfig(l2(3), regular_simplex(3, m)))
    off = D[~np.eye(m, dtype=bool)]
    np.testing.assert_allclose(off, 1.0, atol=1e-12)


def test_structured_builders_respect_their_limits():
    assert hypercube_vertices(2, 5) is None
    assert cross_polytope_vertices(2, 5) is None
    assert regular_simplex(2, 4) is None


def test_normalized_has_unit_diameter(seeded_rng):
    config = normalized(PointConfig(l2(2), seeded_rng.normal(size=(5, 2)) * 7.0))
    assert pairwise_distances(config).max() == pytest.approx(1.0, rel=1e-12)
    assert np.all(config.points[0] == 0.0)


def test_linf_plane_has_four_equilateral_points(small_budget):
    report = equilateral_search(linf(2), 4, small_budget, seed=7)
    assert report.success
    assert report.relative_spread <= 1e-9


def test_euclidean_triangle(small_budget):
    report = equilateral_search(l2(2), 3, small_budget, seed=7)
    assert report.success
    assert report.common_distance == pytest.approx(1.0, rel=1e-12)


def test_euclidean_plane_has_no_four_equilateral_points(small_budget):
    assert not equilateral_search(l2(2), 4, small_budget, seed=7).success


@pytest.mark.parametrize("model, m", [(linf(2), 5), (line(), 3), (l1(2), 5)])
def test_search_never_beats_the_dimension_cap(model, m, small_budget):
    assert not equilateral_search(model, m, small_budget, seed=3).success


def test_search_rejects_tiny_m():
    with pytest.raises(InputError):
        equilateral_search(l2(2), 1)


@pytest.mark.parametrize("model, expected", [(linf(2), 4), (l2(2), 3), (line(), 2)])
def test_ed_evidence(model, expected, small_budget):
    evidence = ed_evidence(model, small_budget, seed=11)
    assert evidence.lower_bound == expected
    assert evidence.cap == 2 ** model.dim
    assert evidence.lower_bound <= evidence.cap
    successes = [r.m for r in evidence.reports if r.success]
    assert successes == list(range(2, expected + 1))


def test_ed_evidence_respects_max_m(small_budget):
    evidence = ed_evidence(linf(3), small_budget, seed=11, max_m=3)
    assert evidence.lower_bound == 3
    assert [r.m for r in evidence.reports] == [2, 3]


def test_search_is_deterministic(small_budget):
    a = equilateral_search(l1(2), 4, small_budget, seed=5)
    b = equilateral_search(l1(2), 4, small_budget, seed=5)
    assert np.array_equal(a.config.points, b.config.points)
    assert a.spread == b.spread


def test_hypercube_vertices_are_distinct():
    pts = hypercube_vertices(3, 8)
    assert len({tuple(p) for p in pts}) == 8
    assert all(set(p) <= {0.0, 1.0} for p in pts)
    assert list(itertools.islice(map(tuple, pts), 1)) == [(0.0, 0.0, 0.0)]


def test_three_points_on_the_line_are_not_equilateral():
    report = is_equilateral(PointConfig(line(), [0.0, 1.0, 3.0]))
    assert not report.success
    assert report.spread == 2.0


def test_l1_plane_has_four_equilateral_points(small_budget):
    report = equilateral_search(l1(2), 4, small_budget, seed=7)
    assert report.success
    assert report.relative_spread <= 1e-6


def test_successful_witness_survives_sampling_and_scaling(small_budget):
    report = equilateral_search(linf(2), 4, small_budget, seed=7)
    ok, common, _ = space_spread(sample_subspace(report.config))
    assert ok
    assert common == pytest.approx(report.common_distance)
    scaled = is_equilateral(scale_config(report.config, 3.0))
    assert scaled.success
    assert scaled.common_distance == pytest.approx(3.0 * report.common_distance)


def test_space_spread_on_a_matrix():
    assert space_spread(FiniteMetricSpace.equilateral(5, 2.0)) == (True, 2.0, 0.0)
    ok, common, spread = space_spread(FiniteMetricSpace.from_line([0, 1, 3]))
    assert not ok
    assert (common, spread) == (3.0, 2.0)
    with pytest.raises(InputError):
        space_spread(FiniteMetricSpace.from_matrix([[0.0]]))
