# tests/test_gh_bounds.py
import numpy as np
import pytest

from ghlab.exceptions import InputError
from ghlab.services.certificates import CertifiedValue, Tag
from ghlab.services.gh_bounds import (
    EquilateralSpec,
    correspondence_gap_check,
    embedding_gh_certificate,
    equilateral_gap_bound,
    gap_threshold,
    infinite_distance_sweep,
    map_distortion,
    min_distortion_embedding,
)
from ghlab.services.metric_core import FiniteMetricSpace, gh_exact
from ghlab.services.normed_models import PointConfig, l2, line
from ghlab.services.optimizer import SearchBudget

LINE_C3 = CertifiedValue(value=1.0, tag=Tag.EXACT, provenance="line, m = 3")


def test_bound_for_the_line_triangle():
    report = equilateral_gap_bound(EquilateralSpec(m=3, d=1.0), LINE_C3)
    assert report.bound == 1 / 6
    assert report.valid


def test_zero_imbalance_gives_no_information():
    report = equilateral_gap_bound(EquilateralSpec(3, 1.0), CertifiedValue(0.0, Tag.EXACT))
    assert report.bound == 0.0


def test_bound_approaches_quarter_diameter():
    report = equilateral_gap_bound(EquilateralSpec(3, 1.0), CertifiedValue(1e6, Tag.LOWER))
    assert report.bound == pytest.approx(0.25, abs=1e-6)
    assert report.bound <= 0.25


def test_bound_is_monotone_in_c_and_linear_in_d():
    cs = [0.0, 0.1, 0.5, 1.0, 2.0, 10.0, 1e3]
    bounds = [equilateral_gap_bound(EquilateralSpec(4, 2.0), CertifiedValue(c, Tag.LOWER)).bound for c in cs]
    assert all(b >= a for a, b in zip(bounds, bounds[1:]))
    for d in (0.5, 3.0, 40.0):
        scaled = equilateral_gap_bound(EquilateralSpec(4, d), CertifiedValue(0.7, Tag.EXACT)).bound
        unit = equilateral_gap_bound(EquilateralSpec(4, 1.0), CertifiedValue(0.7, Tag.EXACT)).bound
        assert scaled == pytest.approx(d * unit, rel=1e-12)
        assert scaled <= d / 4


def test_upper_certificate_gives_invalid_bound():
    report = equilateral_gap_bound(EquilateralSpec(3, 1.0), CertifiedValue(1.0, Tag.UPPER))
    assert not report.valid
    assert report.bound == 1 / 6


@pytest.mark.parametrize("m, d", [(2, 1.0), (3, 0.0), (3, -1.0), (3, float("inf"))])
def test_invalid_equilateral_spec(m, d):
    with pytest.raises(InputError):
        EquilateralSpec(m, d)


def test_negative_imbalance_rejected():
    with pytest.raises(InputError):
        equilateral_gap_bound(EquilateralSpec(3, 1.0), CertifiedValue(-0.5, Tag.EXACT))


def test_every_correspondence_meets_the_threshold(seeded_rng):
    X = FiniteMetricSpace.equilateral(3, 1.0)
    spec = EquilateralSpec(3, 1.0)
    for _ in range(15):
        n = int(seeded_rng.integers(1, 5))
        coords = np.sort(seeded_rng.choice(np.arange(-8, 9) * 0.25, size=n, replace=False))
        Y = FiniteMetricSpace.from_line(coords)
        smallest, threshold = correspondence_gap_check(X, Y, spec, LINE_C3)
        assert threshold == pytest.approx(1 / 3)
        assert smallest >= threshold - 1e-9
        assert gh_exact(X, Y).distance >= equilateral_gap_bound(spec, LINE_C3).bound - 1e-9


def test_gap_threshold_with_infinite_imbalance():
    assert gap_threshold(2.0, float("inf")) == 1.0


def test_sweep_grows_linearly(small_budget):
    lambdas = [1.0, 10.0, 100.0, 1000.0]
    result = infinite_distance_sweep(l2(2), line(), 3, lambdas, small_budget, seed=5)
    assert result.found
    assert result.c.tag == Tag.EXACT
    bounds = [r.bound for r in result.reports]
    for lam, bound in zip(lambdas, bounds):
        assert bound == pytest.approx(lam / 6, abs=1e-9)
    assert all(r.valid for r in result.reports)
    assert all(b > a for a, b in zip(bounds, bounds[1:]))


def test_sweep_with_upper_certificate_is_invalid(small_budget):
    c = CertifiedValue(1.0, Tag.UPPER)
    result = infinite_distance_sweep(l2(2), line(), 3, [1.0], small_budget, seed=5, c=c)
    assert result.found
    assert not any(r.valid for r in result.reports)
    assert "upper" in result.diagnostic


def test_sweep_with_zero_imbalance_is_flat(small_budget):
    result = infinite_distance_sweep(l2(2), line(), 3, [1.0], small_budget, seed=5,
                                     c=CertifiedValue(0.0, Tag.EXACT))
    assert [r.bound for r in result.reports] == [0.0]


def test_sweep_without_equilateral_set(small_budget):
    result = infinite_distance_sweep(l2(2), line(), 4, [1.0, 2.0], small_budget, seed=5)
    assert not result.found
    assert result.reports == ()
    assert "No equilateral 4-set" in result.diagnostic


@pytest.mark.parametrize("lambdas", [[], [0.0], [-1.0, 2.0]])
def test_sweep_rejects_bad_scales(lambdas):
    with pytest.raises(InputError):
        infinite_distance_sweep(l2(2), line(), 3, lambdas)


def test_embed_two_points_in_the_line(small_budget):
    X = FiniteMetricSpace.from_line([0.0, 1.0])
    config, dis = min_distortion_embedding(X, line(), small_budget, seed=1)
    assert dis == pytest.approx(0.0, abs=1e-9)
    assert abs(config.points[1, 0] - config.points[0, 0]) == pytest.approx(1.0, abs=1e-9)


def test_embed_one_point(small_budget):
    config, dis = min_distortion_embedding(FiniteMetricSpace.from_matrix([[0.0]]), l2(2), small_budget)
    assert dis == 0.0
    assert config.m == 1


def test_embed_triangle_in_the_plane(small_budget):
    _, dis = min_distortion_embedding(FiniteMetricSpace.equilateral(3), l2(2), small_budget, seed=1)
    assert dis <= 1e-6


def test_embedding_respects_the_gh_lower_bound(small_budget):
    X = FiniteMetricSpace.equilateral(3)
    _, dis = min_distortion_embedding(X, line(), small_budget, seed=1)
    bound = equilateral_gap_bound(EquilateralSpec(3, 1.0), LINE_C3).bound
    assert dis >= 2 * bound - 1e-6


@pytest.mark.slow
def test_embed_four_point_equilateral_in_the_line():
    X = FiniteMetricSpace.equilateral(4)
    _, dis = min_distortion_embedding(X, line(), SearchBudget(starts=50, iterations=400), seed=1)
    assert dis == pytest.approx(0.5, abs=1e-3)


def test_embedding_certificate():
    X = FiniteMetricSpace.equilateral(3)
    config = PointConfig(line(), [0.0, 1.0, 2.0])
    cert = embedding_gh_certificate(X, config)
    assert map_distortion(X, config) == 1.0
    assert cert.value == 0.5
    assert cert.tag == Tag.UPPER
    with pytest.raises(InputError):
        map_distortion(X, PointConfig(line(), [0.0, 1.0]))
