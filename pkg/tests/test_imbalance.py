# tests/test_imbalance.py
"""
Tests for the triple imbalance, c_m and R_m certificates, and the audit of
2R_m + 1 >= c_m >= R_m - 2.
"""
import math

import numpy as np
import pytest

from ghlab.exceptions import DegenerateError, InputError
from ghlab.services.certificates import Tag
from ghlab.services.imbalance import (
    CONSTRUCTIVE_STEP,
    STATED_LOWER,
    STATED_UPPER,
    c_m_upper,
    imbalance_profile,
    inequality_audit,
    line_imbalance_grid,
    max_triple_imbalance,
    normalize_config,
    packing_profile,
    phi,
    progression,
    r_m_upper,
)
from ghlab.services.normed_models import PointConfig, l2, line, linf, pairwise_distances


def test_phi_on_the_line():
    assert phi(line(), [0.0], [2.0], [1.0]) == 0.0
    assert phi(line(), [0.0], [1.5], [1.0]) == 1.0


def test_phi_requires_distinct_base():
    with pytest.raises(DegenerateError):
        phi(l2(2), [0.0, 0.0], [1.0, 1.0], [1.0, 1.0])


def test_max_triple_imbalance_matches_brute_force(seeded_rng):
    model = l2(2)
    config = PointConfig(model, seeded_rng.normal(size=(5, 2)))
    pts = config.points
    brute = max(
        phi(model, pts[i], pts[j], pts[k])
        for i in range(5) for j in range(5) for k in range(5)
        if len({i, j, k}) == 3
    )
    assert max_triple_imbalance(config) == pytest.approx(brute, rel=1e-12)


def test_triple_imbalance_is_scale_and_translation_invariant(seeded_rng):
    config = PointConfig(linf(3), seeded_rng.normal(size=(6, 3)))
    moved = PointConfig(config.model, 4.5 * config.points + np.array([1.0, -2.0, 3.0]))
    assert max_triple_imbalance(moved) == pytest.approx(max_triple_imbalance(config), rel=1e-12)


def test_triple_imbalance_needs_three_points():
    with pytest.raises(InputError):
        max_triple_imbalance(PointConfig(l2(2), [[0, 0], [1, 0]]))


def test_normalize_config(seeded_rng):
    config = PointConfig(l2(2), seeded_rng.normal(size=(6, 2)))
    z = normalize_config(config)
    D = pairwise_distances(z)
    assert np.all(z.points[0] == 0.0)
    assert D[0, 1] == pytest.approx(1.0, rel=1e-12)
    assert D[~np.eye(6, dtype=bool)].min() == pytest.approx(1.0, rel=1e-12)
    assert max_triple_imbalance(z) == pytest.approx(max_triple_imbalance(config), rel=1e-10)


def test_progression_has_unit_steps():
    pts = progression(l2(3), 4)
    D = pairwise_distances(PointConfig(l2(3), pts))
    assert np.allclose(np.diag(D, 1), 1.0)
    assert np.allclose(pts.mean(axis=0), 0.0)


def test_line_grid_oracle():
    value, t = line_imbalance_grid()
    assert value == pytest.approx(1.0, abs=1e-4)
    assert t == pytest.approx(1.0, rel=1e-3)


def test_line_c3_is_one_and_exact(small_budget):
    cert = c_m_upper(line(), 3, small_budget, seed=1)
    grid_value, _ = line_imbalance_grid()
    assert cert.value == pytest.approx(1.0, abs=1e-6)
    assert cert.tag == Tag.EXACT
    assert cert.lower_argument
    assert cert.value <= grid_value + 1e-6
    assert max_triple_imbalance(cert.witness) == pytest.approx(cert.value, abs=1e-9)


def test_line_c3_certificate_rests_on_the_grid_oracle(small_budget):
    cert = c_m_upper(line(), 3, small_budget, seed=1)
    assert "dense grid" in cert.lower_argument
    assert "exceeds it by" in cert.lower_argument


def test_line_c3_stays_upper_when_the_grid_disagrees(small_budget, monkeypatch):
    monkeypatch.setattr("ghlab.services.imbalance._line_grid_minimum", lambda: 0.5)
    cert = c_m_upper(line(), 3, small_budget, seed=1)
    assert cert.tag == Tag.UPPER
    assert cert.lower_argument is None


def test_linf_c4_is_zero_and_exact(small_budget):
    cert = c_m_upper(linf(2), 4, small_budget, seed=1)
    assert cert.value == 0.0
    assert cert.tag == Tag.EXACT


def test_euclidean_c4_is_only_an_upper_bound(search_budget):
    cert = c_m_upper(l2(2), 4, search_budget, seed=1)
    assert cert.tag == Tag.UPPER
    assert 0.0 < cert.value <= math.sqrt(2) - 1 + 1e-9
    assert max_triple_imbalance(cert.witness) == pytest.approx(cert.value, abs=1e-9)


def test_c_m_rejects_small_m():
    with pytest.raises(InputError):
        c_m_upper(line(), 2)


def test_imbalance_profile_is_monotone(small_budget):
    certs = imbalance_profile(line(), [3, 4, 5], small_budget, seed=2)
    values = [c.value for c in certs]
    assert all(b >= a - 1e-9 for a, b in zip(values, values[1:]))
    assert certs[0].tag == Tag.EXACT


@pytest.mark.parametrize("m", range(2, 9))
def test_line_packing_radius(m, small_budget):
    cert = r_m_upper(line(), m, small_budget, seed=3)
    assert cert.value == pytest.approx((m - 1) / 2, abs=1e-6)
    assert cert.tag == Tag.EXACT
    assert pairwise_distances(cert.witness)[~np.eye(m, dtype=bool)].min() >= 1.0 - 1e-9


def test_line_packing_diverges(small_budget):
    certs = packing_profile(line(), range(2, 9), small_budget, seed=3)
    values = [c.value for c in certs]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_linf_packing_radius(small_budget):
    cert = r_m_upper(linf(2), 4, small_budget, seed=3)
    assert cert.value == pytest.approx(0.5, abs=1e-6)
    assert cert.tag == Tag.EXACT


def test_packing_witness_is_feasible(search_budget):
    cert = r_m_upper(l2(2), 5, search_budget, seed=3)
    D = pairwise_distances(cert.witness)
    assert D[~np.eye(5, dtype=bool)].min() >= 1.0 - 1e-9
    assert cert.witness.norms().max() == pytest.approx(cert.value)


def test_packing_rejects_small_m():
    with pytest.raises(InputError):
        r_m_upper(line(), 1)


@pytest.mark.parametrize("model, m", [(line(), 3), (linf(2), 4)])
def test_audit_passes_conclusively(model, m, small_budget):
    report = inequality_audit(model, m, small_budget, seed=4)
    checks = {check.name: check for check in report.checks}
    assert set(checks) == {STATED_UPPER, STATED_LOWER, CONSTRUCTIVE_STEP}
    assert report.all_passed
    assert all(check.conclusive for check in report.checks)


def test_audit_constructive_step_on_euclidean_square(search_budget):
    report = inequality_audit(l2(2), 4, search_budget, seed=4)
    constructive = next(c for c in report.checks if c.name == CONSTRUCTIVE_STEP)
    assert constructive.passed
    assert constructive.margin >= 0.7
    # With only upper certificates the stated lower form proves nothing
    stated_lower = next(c for c in report.checks if c.name == STATED_LOWER)
    assert not stated_lower.conclusive


def test_audit_needs_three_points():
    with pytest.raises(InputError):
        inequality_audit(line(), 2)
