# ghlab/services/equilateral.py
"""Verification and heuristic search of equilateral subsets of normed models."""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ..exceptions import InputError
from .metric_core import FiniteMetricSpace
from .normed_models import NormKind, NormedModel, PointConfig, require_distinct
from .optimizer import SearchBudget, run_multistart

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-6
# Separation floor: the smallest distance must stay above half the largest
SEPARATION_FLOOR = 0.5
PENALTY_WEIGHT = 1e3


@dataclass(frozen=True)
class EquilateralReport:
    config: PointConfig
    common_distance: float
    spread: float
    success: bool
    tol: float = DEFAULT_TOL

    @property
    def m(self) -> int:
        return self.config.m

    @property
    def relative_spread(self) -> float:
        return self.spread / self.common_distance


@dataclass(frozen=True)
class EdEvidence:
    """Lower-bound evidence for the equilateral dimension; never an upper bound"""
    model: NormedModel
    lower_bound: int
    cap: int
    reports: Tuple[EquilateralReport, ...]


def is_equilateral(config: PointConfig, tol: float = DEFAULT_TOL) -> EquilateralReport:
    if config.m < 2:
        raise InputError("Equilateral check needs at least two points")
    D = require_distinct(config)
    off = D[~np.eye(config.m, dtype=bool)]
    common = float(off.max())
    spread = float(off.max() - off.min())
    return EquilateralReport(
        config=config,
        common_distance=common,
        spread=spread,
        success=spread <= tol * common,
        tol=tol,
    )


def space_spread(X: FiniteMetricSpace, tol: float = DEFAULT_TOL) -> Tuple[bool, float, float]:
    """(equilateral?, common distance, spread) for a finite metric space, read off its matrix"""
    if X.n < 2:
        raise InputError("Equilateral check needs at least two points")
    off = X.dist[~np.eye(X.n, dtype=bool)]
    common = float(off.max())
    spread = float(off.max() - off.min())
    return spread <= tol * common, common, spread


def relative_spread_objective(model: NormedModel, m: int):
    """(max - min) / max over pairwise distances, plus a penalty below the separation floor"""
    mask = ~np.eye(m, dtype=bool)

    def objective(x: np.ndarray) -> float:
        pts = x.reshape(m, model.dim)
        off = model.norm_many(pts[:, None, :] - pts[None, :, :])[mask]
        top = off.max()
        if top <= 1e-12:
            return np.inf
        ratio = off.min() / top
        return (1.0 - ratio) + PENALTY_WEIGHT * max(0.0, SEPARATION_FLOOR - ratio)

    return objective


def hypercube_vertices(dim: int, m: int) -> Optional[np.ndarray]:
    if m > 2 ** dim:
        return None
    return np.array(list(itertools.islice(itertools.product((0.0, 1.0), repeat=dim), m)))


def cross_polytope_vertices(dim: int, m: int) -> Optional[np.ndarray]:
    if m > 2 * dim:
        return None
    rows = []
    for i in range(dim):
        for sign in (1.0, -1.0):
            v = np.zeros(dim)
            v[i] = 0.5 * sign
            rows.append(v)
    return np.array(rows[:m])


def regular_simplex(dim: int, m: int) -> Optional[np.ndarray]:
    """m points at Euclidean distance 1 in R^dim, available when m <= dim + 1"""
    if m > dim + 1:
        return None
    if m == 1:
        return np.zeros((1, dim))
    E = np.eye(m) / np.sqrt(2.0)
    centered = E - E.mean(axis=0)
    # Orthonormal coordinates inside the (m-1)-dimensional affine hull
    q, _ = np.linalg.qr(centered.T)
    coords = centered @ q[:, : m - 1]
    out = np.zeros((m, dim))
    out[:, : m - 1] = coords
    return out - out[0]


def structured_starts(model: NormedModel, m: int) -> List[np.ndarray]:
    candidates = [hypercube_vertices(model.dim, m), cross_polytope_vertices(model.dim, m)]
    if model.kind == NormKind.LP and model.p == 2.0:
        candidates.append(regular_simplex(model.dim, m))
    return [c for c in candidates if c is not None]


def unit_ball_start(model: NormedModel, m: int):
    def draw(rng: np.random.Generator) -> np.ndarray:
        pts = rng.uniform(-1.0, 1.0, size=(m, model.dim))
        norms = model.norm_many(pts)
        # Pull points that landed outside the unit ball back onto its boundary
        pts = pts / np.maximum(norms, 1.0)[:, None]
        return pts.ravel()

    return draw


def normalized(config: PointConfig) -> PointConfig:
    """First point at the origin, diameter 1"""
    pts = config.points - config.points[0]
    D = config.model.norm_many(pts[:, None, :] - pts[None, :, :])
    top = float(D.max())
    if top <= 0:
        return PointConfig(config.model, pts)
    return PointConfig(config.model, pts / top)


def equilateral_search(
    model: NormedModel,
    m: int,
    budget: SearchBudget = None,
    seed: Union[int, Sequence[int]] = 0,
    tol: float = DEFAULT_TOL,
) -> EquilateralReport:
    """
    Best-effort search for an m-point equilateral set. A failed search is
    evidence only; it never shows that no such set exists.
    """
    if m < 2:
        raise InputError("Equilateral search needs m >= 2")
    budget = budget or SearchBudget.default()
    objective = relative_spread_objective(model, m)
    result = run_multistart(
        objective,
        unit_ball_start(model, m),
        budget,
        seed,
        seeds=structured_starts(model, m),
    )
    config = normalized(PointConfig(model, result.x.reshape(m, model.dim)))
    report = is_equilateral(config, tol)
    if report.success and m > 2 ** model.dim:
        # No n-dimensional normed space has more than 2^n equilateral points
        logger.error(f"❌ Search reported {m} equilateral points in dimension {model.dim}; rejecting as numerical artifact")
        report = EquilateralReport(config, report.common_distance, report.spread, False, tol)
    logger.info(
        f"{'✅' if report.success else '⚠️'} equilateral_search {model.describe()} m={m}: "
        f"relative spread {report.relative_spread:.3e}"
    )
    return report


def ed_evidence(
    model: NormedModel,
    budget: SearchBudget = None,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    max_m: Optional[int] = None,
) -> EdEvidence:
    """Largest m (from 2 upwards, capped at 2^dim) for which the search succeeds"""
    cap = 2 ** model.dim
    limit = cap if max_m is None else min(cap, max_m)
    best, reports = 1, []
    for m in range(2, limit + 1):
        report = equilateral_search(model, m, budget, (seed, m), tol)
        reports.append(report)
        if not report.success:
            break
        best = m
    assert best <= cap, "equilateral dimension evidence exceeds the 2^n cap"
    return EdEvidence(model=model, lower_bound=best, cap=cap, reports=tuple(reports))
