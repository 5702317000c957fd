# ghlab/services/gh_bounds.py
"""
Lower bounds on d_GH from equilateral sets, minimal-distortion embeddings
of finite spaces into normed models, and the diameter sweep that shows
the lower bound growing without limit.

If X contains an equilateral m-set of diameter d and every m distinct
points of Y contain a triple with imbalance >= c, then every
correspondence has distortion >= min{d/2, dc/(2+c)}, hence
d_GH(X, Y) >= 1/2 min{d/2, dc/(2+c)}. The bound is increasing in c, so it
is only sound when c is a lower (or exact) certificate.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from ..exceptions import InputError
from .certificates import CertifiedValue, Tag
from .equilateral import EquilateralReport, equilateral_search
from .imbalance import c_m_upper
from .metric_core import FiniteMetricSpace, all_correspondences, distortion
from .normed_models import NormedModel, PointConfig, pairwise_distances
from .optimizer import SearchBudget, run_multistart

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EquilateralSpec:
    m: int
    d: float

    def __post_init__(self):
        if self.m < 3:
            raise InputError(f"Equilateral spec needs m >= 3, got {self.m}")
        if not (self.d > 0 and math.isfinite(self.d)):
            raise InputError(f"Equilateral diameter must be positive, got {self.d!r}")


@dataclass(frozen=True)
class BoundReport:
    bound: float
    valid: bool
    m: int
    d: float
    c: float
    c_tag: Tag
    lam: Optional[float] = None


def gap_threshold(d: float, c: float) -> float:
    """min{d/2, dc/(2+c)}: the distortion every correspondence must reach"""
    if math.isinf(c):
        return d / 2
    return min(d / 2, d * c / (2 + c))


def equilateral_gap_bound(spec: EquilateralSpec, c: CertifiedValue, lam: Optional[float] = None) -> BoundReport:
    if not c.value >= 0:
        raise InputError(f"Imbalance must be non-negative, got {c.value!r}")
    bound = 0.5 * gap_threshold(spec.d, c.value)
    valid = c.bounds_from_below
    if not valid:
        logger.warning(f"⚠️ c = {c.value:.6g} is only an upper certificate; the bound {bound:.6g} is not asserted")
    return BoundReport(bound=bound, valid=valid, m=spec.m, d=spec.d, c=c.value, c_tag=c.tag, lam=lam)


def map_distortion(X: FiniteMetricSpace, config: PointConfig) -> float:
    """dis(f) for the map sending point i of X to config.points[i]"""
    if config.m != X.n:
        raise InputError(f"Placement has {config.m} points for a space of {X.n}")
    return float(np.abs(X.dist - pairwise_distances(config)).max())


def embedding_gh_certificate(X: FiniteMetricSpace, config: PointConfig) -> CertifiedValue:
    return CertifiedValue(
        value=map_distortion(X, config) / 2,
        tag=Tag.UPPER,
        witness=config,
        provenance="d_GH(X, f(X)) <= dis(f) / 2 via the graph of f",
    )


def classical_mds(X: FiniteMetricSpace, dim: int) -> np.ndarray:
    """Euclidean coordinates from double centering; used only as a starting point"""
    n = X.n
    J = np.eye(n) - np.full((n, n), 1.0 / n)
    B = -0.5 * J @ (X.dist ** 2) @ J
    vals, vecs = np.linalg.eigh(B)
    order = np.argsort(vals)[::-1][:dim]
    coords = vecs[:, order] * np.sqrt(np.clip(vals[order], 0.0, None))
    out = np.zeros((n, dim))
    out[:, : coords.shape[1]] = coords
    return out


def embedding_objective(X: FiniteMetricSpace, model: NormedModel):
    n = X.n
    target = X.dist

    def objective(x: np.ndarray) -> float:
        pts = x.reshape(n, model.dim)
        D = model.norm_many(pts[:, None, :] - pts[None, :, :])
        return float(np.abs(target - D).max())

    return objective


def min_distortion_embedding(
    X: FiniteMetricSpace,
    model: NormedModel,
    budget: SearchBudget = None,
    seed: Union[int, Sequence[int]] = 0,
) -> Tuple[PointConfig, float]:
    """
    Search for f: X -> V with small dis(f). The returned distortion is
    evaluated on the returned placement, so it bounds the minimum from
    above and also bounds 2 * d_GH(X, f(X)).
    """
    budget = budget or SearchBudget.default()
    if X.n == 1:
        return PointConfig(model, np.zeros((1, model.dim))), 0.0
    scale = max(float(X.dist.max()), 1e-12)

    def draw(rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(-scale, scale, size=X.n * model.dim)

    result = run_multistart(
        embedding_objective(X, model),
        draw,
        budget,
        seed,
        seeds=[classical_mds(X, model.dim)],
        step=0.25 * scale,
    )
    config = PointConfig(model, result.x.reshape(X.n, model.dim))
    dis = map_distortion(X, config)
    logger.info(f"🧭 embedding of {X.n} points into {model.describe()}: distortion {dis:.9g}")
    return config, dis


def correspondence_gap_check(
    X: FiniteMetricSpace,
    Y: FiniteMetricSpace,
    spec: EquilateralSpec,
    c: CertifiedValue,
) -> Tuple[float, float]:
    """
    (smallest distortion over every correspondence, min{d/2, dc/(2+c)}).
    X is expected to be the equilateral space of `spec`; Y a finite sample
    of a space whose imbalance is at least c.
    """
    threshold = gap_threshold(spec.d, c.value)
    smallest = min(distortion(corr, X, Y) for corr in all_correspondences(X.n, Y.n))
    return smallest, threshold


@dataclass(frozen=True)
class SweepResult:
    found: bool
    equilateral: Optional[EquilateralReport]
    c: Optional[CertifiedValue]
    reports: Tuple[BoundReport, ...]
    diagnostic: str = ""


def infinite_distance_sweep(
    X_model: NormedModel,
    Y_model: NormedModel,
    m: int,
    lambdas: Sequence[float],
    budget: SearchBudget = None,
    seed: int = 0,
    c: Optional[CertifiedValue] = None,
) -> SweepResult:
    """
    Find an equilateral m-set in X_model, then scale it by each lambda
    (scaling keeps it equilateral with diameter lambda * d) and evaluate the
    lower bound against Y_model's imbalance certificate. The bounds grow
    linearly in lambda; a finite d_GH between the two spaces is impossible.
    """
    if m < 3:
        raise InputError("The sweep needs m >= 3")
    if not lambdas or any(not (lam > 0 and math.isfinite(lam)) for lam in lambdas):
        raise InputError("Sweep scale factors must be positive reals")
    report = equilateral_search(X_model, m, budget, (seed, 0))
    if not report.success:
        msg = (f"No equilateral {m}-set found in {X_model.describe()} "
               f"(relative spread {report.relative_spread:.3e}); sweep not run")
        logger.warning(f"⚠️ {msg}")
        return SweepResult(found=False, equilateral=report, c=c, reports=(), diagnostic=msg)
    if c is None:
        c = c_m_upper(Y_model, m, budget, (seed, 1))
    d = report.common_distance
    reports = tuple(
        equilateral_gap_bound(EquilateralSpec(m, lam * d), c, lam=lam) for lam in lambdas
    )
    if not c.bounds_from_below:
        diagnostic = f"c_{m} certificate has tag {c.tag.value}; all bounds are reported invalid"
    else:
        diagnostic = ""
    return SweepResult(found=True, equilateral=report, c=c, reports=reports, diagnostic=diagnostic)
