# ghlab/services/normed_models.py
"""
Evaluable models of finite-dimensional real normed spaces.

Two families are supported: the lp norms (p in [1, inf], with inf as its
own case) and polyhedral norms given by dual functionals,
norm(x) = max_a |<a, x>|. A product model V^m carries the max-of-norms norm
over its m blocks.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import minimize

from ..config import POINT_ATOL
from ..exceptions import DegenerateError, InputError
from .metric_core import FiniteMetricSpace

logger = logging.getLogger(__name__)


class NormKind(str, Enum):
    LP = "lp"
    POLYHEDRAL = "polyhedral"
    PRODUCT = "product"


INF = "inf"


@dataclass(frozen=True, eq=False)
class NormedModel:
    dim: int
    kind: NormKind
    p: Union[float, str, None] = None
    functionals: Optional[np.ndarray] = None
    base: Optional["NormedModel"] = None
    blocks: int = 1

    def __post_init__(self):
        if not isinstance(self.dim, (int, np.integer)) or self.dim < 1:
            raise InputError(f"Model dimension must be a positive integer, got {self.dim!r}")
        if self.kind == NormKind.LP:
            p = self.p
            if isinstance(p, str):
                if p.lower() not in ("inf", "infinity"):
                    raise InputError(f"Unknown lp exponent {p!r}")
                p = INF
            else:
                p = float(p)
                if math.isinf(p):
                    p = INF
                elif not p >= 1:
                    raise InputError(f"lp exponent must be >= 1, got {p}")
            object.__setattr__(self, "p", p)
        elif self.kind == NormKind.POLYHEDRAL:
            funcs = np.array(self.functionals, dtype=np.float64, copy=True)
            if funcs.ndim != 2 or funcs.shape[1] != self.dim or funcs.shape[0] == 0:
                raise InputError(f"Polyhedral functionals must form a k x {self.dim} array")
            if np.linalg.matrix_rank(funcs) < self.dim:
                raise InputError("Polyhedral functionals must span the space, otherwise the norm is degenerate")
            funcs.setflags(write=False)
            object.__setattr__(self, "functionals", funcs)
        elif self.kind == NormKind.PRODUCT:
            if self.base is None or self.blocks < 1 or self.dim != self.base.dim * self.blocks:
                raise InputError("Product model needs a base model and dim = blocks * base.dim")
        else:
            raise InputError(f"Unknown model kind {self.kind!r}")

    @property
    def is_line(self) -> bool:
        """Every one-dimensional norm is a multiple of |x|"""
        return self.dim == 1

    @property
    def is_linf(self) -> bool:
        return self.kind == NormKind.LP and self.p == INF

    def describe(self) -> str:
        if self.kind == NormKind.LP:
            p = self.p if self.p == INF else f"{self.p:g}"
            return f"l{p}^{self.dim}"
        if self.kind == NormKind.POLYHEDRAL:
            return f"polyhedral^{self.dim}[{self.functionals.shape[0]}]"
        return f"({self.base.describe()})^{self.blocks}"

    def norm_many(self, V: np.ndarray) -> np.ndarray:
        """Norms of the rows of a k x dim array"""
        V = np.asarray(V, dtype=np.float64)
        if V.shape[-1] != self.dim:
            raise InputError(f"Expected vectors of length {self.dim}, got {V.shape[-1]}")
        if self.kind == NormKind.LP:
            if self.p == INF:
                return np.abs(V).max(axis=-1)
            return np.linalg.norm(V, ord=self.p, axis=-1)
        if self.kind == NormKind.POLYHEDRAL:
            return np.abs(V @ self.functionals.T).max(axis=-1)
        split = V.reshape(V.shape[:-1] + (self.blocks, self.base.dim))
        return self.base.norm_many(split).max(axis=-1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, NormedModel):
            return NotImplemented
        if (self.dim, self.kind, self.p, self.blocks) != (other.dim, other.kind, other.p, other.blocks):
            return False
        if self.kind == NormKind.POLYHEDRAL:
            return np.array_equal(self.functionals, other.functionals)
        return self.base == other.base

    def __hash__(self) -> int:
        return hash((self.dim, self.kind, self.p, self.blocks))


def lp(dim: int, p: Union[float, str]) -> NormedModel:
    return NormedModel(dim=dim, kind=NormKind.LP, p=p)


def line() -> NormedModel:
    return lp(1, 2)


def l1(dim: int) -> NormedModel:
    return lp(dim, 1)


def l2(dim: int) -> NormedModel:
    return lp(dim, 2)


def linf(dim: int) -> NormedModel:
    return lp(dim, INF)


def polyhedral(functionals) -> NormedModel:
    funcs = np.asarray(functionals, dtype=np.float64)
    if funcs.ndim != 2:
        raise InputError("Polyhedral functionals must be a list of vectors")
    return NormedModel(dim=funcs.shape[1], kind=NormKind.POLYHEDRAL, functionals=funcs)


def _as_vector(model: NormedModel, v) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (model.dim,):
        raise InputError(f"Expected a vector of length {model.dim}, got shape {v.shape}")
    return v


def norm_eval(model: NormedModel, v) -> float:
    return float(model.norm_many(_as_vector(model, v)[None, :])[0])


def distance(model: NormedModel, u, v) -> float:
    return norm_eval(model, _as_vector(model, u) - _as_vector(model, v))


def product_max_norm(model: NormedModel, m: int) -> NormedModel:
    """V^m with ||(v_1, ..., v_m)|| = max_q ||v_q||"""
    if m < 1:
        raise InputError("Product power must be >= 1")
    if m == 1:
        return model
    return NormedModel(dim=model.dim * m, kind=NormKind.PRODUCT, base=model, blocks=m)


@dataclass(frozen=True, eq=False)
class PointConfig:
    model: NormedModel
    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64, copy=True)
        if pts.ndim == 1 and self.model.dim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise InputError("A configuration needs at least one point")
        if pts.shape[1] != self.model.dim:
            raise InputError(f"Points must have length {self.model.dim}, got {pts.shape[1]}")
        if not np.all(np.isfinite(pts)):
            raise InputError("Point coordinates must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def m(self) -> int:
        return self.points.shape[0]

    def norms(self) -> np.ndarray:
        return self.model.norm_many(self.points)

    def delete(self, index: int) -> "PointConfig":
        return PointConfig(self.model, np.delete(self.points, index, axis=0))


def pairwise_distances(config: PointConfig) -> np.ndarray:
    pts = config.points
    return config.model.norm_many(pts[:, None, :] - pts[None, :, :])


def min_separation(D: np.ndarray) -> float:
    m = D.shape[0]
    if m < 2:
        return math.inf
    return float(D[~np.eye(m, dtype=bool)].min())


def require_distinct(config: PointConfig) -> np.ndarray:
    """Pairwise distance matrix; raises when two points coincide"""
    D = pairwise_distances(config)
    if min_separation(D) <= POINT_ATOL:
        raise DegenerateError("Configuration contains duplicate points")
    return D


def sample_subspace(config: PointConfig) -> FiniteMetricSpace:
    D = require_distinct(config)
    # Exact symmetry; the norm is symmetric but float rounding of u - v and v - u can differ
    D = np.maximum(D, D.T)
    np.fill_diagonal(D, 0.0)
    return FiniteMetricSpace.from_matrix(D, labels=[f"p{i}" for i in range(config.m)])


def scale_config(config: PointConfig, lam: float) -> PointConfig:
    if not lam > 0:
        raise InputError("Scale factor must be positive")
    return PointConfig(config.model, config.points * lam)


def translate_config(config: PointConfig, v) -> PointConfig:
    return PointConfig(config.model, config.points + _as_vector(config.model, v))


def enclosing_radius(config: PointConfig) -> Tuple[np.ndarray, float]:
    """
    Center and radius of a small enclosing ball in the model norm.

    The center is found by Nelder-Mead from the centroid; the radius is
    evaluated at the returned center, so it is always a valid enclosing
    radius even if the minimization stops early.
    """
    pts = config.points
    model = config.model

    def spread(c):
        return float(model.norm_many(pts - c).max())

    c0 = pts.mean(axis=0)
    best_c, best_r = c0, spread(c0)
    if config.m > 1:
        res = minimize(spread, c0, method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-13, "maxiter": 4000 * model.dim})
        if res.fun < best_r:
            best_c, best_r = np.asarray(res.x), spread(res.x)
    return best_c, best_r
