# ghlab/services/metric_core.py
"""
Finite metric spaces, relations and their distortion, Hausdorff distance
between index subsets, and the exact Gromov-Hausdorff solver.

On finite spaces 2 * d_GH(X, Y) is the minimum distortion over all
correspondences. Every correspondence contains one of the form
graph(f) ∪ transpose(graph(g)) with f: X -> Y, g: Y -> X, and removing
pairs never increases distortion, so the solver only enumerates those.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..config import DEFAULT_NODE_BUDGET, METRIC_RTOL
from ..exceptions import InputError
from .certificates import CertifiedValue, Tag

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    labels: Tuple[str, ...]
    dist: np.ndarray

    def __post_init__(self):
        dist = np.array(self.dist, dtype=np.float64, copy=True)
        if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
            raise InputError(f"Distance matrix must be square, got shape {dist.shape}")
        n = dist.shape[0]
        if n == 0:
            raise InputError("A metric space needs at least one point")
        labels = tuple(str(label) for label in self.labels)
        if len(labels) != n:
            raise InputError(f"Got {len(labels)} labels for {n} points")
        if len(set(labels)) != n:
            raise InputError("Point labels must be unique")
        _validate_metric(dist)
        dist.setflags(write=False)
        object.__setattr__(self, "dist", dist)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    @classmethod
    def from_matrix(cls, dist, labels: Optional[Sequence] = None) -> "FiniteMetricSpace":
        dist = np.asarray(dist, dtype=np.float64)
        if labels is None:
            labels = [str(i) for i in range(dist.shape[0])] if dist.ndim == 2 else []
        return cls(labels=tuple(labels), dist=dist)

    @classmethod
    def from_line(cls, coords: Sequence[float]) -> "FiniteMetricSpace":
        """Points of the real line with |x - y|"""
        xs = np.asarray(coords, dtype=np.float64)
        return cls.from_matrix(np.abs(xs[:, None] - xs[None, :]))

    @classmethod
    def equilateral(cls, m: int, d: float = 1.0) -> "FiniteMetricSpace":
        if m < 1 or d <= 0:
            raise InputError("An equilateral space needs m >= 1 and d > 0")
        return cls.from_matrix(d * (1.0 - np.eye(m)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteMetricSpace):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.dist, other.dist)

    def __hash__(self) -> int:
        return hash((self.labels, self.dist.tobytes()))


def _validate_metric(dist: np.ndarray) -> None:
    if not np.all(np.isfinite(dist)):
        raise InputError("Distances must be finite")
    if np.any(dist < 0):
        raise InputError("Distances must be non-negative")
    if not np.array_equal(dist, dist.T):
        raise InputError("Distance matrix must be symmetric")
    if np.any(np.diag(dist) != 0):
        raise InputError("Self-distances must be zero")
    n = dist.shape[0]
    off = dist[~np.eye(n, dtype=bool)]
    if off.size and np.any(off <= 0):
        raise InputError("Distinct points must be at positive distance")
    if n >= 3:
        # through[i, j, k] = |ij| + |jk|
        through = dist[:, :, None] + dist[None, :, :]
        shortest = through.min(axis=1)
        tol = METRIC_RTOL * max(1.0, float(dist.max()))
        bad = np.argwhere(dist > shortest + tol)
        if bad.size:
            i, k = bad[0]
            raise InputError(
                f"Triangle inequality fails for points {i} and {k}: "
                f"{dist[i, k]!r} > {shortest[i, k]!r}"
            )


@dataclass(frozen=True)
class Relation:
    pairs: FrozenSet[Pair]

    def __post_init__(self):
        pairs = frozenset((int(i), int(j)) for i, j in self.pairs)
        if not pairs:
            raise InputError("A relation must contain at least one pair")
        if any(i < 0 or j < 0 for i, j in pairs):
            raise InputError("Relation indices must be non-negative")
        object.__setattr__(self, "pairs", pairs)

    def sorted_pairs(self) -> List[Pair]:
        return sorted(self.pairs)

    def check_indices(self, n_x: int, n_y: int) -> None:
        for i, j in self.pairs:
            if i >= n_x or j >= n_y:
                raise InputError(f"Pair ({i}, {j}) is out of range for spaces of size {n_x} and {n_y}")


@dataclass(frozen=True)
class Correspondence(Relation):
    n_x: int = field(default=0, compare=False)
    n_y: int = field(default=0, compare=False)

    def __post_init__(self):
        super().__post_init__()
        self.check_indices(self.n_x, self.n_y)
        if {i for i, _ in self.pairs} != set(range(self.n_x)):
            raise InputError("Correspondence does not cover every point of X")
        if {j for _, j in self.pairs} != set(range(self.n_y)):
            raise InputError("Correspondence does not cover every point of Y")


@dataclass(frozen=True)
class GHResult:
    distance: float
    optimal: Correspondence
    nodes_explored: int
    exact: bool = True


def correspondence_from_maps(f: Sequence[int], g: Sequence[int]) -> Correspondence:
    """graph(f) ∪ transpose(graph(g)) for f: X -> Y and g: Y -> X"""
    pairs = {(x, int(y)) for x, y in enumerate(f)} | {(int(x), y) for y, x in enumerate(g)}
    return Correspondence(pairs=frozenset(pairs), n_x=len(f), n_y=len(g))


def distortion(rel: Relation, X: FiniteMetricSpace, Y: FiniteMetricSpace) -> float:
    """sup of | |xx'| - |yy'| | over pairs of pairs in the relation"""
    rel.check_indices(X.n, Y.n)
    xs, ys = zip(*rel.sorted_pairs())
    xs, ys = np.array(xs), np.array(ys)
    gap = np.abs(X.dist[np.ix_(xs, xs)] - Y.dist[np.ix_(ys, ys)])
    return float(gap.max())


def diameter(X: FiniteMetricSpace) -> float:
    return float(X.dist.max())


def subspace(X: FiniteMetricSpace, indices: Iterable[int]) -> FiniteMetricSpace:
    idx = _index_set(indices, X.n, "subspace")
    return FiniteMetricSpace(
        labels=tuple(X.labels[i] for i in idx),
        dist=X.dist[np.ix_(idx, idx)],
    )


def _index_set(indices: Iterable[int], n: int, what: str) -> List[int]:
    idx = sorted({int(i) for i in indices})
    if not idx:
        raise InputError(f"{what}: index set must be non-empty")
    if idx[0] < 0 or idx[-1] >= n:
        raise InputError(f"{what}: indices must lie in [0, {n})")
    return idx


def hausdorff(A: Iterable[int], B: Iterable[int], X: FiniteMetricSpace) -> float:
    a = _index_set(A, X.n, "hausdorff")
    b = _index_set(B, X.n, "hausdorff")
    block = X.dist[np.ix_(a, b)]
    return float(max(block.min(axis=1).max(), block.min(axis=0).max()))


def realization_bound(Z: FiniteMetricSpace, A: Iterable[int], B: Iterable[int]) -> CertifiedValue:
    """Both subspaces sit isometrically in Z, so their Hausdorff distance bounds d_GH from above"""
    return CertifiedValue(
        value=hausdorff(A, B, Z),
        tag=Tag.UPPER,
        provenance="metric realization: Hausdorff distance of both subspaces inside the common space",
    )


def scale(X: FiniteMetricSpace, lam: float) -> FiniteMetricSpace:
    if not (lam > 0 and math.isfinite(lam)):
        raise InputError(f"Scale factor must be a positive real, got {lam!r}")
    return FiniteMetricSpace(labels=X.labels, dist=X.dist * lam)


class _BranchAndBound:
    """
    Depth-first search over (f, g). Decision k < |X| picks f(k); decision
    |X| + l picks g(l). Each decision adds one pair; a node is one added pair.
    """

    def __init__(self, X: FiniteMetricSpace, Y: FiniteMetricSpace, budget: int):
        self.DX = X.dist.tolist()
        self.DY = Y.dist.tolist()
        self.nx, self.ny = X.n, Y.n
        self.depth = self.nx + self.ny
        self.budget = budget
        self.nodes = 0
        self.exhausted = False
        self.lower_bound = abs(diameter(X) - diameter(Y))

    def _pair(self, k: int, choice: int) -> Pair:
        return (k, choice) if k < self.nx else (choice, k - self.nx)

    def _width(self, k: int) -> int:
        return self.ny if k < self.nx else self.nx

    def _step(self, a: int, b: int, xs: List[int], ys: List[int]) -> float:
        row_x, row_y = self.DX[a], self.DY[b]
        return max((abs(row_x[i] - row_y[j]) for i, j in zip(xs, ys)), default=0.0)

    def _tick(self) -> bool:
        self.nodes += 1
        if self.nodes > self.budget:
            self.exhausted = True
        return self.exhausted

    def minimize(self) -> Tuple[float, Optional[Tuple[int, ...]]]:
        self.best = math.inf
        self.best_assign: Optional[Tuple[int, ...]] = None
        self._descend_min(0, [], [], 0.0, [])
        return self.best, self.best_assign

    def _descend_min(self, k, xs, ys, cur, assign) -> bool:
        """Returns True when the search should stop entirely"""
        if k == self.depth:
            self.best, self.best_assign = cur, tuple(assign)
            return self.best <= self.lower_bound
        for choice in range(self._width(k)):
            if self._tick():
                return True
            a, b = self._pair(k, choice)
            new = max(cur, self._step(a, b, xs, ys))
            if new >= self.best:
                continue
            xs.append(a), ys.append(b), assign.append(choice)
            stop = self._descend_min(k + 1, xs, ys, new, assign)
            xs.pop(), ys.pop(), assign.pop()
            if stop:
                return True
        return False

    def smallest_tie(self, target: float) -> Optional[List[Pair]]:
        """Lexicographically smallest pair set among assignments with distortion <= target"""
        self.tie: Optional[List[Pair]] = None
        self._descend_tie(0, [], [], target)
        return self.tie

    def _descend_tie(self, k, xs, ys, target) -> None:
        if k == self.depth:
            pairs = sorted(set(zip(xs, ys)))
            if self.tie is None or pairs < self.tie:
                self.tie = pairs
            return
        for choice in range(self._width(k)):
            if self._tick():
                return
            a, b = self._pair(k, choice)
            if self._step(a, b, xs, ys) > target:
                continue
            xs.append(a), ys.append(b)
            self._descend_tie(k + 1, xs, ys, target)
            xs.pop(), ys.pop()
            if self.exhausted:
                return


def gh_exact(
    X: FiniteMetricSpace,
    Y: FiniteMetricSpace,
    budget: int = DEFAULT_NODE_BUDGET,
) -> GHResult:
    """
    Exact d_GH between finite spaces by branch-and-bound over
    union-of-two-graphs correspondences.

    The first phase finds the optimal distortion; the second re-enumerates
    the optimal assignments and keeps the lexicographically smallest pair
    set. If the node budget runs out during the first phase the incumbent is
    returned with exact=False; running out in the second phase only affects
    which optimal witness is reported.
    """
    if budget <= 0:
        raise InputError("Node budget must be positive")
    logger.debug(f"🔍 gh_exact on {X.n}x{Y.n} points, budget {budget}")
    bnb = _BranchAndBound(X, Y, budget)
    best, assign = bnb.minimize()
    exact = not bnb.exhausted
    if assign is None:
        # Budget ran out before any leaf: fall back to f ≡ 0, g ≡ 0
        fallback = correspondence_from_maps([0] * X.n, [0] * Y.n)
        logger.warning("⚠️ Node budget exhausted before the first complete correspondence")
        return GHResult(
            distance=distortion(fallback, X, Y) / 2,
            optimal=fallback,
            nodes_explored=bnb.nodes,
            exact=False,
        )
    witness = correspondence_from_maps(assign[: X.n], assign[X.n:])
    if exact:
        tie = bnb.smallest_tie(best)
        if tie is not None and not bnb.exhausted:
            witness = Correspondence(pairs=frozenset(tie), n_x=X.n, n_y=Y.n)
    else:
        logger.warning(f"⚠️ Node budget exhausted after {bnb.nodes} nodes; result is an upper bound")
    return GHResult(distance=best / 2, optimal=witness, nodes_explored=bnb.nodes, exact=exact)


def all_correspondences(n_x: int, n_y: int) -> Iterable[Correspondence]:
    """Every subset of X x Y whose projections are onto"""
    cells = list(itertools.product(range(n_x), range(n_y)))
    for mask in range(1, 1 << len(cells)):
        pairs = [cells[b] for b in range(len(cells)) if mask >> b & 1]
        if len({i for i, _ in pairs}) == n_x and len({j for _, j in pairs}) == n_y:
            yield Correspondence(pairs=frozenset(pairs), n_x=n_x, n_y=n_y)


def gh_brute_force(X: FiniteMetricSpace, Y: FiniteMetricSpace) -> GHResult:
    """Reference solver over every correspondence; only for tiny spaces"""
    if X.n * Y.n > 12:
        raise InputError("Brute-force enumeration is limited to |X|·|Y| <= 12")
    best, best_pairs, count = math.inf, None, 0
    for corr in all_correspondences(X.n, Y.n):
        count += 1
        dis = distortion(corr, X, Y)
        pairs = corr.sorted_pairs()
        if dis < best or (dis == best and pairs < best_pairs):
            best, best_pairs = dis, pairs
    return GHResult(
        distance=best / 2,
        optimal=Correspondence(pairs=frozenset(best_pairs), n_x=X.n, n_y=Y.n),
        nodes_explored=count,
    )
