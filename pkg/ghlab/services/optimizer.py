# ghlab/services/optimizer.py
"""
Derivative-free multistart minimization for max-type objectives.

Each start runs a short simulated-annealing walk, then a pattern search
that alternates coordinate polls with polls along a random orthonormal
basis (a fixed coordinate stencil stalls on the kinks of max-type
objectives), then a Nelder-Mead polish. The best point ever evaluated is
kept, so a start never returns something worse than its initial point.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy.optimize import minimize

from ..config import get_settings
from ..exceptions import InputError

logger = logging.getLogger(__name__)

Objective = Callable[[np.ndarray], float]
StartFactory = Callable[[np.random.Generator], np.ndarray]


@dataclass(frozen=True)
class SearchBudget:
    starts: int
    iterations: int

    def __post_init__(self):
        if self.starts <= 0 or self.iterations <= 0:
            raise InputError(f"Search budget must be positive, got starts={self.starts}, iterations={self.iterations}")

    @classmethod
    def default(cls) -> "SearchBudget":
        settings = get_settings()
        return cls(starts=settings.starts, iterations=settings.iterations)


@dataclass
class _Tracker:
    objective: Objective
    best_x: np.ndarray = None
    best_f: float = math.inf
    evaluations: int = 0

    def __call__(self, x: np.ndarray) -> float:
        f = float(self.objective(x))
        self.evaluations += 1
        if math.isnan(f):
            f = math.inf
        if f < self.best_f:
            self.best_f, self.best_x = f, np.array(x, dtype=np.float64, copy=True)
        return f


@dataclass(frozen=True)
class StartOutcome:
    index: int
    x: np.ndarray
    value: float
    evaluations: int


@dataclass(frozen=True)
class MultistartResult:
    x: np.ndarray
    value: float
    start_index: int
    outcomes: Tuple[StartOutcome, ...] = field(repr=False)

    @property
    def evaluations(self) -> int:
        return sum(o.evaluations for o in self.outcomes)


def anneal(f: _Tracker, x0: np.ndarray, rng: np.random.Generator, steps: int, sigma: float) -> np.ndarray:
    x, fx = x0, f(x0)
    temperature = 0.05 * (abs(fx) + 1e-3) if math.isfinite(fx) else 1.0
    for _ in range(steps):
        cand = x + rng.normal(0.0, sigma, size=x.shape)
        fc = f(cand)
        if fc < fx or (math.isfinite(fc) and rng.random() < math.exp(-(fc - fx) / max(temperature, 1e-300))):
            x, fx = cand, fc
        temperature *= 0.97
        sigma *= 0.995
    return f.best_x


def pattern_search(
    f: _Tracker,
    x0: np.ndarray,
    rng: np.random.Generator,
    iterations: int,
    step: float,
    min_step: float = 1e-11,
) -> np.ndarray:
    x = np.array(x0, dtype=np.float64)
    fx = f(x)
    n = x.size
    for it in range(iterations):
        if step < min_step:
            break
        if it % 2 == 0:
            basis = np.eye(n)
        else:
            basis, _ = np.linalg.qr(rng.standard_normal((n, n)))
        improved = False
        for d in np.concatenate([basis.T, -basis.T]):
            cand = x + step * d
            fc = f(cand)
            if fc < fx:
                x, fx, improved = cand, fc, True
                break
        if not improved:
            step *= 0.5
    return x


def _run_start(
    objective: Objective,
    index: int,
    x0: np.ndarray,
    seed_seq: np.random.SeedSequence,
    iterations: int,
    step: float,
    polish: bool,
) -> StartOutcome:
    rng = np.random.default_rng(seed_seq)
    f = _Tracker(objective)
    f(x0)
    x = anneal(f, x0, rng, steps=max(1, iterations // 2), sigma=step)
    x = pattern_search(f, f.best_x, rng, iterations=iterations, step=step)
    if polish and x.size > 0:
        minimize(f, f.best_x, method="Nelder-Mead",
                 options={"maxiter": iterations * x.size, "xatol": 1e-12, "fatol": 1e-14})
        pattern_search(f, f.best_x, rng, iterations=iterations, step=step * 1e-3)
    return StartOutcome(index=index, x=f.best_x, value=f.best_f, evaluations=f.evaluations)


def run_multistart(
    objective: Objective,
    random_start: StartFactory,
    budget: SearchBudget,
    seed: int,
    seeds: Sequence[np.ndarray] = (),
    step: float = 0.25,
    polish: bool = True,
    n_jobs: Optional[int] = None,
) -> MultistartResult:
    """
    Minimize `objective` from every structured start in `seeds` plus
    `budget.starts` random starts drawn by `random_start`.

    Start i uses the i-th child of SeedSequence(seed), so results do not
    depend on n_jobs or scheduling. Ties go to the lowest start index.
    """
    children = np.random.SeedSequence(seed).spawn(len(seeds) + budget.starts)
    starts: List[np.ndarray] = [np.array(s, dtype=np.float64).ravel() for s in seeds]
    for child in children[len(seeds):]:
        starts.append(np.asarray(random_start(np.random.default_rng(child.spawn(1)[0])), dtype=np.float64).ravel())
    n_jobs = n_jobs if n_jobs is not None else get_settings().n_jobs
    logger.debug(f"🎲 Multistart: {len(seeds)} structured + {budget.starts} random starts, n_jobs={n_jobs}")
    outcomes = Parallel(n_jobs=n_jobs)(
        delayed(_run_start)(objective, i, x0, children[i], budget.iterations, step, polish)
        for i, x0 in enumerate(starts)
    )
    values = np.array([o.value for o in outcomes])
    best = int(np.argmin(values))
    return MultistartResult(
        x=outcomes[best].x,
        value=outcomes[best].value,
        start_index=best,
        outcomes=tuple(outcomes),
    )
