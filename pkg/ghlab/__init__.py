"""ghlab: Gromov-Hausdorff distances and certified bounds for finite metric spaces and normed models."""

__version__ = "0.1.0"

from .services.certificates import CertifiedValue, Tag
from .services.equilateral import ed_evidence, equilateral_search, is_equilateral
from .services.gh_bounds import (
    EquilateralSpec,
    equilateral_gap_bound,
    infinite_distance_sweep,
    min_distortion_embedding,
)
from .services.imbalance import c_m_upper, inequality_audit, max_triple_imbalance, phi, r_m_upper
from .services.metric_core import (
    Correspondence,
    FiniteMetricSpace,
    Relation,
    distortion,
    gh_brute_force,
    gh_exact,
    hausdorff,
)
from .services.normed_models import NormedModel, PointConfig, distance, norm_eval
from .services.optimizer import SearchBudget

__all__ = [
    "CertifiedValue",
    "Correspondence",
    "EquilateralSpec",
    "FiniteMetricSpace",
    "NormedModel",
    "PointConfig",
    "Relation",
    "SearchBudget",
    "Tag",
    "c_m_upper",
    "distance",
    "distortion",
    "ed_evidence",
    "equilateral_gap_bound",
    "equilateral_search",
    "gh_brute_force",
    "gh_exact",
    "hausdorff",
    "inequality_audit",
    "infinite_distance_sweep",
    "is_equilateral",
    "max_triple_imbalance",
    "min_distortion_embedding",
    "norm_eval",
    "phi",
    "r_m_upper",
]
