# ghlab/services/certificates.py
"""Certified values: a number, the direction in which it is trustworthy, and its witness."""
from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:
    from .normed_models import PointConfig


class Tag(str, Enum):
    EXACT = "exact"
    UPPER = "upper"
    LOWER = "lower"


@dataclass(frozen=True)
class CertifiedValue:
    value: float
    tag: Tag
    witness: Optional["PointConfig"] = None
    provenance: str = ""
    lower_argument: Optional[str] = None

    @property
    def bounds_from_below(self) -> bool:
        """True when the true quantity is known to be >= value"""
        return self.tag in (Tag.EXACT, Tag.LOWER)

    @property
    def bounds_from_above(self) -> bool:
        """True when the true quantity is known to be <= value"""
        return self.tag in (Tag.EXACT, Tag.UPPER)

    def upgraded(self, lower_argument: str, lower: Optional[float] = None) -> "CertifiedValue":
        """Tag as exact; with `lower` given, the witness-to-bound gap is recorded too"""
        if lower is not None:
            lower_argument = f"{lower_argument}; lower bound {lower!r}, witness exceeds it by {self.value - lower:.3e}"
        return replace(self, tag=Tag.EXACT, lower_argument=lower_argument)
