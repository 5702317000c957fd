# ghlab/models.py
"""pydantic schemas for every file the CLI reads or writes"""
from typing import List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .config import COMMANDS, DEFAULT_SEED, MAX_SEED
from .exceptions import InputError, ParseError
from .services.certificates import CertifiedValue
from .services.equilateral import EdEvidence, EquilateralReport
from .services.gh_bounds import BoundReport, SweepResult
from .services.imbalance import AuditReport
from .services.metric_core import FiniteMetricSpace, GHResult
from .services.normed_models import NormKind, NormedModel, PointConfig, lp, polyhedral

Matrix = List[List[float]]


class SpaceFile(BaseModel):
    """Finite metric space: {"labels": [...], "dist": [[...], ...]}"""
    labels: Optional[List[str]] = Field(None, description="Point identifiers; defaults to 0..n-1")
    dist: Matrix = Field(..., description="Symmetric distance matrix")

    @field_validator("dist")
    @classmethod
    def _rectangular(cls, v: Matrix) -> Matrix:
        if any(len(row) != len(v[0]) for row in v):
            raise ValueError("distance matrix rows must all have the same length")
        return v

    def to_space(self) -> FiniteMetricSpace:
        return FiniteMetricSpace.from_matrix(self.dist, self.labels)

    @classmethod
    def from_space(cls, space: FiniteMetricSpace) -> "SpaceFile":
        return cls(labels=list(space.labels), dist=space.dist.tolist())


class ModelFile(BaseModel):
    """Normed model: lp with p in [1, inf] or polyhedral via dual functionals"""
    type: Literal["lp", "polyhedral"] = Field(..., description="Norm family")
    dim: int = Field(..., gt=0, description="Dimension of the space")
    p: Optional[Union[float, Literal["inf"]]] = Field(None, description="lp exponent or 'inf'")
    functionals: Optional[Matrix] = Field(None, description="Rows a with norm(x) = max |<a, x>|")

    def to_model(self) -> NormedModel:
        if self.type == "lp":
            if self.p is None:
                raise InputError("lp model requires 'p'")
            model = lp(self.dim, self.p)
        else:
            if not self.functionals:
                raise InputError("polyhedral model requires 'functionals'")
            if any(len(row) != len(self.functionals[0]) for row in self.functionals):
                raise ParseError("functional rows must all have the same length")
            model = polyhedral(self.functionals)
        if model.dim != self.dim:
            raise InputError(f"declared dim {self.dim} does not match functionals of length {model.dim}")
        return model

    @classmethod
    def from_model(cls, model: NormedModel) -> "ModelFile":
        if model.kind == NormKind.LP:
            return cls(type="lp", dim=model.dim, p=model.p)
        if model.kind == NormKind.POLYHEDRAL:
            return cls(type="polyhedral", dim=model.dim, functionals=model.functionals.tolist())
        raise ValueError("product models have no file form")


def _points(config: Optional[PointConfig]) -> Optional[Matrix]:
    return None if config is None else np.asarray(config.points).tolist()


class GHResultPayload(BaseModel):
    distance: float
    correspondence: List[List[int]]
    exact: bool
    nodes_explored: int

    @classmethod
    def from_result(cls, result: GHResult) -> "GHResultPayload":
        return cls(
            distance=result.distance,
            correspondence=[list(p) for p in result.optimal.sorted_pairs()],
            exact=result.exact,
            nodes_explored=result.nodes_explored,
        )


class CertifiedValuePayload(BaseModel):
    value: float
    tag: Literal["exact", "upper", "lower"]
    witness: Optional[Matrix] = None
    provenance: str = ""

    @classmethod
    def from_cert(cls, cert: CertifiedValue) -> "CertifiedValuePayload":
        provenance = cert.provenance
        if cert.lower_argument:
            provenance = f"{provenance}; lower argument: {cert.lower_argument}"
        return cls(value=cert.value, tag=cert.tag.value, witness=_points(cert.witness), provenance=provenance)


class EquilateralPayload(BaseModel):
    m: int
    success: bool
    common_distance: float
    spread: float
    points: Matrix

    @classmethod
    def from_report(cls, report: EquilateralReport) -> "EquilateralPayload":
        return cls(
            m=report.m,
            success=report.success,
            common_distance=report.common_distance,
            spread=report.spread,
            points=_points(report.config),
        )


class EdPayload(BaseModel):
    lower_bound: int
    cap: int
    reports: List[EquilateralPayload]

    @classmethod
    def from_evidence(cls, evidence: EdEvidence) -> "EdPayload":
        return cls(
            lower_bound=evidence.lower_bound,
            cap=evidence.cap,
            reports=[EquilateralPayload.from_report(r) for r in evidence.reports],
        )


class EmbeddingPayload(BaseModel):
    distortion: float
    gh_upper: float
    points: Matrix


class AuditCheckPayload(BaseModel):
    name: Literal["stated_upper", "stated_lower", "constructive_step"]
    passed: bool
    conclusive: bool
    margin: float


class AuditPayload(BaseModel):
    model: str
    m: int
    c: CertifiedValuePayload
    r: CertifiedValuePayload
    constructive_r_from_c: float
    checks: List[AuditCheckPayload]

    @classmethod
    def from_report(cls, report: AuditReport) -> "AuditPayload":
        return cls(
            model=report.model.describe(),
            m=report.m,
            c=CertifiedValuePayload.from_cert(report.c),
            r=CertifiedValuePayload.from_cert(report.r),
            constructive_r_from_c=report.constructive_r_from_c,
            checks=[AuditCheckPayload(name=ch.name, passed=ch.passed, conclusive=ch.conclusive, margin=ch.margin)
                    for ch in report.checks],
        )

    def csv_row(self) -> list:
        row = [self.model, self.m, self.c.value, self.c.tag, self.r.value, self.r.tag]
        for check in self.checks:
            row += [check.name, check.passed, check.conclusive, check.margin]
        return row


class BoundPayload(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    lam: Optional[float] = Field(None, alias="lambda")
    d: float
    m: int
    c: float
    c_tag: Literal["exact", "upper", "lower"]
    bound: float
    valid: bool

    @classmethod
    def from_report(cls, report: BoundReport) -> "BoundPayload":
        return cls(lam=report.lam, d=report.d, m=report.m, c=report.c,
                   c_tag=report.c_tag.value, bound=report.bound, valid=report.valid)

    def csv_row(self) -> list:
        return [self.lam, self.d, self.m, self.c, self.c_tag, self.bound, self.valid]


BOUND_CSV_HEADER = ["lambda", "d", "m", "c", "c_tag", "bound", "valid"]


class SweepPayload(BaseModel):
    found: bool
    diagnostic: str = ""
    equilateral: Optional[EquilateralPayload] = None
    c: Optional[CertifiedValuePayload] = None
    reports: List[BoundPayload] = Field(default_factory=list)

    @classmethod
    def from_result(cls, result: SweepResult) -> "SweepPayload":
        return cls(
            found=result.found,
            diagnostic=result.diagnostic,
            equilateral=EquilateralPayload.from_report(result.equilateral) if result.equilateral else None,
            c=CertifiedValuePayload.from_cert(result.c) if result.c else None,
            reports=[BoundPayload.from_report(r) for r in result.reports],
        )


class RunConfig(BaseModel):
    """One CLI invocation"""
    command: Literal[tuple(COMMANDS)] = Field(..., description="Operation family to run")
    x: Optional[str] = Field(None, description="Path of the first space file")
    y: Optional[str] = Field(None, description="Path of the second space file")
    space: Optional[str] = Field(None, description="Path of the space to embed")
    model: Optional[str] = Field(None, description="Path of a model file")
    x_model: Optional[str] = Field(None, description="Model holding the equilateral set (sweep)")
    y_model: Optional[str] = Field(None, description="Model whose imbalance is used (sweep)")
    m: Optional[int] = Field(None, ge=1, description="Number of points")
    ms: Optional[List[int]] = Field(None, description="Several point counts (profile runs)")
    d: Optional[float] = Field(None, description="Equilateral diameter (bound)")
    c: Optional[float] = Field(None, description="Imbalance value (bound)")
    c_tag: Literal["exact", "upper", "lower"] = Field("upper", description="Certificate tag of --c")
    lambdas: List[float] = Field(default_factory=lambda: [1.0, 10.0, 100.0, 1000.0])
    tol: float = Field(1e-6, gt=0, description="Relative tolerance for equilateral success")
    seed: int = Field(DEFAULT_SEED, ge=0, lt=MAX_SEED, description="Master RNG seed")
    starts: int = Field(..., gt=0, description="Random starts per search")
    iterations: int = Field(..., gt=0, description="Iterations per start")
    node_budget: int = Field(..., gt=0, description="Branch-and-bound node limit")
    format: Literal["json", "csv"] = Field("json", description="Output format")
    out: Optional[str] = Field(None, description="Output path; stdout when omitted")

    @field_validator("lambdas")
    @classmethod
    def _positive_lambdas(cls, v: List[float]) -> List[float]:
        if not v or any(lam <= 0 for lam in v):
            raise ValueError("lambdas must be positive")
        return v
