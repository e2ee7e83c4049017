"""
Shared data models and numeric defaults.

Every type that crosses a module boundary or ends up in a JSON report is a
pydantic model; hot-path value types (partitions, vectors) live next to the
code that uses them.
"""

import json
import math
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from errors import DomainError
from jack import EvalVector

ARTIFACT_VERSION = "1.0.0"

DEFAULT_MAX_WEIGHT = 40
DEFAULT_REL_TOL = 1e-12
DEFAULT_ABS_TOL = 1e-300
PROPOSITION_MAX_WEIGHT = 64

DEFAULT_POINT_BOX = 1.5
DEFAULT_MAX_NORM_PRODUCT = 3.0
DEFAULT_SMALL_FRACTION = 0.2
DEFAULT_SMALL_NORM_PRODUCT = 0.1

PROPOSITION12_K2 = (0.0, 0.5, 1.0, 2.0)


def _close(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-12)


class SeriesPolicy(BaseModel):
    """Truncation controls for every Jack-polynomial series."""
    model_config = ConfigDict(frozen=True)

    max_weight: int = Field(default=DEFAULT_MAX_WEIGHT, ge=2, description="Hard cap M on |lambda|")
    rel_tol: float = Field(default=DEFAULT_REL_TOL, gt=0.0, lt=1.0)
    abs_tol: float = Field(default=DEFAULT_ABS_TOL, gt=0.0, lt=1.0)

    @property
    def policy_id(self) -> str:
        return f"mw{self.max_weight}-rt{self.rel_tol:g}-at{self.abs_tol:g}"

    def accepts(self, tail_bound: float, value: float) -> bool:
        """True when the tail bound is small enough to stop summing."""
        return tail_bound <= self.rel_tol * abs(value) + self.abs_tol


class SeriesResult(BaseModel):
    """Output of a truncated series evaluation."""
    model_config = ConfigDict(frozen=True)

    value: float
    tail_bound: float = Field(ge=0.0, description="Bound on the dropped remainder")
    weights_summed: int = Field(ge=0, description="Largest weight included in value")
    converged: bool
    rigorous: bool = Field(default=True, description="False when tail_bound is a term-ratio estimate")


class MultiplicityB(BaseModel):
    """Multiplicity (k1, k2) of the root system B_N."""
    model_config = ConfigDict(frozen=True)

    k1: float = Field(ge=0.0, description="Value on the roots +-e_i")
    k2: float = Field(ge=0.0, description="Value on the roots +-e_i +- e_j")
    N: int = Field(ge=1)

    @property
    def alpha(self) -> float:
        if self.k2 == 0:
            raise DomainError("alpha = 1/k2 is undefined for k2 = 0")
        return 1.0 / self.k2

    @property
    def mu(self) -> float:
        return self.k1 + (self.N - 1) * self.k2 + 0.5

    @property
    def in_proposition_regime(self) -> bool:
        return self.k1 >= self.k2 * (self.N - 1) or self.on_boundary

    @property
    def on_boundary(self) -> bool:
        return _close(self.k1, self.k2 * (self.N - 1))

    @classmethod
    def from_mu(cls, mu: float, k2: float, N: int) -> "MultiplicityB":
        """Multiplicity whose induced mu equals the given value."""
        k1 = mu - (N - 1) * k2 - 0.5
        if _close(k1, k2 * (N - 1)):
            k1 = k2 * (N - 1)
        return cls(k1=k1, k2=k2, N=N)


class EvalPoint(BaseModel):
    """A pair of argument vectors (x, y) of a verification sweep."""
    model_config = ConfigDict(frozen=True)

    x: Tuple[float, ...]
    y: Tuple[float, ...]

    @model_validator(mode="after")
    def _same_dimension(self) -> "EvalPoint":
        if not self.x or len(self.x) != len(self.y):
            raise ValueError(f"x and y need the same positive dimension, got {len(self.x)} and {len(self.y)}")
        return self

    @property
    def N(self) -> int:
        return len(self.x)

    @property
    def vx(self) -> EvalVector:
        return EvalVector(self.x)

    @property
    def vy(self) -> EvalVector:
        return EvalVector(self.y)

    @property
    def x_squared(self) -> EvalVector:
        return self.vx.squared()

    @property
    def y_squared(self) -> EvalVector:
        return self.vy.squared()

    @property
    def norm_x(self) -> float:
        return self.vx.norm()

    @property
    def norm_y(self) -> float:
        return self.vy.norm()

    @property
    def norm_product(self) -> float:
        return self.norm_x * self.norm_y


class SweepConfig(BaseModel):
    """
    One proposition sweep: a mu grid at fixed (N, k2) over a fixed point grid.

    Each mu induces k1 = mu - (N-1) k2 - 1/2, which must satisfy the
    hypothesis k1 >= k2 (N-1) of both propositions.
    """
    model_config = ConfigDict(frozen=True)

    subject: Literal["prop11", "prop12", "conjecture"] = "prop11"
    N: int = Field(ge=1)
    k2: float = Field(ge=0.0)
    mu_grid: List[float]
    point_grid: List[EvalPoint]
    policy: SeriesPolicy = Field(default_factory=lambda: SeriesPolicy(max_weight=PROPOSITION_MAX_WEIGHT))
    seed: int = 0
    ceiling: Optional[float] = Field(default=None, ge=0.0)

    @field_validator("mu_grid")
    @classmethod
    def _increasing(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("mu_grid must not be empty")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError(f"mu_grid must be strictly increasing, got {value}")
        return value

    @model_validator(mode="after")
    def _hypothesis(self) -> "SweepConfig":
        if not self.point_grid:
            raise ValueError("point_grid must not be empty")
        for pt in self.point_grid:
            if pt.N != self.N:
                raise ValueError(f"point of dimension {pt.N} in a sweep with N={self.N}")
        for mu in self.mu_grid:
            k1 = mu - (self.N - 1) * self.k2 - 0.5
            bound = self.k2 * (self.N - 1)
            if k1 < bound and not _close(k1, bound):
                raise ValueError(f"mu={mu} induces k1={k1} < k2(N-1)={bound}")
        if self.subject == "prop12" and self.k2 not in PROPOSITION12_K2:
            raise ValueError(f"prop12 needs k2 in {PROPOSITION12_K2}, got {self.k2}")
        if self.subject == "prop11" and self.k2 == 0:
            raise ValueError("prop11 needs k2 > 0")
        return self

    def multiplicity(self, mu: float) -> MultiplicityB:
        return MultiplicityB.from_mu(mu, self.k2, self.N)


class PointPayload(BaseModel):
    x: List[float]
    y: List[float]


class SweepRecord(BaseModel):
    """One (mu, point) evaluation of a proposition sweep."""
    mu: float
    point: PointPayload
    error: float
    denominator: float
    ratio: float
    converged: bool = True
    boundary_of_hypothesis: bool = False


class ConvergenceOrder(BaseModel):
    per_point: List[Optional[float]] = Field(default_factory=list)
    median: Optional[float] = None


class VerificationReport(BaseModel):
    """Machine-readable result of one proposition sweep."""
    model_config = ConfigDict(populate_by_name=True)

    command: str
    inputs: Dict[str, Any]
    records: List[SweepRecord]
    empirical_constant: float = Field(ge=0.0)
    convergence_order: Optional[ConvergenceOrder] = None
    passed: bool = Field(alias="pass")
    informational: bool = False
    failures: List[Dict[str, Any]] = Field(default_factory=list)


class CheckReport(BaseModel):
    """Result of a lemma-level or one-dimensional sweep."""
    model_config = ConfigDict(populate_by_name=True)

    command: str
    inputs: Dict[str, Any]
    records: List[Dict[str, Any]]
    summary: Dict[str, Any] = Field(default_factory=dict)
    passed: bool = Field(alias="pass")
    informational: bool = False


class OutputRecord(BaseModel):
    """One line of `dunkl eval` output."""
    command: str
    inputs: Dict[str, Any]
    outputs: Dict[str, Any]
    versions: Dict[str, str]

    @field_validator("versions")
    @classmethod
    def _has_version(cls, value: Dict[str, str]) -> Dict[str, str]:
        if "artifact" not in value:
            raise ValueError("versions must carry the artifact version")
        return value

    @model_validator(mode="after")
    def _command_known(self) -> "OutputRecord":
        if not self.command:
            raise ValueError("command must be non-empty")
        return self


def _json_safe(value: Any) -> Any:
    """Replace non-finite floats by None so the output stays strict JSON."""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def to_json(model: BaseModel) -> str:
    """
    Serialize a model as one line of strict JSON.

    Floats are written with Python's shortest round-trip representation, so
    parsing and re-serializing a line reproduces it byte for byte.
    """
    payload = _json_safe(model.model_dump(mode="python", by_alias=True))
    return json.dumps(payload, separators=(",", ":"), allow_nan=False)
