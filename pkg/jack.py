"""
Jack polynomials C_lambda^alpha in the C-normalization

    (x_1 + ... + x_N)^k = sum_{|lambda| = k} C_lambda^alpha(x).

Values are computed in J-normalization by the branching rule over the number
of variables,

    J_lambda(x_1..x_n) = sum_mu J_mu(x_1..x_{n-1}) x_n^{|lambda|-|mu|} beta_{lambda mu},

where mu runs over partitions with lambda/mu a horizontal strip, and then
rescaled with C_lambda = alpha^k k! / j_lambda * J_lambda, j_lambda being the
product of upper and lower hook lengths.

A JackEvaluator owns the memo table for one argument vector. It is meant to be
filled by one task; once warm it is only read, so it may be shared.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, Sequence, Tuple, Union

from errors import DomainError
from partitions import Partition, horizontal_strips, partitions_up_to

logger = logging.getLogger(__name__)

Parts = Tuple[int, ...]


@dataclass(frozen=True)
class JackParameter:
    """The Jack index alpha > 0."""
    alpha: float

    def __post_init__(self):
        alpha = float(self.alpha)
        if not math.isfinite(alpha) or alpha <= 0:
            raise DomainError(f"Jack parameter must be a positive real, got {self.alpha!r}")
        object.__setattr__(self, "alpha", alpha)

    @classmethod
    def from_multiplicity(cls, k2: float) -> "JackParameter":
        """alpha = 1/k2 for the root systems A and B."""
        if k2 <= 0:
            raise DomainError(f"alpha = 1/k2 needs k2 > 0, got {k2}")
        return cls(1.0 / k2)

    @classmethod
    def from_cone_dimension(cls, d: int) -> "JackParameter":
        """alpha = 2/d for the cone of positive semidefinite matrices over R, C, H."""
        if d not in (1, 2, 4):
            raise DomainError(f"cone dimension must be 1, 2 or 4, got {d}")
        return cls(2.0 / d)


@dataclass(frozen=True)
class EvalVector:
    """A real argument vector (x_1, ..., x_N)."""
    coords: Tuple[float, ...]

    def __post_init__(self):
        coords = tuple(float(c) for c in self.coords)
        if not coords:
            raise DomainError("argument vectors need at least one coordinate")
        if not all(math.isfinite(c) for c in coords):
            raise DomainError(f"argument vector has non-finite coordinates: {coords!r}")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def of(cls, values: Iterable[float]) -> "EvalVector":
        return cls(tuple(values))

    @classmethod
    def parse(cls, text: str) -> "EvalVector":
        try:
            return cls(tuple(float(v) for v in text.split(",")))
        except ValueError as e:
            raise DomainError(f"malformed vector {text!r}: {e}") from e

    @classmethod
    def ones(cls, n: int) -> "EvalVector":
        return cls((1.0,) * n)

    @classmethod
    def zeros(cls, n: int) -> "EvalVector":
        return cls((0.0,) * n)

    @property
    def N(self) -> int:
        return len(self.coords)

    def squared(self) -> "EvalVector":
        return EvalVector(tuple(c * c for c in self.coords))

    def scaled(self, t: float) -> "EvalVector":
        return EvalVector(tuple(t * c for c in self.coords))

    def norm(self) -> float:
        return math.sqrt(math.fsum(c * c for c in self.coords))

    def abs_sum(self) -> float:
        return math.fsum(abs(c) for c in self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __len__(self) -> int:
        return len(self.coords)


AlphaLike = Union[JackParameter, float, int]
VectorLike = Union[EvalVector, Sequence[float]]


def as_alpha(alpha: AlphaLike) -> float:
    return alpha.alpha if isinstance(alpha, JackParameter) else JackParameter(alpha).alpha


def as_vector(x: VectorLike) -> EvalVector:
    return x if isinstance(x, EvalVector) else EvalVector(tuple(x))


@lru_cache(maxsize=None)
def _conjugate(parts: Parts) -> Parts:
    return Partition(parts).conjugate().parts


def _upper_hook(nu: Parts, nu_c: Parts, i: int, j: int, alpha: float) -> float:
    return nu_c[j - 1] - i + alpha * (nu[i - 1] - j + 1)


def _lower_hook(nu: Parts, nu_c: Parts, i: int, j: int, alpha: float) -> float:
    return nu_c[j - 1] - i + 1 + alpha * (nu[i - 1] - j)


@lru_cache(maxsize=None)
def _branching_coefficient(lam: Parts, mu: Parts, alpha: float) -> float:
    """beta_{lambda mu}: upper hooks in columns where lambda' and mu' agree, lower hooks elsewhere."""
    lam_c = _conjugate(lam)
    mu_c = _conjugate(mu)

    def same_column(j: int) -> bool:
        return (mu_c[j - 1] if j <= len(mu_c) else 0) == lam_c[j - 1]

    value = 1.0
    for i, row in enumerate(lam, start=1):
        for j in range(1, row + 1):
            if same_column(j):
                value *= _upper_hook(lam, lam_c, i, j, alpha)
            else:
                value *= _lower_hook(lam, lam_c, i, j, alpha)
    for i, row in enumerate(mu, start=1):
        for j in range(1, row + 1):
            if same_column(j):
                value /= _upper_hook(mu, mu_c, i, j, alpha)
            else:
                value /= _lower_hook(mu, mu_c, i, j, alpha)
    return value


@lru_cache(maxsize=None)
def _horizontal_strips(lam: Parts, n: int) -> Tuple[Parts, ...]:
    return tuple(mu.parts for mu in horizontal_strips(Partition(lam), n - 1))


@lru_cache(maxsize=None)
def _c_scale(lam: Parts, alpha: float) -> float:
    """alpha^k k! / j_lambda, accumulated box by box to stay in range."""
    lam_c = _conjugate(lam)
    value = 1.0
    s = 0
    for i, row in enumerate(lam, start=1):
        for j in range(1, row + 1):
            s += 1
            value *= alpha * s / (_upper_hook(lam, lam_c, i, j, alpha) * _lower_hook(lam, lam_c, i, j, alpha))
    return value


def _check_fits(lam: Partition, n: int) -> None:
    if lam.length > n:
        raise DomainError(
            f"partition {lam} has {lam.length} parts but the argument has only {n} coordinates"
        )


class JackEvaluator:
    """
    Memoized evaluation of Jack polynomials at one argument vector.
    """

    def __init__(self, alpha: AlphaLike, x: VectorLike):
        """
        Args:
            alpha: Jack index, > 0.
            x: Argument vector.
        """
        self.alpha = as_alpha(alpha)
        self.x = as_vector(x)
        self._memo: Dict[Tuple[Parts, int], float] = {}

    @property
    def N(self) -> int:
        return self.x.N

    def _J(self, lam: Parts, n: int) -> float:
        if len(lam) > n:
            return 0.0
        if not lam:
            return 1.0
        key = (lam, n)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        xn = self.x.coords[n - 1]
        weight = sum(lam)
        terms = []
        for mu in _horizontal_strips(lam, n):
            inner = self._J(mu, n - 1)
            if inner == 0.0:
                continue
            terms.append(inner * xn ** (weight - sum(mu)) * _branching_coefficient(lam, mu, self.alpha))
        value = math.fsum(terms)
        self._memo[key] = value
        return value

    def J(self, lam: Partition) -> float:
        """Jack polynomial in J-normalization."""
        _check_fits(lam, self.N)
        return self._J(lam.parts, self.N)

    def C(self, lam: Partition) -> float:
        """Jack polynomial in C-normalization."""
        _check_fits(lam, self.N)
        return _c_scale(lam.parts, self.alpha) * self._J(lam.parts, self.N)

    def warm(self, max_weight: int) -> "JackEvaluator":
        """Fill the memo table for every partition up to the given weight."""
        for _, lams in partitions_up_to(max_weight, self.N):
            for lam in lams:
                self._J(lam.parts, self.N)
        return self


@lru_cache(maxsize=64)
def _ones_evaluator(alpha: float, n: int) -> JackEvaluator:
    return JackEvaluator(alpha, EvalVector.ones(n))


class JackKernel:
    """
    The series kernel C(x) C(y) / C(1) for a fixed pair of arguments.
    """

    def __init__(self, alpha: AlphaLike, x: VectorLike, y: VectorLike):
        self.alpha = as_alpha(alpha)
        x = as_vector(x)
        y = as_vector(y)
        if x.N != y.N:
            raise DomainError(f"dimension mismatch: x has {x.N} coordinates, y has {y.N}")
        self.N = x.N
        self.ex = JackEvaluator(self.alpha, x)
        self.ey = self.ex if y == x else JackEvaluator(self.alpha, y)
        self.e1 = _ones_evaluator(self.alpha, self.N)

    def ratio(self, lam: Partition) -> float:
        _check_fits(lam, self.N)
        parts = lam.parts
        jx = self.ex._J(parts, self.N)
        if jx == 0.0:
            return 0.0
        jy = self.ey._J(parts, self.N)
        return jx / self.e1._J(parts, self.N) * _c_scale(parts, self.alpha) * jy


@lru_cache(maxsize=256)
def kernel_for(alpha: float, x: EvalVector, y: EvalVector) -> JackKernel:
    """Shared kernel per (alpha, x, y), so sweeps over mu reuse the memo tables."""
    return JackKernel(alpha, x, y)


def jack_C(lam: Partition, alpha: AlphaLike, x: VectorLike) -> float:
    """
    C_lambda^alpha(x).

    Raises:
        DomainError: if lambda has more parts than x has coordinates.
    """
    return JackEvaluator(alpha, x).C(lam)


def jack_C_ones(lam: Partition, alpha: AlphaLike, N: int) -> float:
    """C_lambda^alpha(1, ..., 1) with N ones, through the same evaluator as jack_C."""
    if N < 1:
        raise DomainError(f"N must be positive, got {N}")
    return _ones_evaluator(as_alpha(alpha), N).C(lam)


def jack_ratio_product(lam: Partition, alpha: AlphaLike, x: VectorLike, y: VectorLike) -> float:
    """C_lambda(x) C_lambda(y) / C_lambda(1)."""
    return kernel_for(as_alpha(alpha), as_vector(x), as_vector(y)).ratio(lam)


def jack_C_ones_closed_form(lam: Partition, alpha: AlphaLike, N: int) -> float:
    """
    Product formula alpha^k k! / j_lambda * prod_{(i,j)} (N - i + 1 + alpha (j - 1)).

    Only used to cross-check jack_C_ones.
    """
    alpha = as_alpha(alpha)
    _check_fits(lam, N)
    parts = lam.parts
    lam_c = _conjugate(parts)
    value = 1.0
    s = 0
    for i, j in lam.boxes():
        s += 1
        value *= alpha * s * (N - i + 1 + alpha * (j - 1))
        value /= _upper_hook(parts, lam_c, i, j, alpha) * _lower_hook(parts, lam_c, i, j, alpha)
    return value
