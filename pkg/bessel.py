"""
Bessel functions: the one-dimensional j_alpha, the Dunkl-type Bessel functions
of type A and B, the Bessel function on the matrix cones, and the
Harish-Chandra alternating sum used as a closed-form oracle at alpha = 1.

Every function of an imaginary second argument iy is exposed as a real
function of real (x, y); (iy)^2 = -y^2 keeps every series real.
"""

import logging
import math
from itertools import permutations
from typing import Optional, Sequence, Tuple

import mpmath

from errors import DomainError, SingularOracleError
from hypergeo import (
    hyper_0F0,
    hyper_0F1,
    hyper_0F1_muscaled_minus_0F0,
    hyper_0F1_one_arg,
)
from jack import EvalVector, VectorLike, as_vector
from models import MultiplicityB, SeriesPolicy, SeriesResult
from summation import CompensatedSum

logger = logging.getLogger(__name__)

DIRECT_SERIES_MAX_ARG = 30.0
MAX_AMPLIFICATION = 1e3
CONE_DIMENSIONS = (1, 2, 4)
HC_DISTINCT_RTOL = 1e-9

_SERIES_CUTOFF = 2.0 ** -60
_SERIES_MAX_TERMS = 20_000


def _check_order(alpha: float) -> None:
    if not math.isfinite(alpha) or alpha <= -1:
        raise DomainError(f"Bessel order must be > -1, got {alpha}")


def _series_0F1(b: float, z: float) -> Tuple[float, float]:
    """
    Direct sum of 0F1(b; z) = sum_n z^n / ((b)_n n!).

    Returns:
        (value, sum of absolute values of the terms).
    """
    acc = CompensatedSum()
    term = 1.0
    n = 0
    while n < _SERIES_MAX_TERMS:
        acc.add(term)
        decreasing = (n + 1) * (b + n) > abs(z)
        if decreasing and abs(term) <= _SERIES_CUTOFF * acc.abs_total:
            break
        term *= z / ((b + n) * (n + 1))
        n += 1
        if not math.isfinite(term):
            return math.nan, math.inf
    return acc.value, acc.abs_total


def _mpmath_0F1(b: float, z: float, dps: int) -> float:
    with mpmath.workdps(dps):
        return float(mpmath.hyp0f1(b, z))


def bessel_j(alpha: float, t: float) -> float:
    """
    Normalized Bessel function j_alpha(t) = 0F1(alpha + 1; -t^2/4).

    Summed directly for |t| <= 30 when the alternating series loses at most
    three digits; otherwise mpmath.hyp0f1 at a working precision raised by the
    number of digits the series would cancel.

    Args:
        alpha: Order, > -1.
        t: Real argument.

    Returns:
        j_alpha(t); 1.0 at t = 0.
    """
    _check_order(alpha)
    if t == 0:
        return 1.0
    z = -t * t / 4.0
    value, abs_total = _series_0F1(alpha + 1.0, z)
    if math.isfinite(value) and value != 0.0:
        amplification = abs_total / abs(value)
    else:
        amplification = math.inf
    if abs(t) <= DIRECT_SERIES_MAX_ARG and amplification <= MAX_AMPLIFICATION:
        return value

    if math.isfinite(amplification):
        lost = math.log10(max(amplification, 1.0))
    else:
        lost = abs(t) * math.log10(math.e)
    dps = 30 + math.ceil(lost)
    logger.debug(f"bessel_j({alpha:g}, {t:g}): mpmath fallback at {dps} digits")
    return _mpmath_0F1(alpha + 1.0, z, dps)


def bessel_j_imag(alpha: float, t: float) -> float:
    """
    j_alpha(i t) = 0F1(alpha + 1; t^2/4), a series of positive terms; >= 1 for
    real t.
    """
    _check_order(alpha)
    if t == 0:
        return 1.0
    z = t * t / 4.0
    value, _ = _series_0F1(alpha + 1.0, z)
    if math.isfinite(value):
        return value
    logger.debug(f"bessel_j_imag({alpha:g}, {t:g}): mpmath fallback")
    return _mpmath_0F1(alpha + 1.0, z, 30)


def _exact(value: float) -> SeriesResult:
    return SeriesResult(value=value, tail_bound=0.0, weights_summed=0, converged=True)


def _pair(x: VectorLike, y: VectorLike, N: Optional[int] = None) -> Tuple[EvalVector, EvalVector]:
    x = as_vector(x)
    y = as_vector(y)
    if x.N != y.N:
        raise DomainError(f"dimension mismatch: x has {x.N} coordinates, y has {y.N}")
    if N is not None and x.N != N:
        raise DomainError(f"multiplicity is for N={N} but the arguments have {x.N} coordinates")
    return x, y


def symmetrized_exponential(x: Sequence[float], y: Sequence[float]) -> float:
    """(1/N!) sum_{w in S_N} exp(<w x, y>)."""
    terms = [
        math.exp(math.fsum(xi * yi for xi, yi in zip(wx, y)))
        for wx in permutations(x)
    ]
    return math.fsum(terms) / math.factorial(len(x))


def symmetrized_product(k1: float, x: Sequence[float], y: Sequence[float], imag: bool = True) -> float:
    """
    (1/N!) sum_{w in S_N} prod_l j_{k1-1/2}(x_{w(l)} y_l), with j evaluated at
    i * (x_{w(l)} y_l) when imag is False (real second argument).
    """
    order = k1 - 0.5
    j = bessel_j if imag else bessel_j_imag
    cache = {}

    def factor(a: float, b: float) -> float:
        key = a * b
        if key not in cache:
            cache[key] = j(order, key)
        return cache[key]

    terms = []
    for wx in permutations(x):
        value = 1.0
        for a, b in zip(wx, y):
            value *= factor(a, b)
        terms.append(value)
    return math.fsum(terms) / math.factorial(len(x))


def besselA(k2: float, x: VectorLike, y: VectorLike,
            policy: Optional[SeriesPolicy] = None) -> SeriesResult:
    """
    Type-A Bessel function J_k^A(x, y) = 0F0^{1/k}(x, y).

    k2 = 0 is the symmetrized exponential, exact with tail_bound 0.
    """
    if k2 < 0:
        raise DomainError(f"multiplicity must be nonnegative, got k2={k2}")
    x, y = _pair(x, y)
    if k2 == 0:
        return _exact(symmetrized_exponential(x.coords, y.coords))
    return hyper_0F0(1.0 / k2, x, y, policy)


def besselB(mult: MultiplicityB, x: VectorLike, y: VectorLike,
            policy: Optional[SeriesPolicy] = None) -> SeriesResult:
    """
    Type-B Bessel function at a real second argument,
    J_k^B(x, y) = 0F1^{1/k2}(mu; x^2/2, y^2/2).
    """
    x, y = _pair(x, y, mult.N)
    if mult.k2 == 0:
        return _exact(symmetrized_product(mult.k1, x.coords, y.coords, imag=False))
    return hyper_0F1(mult.alpha, mult.mu, x.squared().scaled(0.5), y.squared().scaled(0.5), policy)


def besselB_at_imag(mult: MultiplicityB, x: VectorLike, y: VectorLike,
                    policy: Optional[SeriesPolicy] = None) -> SeriesResult:
    """
    J_k^B(x, iy) = 0F1^{1/k2}(mu; x^2/2, -y^2/2) as a real number.

    For k2 = 0 the product formula (1/N!) sum_w prod_l j_{k1-1/2}(x_{w(l)} y_l)
    is used, exact up to the one-dimensional evaluations.

    Raises:
        DomainError: if the arguments do not have mult.N coordinates.
        VanishingPochhammerError: if (mu)_lambda vanishes.
    """
    x, y = _pair(x, y, mult.N)
    if mult.k2 == 0:
        return _exact(symmetrized_product(mult.k1, x.coords, y.coords, imag=True))
    return hyper_0F1(mult.alpha, mult.mu, x.squared().scaled(0.5), y.squared().scaled(-0.5), policy)


def besselB_scaled_diff(mult: MultiplicityB, x: VectorLike, y: VectorLike,
                        policy: Optional[SeriesPolicy] = None) -> SeriesResult:
    """
    J_B(2 sqrt(mu) x, iy) - J_A(-x^2, y^2) summed as one series.

    Only weights >= 2 contribute; the coefficients mu^|lambda|/(mu)_lambda - 1
    are O(1/mu), so the difference keeps full relative accuracy for large mu.
    """
    if mult.k2 <= 0:
        raise DomainError("the single-series difference needs k2 > 0; use the closed forms for k2 = 0")
    x, y = _pair(x, y, mult.N)
    return hyper_0F1_muscaled_minus_0F0(mult.alpha, mult.mu, x.squared(), y.squared(), policy)


def _check_cone_dimension(d: int) -> None:
    if d not in CONE_DIMENSIONS:
        raise DomainError(f"cone dimension must be one of {CONE_DIMENSIONS}, got {d}")


def cone_bessel(mu: float, d: int, eigenvalues: VectorLike,
                policy: Optional[SeriesPolicy] = None) -> SeriesResult:
    """
    Bessel function J_mu(X) on the cone of positive semidefinite matrices over
    R, C or H (d = 1, 2, 4), as a function of the eigenvalues of X.
    """
    _check_cone_dimension(d)
    return hyper_0F1_one_arg(2.0 / d, mu, eigenvalues, policy)


def k_from_cone(mu: float, d: int, N: int) -> MultiplicityB:
    """
    The type-B multiplicity (mu - (d(N-1)+1)/2, d/2) attached to a cone index.

    Raises:
        DomainError: if the resulting k1 is negative.
    """
    _check_cone_dimension(d)
    k1 = mu - (d * (N - 1) + 1) / 2
    if k1 < 0:
        raise DomainError(f"k1 = {k1} < 0 for mu={mu}, d={d}, N={N}")
    return MultiplicityB(k1=k1, k2=d / 2, N=N)


def cone_bessel_via_typeB(mu: float, d: int, x: VectorLike, y: VectorLike,
                          policy: Optional[SeriesPolicy] = None) -> SeriesResult:
    """
    The U_N-mean of J_mu(y U x^2 U^* y / 4), through its identification with
    J_B^{k(mu,d)}(x, iy).
    """
    x, y = _pair(x, y)
    mult = k_from_cone(mu, d, x.N)
    if not math.isclose(mult.mu, mu, rel_tol=1e-12, abs_tol=1e-12):
        raise DomainError(f"induced mu={mult.mu} differs from the cone index {mu}")
    return besselB_at_imag(mult, x, y, policy)


def _sign(perm: Tuple[int, ...]) -> int:
    inversions = sum(
        1 for i in range(len(perm)) for j in range(i + 1, len(perm)) if perm[i] > perm[j]
    )
    return -1 if inversions % 2 else 1


def _check_distinct(which: str, values: Sequence[float]) -> None:
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            scale = max(abs(values[i]), abs(values[j]))
            if abs(values[i] - values[j]) <= HC_DISTINCT_RTOL * scale:
                raise SingularOracleError(which, i, j, tuple(values))


def harish_chandra_0F0(x: VectorLike, y: VectorLike) -> float:
    """
    0F0^1(-x^2, y^2) in closed form,

        (-1)^{N(N-1)/2} prod_{j<N} j! / (pi(x^2) pi(y^2)) * sum_w sgn(w) exp(-<x^2, w y^2>),

    with pi(a) = prod_{i<j} (a_i - a_j). Squared coordinates are sorted
    decreasingly, the exponentials are shifted by their maximum and the
    Vandermonde products are taken in log space.

    Raises:
        SingularOracleError: if two squared coordinates of x (or of y) agree
            to 1e-9 relative.
    """
    x, y = _pair(x, y)
    N = x.N
    a = sorted(x.squared().coords, reverse=True)
    b = sorted(y.squared().coords, reverse=True)
    _check_distinct("x", a)
    _check_distinct("y", b)
    if N == 1:
        return math.exp(-a[0] * b[0])

    exponents = []
    signs = []
    for perm in permutations(range(N)):
        exponents.append(-math.fsum(a[i] * b[perm[i]] for i in range(N)))
        signs.append(_sign(perm))
    shift = max(exponents)
    alternating = math.fsum(s * math.exp(e - shift) for s, e in zip(signs, exponents))

    log_scale = sum(math.lgamma(j + 1) for j in range(1, N))
    for i in range(N):
        for j in range(i + 1, N):
            log_scale -= math.log(a[i] - a[j]) + math.log(b[i] - b[j])
    orientation = -1.0 if (N * (N - 1) // 2) % 2 else 1.0
    return orientation * alternating * math.exp(log_scale + shift)
