"""
Generalized Pochhammer symbols and truncated Jack hypergeometric series.

All series are summed weight by weight: every partition of weight m, in the
enumeration order of partitions.py, before weight m + 1. After each weight a
tail bound for the dropped weights is compared against the SeriesPolicy.

Tail bounds rest on two facts:

* |C_lambda(x)| <= C_lambda(|x|) (nonnegative monomial coefficients), and the
  weight-m kernel sum at nonnegative arguments u, v is at most
  (|u|_1 |v|_1)^m. So the weight-m block of a 0F0 series is bounded by
  s^m / m! with s the product of the l1 norms of the arguments.
* mu^|lambda| / (mu)_lambda <= 2^{N(N-1)(k2+1)/2} with k2 = 1/alpha, whenever
  mu > 0 and mu >= 2(N-1) k2. Outside that regime no bound is known and the
  tail falls back to a term-ratio estimate (SeriesResult.rigorous = False).
"""

import logging
import math
import sys
from fractions import Fraction
from functools import partial
from typing import Callable, Optional, Tuple, Union

from errors import DomainError, VanishingPochhammerError
from jack import AlphaLike, EvalVector, JackEvaluator, VectorLike, as_alpha, as_vector, kernel_for
from models import SeriesPolicy, SeriesResult
from partitions import Partition, enumerate_partitions
from summation import CompensatedSum, tail_bound_0F0, tail_sum

logger = logging.getLogger(__name__)

# factors this close to zero, relative to the terms they are built from, count as zero
VANISHING_RTOL = 4 * sys.float_info.epsilon

Number = Union[float, int, Fraction]

__all__ = [
    "gen_pochhammer",
    "pochhammer_ratio",
    "pochhammer_ratio_minus_one",
    "ratio_bound_exponent",
    "ratio_bound",
    "lemma32_bound",
    "in_ratio_bound_regime",
    "HypergeometricSeries",
    "hyper_0F0",
    "hyper_0F1",
    "hyper_0F1_one_arg",
    "hyper_0F1_muscaled",
    "hyper_0F1_muscaled_minus_0F0",
    "tail_bound_0F0",
]


def _alpha_value(alpha) -> Number:
    """Jack index as a number; Fractions are kept exact."""
    if isinstance(alpha, Fraction):
        if alpha <= 0:
            raise DomainError(f"Jack parameter must be positive, got {alpha}")
        return alpha
    return as_alpha(alpha)


def gen_pochhammer(mu: Number, lam: Partition, alpha) -> Number:
    """
    (mu)_lambda^alpha = prod_j (mu - (j-1)/alpha)_{lambda_j}.

    Works with floats or Fractions; the empty partition gives 1. A zero
    result is returned as is, callers that divide by it must check.
    """
    a = _alpha_value(alpha)
    value = 1
    for j, part in enumerate(lam.parts, start=1):
        base = mu - (j - 1) / a
        for i in range(part):
            value *= base + i
    return value


def _check_nonvanishing(mu: Number, lam: Partition, alpha: Number) -> None:
    """
    Raise when a factor mu - (j-1)/alpha + i of (mu)_lambda is zero, or, in
    floating point, zero up to rounding of max(|mu|, (j-1)/alpha, i).
    """
    for j, part in enumerate(lam.parts, start=1):
        shift = (j - 1) / alpha
        for i in range(part):
            factor = mu - shift + i
            if isinstance(factor, Fraction):
                vanishes = factor == 0
            else:
                vanishes = abs(factor) <= VANISHING_RTOL * max(abs(mu), shift, i)
            if vanishes:
                raise VanishingPochhammerError(lam, mu, alpha)


def pochhammer_ratio(mu: float, lam: Partition, alpha: AlphaLike) -> float:
    """
    mu^|lambda| / (mu)_lambda as a product of per-box ratios, so it neither
    overflows nor underflows for large mu.

    Raises:
        VanishingPochhammerError: if a factor of (mu)_lambda is zero.
    """
    a = as_alpha(alpha)
    _check_nonvanishing(mu, lam, a)
    value = 1.0
    for j, part in enumerate(lam.parts, start=1):
        base = mu - (j - 1) / a
        for i in range(part):
            value *= mu / (base + i)
    return value


def pochhammer_ratio_minus_one(mu: float, lam: Partition, alpha: AlphaLike) -> float:
    """
    mu^|lambda| / (mu)_lambda - 1 without cancellation.

    Each factor is mu / (mu + delta) with delta = i - (j-1)/alpha, so the
    product is exp(-sum log1p(delta/mu)) and the difference is an expm1.
    """
    a = as_alpha(alpha)
    _check_nonvanishing(mu, lam, a)
    if mu <= 0:
        return pochhammer_ratio(mu, lam, a) - 1.0
    log_sum = 0.0
    for j, part in enumerate(lam.parts, start=1):
        shift = (j - 1) / a
        for i in range(part):
            delta = i - shift
            if delta / mu <= -1.0:
                return pochhammer_ratio(mu, lam, a) - 1.0
            log_sum += math.log1p(delta / mu)
    return math.expm1(-log_sum)


def ratio_bound_exponent(N: int, k2: float) -> float:
    """N(N-1)(k2+1)/2."""
    return N * (N - 1) * (k2 + 1) / 2


def ratio_bound(N: int, k2: float) -> float:
    """2^{N(N-1)(k2+1)/2}, the bound on mu^|lambda| / (mu)_lambda."""
    return 2.0 ** ratio_bound_exponent(N, k2)


def lemma32_bound(N: int, k1: float, k2: float, weight: int) -> float:
    """(1/3) 2^{N(N-1)(k2+1)/2} (1 + k2(N-1)) |lambda|^2 / k1."""
    if k1 <= 0:
        return math.inf
    return ratio_bound(N, k2) * (1 + k2 * (N - 1)) * weight * weight / (3.0 * k1)


def in_ratio_bound_regime(alpha: float, mu: float, N: int) -> bool:
    """True when mu^|lambda|/(mu)_lambda <= 2^{N(N-1)(1/alpha+1)/2} holds for every lambda."""
    return mu > 0 and mu >= 2 * (N - 1) / alpha


TermFn = Callable[[Partition], float]
TailFn = Callable[[int], float]


class HypergeometricSeries:
    """
    Weight-major summation driver shared by every series in this module.
    """

    def __init__(self, name: str, N: int, policy: Optional[SeriesPolicy] = None):
        """
        Args:
            name: Label used in log messages.
            N: Number of variables; partitions have at most N parts.
            policy: Truncation controls, SeriesPolicy() when omitted.
        """
        self.name = name
        self.N = N
        self.policy = policy or SeriesPolicy()

    def run(self, term: TermFn, tail: Optional[TailFn] = None) -> SeriesResult:
        """
        Sum term(lambda) over all partitions until the tail is acceptable.

        Args:
            term: The full series term for one partition, including 1/|lambda|!.
            tail: Rigorous bound for the weights above m, given m. When None
                the tail is estimated from the decay of the last two weight
                blocks and the result is marked non-rigorous.

        Returns:
            SeriesResult with the compensated partial sum.
        """
        acc = CompensatedSum()
        prev_block = math.nan
        tail_bound = math.inf
        converged = False
        m = 0
        for m in range(self.policy.max_weight + 1):
            block = CompensatedSum()
            for lam in enumerate_partitions(m, self.N):
                t = term(lam)
                acc.add(t)
                block.add(t)
            if tail is not None:
                tail_bound = tail(m)
            else:
                tail_bound = _estimated_tail(prev_block, block.abs_total)
            prev_block = block.abs_total
            if self.policy.accepts(tail_bound, acc.value):
                converged = True
                break

        value = acc.value
        logger.debug(
            f"{self.name}: N={self.N} weights={m} value={value:.17g} tail={tail_bound:.3g} "
            f"converged={converged} rigorous={tail is not None}"
        )
        if not converged:
            logger.warning(
                f"{self.name} did not converge within max_weight={self.policy.max_weight} "
                f"(tail {tail_bound:.3g}, value {value:.6g})"
            )
        return SeriesResult(
            value=value,
            tail_bound=tail_bound,
            weights_summed=m,
            converged=converged,
            rigorous=tail is not None,
        )


def _estimated_tail(prev_abs: float, last_abs: float) -> float:
    """Geometric extrapolation from the absolute sizes of the last two weight blocks."""
    if last_abs == 0.0:
        return 0.0 if prev_abs == 0.0 else (prev_abs if math.isfinite(prev_abs) else math.inf)
    if math.isnan(prev_abs) or prev_abs == 0.0:
        return math.inf
    r = last_abs / prev_abs
    if r >= 1.0:
        return math.inf
    return last_abs * r / (1.0 - r)


def _inverse_factorials(max_weight: int) -> Tuple[float, ...]:
    return tuple(1 / math.factorial(m) for m in range(max_weight + 1))


def _pair(x: VectorLike, y: VectorLike) -> Tuple[EvalVector, EvalVector]:
    x = as_vector(x)
    y = as_vector(y)
    if x.N != y.N:
        raise DomainError(f"dimension mismatch: x has {x.N} coordinates, y has {y.N}")
    return x, y


def _scaled_0F0_tail(factor: float, s: float) -> TailFn:
    return lambda m: factor * tail_bound_0F0(s, m)


def hyper_0F0(alpha: AlphaLike, x: VectorLike, y: VectorLike,
              policy: Optional[SeriesPolicy] = None) -> SeriesResult:
    """
    0F0^alpha(x, y) = sum_lambda C_lambda(x) C_lambda(y) / (C_lambda(1) |lambda|!).

    The tail bound is rigorous for all real x, y.
    """
    a = as_alpha(alpha)
    x, y = _pair(x, y)
    policy = policy or SeriesPolicy()
    kernel = kernel_for(a, x, y)
    inv_fact = _inverse_factorials(policy.max_weight)
    s = x.abs_sum() * y.abs_sum()

    def term(lam: Partition) -> float:
        return kernel.ratio(lam) * inv_fact[lam.weight]

    return HypergeometricSeries("0F0", x.N, policy).run(term, lambda m: tail_bound_0F0(s, m))


def hyper_0F1(alpha: AlphaLike, mu: float, x: VectorLike, y: VectorLike,
              policy: Optional[SeriesPolicy] = None) -> SeriesResult:
    """
    0F1^alpha(mu; x, y) = sum_lambda C_lambda(x) C_lambda(y) / (C_lambda(1) (mu)_lambda |lambda|!).

    Raises:
        VanishingPochhammerError: when (mu)_lambda = 0 for a summed lambda.
    """
    a = as_alpha(alpha)
    x, y = _pair(x, y)
    policy = policy or SeriesPolicy()
    kernel = kernel_for(a, x, y)
    inv_fact = _inverse_factorials(policy.max_weight)

    def term(lam: Partition) -> float:
        _check_nonvanishing(mu, lam, a)
        poch = gen_pochhammer(mu, lam, a)
        r = kernel.ratio(lam)
        return 0.0 if r == 0.0 else r / poch * inv_fact[lam.weight]

    tail = None
    if in_ratio_bound_regime(a, mu, x.N):
        s = x.abs_sum() * y.abs_sum() / mu
        bound = ratio_bound(x.N, 1.0 / a)
        tail = _scaled_0F0_tail(bound, s)
    return HypergeometricSeries("0F1", x.N, policy).run(term, tail)


def hyper_0F1_one_arg(alpha: AlphaLike, mu: float, x: VectorLike,
                      policy: Optional[SeriesPolicy] = None) -> SeriesResult:
    """
    sum_lambda (-1)^|lambda| C_lambda(x) / ((mu)_lambda |lambda|!), the
    one-argument cone series; equals 0F1(mu; -x, 1).
    """
    a = as_alpha(alpha)
    x = as_vector(x)
    policy = policy or SeriesPolicy()
    evaluator = JackEvaluator(a, x)
    inv_fact = _inverse_factorials(policy.max_weight)

    def term(lam: Partition) -> float:
        _check_nonvanishing(mu, lam, a)
        poch = gen_pochhammer(mu, lam, a)
        sign = -1.0 if lam.weight % 2 else 1.0
        c = evaluator.C(lam)
        return 0.0 if c == 0.0 else sign * c / poch * inv_fact[lam.weight]

    tail = None
    if in_ratio_bound_regime(a, mu, x.N):
        # the weight-m sum of C_lambda(|x|) is exactly |x|_1^m
        s = x.abs_sum() / mu
        bound = ratio_bound(x.N, 1.0 / a)
        tail = _scaled_0F0_tail(bound, s)
    return HypergeometricSeries("0F1_one_arg", x.N, policy).run(term, tail)


def hyper_0F1_muscaled(alpha: AlphaLike, mu: float, a: VectorLike, b: VectorLike,
                       policy: Optional[SeriesPolicy] = None) -> SeriesResult:
    """
    sum_lambda (-1)^|lambda| (mu^|lambda| / (mu)_lambda) C(a) C(b) / (C(1) |lambda|!).

    With a = x^2 and b = y^2 this is 0F1(mu; 2 mu x^2, -y^2/2), written so that
    no term overflows as mu grows.
    """
    alpha = as_alpha(alpha)
    a, b = _pair(a, b)
    policy = policy or SeriesPolicy()
    kernel = kernel_for(alpha, a, b)
    inv_fact = _inverse_factorials(policy.max_weight)

    def term(lam: Partition) -> float:
        coeff = pochhammer_ratio(mu, lam, alpha)
        r = kernel.ratio(lam)
        if r == 0.0:
            return 0.0
        sign = -1.0 if lam.weight % 2 else 1.0
        return sign * coeff * r * inv_fact[lam.weight]

    tail = None
    if in_ratio_bound_regime(alpha, mu, a.N):
        s = a.abs_sum() * b.abs_sum()
        bound = ratio_bound(a.N, 1.0 / alpha)
        tail = _scaled_0F0_tail(bound, s)
    return HypergeometricSeries("0F1_muscaled", a.N, policy).run(term, tail)


def hyper_0F1_muscaled_minus_0F0(alpha: AlphaLike, mu: float, a: VectorLike, b: VectorLike,
                                 policy: Optional[SeriesPolicy] = None) -> SeriesResult:
    """
    sum_lambda (-1)^|lambda| (mu^|lambda| / (mu)_lambda - 1) C(a) C(b) / (C(1) |lambda|!),

    the difference hyper_0F1_muscaled - 0F0(-a, b) as a single series. Weights
    0 and 1 vanish identically, so nothing cancels for large mu.

    The tail coefficient is min(2^E, lemma32_bound) when the induced
    k1 = mu - (N-1)/alpha - 1/2 satisfies k1 >= (N-1)/alpha and k1 > 0, and
    2^E alone in the wider ratio-bound regime.
    """
    alpha = as_alpha(alpha)
    a, b = _pair(a, b)
    policy = policy or SeriesPolicy()
    N = a.N
    kernel = kernel_for(alpha, a, b)
    inv_fact = _inverse_factorials(policy.max_weight)

    def term(lam: Partition) -> float:
        if lam.weight < 2:
            return 0.0
        r = kernel.ratio(lam)
        if r == 0.0:
            return 0.0
        coeff = pochhammer_ratio_minus_one(mu, lam, alpha)
        sign = -1.0 if lam.weight % 2 else 1.0
        return sign * coeff * r * inv_fact[lam.weight]

    tail = None
    if in_ratio_bound_regime(alpha, mu, N):
        k2 = 1.0 / alpha
        k1 = mu - (N - 1) * k2 - 0.5
        s = a.abs_sum() * b.abs_sum()
        cap = ratio_bound(N, k2)
        if k1 > 0 and k1 >= k2 * (N - 1):
            def coeff(m: int) -> float:
                return min(cap, lemma32_bound(N, k1, k2, m))
        else:
            def coeff(m: int) -> float:
                return cap
        tail = partial(tail_sum, s, coeff=coeff)
    return HypergeometricSeries("0F1_muscaled_minus_0F0", N, policy).run(term, tail)
