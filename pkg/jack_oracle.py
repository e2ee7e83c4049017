"""
Exact-rational Jack polynomials for auditing the floating-point evaluator.

The monomial expansion of C_lambda^alpha is obtained without the branching
rule used by jack.py. The symmetric polynomials of weight k are eigenfunctions
of the operator

    D = (alpha/2) sum_i x_i^2 d_i^2 + sum_{i<j} (x_i^2 d_i - x_j^2 d_j) / (x_i - x_j),

which is triangular on monomial symmetric functions m_nu in dominance order.
The eigenvector with leading term m_lambda is solved by back substitution, and
the normalization constants are then fixed by requiring that the weight-k
polynomials sum to p_1^k = (x_1 + ... + x_N)^k.

Everything here is Fraction arithmetic; it is meant for weights up to about 8
and a handful of variables.
"""

import json
import logging
import math
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from numbers import Rational
from typing import Dict, List, Sequence, Tuple, Union

from errors import DomainError
from partitions import Partition, dominates, enumerate_partitions

logger = logging.getLogger(__name__)

Exponents = Tuple[int, ...]
Polynomial = Dict[Exponents, Fraction]

RationalLike = Union[Fraction, int, float, str]

ORACLE_WARN_N = 6


def as_fraction(value: RationalLike) -> Fraction:
    """
    Convert to a Fraction.

    Integers, Fractions and strings such as '1/3' are exact; floats are
    rounded to the nearest fraction with denominator at most 10^6, so 0.5 and
    1/3 both become the intended rationals.
    """
    if isinstance(value, (Rational, str)):
        return Fraction(value)
    return Fraction(value).limit_denominator(1_000_000)


def _monomials(nu: Partition, n: int) -> List[Exponents]:
    """Distinct exponent vectors of m_nu in n variables."""
    return sorted(set(permutations(nu.padded(n))), reverse=True)


def _apply_operator(poly: Polynomial, alpha: Fraction, n: int) -> Polynomial:
    """D applied to a symmetric polynomial."""
    out: Polynomial = {}

    def add(e: Exponents, c: Fraction) -> None:
        total = out.get(e, 0) + c
        if total:
            out[e] = total
        else:
            out.pop(e, None)

    for e, c in poly.items():
        diag = alpha / 2 * sum(p * (p - 1) for p in e)
        if diag:
            add(e, c * diag)

    for i in range(n):
        for j in range(i + 1, n):
            # numerator (x_i^2 d_i - x_j^2 d_j) P, antisymmetric in (i, j)
            numerator: Polynomial = {}
            for e, c in poly.items():
                if e[i]:
                    f = list(e)
                    f[i] += 1
                    numerator[tuple(f)] = numerator.get(tuple(f), 0) + c * e[i]
                if e[j]:
                    f = list(e)
                    f[j] += 1
                    numerator[tuple(f)] = numerator.get(tuple(f), 0) - c * e[j]
            # exact division by x_i - x_j, pairing each monomial with its swap
            for f, c in numerator.items():
                p, q = f[i], f[j]
                if p <= q or not c:
                    continue
                for s in range(p - q):
                    g = list(f)
                    g[i] = p - 1 - s
                    g[j] = q + s
                    add(tuple(g), c)
    return out


def _multinomial(nu: Partition) -> int:
    """Coefficient of m_nu in p_1^k."""
    value = math.factorial(nu.weight)
    for p in nu.parts:
        value //= math.factorial(p)
    return value


@lru_cache(maxsize=64)
def _expansions(k: int, n: int, alpha: Fraction) -> Dict[Partition, Dict[Partition, Fraction]]:
    """
    C-normalized expansions of every weight-k Jack polynomial in n variables.

    Returns:
        Map lambda -> {nu: coefficient of m_nu}, nu ranging over partitions
        dominated by lambda with at most n parts.
    """
    basis = enumerate_partitions(k, n)
    operator_columns: Dict[Partition, Polynomial] = {}
    for nu in basis:
        m_nu = {e: Fraction(1) for e in _monomials(nu, n)}
        operator_columns[nu] = _apply_operator(m_nu, alpha, n)

    def d(kappa: Partition, nu: Partition) -> Fraction:
        return operator_columns[nu].get(kappa.padded(n), Fraction(0))

    monic: Dict[Partition, Dict[Partition, Fraction]] = {}
    for lam in basis:
        eigenvalue = d(lam, lam)
        coeffs = {lam: Fraction(1)}
        for kappa in basis:
            if kappa == lam or not dominates(lam, kappa):
                continue
            gap = eigenvalue - d(kappa, kappa)
            if gap == 0:
                raise ArithmeticError(f"degenerate eigenvalue for {lam} at {kappa}, alpha={alpha}")
            rhs = sum((u * d(kappa, nu) for nu, u in coeffs.items()), Fraction(0))
            if rhs:
                coeffs[kappa] = rhs / gap
        monic[lam] = coeffs

    expansions: Dict[Partition, Dict[Partition, Fraction]] = {}
    for nu in basis:
        already = sum(
            (expansions[lam].get(nu, Fraction(0)) for lam in expansions),
            Fraction(0),
        )
        scale = _multinomial(nu) - already
        expansions[nu] = {kappa: scale * u for kappa, u in monic[nu].items()}
    return expansions


def monomial_expansion(lam: Partition, alpha: RationalLike, n: int) -> Dict[Partition, Fraction]:
    """
    Coefficients of C_lambda^alpha on the monomial symmetric functions m_nu
    in n variables.

    Raises:
        DomainError: if lambda has more than n parts or alpha <= 0.
    """
    a = as_fraction(alpha)
    if a <= 0:
        raise DomainError(f"Jack parameter must be positive, got {alpha!r}")
    if n < 1 or lam.length > n:
        raise DomainError(f"partition {lam} does not fit in {n} variables")
    if n > ORACLE_WARN_N:
        logger.warning(f"Exact Jack oracle at N={n}; expect long runtimes")
    return dict(_expansions(lam.weight, n, a)[lam])


def exact_jack_C(lam: Partition, alpha: RationalLike, x: Sequence[RationalLike]) -> Fraction:
    """C_lambda^alpha(x) as an exact rational."""
    xs = [Fraction(v) for v in x]
    n = len(xs)
    total = Fraction(0)
    for nu, coeff in monomial_expansion(lam, alpha, n).items():
        m_value = Fraction(0)
        for e in _monomials(nu, n):
            term = Fraction(1)
            for v, p in zip(xs, e):
                if p:
                    term *= v ** p
            m_value += term
        total += coeff * m_value
    return total


def expansion_json(lam: Partition, alpha: RationalLike, n: int) -> str:
    """Monomial expansion as a JSON array of {exponents, numerator, denominator}."""
    entries = []
    for nu, coeff in sorted(monomial_expansion(lam, alpha, n).items(), key=lambda kv: kv[0].parts, reverse=True):
        for e in _monomials(nu, n):
            entries.append({
                "exponents": list(e),
                "numerator": coeff.numerator,
                "denominator": coeff.denominator,
            })
    return json.dumps(entries, separators=(",", ":"))
