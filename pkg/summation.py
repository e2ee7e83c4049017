"""
Compensated accumulation and exponential-type tail sums.
"""

import math
from typing import Callable, Optional

from errors import DomainError

# stop summing a tail once a term is this small relative to the running total
_TAIL_RELATIVE_CUTOFF = 2.0 ** -60
_TAIL_MAX_TERMS = 100_000


class CompensatedSum:
    """
    Running sum with Neumaier's error-free correction.

    Keeps the rounding error of each addition in a separate carry, so long
    alternating series lose far less than a plain += loop. Also tracks the sum
    of absolute values, which callers use to judge cancellation.
    """

    __slots__ = ("_sum", "_carry", "abs_total", "count")

    def __init__(self):
        self._sum = 0.0
        self._carry = 0.0
        self.abs_total = 0.0
        self.count = 0

    def add(self, value: float) -> None:
        total = self._sum + value
        if abs(self._sum) >= abs(value):
            self._carry += (self._sum - total) + value
        else:
            self._carry += (value - total) + self._sum
        self._sum = total
        self.abs_total += abs(value)
        self.count += 1

    def __iadd__(self, value: float) -> "CompensatedSum":
        self.add(value)
        return self

    @property
    def value(self) -> float:
        return self._sum + self._carry


def tail_sum(s: float, M: int, coeff: Optional[Callable[[int], float]] = None) -> float:
    """
    Upper bound for sum_{m > M} c_m s^m / m!.

    Terms are summed forward from m = M + 1 in log space. Once the ratio of
    consecutive terms is at most 1/2 and the current term is negligible, the
    remainder is closed with the geometric bound term * q / (1 - q). The
    coefficients c_m must be nonnegative with c_{m+1}/c_m <= ((m+1)/m)^2,
    which covers constants, m^2 and minima of the two.

    Args:
        s: Nonnegative base.
        M: Last weight already summed, M >= 0.
        coeff: Coefficient function c_m; constant 1 when omitted.

    Returns:
        The bound, or inf if a term overflows.
    """
    if s < 0 or not math.isfinite(s):
        raise DomainError(f"tail base must be finite and nonnegative, got {s}")
    if M < 0:
        raise DomainError(f"truncation weight must be nonnegative, got {M}")
    if s == 0.0:
        return 0.0

    log_s = math.log(s)
    total = 0.0
    m = M + 1
    for _ in range(_TAIL_MAX_TERMS):
        log_term = m * log_s - math.lgamma(m + 1)
        if log_term > 709.0:
            return math.inf
        c = 1.0 if coeff is None else coeff(m)
        term = c * math.exp(log_term)
        total += term
        q = ((m + 1) / m) ** 2 * s / (m + 1)
        if q <= 0.5 and term <= _TAIL_RELATIVE_CUTOFF * total:
            return total + term * q / (1.0 - q)
        m += 1
    return math.inf


def tail_bound_0F0(norm_product: float, M: int) -> float:
    """
    sum_{m > M} norm_product^m / m!.

    This is the weight-wise bound of every C_lambda(x) C_lambda(y) / C_lambda(1)
    block summed against 1/m!, with norm_product the product of the l1 norms
    of the two series arguments.

    Examples:
        tail_bound_0F0(0.0, 5) == 0.0
        tail_bound_0F0(1.0, 0) ~= e - 1
    """
    return tail_sum(norm_product, M)
