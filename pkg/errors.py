"""
Exception hierarchy shared by the numerical modules and the command line.
"""

from typing import Any, Optional


class DunklError(Exception):
    """Base class for every error raised by this package."""


class DomainError(DunklError, ValueError):
    """
    Raised for inputs outside the domain of an operation: malformed partitions,
    dimension mismatches, non-positive Jack parameters, multiplicities outside
    the supported set.
    """


class VanishingPochhammerError(DunklError, ArithmeticError):
    """
    Raised when a generalized Pochhammer symbol in a denominator is zero.
    """

    def __init__(self, partition: Any, mu: float, alpha: float):
        self.partition = partition
        self.mu = mu
        self.alpha = alpha
        super().__init__(
            f"generalized Pochhammer symbol ({mu})_{partition} vanishes for alpha={alpha}"
        )


class SingularOracleError(DunklError, ArithmeticError):
    """
    Raised when the alternating-sum oracle would divide by a vanishing
    alternating polynomial.
    """

    def __init__(self, which: str, i: int, j: int, values: Optional[tuple] = None):
        self.which = which
        self.pair = (i, j)
        self.values = values
        super().__init__(
            f"squared coordinates {i} and {j} of {which} coincide{f' ({values[0]!r}, {values[1]!r})' if values else ''}"
        )
