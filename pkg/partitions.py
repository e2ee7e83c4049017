"""
Integer partitions with a bounded number of parts.

Partitions index every series in this package. Enumeration is
reverse-lexicographic within a weight; series sum weight by weight.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Iterator, List, Optional, Tuple

from errors import DomainError


@dataclass(frozen=True)
class Partition:
    """
    A weakly decreasing tuple of positive integers.

    Trailing zeros are trimmed on construction, so `Partition((2, 1, 0))`
    and `Partition((2, 1))` are the same value. The fixed-length notation
    (lambda_1, ..., lambda_N) is recovered with `padded(N)`.
    """
    parts: Tuple[int, ...] = ()
    weight: int = field(init=False, compare=False)

    def __post_init__(self):
        parts = tuple(self.parts)
        for p in parts:
            if isinstance(p, bool) or not isinstance(p, int) or p < 0:
                raise DomainError(f"partition parts must be nonnegative integers, got {parts!r}")
        for a, b in zip(parts, parts[1:]):
            if a < b:
                raise DomainError(f"partition parts must be weakly decreasing, got {parts!r}")
        while parts and parts[-1] == 0:
            parts = parts[:-1]
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "weight", sum(parts))

    @classmethod
    def parse(cls, text: str) -> "Partition":
        """Parse a comma-separated list such as '3,1'; an empty string is the empty partition."""
        text = text.strip()
        if not text:
            return cls(())
        try:
            parts = tuple(int(p) for p in text.split(","))
        except ValueError as e:
            raise DomainError(f"malformed partition {text!r}: {e}") from e
        return cls(parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    def part(self, i: int) -> int:
        """The i-th part, 1-based, zero beyond the length."""
        return self.parts[i - 1] if 1 <= i <= len(self.parts) else 0

    def padded(self, n: int) -> Tuple[int, ...]:
        if self.length > n:
            raise DomainError(f"partition {self} has more than {n} parts")
        return self.parts + (0,) * (n - self.length)

    def conjugate(self) -> "Partition":
        if not self.parts:
            return self
        return Partition(tuple(sum(1 for p in self.parts if p > j) for j in range(self.parts[0])))

    def boxes(self) -> Iterator[Tuple[int, int]]:
        """Cells (i, j) of the Young diagram, 1-based, row by row."""
        for i, p in enumerate(self.parts, start=1):
            for j in range(1, p + 1):
                yield i, j

    def add_box(self, row: int) -> Optional["Partition"]:
        """The partition with one more box in the given 1-based row, or None if that is not a partition."""
        if row < 1 or row > self.length + 1:
            return None
        if row > 1 and self.part(row - 1) == self.part(row):
            return None
        parts = list(self.parts) + [0]
        parts[row - 1] += 1
        return Partition(tuple(parts))

    def __str__(self) -> str:
        return "(" + ",".join(str(p) for p in self.parts) + ")"


EMPTY = Partition(())


@lru_cache(maxsize=None)
def horizontal_strips(lam: Partition, max_parts: int) -> Tuple[Partition, ...]:
    """
    Every mu with at most max_parts parts such that lam/mu is a horizontal
    strip, i.e. lam_{i+1} <= mu_i <= lam_i. Empty when lam has more than
    max_parts + 1 parts.
    """
    if lam.length > max_parts + 1:
        return ()
    ranges = [range(lam.part(i + 1), lam.part(i) + 1) for i in range(1, max_parts + 1)]
    return tuple(Partition(mu) for mu in product(*ranges))


def dominates(lam: Partition, mu: Partition) -> bool:
    """Dominance order on partitions of the same weight."""
    if lam.weight != mu.weight:
        return False
    a = b = 0
    for i in range(1, max(lam.length, mu.length) + 1):
        a += lam.part(i)
        b += mu.part(i)
        if a < b:
            return False
    return True


def _generate(m: int, largest: int, max_parts: int) -> Iterator[Tuple[int, ...]]:
    if m == 0:
        yield ()
        return
    if max_parts == 0:
        return
    for first in range(min(m, largest), 0, -1):
        if first * max_parts < m:
            break
        for rest in _generate(m - first, first, max_parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=4096)
def _enumerate_cached(m: int, max_parts: int) -> Tuple[Partition, ...]:
    return tuple(Partition(p) for p in _generate(m, m, max_parts))


def enumerate_partitions(m: int, max_parts: int) -> List[Partition]:
    """
    Every partition of m with at most max_parts parts, once each, in
    reverse-lexicographic order.

    Args:
        m: The weight, m >= 0.
        max_parts: Upper bound on the number of nonzero parts, >= 1.

    Returns:
        List of partitions; [()] when m = 0.
    """
    if m < 0:
        raise DomainError(f"weight must be nonnegative, got {m}")
    if max_parts < 1:
        raise DomainError(f"max_parts must be at least 1, got {max_parts}")
    return list(_enumerate_cached(m, max_parts))


@lru_cache(maxsize=256)
def _count(m: int, k: int) -> int:
    # ways[j]: partitions of j into parts of size at most the current part bound
    ways = [1] + [0] * m
    for part in range(1, k + 1):
        for j in range(part, m + 1):
            ways[j] += ways[j - part]
    return ways[m]


def count_partitions(m: int, max_parts: int) -> int:
    """Number of partitions of m with at most max_parts parts (equivalently, parts of size at most max_parts)."""
    if m < 0:
        raise DomainError(f"weight must be nonnegative, got {m}")
    if max_parts < 1:
        raise DomainError(f"max_parts must be at least 1, got {max_parts}")
    return _count(m, min(max_parts, m) if m > 0 else max_parts)


def partitions_up_to(max_weight: int, max_parts: int) -> Iterator[Tuple[int, List[Partition]]]:
    """Yield (m, partitions of weight m) for m = 0..max_weight."""
    for m in range(max_weight + 1):
        yield m, enumerate_partitions(m, max_parts)
