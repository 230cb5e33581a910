"""Multiline queues, their weights, the row-twist involution, and enumeration.

A multiline queue is a tuple of particle rows on the ring; ``rows[0]`` is the
bottom row.  Fermionic rows are subsets of {1..n}, bosonic rows multisets.
The twist ``twist(q, i)`` swaps the cylindrically unpaired particles between
rows i and i+1; it realizes the combinatorial R matrix on adjacent tensor
factors, so the braid and commutation relations hold for it (they are checked
by the test suite rather than assumed).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .pairing import pair_strictly_left, pair_weakly_right


@dataclass(frozen=True)
class Monomial:
    """A monomial in the site variables x_1..x_n, stored as its exponent vector."""

    exponents: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(int(e) for e in self.exponents))
        if any(e < 0 for e in self.exponents):
            raise ValueError("exponents must be nonnegative")

    def evaluate(self, x: Sequence[Fraction]) -> Fraction:
        if len(x) != len(self.exponents):
            raise ValueError("variable vector length mismatch")
        out = Fraction(1)
        for xi, e in zip(x, self.exponents):
            out *= Fraction(xi) ** e
        return out

    def __mul__(self, other: "Monomial") -> "Monomial":
        if len(other.exponents) != len(self.exponents):
            raise ValueError("monomial length mismatch")
        return Monomial(tuple(a + b for a, b in zip(self.exponents, other.exponents)))

    def __str__(self) -> str:
        parts = [f"x{i + 1}^{e}" if e > 1 else f"x{i + 1}" for i, e in enumerate(self.exponents) if e]
        return "*".join(parts) if parts else "1"


def _norm_fermionic_row(row: Iterable[int], n: int) -> tuple[int, ...]:
    r = tuple(sorted(int(j) for j in row))
    if any(not 1 <= j <= n for j in r):
        raise ValueError(f"row site outside 1..{n}")
    if len(set(r)) != len(r):
        raise ValueError("fermionic row contains a duplicate site")
    return r


def _norm_bosonic_row(row: Iterable[int], n: int) -> tuple[int, ...]:
    r = tuple(sorted(int(j) for j in row))
    if any(not 1 <= j <= n for j in r):
        raise ValueError(f"row site outside 1..{n}")
    return r


@dataclass(frozen=True)
class FermionicMLQ:
    n: int
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("ring size must be positive")
        rows = tuple(_norm_fermionic_row(r, self.n) for r in self.rows)
        if not rows:
            raise ValueError("a queue needs at least one row")
        object.__setattr__(self, "rows", rows)

    @property
    def k(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(r) for r in self.rows)

    @property
    def is_straight(self) -> bool:
        s = self.shape
        return all(a >= b for a, b in zip(s, s[1:]))

    def weight(self) -> Monomial:
        counts = Counter(j for r in self.rows for j in r)
        return Monomial(tuple(counts.get(j, 0) for j in range(1, self.n + 1)))


@dataclass(frozen=True)
class BosonicMLQ:
    n: int
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("ring size must be positive")
        rows = tuple(_norm_bosonic_row(r, self.n) for r in self.rows)
        if not rows:
            raise ValueError("a queue needs at least one row")
        object.__setattr__(self, "rows", rows)

    @property
    def k(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(r) for r in self.rows)

    @property
    def is_straight(self) -> bool:
        s = self.shape
        return all(a >= b for a, b in zip(s, s[1:]))

    def weight(self) -> Monomial:
        counts = Counter(j for r in self.rows for j in r)
        return Monomial(tuple(counts.get(j, 0) for j in range(1, self.n + 1)))


MLQ = FermionicMLQ | BosonicMLQ


def twist(q: MLQ, i: int) -> MLQ:
    """Swap the unpaired particles between rows i and i+1 (1-indexed, bottom-up).

    The paired particles stay put, so the shape becomes s_i applied to the old
    shape while the weight is unchanged.
    """
    if not 1 <= i < q.k:
        raise IndexError(f"twist index {i} outside 1..{q.k - 1}")
    lower, upper = q.rows[i - 1], q.rows[i]
    if isinstance(q, FermionicMLQ):
        res = pair_weakly_right(lower, upper, q.n)
        lo = set(lower) - set(res.unpaired_lower) | set(res.unpaired_upper)
        up = set(upper) - set(res.unpaired_upper) | set(res.unpaired_lower)
        new_rows = q.rows[: i - 1] + (tuple(sorted(lo)), tuple(sorted(up))) + q.rows[i + 1 :]
        return FermionicMLQ(q.n, new_rows)
    res = pair_strictly_left(lower, upper, q.n)
    lo = Counter(lower) - Counter(res.unpaired_lower) + Counter(res.unpaired_upper)
    up = Counter(upper) - Counter(res.unpaired_upper) + Counter(res.unpaired_lower)
    new_rows = q.rows[: i - 1] + (tuple(sorted(lo.elements())), tuple(sorted(up.elements()))) + q.rows[i + 1 :]
    return BosonicMLQ(q.n, new_rows)


def apply_twists(q: MLQ, word: Sequence[int]) -> MLQ:
    """Apply a composition of twists, leftmost factor last (operator order)."""
    for i in reversed(word):
        q = twist(q, i)
    return q


def straighten(q: MLQ) -> tuple[MLQ, tuple[int, ...]]:
    """Bubble-sort the row sizes into weakly decreasing order by twists.

    Returns the straight queue and the twist word w with
    ``apply_twists(q, w) == straight``.
    """
    chrono: list[int] = []
    cur = q
    changed = True
    while changed:
        changed = False
        for i in range(1, cur.k):
            if len(cur.rows[i - 1]) < len(cur.rows[i]):
                cur = twist(cur, i)
                chrono.append(i)
                changed = True
    return cur, tuple(reversed(chrono))


def subsets_colex(n: int, size: int) -> Iterator[tuple[int, ...]]:
    """Size-``size`` subsets of {1..n} as ascending tuples, in colex order."""
    if size == 0:
        yield ()
        return
    for top in range(size, n + 1):
        for rest in subsets_colex(top - 1, size - 1):
            yield rest + (top,)


def multisets_colex(n: int, size: int) -> Iterator[tuple[int, ...]]:
    """Size-``size`` multisets over {1..n} as ascending tuples, in colex order."""
    if size == 0:
        yield ()
        return
    for top in range(1, n + 1):
        for rest in multisets_colex(top, size - 1):
            yield rest + (top,)


def count_queues(alpha: Sequence[int], n: int, kind: str) -> int:
    """Closed-form size of the queue family of the given shape."""
    total = 1
    for a in alpha:
        if a < 0:
            raise ValueError("shape entries must be nonnegative")
        if kind == "fermionic":
            if a > n:
                raise ValueError(f"fermionic row size {a} exceeds ring size {n}")
            total *= math.comb(n, a)
        elif kind == "bosonic":
            total *= math.comb(n + a - 1, a)
        else:
            raise ValueError(f"unknown kind {kind!r}")
    return total


def enumerate_queues(alpha: Sequence[int], n: int, kind: str) -> Iterator[MLQ]:
    """All queues of shape alpha on n sites, top row varying fastest.

    Rows run through colex order; the stream is deterministic so seeded
    samplers can index into it reproducibly.
    """
    count_queues(alpha, n, kind)  # validate shape up front
    if kind == "fermionic":
        row_streams = [list(subsets_colex(n, a)) for a in alpha]
        cls = FermionicMLQ
    else:
        row_streams = [list(multisets_colex(n, a)) for a in alpha]
        cls = BosonicMLQ

    def rec(i: int, prefix: tuple) -> Iterator[MLQ]:
        if i == len(row_streams):
            yield cls(n, prefix)
            return
        for row in row_streams[i]:
            yield from rec(i + 1, prefix + (row,))

    yield from rec(0, ())
