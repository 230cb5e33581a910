"""Words on the ring and their indicator-vector calculus.

A fermionic word assigns a nonnegative integer label to each of the n ring
sites (0 marks an empty site).  A bosonic word assigns a multiset of positive
labels to each site.  Both decompose uniquely into a weakly decreasing stack
of indicator vectors (the "layers"): layer m marks, per site, how many
particles of label >= m sit there.  Sites are 1-indexed everywhere in the
public interface; tuples are 0-indexed internally.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

Indicator = tuple[int, ...]


def subset_indicator(sites: Iterable[int], n: int) -> Indicator:
    """0/1 vector of a subset of {1..n}; inverse of :func:`indicator_subset`."""
    bits = [0] * n
    for j in sites:
        if not 1 <= j <= n:
            raise ValueError(f"site {j} outside 1..{n}")
        if bits[j - 1]:
            raise ValueError(f"duplicate site {j} in fermionic subset")
        bits[j - 1] = 1
    return tuple(bits)


def indicator_subset(bits: Sequence[int]) -> tuple[int, ...]:
    return tuple(j + 1 for j, b in enumerate(bits) if b)


def multiset_indicator(elements: Iterable[int], n: int) -> Indicator:
    """Per-site multiplicity vector of a multiset over {1..n}."""
    counts = [0] * n
    for j in elements:
        if not 1 <= j <= n:
            raise ValueError(f"site {j} outside 1..{n}")
        counts[j - 1] += 1
    return tuple(counts)


def indicator_multiset(counts: Sequence[int]) -> tuple[int, ...]:
    out: list[int] = []
    for j, c in enumerate(counts):
        out.extend([j + 1] * c)
    return tuple(out)


def _check_nested(layers: Sequence[Indicator]) -> None:
    for low, high in zip(layers, layers[1:]):
        if len(low) != len(high):
            raise ValueError("layers of unequal length")
        if any(h > l for l, h in zip(low, high)):
            raise ValueError("layers are not nested")


@dataclass(frozen=True)
class FermionicWord:
    """Per-site labels; 0 means empty.  Immutable and hashable."""

    letters: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(int(a) for a in self.letters))
        if not self.letters:
            raise ValueError("word must have at least one site")
        if any(a < 0 for a in self.letters):
            raise ValueError("letters must be nonnegative")

    @property
    def n(self) -> int:
        return len(self.letters)

    @property
    def max_label(self) -> int:
        return max(self.letters)

    def support(self) -> tuple[int, ...]:
        """Sites carrying a particle, ascending."""
        return tuple(j + 1 for j, a in enumerate(self.letters) if a)

    def content(self) -> tuple[int, ...]:
        """Multiset of nonzero labels, sorted ascending."""
        return tuple(sorted(a for a in self.letters if a))

    def layer(self, m: int) -> Indicator:
        """Indicator of sites with label >= m."""
        if m < 1:
            raise ValueError("layer index must be >= 1")
        return tuple(1 if a >= m else 0 for a in self.letters)

    def layers(self) -> list[Indicator]:
        """Nested decomposition [layer(1), ..., layer(max_label)]."""
        return [self.layer(m) for m in range(1, self.max_label + 1)]

    @classmethod
    def from_layers(cls, layers: Sequence[Indicator], n: int | None = None) -> "FermionicWord":
        """Rebuild a word from nested layers; inverse of :meth:`layers`."""
        if not layers:
            if n is None:
                raise ValueError("ring size required for an empty layer stack")
            return cls((0,) * n)
        _check_nested(layers)
        return cls(tuple(sum(col) for col in zip(*layers)))

    def increment(self, j: int) -> "FermionicWord":
        """Raise every nonzero label by j; empty sites stay empty."""
        if j < 0:
            raise ValueError("shift must be nonnegative")
        return FermionicWord(tuple(a + j if a else 0 for a in self.letters))

    def __str__(self) -> str:
        return " ".join(str(a) for a in self.letters)


@dataclass(frozen=True)
class BosonicWord:
    """Per-site multisets of positive labels, each stored sorted ascending."""

    sites: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        norm = tuple(tuple(sorted(int(a) for a in s)) for s in self.sites)
        object.__setattr__(self, "sites", norm)
        if not norm:
            raise ValueError("word must have at least one site")
        if any(a < 1 for s in norm for a in s):
            raise ValueError("labels must be positive")

    @property
    def n(self) -> int:
        return len(self.sites)

    @property
    def max_label(self) -> int:
        return max((a for s in self.sites for a in s), default=0)

    @property
    def is_empty(self) -> bool:
        return all(not s for s in self.sites)

    def content(self) -> tuple[int, ...]:
        """Multiset union of all site labels, sorted ascending."""
        return tuple(sorted(a for s in self.sites for a in s))

    def min_label(self) -> int:
        return min((a for s in self.sites for a in s), default=0)

    def layer(self, m: int) -> Indicator:
        """Per-site count of labels >= m."""
        if m < 1:
            raise ValueError("layer index must be >= 1")
        return tuple(sum(1 for a in s if a >= m) for s in self.sites)

    def layers(self) -> list[Indicator]:
        return [self.layer(m) for m in range(1, self.max_label + 1)]

    @classmethod
    def from_layers(cls, layers: Sequence[Indicator], n: int | None = None) -> "BosonicWord":
        """Rebuild a word by stacking layers bottom-up; inverse of :meth:`layers`."""
        if not layers:
            if n is None:
                raise ValueError("ring size required for an empty layer stack")
            return cls(((),) * n)
        _check_nested(layers)
        word = cls(tuple((1,) * c for c in layers[0]))
        for counts in layers[1:]:
            word = add_layer(word, counts)
        return word

    def increment(self, j: int) -> "BosonicWord":
        if j < 0:
            raise ValueError("shift must be nonnegative")
        return BosonicWord(tuple(tuple(a + j for a in s) for s in self.sites))

    def __str__(self) -> str:
        return "(" + ",".join("".join(map(str, s)) if s else "-" for s in self.sites) + ")"


def add_layer(word: BosonicWord, counts: Sequence[int]) -> BosonicWord:
    """Raise, at each site, the largest counts[j] labels of the word by 1.

    Requires counts[j] <= number of labels already at site j; this is what
    makes stacking layers bottom-up the inverse of peeling them off.
    """
    if len(counts) != word.n:
        raise ValueError("layer length does not match ring size")
    new_sites = []
    for s, c in zip(word.sites, counts):
        if c < 0 or c > len(s):
            raise ValueError("layer exceeds available particles at a site")
        keep = len(s) - c
        new_sites.append(s[:keep] + tuple(a + 1 for a in s[keep:]))
    return BosonicWord(tuple(new_sites))


Word = FermionicWord | BosonicWord
