"""Cylindrical bracket matching and the two-row pairing maps.

Particles of two rows on the ring are encoded as a bracket sequence scanned
site by site; matching the brackets on the cylinder pairs upper-row particles
to lower-row particles.  The same-site emission order is the crux:

* weakly-right pairing emits opens (upper row) before closes (lower row) at a
  shared site, so an upper particle may pair straight down;
* strictly-left pairing emits closes (upper row) before opens (lower row), so
  a same-site pair is impossible and every pairing line travels left.

After the linear stack pass, the surviving tokens always read as a block of
closes followed by a block of opens.  On the cylinder the k-th leftover close
(in scan order) matches the k-th leftover open counted from the right; this
is the unique completion in which no matched pair encloses an unmatched
token.  Which close meets which open is recorded for diagnostics only; all
consumers depend only on the matched/unmatched site multisets, which agree
with every valid completion.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence


class Token(NamedTuple):
    kind: str  # "open" | "close"
    site: int
    row: str  # "lower" | "upper"
    instance: int


@dataclass(frozen=True)
class PairingResult:
    """Outcome of pairing an upper row onto a lower row.

    ``pairs`` holds (upper site, lower site) couples, one per matched pair of
    particles; exactly one of the unpaired multisets is nonempty unless both
    rows were exhausted.
    """

    pairs: tuple[tuple[int, int], ...]
    unpaired_upper: tuple[int, ...]
    unpaired_lower: tuple[int, ...]

    @property
    def paired_upper(self) -> tuple[int, ...]:
        return tuple(sorted(u for u, _ in self.pairs))

    @property
    def paired_lower(self) -> tuple[int, ...]:
        return tuple(sorted(l for _, l in self.pairs))


def cyclic_match(tokens: Sequence[Token]) -> tuple[list[tuple[Token, Token]], list[Token]]:
    """Match open/close tokens on the cylinder.

    Returns (pairs, unmatched) where each pair is (open token, close token).
    The unmatched list is homogeneous: all opens or all closes.
    """
    pairs: list[tuple[Token, Token]] = []
    stack: list[Token] = []
    loose_closes: list[Token] = []
    for tok in tokens:
        if tok.kind == "open":
            stack.append(tok)
        elif tok.kind == "close":
            if stack:
                pairs.append((stack.pop(), tok))
            else:
                loose_closes.append(tok)
        else:
            raise ValueError(f"bad token kind {tok.kind!r}")
    # Wrap-around: the cyclic residue reads ")...)(...("; peeling adjacent
    # pairs off the seam matches the k-th close with the k-th open from the
    # right until one side runs out.
    p = min(len(stack), len(loose_closes))
    for k in range(p):
        pairs.append((stack[len(stack) - 1 - k], loose_closes[k]))
    unmatched = stack[: len(stack) - p] + loose_closes[p:]
    return pairs, unmatched


def _build_result(tokens: Sequence[Token]) -> PairingResult:
    pairs, unmatched = cyclic_match(tokens)
    couples = []
    for open_tok, close_tok in pairs:
        upper, lower = (open_tok, close_tok) if open_tok.row == "upper" else (close_tok, open_tok)
        couples.append((upper.site, lower.site))
    return PairingResult(
        pairs=tuple(sorted(couples)),
        unpaired_upper=tuple(sorted(t.site for t in unmatched if t.row == "upper")),
        unpaired_lower=tuple(sorted(t.site for t in unmatched if t.row == "lower")),
    )


def pair_weakly_right(lower: Iterable[int], upper: Iterable[int], n: int) -> PairingResult:
    """Cylindrically pair upper-row particles weakly rightward onto the lower row.

    Both rows are subsets of {1..n}; a particle may pair straight down to its
    own site.
    """
    lo = set()
    for j in lower:
        if not 1 <= j <= n:
            raise ValueError(f"site {j} outside 1..{n}")
        if j in lo:
            raise ValueError("fermionic row contains a duplicate site")
        lo.add(j)
    up = set()
    for j in upper:
        if not 1 <= j <= n:
            raise ValueError(f"site {j} outside 1..{n}")
        if j in up:
            raise ValueError("fermionic row contains a duplicate site")
        up.add(j)
    tokens = []
    for j in range(1, n + 1):
        if j in up:
            tokens.append(Token("open", j, "upper", 0))
        if j in lo:
            tokens.append(Token("close", j, "lower", 0))
    return _build_result(tokens)


def pair_strictly_left(lower: Iterable[int], upper: Iterable[int], n: int) -> PairingResult:
    """Cylindrically pair upper-row particles strictly leftward onto the lower row.

    Rows are multisets over {1..n}; same-site pairs cannot form, so a pairing
    line may wrap the full circle back to its own site.
    """
    from collections import Counter

    lo = Counter()
    up = Counter()
    for j in lower:
        if not 1 <= j <= n:
            raise ValueError(f"site {j} outside 1..{n}")
        lo[j] += 1
    for j in upper:
        if not 1 <= j <= n:
            raise ValueError(f"site {j} outside 1..{n}")
        up[j] += 1
    tokens = []
    for j in range(1, n + 1):
        for i in range(up[j]):
            tokens.append(Token("close", j, "upper", i))
        for i in range(lo[j]):
            tokens.append(Token("open", j, "lower", i))
    return _build_result(tokens)
