"""Projection maps from multiline queues to ring words.

The single-row operator ``apply_row`` passes labels from a word "above" down
through one queue row: labels are handed out class by class, from the largest
down, by cylindrical pairing.  While the row still has unpaired particles the
step is a pairing step (the paired row particles inherit the class label, and
on the boundary the leftovers take the fresh label); once the row is
saturated every further class collapses, i.e. the newly unpaired word
particles drop through with their label reduced by one.

Folding ``apply_row`` over the rows from the top down, starting from the
empty word, projects the whole queue to a word.  The same word is computed a
second, independent way by the corner-transfer reading ``ctm_project``: the
i-th row is bubbled to the bottom with twists and its indicator is read off;
the readings stack into nested layers.  Agreement of all routes (and the
classic top-down label-passing algorithm on straight queues) is a test
obligation, not an assumption.
"""

from __future__ import annotations

from collections import Counter
from typing import Iterable, Sequence

from .errors import ShapeError
from .mlq import MLQ, BosonicMLQ, FermionicMLQ, twist
from .pairing import pair_strictly_left, pair_weakly_right
from .words import (
    BosonicWord,
    FermionicWord,
    Indicator,
    Word,
    indicator_multiset,
    indicator_subset,
    multiset_indicator,
    subset_indicator,
)


def _wrap(site: int, n: int) -> int:
    return (site - 1) % n + 1


# ---------------------------------------------------------------------------
# single-row operators
# ---------------------------------------------------------------------------


def apply_row_fermionic(row: Iterable[int], fresh_label: int, word: FermionicWord) -> FermionicWord:
    """Pass the labels of ``word`` down through one fermionic row.

    ``fresh_label`` labels the row particles that no word particle reaches;
    it must not exceed the smallest label present in the word.  An all-zero
    word labels every row particle with ``fresh_label``; an empty row lets
    every word particle collapse (all labels drop by one).
    """
    n = word.n
    q = frozenset(row)
    if any(not 1 <= j <= n for j in q):
        raise ValueError("row site outside the ring")
    if fresh_label < 1:
        raise ValueError("fresh label must be positive")
    content = word.content()
    if not content:
        return FermionicWord(tuple(fresh_label if j + 1 in q else 0 for j in range(n)))
    a, k = content[0], content[-1]
    if fresh_label > a:
        raise ValueError(f"fresh label {fresh_label} exceeds smallest word label {a}")

    level = {r: frozenset(indicator_subset(word.layer(r))) for r in range(a, k + 1)}
    s = max((r for r in range(a, k + 1) if len(level[r]) >= len(q)), default=a)

    y = [0] * n
    prev_paired: frozenset[int] = frozenset()
    for r in range(k, s - 1, -1):
        res = pair_weakly_right(q, level[r], n)
        paired = frozenset(res.paired_lower)
        for j in paired - prev_paired:
            y[j - 1] = r
        prev_paired = paired
    for j in q - prev_paired:
        y[j - 1] = fresh_label
    prev_unpaired: frozenset[int] = frozenset()
    for r in range(s, a - 1, -1):
        res = pair_weakly_right(q, level[r], n)
        unpaired = frozenset(res.unpaired_upper)
        for j in unpaired - prev_unpaired:
            y[j - 1] = r - 1
        prev_unpaired = unpaired
    return FermionicWord(tuple(y))


def apply_row_bosonic(row: Iterable[int], fresh_label: int, word: BosonicWord) -> BosonicWord:
    """Bosonic analogue of :func:`apply_row_fermionic` (strictly-left pairing)."""
    n = word.n
    d = Counter(int(j) for j in row)
    if any(not 1 <= j <= n for j in d):
        raise ValueError("row site outside the ring")
    if fresh_label < 1:
        raise ValueError("fresh label must be positive")
    if word.is_empty:
        return BosonicWord(tuple((fresh_label,) * d[j + 1] for j in range(n)))
    a, k = word.min_label(), word.max_label
    if fresh_label > a:
        raise ValueError(f"fresh label {fresh_label} exceeds smallest word label {a}")

    d_size = sum(d.values())
    level = {
        r: Counter({j: c for j, c in enumerate(word.layer(r), start=1) if c}) for r in range(a, k + 1)
    }
    s = max((r for r in range(a, k + 1) if sum(level[r].values()) >= d_size), default=a)

    labels: list[list[int]] = [[] for _ in range(n)]
    prev_paired: Counter = Counter()
    for r in range(k, s - 1, -1):
        res = pair_strictly_left(d.elements(), level[r].elements(), n)
        paired = Counter(res.paired_lower)
        for j, c in (paired - prev_paired).items():
            labels[j - 1].extend([r] * c)
        prev_paired = paired
    for j, c in (d - prev_paired).items():
        labels[j - 1].extend([fresh_label] * c)
    prev_unpaired: Counter = Counter()
    for r in range(s, a - 1, -1):
        res = pair_strictly_left(d.elements(), level[r].elements(), n)
        unpaired = Counter(res.unpaired_upper)
        for j, c in (unpaired - prev_unpaired).items():
            labels[j - 1].extend([r - 1] * c)
        prev_unpaired = unpaired
    return BosonicWord(tuple(tuple(sorted(ls)) for ls in labels))


# ---------------------------------------------------------------------------
# whole-queue projection
# ---------------------------------------------------------------------------


def project(q: MLQ) -> Word:
    """Project a queue to a word by folding the row operator top row first."""
    return label_trace(q)[0]


def label_trace(q: MLQ) -> list[Word]:
    """Intermediate labelled rows of the projection, indexed j-1 for row j.

    Entry j-1 is the word produced once rows j..k have been processed; entry 0
    is the projection itself.  Entry j-1 also equals the projection of the
    subqueue rows j..k with every label raised by j-1.
    """
    fermionic = isinstance(q, FermionicMLQ)
    word: Word = FermionicWord((0,) * q.n) if fermionic else BosonicWord(((),) * q.n)
    out: list[Word] = []
    for j in range(q.k, 0, -1):
        if fermionic:
            word = apply_row_fermionic(q.rows[j - 1], j, word)
        else:
            word = apply_row_bosonic(q.rows[j - 1], j, word)
        out.append(word)
    out.reverse()
    return out


def ferrari_martin(q: MLQ) -> Word:
    """Classic top-down label passing; defined only on straight queues.

    Kept deliberately independent of :func:`apply_row`: labels are handed down
    one class at a time against a shrinking pool of unclaimed particles.
    """
    if not q.is_straight:
        raise ShapeError(f"label passing needs weakly decreasing row sizes, got {q.shape}")
    if isinstance(q, FermionicMLQ):
        return _fm_fermionic(q)
    return _fm_bosonic(q)


def _fm_fermionic(q: FermionicMLQ) -> FermionicWord:
    carry: dict[int, int] = {}
    for r in range(q.k, 0, -1):
        labels = dict(carry)
        for site in q.rows[r - 1]:
            labels.setdefault(site, r)
        if r == 1:
            letters = [0] * q.n
            for site, lab in labels.items():
                letters[site - 1] = lab
            return FermionicWord(tuple(letters))
        pool = set(q.rows[r - 2])
        carry = {}
        for lab in range(q.k, r - 1, -1):
            srcs = [site for site, l in labels.items() if l == lab]
            if not srcs:
                continue
            res = pair_weakly_right(pool, srcs, q.n)
            if res.unpaired_upper:
                raise AssertionError("straight queue left a label stranded")
            for site in res.paired_lower:
                carry[site] = lab
            pool -= set(res.paired_lower)
    raise AssertionError("unreachable")


def _fm_bosonic(q: BosonicMLQ) -> BosonicWord:
    carry: Counter = Counter()  # keys (site, label)
    for r in range(q.k, 0, -1):
        labels = Counter(carry)
        row_count = Counter(q.rows[r - 1])
        for site in row_count:
            carried = sum(c for (s, _), c in labels.items() if s == site)
            if carried > row_count[site]:
                raise AssertionError("more labels than particles at a site")
            labels[(site, r)] += row_count[site] - carried
        if r == 1:
            sites: list[list[int]] = [[] for _ in range(q.n)]
            for (site, lab), c in labels.items():
                sites[site - 1].extend([lab] * c)
            return BosonicWord(tuple(tuple(sorted(s)) for s in sites))
        pool = Counter(q.rows[r - 2])
        carry = Counter()
        for lab in range(q.k, r - 1, -1):
            srcs = Counter({site: c for (site, l), c in labels.items() if l == lab and c})
            if not srcs:
                continue
            res = pair_strictly_left(pool.elements(), srcs.elements(), q.n)
            if res.unpaired_upper:
                raise AssertionError("straight queue left a label stranded")
            for site, c in Counter(res.paired_lower).items():
                carry[(site, lab)] += c
            pool -= Counter(res.paired_lower)
    raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# one-particle-at-a-time variant
# ---------------------------------------------------------------------------


def canonical_order_fermionic(word: FermionicWord) -> tuple[int, ...]:
    """Priority order on the occupied sites: labels descending, sites ascending."""
    return tuple(sorted(word.support(), key=lambda j: (-word.letters[j - 1], j)))


def canonical_order_bosonic(word: BosonicWord) -> tuple[tuple[int, int], ...]:
    """Priority order on (site, label) particles: labels descending, sites ascending."""
    parts = [(j, a) for j in range(1, word.n + 1) for a in word.sites[j - 1]]
    return tuple(sorted(parts, key=lambda p: (-p[1], p[0])))


def apply_row_particlewise(row: Iterable[int], fresh_label: int, word: Word, order=None) -> Word:
    """Queueing formulation of the row operator: one particle pairs at a time.

    ``order`` lists the word particles in a priority-respecting order (labels
    weakly decreasing): sites for a fermionic word, (site, label) pairs for a
    bosonic one.  The output does not depend on the order chosen.
    """
    if isinstance(word, FermionicWord):
        return _particlewise_fermionic(row, fresh_label, word, order)
    return _particlewise_bosonic(row, fresh_label, word, order)


def _particlewise_fermionic(row, fresh_label, word, order):
    n = word.n
    q = frozenset(row)
    if order is None:
        order = canonical_order_fermionic(word)
    order = tuple(order)
    if tuple(sorted(order)) != word.support():
        raise ValueError("order must list exactly the occupied sites")
    labs = [word.letters[j - 1] for j in order]
    if any(a < b for a, b in zip(labs, labs[1:])):
        raise ValueError("order must have weakly decreasing labels")
    if fresh_label < 1 or (labs and fresh_label > labs[-1]):
        raise ValueError("fresh label exceeds smallest word label")

    y = [0] * n
    free = set(q)
    cap = min(len(q), len(order))
    for s in order[:cap]:
        # nearest free row particle weakly right of s, scanning the full circle
        for step in range(n):
            t = _wrap(s + step, n)
            if t in free:
                free.remove(t)
                y[t - 1] = word.letters[s - 1]
                break
        else:
            raise AssertionError("pairing phase ran out of row particles")
    for t in free:
        y[t - 1] = fresh_label
    pending = set(order[:cap])
    for s in order[cap:]:
        pending.add(s)
        res = pair_weakly_right(q, pending, n)
        if len(res.unpaired_upper) != 1:
            raise AssertionError("collapse step must strand exactly one particle")
        m = res.unpaired_upper[0]
        y[m - 1] = word.letters[s - 1] - 1
        pending.remove(m)
    return FermionicWord(tuple(y))


def _particlewise_bosonic(row, fresh_label, word, order):
    n = word.n
    d = Counter(int(j) for j in row)
    if order is None:
        order = canonical_order_bosonic(word)
    order = tuple((int(j), int(a)) for j, a in order)
    particles = Counter(order)
    actual = Counter((j, a) for j in range(1, n + 1) for a in word.sites[j - 1])
    if particles != actual:
        raise ValueError("order must list exactly the word's particles")
    labs = [a for _, a in order]
    if any(a < b for a, b in zip(labs, labs[1:])):
        raise ValueError("order must have weakly decreasing labels")
    if fresh_label < 1 or (labs and fresh_label > labs[-1]):
        raise ValueError("fresh label exceeds smallest word label")

    out: list[list[int]] = [[] for _ in range(n)]
    free = Counter(d)
    cap = min(sum(d.values()), len(order))
    for site, lab in order[:cap]:
        # nearest free row particle strictly left of the site, own site last
        for step in range(1, n + 1):
            t = _wrap(site - step, n)
            if free[t]:
                free[t] -= 1
                out[t - 1].append(lab)
                break
        else:
            raise AssertionError("pairing phase ran out of row particles")
    for t, c in free.items():
        out[t - 1].extend([fresh_label] * c)
    pending = Counter(site for site, _ in order[:cap])
    for site, lab in order[cap:]:
        pending[site] += 1
        res = pair_strictly_left(d.elements(), pending.elements(), n)
        if len(res.unpaired_upper) != 1:
            raise AssertionError("collapse step must strand exactly one particle")
        m = res.unpaired_upper[0]
        out[m - 1].append(lab - 1)
        pending[m] -= 1
    return BosonicWord(tuple(tuple(sorted(s)) for s in out))


# ---------------------------------------------------------------------------
# combinatorial R matrix and corner-transfer reading
# ---------------------------------------------------------------------------


def combinatorial_r(bottom: Sequence[int], top: Sequence[int], n: int, kind: str) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Swap two adjacent rows by the unpaired-particle exchange.

    Input rows are (bottom, top); the result is the exchanged pair in the same
    bottom-first order, so the first output row has the size of ``top``.
    """
    if kind == "fermionic":
        q: MLQ = FermionicMLQ(n, (tuple(bottom), tuple(top)))
    elif kind == "bosonic":
        q = BosonicMLQ(n, (tuple(bottom), tuple(top)))
    else:
        raise ValueError(f"unknown kind {kind!r}")
    swapped = twist(q, 1)
    return swapped.rows[0], swapped.rows[1]


def ctm_components(q: MLQ, j: int = 1) -> list[Indicator]:
    """Row-j readings of the partial corner transfer: [pi_j, ..., pi_k].

    The i-th entry is the indicator of row j after rows j..i-1 have been
    twisted out of the way.  As a multiset the entries are nested; this is
    verified before returning them in index order.
    """
    if not 1 <= j <= q.k:
        raise IndexError(f"component base {j} outside 1..{q.k}")
    fermionic = isinstance(q, FermionicMLQ)
    comps: list[Indicator] = []
    for i in range(j, q.k + 1):
        m = q
        for t in range(i - 1, j - 1, -1):
            m = twist(m, t)
        row = m.rows[j - 1]
        comps.append(subset_indicator(row, q.n) if fermionic else multiset_indicator(row, q.n))
    ranked = sorted(comps, key=sum, reverse=True)
    for high, low in zip(ranked, ranked[1:]):
        if any(l > h for h, l in zip(high, low)):
            raise AssertionError("corner-transfer readings are not nested")
    return comps


def ctm_project(q: MLQ, j: int = 1) -> Word:
    """Assemble the corner-transfer readings into a word (layers stacked bottom-up)."""
    layers = sorted(ctm_components(q, j), key=sum, reverse=True)
    if isinstance(q, FermionicMLQ):
        return FermionicWord.from_layers(layers, q.n)
    return BosonicWord.from_layers(layers, q.n)


def check_r_expansion(row: Sequence[int], word: Word) -> bool:
    """Check the layer expansion of the row operator against R-matrix readings.

    With u = sum of its layers u_1 >= u_2 >= ... (smallest label at least 2,
    which forces u_1 = u_2), the freshly labelled output of the row operator
    at fresh label 1 must equal the row's indicator plus the first-factor
    readings of R applied to (row, u_i) for i >= 2.
    """
    if isinstance(word, FermionicWord):
        if word.content() and word.content()[0] < 2:
            raise ValueError("smallest word label must be at least 2")
        n = word.n
        layers = word.layers()
        total = list(subset_indicator(row, n))
        for ind in layers[1:]:
            first, _ = combinatorial_r(tuple(sorted(row)), indicator_subset(ind), n, "fermionic")
            for idx, b in enumerate(subset_indicator(first, n)):
                total[idx] += b
        lhs = apply_row_fermionic(row, 1, word)
        return lhs.letters == tuple(total)
    if word.content() and word.content()[0] < 2:
        raise ValueError("smallest word label must be at least 2")
    n = word.n
    layers = word.layers()
    stack = [multiset_indicator(row, n)]
    for counts in layers[1:]:
        first, _ = combinatorial_r(tuple(sorted(row)), indicator_multiset(counts), n, "bosonic")
        stack.append(multiset_indicator(first, n))
    stack.sort(key=sum, reverse=True)
    rhs = BosonicWord.from_layers(stack, n)
    lhs = apply_row_bosonic(row, 1, word)
    return lhs == rhs
