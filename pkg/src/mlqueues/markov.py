"""Ring particle processes, ringing-path dynamics, and exact stationary laws.

Everything here is exact: rates are rationals, the stationary distribution is
the one-dimensional null space of the transposed generator computed by
Gaussian elimination over ``fractions.Fraction``, and the balance equation is
re-verified state by state on the result.  Floating point appears only in the
Monte-Carlo sampler.
"""

from __future__ import annotations

import itertools
import random
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Sequence

from .errors import ChainError, ShapeError
from .mlq import BosonicMLQ, FermionicMLQ, enumerate_queues
from .words import BosonicWord, FermionicWord, Word


def _wrap(site: int, n: int) -> int:
    return (site - 1) % n + 1


@dataclass(frozen=True)
class RateParams:
    """Positive site-dependent rate parameters x_1..x_n."""

    x: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(Fraction(v) for v in self.x))
        if any(v <= 0 for v in self.x):
            raise ValueError("rate parameters must be positive")

    @classmethod
    def ones(cls, n: int) -> "RateParams":
        return cls((Fraction(1),) * n)

    def __getitem__(self, site: int) -> Fraction:
        return self.x[(site - 1) % len(self.x)]


@dataclass(frozen=True)
class ChainSpec:
    """A finite continuous-time chain: states plus exact-rate transitions.

    Parallel transitions between the same pair of states are kept as distinct
    entries; they are only merged inside the stationary solver.  Self-loops
    are rejected, they cannot affect stationarity.
    """

    states: tuple[Hashable, ...]
    transitions: tuple[tuple[int, int, Fraction], ...]

    def __post_init__(self):
        if len(set(self.states)) != len(self.states):
            raise ValueError("duplicate state keys")
        for src, dst, rate in self.transitions:
            if src == dst:
                raise ValueError("self-loop transitions are not allowed")
            if not 0 <= src < len(self.states) or not 0 <= dst < len(self.states):
                raise ValueError("transition endpoint out of range")
            if rate <= 0:
                raise ValueError("rates must be positive")

    @property
    def index(self) -> dict:
        return {s: i for i, s in enumerate(self.states)}

    def out_edges(self, i: int) -> list[tuple[int, Fraction]]:
        return [(dst, rate) for src, dst, rate in self.transitions if src == i]


@dataclass(frozen=True)
class RationalDistribution:
    """Exact probability vector over an enumerated state space."""

    probs: dict

    def __post_init__(self):
        probs = {k: Fraction(v) for k, v in self.probs.items()}
        object.__setattr__(self, "probs", probs)
        if any(v < 0 for v in probs.values()):
            raise ValueError("negative probability")
        if sum(probs.values(), Fraction(0)) != 1:
            raise ValueError("probabilities must sum to exactly 1")

    def __getitem__(self, state) -> Fraction:
        return self.probs.get(state, Fraction(0))

    def items(self):
        return self.probs.items()

    def tv_distance(self, other: dict) -> float:
        keys = set(self.probs) | set(other)
        return 0.5 * sum(abs(float(self[k]) - float(other.get(k, 0.0))) for k in keys)


# ---------------------------------------------------------------------------
# state spaces
# ---------------------------------------------------------------------------


def conjugate(lam: Sequence[int]) -> tuple[int, ...]:
    """Conjugate partition (column lengths of the row diagram)."""
    lam = sorted((p for p in lam if p), reverse=True)
    if not lam:
        return ()
    return tuple(sum(1 for p in lam if p >= j) for j in range(1, lam[0] + 1))


def enumerate_states(lam: Sequence[int], n: int, kind: str) -> list[Word]:
    """All ring words whose particle content is the partition ``lam``."""
    lam = tuple(sorted((int(p) for p in lam), reverse=True))
    if not lam or lam[-1] < 1:
        raise ValueError("content partition must have positive parts")
    if kind == "tasep":
        if len(lam) > n:
            raise ValueError(f"cannot place {len(lam)} particles on {n} exclusion sites")
        letters = lam + (0,) * (n - len(lam))
        return [FermionicWord(p) for p in sorted(set(itertools.permutations(letters)))]
    if kind == "tazrp":
        placements_per_value = []
        values = sorted(set(lam), reverse=True)
        for v in values:
            mult = lam.count(v)
            placements_per_value.append([c for c in _compositions(mult, n)])
        states = []
        for combo in itertools.product(*placements_per_value):
            sites = [[] for _ in range(n)]
            for v, counts in zip(values, combo):
                for j, c in enumerate(counts):
                    sites[j].extend([v] * c)
            states.append(BosonicWord(tuple(tuple(sorted(s)) for s in sites)))
        return states
    raise ValueError(f"unknown kind {kind!r}")


def _compositions(total: int, parts: int):
    """Weak compositions of ``total`` into ``parts`` parts, lexicographic."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


# ---------------------------------------------------------------------------
# transition rules
# ---------------------------------------------------------------------------


def tasep_transitions(w: FermionicWord) -> list[tuple[FermionicWord, Fraction]]:
    """Adjacent swaps (b, a) -> (a, b) for a > b at every cyclic position, rate 1.

    Larger labels travel toward smaller site indices; the empty site counts as
    the letter 0.
    """
    out = []
    n = w.n
    for i in range(n):
        b, a = w.letters[i], w.letters[(i + 1) % n]
        if a > b:
            letters = list(w.letters)
            letters[i], letters[(i + 1) % n] = a, b
            out.append((FermionicWord(tuple(letters)), Fraction(1)))
    return out


def tazrp_transitions(w: BosonicWord, x: RateParams) -> list[tuple[BosonicWord, Fraction]]:
    """The top particle of each occupied site hops one site right, rate 1/x_j."""
    out = []
    n = w.n
    for j in range(1, n + 1):
        site = w.sites[j - 1]
        if not site:
            continue
        y = site[-1]
        sites = list(w.sites)
        sites[j - 1] = site[:-1]
        dst = _wrap(j + 1, n)
        sites[dst - 1] = tuple(sorted(sites[dst - 1] + (y,)))
        out.append((BosonicWord(tuple(sites)), Fraction(1) / x[j]))
    return out


def ktazrp_transitions(w: BosonicWord) -> list[tuple[BosonicWord, Fraction]]:
    """Any top block of a site hops right with rate 1.

    A block is a nonempty multiset Y from the site with min(Y) at least the
    largest label left behind, i.e. a prefix of the site sorted descending.
    """
    out = []
    n = w.n
    for j in range(1, n + 1):
        site = w.sites[j - 1]
        if not site:
            continue
        desc = tuple(sorted(site, reverse=True))
        seen = set()
        for take in range(1, len(desc) + 1):
            block = desc[:take]
            if block in seen:
                continue
            seen.add(block)
            sites = list(w.sites)
            rest = Counter(site) - Counter(block)
            sites[j - 1] = tuple(sorted(rest.elements()))
            dst = _wrap(j + 1, n)
            sites[dst - 1] = tuple(sorted(sites[dst - 1] + block))
            out.append((BosonicWord(tuple(sites)), Fraction(1)))
    return out


def tasep_chain(lam: Sequence[int], n: int) -> ChainSpec:
    return _build_chain(enumerate_states(lam, n, "tasep"), tasep_transitions)


def tazrp_chain(lam: Sequence[int], n: int, x: RateParams | None = None) -> ChainSpec:
    x = x or RateParams.ones(n)
    return _build_chain(enumerate_states(lam, n, "tazrp"), lambda w: tazrp_transitions(w, x))


def ktazrp_chain(lam: Sequence[int], n: int) -> ChainSpec:
    return _build_chain(enumerate_states(lam, n, "tazrp"), ktazrp_transitions)


def _build_chain(states, rule) -> ChainSpec:
    index = {s: i for i, s in enumerate(states)}
    transitions = []
    for i, s in enumerate(states):
        for target, rate in rule(s):
            j = index[target]
            if j != i:
                transitions.append((i, j, rate))
    return ChainSpec(tuple(states), tuple(transitions))


# ---------------------------------------------------------------------------
# exact stationary distribution
# ---------------------------------------------------------------------------


def _strongly_connected(n_states: int, transitions) -> bool:
    fwd = defaultdict(list)
    bwd = defaultdict(list)
    for src, dst, _ in transitions:
        fwd[src].append(dst)
        bwd[dst].append(src)

    def reach(adj):
        seen = {0}
        stack = [0]
        while stack:
            for nb in adj[stack.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        return seen

    return len(reach(fwd)) == n_states and len(reach(bwd)) == n_states


def nullspace(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    """Basis of the right null space of a rational matrix, by row reduction."""
    m = [list(map(Fraction, r)) for r in rows]
    if not m:
        return []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    basis = []
    free = [c for c in range(ncols) if c not in pivots]
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for ri, pc in enumerate(pivots):
            v[pc] = -m[ri][fc]
        basis.append(v)
    return basis


def stationary_exact(chain: ChainSpec) -> RationalDistribution:
    """Exact stationary law: null space of the transposed generator, verified.

    Raises :class:`ChainError` when the chain is empty, not strongly
    connected, or the null space is not one-dimensional.
    """
    ns = len(chain.states)
    if ns == 0:
        raise ChainError("empty chain")
    if not _strongly_connected(ns, chain.transitions):
        raise ChainError("chain is not irreducible")
    # generator Q: Q[i][j] = total rate i -> j, diagonal makes rows sum to 0
    q = [[Fraction(0)] * ns for _ in range(ns)]
    for src, dst, rate in chain.transitions:
        q[src][dst] += rate
        q[src][src] -= rate
    qt = [[q[j][i] for j in range(ns)] for i in range(ns)]
    basis = nullspace(qt)
    if len(basis) != 1:
        raise ChainError(f"null space has dimension {len(basis)}, expected 1")
    v = basis[0]
    total = sum(v, Fraction(0))
    if total == 0:
        raise ChainError("degenerate null vector")
    probs = [vi / total for vi in v]
    if any(p <= 0 for p in probs):
        raise ChainError("stationary vector is not strictly positive")
    # balance: total flux out of each state equals total flux in
    for i in range(ns):
        out_flux = sum(probs[i] * rate for src, _, rate in chain.transitions if src == i)
        in_flux = sum(probs[src] * rate for src, dst, rate in chain.transitions if dst == i)
        if out_flux != in_flux:
            raise ChainError("balance equation violated by solver output")
    return RationalDistribution(dict(zip(chain.states, probs)))


# ---------------------------------------------------------------------------
# ringing paths
# ---------------------------------------------------------------------------


def ring_forward(q: FermionicMLQ, i: int) -> tuple[FermionicMLQ, int]:
    """Forward ringing transition of a fermionic queue at site i, rate 1.

    The path enters each row, stays put on a particle and steps right past a
    hole; every particle the path lands on hops one site left when its left
    neighbour is free.
    """
    n = q.n
    if not 1 <= i <= n:
        raise IndexError(f"site {i} outside 1..{n}")
    a = i
    new_rows = []
    for row in q.rows:
        cells = set(row)
        if a in cells:
            left = _wrap(a - 1, n)
            if left not in cells:
                cells.remove(a)
                cells.add(left)
            nxt = a
        else:
            nxt = _wrap(a + 1, n)
        new_rows.append(tuple(sorted(cells)))
        a = nxt
    return FermionicMLQ(q.n, tuple(new_rows)), a


def ring_reverse(q: FermionicMLQ, i: int) -> tuple[FermionicMLQ, int]:
    """Inverse of :func:`ring_forward`: descends the rows undoing the hops."""
    n = q.n
    if not 1 <= i <= n:
        raise IndexError(f"site {i} outside 1..{n}")
    c = i
    new_rows = list(q.rows)
    for j in range(q.k, 0, -1):
        cells = set(q.rows[j - 1])
        left = _wrap(c - 1, n)
        if left in cells:
            if c not in cells:
                cells.remove(left)
                cells.add(c)
            nxt = c
        else:
            nxt = _wrap(c - 1, n)
        new_rows[j - 1] = tuple(sorted(cells))
        c = nxt
    return FermionicMLQ(q.n, tuple(new_rows)), c


def _column_empty(q: BosonicMLQ, i: int) -> bool:
    return all(i not in row for row in q.rows)


def ring_forward_bosonic(d: BosonicMLQ, i: int, x: RateParams | None = None) -> tuple[BosonicMLQ, int, Fraction]:
    """Forward ringing transition of a bosonic queue at site i.

    One particle hops right out of every occupied site the path visits; the
    path steps right exactly when it leaves an occupied site.  Returns the new
    queue, the exit site, and the rate (1 on an empty column, else 1/x_i).
    """
    n = d.n
    if not 1 <= i <= n:
        raise IndexError(f"site {i} outside 1..{n}")
    x = x or RateParams.ones(n)
    a = i
    new_rows = []
    for row in d.rows:
        cnt = Counter(row)
        if cnt[a]:
            cnt[a] -= 1
            cnt[_wrap(a + 1, n)] += 1
            nxt = _wrap(a + 1, n)
        else:
            nxt = a
        new_rows.append(tuple(sorted(cnt.elements())))
        a = nxt
    rate = Fraction(1) if _column_empty(d, i) else Fraction(1) / x[i]
    return BosonicMLQ(d.n, tuple(new_rows)), _wrap(a - 1, n), rate


def ring_reverse_bosonic(d: BosonicMLQ, i: int, x: RateParams | None = None) -> tuple[BosonicMLQ, int, Fraction]:
    """Inverse of :func:`ring_forward_bosonic`.

    The rate mirrors the forward rule through the time reversal: 1 when
    column i+1 is empty, else 1/x_{i+1}.
    """
    n = d.n
    if not 1 <= i <= n:
        raise IndexError(f"site {i} outside 1..{n}")
    x = x or RateParams.ones(n)
    # path values b_L..b_0; b_j depends on row j+1
    b = [0] * (d.k + 1)
    b[d.k] = i
    for j in range(d.k - 1, -1, -1):
        above = d.rows[j]  # row j+1
        b[j] = _wrap(b[j + 1] - 1, n) if _wrap(b[j + 1] + 1, n) in above else b[j + 1]
    new_rows = []
    for t in range(1, d.k + 1):
        cnt = Counter(d.rows[t - 1])
        src = _wrap(b[t] + 1, n)
        if cnt[src]:
            cnt[src] -= 1
            cnt[b[t]] += 1
        new_rows.append(tuple(sorted(cnt.elements())))
    nxt = _wrap(i + 1, n)
    rate = Fraction(1) if _column_empty(d, nxt) else Fraction(1) / x[nxt]
    return BosonicMLQ(d.n, tuple(new_rows)), _wrap(b[0] + 1, n), rate


def mlq_chain(kind: str, alpha: Sequence[int], n: int, x: RateParams | None = None) -> ChainSpec:
    """Ringing-path chain on a queue family.

    The fermionic chain is only defined for straight shapes (twisted fermionic
    ringing does not project to the exclusion process); the bosonic chain
    accepts any composition.  Self-loop ringings (empty columns) are dropped.
    """
    if kind == "fermionic":
        if any(a < b for a, b in zip(alpha, list(alpha)[1:])):
            raise ShapeError(f"fermionic ringing chain needs a straight shape, got {tuple(alpha)}")
        states = list(enumerate_queues(alpha, n, "fermionic"))
        index = {s: i for i, s in enumerate(states)}
        transitions = []
        for idx, qstate in enumerate(states):
            for site in range(1, n + 1):
                img, _ = ring_forward(qstate, site)
                if img != qstate:
                    transitions.append((idx, index[img], Fraction(1)))
        return ChainSpec(tuple(states), tuple(transitions))
    if kind == "bosonic":
        x = x or RateParams.ones(n)
        states = list(enumerate_queues(alpha, n, "bosonic"))
        index = {s: i for i, s in enumerate(states)}
        transitions = []
        for idx, dstate in enumerate(states):
            for site in range(1, n + 1):
                img, _, rate = ring_forward_bosonic(dstate, site, x)
                if img != dstate:
                    transitions.append((idx, index[img], rate))
        return ChainSpec(tuple(states), tuple(transitions))
    raise ValueError(f"unknown kind {kind!r}")


# ---------------------------------------------------------------------------
# simulation
# ---------------------------------------------------------------------------


def simulate_ctmc(chain: ChainSpec, seed: int, jumps: int) -> dict:
    """Occupation-time frequencies from a seeded jump-by-jump simulation.

    Holding times are exponential with the exact exit rate; the trajectory and
    the returned table are bitwise reproducible for a fixed seed.  Reaching a
    state with no outgoing transition raises :class:`ChainError`.
    """
    ns = len(chain.states)
    if ns == 0:
        raise ChainError("empty chain")
    edges: list[list[tuple[int, float]]] = [[] for _ in range(ns)]
    for src, dst, rate in chain.transitions:
        edges[src].append((dst, float(rate)))
    rng = random.Random(seed)
    occupation = [0.0] * ns
    state = 0
    for _ in range(jumps):
        total = sum(r for _, r in edges[state])
        if total <= 0:
            raise ChainError(f"absorbing state reached: {chain.states[state]!r}")
        occupation[state] += rng.expovariate(total)
        u = rng.random() * total
        acc = 0.0
        nxt = edges[state][-1][0]
        for dst, r in edges[state]:
            acc += r
            if u <= acc:
                nxt = dst
                break
        state = nxt
    span = sum(occupation)
    return {s: occupation[i] / span for i, s in enumerate(chain.states)}
