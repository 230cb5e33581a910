import itertools
import random
from functools import lru_cache

import pytest

from mlqueues import Token, cyclic_match, pair_strictly_left, pair_weakly_right


def toks(pattern: str) -> tuple[Token, ...]:
    """Token sequence from a bracket string; positions double as sites."""
    return tuple(
        Token("open" if c == "(" else "close", i + 1, "upper" if c == "(" else "lower", 0)
        for i, c in enumerate(pattern)
    )


def oracle_unmatched(tokens):
    """Recursive elimination of cyclically adjacent open/close pairs.

    Removes any open whose cyclically next surviving token is a close,
    branching over every elimination order; returns the set of terminal
    survivor index-sets.  Independent of the stack/wrap implementation.
    """
    n = len(tokens)

    @lru_cache(maxsize=None)
    def terminals(remaining: frozenset) -> frozenset:
        order = sorted(remaining)
        moves = []
        for pos, idx in enumerate(order):
            nxt = order[(pos + 1) % len(order)]
            if idx != nxt and tokens[idx].kind == "open" and tokens[nxt].kind == "close":
                moves.append((idx, nxt))
        if not moves:
            return frozenset([remaining])
        out = set()
        for a, b in moves:
            out |= terminals(remaining - {a, b})
        return frozenset(out)

    return terminals(frozenset(range(n)))


class TestCyclicMatch:
    @pytest.mark.parametrize(
        "pattern,unmatched_positions",
        [
            ("())()((", (6,)),  # one stranded open
            ("))(())", (1, 2)),  # two stranded closes at the prefix
            ("()()()", ()),
            (")(", ()),  # wrap pair
            ("", ()),
        ],
    )
    def test_bracket_strings(self, pattern, unmatched_positions):
        pairs, unmatched = cyclic_match(toks(pattern))
        assert tuple(sorted(t.site for t in unmatched)) == unmatched_positions
        assert 2 * len(pairs) + len(unmatched) == len(pattern)

    def test_homogeneous_leftovers(self):
        rng = random.Random(3)
        for _ in range(300):
            pattern = "".join(rng.choice("()") for _ in range(rng.randint(0, 12)))
            _, unmatched = cyclic_match(toks(pattern))
            kinds = {t.kind for t in unmatched}
            assert len(kinds) <= 1

    def test_no_unmatched_token_inside_any_pair(self):
        rng = random.Random(4)
        for _ in range(200):
            pattern = "".join(rng.choice("()") for _ in range(rng.randint(1, 12)))
            tokens = toks(pattern)
            pairs, unmatched = cyclic_match(tokens)
            loose = {t.site for t in unmatched}
            for open_tok, close_tok in pairs:
                inside = set()
                j = open_tok.site % len(tokens) + 1
                while j != close_tok.site:
                    inside.add(j)
                    j = j % len(tokens) + 1
                assert not (inside & loose)

    def test_agrees_with_recursive_oracle(self):
        rng = random.Random(9)
        patterns = ["".join(rng.choice("()") for _ in range(rng.randint(0, 12))) for _ in range(150)]
        patterns += ["())()((", "))(())", ")))(((", "((()))"]
        for pattern in patterns:
            tokens = toks(pattern)
            _, unmatched = cyclic_match(tokens)
            got = frozenset(t.site - 1 for t in unmatched)
            terminal_sets = oracle_unmatched(tokens)
            assert len(terminal_sets) == 1, f"oracle not confluent on {pattern!r}"
            assert got == next(iter(terminal_sets)), pattern


class TestWeaklyRight:
    def test_example_pair(self):
        res = pair_weakly_right({1, 2, 4}, {1, 3, 5, 6}, 6)
        assert res.unpaired_upper == (5,)
        assert res.unpaired_lower == ()
        assert set(res.pairs) == {(1, 1), (3, 4), (6, 2)}

    def test_example_pair_shifted_roles(self):
        res = pair_weakly_right({1, 3, 5, 6}, {2, 3}, 6)
        assert res.unpaired_lower == (1, 6)
        assert res.unpaired_upper == ()
        assert set(res.pairs) == {(2, 5), (3, 3)}

    def test_equal_rows_pair_in_place(self):
        res = pair_weakly_right({2, 4, 5}, {2, 4, 5}, 6)
        assert res.pairs == ((2, 2), (4, 4), (5, 5))
        assert res.unpaired_upper == res.unpaired_lower == ()

    def test_pair_count_is_min(self):
        rng = random.Random(7)
        for _ in range(200):
            n = rng.randint(1, 8)
            a = set(rng.sample(range(1, n + 1), rng.randint(0, n)))
            b = set(rng.sample(range(1, n + 1), rng.randint(0, n)))
            res = pair_weakly_right(a, b, n)
            assert len(res.pairs) == min(len(a), len(b))
            assert len(res.unpaired_lower) == len(a) - len(res.pairs)
            assert len(res.unpaired_upper) == len(b) - len(res.pairs)

    def test_rotation_equivariance(self):
        rng = random.Random(8)
        for _ in range(60):
            n = rng.randint(2, 8)
            a = set(rng.sample(range(1, n + 1), rng.randint(0, n)))
            b = set(rng.sample(range(1, n + 1), rng.randint(0, n)))
            base = pair_weakly_right(a, b, n)
            for shift in range(1, n):
                rot = lambda s: {(x - 1 + shift) % n + 1 for x in s}
                res = pair_weakly_right(rot(a), rot(b), n)
                assert sorted((x - 1 + shift) % n + 1 for x in base.unpaired_lower) == list(res.unpaired_lower)
                assert sorted((x - 1 + shift) % n + 1 for x in base.unpaired_upper) == list(res.unpaired_upper)
                assert sorted((x - 1 + shift) % n + 1 for x in base.paired_lower) == list(res.paired_lower)
                assert sorted((x - 1 + shift) % n + 1 for x in base.paired_upper) == list(res.paired_upper)

    def test_duplicate_site_rejected(self):
        with pytest.raises(ValueError):
            pair_weakly_right([1, 1], [2], 3)

    def test_matched_sites_agree_with_oracle_exhaustive(self):
        for n in (2, 3, 4, 5):
            sites = list(range(1, n + 1))
            subsets = list(
                itertools.chain.from_iterable(itertools.combinations(sites, r) for r in range(min(n, 4) + 1))
            )
            for a in subsets:
                for b in subsets:
                    res = pair_weakly_right(a, b, n)
                    tokens = []
                    for j in sites:
                        if j in b:
                            tokens.append(Token("open", j, "upper", 0))
                        if j in a:
                            tokens.append(Token("close", j, "lower", 0))
                    terminal_sets = oracle_unmatched(tuple(tokens))
                    assert len(terminal_sets) == 1
                    survivors = [tokens[i] for i in next(iter(terminal_sets))]
                    assert sorted(t.site for t in survivors if t.row == "lower") == list(res.unpaired_lower)
                    assert sorted(t.site for t in survivors if t.row == "upper") == list(res.unpaired_upper)


class TestStrictlyLeft:
    def test_example_pair(self):
        res = pair_strictly_left([1, 2, 2, 4, 5], [2, 2], 6)
        assert res.unpaired_lower == (2, 2, 4)
        assert res.unpaired_upper == ()
        assert set(res.pairs) == {(2, 1), (2, 5)}

    def test_example_pair_shifted_roles(self):
        res = pair_strictly_left([2, 2], [1, 2, 4, 6], 6)
        assert res.unpaired_upper == (1, 2)
        assert set(res.pairs) == {(4, 2), (6, 2)}

    def test_empty_upper(self):
        res = pair_strictly_left([1, 3, 3], [], 4)
        assert res.pairs == ()
        assert res.unpaired_lower == (1, 3, 3)

    def test_same_site_pairing_needs_full_wrap(self):
        # a lone particle above a lone particle at the same site still pairs,
        # via the line that travels the whole circle
        res = pair_strictly_left([2], [2], 3)
        assert res.pairs == ((2, 2),)

    def test_pair_count_is_min(self):
        rng = random.Random(13)
        for _ in range(200):
            n = rng.randint(1, 6)
            a = rng.choices(range(1, n + 1), k=rng.randint(0, 4))
            b = rng.choices(range(1, n + 1), k=rng.randint(0, 4))
            res = pair_strictly_left(a, b, n)
            assert len(res.pairs) == min(len(a), len(b))

    def test_rotation_equivariance(self):
        rng = random.Random(14)
        for _ in range(60):
            n = rng.randint(2, 8)
            a = rng.choices(range(1, n + 1), k=rng.randint(0, 5))
            b = rng.choices(range(1, n + 1), k=rng.randint(0, 5))
            base = pair_strictly_left(a, b, n)
            for shift in range(1, n):
                rot = lambda s: [(x - 1 + shift) % n + 1 for x in s]
                res = pair_strictly_left(rot(a), rot(b), n)
                assert sorted((x - 1 + shift) % n + 1 for x in base.unpaired_lower) == list(res.unpaired_lower)
                assert sorted((x - 1 + shift) % n + 1 for x in base.unpaired_upper) == list(res.unpaired_upper)

    def test_matched_sites_agree_with_oracle(self):
        # exhaustive over small two-row bosonic configurations
        for n in (2, 3):
            rows = list(itertools.combinations_with_replacement(range(1, n + 1), 2))
            rows += [(j,) for j in range(1, n + 1)] + [()]
            for a in rows:
                for b in rows:
                    res = pair_strictly_left(a, b, n)
                    tokens = []
                    for j in range(1, n + 1):
                        tokens.extend(Token("close", j, "upper", i) for i in range(b.count(j)))
                        tokens.extend(Token("open", j, "lower", i) for i in range(a.count(j)))
                    terminal_sets = oracle_unmatched(tuple(tokens))
                    assert len(terminal_sets) == 1
                    survivors = [tokens[i] for i in next(iter(terminal_sets))]
                    assert sorted(t.site for t in survivors if t.row == "lower") == list(res.unpaired_lower)
                    assert sorted(t.site for t in survivors if t.row == "upper") == list(res.unpaired_upper)
