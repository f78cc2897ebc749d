from __future__ import annotations

import random
from itertools import product

import pytest
from hypothesis import given, strategies as st

from shiftlab import gf2
from shiftlab.config import Budget, first_hit, ordered_map
from shiftlab.csp import Problem
from shiftlab.errors import BudgetExceeded


def random_problem(seed: int, n: int = 6, k: int = 3):
    rng = random.Random(seed)
    prob = Problem([(1 << k) - 1] * n)
    cons = []
    for _ in range(rng.randint(0, 8)):
        sites = rng.sample(range(n), rng.randint(1, 3))
        values = [rng.randrange(k) for _ in sites]
        prob.add_forbid(sites, values)
        cons.append((sites, values))
    return prob, cons, n, k


def brute(cons, n, k):
    out = []
    for vals in product(range(k), repeat=n):
        if not any(all(vals[s] == v for s, v in zip(sites, values)) for sites, values in cons):
            out.append(vals)
    return out


class TestProblem:
    @given(st.integers(0, 10**6))
    def test_matches_brute_force(self, seed):
        prob, cons, n, k = random_problem(seed)
        assert list(prob.solutions()) == brute(cons, n, k)

    @given(st.integers(0, 10**6), st.integers(0, 6))
    def test_projection(self, seed, cut):
        prob, cons, n, k = random_problem(seed)
        expect = sorted({s[:cut] for s in brute(cons, n, k)})
        assert list(prob.solutions(project=cut)) == expect
        assert list(prob.solutions(project=cut, blocks=prob.components(cut))) == expect

    @given(st.integers(0, 10**6))
    def test_fixed(self, seed):
        prob, cons, n, k = random_problem(seed)
        got = list(prob.solutions(fixed={0: 1, 3: 2}))
        assert got == [s for s in brute(cons, n, k) if s[0] == 1 and s[3] == 2]

    def test_parity(self):
        prob = Problem([3] * 4)
        prob.add_parity([0, 1, 2])
        prob.add_parity([1, 2, 3, 3])
        sols = list(prob.solutions())
        assert len(sols) == 4
        assert all((a ^ b ^ c) == 0 and (b ^ c) == 0 for a, b, c, _ in sols)

    def test_components(self):
        prob = Problem([3] * 5)
        prob.add_forbid([0, 2], [1, 1])
        prob.add_forbid([2, 3], [1, 1])
        assert prob.components(1) == [[1], [2, 3], [4]]

    def test_budget(self):
        prob = Problem([3] * 20)
        b = Budget(1000)
        with pytest.raises(BudgetExceeded):
            prob.count(budget=b)
        assert b.used > 1000


class TestGF2:
    @given(st.lists(st.integers(0, 2**8 - 1), max_size=10))
    def test_kernel(self, rows):
        n = 8
        ker = gf2.kernel(rows, n)
        assert len(ker) == n - gf2.rank(rows)
        for v in ker:
            assert all(bin(v & r).count("1") % 2 == 0 for r in rows)
        assert gf2.rank(ker) == len(ker)

    @given(st.lists(st.integers(0, 2**6 - 1), max_size=6), st.integers(0, 2**6 - 1))
    def test_vanishing_on(self, vecs, mask):
        span = {0}
        for v in vecs:
            span |= {s ^ v for s in span}
        expect = {s for s in span if not s & mask}
        got = gf2.vanishing_on(vecs, mask)
        sub = {0}
        for v in got:
            sub |= {s ^ v for s in sub}
        assert sub == expect

    @given(st.lists(st.integers(1, 2**6 - 1), min_size=1, max_size=6))
    def test_least_nonzero(self, vecs):
        b = gf2.Basis(vecs)
        span = {0}
        for v in vecs:
            span |= {s ^ v for s in span}
        # coordinate 0 most significant
        least = min((s for s in span if s), key=lambda s: gf2.bits(s, 6))
        assert b.least_nonzero() == least

    def test_solvable(self):
        assert gf2.solvable([(0b11, 1), (0b01, 0)])
        assert not gf2.solvable([(0b11, 1), (0b01, 0), (0b10, 0)])

    def test_bits_roundtrip(self):
        assert gf2.from_bits(gf2.bits(0b10110, 5)) == 0b10110


def test_ordered_map_and_first_hit():
    assert ordered_map(lambda x: x * x, range(10), 4) == [x * x for x in range(10)]
    f = lambda x: x if x % 3 == 2 and x > 2 else None
    assert first_hit(f, range(20), 1) == first_hit(f, range(20), 8) == 5
    assert first_hit(lambda x: None, range(5), 3) is None
