from __future__ import annotations

import math
import random
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from shiftlab import zoo
from shiftlab.admissible import Admissibility
from shiftlab.config import Config
from shiftlab.entropy import (
    IndependenceReport,
    beta_from_delta,
    cyclic_microstate_count,
    entropy_series,
    independence_density,
    naive_entropy_upper,
    rate,
    transfer_matrix_entropy,
    verify_independence,
)
from shiftlab.errors import NonAmenableGroupError, UsageError
from shiftlab.shift import ExactZ, LocalMargin, Pattern

from conftest import F2, Z, Z2, interval, random_z_sft

GOLDEN = math.log((1 + math.sqrt(5)) / 2)


def zero_one(spec):
    grp = spec.group
    return [Pattern(grp, {grp.identity: 0}), Pattern(grp, {grp.identity: 1})]


def brute_independence(spec, cylinders, ambient, level):
    from shiftlab.entropy import _independent

    adm = Admissibility(spec, level)
    ambient = spec.group.canonical(ambient)
    for size in range(len(ambient), 0, -1):
        for members in combinations(ambient, size):
            if _independent(spec, adm, cylinders, list(members), {}):
                return size
    return 0


class TestSeries:
    def test_rate(self):
        assert rate(0, 4) is None
        assert rate(1, 4) == 0.0
        assert rate(8, 3) == pytest.approx(math.log(2))

    def test_golden_exact(self):
        s = entropy_series(zoo.golden_mean(), [4, 8, 12], ExactZ())
        assert [r[2] for r in s.rows] == [8, 55, 377]
        assert abs(s.last_rate - GOLDEN) < 0.05
        assert s.folner and s.label == "entropy"

    def test_rates_decrease_for_golden(self):
        rates = entropy_series(zoo.golden_mean(), list(range(2, 14, 2)), ExactZ()).rates
        assert rates == sorted(rates, reverse=True)
        assert all(r >= GOLDEN for r in rates)

    @pytest.mark.parametrize("k", [2, 3])
    def test_full_shift_exact(self, k):
        spec = zoo.full_shift(Z2, k)
        s = entropy_series(spec, [1, 2, 3])
        assert [r[2] for r in s.rows] == [k, k**4, k**9]
        assert all(r == math.log(k**n) / n for r, n in zip(s.rates, (1, 4, 9)))

    def test_free_group_needs_named_windows(self):
        spec = zoo.five_dot_cross()
        with pytest.raises(NonAmenableGroupError):
            entropy_series(spec, [2])
        s = entropy_series(spec, [("B1", F2.ball(1)), ("B2", F2.ball(2))])
        assert not s.folner and s.label == "window rates"
        assert s.rows[0][2] == 16

    def test_sunny_rate(self):
        s = entropy_series(zoo.sunny_side_up(), [32])
        assert s.rows[0][2] == 33
        assert s.last_rate <= math.log(33) / 32 + 1e-15

    def test_ledrappier_boxes(self):
        s = entropy_series(zoo.ledrappier(), [1, 2, 3, 4, 5])
        assert [r[2] for r in s.rows] == [2 ** (2 * n - 1) for n in range(1, 6)]

    def test_threads_agree(self):
        a = entropy_series(zoo.golden_mean(), [3, 6, 9], config=Config(threads=1))
        b = entropy_series(zoo.golden_mean(), [3, 6, 9], config=Config(threads=8))
        assert a.rows == b.rows

    def test_transfer_matrix(self):
        assert abs(transfer_matrix_entropy(zoo.golden_mean()) - GOLDEN) < 1e-9

    @given(st.integers(0, 10**6))
    def test_transfer_bounds_exact_rates(self, seed):
        spec = random_z_sft(random.Random(seed))
        aut_count = Admissibility(spec, ExactZ()).count(interval(0, 10))
        if aut_count == 0:
            return
        h = transfer_matrix_entropy(spec)
        # subadditivity: h <= ln|L_n| / n
        assert h <= math.log(aut_count) / 10 + 1e-9


class TestNaive:
    def test_full_shift(self):
        nb = naive_entropy_upper(zoo.full_shift(Z, 3), [interval(0, 2), interval(0, 5)])
        assert nb.value == pytest.approx(math.log(3))

    def test_argmin(self):
        nb = naive_entropy_upper(zoo.golden_mean(), [interval(0, 2), interval(0, 10)], ExactZ())
        assert nb.argmin == interval(0, 10)
        assert nb.value == pytest.approx(math.log(144) / 10)


class TestIndependence:
    def test_hard_square_half(self):
        spec = zoo.golden_mean()
        rep = independence_density(spec, zero_one(spec), interval(0, 10))
        assert rep.density == 0.5 and rep.exact
        assert rep.best == tuple((i,) for i in range(0, 10, 2))
        assert verify_independence(spec, rep)

    def test_full_shift_one(self):
        spec = zoo.full_shift(F2, 2)
        rep = independence_density(spec, zero_one(spec), F2.ball(1))
        assert rep.density == 1.0

    def test_sunny_single(self):
        spec = zoo.sunny_side_up()
        rep = independence_density(spec, zero_one(spec), interval(0, 6))
        assert len(rep.best) == 1

    @given(st.integers(0, 10**6))
    def test_matches_brute_force(self, seed):
        spec = random_z_sft(random.Random(seed))
        cyl = zero_one(spec)
        rep = independence_density(spec, cyl, interval(0, 6), "margin:1")
        assert len(rep.best) == brute_independence(spec, cyl, interval(0, 6), LocalMargin(1))
        assert verify_independence(spec, rep)

    def test_tampered(self):
        spec = zoo.golden_mean()
        rep = independence_density(spec, zero_one(spec), interval(0, 4))
        bad = IndependenceReport(rep.cylinders, rep.ambient, ((0,), (1,)), rep.level)
        assert not verify_independence(spec, bad)

    def test_repeated_member_rejected(self):
        spec = zoo.full_shift(Z, 2)
        rep = independence_density(spec, zero_one(spec), interval(0, 3))
        bad = IndependenceReport(rep.cylinders, rep.ambient, rep.best + rep.best[:1], rep.level)
        assert not verify_independence(spec, bad)

    def test_budget_marks_inexact(self):
        spec = zoo.golden_mean()
        rep = independence_density(spec, zero_one(spec), interval(0, 12), config=Config(budget=20))
        assert not rep.exact
        assert verify_independence(spec, rep)

    def test_rejects_duplicates(self):
        spec = zoo.golden_mean()
        c = zero_one(spec)[0]
        with pytest.raises(UsageError):
            independence_density(spec, [c, c], interval(0, 3))


class TestMicrostates:
    def test_lucas(self):
        assert cyclic_microstate_count(zoo.golden_mean(), 4).count == 7
        m = cyclic_microstate_count(zoo.golden_mean(), 16)
        assert abs(m.rate - GOLDEN) < 0.05

    def test_beta_monotone(self):
        counts = [cyclic_microstate_count(zoo.golden_mean(), 8, b).count for b in range(10)]
        assert counts == sorted(counts) and counts[-1] == 2**8

    def test_beta_from_delta(self):
        assert beta_from_delta(0.0, 10) == 0
        assert beta_from_delta(0.5, 16) == 4
        with pytest.raises(UsageError):
            beta_from_delta(-1, 4)

    def test_needs_z(self):
        with pytest.raises(UsageError):
            cyclic_microstate_count(zoo.five_dot_cross(), 4)
