from __future__ import annotations

import random
from itertools import product

import pytest
from hypothesis import given, strategies as st

from shiftlab import zoo
from shiftlab.admissible import Admissibility
from shiftlab.errors import UsageError
from shiftlab.shift import Alphabet, ExactZ, LinearGF2, LocalMargin, Pattern, SubshiftSpec
from shiftlab.tmp import (
    Counterexample,
    HomoclinicWitness,
    Holds,
    NoneUpToScale,
    PairWitness,
    check_memory_set,
    find_interchangeable_pair,
    homoclinic_search,
    splice,
    strong_tmp_scan,
    validate_counterexample,
    validate_homoclinic,
    validate_pair,
)

from conftest import F2, Z, Z2, interval, random_z_sft


def admissible_on(spec, window, level):
    """Every admissible pattern on ``window`` by filtering all labelings."""
    adm = Admissibility(spec, level)
    window = spec.group.canonical(window)
    out = []
    for vals in product(range(len(spec.alphabet)), repeat=len(window)):
        p = Pattern.from_values(spec.group, window, vals)
        if adm.is_admissible(p):
            out.append(p)
    return out


def brute_memory_holds(spec, inner, outer, window, level):
    adm = Admissibility(spec, level)
    ring = [g for g in outer if g not in set(inner)]
    pats = admissible_on(spec, window, level)
    for x in pats:
        for y in pats:
            if all(x[g] == y[g] for g in ring) and not adm.is_admissible(splice(x, y, inner)):
                return False
    return True


def brute_least_pair(spec, inner, window, level):
    grp = spec.group
    inner = grp.canonical(inner)
    rest = tuple(g for g in grp.canonical(window) if g not in set(inner))
    adm = Admissibility(spec, level)
    k = len(spec.alphabet)
    for pv in product(range(k), repeat=len(inner)):
        for qv in product(range(k), repeat=len(inner)):
            if qv >= pv:
                break
            for cv in product(range(k), repeat=len(rest)):
                ctx = dict(zip(rest, cv))
                p = Pattern(grp, {**dict(zip(inner, pv)), **ctx})
                q = Pattern(grp, {**dict(zip(inner, qv)), **ctx})
                if adm.is_admissible(p) and adm.is_admissible(q):
                    return pv, qv, cv
    return None


class TestSplice:
    def test_basic(self):
        x = Pattern(Z, {(0,): 1, (1,): 1})
        y = Pattern(Z, {(0,): 0, (1,): 0})
        assert splice(x, y, [(0,)]) == Pattern(Z, {(0,): 1, (1,): 0})

    def test_requires_same_support(self):
        with pytest.raises(UsageError):
            splice(Pattern(Z, {(0,): 1}), Pattern(Z, {(1,): 1}), [(0,)])


class TestMemorySets:
    def test_full_shift_holds(self):
        v = check_memory_set(zoo.full_shift(Z, 2), [(0,)], [(0,)], interval(-1, 2))
        assert isinstance(v, Holds)

    @pytest.mark.parametrize("n", range(1, 5))
    def test_sunny_counterexample(self, n):
        spec = zoo.sunny_side_up()
        box = Z.folner_window(n)
        window = Z.folner_window(n + 2)
        v = check_memory_set(spec, [(0,)], box, window)
        assert isinstance(v, Counterexample)
        assert validate_counterexample(spec, v)
        assert sum(v.x.values) == sum(v.y.values) == 1
        assert not v.absolute

    def test_golden_exact(self):
        spec = zoo.golden_mean()
        v = check_memory_set(spec, [(0,)], interval(-1, 2), interval(-3, 4), ExactZ())
        assert isinstance(v, Holds)
        v = check_memory_set(spec, interval(0, 2), interval(0, 2), interval(-1, 3), ExactZ())
        assert isinstance(v, Counterexample) and v.absolute
        assert validate_counterexample(spec, v)

    def test_not_nested(self):
        with pytest.raises(UsageError):
            check_memory_set(zoo.golden_mean(), [(5,)], [(0,)], interval(0, 2))

    @given(st.integers(0, 10**6), st.integers(0, 1), st.sampled_from(["margin:0", "margin:1", "exact-z"]))
    def test_matches_brute_force(self, seed, grow, level):
        spec = random_z_sft(random.Random(seed))
        inner = [(0,)]
        outer = interval(-grow, grow + 1)
        window = interval(-grow - 1, grow + 2)
        v = check_memory_set(spec, inner, outer, window, level)
        assert isinstance(v, Holds) == brute_memory_holds(spec, inner, outer, window, level)
        if isinstance(v, Counterexample):
            assert validate_counterexample(spec, v)

    @given(st.integers(0, 10**6))
    def test_linear_matches_brute_force(self, seed):
        rng = random.Random(seed)
        shape = ((0,),) + tuple((i,) for i in sorted(rng.sample(range(1, 4), rng.randint(1, 2))))
        spec = SubshiftSpec(Z, Alphabet.binary(True), LinearGF2((shape,)))
        inner, outer, window = [(0,)], interval(-1, 2), interval(-2, 4)
        v = check_memory_set(spec, inner, outer, window)
        assert isinstance(v, Holds) == brute_memory_holds(spec, inner, outer, window, LocalMargin(0))
        if isinstance(v, Counterexample):
            assert validate_counterexample(spec, v)

    def test_tampered_counterexample_rejected(self):
        spec = zoo.sunny_side_up()
        v = check_memory_set(spec, [(0,)], interval(0, 2), interval(0, 4))
        bad = Counterexample(v.level, v.inner, v.outer, v.window, v.x, v.x)
        assert not validate_counterexample(spec, bad)


class TestScan:
    def test_full_shift(self):
        rep = strong_tmp_scan(zoo.full_shift(Z, 3), interval(-1, 2), [[(0,)], interval(0, 2)])
        assert rep.all_hold and len(rep.results) == 2

    def test_cross(self):
        rep = strong_tmp_scan(zoo.five_dot_cross(), F2.ball(2), [F2.ball(1)], level="margin:1")
        assert rep.all_hold

    def test_sunny_fails(self):
        rep = strong_tmp_scan(zoo.sunny_side_up(), interval(-1, 2), [[(0,)]], growth=2)
        assert not rep.all_hold

    def test_sides_agree_on_abelian(self):
        spec = zoo.golden_mean()
        a = strong_tmp_scan(spec, interval(-1, 2), [[(0,)]], side="right", level="exact-z")
        b = strong_tmp_scan(spec, interval(-1, 2), [[(0,)]], side="left", level="exact-z")
        assert type(a.results[0][1]) is type(b.results[0][1])

    def test_margin_needs_identity(self):
        with pytest.raises(UsageError):
            strong_tmp_scan(zoo.golden_mean(), [(1,)], [[(0,)]])


class TestPairs:
    def test_hard_square(self):
        spec = zoo.golden_mean()
        w = find_interchangeable_pair(spec, [(0,)], interval(-1, 2))
        assert isinstance(w, PairWitness) and validate_pair(spec, w)
        assert w.p.values == (1,) and w.q.values == (0,)
        assert set(w.context.values) == {0}

    def test_cross_none(self):
        spec = zoo.five_dot_cross()
        for method in ("linear", "dfs"):
            w = find_interchangeable_pair(spec, F2.ball(1), F2.ball(2), method=method)
            assert isinstance(w, NoneUpToScale)

    @given(st.integers(0, 10**6), st.sampled_from(["margin:0", "margin:1", "exact-z"]))
    def test_least_matches_brute_force(self, seed, level):
        spec = random_z_sft(random.Random(seed))
        inner, window = interval(0, 2), interval(-1, 3)
        w = find_interchangeable_pair(spec, inner, window, level)
        expect = brute_least_pair(spec, inner, window, level)
        if expect is None:
            assert isinstance(w, NoneUpToScale)
        else:
            assert validate_pair(spec, w)
            assert (w.p.values, w.q.values, w.context.values) == expect

    @given(st.integers(0, 10**6))
    def test_linear_pair_agrees_with_dfs(self, seed):
        rng = random.Random(seed)
        shape = ((0, 0),) + tuple(rng.sample([(1, 0), (0, 1), (1, 1)], rng.randint(1, 2)))
        spec = SubshiftSpec(Z2, Alphabet.binary(True), LinearGF2((shape,)))
        a = find_interchangeable_pair(spec, [(0, 0)], Z2.ball(1), method="linear")
        b = find_interchangeable_pair(spec, [(0, 0)], Z2.ball(1), method="dfs")
        assert type(a) is type(b)
        if isinstance(a, PairWitness):
            assert validate_pair(spec, a)

    def test_tampered_pair(self):
        spec = zoo.golden_mean()
        w = find_interchangeable_pair(spec, [(0,)], interval(-1, 2))
        bad = PairWitness(w.level, w.inner, w.window, w.p, w.p, w.context)
        assert not validate_pair(spec, bad)


class TestHomoclinic:
    def test_hard_square_delta(self):
        spec = zoo.golden_mean()
        w = homoclinic_search(spec, "0", 0)
        assert isinstance(w, HomoclinicWitness)
        assert w.pattern == Pattern(Z, {(0,): 1})

    def test_ledrappier_none(self):
        spec = zoo.ledrappier()
        for n in range(4):
            assert isinstance(homoclinic_search(spec, "0", n), NoneUpToScale)

    def test_cross_none(self):
        for method in ("linear", "dfs"):
            assert isinstance(homoclinic_search(zoo.five_dot_cross(), "0", 1, method=method), NoneUpToScale)

    @given(st.integers(0, 10**6), st.integers(0, 2))
    def test_linear_agrees_with_dfs(self, seed, radius):
        rng = random.Random(seed)
        shape = ((0,),) + tuple((i,) for i in sorted(rng.sample(range(1, 4), rng.randint(1, 2))))
        spec = SubshiftSpec(Z, Alphabet.binary(True), LinearGF2((shape,)))
        a = homoclinic_search(spec, 0, radius, method="linear")
        b = homoclinic_search(spec, 0, radius, method="dfs")
        assert type(a) is type(b)
        if isinstance(a, HomoclinicWitness):
            assert a.pattern == b.pattern

    def test_bad_background(self):
        with pytest.raises(UsageError):
            homoclinic_search(zoo.golden_mean(), "1", 0)

    def test_tampered(self):
        spec = zoo.golden_mean()
        w = homoclinic_search(spec, "0", 1)
        bad = HomoclinicWitness(0, 1, w.margin, Pattern(Z, {g: 1 for g in w.pattern.support}))
        assert not validate_homoclinic(spec, bad)
