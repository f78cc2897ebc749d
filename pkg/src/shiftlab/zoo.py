"""Named example systems, each carrying checks of its documented behaviour.

``ZooEntry.expectations`` are executable: :func:`evaluate` runs them and the
acceptance tests run :func:`evaluate` on every entry. ``basis`` records why a
value is expected: ``"trivial"`` (immediate from the definitions),
``"oracle"`` (an independent computation such as a transfer matrix or a
GF(2) rank) or ``"theorem"`` (a qualitative result about the system).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import specfile
from .admissible import Admissibility, local_equals_global_check
from .config import Config
from .entropy import (
    cyclic_microstate_count,
    entropy_series,
    independence_density,
    naive_entropy_upper,
    transfer_matrix_entropy,
    verify_independence,
)
from .errors import UsageError
from .groups import GroupSpec
from .shift import (
    Alphabet,
    ExactZ,
    ForbiddenPatterns,
    LinearGF2,
    LocalMargin,
    Pattern,
    Predicate,
    SubshiftSpec,
)
from .tmp import (
    Counterexample,
    HomoclinicWitness,
    NoneUpToScale,
    PairWitness,
    check_memory_set,
    find_interchangeable_pair,
    homoclinic_search,
    strong_tmp_scan,
)

Z = GroupSpec.lattice(1)
Z2 = GroupSpec.lattice(2)
F2 = GroupSpec.free(2)
GOLDEN = math.log((1 + math.sqrt(5)) / 2)


def _interval(a: int, b: int) -> tuple:
    """``{a, ..., b-1}`` in Z."""
    return tuple((i,) for i in range(a, b))


# -- constructors -------------------------------------------------------------


def full_shift(group: GroupSpec, k: int = 2) -> SubshiftSpec:
    if k < 1:
        raise UsageError("need at least one symbol")
    symbols = tuple(str(i) for i in range(k))
    return SubshiftSpec(group, Alphabet(symbols), ForbiddenPatterns(()), name=f"full-{k}")


def hard_square(group: GroupSpec, shape: Sequence) -> SubshiftSpec:
    """No two 1s at ``g`` and ``g s`` for ``s`` in ``shape``."""
    shape = group.canonical(shape)
    if not shape:
        raise UsageError("shape must be nonempty")
    if group.identity in shape:
        raise UsageError("shape must not contain the identity")
    pats = tuple(Pattern(group, {group.identity: 1, s: 1}) for s in shape)
    name = "golden-mean" if group == Z and shape == ((1,),) else f"hard-square-{group.name}"
    return SubshiftSpec(group, Alphabet.binary(), ForbiddenPatterns(pats), name=name)


def golden_mean() -> SubshiftSpec:
    return hard_square(Z, [(1,)])


def sunny_side_up(group: GroupSpec = Z) -> SubshiftSpec:
    return SubshiftSpec(group, Alphabet.binary(), Predicate("sunny-side-up"), name="sunny-side-up")


def five_dot_cross() -> SubshiftSpec:
    """Over F_2: the five values on every ``g B_1`` sum to 0 mod 2."""
    return SubshiftSpec(F2, Alphabet.binary(gf2=True), LinearGF2((F2.ball(1),)), name="x-cross")


def perfect_matchings() -> SubshiftSpec:
    """Over F_2: each site points along a generator to a site pointing back."""
    return SubshiftSpec(F2, Alphabet(("a", "A", "b", "B")), Predicate("perfect-matching"), name="perfect-matchings")


def ledrappier() -> SubshiftSpec:
    """Over Z^2: ``x(g) + x(g + e1) + x(g + e2) = 0`` mod 2."""
    return SubshiftSpec(Z2, Alphabet.binary(gf2=True), LinearGF2((((0, 0), (1, 0), (0, 1)),)), name="ledrappier")


def glider_or_custom(path) -> SubshiftSpec:
    """Load a user system from a subshift file."""
    return specfile.load(path)


# -- expectations ---------------------------------------------------------------


@dataclass(frozen=True)
class Expectation:
    claim: str
    basis: str  # "trivial" | "oracle" | "theorem"
    check: Callable  # (spec, config) -> (ok, detail)


@dataclass(frozen=True)
class ZooEntry:
    name: str
    spec: SubshiftSpec
    summary: str
    entropy: float | None = None  # exact value when known
    tmp: str = ""
    asymptotic_pairs: str = ""
    homoclinic: str = ""
    expectations: tuple = field(default=(), compare=False)


def _count_is(support, expected, level=LocalMargin(0)):
    def run(spec, config):
        got = Admissibility(spec, level, config).count(support)
        return got == expected, f"count {got}, expected {expected}"

    return run


def _no_pair(inner, window, level=LocalMargin(0)):
    def run(spec, config):
        got = find_interchangeable_pair(spec, inner, window, level, config)
        return isinstance(got, NoneUpToScale), type(got).__name__

    return run


def _pair_found(inner, window, level=LocalMargin(0)):
    def run(spec, config):
        got = find_interchangeable_pair(spec, inner, window, level, config)
        return isinstance(got, PairWitness), type(got).__name__

    return run


def _no_homoclinic(radii):
    def run(spec, config):
        got = [homoclinic_search(spec, 0, n, config=config) for n in radii]
        ok = all(isinstance(g, NoneUpToScale) for g in got)
        return ok, f"radii {list(radii)}: " + ", ".join(type(g).__name__ for g in got)

    return run


def _homoclinic_delta(spec, config):
    got = homoclinic_search(spec, 0, 0, config=config)
    ok = isinstance(got, HomoclinicWitness) and dict(got.pattern.items()) == {spec.group.identity: 1}
    return ok, repr(got)


def _full_shift_expectations(k: int) -> tuple:
    window = _interval(0, 6)

    def rates(spec, config):
        s = entropy_series(spec, [1, 4, 8, 12], "margin:0", config)
        counts = [r[2] for r in s.rows]
        ok = counts == [k**n for n in (1, 4, 8, 12)] and all(r == math.log(k**n) / n for n, r in zip((1, 4, 8, 12), s.rates))
        return ok, f"counts {counts}"

    def naive(spec, config):
        b = naive_entropy_upper(spec, [_interval(0, 3), _interval(-2, 3)], "margin:0", config)
        return abs(b.value - math.log(k)) < 1e-12, f"naive upper {b.value}"

    def scan(spec, config):
        rep = strong_tmp_scan(spec, Z.ball(1), [_interval(0, 1), _interval(0, 3)], 1, "margin:0", config=config)
        return rep.all_hold, "all hold" if rep.all_hold else "a support failed"

    def indep(spec, config):
        cyl = [Pattern(Z, {(0,): v}) for v in range(k)]
        rep = independence_density(spec, cyl, _interval(0, 6), "margin:0", config)
        return rep.density == 1 and verify_independence(spec, rep, config), f"density {rep.density}"

    return (
        Expectation(f"count on 6 sites = {k}^6", "trivial", _count_is(window, k**6)),
        Expectation(f"every window rate is ln {k}", "trivial", rates),
        Expectation(f"naive upper bound is ln {k}", "trivial", naive),
        Expectation("strong TMP scan holds", "trivial", scan),
        Expectation("independence density 1", "trivial", indep),
    )


def _golden_expectations() -> tuple:
    def tm(spec, config):
        h = transfer_matrix_entropy(spec)
        return abs(h - GOLDEN) <= 1e-9, f"transfer-matrix entropy {h!r}"

    def series(spec, config):
        s = entropy_series(spec, [4, 8, 12], ExactZ(), config)
        return abs(s.last_rate - GOLDEN) <= 0.05, f"rates {s.rates}"

    def micro(spec, config):
        c4 = cyclic_microstate_count(spec, 4, 0).count
        r16 = cyclic_microstate_count(spec, 16, 0).rate
        return c4 == 7 and abs(r16 - GOLDEN) <= 0.05, f"n=4 count {c4}, n=16 rate {r16}"

    def memory(spec, config):
        v = check_memory_set(spec, _interval(0, 4), _interval(-1, 5), _interval(-3, 7), ExactZ(), config)
        return type(v).__name__ == "Holds", type(v).__name__

    def indep(spec, config):
        cyl = [Pattern(Z, {(0,): 0}), Pattern(Z, {(0,): 1})]
        rep = independence_density(spec, cyl, _interval(0, 10), "margin:0", config)
        return rep.density == 0.5 and verify_independence(spec, rep, config), f"J = {[g[0] for g in rep.best]}"

    return (
        Expectation("transfer-matrix entropy is ln of the golden ratio", "oracle", tm),
        Expectation("exact rate at window 12 within 0.05 of it", "oracle", series),
        Expectation("cycle microstates: 7 at n=4, rate within 0.05 at n=16", "oracle", micro),
        Expectation("count on {0..3} = 8 exactly", "oracle", _count_is(_interval(0, 4), 8, ExactZ())),
        Expectation("{-1..4} is a memory set for {0..3}", "oracle", memory),
        Expectation("homoclinic witness: a single 1", "trivial", _homoclinic_delta),
        Expectation("interchangeable pair at {0}", "trivial", _pair_found(_interval(0, 1), _interval(-2, 3))),
        Expectation("independence density 1/2 on {0..9}", "oracle", indep),
    )


def _sunny_expectations() -> tuple:
    def memory(spec, config):
        v = check_memory_set(spec, _interval(0, 1), _interval(-2, 3), _interval(-2, 5), LocalMargin(0), config)
        return isinstance(v, Counterexample), type(v).__name__

    def rate(spec, config):
        s = entropy_series(spec, [32], "margin:0", config)
        return s.rows[0][2] == 33 and s.last_rate <= math.log(33) / 32, f"rate {s.last_rate}"

    return (
        Expectation("memory-set check at A={0} finds a counterexample", "theorem", memory),
        Expectation("count on 7 sites = 8", "oracle", _count_is(_interval(0, 7), 8)),
        Expectation("rate at window 32 is ln(33)/32", "oracle", rate),
    )


def _cross_expectations() -> tuple:
    def stable(spec, config):
        out = []
        for sup in (F2.ball(1), F2.ball(2), ((), (1,), (1, 1)), ((), (1,), (2,))):
            rep = local_equals_global_check(spec, sup, 2, config)
            out.append(rep.constant)
        return all(out), f"constant: {out}"

    return (
        Expectation("count on B_1 = 16", "oracle", _count_is(F2.ball(1), 16)),
        Expectation("local counts stable on connected supports up to B_2", "theorem", stable),
        Expectation("no interchangeable pair for A=B_1 in B_3", "theorem", _no_pair(F2.ball(1), F2.ball(3))),
        Expectation("no homoclinic point up to radius 3", "oracle", _no_homoclinic(range(4))),
    )


def _matching_expectations() -> tuple:
    def extends(spec, config):
        # B_2 B_1 = B_3, so margin 1 keeps exactly the B_2 patterns extending to B_3
        fixed = {(): spec.alphabet.index("a"), (1,): spec.alphabet.index("A")}
        ball2 = F2.ball(2)
        counts = [sum(1 for _ in Admissibility(spec, LocalMargin(r), config).iter_values(ball2, fixed=fixed)) for r in (0, 1)]
        return counts[0] == counts[1] > 0, f"{counts[0]} patterns, {counts[1]} extend"

    return (
        Expectation("count on B_1 = 108", "oracle", _count_is(F2.ball(1), 108)),
        Expectation("no interchangeable pair for A=B_1 in B_3", "theorem", _no_pair(F2.ball(1), F2.ball(3))),
        Expectation("B_2 patterns with x(e)=a, x(a)=A extend to B_3", "oracle", extends),
    )


def _ledrappier_expectations() -> tuple:
    def boxes(spec, config):
        got = [Admissibility(spec, LocalMargin(0), config).count(Z2.folner_window(n)) for n in range(1, 6)]
        return got == [2 ** (2 * n - 1) for n in range(1, 6)], f"counts {got}"

    def rate(spec, config):
        s = entropy_series(spec, [16], "margin:0", config)
        return s.last_rate <= 0.09, f"rate {s.last_rate}"

    return (
        Expectation("n x n box count = 2^(2n-1) for n <= 5", "oracle", boxes),
        Expectation("no homoclinic point up to radius 6", "oracle", _no_homoclinic(range(7))),
        Expectation("rate at the 16 x 16 box <= 0.09", "oracle", rate),
    )


def _hard_square_f2_expectations() -> tuple:
    return (
        Expectation("interchangeable pair at A={e}", "trivial", _pair_found(((),), F2.ball(2))),
        Expectation("homoclinic witness: a single 1", "trivial", _homoclinic_delta),
    )


def _entries() -> dict:
    out = [
        ZooEntry("full-2", full_shift(Z, 2), "full shift on two symbols over Z", math.log(2), "holds", "everywhere", "dense", _full_shift_expectations(2)),
        ZooEntry("full-3", full_shift(Z, 3), "full shift on three symbols over Z", math.log(3), "holds", "everywhere", "dense", _full_shift_expectations(3)),
        ZooEntry("golden-mean", golden_mean(), "no two adjacent 1s over Z", GOLDEN, "holds", "present", "single 1 on 0s", _golden_expectations()),
        ZooEntry("hard-square-F_2", hard_square(F2, [(1,), (2,)]), "no 1 next to a 1 along a or b over F_2", None, "holds", "present", "single 1 on 0s", _hard_square_f2_expectations()),
        ZooEntry("sunny-side-up", sunny_side_up(Z), "at most one 1 over Z (not of finite type)", 0.0, "fails", "present", "single 1 on 0s", _sunny_expectations()),
        ZooEntry("x-cross", five_dot_cross(), "parity of every unit ball is even, over F_2", None, "holds", "none off the diagonal", "trivial", _cross_expectations()),
        ZooEntry("perfect-matchings", perfect_matchings(), "perfect matchings of the Cayley tree of F_2", None, "holds", "none off the diagonal", "no background symbol", _matching_expectations()),
        ZooEntry("ledrappier", ledrappier(), "three-dot parity over Z^2", 0.0, "holds", "none at tested scales", "trivial", _ledrappier_expectations()),
    ]
    return {e.name: e for e in out}


ZOO = _entries()


def names() -> list:
    return list(ZOO)


def get(name: str) -> ZooEntry:
    try:
        return ZOO[name]
    except KeyError:
        raise UsageError(f"unknown zoo entry {name!r}; known: {names()}") from None


def evaluate(entry: ZooEntry, config: Config | None = None) -> list:
    """Run every expectation; returns ``(expectation, ok, detail)`` triples."""
    config = config or Config()
    return [(e, *e.check(entry.spec, config)) for e in entry.expectations]
