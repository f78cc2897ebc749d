"""Markov-property splicing checks, interchangeable pairs and homoclinic search.

All verdicts are relative to a window and an admissibility level. A
counterexample found at ``ExactZ`` refutes the memory set outright; one
found at ``LocalMargin(r)`` only refutes it at that finite scale, and a
``Holds`` is never more than a finite-scale statement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from . import gf2
from .admissible import Admissibility, build_problem, parity_rows
from .config import Budget, Config, first_hit, ordered_map
from .csp import Problem
from .errors import BudgetExceeded, UsageError
from .groups import Rep
from .shift import ExactZ, Level, LocalMargin, Pattern, SubshiftSpec, glue, parse_level


def splice(x: Pattern, y: Pattern, inner: Sequence[Rep]) -> Pattern:
    """``x`` on ``inner``, ``y`` on the rest of their common support."""
    if x.support != y.support:
        raise UsageError("splice needs patterns on the same support")
    inside = set(inner)
    if not inside <= set(x.support):
        raise UsageError("the inner set must lie inside the support")
    return Pattern(x.group, {g: (x[g] if g in inside else y[g]) for g in x.support})


# -- verdicts -------------------------------------------------------------------


@dataclass
class Holds:
    level: Level
    inner: tuple
    outer: tuple
    window: tuple

    kind = "holds"


@dataclass
class Counterexample:
    level: Level
    inner: tuple
    outer: tuple
    window: tuple
    x: Pattern
    y: Pattern
    reason: str = ""

    kind = "counterexample"

    @property
    def spliced(self) -> Pattern:
        return splice(self.x, self.y, self.inner)

    @property
    def absolute(self) -> bool:
        return isinstance(self.level, ExactZ)


@dataclass
class Inconclusive:
    level: Level
    inner: tuple
    outer: tuple
    window: tuple
    nodes: int = 0
    note: str = ""

    kind = "inconclusive"


@dataclass
class PairWitness:
    level: Level
    inner: tuple
    window: tuple
    p: Pattern
    q: Pattern
    context: Pattern

    kind = "pair"


@dataclass
class NoneUpToScale:
    """No witness exists at this scale; says nothing about larger windows."""

    what: str
    level: Level
    params: dict = field(default_factory=dict)

    kind = "none"


@dataclass
class HomoclinicWitness:
    background: int
    radius: int
    margin: int
    pattern: Pattern

    kind = "homoclinic"


def validate_counterexample(spec: SubshiftSpec, cx: Counterexample, config: Config | None = None) -> bool:
    adm = Admissibility(spec, cx.level, config)
    w = set(cx.window)
    if set(cx.x.support) != w or set(cx.y.support) != w:
        return False
    if not (set(cx.inner) <= set(cx.outer) <= w):
        return False
    ring = set(cx.outer) - set(cx.inner)
    if any(cx.x[g] != cx.y[g] for g in ring):
        return False
    return adm.is_admissible(cx.x) and adm.is_admissible(cx.y) and not adm.is_admissible(cx.spliced)


def validate_pair(spec: SubshiftSpec, w: PairWitness, config: Config | None = None) -> bool:
    adm = Admissibility(spec, w.level, config)
    inner = set(w.inner)
    if set(w.p.support) != inner or set(w.q.support) != inner or w.p == w.q:
        return False
    if set(w.context.support) != set(w.window) - inner:
        return False
    return adm.is_admissible(glue(w.p, w.context)) and adm.is_admissible(glue(w.q, w.context))


# -- memory sets ----------------------------------------------------------------


def _sets(spec, inner, outer, window):
    g = spec.group
    inner, outer, window = g.canonical(inner), g.canonical(outer), g.canonical(window)
    if not (set(inner) <= set(outer) <= set(window)):
        raise UsageError("need inner ⊆ outer ⊆ window")
    return inner, outer, window


def check_memory_set(spec: SubshiftSpec, inner, outer, window, level: Level | str = LocalMargin(0), config: Config | None = None, budget: Budget | None = None):
    """Test whether ``outer`` is a memory set for ``inner`` inside ``window``.

    Every pair of admissible patterns on the window that agree on
    ``outer \\ inner`` is spliced along ``inner``; the verdict is ``Holds``
    when all splices stay admissible, otherwise the least counterexample
    (ordered by ``x`` then ``y``).
    """
    config = config or Config()
    level = parse_level(level)
    inner, outer, window = _sets(spec, inner, outer, window)
    budget = budget or config.new_budget()
    adm = Admissibility(spec, level, config, budget)
    try:
        if adm.linear:
            verdict = _memory_linear(spec, adm, inner, outer, window)
        else:
            verdict = _memory_search(spec, adm, inner, outer, window)
    except BudgetExceeded as exc:
        return Inconclusive(level, inner, outer, window, nodes=budget.used, note=str(exc))
    if isinstance(verdict, Counterexample) and not validate_counterexample(spec, verdict, config):
        raise AssertionError("internal error: counterexample failed its own re-check")
    return verdict


def _reason(spec, adm, z: Pattern) -> str:
    bad = spec.violations(z)
    if bad:
        sites = ", ".join(str(spec.group.format(s)) for s in bad[0].sites)
        return f"splice violates a local constraint on [{sites}]"
    return f"splice has no extension at level {adm.level}"


def _memory_search(spec, adm: Admissibility, inner, outer, window):
    grp = spec.group
    pos = {g: i for i, g in enumerate(window)}
    ring = [pos[g] for g in outer if g not in set(inner)]
    ins = [pos[g] for g in inner]
    far = [pos[g] for g in window if g not in set(outer)]
    pats = list(adm.iter_values(window))
    groups: dict = {}
    for vals in pats:
        groups.setdefault(tuple(vals[i] for i in ring), []).append(vals)
    verdicts: dict = {}

    def splice_ok(a, c, o) -> bool:
        key = (a, c, o)
        hit = verdicts.get(key)
        if hit is None:
            z = [0] * len(window)
            for i, v in zip(ins, a):
                z[i] = v
            for i, v in zip(ring, c):
                z[i] = v
            for i, v in zip(far, o):
                z[i] = v
            hit = adm.is_admissible(Pattern.from_values(grp, window, z))
            verdicts[key] = hit
        return hit

    settled: set = set()
    for x in pats:
        a = tuple(x[i] for i in ins)
        c = tuple(x[i] for i in ring)
        if (a, c) in settled:
            continue
        for y in groups[c]:
            if not splice_ok(a, c, tuple(y[i] for i in far)):
                xp = Pattern.from_values(grp, window, x)
                yp = Pattern.from_values(grp, window, y)
                z = splice(xp, yp, inner)
                return Counterexample(adm.level, inner, outer, window, xp, yp, _reason(spec, adm, z))
        settled.add((a, c))
    return Holds(adm.level, inner, outer, window)


def _memory_linear(spec, adm: Admissibility, inner, outer, window):
    """GF(2) route: splicing is closed iff every difference vanishing on the
    ring keeps its restriction to ``inner`` inside the admissible space."""
    grp = spec.group
    _, space = adm._subspace(window)
    pos = {g: i for i, g in enumerate(window)}
    inside = set(inner)
    ring_mask = sum(1 << pos[g] for g in outer if g not in inside)
    inner_mask = sum(1 << pos[g] for g in inner)
    for d in gf2.vanishing_on(space.vectors(), ring_mask):
        if (d & inner_mask) not in space:
            n = len(window)
            xp = Pattern.from_values(grp, window, gf2.bits(d, n))
            yp = Pattern.from_values(grp, window, [0] * n)
            z = splice(xp, yp, inner)
            return Counterexample(adm.level, inner, outer, window, xp, yp, _reason(spec, adm, z))
    return Holds(adm.level, inner, outer, window)


@dataclass
class ScanReport:
    margin: tuple
    side: str
    growth: int
    results: list  # (inner, verdict)

    @property
    def all_hold(self) -> bool:
        return all(isinstance(v, Holds) for _, v in self.results)


def strong_tmp_scan(spec: SubshiftSpec, margin, supports, growth: int = 1, level: Level | str = LocalMargin(0), side: str = "right", config: Config | None = None) -> ScanReport:
    """Check ``A·F`` (``side='right'``) or ``F·A`` as a memory set for each ``A``.

    The window for ``A`` is its memory set grown by ``B_growth`` on the right.
    """
    config = config or Config()
    grp = spec.group
    margin = grp.canonical(margin)
    if grp.identity not in margin:
        raise UsageError("the margin set must contain the identity")
    if side not in ("right", "left"):
        raise UsageError("side must be 'right' (A·F) or 'left' (F·A)")
    ball = grp.ball(growth, config.ball_cap)

    def one(inner):
        inner = grp.canonical(inner)
        outer = grp.product(inner, margin) if side == "right" else grp.product(margin, inner)
        window = grp.product(outer, ball)
        return inner, check_memory_set(spec, inner, outer, window, level, config)

    results = ordered_map(one, list(supports), config.threads)
    return ScanReport(margin, side, growth, results)


# -- interchangeable pairs --------------------------------------------------------


def find_interchangeable_pair(spec: SubshiftSpec, inner, window, level: Level | str = LocalMargin(0), config: Config | None = None, method: str = "auto"):
    """Least ``(p, q, context)`` with ``q < p`` on ``inner`` sharing one context.

    Both ``glue(p, context)`` and ``glue(q, context)`` must be admissible on
    the window at the given level; such a pair is the finite trace of an
    off-diagonal asymptotic pair. Order: ``p`` first, then ``q``, then the
    context, each lexicographic in canonical site order.
    """
    config = config or Config()
    level = parse_level(level)
    inner, _, window = _sets(spec, inner, inner, window)
    budget = config.new_budget()
    adm = Admissibility(spec, level, config, budget, method=method)
    params = {"inner": inner, "window": window}
    if adm.linear:
        _, space = adm._subspace(window)
        pos = {g: i for i, g in enumerate(window)}
        outside = sum(1 << pos[g] for g in window if g not in set(inner))
        if not gf2.vanishing_on(space.vectors(), outside):
            return NoneUpToScale("interchangeable pair", level, params)
        # a witness exists; the search below finds the least one
        adm = Admissibility(spec, level, config, budget, method="dfs")
    if isinstance(level, ExactZ):
        found = _pair_by_enumeration(adm, inner, window)
    else:
        found = _pair_by_search(spec, adm, inner, window, config)
    if found is None:
        return NoneUpToScale("interchangeable pair", level, params)
    p, q, ctx = found
    w = PairWitness(level, inner, window, p, q, ctx)
    if not validate_pair(spec, w, config):
        raise AssertionError("internal error: pair witness failed its own re-check")
    return w


def _pair_by_enumeration(adm, inner, window):
    grp = adm.group
    pos = {g: i for i, g in enumerate(window)}
    ins = [pos[g] for g in inner]
    rest = [g for g in window if g not in set(inner)]
    outs = [pos[g] for g in rest]
    by_ctx: dict = {}
    for vals in adm.iter_values(window):
        by_ctx.setdefault(tuple(vals[i] for i in outs), set()).add(tuple(vals[i] for i in ins))
    best = None
    for ctx, inners in by_ctx.items():
        if len(inners) >= 2:
            q, p = sorted(inners)[:2]
            cand = (p, q, ctx)
            if best is None or cand < best:
                best = cand
    if best is None:
        return None
    p, q, ctx = best
    return (
        Pattern.from_values(grp, inner, p),
        Pattern.from_values(grp, inner, q),
        Pattern.from_values(grp, rest, ctx),
    )


def _pair_by_search(spec, adm: Admissibility, inner, window, config):
    """Doubled CSP: two copies of ``inner`` and of the margin, one shared context."""
    grp = spec.group
    inside = set(inner)
    context = [g for g in window if g not in inside]
    _, margin = adm.layout(window)
    n_in, n_ctx, n_mar = len(inner), len(context), len(margin)
    # site layout: p | q | context | margin copy 1 | margin copy 2
    slot1 = {g: i for i, g in enumerate(inner)}
    slot2 = {g: n_in + i for i, g in enumerate(inner)}
    shared = {g: 2 * n_in + i for i, g in enumerate(context)}
    m1 = {g: 2 * n_in + n_ctx + i for i, g in enumerate(margin)}
    m2 = {g: 2 * n_in + n_ctx + n_mar + i for i, g in enumerate(margin)}
    total = 2 * n_in + n_ctx + 2 * n_mar
    k = len(spec.alphabet)
    prob = Problem([(1 << k) - 1] * total)
    seen = set()
    for inst in spec.instances(tuple(window) + tuple(margin)):
        for own, mar in ((slot1, m1), (slot2, m2)):
            idx = tuple(own[s] if s in own else shared[s] if s in shared else mar[s] for s in inst.sites)
            key = (inst.kind, idx, inst.values)
            if key in seen:
                continue
            seen.add(key)
            if inst.kind == "forbid":
                prob.add_forbid(idx, inst.values)
            else:
                prob.add_parity(idx)
    prob.compile()
    blocks = prob.components(2 * n_in + n_ctx)
    singles = list(adm.iter_values(inner))

    def context_for(p):
        fixed_p = {i: v for i, v in enumerate(p)}
        for q in singles:
            if q >= p:
                break
            fixed = dict(fixed_p)
            fixed.update({n_in + i: v for i, v in enumerate(q)})
            sol = prob.first(fixed=fixed, project=2 * n_in + n_ctx, blocks=blocks, budget=adm.budget)
            if sol is not None:
                return p, q, sol[2 * n_in:]
        return None

    found = first_hit(context_for, singles, config.threads)
    if found is None:
        return None
    p, q, ctx = found
    return (
        Pattern.from_values(grp, inner, p),
        Pattern.from_values(grp, inner, q),
        Pattern.from_values(grp, context, ctx),
    )


# -- homoclinic points ------------------------------------------------------------


def homoclinic_search(spec: SubshiftSpec, background, radius: int, margin: int | None = None, config: Config | None = None, method: str = "auto"):
    """Least pattern on ``B_radius``, not constantly ``background``, that is
    locally admissible on ``B_(radius+margin)`` over the background."""
    config = config or Config()
    grp = spec.group
    b = spec.alphabet.index(background) if isinstance(background, str) else int(background)
    if not 0 <= b < len(spec.alphabet):
        raise UsageError(f"background symbol {background!r} outside the alphabet")
    if radius < 0:
        raise UsageError("radius must be nonnegative")
    if margin is None:
        margin = spec.diameter()
    if margin < 0:
        raise UsageError("margin must be nonnegative")
    if not spec.constant_admissible(b):
        raise UsageError(f"the constant configuration {spec.alphabet.name(b)!r} is not in the subshift")
    core = grp.ball(radius, config.ball_cap)
    outer = grp.ball(radius + margin, config.ball_cap)
    params = {"background": b, "radius": radius, "margin": margin}
    level = LocalMargin(0)
    if spec.is_linear and b == 0 and method != "dfs":
        sites = core + tuple(g for g in outer if g not in set(core))
        keep = (1 << len(core)) - 1
        rows = [r & keep for r in parity_rows(spec, sites)]
        least = gf2.Basis(gf2.kernel(rows, len(core))).least_nonzero()
        if least is None:
            return NoneUpToScale("homoclinic point", level, params)
        vals = gf2.bits(least, len(core))
    else:
        sites = core + tuple(g for g in outer if g not in set(core))
        prob = build_problem(spec, sites)
        fixed = {i: b for i in range(len(core), len(sites))}
        budget = config.new_budget()
        vals = None
        for sol in prob.solutions(fixed=fixed, project=len(core), budget=budget):
            if any(v != b for v in sol):
                vals = sol
                break
        if vals is None:
            return NoneUpToScale("homoclinic point", level, params)
    w = HomoclinicWitness(b, radius, margin, Pattern.from_values(grp, core, vals))
    if not validate_homoclinic(spec, w, config):
        raise AssertionError("internal error: homoclinic witness failed its own re-check")
    return w


def validate_homoclinic(spec: SubshiftSpec, w: HomoclinicWitness, config: Config | None = None) -> bool:
    config = config or Config()
    grp = spec.group
    core = set(grp.ball(w.radius, config.ball_cap))
    if set(w.pattern.support) != core or all(v == w.background for v in w.pattern.values):
        return False
    outer = grp.ball(w.radius + w.margin, config.ball_cap)
    full = Pattern(grp, {g: (w.pattern[g] if g in core else w.background) for g in outer})
    return spec.is_locally_admissible(full)
