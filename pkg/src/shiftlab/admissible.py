"""Admissible-pattern enumeration, counting and extension at a given level.

``LocalMargin(r)``: a pattern on F is admissible when it extends to a
locally admissible pattern on F·B_r (no translated constraint fully inside
F·B_r is violated). These sets shrink as r grows and always contain the
globally admissible patterns.

``ExactZ``: exactly the globally admissible patterns, via the Z automaton.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from . import gf2
from .config import Budget, Config, ordered_map
from .csp import Problem
from .errors import BudgetExceeded, UsageError
from .groups import Rep
from .shift import ExactZ, Level, LocalMargin, Pattern, SubshiftSpec, check_level, parse_level
from .zshift import ZAutomaton


def build_problem(spec: SubshiftSpec, sites: Sequence[Rep]) -> Problem:
    """CSP over ``sites`` (in the given order) carrying every local constraint inside them."""
    index = {g: i for i, g in enumerate(sites)}
    k = len(spec.alphabet)
    prob = Problem([(1 << k) - 1] * len(sites))
    for inst in spec.instances(sites):
        idx = [index[s] for s in inst.sites]
        if inst.kind == "forbid":
            prob.add_forbid(idx, inst.values)
        else:
            prob.add_parity(idx)
    prob.compile()
    return prob


def parity_rows(spec: SubshiftSpec, sites: Sequence[Rep]) -> list:
    index = {g: i for i, g in enumerate(sites)}
    rows = []
    for inst in spec.instances(sites):
        v = 0
        for s in inst.sites:
            v ^= 1 << index[s]
        rows.append(v)
    return rows


class Admissibility:
    """Admissibility oracle for one subshift at one level."""

    def __init__(self, spec: SubshiftSpec, level: Level | str = LocalMargin(0), config: Config | None = None, budget: Budget | None = None, method: str = "auto"):
        self.spec = spec
        self.level = parse_level(level)
        check_level(spec, self.level)
        self.config = config or Config()
        self.budget = budget or self.config.new_budget()
        if method not in ("auto", "dfs", "linear"):
            raise UsageError(f"unknown method {method!r}")
        if method == "linear" and not spec.is_linear:
            raise UsageError("the linear method needs a GF(2) rule")
        self.linear = spec.is_linear and method != "dfs" and isinstance(self.level, LocalMargin)
        self._aut = ZAutomaton(spec) if isinstance(self.level, ExactZ) else None
        self._cache: dict = {}

    @property
    def group(self):
        return self.spec.group

    # -- geometry -------------------------------------------------------------

    def layout(self, core: Sequence[Rep]) -> tuple:
        """Canonical core followed by the canonical margin ``core·B_r \\ core``."""
        g = self.group
        core = g.canonical(core)
        r = self.level.r
        if r == 0:
            return core, ()
        inside = set(core)
        grown = g.product(core, g.ball(r, self.config.ball_cap))
        return core, tuple(x for x in grown if x not in inside)

    def _problem(self, core: Sequence[Rep]):
        key = ("csp", tuple(core))
        hit = self._cache.get(key)
        if hit is None:
            core, extra = self.layout(core)
            sites = core + extra
            prob = build_problem(self.spec, sites)
            hit = (core, sites, prob, prob.components(len(core)))
            self._cache[key] = hit
        return hit

    def _subspace(self, core: Sequence[Rep]):
        """Projection to ``core`` of the solution space on ``core·B_r``."""
        key = ("lin", tuple(core))
        hit = self._cache.get(key)
        if hit is None:
            core, extra = self.layout(core)
            sites = core + extra
            ker = gf2.kernel(parity_rows(self.spec, sites), len(sites))
            mask = (1 << len(core)) - 1
            hit = (core, gf2.project(ker, mask))
            self._cache[key] = hit
        return hit

    # -- queries ----------------------------------------------------------------

    def is_admissible(self, p: Pattern) -> bool:
        core = self.group.canonical(p.support)
        if not core:
            return self.count_empty_ok()
        if self._aut is not None:
            return self._aut.admissible({g[0]: v for g, v in p.items()})
        if self.linear:
            core, basis = self._subspace(core)
            return gf2.from_bits(p[g] for g in core) in basis
        core, sites, prob, blocks = self._problem(core)
        fixed = {i: p[g] for i, g in enumerate(core)}
        return prob.first(fixed=fixed, project=len(core), blocks=blocks, budget=self.budget) is not None

    def count_empty_ok(self) -> bool:
        # the empty pattern is admissible iff the level admits anything on B_r
        if self._aut is not None:
            return not self._aut.empty
        return True

    def iter_values(self, support: Sequence[Rep], fixed: dict | None = None) -> Iterator[tuple]:
        """Admissible value tuples on ``support`` (canonical order), ascending.

        ``fixed`` maps elements of the support to required symbols.
        """
        grp = self.group
        core = grp.canonical(support)
        fixed = fixed or {}
        if self._aut is not None:
            yield from self._iter_exact(core, fixed)
            return
        core, sites, prob, blocks = self._problem(core)
        pos = {g: i for i, g in enumerate(core)}
        fx = {pos[g]: v for g, v in fixed.items()}
        yield from prob.solutions(fixed=fx, project=len(core), blocks=blocks, budget=self.budget)

    def _iter_exact(self, core, fixed) -> Iterator[tuple]:
        aut = self._aut
        n = len(core)
        k = len(self.spec.alphabet)
        assign: dict = {}
        order = [g[0] for g in core]

        def rec(i):
            if i == n:
                yield tuple(assign[p] for p in order)
                return
            pos = order[i]
            choices = [fixed[core[i]]] if core[i] in fixed else range(k)
            for c in choices:
                assign[pos] = c
                self.budget.charge(1)
                if aut.admissible(assign):
                    yield from rec(i + 1)
                del assign[pos]

        if aut.empty:
            return
        yield from rec(0)

    def enumerate(self, support: Sequence[Rep]) -> Iterator[Pattern]:
        core = self.group.canonical(support)
        for vals in self.iter_values(core):
            yield Pattern.from_values(self.group, core, vals)

    def count(self, support: Sequence[Rep], method: str | None = None, threads: int | None = None) -> int:
        """Number of admissible patterns on ``support``."""
        grp = self.group
        core = grp.canonical(support)
        if not core:
            raise UsageError("count needs a nonempty support")
        if self._aut is not None:
            return self._aut.count([g[0] for g in core])
        if self.linear and method != "dfs":
            core, basis = self._subspace(core)
            return 2 ** len(basis)
        threads = self.config.threads if threads is None else threads
        core, sites, prob, blocks = self._problem(core)
        k = len(self.spec.alphabet)
        done = [0] * k

        def branch(v):
            n = 0
            try:
                for _ in prob.solutions(fixed={0: v}, project=len(core), blocks=blocks, budget=self.budget):
                    n += 1
            finally:
                done[v] = n
            return n

        try:
            return sum(ordered_map(branch, range(k), threads))
        except BudgetExceeded as exc:
            raise BudgetExceeded(f"count on {len(core)} sites interrupted", partial=sum(done), nodes=self.budget.used) from exc

    def extend(self, p: Pattern, target: Sequence[Rep]) -> Pattern | None:
        """Least admissible pattern on ``target`` restricting to ``p``."""
        grp = self.group
        target = grp.canonical(target)
        if not set(p.support) <= set(target):
            raise UsageError("the pattern's support must lie inside the target")
        for vals in self.iter_values(target, fixed=dict(p.items())):
            return Pattern.from_values(grp, target, vals)
        return None


def count_admissible(spec, support, level=LocalMargin(0), config=None, method=None) -> int:
    return Admissibility(spec, level, config).count(support, method=method)


def enumerate_admissible(spec, support, level=LocalMargin(0), config=None) -> Iterator[Pattern]:
    return Admissibility(spec, level, config).enumerate(support)


def is_extendable(spec, p: Pattern, target, level=LocalMargin(0), config=None) -> bool:
    return Admissibility(spec, level, config).extend(p, target) is not None


def extend_witness(spec, p: Pattern, target, level=LocalMargin(0), config=None) -> Pattern | None:
    return Admissibility(spec, level, config).extend(p, target)


@dataclass
class LocalGlobalReport:
    support: tuple
    counts: list  # count at margin r, for r = 0..r_max
    exact: int | None  # ExactZ count when available

    @property
    def stabilized_at(self) -> int | None:
        """Least r whose count equals the count at r - 1."""
        for r in range(1, len(self.counts)):
            if self.counts[r] == self.counts[r - 1]:
                return r
        return None

    @property
    def constant(self) -> bool:
        return len(set(self.counts)) == 1


def local_equals_global_check(spec: SubshiftSpec, support, r_max: int, config: Config | None = None) -> LocalGlobalReport:
    config = config or Config()
    support = spec.group.canonical(support)
    counts = [Admissibility(spec, LocalMargin(r), config).count(support) for r in range(r_max + 1)]
    exact = None
    try:
        check_level(spec, ExactZ())
        exact = Admissibility(spec, ExactZ(), config).count(support)
    except UsageError:
        pass
    return LocalGlobalReport(support, counts, exact)
