"""Entropy estimators, independence density and cyclic microstate counts."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Sequence

from .admissible import Admissibility
from .config import Config, ordered_map
from .errors import BudgetExceeded, GlueConflict, UsageError
from .groups import GroupSpec
from .shift import Level, LocalMargin, Pattern, SubshiftSpec, glue, parse_level
from .zshift import cyclic_count, transfer_matrix_entropy

Z = GroupSpec.lattice(1)

__all__ = [
    "EntropySeries",
    "IndependenceReport",
    "MicrostateCount",
    "NaiveBound",
    "cyclic_microstate_count",
    "entropy_series",
    "independence_density",
    "naive_entropy_upper",
    "transfer_matrix_entropy",
    "verify_independence",
]


def rate(count: int, size: int) -> float | None:
    """``ln(count)/size``; ``None`` when nothing is admissible."""
    if count <= 0:
        return None
    return math.log(count) / size


@dataclass
class EntropySeries:
    level: Level
    rows: list  # (window id, size, count, rate)
    folner: bool  # True when the windows are boxes of Z^d

    @property
    def rates(self) -> list:
        return [r[3] for r in self.rows]

    @property
    def last_rate(self) -> float | None:
        return self.rows[-1][3] if self.rows else None

    @property
    def label(self) -> str:
        return "entropy" if self.folner else "window rates"


def _window(grp: GroupSpec, w):
    if isinstance(w, int):
        return str(w), grp.folner_window(w), grp.is_lattice
    name, sites = w
    return str(name), grp.canonical(sites), False


def entropy_series(spec: SubshiftSpec, windows: Sequence, level: Level | str = LocalMargin(0), config: Config | None = None) -> EntropySeries:
    """Pattern-count rates ``ln|L_F|/|F|`` per window.

    An int ``n`` stands for the box ``[0, n)^d`` (only over Z^d); any other
    window is a ``(name, sites)`` pair. Under ``LocalMargin`` every rate is
    an upper bound for the rate of globally admissible patterns.
    """
    config = config or Config()
    level = parse_level(level)
    if not windows:
        raise UsageError("need at least one window")
    grp = spec.group
    specs = [_window(grp, w) for w in windows]
    adm = Admissibility(spec, level, config)

    def one(item):
        name, sites, _ = item
        c = adm.count(sites, threads=1)
        return (name, len(sites), c, rate(c, len(sites)))

    rows = ordered_map(one, specs, config.threads)
    return EntropySeries(level, rows, all(f for _, _, f in specs))


@dataclass
class NaiveBound:
    value: float | None
    argmin: tuple
    rates: list  # (size, count, rate) per candidate

    note = "upper bound: the minimum over the given candidates only"


def naive_entropy_upper(spec: SubshiftSpec, candidates: Sequence, level: Level | str = LocalMargin(0), config: Config | None = None) -> NaiveBound:
    """Smallest ``ln|L_F|/|F|`` among the candidate sets, with the set achieving it."""
    config = config or Config()
    if not candidates:
        raise UsageError("need at least one candidate set")
    grp = spec.group
    cands = [grp.canonical(c) for c in candidates]
    adm = Admissibility(spec, parse_level(level), config)

    def one(sites):
        c = adm.count(sites, threads=1)
        return (len(sites), c, rate(c, len(sites)))

    rows = ordered_map(one, cands, config.threads)
    best, arg = None, cands[0]
    for sites, (_, _, r) in zip(cands, rows):
        if r is not None and (best is None or r < best):
            best, arg = r, sites
    return NaiveBound(best, arg, rows)


# -- independence -------------------------------------------------------------


@dataclass
class IndependenceReport:
    cylinders: tuple
    ambient: tuple
    best: tuple
    level: Level
    exact: bool = True  # False when the budget ran out (best is then a lower bound)
    nodes: int = 0

    @property
    def density(self) -> float:
        return len(self.best) / len(self.ambient)


def _cylinder_hit(spec: SubshiftSpec, cylinders, choice: dict) -> Pattern | None:
    """Pattern asking each ``s`` for its chosen cylinder, i.e. ``s^-1`` times it."""
    grp = spec.group
    out = Pattern(grp)
    for s, i in choice.items():
        try:
            out = glue(out, cylinders[i].translate(grp.inv(s)))
        except GlueConflict:
            return None
    return out


def _independent(spec, adm, cylinders, members, cache) -> bool:
    key = frozenset(members)
    hit = cache.get(key)
    if hit is not None:
        return hit
    ok = True
    for picks in product(range(len(cylinders)), repeat=len(members)):
        p = _cylinder_hit(spec, cylinders, dict(zip(members, picks)))
        if p is None or not adm.is_admissible(p):
            ok = False
            break
    cache[key] = ok
    return ok


def independence_density(spec: SubshiftSpec, cylinders: Sequence[Pattern], ambient, level: Level | str = LocalMargin(0), config: Config | None = None) -> IndependenceReport:
    """Largest ``J`` inside ``ambient`` that is an independence set for the cylinders.

    ``J`` qualifies when every choice ``phi: J -> cylinders`` is met by one
    admissible pattern carrying cylinder ``phi(s)`` translated by ``s^-1``
    for each ``s`` in ``J``. Branch and bound over subsets, members taken in
    canonical order with inclusion tried first; the first largest set found
    is reported.
    """
    config = config or Config()
    level = parse_level(level)
    grp = spec.group
    cylinders = tuple(cylinders)
    if not cylinders:
        raise UsageError("need at least one cylinder")
    if len(set(cylinders)) != len(cylinders):
        raise UsageError("cylinders must be pairwise distinct")
    ambient = grp.canonical(ambient)
    if not ambient:
        raise UsageError("the ambient set must be nonempty")
    budget = config.new_budget()
    adm = Admissibility(spec, level, config, budget)
    cache: dict = {}
    best: list = []
    n = len(ambient)

    def search(i, chosen):
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        if i == n or len(chosen) + (n - i) <= len(best):
            return
        budget.charge(1)
        cand = chosen + [ambient[i]]
        if _independent(spec, adm, cylinders, cand, cache):
            search(i + 1, cand)
        search(i + 1, chosen)

    exact = True
    try:
        search(0, [])
    except BudgetExceeded:
        exact = False
    return IndependenceReport(cylinders, ambient, tuple(best), level, exact, budget.used)


def verify_independence(spec: SubshiftSpec, report: IndependenceReport, config: Config | None = None) -> bool:
    """Re-check every choice function on the reported set."""
    adm = Admissibility(spec, report.level, config)
    if len(set(report.best)) != len(report.best) or not set(report.best) <= set(report.ambient):
        return False
    return _independent(spec, adm, report.cylinders, list(report.best), {})


# -- microstates --------------------------------------------------------------


@dataclass
class MicrostateCount:
    n: int
    beta: int
    count: int

    @property
    def rate(self) -> float | None:
        return rate(self.count, self.n)


def cyclic_microstate_count(spec: SubshiftSpec, n: int, beta: int = 0) -> MicrostateCount:
    """Labelings of the n-cycle with at most ``beta`` local violations.

    The cycle is the permutation model of Z; a violation is a position of the
    cycle where a forbidden word starts.
    """
    if spec.group != Z or not spec.is_forbidden:
        raise UsageError("microstates need a forbidden-pattern subshift over Z")
    return MicrostateCount(n, beta, cyclic_count(spec, n, beta))


def beta_from_delta(delta: float, n: int) -> int:
    """Violation budget matching an l2-average defect of ``delta`` on n sites."""
    if delta < 0:
        raise UsageError("delta must be nonnegative")
    return math.floor(delta * delta * n)
