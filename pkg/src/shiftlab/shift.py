"""Alphabets, patterns, subshift specifications and admissibility levels."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import GlueConflict, UsageError
from .groups import GroupSpec, Rep


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple
    gf2: bool = False

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(str(s) for s in self.symbols))
        if not self.symbols:
            raise UsageError("alphabet must be nonempty")
        if len(set(self.symbols)) != len(self.symbols):
            raise UsageError("alphabet symbols must be unique")
        if len(self.symbols) > 2**16:
            raise UsageError("alphabet too large")
        if self.gf2 and self.symbols != ("0", "1"):
            raise UsageError("a GF(2) alphabet must be exactly ['0', '1']")

    @classmethod
    def binary(cls, gf2: bool = False) -> "Alphabet":
        return cls(("0", "1"), gf2)

    def __len__(self):
        return len(self.symbols)

    def index(self, name) -> int:
        try:
            return self.symbols.index(str(name))
        except ValueError:
            raise UsageError(f"unknown symbol {name!r}; alphabet is {list(self.symbols)}") from None

    def name(self, i: int) -> str:
        return self.symbols[i]


class Pattern(Mapping):
    """Finitely supported assignment of symbol indices to group elements.

    Immutable; the support is kept in canonical group order, and two patterns
    compare by ``sort_key`` (lexicographic over values in that order when the
    supports agree).
    """

    __slots__ = ("group", "_items", "_map", "_hash")

    def __init__(self, group: GroupSpec, mapping: Union[Mapping, Iterable] = ()):
        d = dict(mapping)
        self.group = group
        self._items = tuple(sorted(d.items(), key=lambda kv: group.key(kv[0])))
        self._map = d
        self._hash = None

    @classmethod
    def from_values(cls, group: GroupSpec, support: Sequence[Rep], values: Sequence[int]) -> "Pattern":
        if len(support) != len(values):
            raise UsageError("support and values differ in length")
        return cls(group, zip(support, values))

    def __getitem__(self, g):
        return self._map[g]

    def __iter__(self):
        return (g for g, _ in self._items)

    def __len__(self):
        return len(self._items)

    def __contains__(self, g):
        return g in self._map

    @property
    def support(self) -> tuple:
        return tuple(g for g, _ in self._items)

    @property
    def values(self) -> tuple:
        return tuple(v for _, v in self._items)

    def items(self):
        return self._items

    def __eq__(self, other):
        if not isinstance(other, Pattern):
            return NotImplemented
        return self.group == other.group and self._items == other._items

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.group, self._items))
        return self._hash

    def sort_key(self) -> tuple:
        key = self.group.key
        return tuple((key(g), v) for g, v in self._items)

    def __lt__(self, other: "Pattern"):
        return self.sort_key() < other.sort_key()

    def __repr__(self):
        body = ", ".join(f"{self.group.format(g)}:{v}" for g, v in self._items)
        return f"Pattern({{{body}}})"

    def restrict(self, subset: Iterable[Rep]) -> "Pattern":
        return Pattern(self.group, {g: self._map[g] for g in subset if g in self._map})

    def translate(self, g: Rep) -> "Pattern":
        return translate(g, self)

    def with_names(self, alphabet: Alphabet) -> list:
        return [(self.group.format(g), alphabet.name(v)) for g, v in self._items]


def translate(g: Rep, p: Pattern) -> Pattern:
    """Left shift: the result carries ``p``'s value at ``h`` on site ``g h``."""
    grp = p.group
    return Pattern(grp, {grp.mul(g, h): v for h, v in p.items()})


def glue(p: Pattern, q: Pattern) -> Pattern:
    """Union of two patterns that agree wherever both are defined."""
    if p.group != q.group:
        raise UsageError("cannot glue patterns over different groups")
    out = dict(p.items())
    for g, v in q.items():
        old = out.get(g)
        if old is not None and old != v:
            raise GlueConflict(g)
        out[g] = v
    return Pattern(p.group, out)


def constant(group: GroupSpec, support: Iterable[Rep], value: int) -> Pattern:
    return Pattern(group, {g: value for g in support})


# -- rules --------------------------------------------------------------------


@dataclass(frozen=True)
class ForbiddenPatterns:
    patterns: tuple

    kind = "forbidden"


@dataclass(frozen=True)
class LinearGF2:
    supports: tuple  # tuple of canonical tuples of elements

    kind = "linear-gf2"


@dataclass(frozen=True)
class Predicate:
    name: str

    kind = "predicate"


Rule = Union[ForbiddenPatterns, LinearGF2, Predicate]


@dataclass(frozen=True)
class Instance:
    """One translated local constraint on concrete sites.

    ``kind == "forbid"``: violated when the sites carry exactly ``values``.
    ``kind == "parity"``: violated when the values sum to 1 mod 2.
    """

    kind: str
    sites: tuple
    values: tuple = ()

    def violated(self, lookup) -> bool:
        if self.kind == "forbid":
            return all(lookup[s] == v for s, v in zip(self.sites, self.values))
        return sum(lookup[s] for s in self.sites) % 2 == 1


# -- predicate catalogue ------------------------------------------------------


class _PredicateRule:
    """A monotone, named pattern predicate compiled to pairwise constraints."""

    name = ""

    def validate(self, spec: "SubshiftSpec") -> None:
        pass

    def check(self, spec: "SubshiftSpec", p: Pattern) -> bool:
        raise NotImplementedError

    def instances(self, spec: "SubshiftSpec", sites: Sequence[Rep]) -> Iterator[Instance]:
        raise NotImplementedError

    def diameter(self, spec: "SubshiftSpec") -> int:
        return 0


class _AtMostOne(_PredicateRule):
    """Sunny-side-up: symbol ``1`` occurs at most once."""

    name = "sunny-side-up"

    def validate(self, spec):
        spec.alphabet.index("1")

    def check(self, spec, p):
        one = spec.alphabet.index("1")
        return sum(1 for v in p.values if v == one) <= 1

    def instances(self, spec, sites):
        one = spec.alphabet.index("1")
        sites = list(sites)
        for i, s in enumerate(sites):
            for t in sites[i + 1:]:
                yield Instance("forbid", (s, t), (one, one))


class _PerfectMatching(_PredicateRule):
    """Each site names a generator ``s`` and its ``s``-neighbour names ``s^-1``."""

    name = "perfect-matching"

    def validate(self, spec):
        g = spec.group
        if not g.is_free:
            raise UsageError("perfect-matching needs a free group")
        wanted = sorted(g.format(s) for s in g.generators)
        if sorted(spec.alphabet.symbols) != wanted:
            raise UsageError(f"perfect-matching alphabet must be the generators {wanted}")

    def _gen(self, spec, v: int) -> Rep:
        return spec.group.parse_element(spec.alphabet.name(v))

    def check(self, spec, p):
        g = spec.group
        for h, v in p.items():
            s = self._gen(spec, v)
            nb = g.mul(h, s)
            if nb in p and self._gen(spec, p[nb]) != g.inv(s):
                return False
        return True

    def instances(self, spec, sites):
        g = spec.group
        present = set(sites)
        alpha = spec.alphabet
        for h in sites:
            for s in g.generators:
                nb = g.mul(h, s)
                if nb not in present or g.key(nb) < g.key(h):
                    continue
                # emit each undirected edge once: x(h) == s  <=>  x(nb) == s^-1
                vs = alpha.index(g.format(s))
                vt = alpha.index(g.format(g.inv(s)))
                for u in range(len(alpha)):
                    if u != vt:
                        yield Instance("forbid", (h, nb), (vs, u))
                    if u != vs:
                        yield Instance("forbid", (h, nb), (u, vt))

    def diameter(self, spec):
        return 1


PREDICATES = {r.name: r for r in (_AtMostOne(), _PerfectMatching())}


# -- specs --------------------------------------------------------------------


@dataclass(frozen=True)
class SubshiftSpec:
    group: GroupSpec
    alphabet: Alphabet
    rule: Rule
    name: str = ""
    metadata: tuple = field(default=(), compare=False)

    def __post_init__(self):
        rule = self.rule
        if isinstance(rule, ForbiddenPatterns):
            pats = []
            for p in rule.patterns:
                if not isinstance(p, Pattern) or p.group != self.group:
                    raise UsageError("forbidden patterns must be Patterns over the subshift's group")
                if len(p) == 0:
                    raise UsageError("forbidden patterns must have nonempty support")
                for v in p.values:
                    if not 0 <= v < len(self.alphabet):
                        raise UsageError(f"symbol index {v} outside the alphabet")
                pats.append(p)
            object.__setattr__(self, "rule", ForbiddenPatterns(tuple(sorted(set(pats)))))
        elif isinstance(rule, LinearGF2):
            if not self.alphabet.gf2:
                raise UsageError("linear GF(2) rules need the GF(2) alphabet flag")
            sups = []
            for s in rule.supports:
                s = self.group.canonical(self.group.check(tuple(e)) for e in s)
                if not s:
                    raise UsageError("linear supports must be nonempty")
                sups.append(s)
            object.__setattr__(self, "rule", LinearGF2(tuple(sorted(set(sups), key=lambda s: [self.group.key(e) for e in s]))))
        elif isinstance(rule, Predicate):
            if rule.name not in PREDICATES:
                raise UsageError(f"unknown predicate {rule.name!r}; known: {sorted(PREDICATES)}")
            PREDICATES[rule.name].validate(self)
        else:
            raise UsageError(f"unsupported rule {rule!r}")

    @property
    def is_linear(self) -> bool:
        return isinstance(self.rule, LinearGF2)

    @property
    def is_forbidden(self) -> bool:
        return isinstance(self.rule, ForbiddenPatterns)

    @property
    def predicate(self):
        return PREDICATES[self.rule.name] if isinstance(self.rule, Predicate) else None

    def shapes(self) -> list:
        """Supports of the local rules (empty for predicates)."""
        if isinstance(self.rule, ForbiddenPatterns):
            return [p.support for p in self.rule.patterns]
        if isinstance(self.rule, LinearGF2):
            return list(self.rule.supports)
        return []

    def diameter(self) -> int:
        """Largest word-metric diameter of a rule support."""
        if isinstance(self.rule, Predicate):
            return self.predicate.diameter(self)
        return max((self.group.diameter(s) for s in self.shapes()), default=0)

    def instances(self, sites: Iterable[Rep]) -> list:
        """Every translated constraint whose whole support lies in ``sites``.

        A rule with support ``S`` applies at ``g`` when ``g S`` is inside the
        site set (left translation).
        """
        grp = self.group
        sites = list(sites)
        present = set(sites)
        if isinstance(self.rule, Predicate):
            return list(self.predicate.instances(self, grp.canonical(sites)))
        out = []
        seen = set()
        if isinstance(self.rule, ForbiddenPatterns):
            shapes = [(p.support, p.values) for p in self.rule.patterns]
            kind = "forbid"
        else:
            shapes = [(s, ()) for s in self.rule.supports]
            kind = "parity"
        for support, values in shapes:
            anchor_inv = grp.inv(support[0])
            for w in sites:
                g = grp.mul(w, anchor_inv)
                placed = tuple(grp.mul(g, s) for s in support)
                if all(x in present for x in placed):
                    key = (placed, values)
                    if key not in seen:
                        seen.add(key)
                        out.append(Instance(kind, placed, values))
        return out

    def is_locally_admissible(self, p: Pattern) -> bool:
        if isinstance(self.rule, Predicate):
            return self.predicate.check(self, p)
        return not any(inst.violated(p) for inst in self.instances(p.support))

    def violations(self, p: Pattern) -> list:
        return [inst for inst in self.instances(p.support) if inst.violated(p)]

    def constant_admissible(self, value: int) -> bool:
        """Whether the constant configuration with this symbol lies in the subshift."""
        grp = self.group
        if isinstance(self.rule, ForbiddenPatterns):
            return not any(all(v == value for v in p.values) for p in self.rule.patterns)
        if isinstance(self.rule, LinearGF2):
            return all(value * len(s) % 2 == 0 for s in self.rule.supports)
        probe = grp.ball(2)
        return self.predicate.check(self, constant(grp, probe, value))

    def pattern(self, pairs) -> Pattern:
        """Build a pattern from ``(element, symbol-name)`` pairs in file notation."""
        out = {}
        for e, s in pairs:
            g = self.group.parse_element(e)
            if g in out:
                raise UsageError(f"site {e!r} assigned twice")
            out[g] = self.alphabet.index(s)
        return Pattern(self.group, out)


def is_locally_admissible(spec: SubshiftSpec, p: Pattern) -> bool:
    return spec.is_locally_admissible(p)


# -- admissibility levels -----------------------------------------------------


@dataclass(frozen=True)
class LocalMargin:
    """Patterns on F that extend to a locally admissible pattern on F·B_r."""

    r: int = 0

    def __post_init__(self):
        if self.r < 0:
            raise UsageError("margin must be nonnegative")

    def __str__(self):
        return f"margin:{self.r}"


@dataclass(frozen=True)
class ExactZ:
    """Globally admissible patterns of a Z subshift of finite type."""

    def __str__(self):
        return "exact-z"


Level = Union[LocalMargin, ExactZ]


def parse_level(text) -> Level:
    if isinstance(text, (LocalMargin, ExactZ)):
        return text
    t = str(text).strip().lower()
    if t in ("exact-z", "exactz", "exact"):
        return ExactZ()
    if t.startswith("margin:"):
        try:
            return LocalMargin(int(t.split(":", 1)[1]))
        except ValueError:
            pass
    raise UsageError(f"bad level {text!r} (expected 'margin:<r>' or 'exact-z')")


def check_level(spec: SubshiftSpec, level: Level) -> None:
    if isinstance(level, ExactZ):
        if spec.group != GroupSpec.lattice(1) or not spec.is_forbidden:
            raise UsageError("exact-z needs a forbidden-pattern subshift over Z")
