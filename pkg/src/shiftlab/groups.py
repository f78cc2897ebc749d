"""Finitely generated groups: integer lattices Z^d and free groups F_k.

Elements are stored as plain tuples so they hash and compare cheaply:

* ``Z^d``: a tuple of ``d`` ints;
* ``F_k``: a freely reduced tuple of nonzero ints, ``i`` for the generator
  ``a_i`` and ``-i`` for its inverse.

:class:`GroupSpec` does arithmetic on these raw tuples. :class:`Element`
wraps one together with its group for callers that want operator syntax and
mixed-group checking.

Every finite subset handed out by this module is in canonical order: by
word length, then lexicographically (``a < A < b < B < ...`` for free
groups, coordinatewise for lattices).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .config import DEFAULT_BALL_CAP
from .errors import GroupMismatchError, NonAmenableGroupError, ResourceCapError, UsageError

LETTERS = "abcd"
IDENTITY_WORD = "e"

Rep = tuple


@dataclass(frozen=True)
class GroupSpec:
    kind: str  # "Z" (lattice) or "F" (free)
    rank: int

    def __post_init__(self):
        if self.kind not in ("Z", "F"):
            raise UsageError(f"unknown group kind {self.kind!r}")
        if self.rank < 1:
            raise UsageError("group rank must be at least 1")
        if self.kind == "F" and self.rank > len(LETTERS):
            raise UsageError(f"free groups of rank > {len(LETTERS)} are not supported")

    @classmethod
    def lattice(cls, d: int = 1) -> "GroupSpec":
        return cls("Z", d)

    @classmethod
    def free(cls, k: int = 2) -> "GroupSpec":
        return cls("F", k)

    @classmethod
    def parse(cls, text: str) -> "GroupSpec":
        t = text.strip().replace(" ", "")
        if t == "Z":
            return cls.lattice(1)
        m = re.fullmatch(r"Z\^(\d+)", t)
        if m:
            return cls.lattice(int(m.group(1)))
        m = re.fullmatch(r"F_?(\d+)", t)
        if m:
            return cls.free(int(m.group(1)))
        raise UsageError(f"cannot parse group {text!r} (expected Z, Z^d or F_k)")

    @property
    def name(self) -> str:
        if self.kind == "Z":
            return "Z" if self.rank == 1 else f"Z^{self.rank}"
        return f"F_{self.rank}"

    def __str__(self):
        return self.name

    @property
    def is_free(self) -> bool:
        return self.kind == "F"

    @property
    def is_lattice(self) -> bool:
        return self.kind == "Z"

    # -- arithmetic on raw tuples -------------------------------------------

    @property
    def identity(self) -> Rep:
        return (0,) * self.rank if self.kind == "Z" else ()

    @property
    def generators(self) -> tuple:
        """Symmetric generating set in canonical order."""
        if self.kind == "Z":
            out = []
            for i in range(self.rank):
                for s in (-1, 1):
                    v = [0] * self.rank
                    v[i] = s
                    out.append(tuple(v))
            return self.canonical(out)
        return tuple((sign * i,) for i in range(1, self.rank + 1) for sign in (1, -1))

    def mul(self, a: Rep, b: Rep) -> Rep:
        if self.kind == "Z":
            return tuple(x + y for x, y in zip(a, b))
        out = list(a)
        for letter in b:
            if out and out[-1] == -letter:
                out.pop()
            else:
                out.append(letter)
        return tuple(out)

    def inv(self, a: Rep) -> Rep:
        if self.kind == "Z":
            return tuple(-x for x in a)
        return tuple(-x for x in reversed(a))

    def word_length(self, a: Rep) -> int:
        if self.kind == "Z":
            return sum(abs(x) for x in a)
        return len(a)

    def distance(self, a: Rep, b: Rep) -> int:
        """Left-invariant word metric ``|a^-1 b|``."""
        if self.kind == "Z":
            return sum(abs(x - y) for x, y in zip(a, b))
        # common prefix cancels in a^-1 b
        n = 0
        for x, y in zip(a, b):
            if x != y:
                break
            n += 1
        return len(a) + len(b) - 2 * n

    def key(self, a: Rep) -> tuple:
        """Sort key realising the canonical order."""
        if self.kind == "Z":
            return (sum(abs(x) for x in a), a)
        return (len(a), tuple(2 * abs(x) - (x > 0) for x in a))

    def canonical(self, elements: Iterable[Rep]) -> tuple:
        return tuple(sorted(set(elements), key=self.key))

    def is_element(self, a) -> bool:
        if not isinstance(a, tuple):
            return False
        if self.kind == "Z":
            return len(a) == self.rank and all(isinstance(x, int) for x in a)
        for i, x in enumerate(a):
            if not isinstance(x, int) or x == 0 or abs(x) > self.rank:
                return False
            if i and a[i - 1] == -x:
                return False
        return True

    def check(self, a) -> Rep:
        if not self.is_element(a):
            raise UsageError(f"{a!r} is not a canonical element of {self.name}")
        return a

    # -- finite subsets -----------------------------------------------------

    def ball_size(self, n: int) -> int:
        if n < 0:
            return 0
        if self.kind == "F":
            k = self.rank
            if k == 1:
                return 2 * n + 1
            return 1 + 2 * k * ((2 * k - 1) ** n - 1) // (2 * k - 2)
        # lattice points with L1 norm <= n in d dimensions
        d = self.rank
        return sum(_binom(d, i) * _binom(n, i) * 2**i for i in range(min(d, n) + 1))

    def ball(self, n: int, cap: int = DEFAULT_BALL_CAP) -> tuple:
        """All elements of word length at most ``n``, canonical order."""
        if n < 0:
            raise UsageError("ball radius must be nonnegative")
        size = self.ball_size(n)
        if size > cap:
            raise ResourceCapError(f"|B_{n}| = {size} in {self.name} exceeds cap {cap}")
        if self.kind == "F":
            layer = [()]
            out = [()]
            gens = [g[0] for g in self.generators]
            for _ in range(n):
                nxt = []
                for w in layer:
                    for x in gens:
                        if not w or w[-1] != -x:
                            nxt.append(w + (x,))
                out.extend(nxt)
                layer = nxt
            return tuple(out)
        pts = []
        _lattice_points(self.rank, n, (), pts)
        return tuple(sorted(pts, key=self.key))

    def sphere(self, n: int) -> tuple:
        return tuple(g for g in self.ball(n) if self.word_length(g) == n)

    def folner_window(self, n: int) -> tuple:
        """The box ``[0, n)^d``; free groups have no Følner sequence."""
        if self.kind == "F":
            raise NonAmenableGroupError(
                f"{self.name} is not amenable; use naive-entropy candidate sets instead"
            )
        if n < 1:
            raise UsageError("window size must be positive")
        pts = [()]
        for _ in range(self.rank):
            pts = [p + (i,) for p in pts for i in range(n)]
        return self.canonical(pts)

    def product(self, left: Iterable[Rep], right: Iterable[Rep]) -> tuple:
        """The product set ``{a b}``, canonical order."""
        right = list(right)
        return self.canonical(self.mul(a, b) for a in left for b in right)

    def translate_set(self, g: Rep, subset: Iterable[Rep]) -> tuple:
        return self.canonical(self.mul(g, s) for s in subset)

    def set_distance(self, a: Iterable[Rep], b: Iterable[Rep]) -> int:
        b = list(b)
        return min(self.distance(x, y) for x in a for y in b)

    def diameter(self, subset: Sequence[Rep]) -> int:
        if not subset:
            return 0
        return max(self.distance(x, y) for x in subset for y in subset)

    # -- formatting ---------------------------------------------------------

    def format(self, a: Rep):
        """JSON/TOML-ready form: list of ints, or a reduced word string."""
        if self.kind == "Z":
            return list(a)
        if not a:
            return IDENTITY_WORD
        return "".join(LETTERS[abs(x) - 1] if x > 0 else LETTERS[abs(x) - 1].upper() for x in a)

    def parse_element(self, obj) -> Rep:
        if self.kind == "Z":
            if isinstance(obj, bool):
                raise UsageError(f"bad element {obj!r}")
            if isinstance(obj, int) and self.rank == 1:
                return (obj,)
            if isinstance(obj, str):
                s = obj.strip()
                if s.startswith("["):
                    import json

                    return self.parse_element(json.loads(s))
                if self.rank == 1 and re.fullmatch(r"[+-]?\d+", s):
                    return (int(s),)
            if isinstance(obj, (list, tuple)) and len(obj) == self.rank and all(
                isinstance(x, int) and not isinstance(x, bool) for x in obj
            ):
                return tuple(obj)
            raise UsageError(f"{obj!r} is not an element of {self.name}")
        if not isinstance(obj, str):
            raise UsageError(f"{obj!r} is not a word in {self.name}")
        s = obj.strip()
        if s in (IDENTITY_WORD, ""):
            return ()
        letters = []
        for ch in s:
            i = LETTERS.find(ch.lower()) + 1
            if i == 0 or i > self.rank:
                raise UsageError(f"bad letter {ch!r} in word {obj!r} for {self.name}")
            letters.append(i if ch.islower() else -i)
        return self.mul((), tuple(letters))

    def element(self, obj) -> "Element":
        return Element(self, self.parse_element(obj))


def _binom(n: int, k: int) -> int:
    from math import comb

    return comb(n, k)


def _lattice_points(d: int, budget: int, prefix: tuple, out: list) -> None:
    if d == 0:
        out.append(prefix)
        return
    for x in range(-budget, budget + 1):
        _lattice_points(d - 1, budget - abs(x), prefix + (x,), out)


@dataclass(frozen=True)
class Element:
    group: GroupSpec
    rep: Rep

    def __post_init__(self):
        self.group.check(self.rep)

    def _same(self, other: "Element") -> None:
        if not isinstance(other, Element) or other.group != self.group:
            raise GroupMismatchError(f"cannot combine elements of {self.group} and {getattr(other, 'group', other)}")

    def __mul__(self, other: "Element") -> "Element":
        self._same(other)
        return Element(self.group, self.group.mul(self.rep, other.rep))

    def inverse(self) -> "Element":
        return Element(self.group, self.group.inv(self.rep))

    def __len__(self):
        return self.group.word_length(self.rep)

    def __str__(self):
        f = self.group.format(self.rep)
        return f if isinstance(f, str) else str(f)


def mul(a: Element, b: Element) -> Element:
    return a * b


def inv(a: Element) -> Element:
    return a.inverse()


def word_length(a: Element) -> int:
    return a.group.word_length(a.rep)


def distance(a: Element, b: Element) -> int:
    a._same(b)
    return a.group.distance(a.rep, b.rep)


# -- free group geometry -----------------------------------------------------


def _require_free(group: GroupSpec, what: str) -> None:
    if not group.is_free:
        raise UsageError(f"{what} is defined only for free groups, not {group}")


def gromov_product(group: GroupSpec, s: Rep, t: Rep, g: Rep) -> Fraction:
    """``(s, t)_g``: zero exactly when ``g`` lies on the geodesic from s to t."""
    _require_free(group, "gromov_product")
    d = group.distance
    return Fraction(d(s, g) + d(t, g) - d(s, t), 2)


def geodesic(group: GroupSpec, s: Rep, t: Rep) -> list:
    """Vertices of the Cayley-tree geodesic from s to t, in path order."""
    step = group.mul(group.inv(s), t)
    return [group.mul(s, step[:i]) for i in range(len(step) + 1)]


def span(group: GroupSpec, subset: Iterable[Rep]) -> tuple:
    """Geodesic hull of ``subset`` in the Cayley tree of a free group."""
    _require_free(group, "span")
    pts = list(group.canonical(subset))
    if not pts:
        raise UsageError("span of an empty set")
    out = set(pts)
    for i, s in enumerate(pts):
        for t in pts[i + 1:]:
            out.update(geodesic(group, s, t))
    return group.canonical(out)


def is_connected(group: GroupSpec, subset: Iterable[Rep]) -> bool:
    pts = group.canonical(subset)
    return pts == span(group, pts)


def separated_subset(group: GroupSpec, subset: Iterable[Rep], k: int) -> tuple:
    """Greedy maximal k-separated subset, scanning in canonical order.

    Every input point ends up within distance ``k - 1`` of the output.
    """
    if k < 1:
        raise UsageError("separation must be at least 1")
    chosen: list = []
    for f in group.canonical(subset):
        if all(group.distance(f, c) >= k for c in chosen):
            chosen.append(f)
    return tuple(chosen)


def is_separated(group: GroupSpec, a: Iterable[Rep], b: Iterable[Rep], k: int) -> bool:
    return group.set_distance(a, b) >= k


def is_pairwise_separated(group: GroupSpec, sets: Sequence[Iterable[Rep]], k: int) -> bool:
    sets = [list(s) for s in sets]
    return all(
        is_separated(group, sets[i], sets[j], k)
        for i in range(len(sets))
        for j in range(i + 1, len(sets))
    )


def is_b_separated(group: GroupSpec, points: Iterable[Rep], shape: Iterable[Rep]) -> bool:
    """True when the right translates ``B v`` are pairwise disjoint."""
    shape = list(shape)
    seen: set = set()
    for v in group.canonical(points):
        block = {group.mul(b, v) for b in shape}
        if seen & block:
            return False
        seen |= block
    return True
