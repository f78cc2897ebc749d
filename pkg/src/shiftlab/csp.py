"""Depth-first constraint search over a fixed site order.

Sites are numbered ``0..n-1`` and always assigned in increasing order, each
trying its symbols in increasing order, so solutions come out in
lexicographic order. Constraints are checked by forward checking: once
every site of a constraint but the last (by index) is assigned, the last
site's domain is filtered. A site whose domain empties prunes the branch.
Because every completed assignment passes through those filters, no
violated constraint can survive to a leaf.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Sequence

from .config import Budget

_BATCH = 512


class Problem:
    def __init__(self, domains: Sequence[int]):
        """``domains[i]`` is a bitmask of the symbols allowed at site ``i``."""
        self.n = len(domains)
        self.base = list(domains)
        self._forbid: list = []  # (sites, values)
        self._parity: list = []  # sites
        self._compiled = False

    def add_forbid(self, sites: Sequence[int], values: Sequence[int]) -> None:
        pairs = sorted(zip(sites, values))
        # the same site twice with different values can never match
        merged: dict = {}
        for s, v in pairs:
            if merged.setdefault(s, v) != v:
                return
        self._forbid.append((tuple(merged), tuple(merged.values())))
        self._compiled = False

    def add_parity(self, sites: Sequence[int]) -> None:
        odd: dict = {}
        for s in sites:
            odd[s] = odd.get(s, 0) ^ 1
        self._parity.append(tuple(sorted(s for s, o in odd.items() if o)))
        self._compiled = False

    def compile(self) -> None:
        n = self.n
        base = list(self.base)
        fa: list = [dict() for _ in range(n)]  # site -> value -> [(others, ovals, target, tval)]
        pa: list = [[] for _ in range(n)]  # site -> [(others, target)]
        for sites, values in set(self._forbid):
            if len(sites) == 1:
                base[sites[0]] &= ~(1 << values[0])
                continue
            trig = sites[-2]
            entry = (sites[:-2], values[:-2], sites[-1], values[-1])
            fa[trig].setdefault(values[-2], []).append(entry)
        for sites in set(self._parity):
            if not sites:
                continue
            if len(sites) == 1:
                base[sites[0]] &= 1
                continue
            pa[sites[-2]].append((sites[:-1], sites[-1]))
        self.dom0 = base
        self.fa = fa
        self.pa = pa
        self._compiled = True

    def components(self, start: int) -> list:
        """Sites ``start..n-1`` grouped into blocks no constraint links.

        Constraints are restricted to those sites first, since everything
        before ``start`` is assigned by the time the blocks are searched.
        """
        parent = list(range(self.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for sites in [s for s, _ in self._forbid] + self._parity:
            tail = [s for s in sites if s >= start]
            for s in tail[1:]:
                a, b = find(tail[0]), find(s)
                if a != b:
                    parent[max(a, b)] = min(a, b)
        groups: dict = {}
        for s in range(start, self.n):
            groups.setdefault(find(s), []).append(s)
        return list(groups.values())

    def _propagate(self, site, v, values, dom, trail) -> bool:
        for others, ovals, target, tval in self.fa[site].get(v, ()):
            for o, x in zip(others, ovals):
                if values[o] != x:
                    break
            else:
                d = dom[target]
                bit = 1 << tval
                if d & bit:
                    trail.append((target, d))
                    d ^= bit
                    dom[target] = d
                    if not d:
                        return False
        for others, target in self.pa[site]:
            par = 0
            for o in others:
                par ^= values[o]
            d = dom[target]
            nd = d & (1 << par)
            if nd != d:
                trail.append((target, d))
                dom[target] = nd
                if not nd:
                    return False
        return True

    def _walk(self, seq: Sequence[int], values, dom, trail, meter) -> Iterator[None]:
        """Yield once per consistent assignment of ``seq`` (written into ``values``).

        Leaves ``dom``/``trail`` as they were on entry once exhausted; callers
        that stop early must undo to their own mark.
        """
        n = len(seq)
        if n == 0:
            yield
            return
        depth = 0
        marks = [0] * n
        remaining = [0] * n
        marks[0] = len(trail)
        remaining[0] = dom[seq[0]]
        propagate = self._propagate
        while depth >= 0:
            mark = marks[depth]
            while len(trail) > mark:
                s, d = trail.pop()
                dom[s] = d
            rem = remaining[depth]
            if not rem:
                depth -= 1
                continue
            low = rem & -rem
            remaining[depth] = rem ^ low
            v = low.bit_length() - 1
            site = seq[depth]
            values[site] = v
            meter[0] += 1
            if meter[0] >= _BATCH:
                meter[1].charge(meter[0])
                meter[0] = 0
            if not propagate(site, v, values, dom, trail):
                continue
            if depth + 1 == n:
                yield
            else:
                depth += 1
                marks[depth] = len(trail)
                remaining[depth] = dom[seq[depth]]

    def _dependencies(self, blocks, k: int) -> list:
        """For each block, the enumerated sites (``< k``) sharing a constraint with it.

        Whether a block can be completed depends on nothing else, so the
        answer is memoized on those sites' values.
        """
        owner = {}
        for bi, block in enumerate(blocks):
            for s in block:
                owner[s] = bi
        deps = [set() for _ in blocks]
        for sites in [s for s, _ in self._forbid] + self._parity:
            head = [s for s in sites if s < k]
            if not head:
                continue
            for s in sites:
                bi = owner.get(s)
                if bi is not None:
                    deps[bi].update(head)
        return [sorted(d) for d in deps]

    def solutions(
        self,
        fixed: dict | None = None,
        project: int | None = None,
        blocks: Iterable[Sequence[int]] | None = None,
        budget: Budget | None = None,
    ) -> Iterator[tuple]:
        """Yield solutions as value tuples, in lexicographic order.

        ``fixed`` pins sites to values. With ``project=k`` only the first
        ``k`` sites are enumerated; each prefix is yielded once if the rest
        can be completed. ``blocks`` splits the remaining sites into groups
        that share no constraint, so they are completed independently.
        """
        if not self._compiled:
            self.compile()
        budget = budget or Budget(float("inf"))
        dom = list(self.dom0)
        for s, v in (fixed or {}).items():
            dom[s] &= 1 << v
        if any(d == 0 for d in dom):
            return
        values = [0] * self.n
        trail: list = []
        meter = [0, budget]
        k = self.n if project is None else project
        if blocks is None:
            blocks = [range(k, self.n)] if k < self.n else []
        blocks = [list(b) for b in blocks]
        deps = self._dependencies(blocks, k)
        memo: dict = {}
        try:
            for _ in self._walk(range(k), values, dom, trail, meter):
                ok = True
                for bi, block in enumerate(blocks):
                    key = (bi, tuple(values[s] for s in deps[bi]))
                    found = memo.get(key)
                    if found is None:
                        mark = len(trail)
                        found = False
                        for _ in self._walk(block, values, dom, trail, meter):
                            found = True
                            break
                        while len(trail) > mark:
                            s, d = trail.pop()
                            dom[s] = d
                        memo[key] = found
                    if not found:
                        ok = False
                        break
                if ok:
                    yield tuple(values[:k])
        finally:
            if meter[0]:
                budget.used += meter[0]

    def count(self, **kw) -> int:
        return sum(1 for _ in self.solutions(**kw))

    def first(self, **kw):
        for sol in self.solutions(**kw):
            return sol
        return None
