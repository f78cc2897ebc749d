"""Forbidden-word automaton for subshifts of finite type over Z.

States are the allowed ``m``-blocks, edges the allowed ``(m+1)``-blocks,
where ``m + 1`` is the longest forbidden window. Trimming keeps only the
states that lie on a bi-infinite path, so paths in the trimmed graph are
exactly the words occurring in points of the subshift.
"""

from __future__ import annotations

import math
from itertools import product
from typing import Iterable

import numpy as np

from .errors import EntropyUndefined, UsageError
from .groups import GroupSpec
from .shift import SubshiftSpec

Z = GroupSpec.lattice(1)


def forbidden_words(spec: SubshiftSpec) -> list:
    """Forbidden patterns as words with ``None`` wildcards, left-aligned at 0."""
    if spec.group != Z or not spec.is_forbidden:
        raise UsageError("the Z automaton needs a forbidden-pattern subshift over Z")
    words = []
    for p in spec.rule.patterns:
        pos = [g[0] for g in p.support]
        lo, hi = min(pos), max(pos)
        w = [None] * (hi - lo + 1)
        for g, v in p.items():
            w[g[0] - lo] = v
        words.append(tuple(w))
    return words


def _occurs_at(word, block, i) -> bool:
    for j, c in enumerate(word):
        if c is not None and block[i + j] != c:
            return False
    return True


def _clean(block, words) -> bool:
    n = len(block)
    for w in words:
        for i in range(n - len(w) + 1):
            if _occurs_at(w, block, i):
                return False
    return True


class ZAutomaton:
    def __init__(self, spec: SubshiftSpec, memory: int | None = None):
        self.spec = spec
        self.words = forbidden_words(spec)
        longest = max((len(w) for w in self.words), default=1)
        m = max(longest - 1, 1)
        if memory is not None:
            if memory + 1 < longest:
                raise UsageError(f"memory {memory} is shorter than a forbidden word ({longest})")
            m = max(memory, 1)
        self.m = m
        self.k = len(spec.alphabet)
        blocks = [b for b in product(range(self.k), repeat=m) if _clean(b, self.words)]
        index = {b: i for i, b in enumerate(blocks)}
        succ = [dict() for _ in blocks]
        for b in blocks:
            for c in range(self.k):
                big = b + (c,)
                nxt = big[1:]
                if nxt in index and _clean(big, self.words):
                    succ[index[b]][c] = index[nxt]
        self.all_blocks = blocks
        self.all_succ = succ
        alive = set(range(len(blocks)))
        while True:
            has_in = {t for s in alive for t in succ[s].values() if t in alive}
            keep = {s for s in alive if s in has_in and any(t in alive for t in succ[s].values())}
            if keep == alive:
                break
            alive = keep
        order = sorted(alive)
        self.states = [blocks[i] for i in order]
        remap = {old: new for new, old in enumerate(order)}
        self.succ = [
            {c: remap[t] for c, t in succ[old].items() if t in remap} for old in order
        ]

    @property
    def empty(self) -> bool:
        return not self.states

    def matrix(self, trimmed: bool = True) -> np.ndarray:
        succ = self.succ if trimmed else self.all_succ
        n = len(succ)
        a = np.zeros((n, n))
        for s, out in enumerate(succ):
            for t in out.values():
                a[s, t] += 1
        return a

    # -- exact counting -------------------------------------------------------

    def count(self, positions: Iterable[int] = (), fixed: dict | None = None) -> int:
        """Number of globally admissible patterns on ``positions``.

        ``fixed`` restricts to points carrying the given symbols at other
        positions; with empty ``positions`` the result is 1 or 0, i.e. an
        extendability test.
        """
        free = set(positions)
        fixed = dict(fixed or {})
        if free & set(fixed):
            raise UsageError("a position cannot be both counted and fixed")
        if not self.states:
            return 0
        span = free | set(fixed)
        if not span:
            return 1
        lo = min(span)
        n = max(max(span) - lo + 1, self.m)
        m = self.m
        # group initial states by the free-position projection of their letters
        start: dict = {}
        for i, st in enumerate(self.states):
            ok = True
            key = []
            for j in range(m):
                pos = lo + j
                if pos in fixed and st[j] != fixed[pos]:
                    ok = False
                    break
                if pos in free:
                    key.append(st[j])
            if ok:
                start.setdefault(tuple(key), 0)
                start[tuple(key)] |= 1 << i
        table: dict = {}
        for mask in start.values():
            table[mask] = table.get(mask, 0) + 1
        nstates = len(self.states)
        for j in range(m, n):
            pos = lo + j
            syms = [fixed[pos]] if pos in fixed else range(self.k)
            nxt: dict = {}
            for mask, cnt in table.items():
                per = []
                for c in syms:
                    out = 0
                    for s in range(nstates):
                        if (mask >> s) & 1:
                            t = self.succ[s].get(c)
                            if t is not None:
                                out |= 1 << t
                    per.append(out)
                if pos in free:
                    for out in per:
                        if out:
                            nxt[out] = nxt.get(out, 0) + cnt
                else:
                    out = 0
                    for o in per:
                        out |= o
                    if out:
                        nxt[out] = nxt.get(out, 0) + cnt
            table = nxt
        return sum(table.values())

    def admissible(self, assignment: dict) -> bool:
        return self.count((), assignment) > 0


def transfer_matrix_entropy(spec: SubshiftSpec, memory: int | None = None, rtol: float = 1e-10, max_iter: int = 1_000_000) -> float:
    """Log of the spectral radius of the trimmed block-transition matrix.

    Power iteration runs on ``M + I``; its Perron root is ``rho(M) + 1`` and
    it is aperiodic, so periodic components cannot stall convergence.
    """
    aut = ZAutomaton(spec, memory)
    if aut.empty:
        raise EntropyUndefined("the subshift is empty")
    rho = spectral_radius(aut.matrix(), rtol=rtol, max_iter=max_iter)
    return math.log(rho)


def _components(a: np.ndarray) -> list:
    """Strongly connected components of the graph with adjacency ``a > 0``."""
    n = a.shape[0]
    reach = (a > 0) | np.eye(n, dtype=bool)
    for _ in range(max(n - 1, 1).bit_length()):
        reach = reach | ((reach.astype(np.int64) @ reach.astype(np.int64)) > 0)
    mutual = reach & reach.T
    seen = set()
    out = []
    for i in range(n):
        if i not in seen:
            comp = [j for j in range(n) if mutual[i, j]]
            seen.update(comp)
            out.append(comp)
    return out


def spectral_radius(a: np.ndarray, rtol: float = 1e-10, max_iter: int = 1_000_000) -> float:
    """Perron root of a nonnegative matrix.

    It is the largest Perron root over the strongly connected components.
    On each component ``B = A_c + I`` is primitive, so power iteration
    converges, and the least and greatest ratios ``(Bv)_i / v_i`` bracket
    the root at every step; iteration stops once the bracket is tight.
    """
    best = 0.0
    for comp in _components(a):
        sub = a[np.ix_(comp, comp)]
        if len(comp) == 1 and sub[0, 0] == 0:
            continue
        b = sub + np.eye(len(comp))
        v = np.ones(len(comp))
        lo = hi = 1.0
        for _ in range(max_iter):
            w = b @ v
            ratios = w / v
            lo, hi = float(ratios.min()), float(ratios.max())
            if hi - lo <= rtol * hi:
                break
            v = w / float(w.max())
        best = max(best, (lo + hi) / 2 - 1.0)
    return best


def cyclic_count(spec: SubshiftSpec, n: int, beta: int = 0) -> int:
    """Labelings of the n-cycle with at most ``beta`` violating positions.

    Position ``i`` violates when some forbidden word occurs starting at ``i``
    in the periodic extension of the labeling.
    """
    if n < 1 or beta < 0:
        raise UsageError("need n >= 1 and beta >= 0")
    words = forbidden_words(spec)
    k = len(spec.alphabet)
    big = max((len(w) for w in words), default=1)

    def bad_at(seq, i) -> bool:
        return any(_occurs_at(w, seq, i) for w in words if i + len(w) <= len(seq))

    if n < big:
        total = 0
        for lab in product(range(k), repeat=n):
            ext = lab * (big // n + 2)
            viol = sum(1 for i in range(n) if bad_at(ext, i))
            if viol <= beta:
                total += 1
        return total
    m = big - 1
    if m == 0:
        per = sum(1 for c in range(k) if not bad_at((c,), 0))
        # each position independently admissible or a violation
        return sum(math.comb(n, v) * per ** (n - v) * (k - per) ** v for v in range(min(beta, n) + 1))
    total = 0
    for prefix in product(range(k), repeat=m):
        table = {(prefix, 0): 1}
        for _ in range(m, n):
            nxt: dict = {}
            for (state, viol), cnt in table.items():
                for c in range(k):
                    window = state + (c,)
                    v = viol + bad_at(window, 0)
                    if v > beta:
                        continue
                    key = (window[1:], v)
                    nxt[key] = nxt.get(key, 0) + cnt
            table = nxt
        for (state, viol), cnt in table.items():
            tail = state + prefix
            v = viol + sum(1 for i in range(m) if bad_at(tail, i))
            if v <= beta:
                total += cnt
    return total
