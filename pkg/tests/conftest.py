from __future__ import annotations

import random
from itertools import product

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from shiftlab.groups import GroupSpec
from shiftlab.shift import Alphabet, ForbiddenPatterns, Pattern, SubshiftSpec

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

Z = GroupSpec.lattice(1)
Z2 = GroupSpec.lattice(2)
F2 = GroupSpec.free(2)


def interval(a: int, b: int) -> tuple:
    return tuple((i,) for i in range(a, b))


def words(rank: int = 2, max_len: int = 5):
    """Hypothesis strategy for reduced words of a free group."""
    letters = st.sampled_from([i for i in range(1, rank + 1)] + [-i for i in range(1, rank + 1)])
    return st.lists(letters, max_size=max_len).map(lambda w: GroupSpec.free(rank).mul((), tuple(w)))


def lattice_points(d: int = 2, bound: int = 6):
    return st.tuples(*[st.integers(-bound, bound)] * d)


def random_z_sft(rng: random.Random, max_words: int = 3, max_len: int = 3, k: int = 2) -> SubshiftSpec:
    pats = []
    for _ in range(rng.randint(1, max_words)):
        n = rng.randint(1, max_len)
        pats.append(Pattern(Z, {(i,): rng.randrange(k) for i in range(n)}))
    return SubshiftSpec(Z, Alphabet(tuple(str(i) for i in range(k))), ForbiddenPatterns(tuple(pats)))


def brute_force_count(spec: SubshiftSpec, sites) -> int:
    """Locally admissible labelings of ``sites``, by filtering every labeling."""
    sites = tuple(sites)
    k = len(spec.alphabet)
    return sum(
        1
        for vals in product(range(k), repeat=len(sites))
        if spec.is_locally_admissible(Pattern.from_values(spec.group, sites, vals))
    )


@pytest.fixture
def rng():
    return random.Random(20240611)


ACCEPTANCE: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
