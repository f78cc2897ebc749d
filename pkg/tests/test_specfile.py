from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from shiftlab import specfile, zoo
from shiftlab.errors import SpecError
from shiftlab.shift import Alphabet, ForbiddenPatterns, Pattern, SubshiftSpec


GOLDEN = """\
name = "golden-mean"
group = "Z"
alphabet = ["0", "1"]

[rule]
kind = "forbidden"
patterns = [[[0, "1"], [1, "1"]]]
"""


def test_load_golden():
    assert specfile.loads(GOLDEN) == zoo.golden_mean()


@pytest.mark.parametrize("name", sorted(zoo.ZOO))
def test_roundtrip_zoo(name):
    spec = zoo.get(name).spec
    text = specfile.dumps(spec)
    back = specfile.loads(text)
    assert back == spec
    assert specfile.spec_hash(back) == specfile.spec_hash(spec)
    assert specfile.dumps(back) == text


def test_hash_ignores_layout():
    shuffled = """\
alphabet = ["0", "1"]
group = "Z"
name = "golden-mean"
rule = { kind = "forbidden", patterns = [[[1, "1"], [0, "1"]], [[0, "1"], [1, "1"]]] }
"""
    assert specfile.spec_hash(specfile.loads(shuffled)) == specfile.spec_hash(zoo.golden_mean())
    assert specfile.normalize(shuffled) == specfile.dumps(zoo.golden_mean())


def test_hash_sees_changes():
    other = GOLDEN.replace('[[[0, "1"], [1, "1"]]]', '[[[0, "1"], [2, "1"]]]')
    assert specfile.spec_hash(specfile.loads(other)) != specfile.spec_hash(zoo.golden_mean())


def test_free_group_words():
    text = """\
group = "F_2"
alphabet = ["0", "1"]
[rule]
kind = "forbidden"
patterns = [[["e", "1"], ["aB", "1"]]]
"""
    spec = specfile.loads(text)
    assert spec.rule.patterns[0].support == ((), (1, -2))


def test_linear():
    text = """\
name = "ledrappier"
group = "Z^2"
alphabet = ["0", "1"]
gf2 = true
[rule]
kind = "linear-gf2"
supports = [[[0, 0], [1, 0], [0, 1]]]
"""
    assert specfile.loads(text) == zoo.ledrappier()


@pytest.mark.parametrize(
    "text,needle,line",
    [
        ('group = "Z"\nalphabet = ["0"]\n[rule]\nkind = "forbidden"\npatterns = [[[0, "2"]]]\n', "unknown symbol", 5),
        ('group = "Q"\nalphabet = ["0"]\n[rule]\nkind = "forbidden"\npatterns = [[[0, "0"]]]\n', "", 1),
        ('group = "Z"\nalphabet = ["0"]\ncolour = 1\n[rule]\nkind = "forbidden"\npatterns = [[[0, "0"]]]\n', "unknown key", 3),
        ('group = "Z"\nalphabet = ["0", "1"]\n[rule]\nkind = "linear-gf2"\nsupports = [[0]]\n', "gf2 = true", 4),
        ('group = "Z"\nalphabet = ["0"]\n[rule]\nkind = "magic"\n', "rule.kind", 4),
        ('group = "Z"\nalphabet = ["0"]\n[rule\n', "not valid TOML", None),
        ('group = "F_2"\nalphabet = ["0"]\n[rule]\nkind = "forbidden"\npatterns = [[["az", "0"]]]\n', "bad letter", 5),
    ],
)
def test_errors_carry_location(text, needle, line):
    with pytest.raises(SpecError) as info:
        specfile.loads(text, "sys.toml")
    assert needle in str(info.value)
    assert info.value.source == "sys.toml"
    if line is not None:
        assert info.value.line == line


def test_missing_file(tmp_path):
    with pytest.raises(SpecError):
        specfile.load(tmp_path / "absent.toml")


@st.composite
def z_specs(draw):
    k = draw(st.integers(1, 3))
    pats = draw(st.lists(
        st.dictionaries(st.integers(-3, 3).map(lambda i: (i,)), st.integers(0, k - 1), min_size=1, max_size=3),
        min_size=1, max_size=4,
    ))
    from shiftlab.groups import GroupSpec

    z = GroupSpec.lattice(1)
    return SubshiftSpec(z, Alphabet(tuple(f"s{i}" for i in range(k))), ForbiddenPatterns(tuple(Pattern(z, p) for p in pats)))


@given(z_specs())
def test_roundtrip_property(spec):
    text = specfile.dumps(spec)
    assert specfile.loads(text) == spec
    assert specfile.normalize(text) == text
