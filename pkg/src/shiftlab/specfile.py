"""Subshift files: a small TOML dialect, its normal form and its digest.

Example::

    name = "golden-mean"
    group = "Z"
    alphabet = ["0", "1"]

    [rule]
    kind = "forbidden"
    patterns = [[[[0], "1"], [[1], "1"]]]

Lattice elements are int lists (a bare int is fine over Z), free-group
elements are reduced words with capitals for inverses and ``"e"`` for the
identity. ``kind = "linear-gf2"`` takes ``supports`` (lists of elements) and
needs ``gf2 = true``; ``kind = "predicate"`` takes a registered ``name``.
"""

from __future__ import annotations

import hashlib
import json
import re
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .errors import SpecError, UsageError
from .groups import GroupSpec
from .shift import Alphabet, ForbiddenPatterns, LinearGF2, Pattern, Predicate, SubshiftSpec

_TOP = {"name", "group", "alphabet", "gf2", "rule", "metadata"}
_RULE = {
    "forbidden": {"kind", "patterns"},
    "linear-gf2": {"kind", "supports"},
    "predicate": {"kind", "name"},
}


def _line_of(text: str, *needles) -> int | None:
    """First line containing all needles (1-based), for diagnostics."""
    for i, line in enumerate(text.splitlines(), 1):
        if all(n in line for n in needles):
            return i
    return None


class _Reader:
    def __init__(self, text: str, source: str):
        self.text = text
        self.source = source

    def fail(self, message: str, *needles):
        line = _line_of(self.text, *needles) if needles else None
        raise SpecError(message, self.source, line)


def loads(text: str, source: str = "<string>") -> SubshiftSpec:
    """Parse and validate a subshift file."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise SpecError(f"not valid TOML: {exc}", source, int(m.group(1)) if m else None) from None
    return from_document(doc, _Reader(text, source))


def load(path) -> SubshiftSpec:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SpecError(f"cannot read file: {exc.strerror}", str(path)) from None
    return loads(text, str(path))


def from_document(doc: dict, reader: _Reader | None = None) -> SubshiftSpec:
    r = reader or _Reader("", "<document>")
    extra = set(doc) - _TOP
    if extra:
        key = sorted(extra)[0]
        r.fail(f"unknown key {key!r}", key)
    for key in ("group", "alphabet", "rule"):
        if key not in doc:
            r.fail(f"missing required key {key!r}")
    if not isinstance(doc["group"], str):
        r.fail("group must be a string such as \"Z^2\" or \"F_2\"", "group")
    try:
        group = GroupSpec.parse(doc["group"])
    except UsageError as exc:
        r.fail(str(exc), "group")
    symbols = doc["alphabet"]
    if not isinstance(symbols, list) or not all(isinstance(s, (str, int)) and not isinstance(s, bool) for s in symbols):
        r.fail("alphabet must be a list of symbol names", "alphabet")
    gf2 = doc.get("gf2", False)
    if not isinstance(gf2, bool):
        r.fail("gf2 must be true or false", "gf2")
    try:
        alphabet = Alphabet(tuple(str(s) for s in symbols), gf2)
    except UsageError as exc:
        r.fail(str(exc), "alphabet" if "alphabet" in str(exc) else "gf2")
    rule_doc = doc["rule"]
    if not isinstance(rule_doc, dict):
        r.fail("rule must be a table", "rule")
    kind = rule_doc.get("kind")
    if kind not in _RULE:
        r.fail(f"rule.kind must be one of {sorted(_RULE)}", "kind")
    extra = set(rule_doc) - _RULE[kind]
    if extra:
        key = sorted(extra)[0]
        r.fail(f"unexpected key {key!r} for a {kind} rule", key)
    missing = _RULE[kind] - set(rule_doc)
    if missing:
        r.fail(f"a {kind} rule needs {sorted(missing)[0]!r}", "kind")
    meta = doc.get("metadata", {})
    if not isinstance(meta, dict) or not all(isinstance(v, (str, int, float, bool)) for v in meta.values()):
        r.fail("metadata must be a table of plain values", "metadata")

    def element(obj, key):
        try:
            return group.parse_element(obj)
        except UsageError as exc:
            r.fail(str(exc), key, json.dumps(obj) if not isinstance(obj, str) else obj)

    if kind == "forbidden":
        pats = rule_doc["patterns"]
        if not isinstance(pats, list):
            r.fail("patterns must be a list (empty for a full shift)", "patterns")
        built = []
        for pat in pats:
            if not isinstance(pat, list) or not pat:
                r.fail("each forbidden pattern must be a nonempty list of [element, symbol] pairs", "patterns")
            out = {}
            for pair in pat:
                if not isinstance(pair, list) or len(pair) != 2:
                    r.fail(f"bad [element, symbol] pair {pair!r}", "patterns")
                g = element(pair[0], "patterns")
                sym = str(pair[1])
                if sym not in alphabet.symbols:
                    r.fail(f"unknown symbol {sym!r} in a forbidden pattern; alphabet is {list(alphabet.symbols)}", f'"{sym}"')
                if g in out:
                    r.fail(f"site {pair[0]!r} assigned twice in one pattern", "patterns")
                out[g] = alphabet.index(sym)
            built.append(Pattern(group, out))
        rule = ForbiddenPatterns(tuple(built))
    elif kind == "linear-gf2":
        if not gf2:
            r.fail("a linear-gf2 rule needs gf2 = true and alphabet [\"0\", \"1\"]", "linear-gf2")
        sups = rule_doc["supports"]
        if not isinstance(sups, list) or not sups:
            r.fail("supports must be a nonempty list", "supports")
        built = []
        for s in sups:
            if not isinstance(s, list) or not s:
                r.fail("each support must be a nonempty list of elements", "supports")
            elems = [element(e, "supports") for e in s]
            if len(set(elems)) != len(elems):
                r.fail("a support lists an element twice", "supports")
            built.append(tuple(elems))
        rule = LinearGF2(tuple(built))
    else:
        name = rule_doc["name"]
        if not isinstance(name, str):
            r.fail("predicate name must be a string", "name")
        rule = Predicate(name)
    try:
        return SubshiftSpec(
            group,
            alphabet,
            rule,
            name=str(doc.get("name", "")),
            metadata=tuple(sorted(meta.items())),
        )
    except UsageError as exc:
        r.fail(str(exc), "kind")


def to_document(spec: SubshiftSpec) -> dict:
    """Normal form: canonical element order, sorted rules, explicit defaults."""
    grp = spec.group
    alpha = spec.alphabet
    if isinstance(spec.rule, ForbiddenPatterns):
        rule = {
            "kind": "forbidden",
            "patterns": [[[grp.format(g), alpha.name(v)] for g, v in p.items()] for p in spec.rule.patterns],
        }
    elif isinstance(spec.rule, LinearGF2):
        rule = {"kind": "linear-gf2", "supports": [[grp.format(g) for g in s] for s in spec.rule.supports]}
    else:
        rule = {"kind": "predicate", "name": spec.rule.name}
    return {
        "name": spec.name,
        "group": grp.name,
        "alphabet": list(alpha.symbols),
        "gf2": alpha.gf2,
        "rule": rule,
        "metadata": dict(spec.metadata),
    }


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def spec_hash(spec: SubshiftSpec) -> str:
    return hashlib.sha256(canonical_json(to_document(spec)).encode()).hexdigest()


def _value(v) -> str:
    # JSON literals are valid TOML for strings, ints, bools and arrays of them
    if isinstance(v, float):
        return repr(v)
    return json.dumps(v, ensure_ascii=False)


def dumps(spec: SubshiftSpec) -> str:
    doc = to_document(spec)
    lines = []
    if doc["name"]:
        lines.append(f"name = {_value(doc['name'])}")
    lines.append(f"group = {_value(doc['group'])}")
    lines.append(f"alphabet = {_value(doc['alphabet'])}")
    if doc["gf2"]:
        lines.append("gf2 = true")
    lines.append("")
    lines.append("[rule]")
    rule = doc["rule"]
    lines.append(f"kind = {_value(rule['kind'])}")
    for key in ("patterns", "supports"):
        if key in rule:
            lines.append(f"{key} = [")
            for item in rule[key]:
                lines.append(f"  {_value(item)},")
            lines.append("]")
    if "name" in rule:
        lines.append(f"name = {_value(rule['name'])}")
    if doc["metadata"]:
        lines.append("")
        lines.append("[metadata]")
        for k, v in sorted(doc["metadata"].items()):
            lines.append(f"{json.dumps(k)} = {_value(v)}")
    return "\n".join(lines) + "\n"


def normalize(text: str, source: str = "<string>") -> str:
    return dumps(loads(text, source))
