"""JSON-lines certificates for witnesses and counterexamples.

One object per line::

    {"kind": ..., "spec_hash": ..., "level": ..., "payload": {...},
     "spec": {...normal form...}, "digest": sha256 of the payload}

Verification recomputes both hashes and then re-checks the claim itself
from the embedded spec, so a certificate stands on its own.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from . import specfile
from .config import Config
from .entropy import IndependenceReport, verify_independence
from .errors import ShiftlabError
from .shift import Pattern, SubshiftSpec, parse_level
from .tmp import (
    Counterexample,
    HomoclinicWitness,
    PairWitness,
    validate_counterexample,
    validate_homoclinic,
    validate_pair,
)

KINDS = ("counterexample", "pair", "homoclinic", "independence")


class CertificateError(ShiftlabError):
    pass


def _digest(payload: dict) -> str:
    return hashlib.sha256(specfile.canonical_json(payload).encode()).hexdigest()


def _elems(spec, sites) -> list:
    return [spec.group.format(g) for g in sites]


def _names(spec, pattern: Pattern, sites) -> list:
    return [spec.alphabet.name(pattern[g]) for g in sites]


def encode(spec: SubshiftSpec, result) -> dict:
    """Certificate object for a counterexample, pair, homoclinic witness or independence report."""
    if isinstance(result, Counterexample):
        kind, level = "counterexample", str(result.level)
        payload = {
            "inner": _elems(spec, result.inner),
            "outer": _elems(spec, result.outer),
            "window": _elems(spec, result.window),
            "x": _names(spec, result.x, result.window),
            "y": _names(spec, result.y, result.window),
        }
    elif isinstance(result, PairWitness):
        kind, level = "pair", str(result.level)
        rest = result.context.support
        payload = {
            "support": _elems(spec, result.inner),
            "p": _names(spec, result.p, result.inner),
            "q": _names(spec, result.q, result.inner),
            "context_support": _elems(spec, rest),
            "context": _names(spec, result.context, rest),
        }
    elif isinstance(result, HomoclinicWitness):
        kind, level = "homoclinic", "margin:0"
        payload = {
            "background": spec.alphabet.name(result.background),
            "radius": result.radius,
            "margin": result.margin,
            "support": _elems(spec, result.pattern.support),
            "values": _names(spec, result.pattern, result.pattern.support),
        }
    elif isinstance(result, IndependenceReport):
        kind, level = "independence", str(result.level)
        payload = {
            "cylinders": [[[spec.group.format(g), spec.alphabet.name(v)] for g, v in c.items()] for c in result.cylinders],
            "ambient": _elems(spec, result.ambient),
            "best": _elems(spec, result.best),
        }
    else:
        raise CertificateError(f"nothing to certify in {type(result).__name__}")
    return {
        "kind": kind,
        "spec_hash": specfile.spec_hash(spec),
        "level": level,
        "payload": payload,
        "spec": specfile.to_document(spec),
        "digest": _digest(payload),
    }


def dumps(cert: dict) -> str:
    return specfile.canonical_json(cert)


def write(path, certs) -> None:
    Path(path).write_text("".join(dumps(c) + "\n" for c in certs))


def read(path) -> list:
    out = []
    for i, line in enumerate(Path(path).read_text().splitlines(), 1):
        if not line.strip():
            continue
        try:
            out.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise CertificateError(f"{path}:{i}: not JSON ({exc.msg})") from None
    return out


def _pattern(spec, sites, names) -> Pattern:
    if len(sites) != len(names):
        raise CertificateError("support and values differ in length")
    return Pattern(spec.group, {g: spec.alphabet.index(n) for g, n in zip(sites, names)})


def decode(cert: dict):
    """Rebuild ``(spec, result)`` from a certificate, checking both hashes."""
    if not isinstance(cert, dict):
        raise CertificateError("a certificate must be a JSON object")
    missing = {"kind", "spec_hash", "level", "payload", "spec", "digest"} - set(cert)
    if missing:
        raise CertificateError(f"missing field {sorted(missing)[0]!r}")
    payload = cert["payload"]
    if _digest(payload) != cert["digest"]:
        raise CertificateError("payload digest mismatch")
    spec = specfile.from_document(cert["spec"])
    if specfile.spec_hash(spec) != cert["spec_hash"]:
        raise CertificateError("spec hash mismatch")
    kind = cert["kind"]
    level = parse_level(cert["level"])
    grp = spec.group

    def sites(key):
        return tuple(grp.parse_element(e) for e in payload[key])

    if kind == "counterexample":
        window = sites("window")
        result = Counterexample(
            level,
            sites("inner"),
            sites("outer"),
            window,
            _pattern(spec, window, payload["x"]),
            _pattern(spec, window, payload["y"]),
        )
    elif kind == "pair":
        inner, rest = sites("support"), sites("context_support")
        result = PairWitness(
            level,
            inner,
            grp.canonical(inner + rest),
            _pattern(spec, inner, payload["p"]),
            _pattern(spec, inner, payload["q"]),
            _pattern(spec, rest, payload["context"]),
        )
    elif kind == "homoclinic":
        result = HomoclinicWitness(
            spec.alphabet.index(payload["background"]),
            int(payload["radius"]),
            int(payload["margin"]),
            _pattern(spec, sites("support"), payload["values"]),
        )
    elif kind == "independence":
        cyl = tuple(spec.pattern(c) for c in payload["cylinders"])
        result = IndependenceReport(cyl, sites("ambient"), sites("best"), level)
    else:
        raise CertificateError(f"unknown certificate kind {kind!r}")
    return spec, result


def verify(cert: dict, config: Config | None = None) -> tuple:
    """``(ok, message)``; never raises on malformed input."""
    try:
        spec, result = decode(cert)
        if isinstance(result, Counterexample):
            ok = validate_counterexample(spec, result, config)
        elif isinstance(result, PairWitness):
            ok = validate_pair(spec, result, config)
        elif isinstance(result, HomoclinicWitness):
            ok = validate_homoclinic(spec, result, config)
        else:
            ok = verify_independence(spec, result, config)
    except (ShiftlabError, KeyError, TypeError, ValueError, AttributeError) as exc:
        return False, f"{type(exc).__name__}: {exc}"
    return ok, f"{cert['kind']} verified" if ok else f"{cert['kind']} claim does not hold"
