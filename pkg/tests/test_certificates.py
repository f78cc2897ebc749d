from __future__ import annotations

import copy
import json

import pytest

from shiftlab import certificates, zoo
from shiftlab.entropy import independence_density
from shiftlab.shift import Pattern
from shiftlab.tmp import check_memory_set, find_interchangeable_pair, homoclinic_search

from conftest import Z, interval


def sample_certs():
    sunny = zoo.sunny_side_up()
    golden = zoo.golden_mean()
    return [
        certificates.encode(sunny, check_memory_set(sunny, [(0,)], interval(0, 2), interval(0, 4))),
        certificates.encode(golden, find_interchangeable_pair(golden, [(0,)], interval(-1, 2))),
        certificates.encode(golden, homoclinic_search(golden, "0", 1)),
        certificates.encode(golden, independence_density(
            golden, [Pattern(Z, {(0,): 0}), Pattern(Z, {(0,): 1})], interval(0, 4))),
    ]


def test_kinds_and_fields():
    certs = sample_certs()
    assert [c["kind"] for c in certs] == list(certificates.KINDS)
    for c in certs:
        assert {"kind", "spec_hash", "level", "payload", "digest", "spec"} <= set(c)


@pytest.mark.parametrize("i", range(4))
def test_verifies(i):
    ok, msg = certificates.verify(sample_certs()[i])
    assert ok, msg


def test_file_roundtrip(tmp_path):
    certs = sample_certs()
    path = tmp_path / "c.jsonl"
    certificates.write(path, certs)
    assert certificates.read(path) == json.loads(json.dumps(certs))
    assert all(certificates.verify(c)[0] for c in certificates.read(path))


def test_encoding_is_deterministic():
    a = [certificates.dumps(c) for c in sample_certs()]
    b = [certificates.dumps(c) for c in sample_certs()]
    assert a == b


@pytest.mark.parametrize("i", range(4))
def test_every_single_character_mutation_fails(i):
    """Flip each character of the payload region; no mutant may verify."""
    cert = sample_certs()[i]
    text = certificates.dumps(cert)
    start = text.index('"payload":')
    end = text.index(',"spec":')
    rejected = 0
    for pos in range(start + len('"payload":'), end):
        ch = text[pos]
        for new in {"0": "1", "1": "0"}.get(ch, ch.swapcase() if ch.isalpha() else None) or ():
            mutant = text[:pos] + new + text[pos + 1:]
            try:
                obj = json.loads(mutant)
            except json.JSONDecodeError:
                rejected += 1
                continue
            assert not certificates.verify(obj)[0], mutant
            rejected += 1
    assert rejected > 0


@pytest.mark.parametrize("i", range(4))
def test_consistent_forgery_still_fails(i):
    """Edit the claim and recompute the digest: the re-check must catch it."""
    cert = copy.deepcopy(sample_certs()[i])
    p = cert["payload"]
    if cert["kind"] == "counterexample":
        p["y"] = list(p["x"])
    elif cert["kind"] == "pair":
        p["q"] = list(p["p"])
    elif cert["kind"] == "homoclinic":
        p["values"] = ["1"] * len(p["values"])
    else:
        p["best"] = p["ambient"][:2]
    cert["digest"] = certificates._digest(p)
    ok, msg = certificates.verify(cert)
    assert not ok and "does not hold" in msg


def test_spec_tampering():
    cert = sample_certs()[0]
    cert["spec"]["name"] = "other"
    ok, msg = certificates.verify(cert)
    assert not ok and "spec hash" in msg


def test_malformed_never_raises():
    for bad in ({}, [], {"kind": "pair"}, {**sample_certs()[1], "kind": "teapot"}, None):
        ok, _ = certificates.verify(bad)
        assert not ok


def test_nothing_to_certify():
    with pytest.raises(certificates.CertificateError):
        certificates.encode(zoo.golden_mean(), 42)


def test_read_rejects_garbage(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text("{not json\n")
    with pytest.raises(certificates.CertificateError):
        certificates.read(path)
