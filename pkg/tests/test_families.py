import json

import pytest

from bootperc.families import FamilyError, Rule, UpdateFamily, dump_family, load_family


def test_rule_invariants():
    with pytest.raises(FamilyError):
        Rule(())
    with pytest.raises(FamilyError):
        Rule.of((0, 0))
    with pytest.raises(FamilyError):
        Rule.of((1, 0), (1, 0))
    r = Rule.of((2, -3), (0, 1))
    assert r.range() == 3
    assert r.negated().offsets == ((-2, 3), (0, -1))


def test_family_invariants():
    with pytest.raises(FamilyError):
        UpdateFamily("empty", ())
    fam = UpdateFamily.of("f", Rule.of((1, 0)), Rule.of((0, 2)))
    assert fam.range() == 2
    assert set(fam.union_offsets()) == {(1, 0), (0, 2)}


def test_json_roundtrip(tmp_path, op):
    path = tmp_path / "fam.json"
    dump_family(op, path)
    loaded = load_family(path)
    assert loaded == op


def test_loader_rejects_bad_documents(tmp_path):
    cases = [
        {"name": "x"},  # no rules
        {"name": "x", "rules": []},
        {"name": "x", "rules": [[[0, 0]]]},
        {"name": "x", "rules": [[[1, 0], [1, 0]]]},
        {"name": "x", "rules": [[[1, 0.5]]]},
        {"name": "x", "rules": [[[1, 0]]], "extra": 1},
        {"name": 3, "rules": [[[1, 0]]]},
    ]
    for i, doc in enumerate(cases):
        p = tmp_path / f"bad{i}.json"
        p.write_text(json.dumps(doc))
        with pytest.raises(FamilyError):
            load_family(p)


def test_loader_rejects_malformed_json(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    with pytest.raises(FamilyError):
        load_family(p)
