import json

import pytest
from hypothesis import given, strategies as st

from corpus import mealy, two_part
from reconfdist import TransitionSystem, validate
from reconfdist.dot import export_dot
from reconfdist.errors import InvalidSystem, ParseError, SchemaError
from reconfdist.io import (Manifest, dumps, fixture_path, load, load_fixture, loads, manifest_to_doc,
                           mealy_from_doc, mealy_to_doc, parse_parts, parts_to_doc, store, store_ts,
                           ts_from_doc, ts_to_doc)

FIXTURES = ["fig1_T.json", "fig3_T.json", "fig3_C.json", "fig4_service.json",
            "fig6_arbiter.json", "fig7_T1.json"]
seeds = st.integers(0, 10_000)


@pytest.mark.parametrize("name", FIXTURES)
def test_fixture_loads_validates_and_round_trips(name, tmp_path):
    text = fixture_path(name).read_text(encoding="utf-8")
    man = loads(text)
    assert man.metadata["reconstructed"] is True and man.metadata["note"]
    if man.kind == "ts":
        assert validate(man.payload) == []
    store(man, tmp_path / name)
    assert (tmp_path / name).read_text(encoding="utf-8") == text
    assert load(tmp_path / name).payload == man.payload


def test_missing_field_is_named():
    doc = ts_to_doc(load_fixture("fig3_T.json").payload)
    del doc["initial"]
    with pytest.raises(SchemaError) as err:
        ts_from_doc(doc)
    assert err.value.missing == ("initial",)
    assert "initial" in str(err.value)


def test_unexpected_field_is_named():
    doc = ts_to_doc(load_fixture("fig3_T.json").payload)
    doc["colour"] = "red"
    with pytest.raises(SchemaError) as err:
        ts_from_doc(doc)
    assert err.value.extra == ("colour",)


def test_syntax_errors_carry_a_position():
    with pytest.raises(ParseError) as err:
        loads('{\n  "kind": "ts",\n  oops\n}')
    assert err.value.line == 3 and err.value.column is not None


def test_unknown_kind():
    with pytest.raises(ParseError) as err:
        loads(json.dumps({"kind": "petri"}))
    assert err.value.field == "kind"


def test_invalid_system_lists_violations():
    doc = ts_to_doc(load_fixture("fig3_T.json").payload)
    doc["states"][0]["listen"] = []
    with pytest.raises(InvalidSystem) as err:
        ts_from_doc(doc)
    assert {v.kind for v in err.value.violations} == {"ListenMismatch"}
    assert ts_from_doc(doc, check=False).listening(doc["states"][0]["id"]) == frozenset()


def test_repeated_mealy_entry():
    doc = mealy_to_doc(load_fixture("fig6_arbiter.json").payload)
    doc["delta"].append(dict(doc["delta"][0]))
    with pytest.raises(SchemaError):
        mealy_from_doc(doc)


def test_partition_formats(tmp_path):
    inline = parse_parts("T0:r0,rs/g0; T1:r1/g1")
    assert inline.names == ("T0", "T1")
    assert inline[0].initiate == {"r0", "rs"} and inline[1].outputs == {"g1"}
    path = tmp_path / "parts.json"
    path.write_text(dumps(parts_to_doc(inline)), encoding="utf-8")
    assert parse_parts(str(path)) == inline
    assert parse_parts(str(fixture_path("fig6_parts.json"))) == inline
    with pytest.raises(ParseError):
        parse_parts("nonsense")
    with pytest.raises(ParseError):
        parse_parts(";")


def test_store_keeps_description_and_metadata(tmp_path):
    ts, _ = two_part(2)
    store_ts(ts, tmp_path / "t.json", description="demo", metadata={"seed": 2})
    man = load(tmp_path / "t.json")
    assert (man.description, man.metadata, man.payload) == ("demo", {"seed": 2}, ts)


@given(seeds)
def test_system_documents_round_trip_byte_identically(seed):
    ts, _ = two_part(seed)
    text = dumps(manifest_to_doc(Manifest("ts", ts, ts.name)))
    again = loads(text)
    assert again.payload == ts
    assert dumps(manifest_to_doc(again)) == text


@given(seeds)
def test_mealy_documents_round_trip_byte_identically(seed):
    m = mealy(seed)
    text = dumps(manifest_to_doc(Manifest("mealy", m, m.name)))
    again = loads(text)
    assert again.payload == m
    assert dumps(manifest_to_doc(again)) == text


def test_dot_for_a_lone_state():
    text = export_dot(TransitionSystem.build(["0"], "0", "a", name="lone"))
    nodes = [line for line in text.splitlines() if "[label=" in line and "->" not in line]
    edges = [line for line in text.splitlines() if "->" in line and "__start" not in line]
    assert len(nodes) == 1 and edges == []


def test_dot_annotates_listening_and_roles():
    agent = load_fixture("fig3_T.json").payload
    text = export_dot(agent)
    for s in agent.states:
        line = next(l for l in text.splitlines() if l.startswith(f'  "{s}" [label='))
        listen = ",".join(sorted(agent.listening(s)))
        assert f"listen:{{{listen}}}" in line
    assert '"9" -> "7" [label="e!"];' in text
    assert '"2" -> "3" [label="a?", style=dashed];' in text
