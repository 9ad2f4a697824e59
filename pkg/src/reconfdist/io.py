"""JSON exchange format for systems, Mealy machines and interface partitions.

Documents are written canonically (sorted keys, naturally ordered lists,
two-space indent, trailing newline) so storing a loaded document again is
byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .decomposition import InterfacePartition
from .errors import InvalidSystem, ParseError, SchemaError
from .synthesis import MealyMachine, mealy_problems
from .ts import Interface, Label, TransitionSystem, natural_key, validate

TS_KEYS = {"kind", "name", "universe", "interface", "initial", "states", "transitions"}
MEALY_KEYS = {"kind", "name", "inputs", "outputs", "states", "delta", "initial"}
OPTIONAL = {"description", "metadata"}


@dataclass
class Manifest:
    kind: str
    payload: object
    name: str = ""
    description: str = ""
    metadata: dict = field(default_factory=dict)


def _sorted(items):
    return sorted(items, key=natural_key)


def _keys(doc, required, where, optional=OPTIONAL):
    if not isinstance(doc, dict):
        raise SchemaError(f"{where} must be an object")
    missing = sorted(required - doc.keys())
    extra = sorted(doc.keys() - required - optional)
    if missing or extra:
        raise SchemaError(f"{where} does not match the schema", missing, extra)


def _strings(value, where) -> list:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise SchemaError(f"{where} must be a list of strings")
    return value


def ts_to_doc(ts: TransitionSystem) -> dict:
    return {
        "kind": "ts",
        "name": ts.name,
        "universe": _sorted(ts.universe),
        "interface": {"initiate": _sorted(ts.interface.initiate),
                      "outputs": _sorted(ts.interface.outputs)},
        "initial": ts.initial,
        "states": [{"id": s,
                    "listen": _sorted(ts.listen.get(s, ())),
                    "label": {"channels": _sorted(ts.label[s].channels),
                              "outputs": _sorted(ts.label[s].outputs)}}
                   for s in ts.states if s in ts.label],
        "transitions": [{"from": s, "channel": y, "to": t} for s, y, t in ts.sorted_transitions()],
    }


def ts_from_doc(doc: dict, check: bool = True) -> TransitionSystem:
    _keys(doc, TS_KEYS, "system document")
    iface = doc["interface"]
    _keys(iface, {"initiate", "outputs"}, "interface", optional=set())
    states, listen, labels = [], {}, {}
    for i, entry in enumerate(doc["states"]):
        _keys(entry, {"id", "listen", "label"}, f"states[{i}]", optional=set())
        _keys(entry["label"], {"channels", "outputs"}, f"states[{i}].label", optional=set())
        sid = entry["id"]
        states.append(sid)
        listen[sid] = frozenset(_strings(entry["listen"], f"states[{i}].listen"))
        labels[sid] = Label.of(_strings(entry["label"]["channels"], f"states[{i}].label.channels"),
                               _strings(entry["label"]["outputs"], f"states[{i}].label.outputs"))
    delta = []
    for i, tr in enumerate(doc["transitions"]):
        _keys(tr, {"from", "channel", "to"}, f"transitions[{i}]", optional=set())
        delta.append((tr["from"], tr["channel"], tr["to"]))
    ts = TransitionSystem(
        tuple(states), doc["initial"], frozenset(_strings(doc["universe"], "universe")),
        Interface.of(_strings(iface["initiate"], "interface.initiate"),
                     _strings(iface["outputs"], "interface.outputs")),
        listen, labels, frozenset(delta), doc["name"])
    if check:
        violations = validate(ts)
        if violations:
            raise InvalidSystem(violations)
    return ts


def mealy_to_doc(m: MealyMachine) -> dict:
    return {
        "kind": "mealy",
        "name": m.name,
        "states": list(m.states),
        "inputs": _sorted(m.inputs),
        "outputs": _sorted(m.outputs),
        "delta": [{"from": q, "input": y, "to": t, "outputs": _sorted(outs)}
                  for q, y, t, outs in m.entries()],
        "initial": {"input": m.initial_input, "outputs": _sorted(m.initial_outputs),
                    "state": m.initial_state},
    }


def mealy_from_doc(doc: dict, check: bool = True) -> MealyMachine:
    _keys(doc, MEALY_KEYS, "mealy document")
    _keys(doc["initial"], {"input", "outputs", "state"}, "initial", optional=set())
    delta = {}
    for i, tr in enumerate(doc["delta"]):
        _keys(tr, {"from", "input", "to", "outputs"}, f"delta[{i}]", optional=set())
        key = (tr["from"], tr["input"])
        if key in delta:
            raise SchemaError(f"delta[{i}] repeats ({key[0]}, {key[1]})")
        delta[key] = (tr["to"], frozenset(_strings(tr["outputs"], f"delta[{i}].outputs")))
    init = doc["initial"]
    m = MealyMachine(tuple(_strings(doc["states"], "states")),
                     frozenset(_strings(doc["inputs"], "inputs")),
                     frozenset(_strings(doc["outputs"], "outputs")),
                     delta, init["input"], frozenset(_strings(init["outputs"], "initial.outputs")),
                     init["state"], name=doc["name"])
    if check:
        problems = mealy_problems(m)
        if problems:
            raise InvalidSystem(problems)
    return m


def manifest_to_doc(man: Manifest) -> dict:
    doc = ts_to_doc(man.payload) if man.kind == "ts" else mealy_to_doc(man.payload)
    if man.name:
        doc["name"] = man.name
    if man.description:
        doc["description"] = man.description
    if man.metadata:
        doc["metadata"] = man.metadata
    return doc


def manifest_from_doc(doc, check: bool = True) -> Manifest:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise SchemaError("document has no kind", missing=("kind",))
    kind = doc["kind"]
    if kind == "ts":
        payload = ts_from_doc(doc, check)
    elif kind == "mealy":
        payload = mealy_from_doc(doc, check)
    else:
        raise ParseError(f"unknown kind {kind!r}", field="kind")
    return Manifest(kind, payload, doc.get("name", ""), doc.get("description", ""),
                    dict(doc.get("metadata", {})))


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _parse(text: str, source: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: {exc.msg}", exc.lineno, exc.colno) from exc


def loads(text: str, check: bool = True, source: str = "<string>") -> Manifest:
    return manifest_from_doc(_parse(text, source), check)


def load(path, check: bool = True) -> Manifest:
    path = Path(path)
    return loads(path.read_text(encoding="utf-8"), check, str(path))


def store(man: Manifest, path) -> None:
    Path(path).write_text(dumps(manifest_to_doc(man)), encoding="utf-8")


def load_ts(path) -> TransitionSystem:
    man = load(path)
    if man.kind != "ts":
        raise SchemaError(f"{path} holds a {man.kind}, expected a transition system")
    return man.payload


def store_ts(ts: TransitionSystem, path, **meta) -> None:
    store(Manifest("ts", ts, ts.name, **meta), path)


def _parts_from_doc(doc) -> InterfacePartition:
    if not isinstance(doc, dict) or "parts" not in doc:
        raise SchemaError("partition document needs 'parts'", missing=("parts",))
    names, ifaces = [], []
    for i, part in enumerate(doc["parts"]):
        _keys(part, {"name", "initiate", "outputs"}, f"parts[{i}]", optional=set())
        names.append(part["name"])
        ifaces.append(Interface.of(_strings(part["initiate"], f"parts[{i}].initiate"),
                                   _strings(part["outputs"], f"parts[{i}].outputs")))
    return InterfacePartition(ifaces, names)


def parts_to_doc(parts: InterfacePartition) -> dict:
    return {"parts": [{"name": n, "initiate": _sorted(p.initiate), "outputs": _sorted(p.outputs)}
                      for n, p in zip(parts.names, parts)]}


def parse_parts(spec: str) -> InterfacePartition:
    """``name:y1,y2/o1;name2:y3`` or the path of a JSON partition document."""
    path = Path(spec)
    if spec.endswith(".json") or path.is_file():
        return _parts_from_doc(_parse(path.read_text(encoding="utf-8"), spec))
    names, ifaces = [], []
    for i, chunk in enumerate(c for c in spec.split(";") if c.strip()):
        name, sep, body = chunk.partition(":")
        if not sep or not name.strip():
            raise ParseError(f"part {i} must look like name:channels/outputs", column=i, field="parts")
        chans, _, outs = body.partition("/")
        names.append(name.strip())
        ifaces.append(Interface.of([c.strip() for c in chans.split(",") if c.strip()],
                                   [o.strip() for o in outs.split(",") if o.strip()]))
    if not ifaces:
        raise ParseError("empty partition", field="parts")
    return InterfacePartition(ifaces, names)


def fixture_path(name: str):
    """Path of a bundled fixture such as ``"fig3_T.json"``."""
    return resources.files("reconfdist") / "fixtures" / name


def load_fixture(name: str) -> Manifest:
    return loads(fixture_path(name).read_text(encoding="utf-8"), source=name)
