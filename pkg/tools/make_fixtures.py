"""Regenerate the bundled figure fixtures.

Run from the repository root: ``python3 tools/make_fixtures.py``.  The
figures are only available as images, so every system here is rebuilt
from the surrounding prose; the ``note`` metadata records what each one
encodes and which textual facts it was checked against.
"""

from __future__ import annotations

from pathlib import Path

from reconfdist.io import Manifest, dumps, manifest_to_doc, parts_to_doc
from reconfdist.decomposition import InterfacePartition, agent_vs_rest
from reconfdist.synthesis import MealyMachine
from reconfdist.ts import Interface, TransitionSystem

OUT = Path(__file__).resolve().parent.parent / "src" / "reconfdist" / "fixtures"
ALL = "abcdefg"

# Walkthrough graph: 4 -d-> 0, 1 -d-> 9, 0 -c-> 6, 9 initiates e, 3 only
# reacts to a and b, 5 does not listen to c.
FIG3_DELTA = [
    ("0", "c", "6"), ("1", "d", "9"), ("2", "a", "3"), ("2", "b", "4"),
    ("3", "a", "5"), ("3", "b", "4"), ("4", "d", "0"), ("4", "a", "5"),
    ("5", "a", "3"), ("5", "g", "1"), ("6", "f", "8"), ("7", "f", "8"),
    ("8", "g", "2"), ("9", "e", "7"),
]
# The first system differs by exchanging the channels of one d- and one
# g-transition.
FIG1_SWITCH = {("1", "d"): "g", ("8", "g"): "d"}


def _incoming_labels(states, delta, outputs=None):
    inc = {s: set() for s in states}
    for _, y, t in delta:
        inc[t].add(y)
    outputs = outputs or {}
    return {s: (inc[s], outputs.get(s, ())) for s in states}


def ten_state(delta, name) -> TransitionSystem:
    states = [str(i) for i in range(10)]
    return TransitionSystem.build(states, "2", ALL, ALL, (), delta,
                                  _incoming_labels(states, delta), name=name)


def fig1() -> TransitionSystem:
    delta = [(s, FIG1_SWITCH.get((s, y), y), t) for s, y, t in FIG3_DELTA]
    return ten_state(delta, "fig1-T")


def fig3():
    central = ten_state(FIG3_DELTA, "fig3")
    parts = InterfacePartition([Interface.of("ef"), Interface.of("abcdg")], ("T", "C"))
    bundle = agent_vs_rest(central, parts, 0)
    return bundle.agent.replace(name="fig3-T"), bundle.parameter.replace(name="fig3-C")


SERVICE_CHANNELS = ["r1", "r2", "q1", "q2", "f", "c", "s", "rl1", "rl2"]


def service() -> TransitionSystem:
    """Two clients time-sharing a server and a provider.

    From the idle state either client reserves.  A session of client i
    runs q_i, f, c, s, rl_i.  Once it has issued its request q_i the other
    client may reserve (waiting=1); the release then hands the server over
    directly.  Releasing with nobody waiting leads to a state where only
    the other client may reserve, so service alternates.
    """
    ids: dict = {}

    def sid(key):
        return ids.setdefault(key, str(len(ids)))

    step = {1: "q{i}", 2: "f", 3: "c", 4: "s"}
    raw = [("idle", "r1", (1, 1, 0)), ("idle", "r2", (2, 1, 0))]
    sid("idle")
    for i, j in ((1, 2), (2, 1)):
        for p in range(1, 5):
            raw.append(((i, p, 0), step[p].format(i=i), (i, p + 1, 0)))
        raw.append(((i, 5, 0), f"rl{i}", ("turn", j)))
        for p in range(2, 5):
            raw.append(((i, p, 1), step[p].format(i=i), (i, p + 1, 1)))
        raw.append(((i, 5, 1), f"rl{i}", (j, 1, 0)))
        for p in range(2, 6):
            raw.append(((i, p, 0), f"r{j}", (i, p, 1)))
        raw.append((("turn", i), f"r{i}", (i, 1, 0)))
    for a, _, b in raw:
        sid(a)
        sid(b)
    delta = [(ids[a], y, ids[b]) for a, y, b in raw]
    states = list(ids.values())
    return TransitionSystem.build(states, "0", SERVICE_CHANNELS, SERVICE_CHANNELS, (), delta,
                                  _incoming_labels(states, delta), name="service")


SERVICE_PARTS = InterfacePartition(
    [Interface.of(["f"]), Interface.of(["c", "s"]),
     Interface.of(["r1", "q1", "rl1"]), Interface.of(["r2", "q2", "rl2"])],
    ("S", "P", "C1", "C2"))

ARBITER_PARTS = InterfacePartition(
    [Interface.of(["r0", "rs"], ["g0"]), Interface.of(["r1"], ["g1"])], ("T0", "T1"))


def arbiter() -> MealyMachine:
    """One input per instant; a request grants its client, a reset withdraws.

    ``q1`` holds grant g0 and ``q2`` holds g1.
    """
    states = ("q0", "q1", "q2")
    delta = {}
    for q in states:
        delta[(q, "r0")] = ("q1", frozenset({"g0"}))
        delta[(q, "r1")] = ("q2", frozenset({"g1"}))
        delta[(q, "rs")] = ("q0", frozenset())
    return MealyMachine(states, frozenset({"rs", "r0", "r1"}), frozenset({"g0", "g1"}), delta,
                        None, frozenset(), "q0", name="arbiter")


def arbiter_t1() -> TransitionSystem:
    """Agent of the r1 client as described in prose: 0 idle, 2 granted."""
    universe = ["rs", "r0", "r1"]
    delta = [("0", "r1", "2"), ("2", "r1", "2"), ("2", "r0", "0"), ("2", "rs", "0")]
    labels = {"0": ((), ()), "2": (("r1",), ("g1",))}
    return TransitionSystem.build(["0", "2"], "0", universe, ["r1"], ["g1"], delta, labels,
                                  name="arbiter-T1")


def meta(note):
    return {"reconstructed": True, "note": note}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    t3, c3 = fig3()
    docs = {
        "fig1_T.json": Manifest("ts", fig1(), "fig1-T", "closed ten-state system to be split on <{e,f},{}>",
                                meta("Rebuilt as the second walkthrough system with the channels of "
                                     "1->9 and 8->2 exchanged; compressing the {e,f} agent leaves it "
                                     "listening to exactly {c,g} initially.")),
        "fig3_T.json": Manifest("ts", t3, "fig3-T", "agent with interface <{e,f},{}>",
                                meta("Rebuilt from the relation walkthrough: (3,0),(3,4) in R_4; "
                                     "(1,4),(1,3) not in R_4; (0,5) in R_0; (9,0),(5,6) not in R_0.")),
        "fig3_C.json": Manifest("ts", c3, "fig3-C", "parameter with interface <{a,b,c,d,g},{}>",
                                meta("Same graph as fig3_T, labels projected on the rest; companion is "
                                     "the identity.")),
        "fig4_service.json": Manifest("ts", service(), "service", "centralised time-sharing service",
                                      meta("Rebuilt from the protocol prose; 21 states so that ids run "
                                           "0..20 like the states named in the text.")),
        "fig6_arbiter.json": Manifest("mealy", arbiter(), "arbiter", "reset arbiter specification",
                                      meta("Rebuilt from the example's rules; the first instant carries no "
                                           "input since all signals start false.")),
        "fig7_T1.json": Manifest("ts", arbiter_t1(), "arbiter-T1", "expected r1 agent",
                                 meta("Transcribed from the prose description of the distributed "
                                      "arbiter's T1 agent.")),
    }
    for name, man in docs.items():
        (OUT / name).write_text(dumps(manifest_to_doc(man)), encoding="utf-8")
    (OUT / "fig4_parts.json").write_text(dumps(parts_to_doc(SERVICE_PARTS)), encoding="utf-8")
    (OUT / "fig6_parts.json").write_text(dumps(parts_to_doc(ARBITER_PARTS)), encoding="utf-8")
    print(f"wrote {len(docs) + 2} fixtures to {OUT}")


if __name__ == "__main__":
    main()
