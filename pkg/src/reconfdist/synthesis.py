"""Mealy-machine specifications, their TS encoding, bounded language
comparison and the teamwork-synthesis pipeline."""

from __future__ import annotations

from dataclasses import dataclass, field

from .bisim import CLOSED, BisimWitness, strong_bisimilar
from .composition import compose
from .decomposition import InterfacePartition
from .errors import EmptyMealy, VerificationFailed
from .ts import Label, TransitionSystem, is_deterministic, natural_key

INITIAL_ID = "init"


@dataclass(frozen=True, eq=False)
class MealyMachine:
    """``<Q, Y, O, iota, delta>`` with ``delta[(q, y)] = (q', outputs)``.

    ``initial_input`` may be ``None``: the first instant carries no input
    (the arbiter example starts with every signal false).
    """

    states: tuple
    inputs: frozenset
    outputs: frozenset
    delta: dict
    initial_input: str | None
    initial_outputs: frozenset
    initial_state: str
    name: str = field(default="", compare=False)

    def __eq__(self, other):
        if not isinstance(other, MealyMachine):
            return NotImplemented
        return (self.states == other.states and self.inputs == other.inputs
                and self.outputs == other.outputs and self.delta == other.delta
                and self.initial_input == other.initial_input
                and self.initial_outputs == other.initial_outputs
                and self.initial_state == other.initial_state)

    __hash__ = None

    def entries(self) -> list:
        """Delta as sorted ``(q, y, q', outputs)`` tuples."""
        return [(q, y, t, outs) for (q, y), (t, outs) in
                sorted(self.delta.items(), key=lambda kv: (natural_key(kv[0][0]), kv[0][1]))]

    def letter(self, y, outs) -> Label:
        """Image of the Mealy letter ``(y, O)`` as a TS label ``({y}, O)``."""
        return Label(frozenset() if y is None else frozenset([y]), frozenset(outs))


def mealy_problems(m: MealyMachine) -> list:
    found = []
    qs = set(m.states)
    if m.initial_state not in qs:
        found.append(f"initial state {m.initial_state!r} is not a state")
    if m.initial_input is not None and m.initial_input not in m.inputs:
        found.append(f"initial input {m.initial_input!r} is not an input")
    if not m.initial_outputs <= m.outputs:
        found.append(f"initial outputs {sorted(m.initial_outputs - m.outputs)} undeclared")
    for q, y, t, outs in m.entries():
        if q not in qs or t not in qs:
            found.append(f"delta entry ({q},{y}) references an unknown state")
        if y not in m.inputs:
            found.append(f"delta entry ({q},{y}) uses an unknown input")
        if not outs <= m.outputs:
            found.append(f"delta entry ({q},{y}) emits undeclared outputs {sorted(outs - m.outputs)}")
    return found


def entry_id(q: str, y: str) -> str:
    return f"{q}.{y}"


def mealy_to_ts(m: MealyMachine) -> TransitionSystem:
    """Encode each delta entry as a state labelled ``({y}, O)``.

    The extra initial state carries the initial letter; its moves lead to
    the entries leaving ``q0`` and each entry moves to the entries leaving
    its target.  The result has ``|delta| + 1`` states.
    """
    if not m.delta:
        raise EmptyMealy(f"{m.name or 'machine'} has no transitions")
    entries = m.entries()
    ids = [entry_id(q, y) for q, y, _, _ in entries]
    if len(set(ids)) != len(ids) or INITIAL_ID in ids:
        raise ValueError("state/input names collide in the encoded state ids")
    leaving: dict = {}
    for (q, y, t, outs), sid in zip(entries, ids):
        leaving.setdefault(q, []).append((y, sid))
    labels = {INITIAL_ID: m.letter(m.initial_input, m.initial_outputs)}
    delta = []
    for y, sid in leaving.get(m.initial_state, []):
        delta.append((INITIAL_ID, y, sid))
    for (q, y, t, outs), sid in zip(entries, ids):
        labels[sid] = m.letter(y, outs)
        for y2, sid2 in leaving.get(t, []):
            delta.append((sid, y2, sid2))
    ts = TransitionSystem.build([INITIAL_ID] + ids, INITIAL_ID, m.inputs, m.inputs, m.outputs,
                                delta, labels, name=m.name)
    assert len(ts.states) == len(m.delta) + 1
    assert all(len(ts.labelled(s).channels) == 1 for s in ids)
    assert all(t != INITIAL_ID for _, _, t in ts.delta)
    return ts


@dataclass(frozen=True)
class IsoCheckResult:
    equivalent_to_depth: int
    counterexample: tuple | None = None
    only_in: str | None = None

    @property
    def ok(self) -> bool:
        return self.counterexample is None

    def __bool__(self):
        return self.ok


def bounded_language_iso(m: MealyMachine, ts: TransitionSystem, depth: int = 10) -> IsoCheckResult:
    """Compare label words of length ``<= depth`` of ``ts`` with images of ``m``'s words.

    Explores the joint subset construction, so each level costs the number
    of distinct (machine-states, system-states) pairs rather than words.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    first_m = m.letter(m.initial_input, m.initial_outputs)
    first_t = ts.labelled(ts.initial)
    if first_m != first_t:
        return IsoCheckResult(0, (first_t,), only_in="system")
    frontier = {((m.initial_state,), (ts.initial,)): (first_t,)}
    for level in range(2, depth + 1):
        nxt: dict = {}
        for (qs, ss), word in sorted(frontier.items()):
            m_moves: dict = {}
            for q in qs:
                for (src, y), (t, outs) in m.delta.items():
                    if src == q:
                        m_moves.setdefault(m.letter(y, outs), set()).add(t)
            t_moves: dict = {}
            for s in ss:
                for y in ts.outgoing(s):
                    for t in ts.successors(s, y):
                        t_moves.setdefault(ts.labelled(t), set()).add(t)
            for letter in sorted(set(m_moves) ^ set(t_moves), key=str):
                side = "machine" if letter in m_moves else "system"
                return IsoCheckResult(level - 1, word + (letter,), only_in=side)
            for letter in sorted(m_moves, key=str):
                key = (tuple(sorted(m_moves[letter])), tuple(sorted(t_moves[letter])))
                nxt.setdefault(key, word + (letter,))
        frontier = nxt
        if not frontier:
            return IsoCheckResult(depth)
    return IsoCheckResult(depth)


@dataclass
class SynthesisReport:
    bisimulation: BisimWitness
    language: IsoCheckResult
    state_counts: dict
    initial_listen: dict
    listening: dict


def teamwork_synthesize(m: MealyMachine, parts: InterfacePartition, depth: int = 10):
    """Mealy machine -> TS -> distributed agents, verified two ways.

    Returns ``(agents, report)``; raises :class:`VerificationFailed` if
    either the closed bisimulation or the bounded language check fails.
    """
    from .reconfig import distribute

    ts = mealy_to_ts(m)
    if not is_deterministic(ts):
        raise ValueError("encoded machine is not deterministic")
    agents = distribute(ts, parts, verify=False)
    composed = compose(agents)
    witness = strong_bisimilar(composed, ts, CLOSED)
    language = bounded_language_iso(m, composed, depth)
    report = SynthesisReport(
        witness, language,
        {a.name: len(a.states) for a in agents},
        {a.name: sorted(a.listening(a.initial)) for a in agents},
        {a.name: {s: sorted(a.listening(s)) for s in a.states} for a in agents},
    )
    if not witness.verdict:
        raise VerificationFailed(f"synthesised agents differ from the encoding: {witness.detail}",
                                 trace=witness.trace, witness=witness)
    if not language.ok:
        raise VerificationFailed(
            f"language differs after {language.equivalent_to_depth} letters",
            trace=tuple(map(str, language.counterexample)))
    return agents, report
