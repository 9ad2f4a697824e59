"""Reconfigurable transition systems: data model, validation and the
initiate/react transition predicates.

A system owns an explicit channel universe ``Y``, an interface
``(initiate, outputs)`` and, per state, a listening set and a label
``(channels, outputs)``.  Values are immutable after construction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

Transition = tuple[str, str, str]


def natural_key(text: str):
    """Sort key placing ``"2"`` before ``"10"``."""
    return [(0, int(tok), "") if tok.isdigit() else (1, 0, tok)
            for tok in re.split(r"(\d+)", text) if tok]


@dataclass(frozen=True)
class Label:
    channels: frozenset = frozenset()
    outputs: frozenset = frozenset()

    @staticmethod
    def of(channels: Iterable[str] = (), outputs: Iterable[str] = ()) -> "Label":
        return Label(frozenset(channels), frozenset(outputs))

    def project(self, interface: "Interface") -> "Label":
        return Label(self.channels & interface.initiate,
                     self.outputs & interface.outputs)

    def union(self, other: "Label") -> "Label":
        return Label(self.channels | other.channels, self.outputs | other.outputs)

    def __str__(self):
        return f"({{{','.join(sorted(self.channels))}}},{{{','.join(sorted(self.outputs))}}})"


@dataclass(frozen=True)
class Interface:
    initiate: frozenset = frozenset()
    outputs: frozenset = frozenset()

    @staticmethod
    def of(initiate: Iterable[str] = (), outputs: Iterable[str] = ()) -> "Interface":
        return Interface(frozenset(initiate), frozenset(outputs))

    def union(self, other: "Interface") -> "Interface":
        return Interface(self.initiate | other.initiate, self.outputs | other.outputs)

    def __str__(self):
        return f"<{{{','.join(sorted(self.initiate))}}},{{{','.join(sorted(self.outputs))}}}>"


@dataclass(frozen=True)
class Violation:
    kind: str
    state: str | None = None
    channel: str | None = None
    target: str | None = None
    detail: str = ""

    def __str__(self):
        bits = [f"{k}={v}" for k, v in
                (("state", self.state), ("channel", self.channel), ("target", self.target))
                if v is not None]
        text = f"{self.kind}{{{', '.join(bits)}}}"
        return f"{text}: {self.detail}" if self.detail else text


@dataclass(frozen=True, eq=False)
class TransitionSystem:
    """``<S, s0, Y_k, O_k, ls, L, Delta>`` over an explicit universe ``Y``.

    ``states`` is ordered; that order is the canonical order used for
    serialisation and for every deterministic tie-break downstream.
    """

    states: tuple
    initial: str
    universe: frozenset
    interface: Interface
    listen: Mapping[str, frozenset]
    label: Mapping[str, Label]
    delta: frozenset
    name: str = field(default="", compare=False)

    @classmethod
    def build(cls, states, initial, universe, initiate=(), outputs=(),
              transitions=(), labels=None, listen=None, name="") -> "TransitionSystem":
        """Convenience constructor.

        ``labels`` maps state -> Label or (channels, outputs); missing
        entries default to the empty label.  ``listen`` defaults to the
        channels enabled by ``transitions``.
        """
        states = tuple(states)
        delta = frozenset((s, y, t) for s, y, t in transitions)
        labels = labels or {}
        lab = {}
        for s in states:
            v = labels.get(s, Label())
            lab[s] = v if isinstance(v, Label) else Label.of(*v)
        if listen is None:
            ls = {s: set() for s in states}
            for s, y, _ in delta:
                ls.setdefault(s, set()).add(y)
            ls = {s: frozenset(v) for s, v in ls.items()}
        else:
            ls = {s: frozenset(listen.get(s, ())) for s in states}
        return cls(states, initial, frozenset(universe), Interface.of(initiate, outputs),
                   ls, lab, delta, name)

    def replace(self, **changes) -> "TransitionSystem":
        values = {f: getattr(self, f) for f in
                  ("states", "initial", "universe", "interface", "listen", "label", "delta", "name")}
        values.update(changes)
        return TransitionSystem(**values)

    def __eq__(self, other):
        if not isinstance(other, TransitionSystem):
            return NotImplemented
        return (self.states == other.states and self.initial == other.initial
                and self.universe == other.universe and self.interface == other.interface
                and dict(self.listen) == dict(other.listen)
                and dict(self.label) == dict(other.label) and self.delta == other.delta)

    __hash__ = None

    def __repr__(self):
        return (f"TransitionSystem(name={self.name!r}, states={len(self.states)}, "
                f"transitions={len(self.delta)}, interface={self.interface})")

    @cached_property
    def _succ(self) -> dict:
        out: dict = {}
        for s, y, t in self.delta:
            out.setdefault(s, {}).setdefault(y, set()).add(t)
        return {s: {y: frozenset(ts) for y, ts in d.items()} for s, d in out.items()}

    @cached_property
    def index(self) -> dict:
        return {s: i for i, s in enumerate(self.states)}

    def successors(self, s: str, y: str) -> frozenset:
        return self._succ.get(s, {}).get(y, frozenset())

    def outgoing(self, s: str) -> dict:
        """Channel -> successor set for state ``s``."""
        return self._succ.get(s, {})

    def listening(self, s: str) -> frozenset:
        return self.listen.get(s, frozenset())

    def labelled(self, s: str) -> Label:
        return self.label.get(s, Label())

    def sorted_transitions(self) -> list:
        idx = self.index
        big = len(idx)
        return sorted(self.delta, key=lambda t: (idx.get(t[0], big), t[0], t[1],
                                                 idx.get(t[2], big), t[2]))


def validate(ts: TransitionSystem) -> list:
    """Return every well-formedness violation of ``ts`` (empty iff valid)."""
    found: list = []
    states = set(ts.states)
    if len(states) != len(ts.states):
        dupes = sorted({s for s in ts.states if ts.states.count(s) > 1}, key=natural_key)
        for s in dupes:
            found.append(Violation("DuplicateState", state=s))
    if ts.initial not in states:
        found.append(Violation("InitialNotState", state=ts.initial))
    for y in sorted(ts.interface.initiate - ts.universe):
        found.append(Violation("InterfaceOutsideUniverse", channel=y))

    for s, y, t in ts.sorted_transitions():
        if s not in states:
            found.append(Violation("UnknownState", state=s, channel=y, target=t,
                                   detail="transition source"))
        if t not in states:
            found.append(Violation("UnknownState", state=s, channel=y, target=t,
                                   detail="transition target"))
        if y not in ts.universe:
            found.append(Violation("UnknownChannel", state=s, channel=y, target=t))

    for s in ts.states:
        ls = ts.listen.get(s)
        if ls is None:
            found.append(Violation("MissingListen", state=s))
            ls = frozenset()
        for y in sorted(ls - ts.universe):
            found.append(Violation("ListenOutsideUniverse", state=s, channel=y))
        enabled = set(ts.outgoing(s))
        for y in sorted(enabled ^ set(ls)):
            side = "transition without listening" if y in enabled else "listening without transition"
            found.append(Violation("ListenMismatch", state=s, channel=y, detail=side))
        lab = ts.label.get(s)
        if lab is None:
            found.append(Violation("MissingLabel", state=s))
            continue
        for y in sorted(lab.channels - ts.interface.initiate):
            found.append(Violation("LabelChannelOutsideInterface", state=s, channel=y))
        for o in sorted(lab.outputs - ts.interface.outputs):
            found.append(Violation("LabelOutputOutsideInterface", state=s, detail=o))

    for s, y, t in ts.sorted_transitions():
        if y in ts.interface.initiate and t in states:
            lab = ts.label.get(t)
            if lab is not None and y not in lab.channels:
                found.append(Violation("InitiateLabelMissing", state=s, channel=y, target=t))
    return found


def is_valid(ts: TransitionSystem) -> bool:
    return not validate(ts)


def is_communication_closed(ts: TransitionSystem) -> bool:
    return all(y in ts.interface.initiate for _, y, _ in ts.delta)


def is_deterministic(ts: TransitionSystem) -> bool:
    return all(len(targets) <= 1 for d in ts._succ.values() for targets in d.values())


def initiates(ts: TransitionSystem, s: str, y: str) -> frozenset:
    """Targets ``s'`` with ``s --y-->! s'``."""
    if y not in ts.interface.initiate:
        return frozenset()
    return frozenset(t for t in ts.successors(s, y) if y in ts.labelled(t).channels)


def reacts(ts: TransitionSystem, s: str, y: str) -> frozenset:
    """Targets ``s'`` with ``s --y-->? s'``."""
    if y in ts.interface.initiate or y not in ts.listening(s):
        return frozenset()
    return ts.successors(s, y)


def project(ts: TransitionSystem, interface: Interface, name: str = "") -> TransitionSystem:
    """Same graph, labels restricted to ``interface``."""
    labels = {s: ts.labelled(s).project(interface) for s in ts.states}
    return ts.replace(interface=interface, label=labels, name=name or ts.name)


def reachable_states(ts: TransitionSystem) -> list:
    seen = {ts.initial}
    order = [ts.initial]
    i = 0
    while i < len(order):
        s = order[i]
        i += 1
        for y in sorted(ts.outgoing(s)):
            for t in sorted(ts.successors(s, y), key=natural_key):
                if t not in seen:
                    seen.add(t)
                    order.append(t)
    return order
