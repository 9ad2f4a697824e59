"""Trivial decomposition of a closed deterministic system onto agent interfaces."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import BadIndex, BadPartition, NotCommunicationClosed, NotDeterministic
from .ts import Interface, TransitionSystem, is_communication_closed, is_deterministic, project


@dataclass(frozen=True)
class InterfacePartition:
    """One interface per agent; ``names`` are optional display names."""

    parts: tuple
    names: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        names = tuple(self.names) or tuple(f"T{k}" for k in range(len(self.parts)))
        if len(names) != len(self.parts):
            raise BadPartition("one name per part is required")
        object.__setattr__(self, "names", names)

    def __len__(self):
        return len(self.parts)

    def __getitem__(self, k) -> Interface:
        return self.parts[k]

    def __iter__(self):
        return iter(self.parts)

    def rest(self, k: int) -> Interface:
        out = Interface()
        for j, part in enumerate(self.parts):
            if j != k:
                out = out.union(part)
        return out

    def problems(self, interface: Interface) -> list:
        """Overlap and coverage defects relative to a target interface."""
        found = []
        for i, a in enumerate(self.parts):
            for j in range(i + 1, len(self.parts)):
                b = self.parts[j]
                if a.initiate & b.initiate:
                    found.append(f"{self.names[i]} and {self.names[j]} share channels "
                                 f"{sorted(a.initiate & b.initiate)}")
                if a.outputs & b.outputs:
                    found.append(f"{self.names[i]} and {self.names[j]} share outputs "
                                 f"{sorted(a.outputs & b.outputs)}")
        union = Interface()
        for part in self.parts:
            union = union.union(part)
        if union.initiate != interface.initiate:
            found.append(f"channels {sorted(union.initiate)} do not cover {sorted(interface.initiate)}")
        if union.outputs != interface.outputs:
            found.append(f"outputs {sorted(union.outputs)} do not cover {sorted(interface.outputs)}")
        return found


@dataclass(frozen=True)
class AgentBundle:
    agent: TransitionSystem
    parameter: TransitionSystem
    companion: dict

    def inverse(self) -> dict:
        return {e: s for s, e in self.companion.items()}


def _check(ts: TransitionSystem, parts: InterfacePartition):
    if not is_deterministic(ts):
        raise NotDeterministic(f"{ts.name or 'system'} is not deterministic")
    if not is_communication_closed(ts):
        raise NotCommunicationClosed(f"{ts.name or 'system'} reacts to foreign channels")
    problems = parts.problems(ts.interface)
    if problems:
        raise BadPartition("; ".join(problems))


def trivial_decompose(ts: TransitionSystem, parts: InterfacePartition) -> list:
    """One copy of ``ts`` per part, labels projected onto that part."""
    _check(ts, parts)
    return [project(ts, part, name=parts.names[k]) for k, part in enumerate(parts)]


def agent_vs_rest(ts: TransitionSystem, parts: InterfacePartition, k: int) -> AgentBundle:
    _check(ts, parts)
    if not 0 <= k < len(parts):
        raise BadIndex(f"agent index {k} outside 0..{len(parts) - 1}")
    agent = project(ts, parts[k], name=parts.names[k])
    parameter = project(ts, parts.rest(k), name=f"{parts.names[k]}-rest")
    return AgentBundle(agent, parameter, {s: s for s in ts.states})
