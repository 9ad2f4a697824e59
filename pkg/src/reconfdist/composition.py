"""Channelled multicast parallel composition and reachability pruning."""

from __future__ import annotations

from collections import deque
from itertools import product

from .errors import InterfaceOverlap, UniverseMismatch
from .ts import Interface, Label, TransitionSystem, reachable_states

SEPARATOR = "|"


def product_id(parts) -> str:
    return SEPARATOR.join(parts)


def split_product_id(state: str) -> list:
    return state.split(SEPARATOR)


def _check_agents(agents):
    if not agents:
        raise ValueError("compose needs at least one agent")
    universe = agents[0].universe
    for a in agents[1:]:
        if a.universe != universe:
            raise UniverseMismatch(
                f"{a.name or 'agent'} has universe {sorted(a.universe)}, expected {sorted(universe)}")
    for i, a in enumerate(agents):
        for b in agents[i + 1:]:
            shared = (a.interface.initiate & b.interface.initiate)
            outs = (a.interface.outputs & b.interface.outputs)
            if shared or outs:
                raise InterfaceOverlap(
                    f"{a.name or 'agent'} and {b.name or 'agent'} share "
                    f"channels {sorted(shared)} / outputs {sorted(outs)}")


def _joint_moves(agents, state):
    """Yield ``(y, next_state)`` for every joint step out of ``state``."""
    for k, agent in enumerate(agents):
        sk = state[k]
        for y in sorted(agent.interface.initiate & agent.listening(sk)):
            for tk in sorted(agent.successors(sk, y)):
                options = []
                for j, other in enumerate(agents):
                    if j == k:
                        options.append((tk,))
                    elif y in other.listening(state[j]):
                        options.append(tuple(sorted(other.successors(state[j], y))))
                    else:
                        options.append((state[j],))
                for nxt in product(*options):
                    yield y, nxt


def compose(agents) -> TransitionSystem:
    """Reachable part of ``||_k agents``.

    Product states are named by joining component ids with ``|``.  The
    result's interface is the union of the agents' interfaces, so it is
    communication-closed.
    """
    agents = list(agents)
    _check_agents(agents)
    start = tuple(a.initial for a in agents)
    order = [start]
    seen = {start}
    delta = set()
    queue = deque([start])
    while queue:
        state = queue.popleft()
        for y, nxt in _joint_moves(agents, state):
            delta.add((state, y, nxt))
            if nxt not in seen:
                seen.add(nxt)
                order.append(nxt)
                queue.append(nxt)

    names = {st: product_id(st) for st in order}
    if len(set(names.values())) != len(names):
        raise ValueError("component state ids collide once joined; avoid '|' in ids")
    labels = {}
    for st in order:
        lab = Label()
        for agent, s in zip(agents, st):
            lab = lab.union(agent.labelled(s))
        labels[names[st]] = lab
    interface = Interface()
    for a in agents:
        interface = interface.union(a.interface)
    name = SEPARATOR.join(a.name for a in agents if a.name)
    return TransitionSystem.build(
        [names[st] for st in order], names[start], agents[0].universe,
        interface.initiate, interface.outputs,
        [(names[s], y, names[t]) for s, y, t in delta], labels, name=name)


def reachable(ts: TransitionSystem) -> TransitionSystem:
    """Restriction of ``ts`` to the states reachable from its initial state."""
    keep = set(reachable_states(ts))
    states = tuple(s for s in ts.states if s in keep)
    return ts.replace(
        states=states,
        listen={s: ts.listening(s) for s in states},
        label={s: ts.labelled(s) for s in states},
        delta=frozenset(t for t in ts.delta if t[0] in keep),
    )
