"""Seeded random instances used by the property and acceptance suites."""

from __future__ import annotations

import random

from .decomposition import InterfacePartition
from .synthesis import MealyMachine
from .ts import Interface, Label, TransitionSystem


def random_closed_ts(rng: random.Random, n_states=(4, 12), n_channels=(3, 6),
                     n_outputs=(0, 3), density=0.45, name="random") -> TransitionSystem:
    """Deterministic, communication-closed, fully reachable system.

    Every state gets at least one move so runs are infinite.  Channel
    labels contain exactly the incoming channels (the least labelling the
    initiate-target rule admits); outputs are drawn at random.
    """
    n = rng.randint(*n_states)
    k = rng.randint(*n_channels)
    m = rng.randint(*n_outputs)
    states = [str(i) for i in range(n)]
    channels = [chr(ord("a") + i) for i in range(k)]
    outputs = [f"o{i}" for i in range(m)]
    succ = {s: {} for s in states}

    for i in range(1, n):
        parent = states[rng.randrange(i)]
        free = [y for y in channels if y not in succ[parent]]
        while not free:
            parent = states[rng.randrange(i)]
            free = [y for y in channels if y not in succ[parent]]
        succ[parent][rng.choice(free)] = states[i]
    for s in states:
        for y in channels:
            if y not in succ[s] and rng.random() < density / 2:
                succ[s][y] = rng.choice(states)
        if not succ[s]:
            succ[s][rng.choice(channels)] = rng.choice(states)

    delta = [(s, y, t) for s in states for y, t in succ[s].items()]
    incoming = {s: set() for s in states}
    for _, y, t in delta:
        incoming[t].add(y)
    labels = {s: Label.of(incoming[s], [o for o in outputs if rng.random() < 0.4]) for s in states}
    return TransitionSystem.build(states, "0", channels, channels, outputs, delta, labels, name=name)


def random_partition(rng: random.Random, interface: Interface, parts: int) -> InterfacePartition:
    """Split channels into ``parts`` nonempty groups; outputs land anywhere."""
    channels = sorted(interface.initiate)
    if parts > len(channels):
        raise ValueError("more parts than channels")
    rng.shuffle(channels)
    cuts = sorted(rng.sample(range(1, len(channels)), parts - 1))
    groups = [channels[a:b] for a, b in zip([0] + cuts, cuts + [len(channels)])]
    outs = [[] for _ in range(parts)]
    for o in sorted(interface.outputs):
        outs[rng.randrange(parts)].append(o)
    return InterfacePartition([Interface.of(g, o) for g, o in zip(groups, outs)])


def random_mealy(rng: random.Random, n_states=(1, 8), n_inputs=(1, 4), n_outputs=(0, 3),
                 total=0.8, name="random") -> MealyMachine:
    n = rng.randint(*n_states)
    k = rng.randint(*n_inputs)
    m = rng.randint(*n_outputs)
    states = [f"q{i}" for i in range(n)]
    inputs = [f"i{i}" for i in range(k)]
    outputs = [f"o{i}" for i in range(m)]
    delta = {}
    for q in states:
        for y in inputs:
            if rng.random() < total:
                delta[(q, y)] = (rng.choice(states), frozenset(o for o in outputs if rng.random() < 0.5))
    if not delta:
        delta[(states[0], inputs[0])] = (states[0], frozenset())
    y0 = rng.choice(inputs)
    o0 = frozenset(o for o in outputs if rng.random() < 0.5)
    return MealyMachine(tuple(states), frozenset(inputs), frozenset(outputs), delta,
                        y0, o0, states[0], name=name)
