"""Strong bisimulation by signature-based partition refinement.

Two systems are compared on their disjoint union.  ``mode="open"`` checks
all three clauses (labels, initiate moves, react moves).  ``mode="closed"``
ignores react moves on channels nobody in the comparison can initiate,
which is the right notion when both sides are closed compositions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ts import TransitionSystem, initiates, natural_key, reacts

OPEN = "open"
CLOSED = "closed"


@dataclass(frozen=True)
class BisimWitness:
    verdict: bool
    relation: frozenset = frozenset()
    trace: tuple = ()
    detail: str = ""

    def __bool__(self):
        return self.verdict


@dataclass
class _Union:
    nodes: list
    labels: dict
    moves: dict = field(default_factory=dict)


def _moves(ts: TransitionSystem, s: str, side: int, keep_react) -> frozenset:
    out = set()
    for y in ts.outgoing(s):
        for t in initiates(ts, s, y):
            out.add(("!", y, (side, t)))
        if keep_react(y):
            for t in reacts(ts, s, y):
                out.add(("?", y, (side, t)))
    return frozenset(out)


def _union(systems, mode) -> _Union:
    if mode not in (OPEN, CLOSED):
        raise ValueError(f"unknown mode {mode!r}")
    owned = frozenset().union(*(ts.interface.initiate for ts in systems))
    keep_react = (lambda y: True) if mode == OPEN else (lambda y: y in owned)
    u = _Union([], {})
    for side, ts in enumerate(systems):
        for s in ts.states:
            node = (side, s)
            u.nodes.append(node)
            u.labels[node] = ts.labelled(s)
            u.moves[node] = _moves(ts, s, side, keep_react)
    return u


def _refine(u: _Union):
    """Coarsest stable partition; returns the block-map history of every round."""
    ids: dict = {}
    block = {}
    for n in u.nodes:
        block[n] = ids.setdefault(u.labels[n], len(ids))
    history = [block]
    while True:
        sigs: dict = {}
        nxt = {}
        for n in u.nodes:
            sig = (block[n], frozenset((r, y, block[t]) for r, y, t in u.moves[n]))
            nxt[n] = sigs.setdefault(sig, len(sigs))
        if len(sigs) == len(set(block.values())):
            return history
        block = nxt
        history.append(block)


def _trace(u: _Union, history, a, b) -> tuple:
    """Replay the splitting rounds to get a move sequence separating a and b.

    Each step descends at least one refinement round, so this terminates;
    for nondeterministic systems the trace follows one branch only.
    """
    steps = []
    level = next(i for i, bl in enumerate(history) if bl[a] != bl[b])
    while level > 0:
        prev = history[level - 1]
        sig = {n: {(r, y, prev[t]) for r, y, t in u.moves[n]} for n in (a, b)}
        first, second = (a, b) if sig[a] - sig[b] else (b, a)
        r, y, blk = min(sig[first] - sig[second])
        steps.append(f"{y}{r}")
        t1 = min(t for rr, yy, t in u.moves[first] if (rr, yy, prev[t]) == (r, y, blk))
        others = sorted(t for rr, yy, t in u.moves[second] if (rr, yy) == (r, y))
        if not others:
            break
        a, b = t1, others[0]
        level = next(i for i, bl in enumerate(history) if bl[a] != bl[b])
    return tuple(steps)


def strong_bisimilar(t1: TransitionSystem, t2: TransitionSystem, mode: str = OPEN) -> BisimWitness:
    u = _union([t1, t2], mode)
    history = _refine(u)
    final = history[-1]
    a, b = (0, t1.initial), (1, t2.initial)
    if final[a] == final[b]:
        rel = frozenset((s1, s2) for s1 in t1.states for s2 in t2.states
                        if final[(0, s1)] == final[(1, s2)])
        return BisimWitness(True, rel)
    trace = _trace(u, history, a, b)
    return BisimWitness(False, frozenset(), trace,
                        f"initial states separated after {len(trace)} step(s): {' '.join(trace) or 'labels differ'}")


def quotient_partition(ts: TransitionSystem, mode: str = OPEN) -> list:
    """Coarsest strong-bisimulation partition of ``ts``'s states."""
    u = _union([ts], mode)
    final = _refine(u)[-1]
    blocks: dict = {}
    for s in ts.states:
        blocks.setdefault(final[(0, s)], []).append(s)
    return sorted((sorted(b, key=natural_key) for b in blocks.values()),
                  key=lambda b: natural_key(b[0]))


def is_bisimulation(t1, t2, relation, mode: str = OPEN) -> list:
    """Independent clause-by-clause check of a cross relation; returns failures."""
    owned = t1.interface.initiate | t2.interface.initiate
    rel = set(relation)
    inverse = {(b, a) for a, b in rel}
    problems = []

    def moves(ts, s):
        out = []
        for y in ts.outgoing(s):
            out += [("!", y, t) for t in initiates(ts, s, y)]
            if mode == OPEN or y in owned:
                out += [("?", y, t) for t in reacts(ts, s, y)]
        return out

    for left, right, pairs in ((t1, t2, rel), (t2, t1, inverse)):
        for s, t in pairs:
            if left.labelled(s) != right.labelled(t):
                problems.append(f"label mismatch at ({s},{t})")
                continue
            rmoves = moves(right, t)
            for r, y, s2 in moves(left, s):
                if not any(rr == r and yy == y and (s2, u2) in pairs for rr, yy, u2 in rmoves):
                    problems.append(f"unmatched {y}{r} from ({s},{t})")
    return problems
