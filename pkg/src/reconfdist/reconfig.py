"""Parametric reconfigurable bisimulation, summary partition and compression.

An agent ``T`` is minimised against a parameter ``C`` (the rest of the
system) related to it by a bijective companion map ``f``.  The relation
family ``{R_eps}`` is stored as a boolean cube ``matrix[eps, s1, s2]``
over the agent's and parameter's canonical state orders.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .bisim import CLOSED, BisimWitness, strong_bisimilar
from .composition import compose
from .decomposition import agent_vs_rest
from .errors import (BlockPropertyViolation, CompanionMissing, LabelInconsistentBlock,
                     NoValidPartition, VerificationFailed)
from .ts import TransitionSystem, initiates, natural_key, reacts

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class IndexedRelationFamily:
    agent_states: tuple
    params: tuple
    matrix: np.ndarray

    def __post_init__(self):
        self.matrix.setflags(write=False)

    @classmethod
    def top(cls, agent_states, params):
        n, e = len(agent_states), len(params)
        return cls(tuple(agent_states), tuple(params), np.ones((e, n, n), dtype=bool))

    @classmethod
    def identity(cls, agent_states, params):
        n, e = len(agent_states), len(params)
        return cls(tuple(agent_states), tuple(params),
                   np.broadcast_to(np.eye(n, dtype=bool), (e, n, n)).copy())

    def _ix(self):
        return ({s: i for i, s in enumerate(self.agent_states)},
                {e: i for i, e in enumerate(self.params)})

    def related(self, eps, s1, s2) -> bool:
        si, ei = self._ix()
        return bool(self.matrix[ei[eps], si[s1], si[s2]])

    def pairs(self, eps) -> set:
        _, ei = self._ix()
        m = self.matrix[ei[eps]]
        return {(self.agent_states[i], self.agent_states[j]) for i, j in zip(*np.nonzero(m))}

    def classes(self, eps) -> list:
        """Equivalence classes of ``R_eps`` (meaningful once it is an equivalence)."""
        _, ei = self._ix()
        m = self.matrix[ei[eps]]
        seen, out = set(), []
        for i in range(len(self.agent_states)):
            if i in seen:
                continue
            cls = [j for j in np.nonzero(m[i])[0] if j not in seen] or [i]
            seen.update(cls)
            out.append(sorted((self.agent_states[j] for j in cls), key=natural_key))
        return out

    def pair_count(self) -> int:
        return int(self.matrix.sum())

    def __le__(self, other) -> bool:
        return bool(np.all(~self.matrix | other.matrix))

    def __eq__(self, other):
        if not isinstance(other, IndexedRelationFamily):
            return NotImplemented
        return (self.agent_states == other.agent_states and self.params == other.params
                and np.array_equal(self.matrix, other.matrix))

    __hash__ = None

    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.matrix, self.matrix.transpose(0, 2, 1)))


class _Problem:
    """Dense-index view of (T, C, f) shared by every sweep of the operator."""

    def __init__(self, agent: TransitionSystem, param: TransitionSystem, companion: dict):
        self.agent, self.param = agent, param
        self.sidx = agent.index
        self.eidx = param.index
        if (set(companion) != set(agent.states) or set(companion.values()) != set(param.states)
                or len(set(companion.values())) != len(companion)):
            raise CompanionMissing("companion map must be a bijection from agent to parameter states")
        self.f = np.array([self.eidx[companion[s]] for s in agent.states])
        self.finv = np.empty(len(param.states), dtype=int)
        self.finv[self.f] = np.arange(len(agent.states))

        n = len(agent.states)
        labels = [agent.labelled(s) for s in agent.states]
        self.label_eq = np.array([[a == b for b in labels] for a in labels], dtype=bool).reshape(n, n)

        self.channels = sorted(agent.interface.initiate | param.interface.initiate)
        self.init, self.react, self.listens, self.engage = {}, {}, {}, {}
        for y in self.channels:
            ini = np.zeros((n, n), dtype=bool)
            rea = np.zeros((n, n), dtype=bool)
            for s in agent.states:
                for t in initiates(agent, s, y):
                    ini[self.sidx[s], self.sidx[t]] = True
                for t in reacts(agent, s, y):
                    rea[self.sidx[s], self.sidx[t]] = True
            self.init[y], self.react[y] = ini, rea
            self.listens[y] = np.array([y in agent.listening(s) for s in agent.states], dtype=bool)
            pairs = [(self.eidx[e], self.eidx[e2]) for e in param.states
                     for e2 in param.successors(e, y)]
            self.engage[y] = pairs


def _matched(trans, rel):
    """ok[s1, s2]: every ``trans``-successor of s1 is matched by one of s2 inside ``rel``.

    ``rel`` may be a batch ``(P, n, n)``.
    """
    reach = rel @ trans.T                # reach[s1', s2]: some successor of s2 relates to s1'
    return ~(trans @ ~reach)


def _react_ok(p: _Problem, y, cur, nxt, gidx):
    """Clause 2.2.b (both sub-cases) for a batch of engaging parameter moves.

    ``cur``/``nxt`` are ``R_eps``/``R_eps'`` stacked over the batch, ``gidx``
    the agent index of ``f^-1(eps')`` for each batch element.
    """
    rea = p.react[y]
    if not rea.any():
        return None
    n = rea.shape[0]
    listening = p.listens[y][None, None, :]
    ok_listen = _matched(rea, nxt)

    # stays[s, s2]: s reacts on y into a state still related to s2 under R_eps
    stays = (rea[None] @ cur.astype(np.int64)) > 0
    offending = cur & stays
    count = offending.sum(axis=1)[:, None, :]                 # per s2, over all s
    diag = np.diagonal(offending, axis1=1, axis2=2)[:, None, :]  # s = s2
    not_same = ~np.eye(n, dtype=bool)[None]
    others = count - offending - (diag & not_same)            # exclude s = s1 and s = s2
    exits_unique = others == 0

    exit_target = nxt[np.arange(len(gidx)), :, gidx]          # R_eps'(s1', f^-1(eps'))
    allowed = cur | exit_target[:, :, None]
    ok_with = ~(rea[None] @ ~allowed)
    ok_without = ~(rea[None] @ ~cur)
    ok_silent = np.where(exits_unique, ok_with, ok_without)
    return np.where(listening, ok_listen, ok_silent)


def apply_F(agent, param, companion, family: IndexedRelationFamily,
            _problem: _Problem | None = None) -> IndexedRelationFamily:
    """One application of the reconfigurable-bisimulation operator.

    Computes, for every parameter state, the pairs satisfying all clauses
    against ``family`` and keeps the symmetric core (pair and mirror both
    satisfied).
    """
    p = _problem or _Problem(agent, param, companion)
    R = family.matrix
    e = R.shape[0]
    ok = np.broadcast_to(p.label_eq, R.shape).copy()
    for y in p.channels:
        engage = p.engage[y]
        silent = np.ones(e, dtype=bool)
        if engage:
            src = np.array([a for a, _ in engage])
            dst = np.array([b for _, b in engage])
            silent[src] = False
            cur, nxt = R[src], R[dst]
            batch = _matched(p.init[y], nxt)
            clause_b = _react_ok(p, y, cur, nxt, p.finv[dst])
            if clause_b is not None:
                batch &= clause_b
            np.logical_and.at(ok, src, batch)
        if silent.any() and p.init[y].any():
            idx = np.nonzero(silent)[0]
            ok[idx] &= _matched(p.init[y], R[idx])
    ok = ok & ok.transpose(0, 2, 1)
    return IndexedRelationFamily(family.agent_states, family.params, ok)


@dataclass(frozen=True)
class FixpointRun:
    family: IndexedRelationFamily
    pair_counts: tuple
    iterations: int


def iterate_fixpoint(agent, param, companion) -> FixpointRun:
    """Iterate the operator from the top family until it stabilises.

    Each new iterate is intersected with the previous one so the chain is
    descending even where the operator is not monotone.
    """
    p = _Problem(agent, param, companion)
    R = IndexedRelationFamily.top(agent.states, param.states)
    counts = [R.pair_count()]
    while True:
        nxt = apply_F(agent, param, companion, R, _problem=p)
        nxt = IndexedRelationFamily(R.agent_states, R.params, nxt.matrix & R.matrix)
        counts.append(nxt.pair_count())
        log.debug("fixpoint iteration %d: %d pairs", len(counts) - 1, counts[-1])
        if nxt == R:
            return FixpointRun(R, tuple(counts), len(counts) - 1)
        R = nxt


def greatest_reconfig_bisim(agent, param, companion) -> IndexedRelationFamily:
    return iterate_fixpoint(agent, param, companion).family


def agreement(family: IndexedRelationFamily, companion: dict) -> np.ndarray:
    """Boolean matrix of ``Agree(s, s')`` over the agent's state order."""
    eidx = {e: i for i, e in enumerate(family.params)}
    f = np.array([eidx[companion[s]] for s in family.agent_states])
    m = family.matrix
    i = np.arange(len(f))
    own = m[f[:, None], i[:, None], i[None, :]]      # R_{f(s)}(s, s')
    theirs = m[f[None, :], i[:, None], i[None, :]]   # R_{f(s')}(s, s')
    return own & theirs


def agree(family: IndexedRelationFamily, companion: dict, s: str, s2: str) -> bool:
    return family.related(companion[s], s, s2) and family.related(companion[s2], s, s2)


@dataclass(frozen=True)
class SummaryPartition:
    blocks: tuple
    block_of: dict
    maximal: bool = True

    @classmethod
    def from_blocks(cls, blocks, maximal: bool = True):
        blocks = tuple(tuple(b) for b in blocks)
        return cls(blocks, {s: i for i, b in enumerate(blocks) for s in b}, maximal)

    def __len__(self):
        return len(self.blocks)


def partition_violations(blocks, states, ag: np.ndarray) -> list:
    """Check completeness, disjointness, consistency and maximality."""
    idx = {s: i for i, s in enumerate(states)}
    problems = []
    members = [s for b in blocks for s in b]
    if sorted(members, key=idx.get) != list(states):
        problems.append("blocks do not partition the state set exactly once")
        return problems
    where = {s: k for k, b in enumerate(blocks) for s in b}
    for k, b in enumerate(blocks):
        if not b:
            problems.append(f"block {k} is empty")
        for s1 in b:
            for s2 in b:
                if not ag[idx[s1], idx[s2]]:
                    problems.append(f"block {k}: {s1} and {s2} disagree")
    for k, b in enumerate(blocks):
        for s in b:
            for s_out in states:
                if where[s_out] == k or not ag[idx[s], idx[s_out]]:
                    continue
                other = blocks[where[s_out]]
                separated = any(ag[idx[s], idx[x]] and not ag[idx[s_out], idx[x]] for x in b)
                agreeing = {x for x in other if ag[idx[s], idx[x]]} | {s}
                if not separated or len(b) < len(agreeing):
                    problems.append(f"maximality: {s} in block {k} agrees with {s_out}")
    return problems


def summary_partition(family: IndexedRelationFamily, companion: dict,
                      agent: TransitionSystem, max_repairs: int | None = None,
                      strict: bool = True) -> SummaryPartition:
    """Greedy grouping of mutually agreeing states, then verified and repaired.

    Maximality cannot always be met: when ``Agree`` links three states in a
    path a-b-c, every partition leaves some block violating it.  With
    ``strict`` that raises :class:`NoValidPartition`; otherwise the repaired
    greedy partition is returned, which is still complete, disjoint and
    consistent, and flagged ``maximal=False``.
    """
    states = agent.states
    idx = agent.index
    ag = agreement(family, companion)
    order = sorted(states, key=natural_key)
    seen = set()
    blocks = []
    for seed in order:
        if seed in seen:
            continue
        block = [seed]
        seen.add(seed)
        for s in order:
            if s not in seen and all(ag[idx[s], idx[m]] for m in block):
                block.append(s)
                seen.add(s)
        blocks.append(block)

    budget = max_repairs if max_repairs is not None else len(states) ** 2
    for _ in range(budget + 1):
        problems = partition_violations(blocks, states, ag)
        if not problems:
            return SummaryPartition.from_blocks(blocks)
        if not _repair(blocks, states, ag, idx):
            break
    problems = partition_violations(blocks, states, ag)
    if strict or any(not p.startswith("maximality") for p in problems):
        raise NoValidPartition("; ".join(problems[:5]))
    log.info("summary partition is not maximal: %s", problems[0])
    return SummaryPartition.from_blocks(blocks, maximal=False)


def _repair(blocks, states, ag, idx) -> bool:
    """Resolve the first maximality violation by moving one state."""
    where = {s: k for k, b in enumerate(blocks) for s in b}
    for k, b in enumerate(blocks):
        for s in b:
            for s_out in states:
                j = where[s_out]
                if j == k or not ag[idx[s], idx[s_out]]:
                    continue
                other = blocks[j]
                if all(ag[idx[s_out], idx[x]] for x in b):
                    other.remove(s_out)
                    b.append(s_out)
                elif all(ag[idx[s], idx[x]] for x in other):
                    b.remove(s)
                    other.append(s)
                else:
                    continue
                for blk in blocks:
                    blk.sort(key=natural_key)
                blocks[:] = [blk for blk in blocks if blk]
                return True
    return False


@dataclass(frozen=True)
class Compression:
    system: TransitionSystem
    partition: SummaryPartition
    family: IndexedRelationFamily
    block_ids: tuple


def block_name(block) -> str:
    return min(block, key=natural_key)


def quotient_by(agent: TransitionSystem, partition: SummaryPartition,
                block_ids=None, name="") -> TransitionSystem:
    """Compression of ``agent`` along an already computed summary partition."""
    blocks = partition.blocks
    ids = tuple(block_ids or (block_name(b) for b in blocks))
    where = partition.block_of
    labels = {}
    for bid, b in zip(ids, blocks):
        labs = {agent.labelled(s) for s in b}
        if len(labs) != 1:
            raise LabelInconsistentBlock(f"block {sorted(b, key=natural_key)} mixes labels {sorted(map(str, labs))}")
        labels[bid] = labs.pop()
    delta = set()
    for s, y, t in agent.delta:
        if where[s] != where[t]:
            delta.add((ids[where[s]], y, ids[where[t]]))
    for k, b in enumerate(blocks):
        members = set(b)
        for y in agent.interface.initiate:
            if all(agent.successors(s, y) & members for s in b):
                delta.add((ids[k], y, ids[k]))
    initial = ids[where[agent.initial]]
    order = sorted(range(len(blocks)), key=lambda k: (ids[k] != initial, natural_key(ids[k])))
    return TransitionSystem.build(
        [ids[k] for k in order], initial, agent.universe,
        agent.interface.initiate, agent.interface.outputs, delta, labels,
        name=name or agent.name)


def block_property_violations(agent: TransitionSystem, partition: SummaryPartition,
                              compressed: TransitionSystem, block_ids) -> list:
    """Initiate block moves are matched by every member; react block moves exit."""
    members = {bid: set(b) for bid, b in zip(block_ids, partition.blocks)}
    problems = []
    for B, y, B2 in compressed.sorted_transitions():
        if initiates(compressed, B, y):
            for s in sorted(members[B], key=natural_key):
                if not initiates(agent, s, y) & members[B2]:
                    problems.append(f"{B} --{y}!--> {B2} not matched by member {s}")
        elif reacts(compressed, B, y):
            if B == B2:
                problems.append(f"react self-loop {B} --{y}?--> {B}")
            elif not any(reacts(agent, s, y) & members[B2] for s in members[B]):
                problems.append(f"{B} --{y}?--> {B2} has no reacting member")
    if len(compressed.states) > len(agent.states):
        problems.append("compression grew the state space")
    return problems


def compression(agent, param, companion, check: bool = True, strict: bool = True) -> Compression:
    run = iterate_fixpoint(agent, param, companion)
    part = summary_partition(run.family, companion, agent, strict=strict)
    ids = tuple(block_name(b) for b in part.blocks)
    system = quotient_by(agent, part, ids)
    if check:
        problems = block_property_violations(agent, part, system, ids)
        if problems:
            raise BlockPropertyViolation("; ".join(problems[:5]))
    return Compression(system, part, run.family, ids)


def compress(agent, param, companion, strict: bool = True) -> TransitionSystem:
    """``[agent]^param``: merge agreeing states, drop react moves that stay put."""
    return compression(agent, param, companion, strict=strict).system


def distribute(ts: TransitionSystem, parts, verify: bool = True, strict: bool = True) -> list:
    """Compress every agent of the trivial decomposition against its rest.

    With ``verify`` the recomposition is checked closed-bisimilar to
    ``ts``; a mismatch raises :class:`VerificationFailed` with the trace.
    """
    agents = []
    for k in range(len(parts)):
        bundle = agent_vs_rest(ts, parts, k)
        agents.append(compress(bundle.agent, bundle.parameter, bundle.companion, strict=strict))
    if verify:
        verify_distribution(ts, agents)
    return agents


def verify_distribution(ts: TransitionSystem, agents) -> BisimWitness:
    witness = strong_bisimilar(compose(agents), ts, CLOSED)
    if not witness.verdict:
        raise VerificationFailed(f"recomposition differs from {ts.name or 'source'}: {witness.detail}",
                                 trace=witness.trace, witness=witness)
    return witness
