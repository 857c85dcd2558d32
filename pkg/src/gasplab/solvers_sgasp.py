"""Exact deciders for size-approval instances.

Three parameterizations of the same question (does a stable assignment
exist), each built from the shared preprocessing in `model.gamma_preprocess`:

* solve_fpt_ta: branch over the set Q of fully-attending types and over
  acyclic bipartite type-activity patterns, then solve a tree subset sum
  per pattern.  Fixed-parameter tractable in #types + #activities.
* solve_xp_t: branch over Q only and solve a multidimensional subset sum
  over per-activity contribution vectors.  XP in #types.
* solve_fpt_n: branch over the set of home agents and every partition of
  the rest into groups, then look for a saturating group-activity matching
  via a small flow network.  Fixed-parameter tractable in #agents.

All three re-verify their witnesses; a failed re-check is an internal bug,
never a NO.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .errors import BudgetError, InternalSolverError, InvalidInstanceError
from .model import (
    SizeSetPrefs,
    TypeCountAssignment,
    TypedInstance,
    gamma_preprocess,
    verify_sgasp,
)
from .subsetsum import LabeledTree, VectorFamily, solve_mpss, solve_tss

DEFAULT_AGENT_CAP = 10


@dataclass(frozen=True)
class SolveResult:
    exists: bool
    witness: Optional[TypeCountAssignment] = None
    stats: Dict[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class PatternGraph:
    """A bipartite edge set between type and activity indices."""

    type_count: int
    activity_count: int
    edges: Tuple[Tuple[int, int], ...]

    def is_acyclic(self) -> bool:
        parent = list(range(self.type_count + self.activity_count))

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for t, a in self.edges:
            ru, rv = find(t), find(self.type_count + a)
            if ru == rv:
                return False
            parent[ru] = rv
        return True

    def compatible_with(self, q: Iterable[int], a_ne: Iterable[int]) -> bool:
        """Every fully-attending type and every must-be-nonempty activity
        needs at least one incident edge."""
        t_deg = set(t for t, _ in self.edges)
        a_deg = set(a for _, a in self.edges)
        return set(q) <= t_deg and set(a_ne) <= a_deg


def enumerate_acyclic_patterns(t_count: int, a_count: int,
                               q: Iterable[int] = (),
                               a_ne: Iterable[int] = ()):
    """All acyclic bipartite patterns compatible with (q, a_ne), each once.

    Depth-first over the lexicographic edge list, skip-branch before
    take-branch, with union-find pruning so cyclic subsets are never built.
    """
    q = frozenset(q)
    a_ne = frozenset(a_ne)
    edges = [(t, a) for t in range(t_count) for a in range(a_count)]
    parent = list(range(t_count + a_count))
    size = [1] * len(parent)
    chosen: List[Tuple[int, int]] = []
    t_deg = [0] * t_count
    a_deg = [0] * a_count

    def find(v):
        while parent[v] != v:
            v = parent[v]
        return v

    def union(u, v):
        ru, rv = find(u), find(v)
        if ru == rv:
            return None
        if size[ru] > size[rv]:
            ru, rv = rv, ru
        parent[ru] = rv
        size[rv] += size[ru]
        return ru, rv

    def rec(i):
        if i == len(edges):
            if all(t_deg[t] for t in q) and all(a_deg[a] for a in a_ne):
                yield PatternGraph(t_count, a_count, tuple(chosen))
            return
        yield from rec(i + 1)
        t, a = edges[i]
        undo = union(t, t_count + a)
        if undo is None:
            return  # edge closes a cycle; no superset can help either
        chosen.append((t, a))
        t_deg[t] += 1
        a_deg[a] += 1
        yield from rec(i + 1)
        t_deg[t] -= 1
        a_deg[a] -= 1
        chosen.pop()
        ru, rv = undo
        parent[ru] = ru
        size[rv] -= size[ru]

    yield from rec(0)


def _approval_sets(inst: TypedInstance) -> List[SizeSetPrefs]:
    return [t.prefs for t in inst.types]


def solve_fpt_ta(inst: TypedInstance) -> SolveResult:
    """Pattern branching plus tree subset sum.

    A pattern edge valued v means v agents of that type at that activity; a
    zero-valued edge realizes a sub-pattern, which is sound here because
    activity labels never contain 0 and the assignment is re-verified.
    """
    if inst.types and inst.kind != "sgasp":
        raise InvalidInstanceError("solve_fpt_ta needs a size-approval instance")
    k = len(inst.types)
    m = len(inst.activities)
    branches = 0
    tids = inst.type_ids()
    for q_mask in range(1 << k):
        q_ids = [tids[i] for i in range(k) if q_mask >> i & 1]
        pruned, a_ne = gamma_preprocess(inst, q_ids)
        prefs = _approval_sets(pruned)
        aidx = inst.activity_index()
        a_ne_idx = [aidx[a] for a in a_ne]
        q_idx = [i for i in range(k) if q_mask >> i & 1]
        for pat in enumerate_acyclic_patterns(k, m, q_idx, a_ne_idx):
            branches += 1
            neighbours: List[List[int]] = [[] for _ in range(m)]
            for t, a in pat.edges:
                neighbours[a].append(t)
            labels: List[FrozenSet[int]] = []
            for i, t in enumerate(inst.types):
                if q_mask >> i & 1:
                    labels.append(frozenset({t.count}))
                else:
                    labels.append(frozenset(range(t.count)))
            for a in range(m):
                if not neighbours[a]:
                    labels.append(frozenset({0}))
                    continue
                lab = None
                for t in neighbours[a]:
                    sizes = prefs[t].sizes(inst.activities[a])
                    lab = sizes if lab is None else lab & sizes
                labels.append(frozenset(lab))
            tree = LabeledTree(labels, [(t, k + a) for t, a in pat.edges])
            res = solve_tss(tree)
            if not res.feasible:
                continue
            rows = [[0] * m for _ in range(k)]
            for (t, a), val in zip(pat.edges, res.alpha):
                rows[t][a] = val
            x = TypeCountAssignment(tuple(tuple(r) for r in rows))
            if not verify_sgasp(inst, x).stable:
                raise InternalSolverError(
                    "pattern witness failed re-verification; this is a bug")
            return SolveResult(True, x, {"branches": branches})
    return SolveResult(False, None, {"branches": branches})


def _activity_vectors(total: int, allowed: Sequence[int], caps: Sequence[int],
                      k: int) -> List[Tuple[int, ...]]:
    """All k-vectors with the given total, support inside `allowed`, and
    component i at most caps[i]."""
    out: List[Tuple[int, ...]] = []
    vec = [0] * k

    def rec(pos, left):
        if pos == len(allowed):
            if left == 0:
                out.append(tuple(vec))
            return
        i = allowed[pos]
        rest = sum(caps[j] for j in allowed[pos + 1:])
        lo = max(0, left - rest)
        for v in range(lo, min(left, caps[i]) + 1):
            vec[i] = v
            rec(pos + 1, left - v)
            vec[i] = 0

    rec(0, total)
    return out


def find_ir_assignment(inst: TypedInstance, q: Iterable[str],
                       a_ne: Iterable[str]) -> Optional[TypeCountAssignment]:
    """An individually rational assignment where exactly the types in q
    attend in full and every activity in a_ne is nonempty, or None.

    One vector set per activity: for each size p someone approves, every
    split of p agents over the types approving p; the zero vector stands
    for leaving the activity empty and is withheld from a_ne members.  The
    capped vector sums reachable with one pick per activity are exactly the
    per-type attendance totals, so a target is accepted iff it matches q.
    """
    q = frozenset(q)
    a_ne = frozenset(a_ne)
    k = len(inst.types)
    if k == 0:
        # nobody to send anywhere; feasible iff nothing must be nonempty
        return None if a_ne else TypeCountAssignment(())
    caps = [t.count for t in inst.types]
    prefs = _approval_sets(inst)
    sets = []
    for a in inst.activities:
        vecs: List[Tuple[int, ...]] = []
        sizes = set()
        for p in prefs:
            sizes |= p.sizes(a)
        for p_size in sorted(sizes):
            allowed = [i for i in range(k) if prefs[i].approves(a, p_size)]
            vecs.extend(_activity_vectors(p_size, allowed, caps, k))
        if a not in a_ne:
            vecs.append((0,) * k)
        sets.append(vecs)
    fam = VectorFamily(k, caps, sets)
    res = solve_mpss(fam)
    for target in sorted(res.targets):
        if any((t.id in q) != (target[i] == t.count)
               for i, t in enumerate(inst.types)):
            continue
        picks = res.witness(target)
        rows = [[0] * len(inst.activities) for _ in range(k)]
        for a, vec in enumerate(picks):
            for i in range(k):
                rows[i][a] = vec[i]
        return TypeCountAssignment(tuple(tuple(r) for r in rows))
    return None


def solve_xp_t(inst: TypedInstance) -> SolveResult:
    """Q branching plus multidimensional subset sum over activity vectors."""
    if inst.types and inst.kind != "sgasp":
        raise InvalidInstanceError("solve_xp_t needs a size-approval instance")
    k = len(inst.types)
    tids = inst.type_ids()
    branches = 0
    for q_mask in range(1 << k):
        branches += 1
        q_ids = frozenset(tids[i] for i in range(k) if q_mask >> i & 1)
        pruned, a_ne = gamma_preprocess(inst, q_ids)
        x = find_ir_assignment(pruned, q_ids, a_ne)
        if x is None:
            continue
        if not verify_sgasp(inst, x).stable:
            raise InternalSolverError(
                "Q-branch witness failed re-verification; this is a bug")
        return SolveResult(True, x, {"branches": branches})
    return SolveResult(False, None, {"branches": branches})


# ---------------------------------------------------------------------------
# FPT in the number of agents


def _partitions(items: Sequence[int]):
    """Set partitions in restricted-growth order; deterministic."""
    if not items:
        yield []
        return
    groups: List[List[int]] = []

    def rec(i):
        if i == len(items):
            yield [tuple(g) for g in groups]
            return
        for g in groups:
            g.append(items[i])
            yield from rec(i + 1)
            g.pop()
        groups.append([items[i]])
        yield from rec(i + 1)
        groups.pop()

    yield from rec(0)


def _max_flow(n_nodes: int, arcs: List[List[int]], source: int, sink: int) -> int:
    """Edmonds-Karp on an adjacency-matrix capacity table (tiny graphs)."""
    flow = 0
    while True:
        prev = [-1] * n_nodes
        prev[source] = source
        queue = [source]
        while queue and prev[sink] == -1:
            u = queue.pop(0)
            for v in range(n_nodes):
                if prev[v] == -1 and arcs[u][v] > 0:
                    prev[v] = u
                    queue.append(v)
        if prev[sink] == -1:
            return flow
        # push a single unit per augmentation; the graphs are tiny
        v = sink
        while v != source:
            u = prev[v]
            arcs[u][v] -= 1
            arcs[v][u] += 1
            v = u
        flow += 1


def _saturating_matching(groups: Sequence[Tuple[int, ...]],
                         activities: Sequence[int],
                         compatible, a_ne: FrozenSet[int]) -> Optional[Dict[int, int]]:
    """Matching that covers every group and every activity in a_ne, as a
    circulation with unit lower bounds on the covered sides."""
    g_cnt, a_cnt = len(groups), len(activities)
    # nodes: 0 source, 1 sink, groups, activities, then super source/sink
    src, snk = 0, 1
    g0 = 2
    a0 = 2 + g_cnt
    ssrc = a0 + a_cnt
    ssnk = ssrc + 1
    n = ssnk + 1
    arcs = [[0] * n for _ in range(n)]
    # lower bound 1 on src->group: reroute through the super pair
    for gi in range(g_cnt):
        arcs[ssrc][g0 + gi] += 1
        arcs[src][ssnk] += 1
    for gi, group in enumerate(groups):
        for ai, act in enumerate(activities):
            if compatible(group, act):
                arcs[g0 + gi][a0 + ai] = 1
    for ai, act in enumerate(activities):
        if act in a_ne:
            arcs[ssrc][snk] += 1
            arcs[a0 + ai][ssnk] += 1
        else:
            arcs[a0 + ai][snk] = 1
    arcs[snk][src] = g_cnt  # close the circulation
    need = g_cnt + len(a_ne)
    if _max_flow(n, arcs, ssrc, ssnk) != need:
        return None
    # matched pairs are the saturated group->activity arcs (residual 0)
    out = {}
    for gi in range(g_cnt):
        for ai, act in enumerate(activities):
            if compatible(groups[gi], act) and arcs[g0 + gi][a0 + ai] == 0:
                out[gi] = ai
                break
    return out


def solve_fpt_n(inst: TypedInstance, max_agents: int = DEFAULT_AGENT_CAP) -> SolveResult:
    """Branch over home sets and partitions of the attendees into groups,
    then match groups to activities.

    Agents are expanded from the type counts; agents of one type share an
    approval bitmask.  A size s survives pruning at activity a unless some
    home agent approves s+1 there (it would join); an activity must be used
    if some home agent approves size 1 there (it would start it)."""
    if inst.types and inst.kind != "sgasp":
        raise InvalidInstanceError("solve_fpt_n needs a size-approval instance")
    n = inst.n
    if n > max_agents:
        raise BudgetError(f"{n} agents exceed the configured cap {max_agents}")
    m = len(inst.activities)
    type_of = [i for i, t in enumerate(inst.types) for _ in range(t.count)]
    masks = [
        [_size_mask(t.prefs.sizes(a), n) for a in inst.activities]
        for t in inst.types
    ]
    branches = 0
    for home_mask in range((1 << n) - 1, -1, -1):
        home = [i for i in range(n) if home_mask >> i & 1]
        rest = [i for i in range(n) if not home_mask >> i & 1]
        # prune sizes a home agent would pile onto; collect must-use activities
        pruned = []
        a_ne = set()
        for a in range(m):
            drop = 0
            for i in home:
                drop |= masks[type_of[i]][a] >> 1
                if masks[type_of[i]][a] & 2:  # size 1 approved
                    a_ne.add(a)
            pruned.append([masks[type_of[i]][a] & ~drop for i in range(n)])

        def compatible(group, act):
            lab = -1
            for i in group:
                lab &= pruned[act][i]
            return bool(lab >> len(group) & 1)

        for parts in _partitions(rest):
            branches += 1
            if len(parts) > m:
                continue  # more groups than activities can host
            match = _saturating_matching(parts, list(range(m)), compatible,
                                         frozenset(a_ne))
            if match is None:
                continue
            rows = [[0] * m for _ in inst.types]
            for gi, ai in match.items():
                for agent in parts[gi]:
                    rows[type_of[agent]][ai] += 1
            x = TypeCountAssignment(tuple(tuple(r) for r in rows))
            if not verify_sgasp(inst, x).stable:
                raise InternalSolverError(
                    "partition witness failed re-verification; this is a bug")
            return SolveResult(True, x, {"branches": branches})
    return SolveResult(False, None, {"branches": branches})


def _size_mask(sizes: FrozenSet[int], top: int) -> int:
    out = 0
    for s in sizes:
        if s <= top:
            out |= 1 << s
    return out
