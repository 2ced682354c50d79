"""Exact and heuristic optimizers over hypergraph edge sets and partitions.

Exact solvers are branch-and-bound searches that certify optimality only when
the pruned space was provably exhausted within budget; running out of budget
returns the best incumbent with ``optimal=False`` rather than raising.  All
searches are deterministic: randomness enters only through explicit seeds,
and tie-breaking is lowest-index-first, so the certified value, flag, and
witness are reproducible run to run.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass

from .hypergraph import (
    EdgeSet,
    Hypergraph,
    PairGraph,
    VertexPartition,
    _is_crossing,
)
from .motifs import count_T, t_copy_triples
from .randgen import TrialSeed

__all__ = [
    "Budget",
    "SearchStats",
    "SolveResult",
    "BipartiteHalf",
    "max_tfree_exact",
    "max_tfree_repair",
    "max_cut4_exact",
    "max_cut4_local",
    "best_partition_for",
    "is_4partite",
    "bipartite_half",
]

MAX_COPIES_EXACT = 10**7


@dataclass(frozen=True)
class Budget:
    """Node and wall-clock limits for exact searches; None means unlimited."""

    max_nodes: int | None = None
    max_seconds: float | None = None


@dataclass(frozen=True)
class SearchStats:
    nodes: int
    elapsed: float
    budget_hit: bool


@dataclass(frozen=True)
class SolveResult:
    """Objective value, achieving witness, certificate flag, and search stats."""

    value: int
    witness: EdgeSet | VertexPartition
    optimal: bool
    stats: SearchStats


@dataclass(frozen=True)
class BipartiteHalf:
    """A 2-partition of a graph's vertices and its crossing edge set."""

    left: frozenset[int]
    right: frozenset[int]
    cross: PairGraph


class _BudgetExceeded(Exception):
    pass


class _Ticker:
    """Counts search nodes and enforces the budget every few hundred nodes."""

    __slots__ = ("nodes", "max_nodes", "max_seconds", "start")

    def __init__(self, budget: Budget | None):
        self.nodes = 0
        self.max_nodes = budget.max_nodes if budget else None
        self.max_seconds = budget.max_seconds if budget else None
        self.start = time.monotonic()

    def tick(self) -> None:
        self.nodes += 1
        if self.max_nodes is not None and self.nodes > self.max_nodes:
            raise _BudgetExceeded
        if self.max_seconds is not None and self.nodes % 256 == 0:
            if time.monotonic() - self.start > self.max_seconds:
                raise _BudgetExceeded

    def elapsed(self) -> float:
        return time.monotonic() - self.start


# ---------------------------------------------------------------------------
# local search over r-class vertex partitions


def _crossing_flags(h: Hypergraph, assignment: list[int]) -> list[bool]:
    a = tuple(assignment)
    return [_is_crossing(e, a) for e in h.edges]


def _local_cut_pass(h: Hypergraph, assignment: list[int], r: int) -> tuple[int, list[int], int]:
    """Hill-climb single-vertex moves to a 1-move-optimal assignment.

    Takes the best strictly improving move each round, ties broken by lowest
    (vertex, class).  Returns (value, assignment, moves).
    """
    a = list(assignment)
    cross = _crossing_flags(h, a)
    value = sum(cross)
    moves = 0
    while True:
        best_gain = 0
        best_move: tuple[int, int] | None = None
        for v in range(h.n):
            cur = a[v]
            for c in range(r):
                if c == cur:
                    continue
                a[v] = c
                gain = 0
                at = tuple(a)
                for i in h.vertex_edges[v]:
                    after = _is_crossing(h.edges[i], at)
                    if after != cross[i]:
                        gain += 1 if after else -1
                a[v] = cur
                if gain > best_gain:
                    best_gain = gain
                    best_move = (v, c)
        if best_move is None:
            return value, a, moves
        v, c = best_move
        a[v] = c
        at = tuple(a)
        for i in h.vertex_edges[v]:
            cross[i] = _is_crossing(h.edges[i], at)
        value += best_gain
        moves += 1


def _kpartite_local(
    h: Hypergraph, r: int, rng: random.Random, restarts: int
) -> tuple[int, tuple[int, ...], int]:
    """Best local-cut assignment over restarts; restart 0 is round-robin."""
    best_value = -1
    best_assign: tuple[int, ...] = ()
    total_moves = 0
    for t in range(max(1, restarts)):
        if t == 0:
            start = [v % r for v in range(h.n)]
        else:
            start = [rng.randrange(r) for _ in range(h.n)]
        value, assign, moves = _local_cut_pass(h, start, r)
        total_moves += moves
        if value > best_value:
            best_value = value
            best_assign = tuple(assign)
    return best_value, best_assign, total_moves


def max_cut4_local(h: Hypergraph, seed: TrialSeed, restarts: int = 8) -> SolveResult:
    """Hill-climbing maximum 4-partite cut; the partition is 1-move-optimal."""
    if h.k != 4:
        raise ValueError(f"4-partite cut needs k=4, got k={h.k}")
    t0 = time.monotonic()
    rng = random.Random(seed.derived)
    value, assign, moves = _kpartite_local(h, 4, rng, restarts)
    part = VertexPartition(4, assign)
    return SolveResult(
        value=value,
        witness=part,
        optimal=False,
        stats=SearchStats(nodes=moves, elapsed=time.monotonic() - t0, budget_hit=False),
    )


# ---------------------------------------------------------------------------
# exact maximum 4-partite cut


def max_cut4_exact(
    h: Hypergraph, budget: Budget | None = None, use_symmetry: bool = True
) -> SolveResult:
    """Branch-and-bound maximum 4-partite cut with class-symmetry breaking.

    Vertices are assigned in descending-degree order (ties by index); with
    symmetry breaking, the first vertex is fixed to class 0 and a new class
    label may be opened only in order, which is valid for any fixed vertex
    order.  The bound at a node is the number of edges not yet dead (an edge
    dies when two of its vertices land in one class).  The incumbent is
    seeded from a short local search, and the search itself is deterministic,
    so value, flag, and witness are reproducible run to run.
    """
    if h.k != 4:
        raise ValueError(f"4-partite cut needs k=4, got k={h.k}")
    n, m = h.n, len(h.edges)
    ticker = _Ticker(budget)
    mask = [0] * m
    cnt = [0] * m
    dead = [False] * m
    order = sorted(range(n), key=lambda v: (-len(h.vertex_edges[v]), v))
    seed_value, seed_assign, _ = _kpartite_local(h, 4, random.Random(0xCB1), 4)
    state = {
        "dead_total": 0,
        "cross_total": 0,
        "loose_total": m,  # alive edges with at most 2 assigned vertices
        "demand_total": 0,  # sum over vertices of their max per-class demand
        "best": seed_value,
        "best_assign": seed_assign,
        "done": seed_value == m,
    }
    assign = [-1] * n
    # demand[v][c]: alive edges whose only unassigned vertex is v, needing class c
    demand = [[0, 0, 0, 0] for _ in range(n)]
    vmax = [0] * n
    last_free = [-1] * m  # the unassigned vertex of an alive 3-assigned edge
    _CLASS_OF_BIT = {1: 0, 2: 1, 4: 2, 8: 3}

    def bump(v: int, c: int, delta: int) -> None:
        demand[v][c] += delta
        new = max(demand[v])
        state["demand_total"] += new - vmax[v]
        vmax[v] = new

    def apply(v: int, c: int) -> tuple[list[int], list[int], int, list[tuple[int, int, int]]]:
        b = 1 << c
        newly_dead: list[int] = []
        bit_set: list[int] = []
        new_cross = 0
        demand_ops: list[tuple[int, int, int]] = []
        for i in h.vertex_edges[v]:
            prev = cnt[i]
            cnt[i] += 1
            if dead[i]:
                continue
            if mask[i] & b:
                dead[i] = True
                newly_dead.append(i)
                if prev <= 2:
                    state["loose_total"] -= 1
                else:
                    mc = _CLASS_OF_BIT[0b1111 ^ mask[i]]
                    bump(v, mc, -1)
                    demand_ops.append((v, mc, -1))
                continue
            mask[i] |= b
            bit_set.append(i)
            if prev == 2:
                # now three assigned: the last vertex owes the missing class
                state["loose_total"] -= 1
                u = last_free[i] = next(
                    x for x in h.edges[i] if assign[x] == -1
                )
                mc = _CLASS_OF_BIT[0b1111 ^ mask[i]]
                bump(u, mc, 1)
                demand_ops.append((u, mc, 1))
            elif prev == 3:
                new_cross += 1
                mc = c
                bump(v, mc, -1)
                demand_ops.append((v, mc, -1))
        state["dead_total"] += len(newly_dead)
        state["cross_total"] += new_cross
        return newly_dead, bit_set, new_cross, demand_ops

    def undo(
        v: int,
        c: int,
        newly_dead: list[int],
        bit_set: list[int],
        new_cross: int,
        demand_ops: list[tuple[int, int, int]],
    ) -> None:
        b = 1 << c
        loose_back = 0
        for i in h.vertex_edges[v]:
            cnt[i] -= 1
            if cnt[i] == 2 and not dead[i]:
                loose_back += 1
        for i in newly_dead:
            dead[i] = False
            if cnt[i] <= 2:
                loose_back += 1
        for i in bit_set:
            mask[i] ^= b
        for u, mc, delta in reversed(demand_ops):
            bump(u, mc, -delta)
        state["loose_total"] += loose_back
        state["dead_total"] -= len(newly_dead)
        state["cross_total"] -= new_cross

    def dfs(pos: int, used: int) -> None:
        if state["done"]:
            return
        ticker.tick()
        bound = state["cross_total"] + state["demand_total"] + state["loose_total"]
        if bound <= state["best"]:
            return
        if pos == n:
            if state["cross_total"] > state["best"]:
                state["best"] = state["cross_total"]
                state["best_assign"] = tuple(assign)
                if state["best"] == m:
                    state["done"] = True
            return
        v = order[pos]
        limit = min(used + 1, 4) if use_symmetry else 4
        for c in range(limit):
            assign[v] = c
            saved = apply(v, c)
            dfs(pos + 1, max(used, c + 1))
            undo(v, c, *saved)
            assign[v] = -1

    budget_hit = False
    try:
        dfs(0, 0)
        completed = True
    except _BudgetExceeded:
        completed = False
        budget_hit = True
    part = VertexPartition(4, tuple(state["best_assign"]))
    return SolveResult(
        value=state["best"],
        witness=part,
        optimal=completed or state["done"],
        stats=SearchStats(nodes=ticker.nodes, elapsed=ticker.elapsed(), budget_hit=budget_hit),
    )


def best_partition_for(
    f: Hypergraph,
    method: str = "exact",
    seed: TrialSeed | None = None,
    budget: Budget | None = None,
    restarts: int = 8,
) -> SolveResult:
    """Partition maximizing (exactly or locally) the crossing edges of f."""
    if method == "exact":
        return max_cut4_exact(f, budget)
    if method == "local":
        if seed is None:
            raise ValueError("local method needs a seed")
        return max_cut4_local(f, seed, restarts)
    raise ValueError(f"unknown method {method!r}; use 'exact' or 'local'")


def is_4partite(f: Hypergraph, budget: Budget | None = None) -> bool | None:
    """True/False when the exact cut certifies; None when the budget exhausts."""
    res = max_cut4_exact(f, budget)
    if not res.optimal:
        return None
    return res.value == len(f.edges)


# ---------------------------------------------------------------------------
# maximum triangle-free edge subsets

UNDEC, KEPT, DEL = 0, 1, 2


def _greedy_tfree(
    h: Hypergraph,
    triples: list[tuple[int, int, int]],
    rng: random.Random | None,
) -> list[int]:
    """Delete the edge hitting the most live copies until none remain.

    Participation counts are maintained incrementally (each copy dies once),
    so a run costs O(copies + deletions * m).  Ties go to the lowest edge id;
    with an rng, ties are broken uniformly at random instead (used for repair
    restarts).
    """
    m = len(h.edges)
    copies_by_edge: list[list[int]] = [[] for _ in range(m)]
    for ci, t in enumerate(triples):
        for e in t:
            copies_by_edge[e].append(ci)
    alive = [True] * len(triples)
    count = [len(copies_by_edge[e]) for e in range(m)]
    live_total = len(triples)
    deleted: set[int] = set()
    while live_total:
        top = max(count)
        if rng is None:
            pick = count.index(top)
        else:
            pick = rng.choice([e for e, c in enumerate(count) if c == top])
        deleted.add(pick)
        for ci in copies_by_edge[pick]:
            if alive[ci]:
                alive[ci] = False
                live_total -= 1
                for e2 in triples[ci]:
                    count[e2] -= 1
    return [i for i in range(m) if i not in deleted]


def _crossing_incumbent(
    h: Hypergraph, rng: random.Random, restarts: int
) -> list[int]:
    """Edge ids of the best local-cut crossing set (always copy-free)."""
    _, assign, _ = _kpartite_local(h, h.k, rng, restarts)
    return [i for i, e in enumerate(h.edges) if _is_crossing(e, assign)]


def max_tfree_repair(
    h: Hypergraph, seed: TrialSeed, restarts: int = 4
) -> SolveResult:
    """Heuristic maximum copy-free edge subset; the result is always copy-free.

    Runs the greedy deletion heuristic (deterministic, then randomized tie
    breaks across restarts) and additionally seeds the incumbent with the best
    local-cut crossing set under the same (seed, restarts), so the returned
    value is never below the local cut's.
    """
    t0 = time.monotonic()
    triples = t_copy_triples(h)
    best = _greedy_tfree(h, triples, None)
    rng = random.Random(seed.derived)
    for _ in range(max(0, restarts - 1)):
        cand = _greedy_tfree(h, triples, rng)
        if len(cand) > len(best):
            best = cand
    cut_rng = random.Random(seed.derived)
    crossing = _crossing_incumbent(h, cut_rng, restarts)
    if len(crossing) > len(best):
        best = crossing
    return SolveResult(
        value=len(best),
        witness=EdgeSet(h, frozenset(best)),
        optimal=False,
        stats=SearchStats(
            nodes=len(h.edges) - len(best),
            elapsed=time.monotonic() - t0,
            budget_hit=False,
        ),
    )


def max_tfree_exact(h: Hypergraph, budget: Budget | None = None) -> SolveResult:
    """Maximum edge subset containing no copy of the generalized triangle.

    Every copy forbids keeping all three of its edges.  Branch-and-bound
    decides edges of an unresolved copy (delete / keep) with two prunings:
    copies whose other two edges are kept force the deletion of the third,
    and the value bound is remaining edges minus a greedy packing of live
    edge-disjoint copies (each needs its own future deletion).  Only keep
    decisions can create forced deletions, so propagation is a single pass
    over a queue.  Instances with more than 10^7 copies are refused to guard
    memory.
    """
    t0 = time.monotonic()
    total = count_T(h)
    m = len(h.edges)
    if total == 0:
        return SolveResult(
            value=m,
            witness=EdgeSet(h, frozenset(range(m))),
            optimal=True,
            stats=SearchStats(nodes=0, elapsed=time.monotonic() - t0, budget_hit=False),
        )
    if total > MAX_COPIES_EXACT:
        raise ValueError(
            f"{total} copies exceed the exact-tier guard of {MAX_COPIES_EXACT}"
        )
    triples = t_copy_triples(h)
    ncopies = len(triples)
    rng = random.Random(0x5EED)
    greedy = _greedy_tfree(h, triples, None)
    crossing = _crossing_incumbent(h, rng, 3)
    incumbent = greedy if len(greedy) >= len(crossing) else crossing
    best = {"value": len(incumbent), "keep": incumbent}

    edge_copies: list[list[int]] = [[] for _ in range(m)]
    copy_mask = [0] * ncopies
    for ci, t in enumerate(triples):
        mask = 0
        for e in t:
            edge_copies[e].append(ci)
            mask |= 1 << e
        copy_mask[ci] = mask
    status = [UNDEC] * m
    und = [3] * ncopies
    dels = [0] * ncopies
    participation = [len(edge_copies[e]) for e in range(m)]
    ticker = _Ticker(budget)

    def assign(e: int, st: int, forced: list[int]) -> bool:
        """Set an edge's status; False when a live copy becomes fully kept."""
        status[e] = st
        ok = True
        for ci in edge_copies[e]:
            und[ci] -= 1
            if st == DEL:
                dels[ci] += 1
            elif dels[ci] == 0:
                if und[ci] == 0:
                    ok = False
                elif und[ci] == 1:
                    forced.append(ci)
        return ok

    def unassign(e: int) -> None:
        st = status[e]
        for ci in edge_copies[e]:
            und[ci] += 1
            if st == DEL:
                dels[ci] -= 1
        status[e] = UNDEC

    def propagate(forced: list[int], trail: list[int]) -> bool:
        """Delete the last undecided edge of every forced copy; deletions never cascade."""
        qi = 0
        ok = True
        while qi < len(forced):
            ci = forced[qi]
            qi += 1
            if dels[ci] > 0 or und[ci] != 1:
                continue
            target = -1
            for e in triples[ci]:
                if status[e] == UNDEC:
                    target = e
                    break
            if target < 0:
                continue
            trail.append(target)
            if not assign(target, DEL, forced):
                ok = False
                break
        return ok

    def search(ndel: int) -> None:
        ticker.tick()
        # single pass: greedy packing bound + branch-copy selection
        used_mask = 0
        packing = 0
        pick = -1
        pick3 = -1
        for ci in range(ncopies):
            if dels[ci]:
                continue
            u = und[ci]
            if u == 2 and pick < 0:
                pick = ci
            elif u == 3 and pick3 < 0:
                pick3 = ci
            cmask = copy_mask[ci]
            if not (cmask & used_mask):
                used_mask |= cmask
                packing += 1
        if m - ndel - packing <= best["value"]:
            return
        if pick < 0:
            pick = pick3
        if pick < 0:
            keep = [e for e in range(m) if status[e] != DEL]
            if len(keep) > best["value"]:
                best["value"] = len(keep)
                best["keep"] = keep
            return
        branch = sorted(
            (e for e in triples[pick] if status[e] == UNDEC),
            key=lambda e: (-participation[e], e),
        )
        assigned_here: list[int] = []
        ndel_cur = ndel
        for e in branch:
            if dels[pick] > 0:
                # an earlier keep's propagation resolved the picked copy, so
                # the remaining space is unconstrained by it: recurse once
                search(ndel_cur)
                break
            forced: list[int] = []
            trail: list[int] = [e]
            assign(e, DEL, forced)
            propagate(forced, trail)
            search(ndel_cur + len(trail))
            for x in reversed(trail):
                unassign(x)
            forced = []
            if not assign(e, KEPT, forced):
                unassign(e)
                break
            trail = []
            propagate(forced, trail)
            ndel_cur += len(trail)
            assigned_here.append(e)
            assigned_here.extend(trail)
        # keeping every edge of the picked copy is infeasible, so the loop
        # always exits via a break or a resolved pick; only unwind here
        for x in reversed(assigned_here):
            unassign(x)

    budget_hit = False
    try:
        search(0)
        completed = True
    except _BudgetExceeded:
        completed = False
        budget_hit = True
    return SolveResult(
        value=best["value"],
        witness=EdgeSet(h, frozenset(best["keep"])),
        optimal=completed,
        stats=SearchStats(nodes=ticker.nodes, elapsed=ticker.elapsed(), budget_hit=budget_hit),
    )


# ---------------------------------------------------------------------------
# bipartite half extraction


def bipartite_half(p: PairGraph) -> BipartiteHalf:
    """A 2-partition whose crossing edges R satisfy |R| >= |edges| / 2.

    Local moves: while some vertex has fewer than half of its neighbors on
    the other side, move the lowest such vertex.  Every move strictly
    increases the cut, so the loop terminates at a local optimum, where each
    vertex has cross-degree at least half its degree.
    """
    side = [v & 1 for v in range(p.n)]
    while True:
        moved = False
        for v in range(p.n):
            nbrs = p.adjacency[v]
            if not nbrs:
                continue
            cross = sum(1 for u in nbrs if side[u] != side[v])
            if 2 * cross < len(nbrs):
                side[v] ^= 1
                moved = True
                break
        if not moved:
            break
    left = frozenset(v for v in range(p.n) if side[v] == 0)
    right = frozenset(v for v in range(p.n) if side[v] == 1)
    cross_edges = frozenset(e for e in p.edges if side[e[0]] != side[e[1]])
    return BipartiteHalf(left=left, right=right, cross=PairGraph(p.n, cross_edges))
