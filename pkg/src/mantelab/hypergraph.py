"""Core data model for k-uniform hypergraphs, vertex partitions, and shadow graphs.

Vertices are dense 0-based integers.  Edges are stored as ascending tuples,
deduplicated, in lexicographic order; edge identity is set identity.  All
objects here are immutable after construction, so any number of threads may
query them concurrently.

The text format is bit-exact: line 1 is ``n k m``, followed by ``m`` lines of
``k`` ascending space-separated vertex ids, LF line endings, no comments.
Writing a parsed hypergraph reproduces the canonical byte stream.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, product
from typing import Iterable

import numpy as np

Edge = tuple[int, ...]
Pair = tuple[int, int]

__all__ = [
    "Edge",
    "Pair",
    "Hypergraph",
    "EdgeSet",
    "VertexPartition",
    "PairGraph",
    "build_hypergraph",
    "empty_hypergraph",
    "complete_hypergraph",
    "edge_subset",
    "link",
    "crossing_edges",
    "crossing_link",
    "common_degree",
    "co_neighborhood",
    "shadow_graph",
    "restrict_bracket",
    "is_balanced",
    "turan_hypergraph",
    "partition_from_classes",
    "to_text",
    "from_text",
    "write_text",
    "read_text",
]


@dataclass(frozen=True)
class Hypergraph:
    """An n-vertex k-uniform hypergraph with a canonical, deduplicated edge list.

    ``edges`` must hold ascending k-tuples in lexicographic order with no
    duplicates; use :func:`build_hypergraph` to construct from untrusted input.
    """

    n: int
    k: int
    edges: tuple[Edge, ...]

    def __len__(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edges)

    @cached_property
    def edge_ids(self) -> dict[Edge, int]:
        return {e: i for i, e in enumerate(self.edges)}

    @cached_property
    def vertex_edges(self) -> tuple[tuple[int, ...], ...]:
        """For each vertex, the ascending ids of edges containing it."""
        buckets: list[list[int]] = [[] for _ in range(self.n)]
        for i, e in enumerate(self.edges):
            for v in e:
                buckets[v].append(i)
        return tuple(tuple(b) for b in buckets)

    @cached_property
    def cores(self) -> dict[Edge, tuple[int, ...]]:
        """(k-1)-subset index: core -> ascending completing vertices.

        The query contract is exact co-neighborhood: ``cores[s]`` lists every
        x with ``s + {x}`` an edge; absent cores have no completion.
        """
        idx: dict[Edge, list[int]] = {}
        for e in self.edges:
            for drop in range(self.k):
                core = e[:drop] + e[drop + 1:]
                idx.setdefault(core, []).append(e[drop])
        return {c: tuple(sorted(vs)) for c, vs in idx.items()}

    @cached_property
    def edge_array(self) -> np.ndarray:
        """Edges as an (m, k) int64 array with ascending rows."""
        if not self.edges:
            return np.empty((0, self.k), dtype=np.int64)
        return np.asarray(self.edges, dtype=np.int64)

    def degree(self, v: int) -> int:
        if not 0 <= v < self.n:
            raise ValueError(f"vertex {v} out of range 0..{self.n - 1}")
        return len(self.vertex_edges[v])

    def has_edge(self, e: Iterable[int]) -> bool:
        return tuple(sorted(e)) in self.edge_set


@dataclass(frozen=True)
class EdgeSet:
    """A subset of a host hypergraph's edges, identified by edge ids."""

    universe: Hypergraph
    indices: frozenset[int]

    def __post_init__(self) -> None:
        m = len(self.universe.edges)
        bad = [i for i in self.indices if not 0 <= i < m]
        if bad:
            raise ValueError(f"edge ids out of range: {sorted(bad)[:5]}")

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.edges)

    def __contains__(self, edge: Iterable[int]) -> bool:
        e = tuple(sorted(edge))
        i = self.universe.edge_ids.get(e)
        return i is not None and i in self.indices

    @cached_property
    def edges(self) -> tuple[Edge, ...]:
        return tuple(self.universe.edges[i] for i in sorted(self.indices))

    def as_hypergraph(self) -> Hypergraph:
        return Hypergraph(self.universe.n, self.universe.k, self.edges)

    def complement(self) -> "EdgeSet":
        allids = frozenset(range(len(self.universe.edges)))
        return EdgeSet(self.universe, allids - self.indices)


@dataclass(frozen=True)
class VertexPartition:
    """Assignment of vertices 0..n-1 to classes 0..r-1; class 0 is the designated first class."""

    r: int
    assignment: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.r < 1:
            raise ValueError("partition needs at least one class")
        for v, c in enumerate(self.assignment):
            if not 0 <= c < self.r:
                raise ValueError(f"vertex {v}: class {c} out of range 0..{self.r - 1}")

    @property
    def n(self) -> int:
        return len(self.assignment)

    @cached_property
    def classes(self) -> tuple[frozenset[int], ...]:
        parts: list[set[int]] = [set() for _ in range(self.r)]
        for v, c in enumerate(self.assignment):
            parts[c].add(v)
        return tuple(frozenset(p) for p in parts)

    @cached_property
    def class_sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.classes)

    def class_of(self, v: int) -> int:
        return self.assignment[v]


@dataclass(frozen=True)
class PairGraph:
    """A simple graph stored as a set of ascending vertex pairs."""

    n: int
    edges: frozenset[Pair]

    def __post_init__(self) -> None:
        for u, v in self.edges:
            if not (0 <= u < v < self.n):
                raise ValueError(f"bad pair ({u}, {v}) for n={self.n}")

    def __len__(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        nbrs: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return tuple(frozenset(s) for s in nbrs)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])


# ---------------------------------------------------------------------------
# construction


def build_hypergraph(n: int, k: int, edges: Iterable[Iterable[int]]) -> Hypergraph:
    """Validate, canonicalize, and deduplicate an edge list.

    Rejects edges with repeated vertices, out-of-range vertices, or wrong
    arity, reporting the index of the offending edge.
    """
    if k < 2:
        raise ValueError(f"uniformity k={k} must be at least 2")
    if n < k:
        raise ValueError(f"need n >= k, got n={n}, k={k}")
    seen: set[Edge] = set()
    for i, raw in enumerate(edges):
        vs = tuple(sorted(raw))
        if len(vs) != k:
            raise ValueError(f"edge {i}: expected {k} vertices, got {len(vs)}")
        if len(set(vs)) != k:
            raise ValueError(f"edge {i}: repeated vertex in {vs}")
        if vs[0] < 0 or vs[-1] >= n:
            raise ValueError(f"edge {i}: vertex out of range 0..{n - 1} in {vs}")
        seen.add(vs)
    return Hypergraph(n, k, tuple(sorted(seen)))


def empty_hypergraph(n: int, k: int) -> Hypergraph:
    return build_hypergraph(n, k, [])


def complete_hypergraph(n: int, k: int) -> Hypergraph:
    """All C(n, k) possible edges."""
    if k < 2 or n < k:
        raise ValueError(f"need n >= k >= 2, got n={n}, k={k}")
    return Hypergraph(n, k, tuple(combinations(range(n), k)))


def edge_subset(host: Hypergraph, edges: Iterable[Iterable[int]]) -> EdgeSet:
    """An EdgeSet from explicit edges, all of which must belong to the host."""
    ids = set()
    for raw in edges:
        e = tuple(sorted(raw))
        i = host.edge_ids.get(e)
        if i is None:
            raise ValueError(f"edge {e} not in host hypergraph")
        ids.add(i)
    return EdgeSet(host, frozenset(ids))


# ---------------------------------------------------------------------------
# links, degrees, co-neighborhoods


def link(g: Hypergraph, v: int) -> Hypergraph:
    """The (k-1)-uniform hypergraph of edge remainders through v; size d(v)."""
    if not 0 <= v < g.n:
        raise ValueError(f"vertex {v} out of range 0..{g.n - 1}")
    rem = []
    for i in g.vertex_edges[v]:
        e = g.edges[i]
        rem.append(tuple(x for x in e if x != v))
    return Hypergraph(g.n, g.k - 1, tuple(sorted(rem)))


def _is_crossing(edge: Edge, assignment: tuple[int, ...]) -> bool:
    # with r == k, "meets every class" is "all classes distinct"
    seen = 0
    for v in edge:
        b = 1 << assignment[v]
        if seen & b:
            return False
        seen |= b
    return True


def _check_partition(g: Hypergraph, part: VertexPartition) -> None:
    if part.n != g.n:
        raise ValueError(f"partition covers {part.n} vertices, hypergraph has {g.n}")
    if part.r != g.k:
        raise ValueError(
            f"crossing semantics need r == k, got r={part.r}, k={g.k}"
        )


def crossing_edges(g: Hypergraph, part: VertexPartition) -> EdgeSet:
    """Edges meeting every class of the partition (one vertex per class)."""
    _check_partition(g, part)
    a = part.assignment
    ids = frozenset(i for i, e in enumerate(g.edges) if _is_crossing(e, a))
    return EdgeSet(g, ids)


def crossing_link(g: Hypergraph, v: int, part: VertexPartition) -> Hypergraph:
    """Remainders of crossing edges through v; size is the crossing degree."""
    _check_partition(g, part)
    if not 0 <= v < g.n:
        raise ValueError(f"vertex {v} out of range 0..{g.n - 1}")
    a = part.assignment
    rem = []
    for i in g.vertex_edges[v]:
        e = g.edges[i]
        if _is_crossing(e, a):
            rem.append(tuple(x for x in e if x != v))
    return Hypergraph(g.n, g.k - 1, tuple(sorted(rem)))


def common_degree(
    g: Hypergraph, u: int, v: int, part: VertexPartition | None = None
) -> int:
    """Number of (k-1)-sets t with both t+{u} and t+{v} edges (crossing if a partition is given)."""
    if u == v:
        raise ValueError("common degree needs two distinct vertices")
    for x in (u, v):
        if not 0 <= x < g.n:
            raise ValueError(f"vertex {x} out of range 0..{g.n - 1}")
    a = part.assignment if part is not None else None
    if part is not None:
        _check_partition(g, part)
    # scan edges through the lower-degree endpoint
    if len(g.vertex_edges[u]) > len(g.vertex_edges[v]):
        u, v = v, u
    count = 0
    for i in g.vertex_edges[u]:
        e = g.edges[i]
        if a is not None and not _is_crossing(e, a):
            continue
        if v in e:
            continue
        t = tuple(x for x in e if x != u)
        other = tuple(sorted(t + (v,)))
        if other in g.edge_set:
            if a is None or _is_crossing(other, a):
                count += 1
    return count


def co_neighborhood(g: Hypergraph, s: Iterable[int]):
    """Completions of a partial edge.

    For |s| == k-1 returns the frozenset of vertices x with s+{x} an edge; for
    |s| == k-2 returns the frozenset of ascending pairs completing s.
    """
    vs = tuple(sorted(s))
    if len(set(vs)) != len(vs):
        raise ValueError(f"repeated vertex in {vs}")
    if vs and (vs[0] < 0 or vs[-1] >= g.n):
        raise ValueError(f"vertex out of range 0..{g.n - 1} in {vs}")
    if len(vs) == g.k - 1:
        return frozenset(g.cores.get(vs, ()))
    if len(vs) == g.k - 2:
        out = set()
        probe = g.vertex_edges[vs[0]] if vs else range(len(g.edges))
        sset = set(vs)
        for i in probe:
            e = g.edges[i]
            if sset <= set(e):
                out.add(tuple(x for x in e if x not in sset))
        return frozenset(out)
    raise ValueError(f"|s| must be k-1 or k-2, got {len(vs)} for k={g.k}")


def shadow_graph(h: Hypergraph) -> PairGraph:
    """The graph of all vertex pairs covered by some edge."""
    pairs: set[Pair] = set()
    for e in h.edges:
        pairs.update(combinations(e, 2))
    return PairGraph(h.n, frozenset(pairs))


def restrict_bracket(
    g: Hypergraph,
    a_parts: Iterable[Iterable[int]],
    b_parts: Iterable[Iterable[int]],
) -> EdgeSet:
    """Edges of g expressible as a disjoint union a | b with a in A, b in B.

    Non-disjoint unions are skipped, not errors; A and B arities must sum to k.
    """
    aset = [tuple(sorted(x)) for x in a_parts]
    bset = [tuple(sorted(x)) for x in b_parts]
    if not aset or not bset:
        return EdgeSet(g, frozenset())
    asize = {len(x) for x in aset}
    bsize = {len(x) for x in bset}
    if len(asize) != 1 or len(bsize) != 1:
        raise ValueError("A and B must each contain subsets of one size")
    if asize.pop() + bsize.pop() != g.k:
        raise ValueError(f"arities must sum to k={g.k}")
    ids = set()
    for a, b in product(set(aset), set(bset)):
        if set(a) & set(b):
            continue
        e = tuple(sorted(a + b))
        i = g.edge_ids.get(e)
        if i is not None:
            ids.add(i)
    return EdgeSet(g, frozenset(ids))


def is_balanced(part: VertexPartition, n: int) -> bool:
    """True iff every class size is within a 1e-10 relative band of n/4.

    At desk scale (n below 4e10) the band admits only the exact integer n/4,
    so this degenerates to "n divisible by 4 and all classes equal"; the band
    is still applied literally so larger n behaves correctly.
    """
    if part.r != 4:
        raise ValueError(f"balancedness is defined for 4 classes, got r={part.r}")
    if part.n != n:
        raise ValueError(f"partition covers {part.n} vertices, expected {n}")
    # |s - n/4| <= 1e-10 * n/4, exactly in integers: |4s - n| * 10^10 <= n
    return all(abs(4 * s - n) * 10**10 <= n for s in part.class_sizes)


def turan_hypergraph(n: int, r: int) -> Hypergraph:
    """Complete r-partite r-uniform hypergraph with near-equal parts.

    Parts are contiguous vertex ranges of sizes ceil(n/r) then floor(n/r);
    edges are all transversals, so the edge count is the product of part sizes.
    """
    if r < 2 or n < r:
        raise ValueError(f"need n >= r >= 2, got n={n}, r={r}")
    sizes = [n // r + (1 if i < n % r else 0) for i in range(r)]
    parts = []
    start = 0
    for s in sizes:
        parts.append(range(start, start + s))
        start += s
    edges = tuple(sorted(tuple(sorted(e)) for e in product(*parts)))
    return Hypergraph(n, r, edges)


def partition_from_classes(class_sets: Iterable[Iterable[int]], n: int) -> VertexPartition:
    """Build a VertexPartition from explicit class contents covering 0..n-1."""
    classes = [tuple(c) for c in class_sets]
    assignment = [-1] * n
    for label, members in enumerate(classes):
        for v in members:
            if not 0 <= v < n:
                raise ValueError(f"vertex {v} out of range 0..{n - 1}")
            if assignment[v] != -1:
                raise ValueError(f"vertex {v} assigned twice")
            assignment[v] = label
    if any(c == -1 for c in assignment):
        missing = [v for v, c in enumerate(assignment) if c == -1]
        raise ValueError(f"vertices not assigned: {missing[:5]}")
    return VertexPartition(len(classes), tuple(assignment))


# ---------------------------------------------------------------------------
# text format


def to_text(g: Hypergraph) -> str:
    lines = [f"{g.n} {g.k} {len(g.edges)}"]
    for e in g.edges:
        lines.append(" ".join(str(v) for v in e))
    return "\n".join(lines) + "\n"


def from_text(text: str) -> Hypergraph:
    """Parse the text format; edge lines must each be strictly ascending."""
    if not text.endswith("\n"):
        raise ValueError("hypergraph text must end with LF")
    lines = text.split("\n")[:-1]
    if not lines:
        raise ValueError("empty hypergraph text")
    head = lines[0].split(" ")
    if len(head) != 3:
        raise ValueError(f"header must be 'n k m', got {lines[0]!r}")
    try:
        n, k, m = (int(x) for x in head)
    except ValueError:
        raise ValueError(f"non-integer header field in {lines[0]!r}") from None
    if len(lines) - 1 != m:
        raise ValueError(f"expected {m} edge lines, found {len(lines) - 1}")
    edges = []
    for ln, raw in enumerate(lines[1:], start=1):
        try:
            vs = tuple(int(x) for x in raw.split(" "))
        except ValueError:
            raise ValueError(f"line {ln}: non-integer vertex in {raw!r}") from None
        if len(vs) != k:
            raise ValueError(f"line {ln}: expected {k} vertices, got {len(vs)}")
        if any(vs[i] >= vs[i + 1] for i in range(len(vs) - 1)):
            raise ValueError(f"line {ln}: vertices not strictly ascending: {vs}")
        edges.append(vs)
    return build_hypergraph(n, k, edges)


def write_text(g: Hypergraph, path: str) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(to_text(g))


def read_text(path: str) -> Hypergraph:
    with open(path, "r", newline="") as fh:
        return from_text(fh.read())
