"""Graphs, colorings, verification, degeneracy and the offline baselines."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np

from . import _kernels
from .errors import MalformedColoring, MalformedEdge, MalformedInput

Edge = tuple[int, int]


def _norm(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class Graph:
    """Simple undirected graph on vertices ``0..n-1``; immutable once built.

    Self-loops, out-of-range endpoints and duplicate edges (in either
    orientation) raise ``MalformedEdge``.
    """

    def __init__(self, n: int, edges: Iterable[Edge] = ()):
        if n < 0:
            raise MalformedInput(f"negative vertex count {n}")
        self.n = int(n)
        adj: list[set[int]] = [set() for _ in range(self.n)]
        seen: set[Edge] = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise MalformedEdge(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise MalformedEdge(f"edge ({u}, {v}) out of range for n={self.n}")
            e = _norm(u, v)
            if e in seen:
                raise MalformedEdge(f"duplicate edge {e}")
            seen.add(e)
            adj[u].add(v)
            adj[v].add(u)
        self.edges: frozenset[Edge] = frozenset(seen)
        self.adjacency: tuple[frozenset[int], ...] = tuple(frozenset(a) for a in adj)

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def neighbors(self, v: int) -> frozenset[int]:
        return self.adjacency[v]

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.fromiter((len(a) for a in self.adjacency), dtype=np.int64, count=self.n)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """``(indptr, indices)`` with each neighbor list sorted ascending."""
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(self.degrees, out=indptr[1:])
        indices = np.fromiter(
            (u for a in self.adjacency for u in sorted(a)), dtype=np.int64, count=2 * self.m
        )
        return indptr, indices

    def induced(self, vertices: Iterable[int]) -> tuple["Graph", list[int]]:
        """Induced subgraph relabelled to ``0..len-1``; returns it with the old ids."""
        old = sorted(set(vertices))
        new_id = {v: i for i, v in enumerate(old)}
        sub = [
            (new_id[u], new_id[v]) for u, v in self.edges if u in new_id and v in new_id
        ]
        return Graph(len(old), sub), old

    def subgraph(self, edges: Iterable[Edge]) -> "Graph":
        """Spanning subgraph on the same vertex set."""
        return Graph(self.n, edges)


@dataclass(frozen=True, eq=False)
class Coloring:
    """Vertex colors (1-based) plus the palette size ``c``."""

    colors: np.ndarray
    palette_size: int

    def __post_init__(self):
        object.__setattr__(self, "colors", np.asarray(self.colors, dtype=np.int64).copy())
        self.colors.setflags(write=False)

    def __len__(self):
        return self.colors.shape[0]

    def __getitem__(self, v):
        return int(self.colors[v])

    def __eq__(self, other):
        return (
            isinstance(other, Coloring)
            and self.palette_size == other.palette_size
            and np.array_equal(self.colors, other.colors)
        )

    def __hash__(self):
        return hash((self.palette_size, self.colors.tobytes()))

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(int(c) for c in self.colors)

    @property
    def colors_used(self) -> int:
        return int(np.unique(self.colors).shape[0])

    def __repr__(self):
        return f"Coloring({self.as_tuple()}, palette_size={self.palette_size})"


@dataclass(frozen=True)
class Verdict:
    """Outcome of a check. Truthy iff valid; ``violations`` lists offenders."""

    ok: bool
    violations: tuple = ()

    def __bool__(self):
        return self.ok

    @classmethod
    def from_violations(cls, violations) -> "Verdict":
        violations = tuple(violations)
        return cls(not violations, violations)


@dataclass(frozen=True)
class DegeneracyOrder:
    order: tuple[int, ...]
    degeneracy: int
    position: dict = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        if not self.position:
            object.__setattr__(self, "position", {v: i for i, v in enumerate(self.order)})

    def out_degree(self, g: Graph, v: int) -> int:
        i = self.position[v]
        return sum(1 for u in g.neighbors(v) if self.position[u] > i)


def _checked_colors(g: Graph, chi: Coloring) -> np.ndarray:
    if len(chi) != g.n:
        raise MalformedColoring(f"coloring covers {len(chi)} vertices, graph has {g.n}")
    cols = chi.colors
    if g.n and (cols.min() < 1 or cols.max() > chi.palette_size):
        bad = [v for v in range(g.n) if not 1 <= cols[v] <= chi.palette_size]
        raise MalformedColoring(
            f"colors outside [1, {chi.palette_size}] at vertices {bad[:10]}"
        )
    return cols


def differing_counts(g: Graph, chi: Coloring) -> np.ndarray:
    """For each vertex, how many neighbors carry a different color."""
    cols = _checked_colors(g, chi)
    indptr, indices = g.csr
    return _kernels.count_differing(indptr, indices, cols)


def verify_k_partial(g: Graph, k: int, chi: Coloring) -> Verdict:
    """Check that every vertex sees at least ``min(k, deg)`` differing neighbors.

    The verdict's violations are the offending vertex ids, ascending.
    """
    if k < 0:
        raise MalformedInput(f"k must be non-negative, got {k}")
    need = np.minimum(k, g.degrees)
    have = differing_counts(g, chi)
    return Verdict.from_violations(int(v) for v in np.flatnonzero(have < need))


def verify_proper(g: Graph, chi: Coloring) -> Verdict:
    cols = _checked_colors(g, chi)
    return Verdict.from_violations(
        e for e in g.sorted_edges() if cols[e[0]] == cols[e[1]]
    )


def degeneracy_order(g: Graph) -> DegeneracyOrder:
    """Repeated minimum-degree peeling with smallest-id tie-break."""
    if g.n == 0:
        return DegeneracyOrder((), 0)
    indptr, indices = g.csr
    order, at_removal = _kernels.peel(indptr, indices, g.n)
    return DegeneracyOrder(tuple(int(v) for v in order), int(at_removal.max()))


def degeneracy(g: Graph) -> int:
    return degeneracy_order(g).degeneracy


def degeneracy_coloring(g: Graph) -> Coloring:
    """Greedy coloring along the reverse peeling order.

    Each vertex has at most ``degeneracy`` neighbors colored before it, so
    ``degeneracy + 1`` colors suffice.
    """
    dord = degeneracy_order(g)
    colors = [0] * g.n
    for v in reversed(dord.order):
        taken = {colors[u] for u in g.neighbors(v)}
        c = 1
        while c in taken:
            c += 1
        colors[v] = c
    return Coloring(colors, dord.degeneracy + 1)


def greedy_partial_coloring(g: Graph, k: int) -> Coloring:
    """k-partial (k+1)-coloring by a single sweep in increasing id order.

    Everyone starts at color 1. A vertex whose neighborhood shows at most
    ``k`` colors moves to the smallest color its neighbors do not use; once
    two neighbors differ they stay different, so the sweep never undoes an
    earlier vertex's guarantee.
    """
    if k < 1:
        raise MalformedInput(f"k must be positive, got {k}")
    colors = [1] * g.n
    for v in range(g.n):
        seen = {colors[u] for u in g.neighbors(v)}
        if len(seen) <= k:
            c = 1
            while c in seen:
                c += 1
            colors[v] = c
    return Coloring(colors, k + 1)
