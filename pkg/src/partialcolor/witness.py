"""Witness subgraphs for partial coloring, and the two-phase list coloring of a witness.

A witness keeps, at every vertex, at least ``min(k, deg)`` of its edges while
making sure no edge joins two vertices of degree above ``k``. Any proper
coloring of it is a k-partial coloring of the source graph.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import InvalidParameters, MalformedInput
from .graph import Coloring, Edge, Graph, Verdict, verify_proper
from .palette import PaletteLists, split_list
from .solver import DemandInstance, SolverConfig, solve

SUCCESS = "success"
PHASE1_FAILURE = "phase1-failure"
PHASE2_FAILURE = "phase2-failure"


@dataclass(frozen=True)
class WitnessGraph:
    base: Graph
    k: int
    provenance: tuple[Edge, ...]  # removed edges, in removal order

    @property
    def high(self) -> tuple[int, ...]:
        """Vertices of degree above k."""
        return tuple(v for v in range(self.base.n) if self.base.degree(v) > self.k)


def build_witness(g: Graph, k: int) -> WitnessGraph:
    """Delete, smallest first, every edge whose endpoints both have degree > k.

    Degrees only fall, so an edge that is ineligible once stays ineligible.
    Removing eligible edges during one ascending sweep therefore yields the
    same result as repeatedly deleting the smallest eligible edge.
    """
    if k < 1:
        raise InvalidParameters(f"k must be positive, got {k}")
    deg = [g.degree(v) for v in range(g.n)]
    removed = []
    for u, v in g.sorted_edges():
        if deg[u] > k and deg[v] > k:
            deg[u] -= 1
            deg[v] -= 1
            removed.append((u, v))
    gone = set(removed)
    return WitnessGraph(g.subgraph(e for e in g.edges if e not in gone), k, tuple(removed))


def check_witness(w: WitnessGraph, source: Graph) -> Verdict:
    """All witness conditions; violations are ``(kind, detail)`` pairs."""
    g, k = w.base, w.k
    if g.n != source.n:
        raise MalformedInput(f"witness has {g.n} vertices, source has {source.n}")
    bad = []
    for e in sorted(g.edges - source.edges):
        bad.append(("not-in-source", e))
    for u, v in g.sorted_edges():
        if min(g.degree(u), g.degree(v)) > k:
            bad.append(("edge", (u, v)))
    for v in range(g.n):
        if g.degree(v) < min(k, source.degree(v)):
            bad.append(("degree", v))
    high = set(w.high)
    for u, v in g.sorted_edges():
        if u in high and v in high:
            bad.append(("independence", (u, v)))
    return Verdict.from_violations(bad)


@dataclass
class TwoPhaseTrace:
    S: tuple[int, ...]
    T: tuple[int, ...]
    phase1_colors: dict[int, int] = field(default_factory=dict)
    effective_lists: dict[int, tuple[int, ...]] = field(default_factory=dict)
    target_palettes: dict[int, frozenset[int]] = field(default_factory=dict)
    deg_R: dict[int, int] = field(default_factory=dict)
    outcome: str = SUCCESS
    nodes: int = 0
    exact_fallback: bool = False  # coloring came from the whole-list solver (k < 4 only)


def color_witness_two_phase(
    w: WitnessGraph,
    lists: PaletteLists,
    s1: int | None = None,
    cfg: SolverConfig | None = None,
    exact_fallback: bool = True,
) -> tuple[Coloring | None, TwoPhaseTrace]:
    """Color the high-degree side from a small fixed color set, then the rest.

    Phase 1 gives each vertex of degree > k the smallest color of
    ``T = {1..max(1, ceil(k/4))}`` found in the first ``s1`` entries of its
    list. Phase 2 drops, for every remaining vertex, the colors taken by its
    high-degree neighbors and list-colors the rest of the graph properly from
    what is left of the other entries. Returns ``(None, trace)`` on failure.

    For ``k < 4`` the color set ``T`` is a single color and the two phases
    are not expected to succeed reliably; there, with ``exact_fallback``, a
    failure is retried as one proper list coloring of the whole witness from
    the full lists. The trace keeps the original failure outcome and sets
    ``exact_fallback``.
    """
    k = w.k
    g = w.base
    if lists.k != k:
        raise InvalidParameters(f"lists sampled for k={lists.k}, witness has k={k}")
    if lists.n != g.n:
        raise InvalidParameters(f"{lists.n} lists for {g.n} vertices")
    if s1 is None:
        s1 = math.ceil(lists.s / 4)
    cfg = cfg or SolverConfig(mode="exact", node_limit=1_000_000)

    S = w.high
    T = tuple(range(1, max(1, math.ceil(k / 4)) + 1))
    trace = TwoPhaseTrace(S=S, T=T)
    halves = [split_list(lists[v], s1) for v in range(g.n)]

    for v in S:
        options = set(T).intersection(halves[v][0])
        if not options:
            trace.outcome = PHASE1_FAILURE
            return _retry_whole(w, lists, cfg, trace, exact_fallback)
        trace.phase1_colors[v] = min(options)

    in_S = set(S)
    R = [v for v in range(g.n) if v not in in_S]
    palette = frozenset(range(1, k + 2))
    sub, old = g.induced(R)
    eff = []
    for i, u in enumerate(old):
        forbidden = {trace.phase1_colors[x] for x in g.neighbors(u) if x in in_S}
        target = palette - forbidden
        leff = tuple(sorted(target.intersection(halves[u][1])))
        trace.target_palettes[u] = target
        trace.effective_lists[u] = leff
        trace.deg_R[u] = sub.degree(i)
        eff.append(leff)

    inst = DemandInstance(sub, eff, [sub.degree(i) for i in range(sub.n)], k)
    out = solve(inst, cfg)
    trace.nodes = out.stats.nodes
    if not out.ok:
        trace.outcome = PHASE2_FAILURE
        return _retry_whole(w, lists, cfg, trace, exact_fallback)

    colors = [0] * g.n
    for v, c in trace.phase1_colors.items():
        colors[v] = c
    for i, u in enumerate(old):
        colors[u] = int(out.coloring.colors[i])
    chi = Coloring(colors, k + 1)
    verdict = verify_proper(g, chi)
    if not verdict:
        raise AssertionError(f"two-phase coloring is not proper: {verdict.violations[:5]}")
    return chi, trace


def _retry_whole(w, lists, cfg, trace, enabled):
    if not enabled or w.k >= 4:
        return None, trace
    g = w.base
    # demand = degree forces properness; high-degree vertices need the bound lifted
    inst = DemandInstance(
        g, [lists[v] for v in range(g.n)], [g.degree(v) for v in range(g.n)],
        max(w.k, g.max_degree), palette=w.k + 1,
    )
    out = solve(inst, cfg)
    trace.nodes += out.stats.nodes
    if not out.ok:
        return None, trace
    trace.exact_fallback = True
    chi = Coloring(out.coloring.colors, w.k + 1)
    verdict = verify_proper(g, chi)
    if not verdict:
        raise AssertionError(f"fallback coloring is not proper: {verdict.violations[:5]}")
    return chi, trace
