"""Demand-partial list coloring: fast greedy path, complete search, brute-force oracles.

An instance is a graph ``H`` with a color list and a demand per vertex. A
solution picks ``chi(v)`` from ``L(v)`` so that every ``v`` has at least
``demand(v)`` neighbors in ``H`` with a different color. Properness is not
required, but it is sufficient whenever ``demand(v) <= deg_H(v)``, which the
instance enforces.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded, InvalidParameters, MalformedInstance
from .graph import Coloring, Graph, Verdict, differing_counts, verify_k_partial

SAT = "sat"
UNSAT = "unsat"
LIMIT = "limit-exhausted"

DEFAULT_BUDGET = 1 << 21


@dataclass(frozen=True, eq=False)
class DemandInstance:
    H: Graph
    lists: tuple[tuple[int, ...], ...]
    demand: tuple[int, ...]
    k: int
    palette: int | None = None  # largest allowed color; k + 1 when omitted

    def __post_init__(self):
        lists = tuple(tuple(int(c) for c in l) for l in self.lists)
        demand = tuple(int(d) for d in self.demand)
        object.__setattr__(self, "lists", lists)
        object.__setattr__(self, "demand", demand)
        n = self.H.n
        if len(lists) != n or len(demand) != n:
            raise MalformedInstance(
                f"need {n} lists and demands, got {len(lists)} and {len(demand)}"
            )
        if self.k < 1:
            raise MalformedInstance(f"k must be positive, got {self.k}")
        top = self.palette_size
        for v in range(n):
            d = demand[v]
            if d < 0 or d > self.k or d > self.H.degree(v):
                raise MalformedInstance(
                    f"demand({v})={d} must lie in [0, min(k={self.k}, deg_H={self.H.degree(v)})]"
                )
            if any(not 1 <= c <= top for c in lists[v]):
                raise MalformedInstance(f"list of vertex {v} leaves the palette [1, {top}]")

    @property
    def n(self) -> int:
        return self.H.n

    @property
    def palette_size(self) -> int:
        return self.palette if self.palette is not None else self.k + 1

    @cached_property
    def distinct(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(sorted(set(l))) for l in self.lists)

    def check(self, colors) -> Verdict:
        """Verify both solution conditions; violations are ``(vertex, reason)`` pairs."""
        colors = np.asarray(colors, dtype=np.int64)
        bad = []
        for v in range(self.n):
            if int(colors[v]) not in self.distinct[v]:
                bad.append((v, "list"))
        if bad:
            return Verdict.from_violations(bad)
        have = differing_counts(self.H, Coloring(colors, self.palette_size))
        need = np.asarray(self.demand, dtype=np.int64)
        return Verdict.from_violations((int(v), "demand") for v in np.flatnonzero(have < need))


@dataclass(frozen=True)
class SolverConfig:
    mode: str = "auto"  # auto | exact | heuristic
    node_limit: int | None = 1_000_000  # None: unbounded
    restarts: int = 0
    seed: int | None = None

    def __post_init__(self):
        if self.mode not in ("auto", "exact", "heuristic"):
            raise InvalidParameters(f"unknown solver mode {self.mode!r}")
        if self.node_limit is not None and self.node_limit < 1:
            raise InvalidParameters("node_limit must be >= 1")
        if self.restarts < 0:
            raise InvalidParameters("restarts must be >= 0")


@dataclass
class SolveStats:
    nodes: int = 0
    fast_path_used: bool = False
    attempts: int = 0

    def as_dict(self) -> dict:
        return {"nodes": self.nodes, "fast_path_used": self.fast_path_used, "attempts": self.attempts}


@dataclass
class SolveOutcome:
    status: str
    coloring: Coloring | None = None
    stats: SolveStats = field(default_factory=SolveStats)

    @property
    def ok(self) -> bool:
        return self.status == SAT


def _value_orders(inst: DemandInstance, rng: random.Random | None) -> list[list[int]]:
    orders = [list(d) for d in inst.distinct]
    if rng is not None:
        for o in orders:
            rng.shuffle(o)
    return orders


def greedy_list_coloring(inst: DemandInstance, rng: random.Random | None = None):
    """Proper list coloring of ``H`` by decreasing degree; None if some vertex gets stuck."""
    H = inst.H
    orders = _value_orders(inst, rng)
    colors = [0] * inst.n
    for v in sorted(range(inst.n), key=lambda x: (-H.degree(x), x)):
        taken = {colors[u] for u in H.neighbors(v)}
        for c in orders[v]:
            if c not in taken:
                colors[v] = c
                break
        else:
            return None
    return colors


class _Search:
    """Complete backtracking search with incremental viability bookkeeping.

    For an assigned vertex, ``slack = deg - same - demand`` where ``same``
    counts assigned neighbors sharing its color; it must stay >= 0. When it
    reaches 0, no unassigned neighbor may take that color (``blocked``).
    Color ``c`` is viable for ``v`` iff it is in ``L(v)``, enough neighbors
    could still differ (``deg - cnt[v][c] >= demand``) and nothing blocks it.

    A vertex with ``demand == deg`` is tight: all its edges must be
    bichromatic. Cliques of such must-differ edges get a pigeonhole check
    (fewer available colors than unassigned members is a dead end).
    """

    def __init__(self, inst: DemandInstance, rng: random.Random | None):
        self.inst = inst
        n = inst.n
        P = inst.palette_size + 1
        self.adj = [sorted(inst.H.neighbors(v)) for v in range(n)]
        self.deg = [len(a) for a in self.adj]
        self.dem = list(inst.demand)
        self.order = _value_orders(inst, rng)
        self.inlist = [[False] * P for _ in range(n)]
        for v in range(n):
            for c in inst.distinct[v]:
                self.inlist[v][c] = True
        self.cnt = [[0] * P for _ in range(n)]
        self.blocked = [[0] * P for _ in range(n)]
        self.viable = [row[:] for row in self.inlist]
        self.domsize = [len(d) for d in inst.distinct]
        self.dommask = [sum(1 << c for c in d) for d in inst.distinct]
        self.color = [0] * n
        self.slack = [0] * n
        self.unassigned = set(range(n))
        self.emptied: list[int] = []
        self.touched: set[int] = set()
        self.weight = [1] * n
        for v in range(n):
            for c in inst.distinct[v]:
                self._refresh(v, c)
        self.cliques = _must_differ_cliques(self.adj, self.deg, self.dem)
        self.member_of: list[list[int]] = [[] for _ in range(n)]
        for i, q in enumerate(self.cliques):
            for v in q:
                self.member_of[v].append(i)

    def _refresh(self, x, c):
        ok = self.inlist[x][c] and self.blocked[x][c] == 0 and self.deg[x] - self.cnt[x][c] >= self.dem[x]
        if ok != self.viable[x][c]:
            self.viable[x][c] = ok
            self.dommask[x] ^= 1 << c
            self.touched.add(x)
            if ok:
                self.domsize[x] += 1
            else:
                self.domsize[x] -= 1
                if self.domsize[x] == 0:
                    self.emptied.append(x)

    def _pigeonhole_ok(self, clique_ids) -> bool:
        for i in clique_ids:
            free = 0
            mask = 0
            for x in self.cliques[i]:
                if self.color[x] == 0:
                    free += 1
                    mask |= self.dommask[x]
            if free > mask.bit_count():
                return False
        return True

    def _block(self, x, c, delta):
        for y in self.adj[x]:
            self.blocked[y][c] += delta
            self._refresh(y, c)

    def assign(self, v, c):
        """Assign and propagate; returns ``(undo_record, dead_end)``."""
        self.emptied = []
        self.touched = {v}
        self.color[v] = c
        self.unassigned.discard(v)
        self.slack[v] = self.deg[v] - self.cnt[v][c] - self.dem[v]
        if self.slack[v] == 0:
            self._block(v, c, 1)
        zeroed = []
        for x in self.adj[v]:
            self.cnt[x][c] += 1
            self._refresh(x, c)
            if self.color[x] == c:
                self.slack[x] -= 1
                if self.slack[x] == 0:
                    zeroed.append(x)
                    self._block(x, c, 1)
        dead = any(self.color[x] == 0 for x in self.emptied)
        if not dead:
            ids = {i for x in self.touched for i in self.member_of[x]}
            dead = not self._pigeonhole_ok(ids)
        return (v, c, zeroed), dead

    def undo(self, record):
        v, c, zeroed = record
        for x in reversed(zeroed):
            self._block(x, c, -1)
        for x in self.adj[v]:
            if self.color[x] == c:
                self.slack[x] += 1
            self.cnt[x][c] -= 1
            self._refresh(x, c)
        if self.slack[v] == 0:
            self._block(v, c, -1)
        self.color[v] = 0
        self.unassigned.add(v)

    def select(self):
        if not self.unassigned:
            return None
        # smallest domain per unit of conflict weight; ties go to the busiest vertex
        w = self.weight
        return min(self.unassigned, key=lambda x: (self.domsize[x] / w[x], -self.deg[x], x))

    def _push(self, stack, v):
        stack.append([v, [c for c in self.order[v] if self.viable[v][c]], 0, None])

    def _dive(self, cutoff):
        """One depth-first run of at most ``cutoff`` nodes; state is restored unless SAT."""
        nodes = 0
        stack = []
        self._push(stack, self.select())
        status = UNSAT
        while stack:
            frame = stack[-1]
            if frame[3] is not None:
                self.undo(frame[3])
                frame[3] = None
            v, cands, i = frame[0], frame[1], frame[2]
            if i >= len(cands):
                self.weight[v] += 1
                stack.pop()
                continue
            frame[2] = i + 1
            c = cands[i]
            if not self.viable[v][c]:
                continue
            if nodes >= cutoff:
                status = LIMIT
                break
            nodes += 1
            frame[3], dead = self.assign(v, c)
            if dead:
                for x in self.emptied:
                    self.weight[x] += 1
                continue
            nxt = self.select()
            if nxt is None:
                return SAT, nodes
            self._push(stack, nxt)
        for frame in reversed(stack):
            if frame[3] is not None:
                self.undo(frame[3])
        return status, nodes

    def run(self, node_limit, first_cutoff=64):
        """Restarting search; returns ``(status, colors, nodes)``.

        Each run is cut off after a node budget that doubles between runs, and
        conflict weights carry over, so later runs branch first on the
        vertices that kept failing. The last run is uncut, so the search stays
        complete when ``node_limit`` is None.
        """
        if any(self.domsize[v] == 0 for v in range(self.inst.n)):
            return UNSAT, None, 0
        if not self._pigeonhole_ok(range(len(self.cliques))):
            return UNSAT, None, 0
        if not self.unassigned:
            return SAT, [], 0
        total = 0
        cutoff = first_cutoff
        while True:
            budget = cutoff if node_limit is None else min(cutoff, node_limit - total)
            status, nodes = self._dive(budget)
            total += nodes
            if status == SAT:
                return SAT, list(self.color), total
            if status == UNSAT:
                return UNSAT, None, total
            if node_limit is not None and total >= node_limit:
                return LIMIT, None, total
            cutoff *= 2


def _must_differ_cliques(adj, deg, dem, min_size=3):
    """Greedy maximal cliques (size >= min_size) of the graph of edges with a tight endpoint."""
    n = len(adj)
    tight = [dem[v] == deg[v] for v in range(n)]
    dadj = [{u for u in adj[v] if tight[v] or tight[u]} for v in range(n)]
    found = set()
    for v in range(n):
        for u in sorted(dadj[v]):
            if u < v:
                continue
            clique = [v, u]
            cand = dadj[v] & dadj[u]
            while cand:
                w = min(cand)
                clique.append(w)
                cand &= dadj[w]
            if len(clique) >= min_size:
                found.add(tuple(sorted(clique)))
    return sorted(found)


def _simplify(inst: DemandInstance):
    """Peel vertices with more list colors than remaining neighbors.

    Such a vertex can be colored last, differently from every neighbor, which
    meets its own demand and counts as a differing neighbor for all of them.
    Returns ``(peeled, core_instance, core_ids)``; peeled is in removal order.
    """
    n = inst.n
    H = inst.H
    deg = [H.degree(v) for v in range(n)]
    gone = [False] * n
    queue = [v for v in range(n) if len(inst.distinct[v]) > deg[v]]
    peeled = []
    while queue:
        v = queue.pop()
        if gone[v]:
            continue
        gone[v] = True
        peeled.append(v)
        for u in H.neighbors(v):
            if not gone[u]:
                deg[u] -= 1
                if len(inst.distinct[u]) > deg[u]:
                    queue.append(u)
    core = [v for v in range(n) if not gone[v]]
    sub, old = H.induced(core)
    demand = [max(0, inst.demand[v] - (H.degree(v) - deg[v])) for v in old]
    lists = [inst.lists[v] for v in old]
    return peeled, DemandInstance(sub, lists, demand, inst.k, inst.palette), old


def _color_peeled(inst: DemandInstance, colors, peeled, rng):
    orders = _value_orders(inst, rng)
    for v in reversed(peeled):
        taken = {colors[u] for u in inst.H.neighbors(v)}
        colors[v] = next(c for c in orders[v] if c not in taken)
    return colors


def solve(inst: DemandInstance, cfg: SolverConfig | None = None) -> SolveOutcome:
    """Find a list-respecting coloring meeting every demand.

    ``auto`` tries the greedy proper-coloring path first, then searches;
    ``exact`` searches only; ``heuristic`` never searches. A returned
    coloring has always been re-verified against the instance.
    """
    cfg = cfg or SolverConfig()
    stats = SolveStats()
    rng = random.Random(cfg.seed) if cfg.seed is not None else None

    def done(colors):
        verdict = inst.check(colors)
        if not verdict:
            raise AssertionError(f"solver produced an invalid coloring: {verdict.violations[:5]}")
        return SolveOutcome(SAT, Coloring(colors, inst.palette_size), stats)

    if cfg.mode in ("auto", "heuristic"):
        colors = greedy_list_coloring(inst, rng)
        if colors is not None:
            stats.fast_path_used = True
            return done(colors)
        if cfg.mode == "heuristic":
            return SolveOutcome(LIMIT, None, stats)

    peeled, core, old = _simplify(inst)
    for attempt in range(cfg.restarts + 1):
        stats.attempts += 1
        if attempt == 0:
            attempt_rng = rng
        else:
            attempt_rng = random.Random(f"{cfg.seed}:{attempt}")
        status, core_colors, nodes = _Search(core, attempt_rng).run(cfg.node_limit)
        stats.nodes += nodes
        if status == SAT:
            colors = [0] * inst.n
            for i, v in enumerate(old):
                colors[v] = core_colors[i]
            return done(_color_peeled(inst, colors, peeled, attempt_rng))
        if status == UNSAT:
            return SolveOutcome(UNSAT, None, stats)
    return SolveOutcome(LIMIT, None, stats)


def k_partial_instance(g: Graph, k: int, c: int) -> DemandInstance:
    """Encode "find a k-partial c-coloring of g" as a demand instance."""
    demand = [min(k, g.degree(v)) for v in range(g.n)]
    return DemandInstance(g, [tuple(range(1, c + 1))] * g.n, demand, max(k, 1), palette=c)


# --------------------------------------------------------------------------
# brute-force oracles

def solve_oracle_check(inst: DemandInstance, budget: int = DEFAULT_BUDGET) -> str:
    """Ground-truth sat/unsat by trying every list assignment."""
    sizes = [len(d) for d in inst.distinct]
    if math.prod(sizes) > budget:
        raise BudgetExceeded(f"{math.prod(sizes)} assignments exceed budget {budget}")
    adj = [list(inst.H.neighbors(v)) for v in range(inst.n)]
    for assignment in itertools.product(*inst.distinct):
        if all(
            sum(assignment[u] != assignment[v] for u in adj[v]) >= inst.demand[v]
            for v in range(inst.n)
        ):
            return SAT
    return UNSAT


def enumerate_k_partial(
    g: Graph, k: int, c: int, cap: int | None = None, budget: int = DEFAULT_BUDGET
) -> list[Coloring]:
    """All k-partial c-colorings of ``g`` in lexicographic order (first ``cap`` if given)."""
    if cap is None and c ** g.n > budget:
        raise BudgetExceeded(f"{c}^{g.n} assignments exceed budget {budget}; pass cap")
    adj = [list(g.neighbors(v)) for v in range(g.n)]
    need = [min(k, len(a)) for a in adj]
    found: list[Coloring] = []
    for chi in itertools.product(range(1, c + 1), repeat=g.n):
        if all(sum(chi[u] != chi[v] for u in adj[v]) >= need[v] for v in range(g.n)):
            found.append(Coloring(chi, c))
            if cap is not None and len(found) >= cap:
                break
    return found


def enumerate_proper(g: Graph, c: int) -> list[tuple[int, ...]]:
    """All proper c-colorings, lexicographic (cross-check oracle)."""
    out = []
    edges = g.sorted_edges()
    for chi in itertools.product(range(1, c + 1), repeat=g.n):
        if all(chi[u] != chi[v] for u, v in edges):
            out.append(chi)
    return out


def sample_k_partial(
    g: Graph, k: int, c: int, count: int, seed: int = 0, max_tries: int | None = None,
    node_limit: int | None = 200_000,
) -> list[Coloring]:
    """Up to ``count`` distinct k-partial c-colorings found by randomized search."""
    inst = k_partial_instance(g, k, c)
    seen: dict[bytes, Coloring] = {}
    tries = max_tries if max_tries is not None else 20 * count
    for t in range(tries):
        out = solve(inst, SolverConfig(mode="exact", node_limit=node_limit, seed=seed * 1_000_003 + t))
        if out.status == UNSAT:
            break
        if out.ok:
            seen.setdefault(out.coloring.colors.tobytes(), out.coloring)
            if len(seen) >= count:
                break
    result = list(seen.values())
    for chi in result:
        assert verify_k_partial(g, k, chi)
    return result

