"""Gadgets, the INDEX reduction graph, and a one-way protocol simulator.

Row, column and index values (``i``, ``g``, ``h``, ``t``) are 1-based, as
in the matrix they index; vertex ids are 0-based. Layout of ids:
``U = [0, k-1)``, ``V = [k-1, 2(k-1))``, ``W = [2(k-1), 2(k-1)+ell)``, then
gadget vertices in allocation order (Alice's gadgets, then Bob's).
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np

from .errors import (
    BudgetExceeded, InvalidColoring, InvalidParameters, MalformedInput, SolverFailure,
    UndefinedGadget,
)
from .graph import Coloring, Edge, Graph, Verdict, verify_k_partial
from .solver import (
    DEFAULT_BUDGET, SolverConfig, enumerate_k_partial, k_partial_instance, sample_k_partial,
    solve,
)

EDGE_GADGET = "edge-gadget"
COLOR_REPEATER = "color-repeater"


def edge_gadget_size(k: int) -> tuple[int, int]:
    """(auxiliary vertices, edges)."""
    return k, comb(k, 2) + k


def color_repeater_size(k: int) -> tuple[int, int]:
    return k - 1, comb(k - 1, 2) + 2 * (k - 1)


def reduction_vertex_count(k: int, ell: int) -> int:
    alice = 2 * comb(k - 1, 2) * edge_gadget_size(k)[0]
    bob = (k - 2) * color_repeater_size(k)[0] + edge_gadget_size(k)[0]
    return 2 * (k - 1) + ell + alice + bob


@dataclass(frozen=True)
class GadgetInstance:
    kind: str
    x: int
    y: int
    start: int
    stop: int


@dataclass
class VertexAllocator:
    k: int
    next_free: int = 0
    aux: list[GadgetInstance] = field(default_factory=list)

    def allocate(self, count: int) -> range:
        r = range(self.next_free, self.next_free + count)
        self.next_free += count
        return r


@dataclass
class LowerBoundLayout(VertexAllocator):
    ell: int = 0
    g: int | None = None

    @classmethod
    def new(cls, k: int, ell: int) -> "LowerBoundLayout":
        if k < 2 or ell < 1:
            raise InvalidParameters(f"need k >= 2 and ell >= 1, got k={k}, ell={ell}")
        return cls(k=k, ell=ell, next_free=2 * (k - 1) + ell)

    @property
    def U(self) -> range:
        return range(0, self.k - 1)

    @property
    def V(self) -> range:
        return range(self.k - 1, 2 * (self.k - 1))

    @property
    def W(self) -> range:
        return range(2 * (self.k - 1), 2 * (self.k - 1) + self.ell)

    def u(self, i: int) -> int:
        return self.U[i - 1]

    def v(self, i: int) -> int:
        return self.V[i - 1]

    def w(self, h: int) -> int:
        return self.W[h - 1]

    @property
    def total(self) -> int:
        return reduction_vertex_count(self.k, self.ell)

    def roles(self) -> list[tuple[str, int, int]]:
        """``(role, start, stop)`` rows, half-open ranges."""
        rows = [("U", self.U.start, self.U.stop), ("V", self.V.start, self.V.stop),
                ("W", self.W.start, self.W.stop)]
        for gi in self.aux:
            rows.append((f"{gi.kind}:{gi.x}:{gi.y}", gi.start, gi.stop))
        return rows


def add_edge_gadget(layout: VertexAllocator, x: int, y: int) -> list[Edge]:
    """k-clique ``p_1..p_k``; ``x`` joins ``p_1..p_{k-1}``, ``y`` joins ``p_k``."""
    if x == y:
        raise InvalidParameters("gadget endpoints must differ")
    k = layout.k
    p = layout.allocate(k)
    edges = list(combinations(p, 2))
    edges += [(x, q) for q in p[:-1]]
    edges.append((y, p[-1]))
    layout.aux.append(GadgetInstance(EDGE_GADGET, x, y, p.start, p.stop))
    return edges


def add_color_repeater(layout: VertexAllocator, x: int, y: int) -> list[Edge]:
    """(k-1)-clique ``Q``, with ``x`` and ``y`` each joined to all of ``Q``."""
    k = layout.k
    if k < 2:
        raise UndefinedGadget(f"color-repeater needs k >= 2, got {k}")
    if x == y:
        raise InvalidParameters("gadget endpoints must differ")
    q = layout.allocate(k - 1)
    edges = list(combinations(q, 2))
    edges += [(x, r) for r in q]
    edges += [(y, r) for r in q]
    layout.aux.append(GadgetInstance(COLOR_REPEATER, x, y, q.start, q.stop))
    return edges


@dataclass(frozen=True, eq=False)
class IndexInstance:
    A: np.ndarray  # (k-1) x ell bits
    g: int
    h: int

    def __post_init__(self):
        A = np.asarray(self.A, dtype=np.int8)
        if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
            raise InvalidParameters(f"A must be a non-empty matrix, got shape {A.shape}")
        if not np.isin(A, (0, 1)).all():
            raise InvalidParameters("A must hold bits")
        object.__setattr__(self, "A", A)
        if not 1 <= self.g <= A.shape[0] or not 1 <= self.h <= A.shape[1]:
            raise InvalidParameters(f"index ({self.g}, {self.h}) outside {A.shape}")

    @property
    def k(self) -> int:
        return self.A.shape[0] + 1

    @property
    def ell(self) -> int:
        return self.A.shape[1]

    @property
    def bit(self) -> int:
        return int(self.A[self.g - 1, self.h - 1])

    @classmethod
    def random(cls, k: int, ell: int, seed=None, g: int = 1, h: int = 1) -> "IndexInstance":
        A = np.random.default_rng(seed).integers(0, 2, size=(k - 1, ell))
        return cls(A, g, h)

    def at(self, g: int, h: int) -> "IndexInstance":
        return IndexInstance(self.A, g, h)


def build_alice_stream(inst: IndexInstance) -> tuple[list[Edge], LowerBoundLayout]:
    layout = LowerBoundLayout.new(inst.k, inst.ell)
    k = inst.k
    edges: list[Edge] = []
    for side in (layout.u, layout.v):
        for i, j in combinations(range(1, k), 2):
            edges += add_edge_gadget(layout, side(i), side(j))
    for i in range(1, k):
        for h in range(1, inst.ell + 1):
            end = layout.u(i) if inst.A[i - 1, h - 1] else layout.v(i)
            edges.append((end, layout.w(h)))
    return edges, layout


def build_bob_stream(layout: LowerBoundLayout, g: int) -> list[Edge]:
    k = layout.k
    if not 1 <= g <= k - 1:
        raise InvalidParameters(f"row index g={g} outside [1, {k - 1}]")
    edges: list[Edge] = []
    for t in range(1, k):
        if t != g:
            edges += add_color_repeater(layout, layout.u(t), layout.v(t))
    edges += add_edge_gadget(layout, layout.u(g), layout.v(g))
    layout.g = g
    return edges


def build_reduction_graph(inst: IndexInstance) -> tuple[Graph, LowerBoundLayout]:
    alice, layout = build_alice_stream(inst)
    bob = build_bob_stream(layout, inst.g)
    assert layout.next_free == layout.total
    return Graph(layout.total, alice + bob), layout


# --------------------------------------------------------------------------
# lemma checks

@dataclass
class GadgetReport:
    kind: str
    k: int
    method: str  # enumeration | solver-sampling
    colorings: int
    counterexamples: list[tuple[int, ...]]

    @property
    def ok(self) -> bool:
        return self.colorings > 0 and not self.counterexamples


def gadget_graph(kind: str, k: int) -> Graph:
    """Standalone ``{x=0, y=1}`` plus one gadget between them."""
    alloc = VertexAllocator(k, next_free=2)
    add = add_edge_gadget if kind == EDGE_GADGET else add_color_repeater
    edges = add(alloc, 0, 1)
    return Graph(alloc.next_free, edges)


def verify_gadget_lemmas(
    k: int, method: str = "auto", samples: int = 500, budget: int = DEFAULT_BUDGET, seed: int = 0,
) -> list[GadgetReport]:
    """Check the forced (in)equality of ``x`` and ``y`` over k-partial k-colorings.

    ``auto`` enumerates the whole space when ``k**n`` fits in the budget and
    falls back to collecting ``samples`` distinct solver-found colorings.
    """
    if k < 2:
        raise UndefinedGadget(f"gadget lemmas need k >= 2, got {k}")
    reports = []
    for kind in (EDGE_GADGET, COLOR_REPEATER):
        g = gadget_graph(kind, k)
        use_enum = method == "enumeration" or (method == "auto" and k ** g.n <= budget)
        if use_enum:
            if k ** g.n > budget:
                raise BudgetExceeded(f"{k}^{g.n} colorings exceed budget {budget}")
            found = enumerate_k_partial(g, k, k, budget=budget)
            how = "enumeration"
        else:
            found = sample_k_partial(g, k, k, samples, seed=seed)
            how = "solver-sampling"
        want_equal = kind == COLOR_REPEATER
        bad = [chi.as_tuple() for chi in found if (chi[0] == chi[1]) != want_equal]
        reports.append(GadgetReport(kind, k, how, len(found), bad))
    return reports


def check_structure(chi: Coloring, layout: LowerBoundLayout, g: int) -> Verdict:
    """The three structural consequences for a k-partial k-coloring of the reduction graph."""
    k = layout.k
    cu = [chi[layout.u(i)] for i in range(1, k)]
    cv = [chi[layout.v(i)] for i in range(1, k)]
    bad = []
    if len(set(cu)) != k - 1:
        bad.append(("U-distinct", tuple(cu)))
    if len(set(cv)) != k - 1:
        bad.append(("V-distinct", tuple(cv)))
    for t in range(1, k):
        same = cu[t - 1] == cv[t - 1]
        if same != (t != g):
            bad.append(("pairing", t))
    missing = set(range(1, k + 1)) - set(cu)
    if len(missing) != 1 or cv[g - 1] not in missing:
        bad.append(("alpha", cv[g - 1]))
    return Verdict.from_violations(bad)


def decode_bit(chi: Coloring, layout: LowerBoundLayout, g: int, h: int) -> int:
    cw = chi[layout.w(h)]
    if cw == chi[layout.v(g)]:
        return 1
    if cw == chi[layout.u(g)]:
        return 0
    raise InvalidColoring(f"w_{h} has color {cw}, matching neither u_{g} nor v_{g}")


def reduction_colorings(inst: IndexInstance, count: int, seed: int = 0) -> tuple[Graph, LowerBoundLayout, list[Coloring]]:
    """Distinct solver-found k-partial k-colorings of the reduction graph for ``inst.g``."""
    G, layout = build_reduction_graph(inst)
    return G, layout, sample_k_partial(G, inst.k, inst.k, count, seed=seed)


# --------------------------------------------------------------------------
# protocol simulation

class StoreEverything:
    """Reference stream algorithm: keep every edge, solve exactly at the end."""

    _HEAD = struct.Struct("<4sIIIQ")
    MAGIC = b"PCSE"

    def __init__(self, node_limit: int | None = 2_000_000):
        self.node_limit = node_limit

    def start(self, n: int, k: int, ell: int) -> "_StoreSession":
        return _StoreSession(self, n, k, ell, [])

    def keeps(self, session, u, v) -> bool:
        return True

    def resume(self, blob: bytes) -> "_StoreSession":
        magic, n, k, ell, m = self._HEAD.unpack_from(blob)
        if magic != self.MAGIC:
            raise MalformedInput(f"bad state magic {magic!r}")
        body = np.frombuffer(blob, dtype="<u4", offset=self._HEAD.size)
        if body.size != 2 * m:
            raise MalformedInput("state blob length does not match its edge count")
        edges = list(zip(body[0::2].tolist(), body[1::2].tolist()))
        return _StoreSession(self, n, k, ell, edges)


class DropMatrixEdges(StoreEverything):
    """Deliberately broken: forgets every edge touching a column vertex."""

    def keeps(self, session, u, v) -> bool:
        lo = 2 * (session.k - 1)
        hi = lo + session.ell
        return not (lo <= u < hi or lo <= v < hi)


@dataclass
class _StoreSession:
    algo: StoreEverything
    n: int
    k: int
    ell: int
    edges: list[Edge]

    def process_edge(self, u: int, v: int) -> None:
        if self.algo.keeps(self, u, v):
            self.edges.append((u, v))

    def serialize(self) -> bytes:
        head = self.algo._HEAD.pack(self.algo.MAGIC, self.n, self.k, self.ell, len(self.edges))
        return head + np.asarray(self.edges, dtype="<u4").reshape(-1).tobytes()

    def output(self) -> Coloring:
        g = Graph(self.n, self.edges)
        out = solve(k_partial_instance(g, self.k, self.k),
                    SolverConfig(mode="exact", node_limit=self.algo.node_limit))
        if not out.ok:
            raise SolverFailure(f"no k-partial k-coloring found: {out.status}", out)
        return out.coloring


@dataclass
class ProtocolTranscript:
    g: int
    h: int
    alice_edge_count: int
    bob_edge_count: int
    state_bytes: int
    truth_bit: int
    decoded_bit: int | None = None
    verified: bool = False
    failed: bool = False
    error: str | None = None

    @property
    def correct(self) -> bool:
        return self.decoded_bit is not None and self.decoded_bit == self.truth_bit


def simulate_protocol(inst: IndexInstance, algorithm=None) -> ProtocolTranscript:
    """Alice streams her edges, hands the serialized state to Bob, Bob finishes and decodes.

    ``algorithm`` needs ``start(n, k, ell)`` and ``resume(blob)``, each giving a
    session with ``process_edge``, ``serialize`` and ``output``.
    """
    algorithm = algorithm if algorithm is not None else StoreEverything()
    alice, layout = build_alice_stream(inst)
    session = algorithm.start(layout.total, inst.k, inst.ell)
    for u, v in alice:
        session.process_edge(u, v)
    blob = session.serialize()

    bob = build_bob_stream(layout, inst.g)
    session = algorithm.resume(blob)
    for u, v in bob:
        session.process_edge(u, v)
    tr = ProtocolTranscript(inst.g, inst.h, len(alice), len(bob), len(blob), inst.bit)
    try:
        chi = session.output()
    except SolverFailure as exc:
        tr.failed = True
        tr.error = str(exc)
        return tr
    full = Graph(layout.total, alice + bob)
    tr.verified = bool(chi.colors.max() <= inst.k and verify_k_partial(full, inst.k, chi))
    try:
        tr.decoded_bit = decode_bit(chi, layout, inst.g, inst.h)
    except InvalidColoring as exc:
        tr.error = str(exc)
    return tr
