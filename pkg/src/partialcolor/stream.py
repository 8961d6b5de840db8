"""The one-pass engine: degree filter, palette sparsification, demand instance.

Engine memory is two counters per vertex, the sampled lists and the stored
graph ``H``; nothing else survives an edge. The per-edge work runs through
``_kernels.filter_sparsify`` (numba or numpy, see that module).
"""
from __future__ import annotations

import enum
import struct
from dataclasses import asdict, dataclass, field
from typing import Iterable

import numpy as np

from . import _kernels
from .errors import InvalidParameters, MalformedEdge, MalformedInput, SolverFailure
from .graph import Coloring, Graph
from .palette import PaletteLists, default_list_size, sample_lists
from .solver import DemandInstance, SolveOutcome, SolverConfig, SolveStats, solve

# Words of per-vertex state besides the lists: the deg and free counters.
COUNTER_WORDS_PER_VERTEX = 2

STATE_MAGIC = b"PCST"
STATE_VERSION = 1
_HEADER = struct.Struct("<4sHHIIIQQQQ")


class Disposition(enum.IntEnum):
    REJECTED = _kernels.REJECTED  # failed the degree filter
    FREED = _kernels.FREED  # passed, endpoint lists disjoint
    STORED = _kernels.STORED  # passed, kept in H

    @property
    def label(self) -> str:
        return {0: "rejected-by-filter", 1: "freed", 2: "stored-in-H"}[int(self)]


@dataclass(frozen=True)
class MemoryReport:
    edges_seen: int
    edges_rejected: int
    edges_freed: int
    edges_stored: int
    n: int
    s: int
    counter_words: int
    list_words: int
    peak_state_words: int
    c0: int = COUNTER_WORDS_PER_VERTEX

    def as_dict(self) -> dict:
        return asdict(self)


def demand_from_counters(deg, free, k: int) -> np.ndarray:
    """``max(0, min(k, deg) - free)`` per vertex."""
    deg = np.asarray(deg, dtype=np.int64)
    return np.maximum(0, np.minimum(k, deg) - np.asarray(free, dtype=np.int64))


class StreamState:
    """Mutable state of one stream pass."""

    def __init__(self, n, k, lists: PaletteLists, fallback: bool, debug: bool = False):
        self.n = n
        self.k = k
        self.lists = lists
        self.fallback = fallback
        self.deg = np.zeros(n, dtype=np.int64)
        self.free = np.zeros(n, dtype=np.int64)
        self.h_u: list[int] = []
        self.h_v: list[int] = []
        self.seen = 0
        self.rejected = 0
        self.freed = 0
        self.debug = debug
        self._h_deg = np.zeros(n, dtype=np.int64) if debug else None

    @property
    def s(self) -> int:
        return self.lists.s

    @property
    def stored(self) -> int:
        return len(self.h_u)

    @classmethod
    def init(
        cls, n: int, k: int, s: int | None = None, seed=0,
        fallback_threshold: float = 1.0, debug: bool = False,
    ) -> "StreamState":
        """Fresh state. Small-k fallback engages when ``k + 1 <= threshold * s**2``."""
        if not 1 <= k <= n - 1:
            raise InvalidParameters(f"need 1 <= k <= n-1, got n={n}, k={k}")
        if s is None:
            s = default_list_size(n, k)
        if s < 1:
            raise InvalidParameters(f"s must be positive, got {s}")
        lists = sample_lists(n, k, s, seed)
        fallback = k + 1 <= fallback_threshold * s * s
        return cls(n, k, lists, fallback, debug)

    # -- per edge ---------------------------------------------------------

    def _check_edge(self, u, v):
        if u == v:
            raise MalformedEdge(f"self-loop at vertex {u}")
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise MalformedEdge(f"edge ({u}, {v}) out of range for n={self.n}")

    def process_edge(self, u: int, v: int) -> Disposition:
        u, v = int(u), int(v)
        self._check_edge(u, v)
        self.seen += 1
        deg = self.deg
        if deg[u] >= self.k and deg[v] >= self.k:
            self.rejected += 1
            return Disposition.REJECTED
        deg[u] += 1
        deg[v] += 1
        if not self.fallback and not self.lists.intersect(u, v):
            self.free[u] += 1
            self.free[v] += 1
            self.freed += 1
            d = Disposition.FREED
        else:
            self.h_u.append(u)
            self.h_v.append(v)
            if self.debug:
                self._h_deg[u] += 1
                self._h_deg[v] += 1
            d = Disposition.STORED
        if self.debug:
            self.assert_consistent((u, v))
        return d

    def process_edges(self, us, vs) -> np.ndarray:
        """Batch form of ``process_edge``; returns disposition codes per edge."""
        us = np.ascontiguousarray(us, dtype=np.int64)
        vs = np.ascontiguousarray(vs, dtype=np.int64)
        if us.shape != vs.shape:
            raise MalformedInput("endpoint arrays differ in length")
        if us.size:
            loops = np.flatnonzero(us == vs)
            if loops.size:
                raise MalformedEdge(f"self-loop at vertex {int(us[loops[0]])}")
            lo = min(us.min(), vs.min())
            hi = max(us.max(), vs.max())
            if lo < 0 or hi >= self.n:
                raise MalformedEdge(f"vertex out of range for n={self.n}")
        if self.debug:
            return np.array([int(self.process_edge(u, v)) for u, v in zip(us, vs)], dtype=np.int8)
        out = np.empty(us.shape[0], dtype=np.int8)
        _kernels.filter_sparsify(
            us, vs, self.deg, self.free, self.lists.lists, self.lists.member,
            self.k, self.fallback, out,
        )
        keep = out == _kernels.STORED
        self.h_u.extend(us[keep].tolist())
        self.h_v.extend(vs[keep].tolist())
        self.seen += int(us.shape[0])
        self.rejected += int(np.count_nonzero(out == _kernels.REJECTED))
        self.freed += int(np.count_nonzero(out == _kernels.FREED))
        return out

    def h_degrees(self) -> np.ndarray:
        d = np.bincount(np.asarray(self.h_u, dtype=np.int64), minlength=self.n)
        d += np.bincount(np.asarray(self.h_v, dtype=np.int64), minlength=self.n)
        return d

    def assert_consistent(self, last=None):
        h_deg = self._h_deg if self._h_deg is not None else self.h_degrees()
        bad = np.flatnonzero(self.free + h_deg != self.deg)
        if bad.size:
            raise AssertionError(f"free + deg_H != deg at {bad[:5].tolist()} after edge {last}")
        if self.fallback and self.free.any():
            raise AssertionError("fallback mode must never free an edge")

    # -- end of stream ----------------------------------------------------

    def finalize(self) -> DemandInstance:
        H = Graph(self.n, zip(self.h_u, self.h_v))
        if self.fallback:
            demand = np.minimum(self.k, self.deg)
            lists = [tuple(range(1, self.k + 2))] * self.n
        else:
            demand = demand_from_counters(self.deg, self.free, self.k)
            lists = [self.lists[v] for v in range(self.n)]
        return DemandInstance(H, lists, demand.tolist(), self.k)

    def memory_report(self) -> MemoryReport:
        counter_words = COUNTER_WORDS_PER_VERTEX * self.n
        list_words = self.n * self.s
        return MemoryReport(
            edges_seen=self.seen,
            edges_rejected=self.rejected,
            edges_freed=self.freed,
            edges_stored=self.stored,
            n=self.n,
            s=self.s,
            counter_words=counter_words,
            list_words=list_words,
            peak_state_words=counter_words + self.stored + list_words,
        )

    def state_words(self) -> int:
        """Words actually held right now, counted from the arrays themselves."""
        return self.deg.size + self.free.size + self.lists.lists.size + len(self.h_u)

    # -- serialization ----------------------------------------------------

    def to_bytes(self) -> bytes:
        """Canonical little-endian encoding: header, deg, free, lists, H."""
        head = _HEADER.pack(
            STATE_MAGIC, STATE_VERSION, int(self.fallback), self.n, self.k, self.s,
            self.seen, self.rejected, self.freed, self.stored,
        )
        h = np.empty(2 * self.stored, dtype="<u4")
        h[0::2] = self.h_u
        h[1::2] = self.h_v
        return b"".join([
            head,
            self.deg.astype("<u4").tobytes(),
            self.free.astype("<u4").tobytes(),
            self.lists.lists.astype("<u4").tobytes(),
            h.tobytes(),
        ])

    @classmethod
    def from_bytes(cls, data: bytes) -> "StreamState":
        if len(data) < _HEADER.size:
            raise MalformedInput("state blob shorter than its header")
        magic, version, flags, n, k, s, seen, rejected, freed, stored = _HEADER.unpack_from(data)
        if magic != STATE_MAGIC:
            raise MalformedInput(f"bad state magic {magic!r}")
        if version != STATE_VERSION:
            raise MalformedInput(f"unsupported state version {version}")
        expected = _HEADER.size + 4 * (2 * n + n * s + 2 * stored)
        if len(data) != expected:
            raise MalformedInput(f"state blob is {len(data)} bytes, expected {expected}")
        body = np.frombuffer(data, dtype="<u4", offset=_HEADER.size).astype(np.int64)
        deg, free = body[:n], body[n:2 * n]
        lists = body[2 * n:2 * n + n * s].reshape(n, s)
        h = body[2 * n + n * s:]
        state = cls(n, k, PaletteLists(k, s, lists), bool(flags & 1))
        state.deg = deg.copy()
        state.free = free.copy()
        state.h_u = h[0::2].tolist()
        state.h_v = h[1::2].tolist()
        state.seen, state.rejected, state.freed = seen, rejected, freed
        return state


@dataclass(frozen=True)
class EngineConfig:
    n: int
    k: int
    s: int | None = None
    seed: int = 0
    fallback_threshold: float = 1.0
    solver: SolverConfig = field(default_factory=SolverConfig)
    strict: bool = True
    debug: bool = False


@dataclass
class StreamRun:
    coloring: Coloring
    memory: MemoryReport
    solver_stats: SolveStats
    fallback: bool
    state: StreamState = field(repr=False)

    def __iter__(self):
        yield self.coloring
        yield self.memory


def _dedupe(edges: list[tuple[int, int]], strict: bool) -> list[tuple[int, int]]:
    # Input hygiene only; this set is not engine state.
    seen = set()
    out = []
    for u, v in edges:
        key = (u, v) if u < v else (v, u)
        if key in seen:
            if strict:
                raise MalformedEdge(f"duplicate edge {key} in stream")
            continue
        seen.add(key)
        out.append((u, v))
    return out


def run_stream(edges: Iterable[tuple[int, int]], config: EngineConfig) -> StreamRun:
    """Stream all edges, finalize, solve the demand instance.

    The result unpacks as ``(coloring, memory_report)``. Raises
    ``SolverFailure`` when no coloring is found within the solver's limits.
    """
    edges = _dedupe([(int(u), int(v)) for u, v in edges], config.strict)
    state = StreamState.init(
        config.n, config.k, config.s, config.seed, config.fallback_threshold, config.debug
    )
    if edges:
        arr = np.asarray(edges, dtype=np.int64)
        state.process_edges(arr[:, 0], arr[:, 1])
    inst = state.finalize()
    outcome: SolveOutcome = solve(inst, config.solver)
    if not outcome.ok:
        raise SolverFailure(f"demand instance not solved: {outcome.status}", outcome)
    return StreamRun(outcome.coloring, state.memory_report(), outcome.stats, state.fallback, state)
