"""Plain-text file formats and the JSON report.

Stream file::

    # comments start with '#', anywhere on a line
    n k
    u v
    ...

Coloring file: one ``v c`` line per vertex (colors from 1), then
``palette c_max``. Index instance: ``k ell``, ``g h``, then ``k-1`` rows of
``ell`` bits. Layout sidecar: ``role start end`` lines (half-open ranges).
Demand instance: ``n k``, one ``v demand |L| c1 .. c|L|`` line per vertex,
then ``m`` and ``m`` edge lines.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParseError
from .graph import Coloring, Edge, Graph
from .lowerbound import IndexInstance
from .solver import DemandInstance

SCHEMA_VERSION = 1


def _lines(text: str):
    """Yield ``(line_number, tokens)`` for non-blank lines with comments removed."""
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].split()
        if body:
            yield no, body


def _ints(tokens, no, want=None):
    try:
        vals = [int(t) for t in tokens]
    except ValueError:
        raise ParseError(f"expected integers, got {' '.join(tokens)!r}", no) from None
    if want is not None and len(vals) != want:
        raise ParseError(f"expected {want} fields, got {len(vals)}", no)
    return vals


# --------------------------------------------------------------------------
# streams

@dataclass
class StreamFile:
    n: int
    k: int
    edges: list[Edge] = field(default_factory=list)
    dropped: int = 0  # lines skipped in lenient mode

    def graph(self) -> Graph:
        return Graph(self.n, self.edges)


def parse_stream(text: str, strict: bool = True) -> StreamFile:
    """Parse a stream file.

    Strict mode rejects self-loops and duplicate edges; lenient mode drops
    them and counts them in ``dropped``. Out-of-range vertices and malformed
    lines are errors in both modes.
    """
    it = _lines(text)
    try:
        no, head = next(it)
    except StopIteration:
        raise ParseError("missing 'n k' header") from None
    n, k = _ints(head, no, 2)
    if n < 0 or k < 0:
        raise ParseError(f"header values must be non-negative, got n={n}, k={k}", no)
    sf = StreamFile(n, k)
    seen: set[Edge] = set()
    for no, toks in it:
        u, v = _ints(toks, no, 2)
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(f"vertex out of range for n={n} in edge ({u}, {v})", no)
        if u == v:
            if strict:
                raise ParseError(f"self-loop at vertex {u}", no)
            sf.dropped += 1
            continue
        key = (u, v) if u < v else (v, u)
        if key in seen:
            if strict:
                raise ParseError(f"duplicate edge {key}", no)
            sf.dropped += 1
            continue
        seen.add(key)
        sf.edges.append((u, v))
    return sf


def format_stream(sf: StreamFile) -> str:
    out = [f"{sf.n} {sf.k}"]
    out += [f"{u} {v}" for u, v in sf.edges]
    return "\n".join(out) + "\n"


def read_stream(path, strict: bool = True) -> StreamFile:
    return parse_stream(Path(path).read_text(), strict)


def write_stream(path, sf: StreamFile) -> None:
    Path(path).write_text(format_stream(sf))


# --------------------------------------------------------------------------
# colorings

def format_coloring(chi: Coloring) -> str:
    out = [f"{v} {int(c)}" for v, c in enumerate(chi.colors)]
    out.append(f"palette {chi.palette_size}")
    return "\n".join(out) + "\n"


def parse_coloring(text: str) -> Coloring:
    colors: dict[int, int] = {}
    palette = None
    for no, toks in _lines(text):
        if toks[0] == "palette":
            if palette is not None:
                raise ParseError("second palette line", no)
            (palette,) = _ints(toks[1:], no, 1)
            continue
        if palette is not None:
            raise ParseError("vertex line after the palette line", no)
        v, c = _ints(toks, no, 2)
        if v in colors:
            raise ParseError(f"vertex {v} colored twice", no)
        colors[v] = c
    if palette is None:
        raise ParseError("missing trailing 'palette c_max' line")
    n = len(colors)
    if sorted(colors) != list(range(n)):
        raise ParseError(f"vertex ids must be exactly 0..{n - 1}")
    return Coloring([colors[v] for v in range(n)], palette)


# --------------------------------------------------------------------------
# INDEX instances and layouts

def format_index_instance(inst: IndexInstance) -> str:
    out = [f"{inst.k} {inst.ell}", f"{inst.g} {inst.h}"]
    out += [" ".join(str(int(b)) for b in row) for row in inst.A]
    return "\n".join(out) + "\n"


def parse_index_instance(text: str) -> IndexInstance:
    rows = list(_lines(text))
    if len(rows) < 2:
        raise ParseError("need 'k ell' and 'g h' lines")
    k, ell = _ints(rows[0][1], rows[0][0], 2)
    g, h = _ints(rows[1][1], rows[1][0], 2)
    body = rows[2:]
    if len(body) != k - 1:
        raise ParseError(f"expected {k - 1} matrix rows, got {len(body)}")
    A = []
    for no, toks in body:
        bits = _ints(toks, no, ell)
        if any(b not in (0, 1) for b in bits):
            raise ParseError("matrix entries must be 0 or 1", no)
        A.append(bits)
    return IndexInstance(np.array(A, dtype=np.int8), g, h)


def format_layout(rows) -> str:
    return "".join(f"{role} {start} {stop}\n" for role, start, stop in rows)


def parse_layout(text: str) -> list[tuple[str, int, int]]:
    out = []
    for no, toks in _lines(text):
        if len(toks) != 3:
            raise ParseError(f"expected 'role start end', got {len(toks)} fields", no)
        start, stop = _ints(toks[1:], no, 2)
        out.append((toks[0], start, stop))
    return out


# --------------------------------------------------------------------------
# demand instances

def format_demand_instance(inst: DemandInstance) -> str:
    out = [f"{inst.n} {inst.k}"]
    for v in range(inst.n):
        l = inst.lists[v]
        out.append(" ".join(map(str, [v, inst.demand[v], len(l), *l])))
    edges = inst.H.sorted_edges()
    out.append(str(len(edges)))
    out += [f"{u} {v}" for u, v in edges]
    return "\n".join(out) + "\n"


def parse_demand_instance(text: str, palette: int | None = None) -> DemandInstance:
    rows = list(_lines(text))
    if not rows:
        raise ParseError("missing 'n k' header")
    n, k = _ints(rows[0][1], rows[0][0], 2)
    if len(rows) < n + 2:
        raise ParseError(f"expected {n} vertex lines and an edge count")
    lists, demand = [], []
    for i, (no, toks) in enumerate(rows[1:n + 1]):
        vals = _ints(toks, no)
        if len(vals) < 3 or vals[0] != i or len(vals) != 3 + vals[2]:
            raise ParseError(f"expected 'v demand |L| colors...' for vertex {i}", no)
        demand.append(vals[1])
        lists.append(tuple(vals[3:]))
    no, toks = rows[n + 1]
    (m,) = _ints(toks, no, 1)
    edge_rows = rows[n + 2:]
    if len(edge_rows) != m:
        raise ParseError(f"edge count says {m}, found {len(edge_rows)} edge lines", no)
    edges = [tuple(_ints(t, no, 2)) for no, t in edge_rows]
    return DemandInstance(Graph(n, edges), lists, demand, k, palette)


# --------------------------------------------------------------------------
# report

def make_report(command: str, ok: bool, params: dict, result: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "ok": bool(ok),
        "params": params,
        "result": result,
    }


def write_report(path, report: dict) -> None:
    Path(path).write_text(json.dumps(report, indent=2, sort_keys=True, default=_jsonable) + "\n")


def _jsonable(x):
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not JSON serializable: {type(x).__name__}")


_memory = {
    "type": "object",
    "required": [
        "edges_seen", "edges_rejected", "edges_freed", "edges_stored",
        "n", "s", "counter_words", "list_words", "peak_state_words", "c0",
    ],
    "additionalProperties": {"type": "integer"},
}

_trial_row = {
    "type": "object",
    "required": ["seed", "success", "colors_used", "memory", "solver", "violations", "fallback"],
    "properties": {
        "seed": {"type": "integer"},
        "success": {"type": "boolean"},
        "colors_used": {"type": "integer", "minimum": 0},
        "memory": {"oneOf": [_memory, {"type": "null"}]},
        "solver": {"type": ["object", "null"]},
        "violations": {"type": "array"},
        "fallback": {"type": "boolean"},
        "error": {"type": ["string", "null"]},
    },
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "partialcolor report",
    "type": "object",
    "required": ["schema_version", "command", "ok", "params", "result"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "command": {"type": "string"},
        "ok": {"type": "boolean"},
        "params": {"type": "object"},
        "result": {
            "type": "object",
            "properties": {
                "memory": _memory,
                "rows": {"type": "array", "items": _trial_row},
                "aggregate": {
                    "type": "object",
                    "required": ["trials", "successes", "success_rate", "max_edges_stored", "wall_clock_s"],
                    "properties": {
                        "trials": {"type": "integer", "minimum": 0},
                        "successes": {"type": "integer", "minimum": 0},
                        "success_rate": {"type": "number", "minimum": 0, "maximum": 1},
                        "max_edges_stored": {"type": "integer", "minimum": 0},
                        "wall_clock_s": {"type": "number", "minimum": 0},
                    },
                },
            },
        },
    },
}
