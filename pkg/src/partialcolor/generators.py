"""Random instance generators. Everything here is deterministic in its seed."""
from __future__ import annotations

import numpy as np

from .errors import InvalidParameters
from .formats import StreamFile
from .graph import Graph
from .lowerbound import IndexInstance

ORDERS = ("random", "sorted", "adversarial-dense-first")


def gnp_edges(n: int, p: float, seed=None) -> np.ndarray:
    """Edges ``(u < v)`` of G(n, p), as an ``(m, 2)`` array in lexicographic order."""
    if not 0.0 <= p <= 1.0:
        raise InvalidParameters(f"edge probability must lie in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    iu, iv = np.triu_indices(n, 1)
    keep = rng.random(iu.shape[0]) < p
    return np.stack([iu[keep], iv[keep]], axis=1).astype(np.int64)


def gnp_graph(n: int, p: float, seed=None) -> Graph:
    return Graph(n, gnp_edges(n, p, seed).tolist())


def order_edges(edges: np.ndarray, n: int, order: str, rng) -> np.ndarray:
    if order == "sorted" or edges.shape[0] == 0:
        return edges
    if order == "random":
        return edges[rng.permutation(edges.shape[0])]
    if order == "adversarial-dense-first":
        # edges touching high-degree vertices first, so the filter saturates early
        deg = np.bincount(edges.ravel(), minlength=n)
        du, dv = deg[edges[:, 0]], deg[edges[:, 1]]
        hi, lo = np.maximum(du, dv), np.minimum(du, dv)
        idx = np.lexsort((edges[:, 1], edges[:, 0], -lo, -hi))
        return edges[idx]
    raise InvalidParameters(f"unknown edge order {order!r}; choose from {', '.join(ORDERS)}")


def gen_random_stream(n: int, avg_deg: float, k: int, order: str = "random", seed=0) -> StreamFile:
    """Erdos-Renyi stream with expected average degree ``avg_deg``."""
    if n < 0:
        raise InvalidParameters(f"n must be non-negative, got {n}")
    if avg_deg < 0 or (n > 0 and avg_deg >= n):
        raise InvalidParameters(f"need 0 <= avg_deg < n, got avg_deg={avg_deg}, n={n}")
    if order not in ORDERS:
        raise InvalidParameters(f"unknown edge order {order!r}; choose from {', '.join(ORDERS)}")
    p = min(1.0, avg_deg / (n - 1)) if n > 1 else 0.0
    gen_seed, order_seed = np.random.SeedSequence(seed).spawn(2)
    edges = gnp_edges(n, p, gen_seed)
    edges = order_edges(edges, n, order, np.random.default_rng(order_seed))
    return StreamFile(n, k, [(int(u), int(v)) for u, v in edges])


def gen_index_instance(k: int, ell: int, seed=0, g: int = 1, h: int = 1) -> IndexInstance:
    return IndexInstance.random(k, ell, seed, g, h)
