"""Timing of the numba kernels against their numpy twins on one random input."""
from __future__ import annotations

import time

import numpy as np

from . import _kernels
from .generators import gen_random_stream
from .graph import Graph
from .palette import sample_lists


def _best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_kernels(n=2000, avg_deg=200, k=50, s=16, repeat=3, seed=0) -> dict:
    """Best-of-``repeat`` seconds per kernel and backend, plus an agreement flag.

    The numba kernels are called once before timing so compilation is not
    counted.
    """
    sf = gen_random_stream(n, avg_deg, k, "random", seed)
    edges = np.asarray(sf.edges, dtype=np.int64).reshape(-1, 2)
    us, vs = edges[:, 0].copy(), edges[:, 1].copy()
    lists = sample_lists(n, k, s, seed)
    g = Graph(n, sf.edges)
    indptr, indices = g.csr
    colors = np.random.default_rng(seed).integers(1, k + 2, size=n)

    def filt(impl):
        deg = np.zeros(n, dtype=np.int64)
        free = np.zeros(n, dtype=np.int64)
        out = np.empty(us.shape[0], dtype=np.int8)
        impl(us, vs, deg, free, lists.lists, lists.member, k, False, out)
        return deg, free, out

    cases = {
        "filter_sparsify": filt,
        "peel": lambda impl: impl(indptr, indices, n),
        "count_differing": lambda impl: impl(indptr, indices, colors),
    }
    backends = ["numpy", "numba"] if _kernels.HAS_NUMBA else ["numpy"]
    rows = []
    for name, case in cases.items():
        times, outs = {}, {}
        for b in backends:
            impl = _kernels.IMPLEMENTATIONS[b][name]
            if b == "numba":
                case(impl)  # compile
            times[b], outs[b] = _best_of(lambda: case(impl), repeat)
        ref = outs["numpy"]
        ref = ref if isinstance(ref, tuple) else (ref,)
        agree = True
        for b in backends[1:]:
            got = outs[b] if isinstance(outs[b], tuple) else (outs[b],)
            agree &= all(np.array_equal(a, c) for a, c in zip(ref, got))
        row = {"kernel": name, "agree": bool(agree)}
        row.update({f"{b}_s": t for b, t in times.items()})
        if "numba" in times and times["numba"] > 0:
            row["speedup"] = times["numpy"] / times["numba"]
        rows.append(row)
    return {
        "n": n, "m": int(us.shape[0]), "k": k, "s": s, "repeat": repeat,
        "active_backend": _kernels.BACKEND, "kernels": rows,
    }


def format_table(result: dict) -> str:
    lines = [f"n={result['n']} m={result['m']} k={result['k']} s={result['s']} "
             f"(active backend: {result['active_backend']})",
             f"{'kernel':<16} {'numpy s':>10} {'numba s':>10} {'speedup':>8} agree"]
    for r in result["kernels"]:
        nb = r.get("numba_s")
        nb = f"{nb:.4f}" if nb is not None else "-"
        up = f"{r['speedup']:.1f}x" if "speedup" in r else "-"
        lines.append(f"{r['kernel']:<16} {r['numpy_s']:>10.4f} {nb:>10} {up:>8} {r['agree']}")
    return "\n".join(lines)
