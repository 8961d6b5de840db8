"""Hot inner loops, in two interchangeable flavours.

Every kernel exists as a numba ``@njit`` function and as a plain numpy
function with identical semantics. The module-level names dispatch to numba
unless it is missing or ``PARTIALCOLOR_DISABLE_NUMBA`` is set to a truthy
value. Both flavours stay importable through ``IMPLEMENTATIONS`` so tests and
the benchmark can compare them in one process.
"""
import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

REJECTED = 0
FREED = 1
STORED = 2

_CHUNK = 1 << 16


def _env_disabled():
    return os.environ.get("PARTIALCOLOR_DISABLE_NUMBA", "").strip().lower() in {
        "1", "true", "yes", "on",
    }


USE_NUMBA = HAS_NUMBA and not _env_disabled()


# --------------------------------------------------------------------------
# numpy flavour

def filter_sparsify_np(us, vs, deg, free, lists, member, k, fallback, out):
    """Run the filter and the disjoint-list test over a batch of edges.

    ``deg`` and ``free`` are updated in place, ``out`` receives one
    disposition code per edge. ``member[v, c]`` is true iff color ``c``
    occurs in the sampled list of ``v``.
    """
    # The filter is inherently sequential; the list test is not.
    d = deg.tolist()
    passed = np.zeros(us.shape[0], dtype=np.bool_)
    for i, (u, v) in enumerate(zip(us.tolist(), vs.tolist())):
        if d[u] < k or d[v] < k:
            d[u] += 1
            d[v] += 1
            passed[i] = True
    deg[:] = d
    out[:] = REJECTED
    idx = np.flatnonzero(passed)
    if fallback:
        out[idx] = STORED
        return
    n = deg.shape[0]
    for start in range(0, idx.shape[0], _CHUNK):
        sel = idx[start:start + _CHUNK]
        pu = us[sel]
        pv = vs[sel]
        hit = (member[pu] & member[pv]).any(axis=1)
        out[sel] = np.where(hit, STORED, FREED)
        miss = ~hit
        free += np.bincount(pu[miss], minlength=n).astype(free.dtype)
        free += np.bincount(pv[miss], minlength=n).astype(free.dtype)


def peel_np(indptr, indices, n):
    """Minimum-degree peeling, ties to the smallest id.

    Returns ``(order, removal_degree)`` where ``removal_degree[i]`` is the
    degree of ``order[i]`` among the vertices still present when it left.
    """
    deg = np.diff(indptr).astype(np.int64)
    big = np.iinfo(np.int64).max
    removed = np.zeros(n, dtype=np.bool_)
    order = np.empty(n, dtype=np.int64)
    at_removal = np.empty(n, dtype=np.int64)
    for step in range(n):
        v = int(np.argmin(np.where(removed, big, deg)))
        order[step] = v
        at_removal[step] = deg[v]
        removed[v] = True
        deg[indices[indptr[v]:indptr[v + 1]]] -= 1
    return order, at_removal


def count_differing_np(indptr, indices, colors):
    """Per vertex, the number of neighbors whose color differs from its own."""
    n = indptr.shape[0] - 1
    src = np.repeat(np.arange(n), np.diff(indptr))
    diff = colors[src] != colors[indices]
    return np.bincount(src[diff], minlength=n).astype(np.int64)


# --------------------------------------------------------------------------
# numba flavour

if HAS_NUMBA:

    @njit(cache=True)
    def filter_sparsify_nb(us, vs, deg, free, lists, member, k, fallback, out):
        s = lists.shape[1]
        for i in range(us.shape[0]):
            u = us[i]
            v = vs[i]
            if deg[u] >= k and deg[v] >= k:
                out[i] = REJECTED
                continue
            deg[u] += 1
            deg[v] += 1
            if fallback:
                out[i] = STORED
                continue
            hit = False
            for j in range(s):
                if member[v, lists[u, j]]:
                    hit = True
                    break
            if hit:
                out[i] = STORED
            else:
                free[u] += 1
                free[v] += 1
                out[i] = FREED

    @njit(cache=True)
    def peel_nb(indptr, indices, n):
        deg = np.empty(n, dtype=np.int64)
        for v in range(n):
            deg[v] = indptr[v + 1] - indptr[v]
        removed = np.zeros(n, dtype=np.bool_)
        order = np.empty(n, dtype=np.int64)
        at_removal = np.empty(n, dtype=np.int64)
        for step in range(n):
            best = -1
            for v in range(n):
                if not removed[v] and (best < 0 or deg[v] < deg[best]):
                    best = v
            order[step] = best
            at_removal[step] = deg[best]
            removed[best] = True
            for j in range(indptr[best], indptr[best + 1]):
                deg[indices[j]] -= 1
        return order, at_removal

    @njit(cache=True)
    def count_differing_nb(indptr, indices, colors):
        n = indptr.shape[0] - 1
        out = np.zeros(n, dtype=np.int64)
        for v in range(n):
            c = colors[v]
            cnt = 0
            for j in range(indptr[v], indptr[v + 1]):
                if colors[indices[j]] != c:
                    cnt += 1
            out[v] = cnt
        return out

else:  # pragma: no cover
    filter_sparsify_nb = filter_sparsify_np
    peel_nb = peel_np
    count_differing_nb = count_differing_np


IMPLEMENTATIONS = {
    "numpy": {
        "filter_sparsify": filter_sparsify_np,
        "peel": peel_np,
        "count_differing": count_differing_np,
    },
    "numba": {
        "filter_sparsify": filter_sparsify_nb,
        "peel": peel_nb,
        "count_differing": count_differing_nb,
    },
}

BACKEND = "numba" if USE_NUMBA else "numpy"

filter_sparsify = IMPLEMENTATIONS[BACKEND]["filter_sparsify"]
peel = IMPLEMENTATIONS[BACKEND]["peel"]
count_differing = IMPLEMENTATIONS[BACKEND]["count_differing"]
