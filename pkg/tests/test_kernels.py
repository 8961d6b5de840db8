import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import graphs
from partialcolor import _kernels
from partialcolor.bench import bench_kernels, format_table
from partialcolor.palette import PaletteLists, sample_lists

NP = _kernels.IMPLEMENTATIONS["numpy"]
NB = _kernels.IMPLEMENTATIONS["numba"]

needs_numba = pytest.mark.skipif(not _kernels.HAS_NUMBA, reason="numba not installed")


def run_filter(impl, n, edges, k, lists, fallback):
    arr = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    deg = np.zeros(n, dtype=np.int64)
    free = np.zeros(n, dtype=np.int64)
    out = np.empty(arr.shape[0], dtype=np.int8)
    impl(arr[:, 0].copy(), arr[:, 1].copy(), deg, free, lists.lists, lists.member, k, fallback, out)
    return deg, free, out


@needs_numba
@given(graphs(max_n=20), st.integers(1, 6), st.integers(1, 5), st.booleans(),
       st.randoms(use_true_random=False))
def test_filter_backends_agree(g, k, s, fallback, r):
    edges = list(g.edges)
    r.shuffle(edges)
    lists = sample_lists(g.n, k, s, seed=r.randint(0, 1000))
    a = run_filter(NP["filter_sparsify"], g.n, edges, k, lists, fallback)
    b = run_filter(NB["filter_sparsify"], g.n, edges, k, lists, fallback)
    for x, y in zip(a, b):
        assert np.array_equal(x, y)
    if fallback:
        assert not a[1].any()


@needs_numba
@given(graphs(max_n=20))
def test_peel_backends_agree(g):
    indptr, indices = g.csr
    a = NP["peel"](indptr, indices, g.n)
    b = NB["peel"](indptr, indices, g.n)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


@needs_numba
@given(graphs(max_n=20), st.randoms(use_true_random=False))
def test_count_differing_backends_agree(g, r):
    indptr, indices = g.csr
    colors = np.array([r.randint(1, 3) for _ in range(g.n)], dtype=np.int64)
    a = NP["count_differing"](indptr, indices, colors)
    assert np.array_equal(a, NB["count_differing"](indptr, indices, colors))
    for v in range(g.n):
        assert a[v] == sum(colors[u] != colors[v] for u in g.neighbors(v))


def test_filter_dispositions_by_hand():
    # lists of 0 and 1 are disjoint, 1 and 2 share color 3; the last edge meets two full vertices
    lists = PaletteLists(3, 2, np.array([[1, 2], [3, 4], [3, 1]]))
    for impl in (NP["filter_sparsify"], NB["filter_sparsify"]):
        deg, free, out = run_filter(impl, 3, [(0, 1), (1, 2), (0, 2)], 1, lists, False)
        assert out.tolist() == [_kernels.FREED, _kernels.STORED, _kernels.REJECTED]
        assert deg.tolist() == [1, 2, 1] and free.tolist() == [1, 1, 0]


def backend_in_subprocess(flag):
    env = dict(os.environ)
    env.pop("PARTIALCOLOR_DISABLE_NUMBA", None)
    if flag is not None:
        env["PARTIALCOLOR_DISABLE_NUMBA"] = flag
    code = "from partialcolor import _kernels; print('BACKEND', _kernels.BACKEND)"
    res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True)
    return res.stdout.split()[-1]


@pytest.mark.parametrize("flag", ["1", "true", "YES"])
def test_env_flag_selects_numpy(flag):
    assert backend_in_subprocess(flag) == "numpy"


@needs_numba
@pytest.mark.parametrize("flag", [None, "0", ""])
def test_numba_is_default(flag):
    assert backend_in_subprocess(flag) == "numba"


def test_engine_output_identical_across_backends():
    code = (
        "import hashlib\n"
        "from partialcolor.generators import gen_random_stream\n"
        "from partialcolor.stream import EngineConfig, run_stream\n"
        "sf = gen_random_stream(300, 40, 10, 'random', 2)\n"
        "run = run_stream(sf.edges, EngineConfig(n=300, k=10, s=4, seed=2, fallback_threshold=0))\n"
        "print(hashlib.sha256(run.state.to_bytes()).hexdigest(), run.coloring.as_tuple()[:20])\n"
    )
    outs = set()
    for flag in ("1", "0"):
        env = dict(os.environ, PARTIALCOLOR_DISABLE_NUMBA=flag)
        res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                             text=True, check=True)
        outs.add(res.stdout)
    assert len(outs) == 1


@needs_numba
def test_bench_reports_agreement():
    res = bench_kernels(n=200, avg_deg=20, k=8, s=4, repeat=1)
    assert [r["kernel"] for r in res["kernels"]] == ["filter_sparsify", "peel", "count_differing"]
    assert all(r["agree"] for r in res["kernels"])
    assert all(r["numpy_s"] >= 0 and r["numba_s"] >= 0 for r in res["kernels"])
    assert "filter_sparsify" in format_table(res)
