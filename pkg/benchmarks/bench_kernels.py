"""Compare the numba kernels with the pure-numpy path.

    python3 benchmarks/bench_kernels.py [--n 2000] [--avg-deg 200] [--k 50] [--s 16]
"""
import argparse

from partialcolor.bench import bench_kernels, format_table

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--avg-deg", type=float, default=200)
    ap.add_argument("--k", type=int, default=50)
    ap.add_argument("--s", type=int, default=16)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    print(format_table(bench_kernels(a.n, a.avg_deg, a.k, a.s, a.repeat, a.seed)))
