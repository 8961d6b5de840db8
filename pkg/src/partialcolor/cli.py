"""Command-line entry point.

Exit status: 0 on success, 1 when a verification fails (or no coloring was
found), 2 on usage errors and unreadable or malformed input.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .bench import bench_kernels, format_table
from .errors import MalformedInput, PartialColorError, SolverFailure
from .formats import (
    StreamFile, format_coloring, format_index_instance, format_layout, format_stream, make_report,
    parse_coloring, parse_index_instance, read_stream, write_report,
)
from .generators import ORDERS, gen_index_instance, gen_random_stream
from .graph import (
    degeneracy, degeneracy_coloring, greedy_partial_coloring, verify_k_partial, verify_proper,
)
from .lowerbound import (
    DropMatrixEdges, StoreEverything, build_reduction_graph, simulate_protocol,
    verify_gadget_lemmas,
)
from .palette import default_list_size, sample_lists
from .solver import SolverConfig
from .stream import EngineConfig, run_stream
from .trials import TrialConfig, run_trials
from .witness import build_witness, check_witness, color_witness_two_phase

SEED_ENV = "PARTIALCOLOR_SEED"


class UsageError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={raw!r} is not an integer") from None


def _emit(text: str, out: str | None):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _load_stream(args):
    return read_stream(args.stream, strict=args.strict)


def _report(args, command, ok, params, result):
    if getattr(args, "report", None):
        write_report(args.report, make_report(command, ok, params, result))


def _solver_cfg(args) -> SolverConfig:
    return SolverConfig(mode=args.mode, node_limit=args.node_limit, seed=args.seed)


def _say_violations(label, violations, limit=20):
    shown = ", ".join(str(v) for v in violations[:limit])
    more = f" (+{len(violations) - limit} more)" if len(violations) > limit else ""
    print(f"{label}: {len(violations)} violation(s): {shown}{more}")


# --------------------------------------------------------------------------
# subcommands

def cmd_gen_random(args):
    sf = gen_random_stream(args.n, args.avg_deg, args.k, args.order, args.seed)
    _emit(format_stream(sf), args.out)
    _report(args, "gen random", True, vars_of(args), {"n": sf.n, "m": len(sf.edges)})
    return 0


def cmd_gen_index(args):
    inst = gen_index_instance(args.k, args.ell, args.seed, args.g, args.h)
    _emit(format_index_instance(inst), args.out)
    _report(args, "gen index", True, vars_of(args), {"bit": inst.bit})
    return 0


def cmd_run(args):
    if args.trials is not None:
        return _run_trials(args)
    if args.stream is None:
        raise UsageError("run needs a STREAM file, or --trials with --n/--avg-deg/--k")
    sf = _load_stream(args)
    k = args.k if args.k is not None else sf.k
    cfg = EngineConfig(
        n=sf.n, k=k, s=args.s, seed=args.seed, fallback_threshold=args.fallback_threshold,
        solver=_solver_cfg(args), strict=args.strict,
    )
    params = vars_of(args) | {"n": sf.n, "k": k}
    try:
        run = run_stream(sf.edges, cfg)
    except SolverFailure as exc:
        print(f"run: {exc}", file=sys.stderr)
        _report(args, "run", False, params, {"error": str(exc)})
        return 1
    chi = run.coloring
    verdict = verify_k_partial(sf.graph(), k, chi)
    if args.out:
        _emit(format_coloring(chi), args.out)
    if args.state_out:
        Path(args.state_out).write_bytes(run.state.to_bytes())
    result = {
        "memory": run.memory.as_dict(),
        "solver": run.solver_stats.as_dict(),
        "fallback": run.fallback,
        "colors_used": chi.colors_used,
        "violations": list(verdict.violations),
    }
    if args.include_lists:
        result["lists"] = run.state.lists.lists.tolist()
    _report(args, "run", bool(verdict), params, result)
    m = run.memory
    print(f"run: n={sf.n} k={k} s={m.s} fallback={run.fallback} "
          f"seen={m.edges_seen} rejected={m.edges_rejected} freed={m.edges_freed} "
          f"stored={m.edges_stored} colors_used={chi.colors_used}")
    if not verdict:
        _say_violations("verify", verdict.violations)
        return 1
    print("verify: ok")
    return 0


def _run_trials(args):
    missing = [f for f in ("n", "avg_deg", "k") if getattr(args, f) is None]
    if missing:
        raise UsageError("--trials needs " + ", ".join("--" + f.replace("_", "-") for f in missing))
    cfg = TrialConfig(
        n=args.n, k=args.k, avg_deg=args.avg_deg, order=args.order, s=args.s,
        trials=args.trials, seed=args.seed, fallback_threshold=args.fallback_threshold,
        solver=_solver_cfg(args), workers=args.workers,
    )
    rep = run_trials(cfg)
    _report(args, "run", rep.successes == len(rep.rows), cfg.as_dict(), rep.as_result())
    agg = rep.aggregate()
    print(f"trials: {agg['successes']}/{agg['trials']} verified, "
          f"max |E(H)|={agg['max_edges_stored']}, {agg['wall_clock_s']:.1f}s")
    return 0 if agg["successes"] == agg["trials"] else 1


def cmd_baseline(args):
    sf = _load_stream(args)
    g = sf.graph()
    k = args.k if args.k is not None else sf.k
    if args.method == "greedy":
        chi = greedy_partial_coloring(g, k)
        verdict = verify_k_partial(g, k, chi)
    else:
        chi = degeneracy_coloring(g)
        verdict = verify_proper(g, chi)
    if args.out:
        _emit(format_coloring(chi), args.out)
    _report(args, f"baseline {args.method}", bool(verdict), vars_of(args),
            {"palette": chi.palette_size, "colors_used": chi.colors_used,
             "violations": [list(v) if isinstance(v, tuple) else v for v in verdict.violations]})
    print(f"baseline {args.method}: palette={chi.palette_size} colors_used={chi.colors_used}")
    if not verdict:
        _say_violations("verify", verdict.violations)
        return 1
    return 0


def cmd_verify(args):
    sf = _load_stream(args)
    g = sf.graph()
    k = args.k if args.k is not None else sf.k
    chi = parse_coloring(Path(args.coloring).read_text())
    params = vars_of(args) | {"k": k}
    problems = []
    if len(chi) != g.n:
        problems.append(f"coloring covers {len(chi)} vertices, stream has {g.n}")
    elif len(chi) and (chi.colors.min() < 1 or chi.colors.max() > chi.palette_size):
        problems.append(f"colors outside the declared palette [1, {chi.palette_size}]")
    if args.max_colors is not None and chi.palette_size > args.max_colors:
        problems.append(f"palette {chi.palette_size} exceeds --max-colors {args.max_colors}")
    violators = []
    if len(chi) == g.n and not problems:
        violators = list(verify_k_partial(g, k, chi).violations)
    ok = not problems and not violators
    _report(args, "verify", ok, params, {"problems": problems, "violations": violators})
    for p in problems:
        print(f"verify: {p}")
    if violators:
        _say_violations(f"verify (k={k})", violators)
    if ok:
        print(f"verify: ok ({k}-partial, palette {chi.palette_size})")
        return 0
    return 1


def cmd_witness(args):
    sf = _load_stream(args)
    g = sf.graph()
    k = args.k if args.k is not None else sf.k
    w = build_witness(g, k)
    wv = check_witness(w, g)
    result = {"removed_edges": len(w.provenance), "witness_edges": w.base.m,
              "high_degree": len(w.high), "witness_violations": [list(map(str, v)) for v in wv.violations]}
    if args.method == "degeneracy":
        chi = degeneracy_coloring(w.base)
        result["degeneracy"] = degeneracy(w.base)
    else:
        s = args.s if args.s is not None else default_list_size(g.n, k, cap=False)
        lists = sample_lists(g.n, k, s, args.seed)
        chi, trace = color_witness_two_phase(w, lists, args.s1, _solver_cfg(args))
        result |= {"s": s, "outcome": trace.outcome, "phase2_nodes": trace.nodes}
        if chi is None:
            _report(args, "witness", False, vars_of(args), result)
            print(f"witness: two-phase coloring failed ({trace.outcome})")
            return 1
    proper = verify_proper(w.base, chi)
    lifted = verify_k_partial(g, k, chi)
    ok = bool(wv) and bool(proper) and bool(lifted)
    result |= {"palette": chi.palette_size, "proper_on_witness": bool(proper),
               "k_partial_on_source": bool(lifted)}
    if args.out:
        _emit(format_coloring(chi), args.out)
    _report(args, "witness", ok, vars_of(args), result)
    print(f"witness: removed {len(w.provenance)} edges, {len(w.high)} high-degree vertices; "
          f"proper={bool(proper)} k-partial on source={bool(lifted)}")
    if not wv:
        _say_violations("witness check", wv.violations)
    return 0 if ok else 1


def cmd_bench(args):
    res = bench_kernels(args.n, args.avg_deg, args.k, args.s or 16, args.repeat, args.seed)
    print(format_table(res))
    ok = all(r["agree"] for r in res["kernels"])
    _report(args, "bench", ok, vars_of(args), res)
    return 0 if ok else 1


def _index_instance(args):
    if args.instance:
        return parse_index_instance(Path(args.instance).read_text())
    if args.k is None:
        raise UsageError("give --instance FILE or --k (with optional --ell, --g, --h)")
    ell = args.ell if args.ell is not None else args.k * args.k
    return gen_index_instance(args.k, ell, args.seed, args.g or 1, args.h or 1)


def cmd_lb_sim(args):
    base = _index_instance(args)
    algo = DropMatrixEdges() if args.broken else StoreEverything(args.node_limit)
    if args.all:
        pairs = [(g, h) for g in range(1, base.k) for h in range(1, base.ell + 1)]
    else:
        pairs = [(base.g, base.h)]
    rows = []
    for g, h in pairs:
        tr = simulate_protocol(base.at(g, h), algo)
        rows.append(asdict(tr) | {"correct": tr.correct})
        print(f"g={g} h={h} bit={tr.truth_bit} decoded={tr.decoded_bit} "
              f"verified={tr.verified} state_bytes={tr.state_bytes}"
              + (f" error={tr.error}" if tr.error else ""))
    ok = all(r["correct"] and r["verified"] for r in rows)
    print(f"lb sim: {sum(r['correct'] for r in rows)}/{len(rows)} decoded correctly")
    _report(args, "lb sim", ok, vars_of(args), {"transcripts": rows})
    return 0 if ok else 1


def cmd_lb_gadgets(args):
    reports = verify_gadget_lemmas(args.k, args.method, args.samples, seed=args.seed)
    print(f"{'gadget':<16} {'k':>3} {'method':<16} {'colorings':>10} {'counterexamples':>16} verdict")
    for r in reports:
        print(f"{r.kind:<16} {r.k:>3} {r.method:<16} {r.colorings:>10} "
              f"{len(r.counterexamples):>16} {'ok' if r.ok else 'FAIL'}")
    ok = all(r.ok for r in reports)
    _report(args, "lb verify-gadgets", ok, vars_of(args),
            {"gadgets": [asdict(r) | {"ok": r.ok} for r in reports]})
    return 0 if ok else 1


def cmd_lb_build(args):
    inst = _index_instance(args)
    G, layout = build_reduction_graph(inst)
    _emit(format_stream(StreamFile(G.n, inst.k, G.sorted_edges())), args.out)
    if args.layout:
        Path(args.layout).write_text(format_layout(layout.roles()))
    _report(args, "lb build", True, vars_of(args), {"n": G.n, "m": G.m})
    return 0


# --------------------------------------------------------------------------
# parser

def vars_of(args) -> dict:
    skip = {"func", "report"}
    return {k: v for k, v in vars(args).items() if k not in skip and not callable(v)}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser(seed_default: int = 0) -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", metavar="OUT.json", help="write a machine-readable report")
    common.add_argument("--seed", type=int, default=seed_default,
                        help=f"root seed (default from ${SEED_ENV}, else 0)")
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--strict", dest="strict", action="store_true", default=True,
                      help="reject duplicate edges and self-loops (default)")
    mode.add_argument("--lenient", dest="strict", action="store_false",
                      help="drop duplicate edges and self-loops")

    solver = argparse.ArgumentParser(add_help=False)
    solver.add_argument("--mode", choices=("auto", "exact", "heuristic"), default="auto")
    solver.add_argument("--node-limit", type=int, default=1_000_000)

    p = _Parser(prog="partialcolor", description="k-partial coloring in one stream pass")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen", help="generate instances")
    gsub = gen.add_subparsers(dest="what", required=True, parser_class=_Parser)
    g = gsub.add_parser("random", parents=[common], help="random edge stream")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--avg-deg", type=float, required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--order", choices=ORDERS, default="random")
    g.add_argument("-o", "--out")
    g.set_defaults(func=cmd_gen_random)
    g = gsub.add_parser("index", parents=[common], help="random INDEX instance")
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--ell", type=int, required=True)
    g.add_argument("--g", type=int, default=1)
    g.add_argument("--h", type=int, default=1)
    g.add_argument("-o", "--out")
    g.set_defaults(func=cmd_gen_index)

    r = sub.add_parser("run", parents=[common, solver], help="stream a graph and color it")
    r.add_argument("stream", nargs="?")
    r.add_argument("--k", type=int, help="override the header's k")
    r.add_argument("--s", type=int, help="list size (default min(k+1, ceil(2 log2(n)^2)))")
    r.add_argument("--fallback-threshold", type=float, default=1.0)
    r.add_argument("-o", "--out", help="coloring output file")
    r.add_argument("--state-out", help="write the final engine state here")
    r.add_argument("--include-lists", action="store_true", help="put the sampled lists in the report")
    r.add_argument("--trials", type=int, help="run seeded random trials instead of a file")
    r.add_argument("--n", type=int)
    r.add_argument("--avg-deg", type=float)
    r.add_argument("--order", choices=ORDERS, default="random")
    r.add_argument("--workers", type=int, help="trial processes (default: all cores)")
    r.set_defaults(func=cmd_run)

    b = sub.add_parser("baseline", parents=[common], help="offline baseline colorings")
    b.add_argument("method", choices=("greedy", "degeneracy"))
    b.add_argument("stream")
    b.add_argument("--k", type=int)
    b.add_argument("-o", "--out")
    b.set_defaults(func=cmd_baseline)

    v = sub.add_parser("verify", parents=[common], help="check a coloring against a stream")
    v.add_argument("stream")
    v.add_argument("coloring")
    v.add_argument("--k", type=int)
    v.add_argument("--max-colors", type=int)
    v.set_defaults(func=cmd_verify)

    w = sub.add_parser("witness", parents=[common, solver], help="witness subgraph and its coloring")
    w.add_argument("stream")
    w.add_argument("--k", type=int)
    w.add_argument("--method", choices=("two-phase", "degeneracy"), default="two-phase")
    w.add_argument("--s", type=int, help="list size (default ceil(2 log2(n)^2))")
    w.add_argument("--s1", type=int, help="first-part length (default ceil(s/4))")
    w.add_argument("-o", "--out")
    w.set_defaults(func=cmd_witness, mode="exact")

    bn = sub.add_parser("bench", parents=[common], help="numba vs numpy kernel timings")
    bn.add_argument("--n", type=int, default=2000)
    bn.add_argument("--avg-deg", type=float, default=200)
    bn.add_argument("--k", type=int, default=50)
    bn.add_argument("--s", type=int, default=16)
    bn.add_argument("--repeat", type=int, default=3)
    bn.set_defaults(func=cmd_bench)

    lb = sub.add_parser("lb", help="lower-bound lab")
    lsub = lb.add_subparsers(dest="what", required=True, parser_class=_Parser)
    inst = argparse.ArgumentParser(add_help=False)
    inst.add_argument("--instance", help="INDEX instance file")
    inst.add_argument("--k", type=int)
    inst.add_argument("--ell", type=int, help="columns (default k^2)")
    inst.add_argument("--g", type=int)
    inst.add_argument("--h", type=int)
    s = lsub.add_parser("sim", parents=[common, inst], help="simulate the one-way protocol")
    s.add_argument("--all", action="store_true", help="every (g, h) pair")
    s.add_argument("--broken", action="store_true", help="use an algorithm that forgets matrix edges")
    s.add_argument("--node-limit", type=int, default=2_000_000)
    s.set_defaults(func=cmd_lb_sim)
    s = lsub.add_parser("verify-gadgets", parents=[common], help="check the gadget lemmas")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--method", choices=("auto", "enumeration", "solver-sampling"), default="auto")
    s.add_argument("--samples", type=int, default=500)
    s.set_defaults(func=cmd_lb_gadgets)
    s = lsub.add_parser("build", parents=[common, inst], help="export a reduction graph")
    s.add_argument("-o", "--out")
    s.add_argument("--layout", help="role/range sidecar file")
    s.set_defaults(func=cmd_lb_build)
    return p


def main(argv=None) -> int:
    try:
        parser = build_parser(_default_seed())
    except UsageError as exc:
        print(f"partialcolor: error: {exc}", file=sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"partialcolor: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, MalformedInput, PartialColorError, ValueError) as exc:
        print(f"partialcolor: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
