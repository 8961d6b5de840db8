"""Seeded batches of end-to-end stream runs, each verified against its full input."""
from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from .errors import SolverFailure
from .generators import gen_random_stream
from .graph import Graph, verify_k_partial
from .solver import SolverConfig
from .stream import EngineConfig, run_stream


@dataclass(frozen=True)
class TrialConfig:
    n: int
    k: int
    avg_deg: float
    order: str = "random"
    s: int | None = None
    trials: int = 10
    seed: int = 0
    fallback_threshold: float = 1.0
    solver: SolverConfig = field(default_factory=SolverConfig)
    workers: int | None = None  # None: one per core

    def as_dict(self) -> dict:
        d = asdict(self)
        d["solver"] = asdict(self.solver)
        return d


@dataclass(frozen=True)
class TrialRow:
    seed: int
    success: bool
    colors_used: int
    memory: dict | None
    solver: dict | None
    violations: tuple
    fallback: bool
    error: str | None = None

    def as_dict(self) -> dict:
        d = asdict(self)
        d["violations"] = list(self.violations)
        return d


@dataclass
class TrialReport:
    config: TrialConfig
    rows: list[TrialRow]
    wall_clock_s: float

    @property
    def successes(self) -> int:
        return sum(r.success for r in self.rows)

    @property
    def success_rate(self) -> float:
        return self.successes / len(self.rows) if self.rows else 1.0

    @property
    def max_edges_stored(self) -> int:
        return max((r.memory["edges_stored"] for r in self.rows if r.memory), default=0)

    def aggregate(self) -> dict:
        return {
            "trials": len(self.rows),
            "successes": self.successes,
            "success_rate": self.success_rate,
            "max_edges_stored": self.max_edges_stored,
            "wall_clock_s": self.wall_clock_s,
        }

    def as_result(self) -> dict:
        return {"rows": [r.as_dict() for r in self.rows], "aggregate": self.aggregate()}


def run_one(config: TrialConfig, seed: int) -> TrialRow:
    sf = gen_random_stream(config.n, config.avg_deg, config.k, config.order, seed)
    engine = EngineConfig(
        n=config.n, k=config.k, s=config.s, seed=seed,
        fallback_threshold=config.fallback_threshold, solver=config.solver,
    )
    try:
        run = run_stream(sf.edges, engine)
    except SolverFailure as exc:
        stats = exc.outcome.stats.as_dict() if exc.outcome is not None else None
        return TrialRow(seed, False, 0, None, stats, (), False, str(exc))
    # the full graph is rebuilt here only to check the answer
    full = Graph(sf.n, sf.edges)
    chi = run.coloring
    verdict = verify_k_partial(full, config.k, chi)
    in_palette = chi.palette_size <= config.k + 1
    return TrialRow(
        seed=seed,
        success=bool(verdict) and in_palette,
        colors_used=chi.colors_used,
        memory=run.memory.as_dict(),
        solver=run.solver_stats.as_dict(),
        violations=tuple(verdict.violations[:20]),
        fallback=run.fallback,
        error=None if in_palette else f"palette {chi.palette_size} exceeds k+1",
    )


def _run_star(args):
    return run_one(*args)


def run_trials(config: TrialConfig) -> TrialReport:
    """Trial ``i`` uses seed ``config.seed + i`` for both the graph and the lists."""
    seeds = [config.seed + i for i in range(config.trials)]
    workers = config.workers or os.cpu_count() or 1
    t0 = time.perf_counter()
    if workers > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(seeds))) as pool:
            rows = list(pool.map(_run_star, [(config, s) for s in seeds]))
    else:
        rows = [run_one(config, s) for s in seeds]
    return TrialReport(config, rows, time.perf_counter() - t0)
