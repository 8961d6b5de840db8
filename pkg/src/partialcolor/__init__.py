"""One-pass semi-streaming k-partial (k+1)-coloring, with offline baselines,
an exact demand-coloring solver and a lab for the INDEX lower-bound reduction."""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .errors import (
    BudgetExceeded, InvalidColoring, InvalidParameters, InvalidSplit, MalformedColoring,
    MalformedEdge, MalformedInput, MalformedInstance, ParseError, PartialColorError,
    SolverFailure, UndefinedGadget,
)
from .graph import (
    Coloring, DegeneracyOrder, Graph, Verdict, degeneracy, degeneracy_coloring, degeneracy_order,
    greedy_partial_coloring, verify_k_partial, verify_proper,
)
from .palette import PaletteLists, default_list_size, lists_intersect, sample_lists, split_list
from .solver import (
    DemandInstance, SolveOutcome, SolverConfig, enumerate_k_partial, k_partial_instance, solve,
    solve_oracle_check,
)
from .stream import Disposition, EngineConfig, MemoryReport, StreamState, run_stream
from .witness import WitnessGraph, build_witness, check_witness, color_witness_two_phase

__all__ = [name for name in dir() if not name.startswith("_")]
