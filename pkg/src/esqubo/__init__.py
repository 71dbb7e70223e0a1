"""Expected-Shortfall-targeted asset allocation through binary quadratic (QUBO) models."""

from .allocator import AllocationRecord, AllocatorConfig, IterationTrace, SolverSettings, allocate_series, allocate_window
from .encoding import Encoding, decode, encode_nearest
from .market_data import ReturnsPanel, WindowSpec, WindowStats, load_returns, window_stats, windows
from .qubo import QuboProblem, build, default_penalties, energy
from .risk import RiskConfig, converged, es_target, expected_shortfall, value_at_risk
from .solver import BitSolution, SolveRequest, solve, solve_annealing, solve_exhaustive

__version__ = "0.1.0"
