"""Linear programming and min-cost flow kernels."""

from .flow import FlowNetwork, FlowResult, min_cost_flow
from .simplex import LPProblem, LPSolution, rational_mode_requested, solve_lp

__all__ = [
    "FlowNetwork",
    "FlowResult",
    "LPProblem",
    "LPSolution",
    "min_cost_flow",
    "rational_mode_requested",
    "solve_lp",
]
