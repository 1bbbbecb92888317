"""Multi-layer factorized graph matching."""

from ._core import (
    MatchResult,
    Problem,
    SolverConfig,
    accuracy,
    generate_problem,
    load_problem,
    save_problem,
    solve,
    verify,
)

__all__ = [
    "MatchResult",
    "Problem",
    "SolverConfig",
    "accuracy",
    "generate_problem",
    "load_problem",
    "save_problem",
    "solve",
    "verify",
]
