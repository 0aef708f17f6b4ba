"""Inexact-restoration sample size selection for nonsmooth stochastic optimization."""

from .bench import RunSpec, run_fbfgs, run_hbfgs, run_irbfgs, run_suite
from .bfgs import QuasiNewtonState, descent_check, direction, update
from .estimator import IRBFGSClassifier
from .merit import InfeasibilityRule, InvariantViolation, h, merit, penalty_update
from .problems import (HingeDataset, HingeProblem, SlcpInstance, SlcpProblem, generate_slcp,
                       make_separable_hinge, parse_sparse_dataset, write_sparse_dataset)
from .sampling import (FevCounter, FiniteSampleSet, Problem, SampleExhaustedError, SampleSet,
                       directional_sup, saa_subgradient, saa_value)
from .solver import (BetaViolation, LineSearchError, SolverConfig, TraceRecord, restoration,
                     solve, trial_sample_size)

__version__ = "0.1.0"

__all__ = [
    "RunSpec", "run_fbfgs", "run_hbfgs", "run_irbfgs", "run_suite", "QuasiNewtonState",
    "descent_check", "direction", "update", "IRBFGSClassifier", "InfeasibilityRule",
    "InvariantViolation", "h", "merit", "penalty_update", "HingeDataset", "HingeProblem",
    "SlcpInstance", "SlcpProblem", "generate_slcp", "make_separable_hinge",
    "parse_sparse_dataset", "write_sparse_dataset", "FevCounter", "FiniteSampleSet", "Problem",
    "SampleExhaustedError", "SampleSet", "directional_sup", "saa_subgradient", "saa_value",
    "BetaViolation", "LineSearchError", "SolverConfig", "TraceRecord", "restoration", "solve",
    "trial_sample_size",
]
