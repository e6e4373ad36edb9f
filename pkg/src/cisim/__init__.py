"""Cost-aware collective inference over networked Gaussian sensors.

A set of sensors shares one hidden class. Each sensor can answer from its
own reading, buy a peer's reading when that is likely to settle the class,
or push its reading to the cloud; the group answers by plurality with the
cloud voting once for everything it received. The package provides exact
and sampled valuations of a peer's unseen reading, the per-sensor policy,
Monte Carlo and closed-form evaluations, and cloud / independent /
hindsight-optimal baselines, all reproducible from a single seed.
"""

from ._backend import backend_name
from .bayes import class_likelihood, joint_posterior, posterior
from .analytic import ActionMap, AnalyticReport, analytic_metrics, build_action_map
from .baselines import (
    GlobalAssignment,
    SolverLimitError,
    cloud_round,
    global_optimal_round,
    independent_round,
)
from .experiments import ExperimentSpec, run_point, run_spec
from .policy import (
    Action,
    Direct,
    Offload,
    PolicyConfig,
    Request,
    decide,
    evaluate_request,
    expected_request_cost,
    request_fires,
)
from .simulate import (
    GlobalReport,
    RoundOutcome,
    SimulationReport,
    run_framework_round,
    run_global_trials,
    run_trials,
    sample_round,
)
from .valuation import (
    EstimatorFailure,
    SuccessEstimate,
    best_peer,
    success_prob_exact,
    success_prob_heuristic,
    success_prob_sampled,
    success_probability,
)
from .world import CostModel, ValidationError, WorldModel

__version__ = "0.1.0"

__all__ = [
    "ActionMap",
    "Action",
    "AnalyticReport",
    "CostModel",
    "Direct",
    "EstimatorFailure",
    "ExperimentSpec",
    "GlobalAssignment",
    "GlobalReport",
    "Offload",
    "PolicyConfig",
    "Request",
    "RoundOutcome",
    "SimulationReport",
    "SolverLimitError",
    "SuccessEstimate",
    "ValidationError",
    "WorldModel",
    "analytic_metrics",
    "backend_name",
    "best_peer",
    "build_action_map",
    "class_likelihood",
    "cloud_round",
    "decide",
    "evaluate_request",
    "expected_request_cost",
    "global_optimal_round",
    "independent_round",
    "joint_posterior",
    "posterior",
    "request_fires",
    "run_framework_round",
    "run_global_trials",
    "run_point",
    "run_spec",
    "run_trials",
    "sample_round",
    "success_prob_exact",
    "success_prob_heuristic",
    "success_prob_sampled",
    "success_probability",
    "__version__",
]
