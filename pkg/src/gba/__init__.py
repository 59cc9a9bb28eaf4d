"""Sequential category prediction by Blackwell approachability.

The running mean of (category frequencies, hit rate) is embedded as a
point of a prism in R^d; a randomized prediction rule built from
closed-form hull intersections drives that point to the region where
the hit rate dominates every frequency.  The package provides the
geometry, the rule, a sequential predictor, a repeated-game view with
a separation certificate, adversaries, and a compiled simulation
harness with a CLI.
"""

from .geometry import DEFAULT_TOL, GeometryDegenerate, GeometryError, NotInHull, Tolerance
from .prism import (
    MAX_CATEGORIES,
    MeanState,
    NotInPrism,
    classify,
    hyperplanes,
    in_target,
    point_to_state,
    project_to_target,
    Region,
    shortfall,
    side_values,
    state_to_point,
)
from .rule import (
    AuxiliaryPoint,
    Partition,
    auxiliary_point,
    auxiliary_projection,
    auxiliary_residual,
    classic_blackwell2,
    partition,
    randomize,
)
from .predictor import PredictorState, Prediction, StepRecord, init, observe, predict, state_point
from .adversaries import AdversarySpec, make_adversary, uniform_iid
from .approachability import (
    GameTranscript,
    PayoffMatrix,
    RulePlayer,
    SeparationReport,
    check_separation,
    mixed_payoff_vertices,
    prediction_payoff_matrix,
    run_game,
)
from .harness import (
    ExperimentConfig,
    RunSummary,
    VerificationReport,
    load_config,
    run_experiment,
    verify_geometry,
)

__version__ = "0.1.0"

__all__ = [
    "AdversarySpec",
    "AuxiliaryPoint",
    "DEFAULT_TOL",
    "ExperimentConfig",
    "GameTranscript",
    "GeometryDegenerate",
    "GeometryError",
    "MAX_CATEGORIES",
    "MeanState",
    "NotInHull",
    "NotInPrism",
    "Partition",
    "PayoffMatrix",
    "Prediction",
    "PredictorState",
    "Region",
    "RulePlayer",
    "RunSummary",
    "SeparationReport",
    "StepRecord",
    "Tolerance",
    "VerificationReport",
    "auxiliary_point",
    "auxiliary_projection",
    "auxiliary_residual",
    "check_separation",
    "classic_blackwell2",
    "classify",
    "hyperplanes",
    "in_target",
    "init",
    "load_config",
    "make_adversary",
    "mixed_payoff_vertices",
    "observe",
    "partition",
    "point_to_state",
    "predict",
    "prediction_payoff_matrix",
    "project_to_target",
    "randomize",
    "run_experiment",
    "run_game",
    "shortfall",
    "side_values",
    "state_point",
    "state_to_point",
    "uniform_iid",
    "verify_geometry",
]
