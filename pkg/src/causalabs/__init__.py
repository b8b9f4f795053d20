"""Discrete causal models, abstractions between them and measures of their error."""
from .abstraction import (
    Abstraction,
    AbstractionError,
    alpha_for_set,
    compose_abstractions,
    identity_abstraction,
    is_order_preserving,
    load_abstraction,
    pseudo_inverse,
    save_abstraction,
    validate_abstraction,
)
from .engine import (
    Intervention,
    SeverabilityError,
    forward_sample,
    hybrid_sample,
    intervene,
    interventional_matrix,
    pullback_intervention_sample,
)
from .learner import CandidateSpace, LearnResult, default_candidate_space, enumerate_surjections, learn
from .measures import (
    Aggregator,
    AssessmentKind,
    AssessmentSet,
    ErrorReport,
    MeasureKind,
    build_assessment_set,
    error_wrt_intervention,
    jsd,
    matrix_distance,
    overall_error,
)
from .scm import (
    CycleError,
    Scm,
    ScmError,
    StochasticMatrix,
    Variable,
    joint_distribution,
    load_scm,
    save_scm,
    topological_order,
    validate_scm,
)

__version__ = "0.1.0"

__all__ = [
    "Abstraction",
    "AbstractionError",
    "Aggregator",
    "AssessmentKind",
    "AssessmentSet",
    "CandidateSpace",
    "CycleError",
    "ErrorReport",
    "Intervention",
    "LearnResult",
    "MeasureKind",
    "Scm",
    "ScmError",
    "SeverabilityError",
    "StochasticMatrix",
    "Variable",
    "alpha_for_set",
    "build_assessment_set",
    "compose_abstractions",
    "default_candidate_space",
    "enumerate_surjections",
    "error_wrt_intervention",
    "forward_sample",
    "hybrid_sample",
    "identity_abstraction",
    "intervene",
    "interventional_matrix",
    "is_order_preserving",
    "joint_distribution",
    "jsd",
    "learn",
    "load_abstraction",
    "load_scm",
    "matrix_distance",
    "overall_error",
    "pseudo_inverse",
    "pullback_intervention_sample",
    "save_abstraction",
    "save_scm",
    "topological_order",
    "validate_abstraction",
    "validate_scm",
]
