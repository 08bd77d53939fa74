"""staleobs: keep personal records honest with a causal Bayesian network.

Detects stored observations that a newly acquired certain observation
contradicts, presents them as an AND-OR tree of certainly / possibly obsolete
entries, recommends prioritised removals with most-likely replacement values,
and predicts missing attributes on demand.
"""

from .detection import (
    AndOrTree,
    DependencyGroup,
    DetectionError,
    NewObservation,
    Observation,
    ObservationSet,
    build_tree,
    decompose,
    detect,
    is_contradictory,
    oida,
    render_tree,
    restrict,
    DEFAULT_EPSILON,
)
from .inference import (
    ImpossibleEvidenceError,
    InferenceError,
    d_separated,
    evidence_probability,
    joint_probability,
    posterior,
    prob_of,
)
from .modeltools import (
    IntervalScheme,
    ValidationReport,
    equal_frequency_discretize,
    validate_network,
)
from .network import (
    Cpt,
    DEFAULT_CLAMP_FLOOR,
    Evidence,
    Network,
    NetworkError,
    NetworkFormatError,
    NetworkValidationError,
    UnknownStateError,
    UnknownVariableError,
    Variable,
    clamp_cpt,
    dump_network,
    load_network,
)
from .recommend import (
    Prediction,
    RecommendationGroup,
    RecommendationLeaf,
    RecommendationTree,
    most_likely_value,
    oora,
    posterior_proba,
    predict,
    recommend,
    render_recommendation_tree,
)
from .evaluation import (
    ContingencyTable,
    EvaluationError,
    Formula,
    FormulaGroup,
    FormulaMatchReport,
    RankAssignment,
    calibrate_threshold,
    compare_formulas,
    dump_formula,
    evaluate,
    parse_formula,
    rank_or_sets,
    spearman,
    tree_to_formula,
)
from .scenarios import (
    LabeledScenario,
    Scenario,
    ScenarioError,
    dump_scenarios,
    generate_labeled_scenarios,
    generate_scenarios,
    load_scenarios,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
