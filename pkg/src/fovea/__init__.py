"""Decision-theoretic display management for time-critical monitoring.

The engine decides, frame by frame, which evidence a human operator should
see: it runs exact Bayesian inference over fault hypotheses, scores candidate
reveals by their effect on the expected utility of the operator's action
(including review-time costs and models of operator expertise), and emits
semantic display directives (detail levels, auxiliary clusters, highlights,
ranked fault/action lists) that a console renders.
"""

from .bayesnet import (
    Cpt,
    Distribution,
    Evidence,
    Network,
    PruneSpec,
    Variable,
    enumerate_posterior,
    posterior,
    prior,
    prune_network,
    validate_network,
)
from .decision import (
    ActionDef,
    DecisionModel,
    TimedUtility,
    display_conditioned_action,
    evaluate_under_gold,
    expected_utility,
    gold_standard_action,
    hypothesis_posterior,
)
from .errors import (
    EngineError,
    InconsistentEvidenceError,
    ModelFormatError,
    StateSpaceTooLargeError,
)
from .metrics import (
    MetricConfig,
    MetricResult,
    ReviewTimeModel,
    ZERO_DELAY,
    best_reveal_subset,
    evdi,
    evri,
    nevri,
    review_time,
)
from .policy import (
    Context,
    DisplayState,
    EvidencePartition,
    Template,
    compose_display,
    decide_auxiliary,
    highlight,
    minimal_consistent_set,
    rank_actions,
    rank_faults,
    telescope_levels,
)
from .simulator import (
    EpisodeResult,
    FailureMode,
    PhaseSpan,
    PolicyConfig,
    Scenario,
    SensorSpec,
    SimulatedOperator,
    TelemetryFrame,
    evaluate_policies,
    run_episode,
    step,
)
from .user_model import (
    ActionMapping,
    UserBeliefModel,
    UserResponseModel,
    build_pruned_user_model,
    gold_as_user,
    user_action_distribution,
    user_belief,
)

__version__ = "0.1.0"

__all__ = [
    "ActionDef",
    "ActionMapping",
    "Context",
    "Cpt",
    "DecisionModel",
    "DisplayState",
    "Distribution",
    "EngineError",
    "EpisodeResult",
    "Evidence",
    "EvidencePartition",
    "FailureMode",
    "InconsistentEvidenceError",
    "MetricConfig",
    "MetricResult",
    "ModelFormatError",
    "Network",
    "PhaseSpan",
    "PolicyConfig",
    "PruneSpec",
    "ReviewTimeModel",
    "Scenario",
    "SensorSpec",
    "SimulatedOperator",
    "StateSpaceTooLargeError",
    "TelemetryFrame",
    "Template",
    "TimedUtility",
    "UserBeliefModel",
    "UserResponseModel",
    "Variable",
    "ZERO_DELAY",
    "best_reveal_subset",
    "build_pruned_user_model",
    "compose_display",
    "decide_auxiliary",
    "display_conditioned_action",
    "enumerate_posterior",
    "evaluate_policies",
    "evaluate_under_gold",
    "evdi",
    "evri",
    "expected_utility",
    "gold_as_user",
    "gold_standard_action",
    "highlight",
    "hypothesis_posterior",
    "minimal_consistent_set",
    "nevri",
    "posterior",
    "prior",
    "prune_network",
    "rank_actions",
    "rank_faults",
    "review_time",
    "run_episode",
    "step",
    "telescope_levels",
    "user_action_distribution",
    "user_belief",
    "validate_network",
]
