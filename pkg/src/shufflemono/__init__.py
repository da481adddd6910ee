"""Query-efficient learners for shuffled monotone labelings and
bounded-direction halfspaces."""

from .approx import (
    ApproxParams,
    eps_exact_learn,
    random_binary_search,
    realizable_learn,
    tolerant_learn,
)
from .estimators import AxisAlignedTransformer, HalfspaceQueryLearner
from .exact import (
    NotRealizableError,
    baseline_learn,
    contender,
    learn_hypothesis,
    query_budget,
    remove_or_reduce,
    shuffled_monotone_learn,
)
from .generators import (
    GeneratedInstance,
    corrupt_labels,
    gen_circle_instance,
    gen_depth_two_hard,
    gen_random_shuffled,
    gen_star_instance,
)
from .instance import (
    DirectionSet,
    GeometricHypothesis,
    LabelOracle,
    PlantedTruth,
    PointSet,
    ShuffledInstance,
    ThresholdHypothesis,
    project_to_instance,
    reduce_to_axis_aligned,
    restrict,
)
from .verify import (
    consistent_hypotheses,
    exhaustive_verify_exact,
    is_monotone_under,
    monotone_distance,
    verify_star_condition,
)

__version__ = "0.1.0"

__all__ = [
    "ApproxParams",
    "AxisAlignedTransformer",
    "DirectionSet",
    "GeneratedInstance",
    "GeometricHypothesis",
    "HalfspaceQueryLearner",
    "LabelOracle",
    "NotRealizableError",
    "PlantedTruth",
    "PointSet",
    "ShuffledInstance",
    "ThresholdHypothesis",
    "baseline_learn",
    "consistent_hypotheses",
    "contender",
    "corrupt_labels",
    "eps_exact_learn",
    "exhaustive_verify_exact",
    "gen_circle_instance",
    "gen_depth_two_hard",
    "gen_random_shuffled",
    "gen_star_instance",
    "is_monotone_under",
    "learn_hypothesis",
    "monotone_distance",
    "project_to_instance",
    "query_budget",
    "random_binary_search",
    "realizable_learn",
    "reduce_to_axis_aligned",
    "remove_or_reduce",
    "restrict",
    "shuffled_monotone_learn",
    "tolerant_learn",
    "verify_star_condition",
]
