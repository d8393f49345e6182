"""panelrank: consensus ratings and rankings from incomplete judge evaluations.

A panel of judges scores and ranks overlapping subsets of a set of objects.
This package merges those incomplete, subjectively scaled evaluations into a
consensus rating, a consensus ranking, and a combined rating/ranking pair,
all by exact convex piecewise-linear minimization over the score grid, and
then diagnoses where and why the judges disagree.
"""

from .analysis import (
    INCOMPARABLE,
    PREFERS_FIRST,
    PREFERS_SECOND,
    TIED,
    AdjustedScores,
    ContributionReport,
    PartialOrder,
    adjusted_scores,
    conflict_graph_dot,
    conflict_pairs,
    judge_contributions,
    object_contributions,
    partial_order,
)
from .distance import (
    npck,
    npks,
    ranking_pair_weight,
    rating_pair_weight,
    total_ranking_distance,
    total_rating_distance,
)
from .model import (
    EvaluationError,
    EvaluationSet,
    Finding,
    GapMatrix,
    IncompleteRanking,
    IncompleteRating,
    InstanceTooLargeError,
    JudgeEvaluation,
    ParseError,
    Ranking,
    ScoreScale,
    ValidationReport,
    as_score,
    id_key,
    parse_evaluations,
    rank_from_scores,
    separation_gaps,
    serialize_evaluations,
    sign,
    validate,
)
from .penalty import (
    RANK_TARGET,
    SCORE_TARGET,
    PairPenaltyMap,
    PiecewiseLinearFn,
    build_cat,
    build_ranking_terms,
    build_rating_terms,
    h_penalty,
    pwl_eval,
)
from .solver import (
    ConsensusResult,
    PenaltyDecomposition,
    anchor_to_mean,
    brute_force_oracle,
    cat_solve,
    consensus_ranking_convex,
    consensus_rating,
    exact_npks_consensus_tiny,
    minimize,
)

__version__ = "0.1.0"

__all__ = [
    "AdjustedScores",
    "ConsensusResult",
    "ContributionReport",
    "EvaluationError",
    "EvaluationSet",
    "Finding",
    "GapMatrix",
    "INCOMPARABLE",
    "IncompleteRanking",
    "IncompleteRating",
    "InstanceTooLargeError",
    "JudgeEvaluation",
    "PREFERS_FIRST",
    "PREFERS_SECOND",
    "PairPenaltyMap",
    "ParseError",
    "PartialOrder",
    "PenaltyDecomposition",
    "PiecewiseLinearFn",
    "RANK_TARGET",
    "Ranking",
    "SCORE_TARGET",
    "ScoreScale",
    "TIED",
    "ValidationReport",
    "adjusted_scores",
    "anchor_to_mean",
    "as_score",
    "brute_force_oracle",
    "build_cat",
    "build_ranking_terms",
    "build_rating_terms",
    "cat_solve",
    "conflict_graph_dot",
    "conflict_pairs",
    "consensus_ranking_convex",
    "consensus_rating",
    "exact_npks_consensus_tiny",
    "h_penalty",
    "id_key",
    "judge_contributions",
    "minimize",
    "npck",
    "npks",
    "object_contributions",
    "parse_evaluations",
    "partial_order",
    "pwl_eval",
    "rank_from_scores",
    "ranking_pair_weight",
    "rating_pair_weight",
    "separation_gaps",
    "serialize_evaluations",
    "sign",
    "total_ranking_distance",
    "total_rating_distance",
    "validate",
]
