"""Normalized distances between incomplete evaluations.

Two metrics, one per evaluation currency:

* :func:`npck` (normalized projected Cook-Kress) compares two incomplete
  ratings through the pairwise score gaps they imply, so it is insensitive
  to each rater's private choice of offset.
* :func:`npks` (normalized projected Kemeny-Snell) compares two incomplete
  rankings by counting rank reversals, a tie against a non-tie counting as
  half a reversal.

Both are symmetric, live in [0, 1], and look only at objects the two sides
have in common. With fewer than two common objects there is no pairwise
information and the distance is 0 by convention; this is also what makes a
single-object rating contribute nothing to any aggregate objective.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .model import (
    EvaluationSet,
    IncompleteRanking,
    IncompleteRating,
    Ranking,
    ScoreScale,
    as_score,
    id_key,
    sign,
)


def rating_pair_weight(common: int, span: Fraction) -> Fraction:
    """Normalizer for gap disagreement over ``common`` shared objects.

    Equal to 1 / (4 * span * ceil(common/2) * floor(common/2)), the inverse
    of the largest gap disagreement two ratings on a scale of width ``span``
    can reach, summed over ordered pairs. Requires ``common >= 2``.
    """
    if common < 2:
        raise ValueError(f"no pairwise normalizer for {common} common object(s)")
    return Fraction(1, 4 * ((common + 1) // 2) * (common // 2)) / span


def ranking_pair_weight(common: int) -> Fraction:
    """Normalizer for rank reversals over ``common`` shared objects.

    Equal to 1 / (common^2 - common), the inverse of the reversal count of
    two fully opposed strict orders summed over ordered pairs. Requires
    ``common >= 2``.
    """
    if common < 2:
        raise ValueError(f"no pairwise normalizer for {common} common object(s)")
    return Fraction(1, common * common - common)


def npck(a1: IncompleteRating, a2: IncompleteRating, scale: ScoreScale) -> Fraction:
    """Normalized projected Cook-Kress distance between two incomplete ratings.

    Sums |gap1(i,j) - gap2(i,j)| over ordered pairs of commonly rated
    objects, scaled so the result lies in [0, 1]. 0 means the two ratings
    imply identical preferences on the shared objects; 1 is maximal
    disagreement.
    """
    common = sorted(a1.support & a2.support, key=id_key)
    if len(common) < 2:
        return Fraction(0)
    total = Fraction(0)
    for i in common:
        for j in common:
            if i == j:
                continue
            gap1 = a1.scores[i] - a1.scores[j]
            gap2 = a2.scores[i] - a2.scores[j]
            total += abs(gap1 - gap2)
    distance = total * rating_pair_weight(len(common), scale.span)
    assert 0 <= distance <= 1, f"npck normalizer violated: {distance}"
    return distance


def npks(b1: IncompleteRanking, b2: IncompleteRanking) -> Fraction:
    """Normalized projected Kemeny-Snell distance between two incomplete rankings.

    Counts rank reversals over commonly ranked objects (half for a tie
    against a non-tie), scaled so the result lies in [0, 1].
    """
    common = sorted(b1.support & b2.support, key=id_key)
    if len(common) < 2:
        return Fraction(0)
    reversals = Fraction(0)
    for i in common:
        for j in common:
            if i == j:
                continue
            s1 = sign(b1.ranks[i] - b1.ranks[j])
            s2 = sign(b2.ranks[i] - b2.ranks[j])
            reversals += Fraction(abs(s1 - s2), 2)
    distance = reversals * ranking_pair_weight(len(common))
    assert 0 <= distance <= 1, f"npks normalizer violated: {distance}"
    return distance


def total_rating_distance(evals: EvaluationSet, scores: Mapping) -> Fraction:
    """Sum of npck distances from a complete score vector to every judge's rating.

    ``scores`` must cover the whole ground set; each judge is then compared
    on exactly their own rated objects.
    """
    complete = {obj: as_score(scores[obj]) for obj in evals.objects}
    aggregate = IncompleteRating("aggregate", complete)
    total = Fraction(0)
    for evaluation in evals.judges:
        if evaluation.rating is not None:
            total += npck(evaluation.rating, aggregate, evals.scale)
    return total


def total_ranking_distance(evals: EvaluationSet, ranking: Ranking) -> Fraction:
    """Sum of npks distances from a complete ranking to every judge's ranking."""
    missing = set(evals.objects) - ranking.objects
    if missing:
        raise ValueError(f"ranking does not cover: {sorted(missing, key=id_key)}")
    aggregate = ranking.as_incomplete()
    total = Fraction(0)
    for evaluation in evals.judges:
        if evaluation.ranking is not None:
            total += npks(evaluation.ranking, aggregate)
    return total
