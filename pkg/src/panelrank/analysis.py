"""Disagreement diagnostics around a solved consensus.

Given an aggregate score vector, the separation penalty decomposes cleanly:
per judge, how far their implied pairwise gaps sit from the aggregate's
(:func:`judge_contributions`), and per object, how divergent the
evaluations it received were (:func:`object_contributions`). High
contributors are the evaluations worth a second look; acting on them is
left to whoever runs the process.

Two further lenses: :func:`adjusted_scores` divides each raw score by its
judge's mean score, exposing lenient and strict raters on a common footing,
and :func:`partial_order` labels every object pair by whether the consensus
rating and the consensus ranking agree on it, disagreements forming a
conflict graph (:func:`conflict_graph_dot`).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .distance import rating_pair_weight
from .model import EvaluationSet, as_score, id_key, sign
from .solver import ConsensusResult

PREFERS_FIRST = "P_ab"
PREFERS_SECOND = "P_ba"
TIED = "T"
INCOMPARABLE = "I"


@dataclass(frozen=True)
class ContributionReport:
    """Nonnegative penalty shares keyed by judge or object."""

    per_judge: dict
    per_object: dict

    def top_judges(self) -> list:
        return sorted(self.per_judge.items(), key=lambda kv: (-kv[1], id_key(kv[0])))

    def top_objects(self) -> list:
        return sorted(self.per_object.items(), key=lambda kv: (-kv[1], id_key(kv[0])))


def _judge_separation(evaluation, x: Mapping, span: Fraction) -> Fraction:
    rating = evaluation.rating
    if rating is None or len(rating.support) < 2:
        return Fraction(0)
    weight = rating_pair_weight(len(rating.support), span)
    support = sorted(rating.support, key=id_key)
    total = Fraction(0)
    for i in support:
        for j in support:
            if i != j:
                total += abs((x[i] - x[j]) - (rating.scores[i] - rating.scores[j]))
    return total * weight


def judge_contributions(evals: EvaluationSet, scores: Mapping) -> ContributionReport:
    """Each judge's share of the rating-separation penalty at ``scores``.

    The shares sum exactly to the rating-separation part of the objective at
    that vector. ``per_object`` is filled with the matching object view (see
    :func:`object_contributions`).
    """
    x = {obj: as_score(scores[obj]) for obj in evals.objects}
    per_judge = {
        evaluation.judge: _judge_separation(evaluation, x, evals.scale.span)
        for evaluation in evals.judges
    }
    per_object = _object_separation(evals, x)
    return ContributionReport(per_judge=per_judge, per_object=per_object)


def _object_separation(evals: EvaluationSet, x: Mapping) -> dict:
    shares = {obj: Fraction(0) for obj in evals.objects}
    for evaluation in evals.judges:
        rating = evaluation.rating
        if rating is None or len(rating.support) < 2:
            continue
        weight = rating_pair_weight(len(rating.support), evals.scale.span)
        support = sorted(rating.support, key=id_key)
        for i in support:
            for j in support:
                if i != j:
                    mismatch = weight * abs((x[i] - x[j]) - (rating.scores[i] - rating.scores[j]))
                    # the pair's mismatch is charged to both of its endpoints
                    shares[i] += mismatch
                    shares[j] += mismatch
    return shares


def object_contributions(evals: EvaluationSet, scores: Mapping) -> ContributionReport:
    """Each object's share of the rating-separation penalty at ``scores``.

    An object is charged for every mismatched pair it appears in, from either
    end, so summing over objects counts each pair twice: the object totals
    add up to exactly twice the judge totals. The ordering of contributors,
    which is what flags objects needing discussion, is unaffected by that
    doubling.
    """
    x = {obj: as_score(scores[obj]) for obj in evals.objects}
    per_judge = {
        evaluation.judge: _judge_separation(evaluation, x, evals.scale.span)
        for evaluation in evals.judges
    }
    return ContributionReport(per_judge=per_judge, per_object=_object_separation(evals, x))


@dataclass(frozen=True)
class AdjustedScores:
    """Scores divided by their judge's mean score, plus per-object means.

    ``rows`` holds (object, judge, adjusted score) sorted by object then
    judge; a value above 1 means the judge scored this object above their own
    average.
    """

    rows: tuple
    object_means: dict


def adjusted_scores(evals: EvaluationSet) -> AdjustedScores:
    """Normalize every score by its judge's average score.

    Makes scores from lenient and strict judges comparable. Raises if some
    judge's average is zero (possible only when the scale admits 0 and a
    judge used nothing else).
    """
    rows = []
    by_object: dict = {}
    for evaluation in evals.judges:
        rating = evaluation.rating
        if rating is None:
            continue
        mean = sum(rating.scores.values(), Fraction(0)) / len(rating.scores)
        if mean == 0:
            raise ValueError(f"judge {evaluation.judge} has mean score 0; cannot adjust")
        for obj in sorted(rating.support, key=id_key):
            value = rating.scores[obj] / mean
            rows.append((obj, evaluation.judge, value))
            by_object.setdefault(obj, []).append(value)
    rows.sort(key=lambda row: (id_key(row[0]), id_key(row[1])))
    means = {
        obj: sum(values, Fraction(0)) / len(values)
        for obj, values in sorted(by_object.items(), key=lambda kv: id_key(kv[0]))
    }
    return AdjustedScores(rows=tuple(rows), object_means=means)


@dataclass(frozen=True)
class PartialOrder:
    """Pairwise agreement labels between a consensus rating and ranking.

    Every unordered pair (stored with the earlier id first) carries exactly
    one label: preferred either way, tied in both views, or incomparable,
    meaning the two views order the pair oppositely.
    """

    relation: dict

    def label(self, a, b) -> str:
        if (a, b) in self.relation:
            return self.relation[(a, b)]
        flipped = {PREFERS_FIRST: PREFERS_SECOND, PREFERS_SECOND: PREFERS_FIRST}
        label = self.relation[(b, a)]
        return flipped.get(label, label)

    def incomparable_pairs(self) -> list:
        return [pair for pair, label in sorted(self.relation.items(), key=_pair_key) if label == INCOMPARABLE]

    def counts(self) -> dict:
        counts = {PREFERS_FIRST: 0, PREFERS_SECOND: 0, TIED: 0, INCOMPARABLE: 0}
        for label in self.relation.values():
            counts[label] += 1
        return {"preferred": counts[PREFERS_FIRST] + counts[PREFERS_SECOND], "tied": counts[TIED], "incomparable": counts[INCOMPARABLE]}


def _pair_key(item):
    (a, b), _ = item
    return (id_key(a), id_key(b))


def partial_order(rating_result: ConsensusResult, ranking_result: ConsensusResult) -> PartialOrder:
    """Label every object pair by agreement between two consensus views.

    Comparison semantics: on the rating side a higher score is better; on
    the ranking side a smaller implied rank is better. A pair is preferred
    one way when that side is strictly better in one view and at least as
    good in the other, tied when equal in both, and incomparable otherwise,
    i.e. when the two views point in opposite directions.
    """
    scores = rating_result.scores
    ranks = ranking_result.implied_ranking.ranks
    objects = sorted(scores, key=id_key)
    if set(objects) != set(ranks):
        raise ValueError("the two results cover different object sets")
    relation: dict = {}
    for pos, a in enumerate(objects):
        for b in objects[pos + 1:]:
            better_score = sign(scores[a] - scores[b])
            better_rank = sign(ranks[b] - ranks[a])  # positive when a's rank is better
            if better_score == better_rank == 0:
                relation[(a, b)] = TIED
            elif better_score >= 0 and better_rank >= 0:
                relation[(a, b)] = PREFERS_FIRST
            elif better_score <= 0 and better_rank <= 0:
                relation[(a, b)] = PREFERS_SECOND
            else:
                relation[(a, b)] = INCOMPARABLE
    return PartialOrder(relation)


def conflict_pairs(po: PartialOrder, rating_result: ConsensusResult) -> list:
    """Incomparable pairs oriented from the higher-rated to the lower-rated object."""
    scores = rating_result.scores
    oriented = []
    for a, b in po.incomparable_pairs():
        if scores[a] >= scores[b]:
            oriented.append((a, b))
        else:
            oriented.append((b, a))
    return oriented


def conflict_graph_dot(po: PartialOrder, rating_result: ConsensusResult) -> str:
    """DOT digraph of rating-vs-ranking conflicts.

    Objects are grouped into same-rank rows by descending consensus score;
    one arc per incomparable pair, pointing from the higher-rated object to
    the lower-rated one that nevertheless ranks better. Output is
    deterministic, byte for byte, for identical input.
    """
    scores = rating_result.scores
    groups: dict = {}
    for obj in sorted(scores, key=id_key):
        groups.setdefault(scores[obj], []).append(obj)
    ordered_scores = sorted(groups, reverse=True)

    def name(obj) -> str:
        return json.dumps(str(obj))

    lines = ["digraph conflicts {", "  rankdir=TB;", "  node [shape=circle];"]
    for value in ordered_scores:
        members = " ".join(f"{name(obj)};" for obj in groups[value])
        lines.append(f"  {{ rank=same; {members} }}")
    # invisible spine pinning the rows in score order
    anchors = [groups[value][0] for value in ordered_scores]
    for upper, lower in zip(anchors, anchors[1:]):
        lines.append(f"  {name(upper)} -> {name(lower)} [style=invis];")
    for a, b in conflict_pairs(po, rating_result):
        lines.append(f"  {name(a)} -> {name(b)};")
    lines.append("}")
    return "\n".join(lines) + "\n"
