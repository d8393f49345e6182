"""Exact minimization of assembled penalty maps over the score grid.

The objective class here, convex piecewise-linear penalties on pairwise
differences plus convex per-object deviation penalties over a boxed grid,
admits exact minimization by steepest descent over set directions: from the
current vector, the best "raise every object in S by one grid step" move
(and its lowering twin) is found by a single min cut, because convexity of
the pair terms makes each step's cost submodular in S. A vector no such
move improves is globally optimal for this function class, so the loop
terminates at a true optimum; tests certify this against the exhaustive
oracle. A min-cost-flow dual formulation would be an equivalent engine.

Results are deterministic: fixed all-lower start, minimal min-cut source
sides, fixed iteration order, exact rational arithmetic end to end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Mapping

from .distance import total_ranking_distance
from .mincut import minimize_boolean_energy
from .model import (
    EvaluationSet,
    InstanceTooLargeError,
    Ranking,
    as_score,
    id_key,
    rank_from_scores,
)
from .penalty import (
    RANK_TARGET,
    PairPenaltyMap,
    build_cat,
    build_ranking_terms,
    build_rating_terms,
)

ORACLE_VECTOR_LIMIT = 10 ** 7
EXACT_RANKING_OBJECT_LIMIT = 6


@dataclass(frozen=True)
class PenaltyDecomposition:
    """How an objective value splits across judges and objects.

    Judge shares add up to the pair-term objective (each tagged term belongs
    to one judge). Object shares count every pair at both endpoints, so they
    add up to twice the pair-term objective plus any deviation terms.
    """

    per_judge: dict
    per_object: dict


@dataclass(frozen=True)
class ConsensusResult:
    """An optimal score vector with its implied ranking and penalty breakdown."""

    scores: dict
    implied_ranking: Ranking
    objective: Fraction
    decomposition: PenaltyDecomposition

    def score_of(self, obj) -> Fraction:
        return self.scores[obj]


def _result_from(pmap: PairPenaltyMap, scores: Mapping) -> ConsensusResult:
    x = {obj: as_score(scores[obj]) for obj in pmap.objects}
    if pmap.orientation == RANK_TARGET:
        implied = rank_from_scores({obj: -value for obj, value in x.items()})
    else:
        implied = rank_from_scores(x)
    return ConsensusResult(
        scores=x,
        implied_ranking=implied,
        objective=pmap.evaluate(x),
        decomposition=PenaltyDecomposition(
            per_judge=pmap.judge_shares(x),
            per_object=pmap.object_shares(x),
        ),
    )


def _best_unit_move(pmap: PairPenaltyMap, levels: dict, direction: int):
    """Cheapest change from moving a set of objects one grid step in ``direction``.

    Returns (cost delta, minimal optimal set). Objects already at the bound
    are priced out with a cost larger than any achievable saving.
    """
    grid = pmap.grid
    step = grid.unit * direction
    unary: dict = {obj: Fraction(0) for obj in pmap.objects}
    pair_costs: dict = {}
    scale_bound = Fraction(1)
    for (i, j), fn in pmap.pair_terms.items():
        z = grid.unit * (levels[i] - levels[j])
        at = fn(z)
        cost_i_only = fn(z + step) - at  # only i moves
        cost_j_only = fn(z - step) - at  # only j moves
        unary[i] += cost_i_only
        unary[j] -= cost_i_only
        coupling = cost_i_only + cost_j_only
        if coupling < 0:
            raise AssertionError("pair term is not convex on the grid")
        if coupling > 0:
            pair_costs[(j, i)] = pair_costs.get((j, i), Fraction(0)) + coupling
        scale_bound += abs(cost_i_only) + coupling
    for obj, fn in pmap.object_terms.items():
        here = grid.score_at(levels[obj])
        cost = fn(here + step) - fn(here)
        unary[obj] += cost
        scale_bound += abs(cost)
    top = grid.level_count - 1
    for obj in pmap.objects:
        frozen = levels[obj] >= top if direction > 0 else levels[obj] <= 0
        if frozen:
            unary[obj] = scale_bound
    return minimize_boolean_energy(pmap.objects, unary, pair_costs)


def minimize(pmap: PairPenaltyMap) -> ConsensusResult:
    """Global minimizer of a penalty map over complete on-grid vectors.

    Starts from the all-lower-bound vector and repeatedly applies the best
    raise-a-set / lower-a-set step (each found by a min cut) while one
    strictly improves; the stopping point is a global optimum for this
    convex objective class. Output is deterministic for identical input.
    """
    if not pmap.objects:
        raise ValueError("cannot minimize over an empty object set")
    levels = {obj: 0 for obj in pmap.objects}
    objective = pmap.evaluate({obj: pmap.grid.score_at(0) for obj in pmap.objects})
    while True:
        delta_up, set_up = _best_unit_move(pmap, levels, +1)
        delta_down, set_down = _best_unit_move(pmap, levels, -1)
        if delta_up >= 0 and delta_down >= 0:
            break
        if delta_up <= delta_down:
            delta, chosen, direction = delta_up, set_up, +1
        else:
            delta, chosen, direction = delta_down, set_down, -1
        for obj in chosen:
            levels[obj] += direction
        objective += delta
    result = _result_from(pmap, {obj: pmap.grid.score_at(level) for obj, level in levels.items()})
    if result.objective != objective:
        raise AssertionError(
            f"descent bookkeeping ({objective}) disagrees with re-evaluation ({result.objective})"
        )
    return result


def brute_force_oracle(pmap: PairPenaltyMap) -> ConsensusResult:
    """Exhaustive global minimizer, for verification at tiny scale.

    Enumerates every on-grid vector (guarded to at most ``ORACLE_VECTOR_LIMIT``)
    in lexicographic order and keeps the first optimum, so ties break
    lexicographically. Values are tabulated over a common denominator so the
    inner loop is pure integer arithmetic yet still exact.
    """
    objects = pmap.objects
    if not objects:
        raise ValueError("cannot minimize over an empty object set")
    count = pmap.grid.level_count
    if count ** len(objects) > ORACLE_VECTOR_LIMIT:
        raise InstanceTooLargeError(
            f"{count}^{len(objects)} grid vectors exceed the oracle guard of {ORACLE_VECTOR_LIMIT}"
        )
    grid_scores = pmap.grid.grid()
    index = {obj: pos for pos, obj in enumerate(objects)}

    pair_tables = []
    for (i, j), fn in pmap.pair_terms.items():
        table = [fn(pmap.grid.unit * d) for d in range(-(count - 1), count)]
        pair_tables.append((index[i], index[j], table))
    object_tables = []
    for obj, fn in pmap.object_terms.items():
        object_tables.append((index[obj], [fn(score) for score in grid_scores]))

    denominator = 1
    for _, _, table in pair_tables:
        for value in table:
            denominator = math.lcm(denominator, value.denominator)
    for _, table in object_tables:
        for value in table:
            denominator = math.lcm(denominator, value.denominator)
    pair_tables = [
        (i, j, [int(v * denominator) for v in table]) for i, j, table in pair_tables
    ]
    object_tables = [(i, [int(v * denominator) for v in table]) for i, table in object_tables]
    offset = count - 1

    best_total = None
    best_vector = None
    for vector in product(range(count), repeat=len(objects)):
        total = 0
        for i, j, table in pair_tables:
            total += table[vector[i] - vector[j] + offset]
        for i, table in object_tables:
            total += table[vector[i]]
        if best_total is None or total < best_total:
            best_total = total
            best_vector = vector
    scores = {obj: grid_scores[best_vector[pos]] for pos, obj in enumerate(objects)}
    result = _result_from(pmap, scores)
    if result.objective != Fraction(best_total, denominator):
        raise AssertionError("oracle tabulation disagrees with direct evaluation")
    return result


def consensus_rating(evals: EvaluationSet) -> ConsensusResult:
    """Best-fit complete rating: minimizes total rating distance to the judges."""
    return minimize(build_rating_terms(evals))


def consensus_ranking_convex(evals: EvaluationSet) -> ConsensusResult:
    """Convex-surrogate consensus ranking.

    Solves the ranking objective over rank-valued variables on the integer
    grid 1..n (any weak order embeds in n levels); ``implied_ranking`` on
    the result is the deliverable.
    """
    return minimize(build_ranking_terms(evals, target=RANK_TARGET))


def cat_solve(evals: EvaluationSet, w_rating=1, w_ranking=1, strict_sep=1) -> ConsensusResult:
    """Combined aggregate solve: one score vector serving both evaluation kinds.

    Returns the optimal scores; ``implied_ranking`` is the matching combined
    ranking.
    """
    return minimize(build_cat(evals, w_rating, w_ranking, strict_sep))


def exact_npks_consensus_tiny(evals: EvaluationSet, max_objects: int = EXACT_RANKING_OBJECT_LIMIT) -> Ranking:
    """Exact consensus ranking by enumerating every weak order (tiny inputs only).

    The underlying problem is NP-hard, so this is a verification reference,
    guarded to ``max_objects`` objects. Ties between optimal weak orders
    break lexicographically on the competition rank vector over the sorted
    object ids.
    """
    objects = sorted(evals.objects, key=id_key)
    n = len(objects)
    if n > max_objects:
        raise InstanceTooLargeError(
            f"{n} objects exceed the exact-consensus guard of {max_objects}"
        )
    if n == 0:
        raise ValueError("cannot rank an empty object set")
    best_ranking = None
    best_total = None
    for vector in product(range(1, n + 1), repeat=n):
        try:
            candidate = Ranking(dict(zip(objects, vector)))
        except ValueError:
            continue  # not a competition ranking
        total = total_ranking_distance(evals, candidate)
        if best_total is None or total < best_total:
            best_total = total
            best_ranking = candidate
    return best_ranking


def anchor_to_mean(result: ConsensusResult, pmap: PairPenaltyMap, evals: EvaluationSet) -> ConsensusResult:
    """Shift an optimal score vector to sit nearest the judges' own mean score.

    Pure-separation objectives are shift-invariant, so optima come in
    families; for presentation we pick, among feasible shifts that provably
    keep the objective unchanged, the one whose mean score is closest to the
    mean of all given scores (ties prefer the smallest shift). The objective
    value, ranking, and decompositions are unaffected.
    """
    given = [
        score
        for evaluation in evals.judges
        if evaluation.rating is not None
        for score in evaluation.rating.scores.values()
    ]
    if not given:
        return result
    target = sum(given, Fraction(0)) / len(given)
    values = list(result.scores.values())
    mean = sum(values, Fraction(0)) / len(values)
    lowest, highest = min(values), max(values)
    unit = pmap.grid.unit
    steps_down = int((lowest - pmap.grid.lower) / unit)
    steps_up = int((pmap.grid.upper - highest) / unit)
    best_key = None
    best_shift = Fraction(0)
    for steps in range(-steps_down, steps_up + 1):
        shift = unit * steps
        shifted = {obj: value + shift for obj, value in result.scores.items()}
        if pmap.evaluate(shifted) != result.objective:
            continue
        key = (abs(mean + shift - target), abs(shift), shift)
        if best_key is None or key < best_key:
            best_key = key
            best_shift = shift
    if best_shift == 0:
        return result
    return _result_from(pmap, {obj: value + best_shift for obj, value in result.scores.items()})
