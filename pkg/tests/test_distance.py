from __future__ import annotations

import random
from fractions import Fraction
from itertools import product

import pytest

from panelrank import (
    EvaluationSet,
    IncompleteRanking,
    IncompleteRating,
    JudgeEvaluation,
    Ranking,
    ScoreScale,
    npck,
    npks,
    total_ranking_distance,
    total_rating_distance,
)

TEN = ScoreScale(0, 10, 1)


def rating(judge, scores):
    return IncompleteRating(judge, scores)


def ranking(judge, ranks):
    return IncompleteRanking(judge, ranks)


# --- npck

def test_npck_worked_example():
    assert npck(rating(1, {1: 8, 2: 4}), rating(2, {1: 5, 2: 5}), TEN) == Fraction(1, 5)


def test_npck_identity_is_zero():
    a = rating(1, {1: 8, 2: 4, 3: 6})
    assert npck(a, rating(2, {1: 8, 2: 4, 3: 6}), TEN) == 0


def test_npck_maximal_disagreement_is_one():
    assert npck(rating(1, {1: 10, 2: 0}), rating(2, {1: 0, 2: 10}), TEN) == 1


def test_npck_no_common_pairs_is_zero():
    assert npck(rating(1, {1: 5}), rating(2, {1: 9}), TEN) == 0
    assert npck(rating(1, {1: 5, 2: 3}), rating(2, {3: 9, 4: 1}), TEN) == 0


def test_npck_symmetry_and_range():
    rng = random.Random(3)
    for _ in range(60):
        n = rng.randint(2, 6)
        a = rating(1, {i: rng.randint(0, 10) for i in rng.sample(range(n), rng.randint(1, n))})
        b = rating(2, {i: rng.randint(0, 10) for i in rng.sample(range(n), rng.randint(1, n))})
        d1, d2 = npck(a, b, TEN), npck(b, a, TEN)
        assert d1 == d2
        assert 0 <= d1 <= 1


def test_npck_shift_invariance():
    a = rating(1, {1: 6, 2: 2, 3: 4})
    b = rating(2, {1: 3, 2: 5, 3: 4})
    shifted = rating(1, {1: 9, 2: 5, 3: 7})
    assert npck(shifted, b, TEN) == npck(a, b, TEN)


def test_npck_two_object_closed_form():
    # over a shared 2-object support the distance is the gap difference over
    # twice the scale width (the ordered-pair sum counts the gap twice)
    rng = random.Random(4)
    for _ in range(40):
        a = rating(1, {1: rng.randint(0, 10), 2: rng.randint(0, 10)})
        b = rating(2, {1: rng.randint(0, 10), 2: rng.randint(0, 10)})
        gap_a = a.scores[1] - a.scores[2]
        gap_b = b.scores[1] - b.scores[2]
        assert npck(a, b, TEN) == Fraction(abs(gap_a - gap_b), 2 * 10)


@pytest.mark.parametrize("m,width", [(2, 2), (2, 4), (3, 2), (3, 4)])
def test_npck_normalizer_tight(m, width):
    # exhaustive over all score assignments: the maximum is exactly 1
    scale = ScoreScale(0, width, 1)
    grid = range(width + 1)
    best = Fraction(0)
    for a_scores in product(grid, repeat=m):
        a = rating(1, dict(enumerate(a_scores)))
        for b_scores in product(grid, repeat=m):
            b = rating(2, dict(enumerate(b_scores)))
            d = npck(a, b, scale)
            assert d <= 1
            best = max(best, d)
    assert best == 1


# --- npks

def test_npks_full_reversal_is_one():
    assert npks(ranking(1, {1: 1, 2: 2}), ranking(2, {1: 2, 2: 1})) == 1


def test_npks_half_reversal():
    assert npks(ranking(1, {1: 1, 2: 1}), ranking(2, {1: 1, 2: 2})) == Fraction(1, 2)


def test_npks_identity_is_zero():
    b = ranking(1, {1: 2, 2: 1, 3: 3})
    assert npks(b, ranking(2, {1: 2, 2: 1, 3: 3})) == 0


def test_npks_no_common_pairs_is_zero():
    assert npks(ranking(1, {1: 1}), ranking(2, {1: 2})) == 0
    assert npks(ranking(1, {1: 1, 2: 2}), ranking(2, {3: 1, 4: 2})) == 0


def test_npks_symmetry_and_range():
    rng = random.Random(5)
    for _ in range(60):
        n = rng.randint(2, 6)
        a = ranking(1, {i: rng.randint(1, n) for i in rng.sample(range(n), rng.randint(1, n))})
        b = ranking(2, {i: rng.randint(1, n) for i in rng.sample(range(n), rng.randint(1, n))})
        d1, d2 = npks(a, b), npks(b, a)
        assert d1 == d2
        assert 0 <= d1 <= 1


def test_npks_depends_only_on_order_relations():
    rng = random.Random(6)
    base = ranking(1, {1: 1, 2: 2, 3: 2, 4: 5})
    other = ranking(2, {1: 3, 2: 1, 3: 2, 4: 2})
    reference = npks(base, other)
    for _ in range(20):
        # strictly increasing relabeling of the rank values
        values = sorted(set(base.ranks.values()))
        offsets = sorted(rng.sample(range(1, 40), len(values)))
        relabel = dict(zip(values, offsets))
        relabeled = ranking(1, {obj: relabel[r] for obj, r in base.ranks.items()})
        assert npks(relabeled, other) == reference


# --- totals over an evaluation set

def _evals(judges, scale=TEN, objects=None):
    if objects is None:
        objects = sorted({o for j in judges for o in j.support})
    return EvaluationSet(tuple(objects), tuple(judges), scale)


def test_total_rating_distance_single_judge_zero():
    judge = JudgeEvaluation(1, rating(1, {1: 8, 2: 4}), None)
    evals = _evals([judge], objects=(1, 2, 3))
    assert total_rating_distance(evals, {1: 8, 2: 4, 3: 0}) == 0
    # any consistent shift also gives zero
    assert total_rating_distance(evals, {1: 9, 2: 5, 3: 7}) == 0


def test_total_rating_distance_worked_example():
    judge = JudgeEvaluation(1, rating(1, {1: 8, 2: 4}), None)
    evals = _evals([judge])
    assert total_rating_distance(evals, {1: 5, 2: 5}) == Fraction(1, 5)


def test_total_rating_distance_additive_over_judges():
    j1 = JudgeEvaluation(1, rating(1, {1: 8, 2: 4}), None)
    j2 = JudgeEvaluation(2, rating(2, {1: 8, 2: 4}), None)
    evals = _evals([j1, j2])
    assert total_rating_distance(evals, {1: 5, 2: 5}) == Fraction(2, 5)


def test_total_ranking_distance_examples():
    j1 = JudgeEvaluation(1, None, ranking(1, {1: 1, 2: 2}))
    evals = _evals([j1])
    assert total_ranking_distance(evals, Ranking({1: 1, 2: 2})) == 0
    assert total_ranking_distance(evals, Ranking({1: 2, 2: 1})) == 1


def test_total_ranking_distance_opposed_judges():
    j1 = JudgeEvaluation(1, None, ranking(1, {1: 1, 2: 2}))
    j2 = JudgeEvaluation(2, None, ranking(2, {1: 2, 2: 1}))
    evals = _evals([j1, j2])
    for complete in (Ranking({1: 1, 2: 2}), Ranking({1: 2, 2: 1})):
        assert total_ranking_distance(evals, complete) == 1


def test_total_ranking_distance_requires_cover():
    j1 = JudgeEvaluation(1, None, ranking(1, {1: 1, 2: 2}))
    evals = _evals([j1], objects=(1, 2, 3))
    with pytest.raises(ValueError):
        total_ranking_distance(evals, Ranking({1: 1, 2: 2}))
