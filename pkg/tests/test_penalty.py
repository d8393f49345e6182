from __future__ import annotations

import random
from fractions import Fraction

import pytest

from panelrank import (
    EvaluationSet,
    IncompleteRanking,
    IncompleteRating,
    JudgeEvaluation,
    PiecewiseLinearFn,
    ScoreScale,
    build_cat,
    build_ranking_terms,
    build_rating_terms,
    h_penalty,
    pwl_eval,
    sign,
    total_rating_distance,
)
from conftest import random_instance

TEN = ScoreScale(0, 10, 1)


# --- the convex direction surrogate

@pytest.mark.parametrize(
    "wanted,z,expected",
    [
        (1, 1, 0),
        (1, 0, Fraction(1, 2)),
        (1, -2, Fraction(3, 2)),
        (0, 0, 0),
        (0, 3, Fraction(3, 2)),
        (-1, -1, 0),
        (-1, 1, 1),
    ],
)
def test_h_penalty_values(wanted, z, expected):
    assert h_penalty(wanted, z) == expected


def test_h_penalty_rejects_bad_sign():
    with pytest.raises(ValueError):
        h_penalty(2, 0)


def test_h_penalty_dominates_reversal_kernel_on_integers():
    for wanted in (-1, 0, 1):
        for z in range(-8, 9):
            surrogate = h_penalty(wanted, z)
            kernel = Fraction(abs(sign(z) - wanted), 2)
            assert surrogate >= kernel
            if z in (-1, 0, 1):
                assert surrogate == kernel


def test_h_penalty_custom_separation():
    # separation of 2 points: zero once two points apart, still 1/2 at a tie
    assert h_penalty(1, 2, separation=2) == 0
    assert h_penalty(1, 0, separation=2) == Fraction(1, 2)
    assert h_penalty(1, -2, separation=2) == 1
    assert h_penalty(0, 1, separation=2) == Fraction(1, 4)


# --- piecewise-linear algebra

def test_pwl_absolute_eval():
    fn = PiecewiseLinearFn.absolute(4)
    assert pwl_eval(fn, 4) == 0
    assert pwl_eval(fn, 0) == 4
    assert pwl_eval(fn, Fraction(9, 2)) == Fraction(1, 2)
    assert pwl_eval(fn, -3) == 7


def test_pwl_sum_of_hinge_and_tie():
    fn = PiecewiseLinearFn.direction_penalty(1) + PiecewiseLinearFn.direction_penalty(0)
    assert fn(0) == Fraction(1, 2)
    assert fn(1) == Fraction(1, 2)
    assert fn(-1) == Fraction(3, 2)


def test_pwl_addition_matches_pointwise():
    rng = random.Random(7)
    for _ in range(30):
        f = PiecewiseLinearFn.absolute(rng.randint(-4, 4), rng.randint(1, 3))
        g = PiecewiseLinearFn.direction_penalty(rng.choice([-1, 0, 1]), 1, rng.randint(1, 3))
        h = f + g
        for z in range(-6, 7):
            assert h(z) == f(z) + g(z)


def test_pwl_scaling_and_reflection():
    f = PiecewiseLinearFn.absolute(2, 3)
    assert f.scaled(Fraction(1, 3))(5) == Fraction(3)
    g = f.reflected()
    for z in range(-5, 6):
        assert g(z) == f(-z)


def test_pwl_rejects_nonconvex():
    with pytest.raises(ValueError):
        PiecewiseLinearFn((0,), (1, -1), 0)


def test_pwl_canonicalizes_redundant_breakpoints():
    f = PiecewiseLinearFn((0, 1), (-1, -1, 1), 1)
    assert f.breakpoints == (1,)


def test_pwl_zero_scaling_gives_zero():
    assert PiecewiseLinearFn.absolute(3, 2).scaled(0).is_zero


# --- rating terms

def test_rating_terms_fold_both_orientations():
    judge = JudgeEvaluation(1, IncompleteRating(1, {1: 8, 2: 4}), None)
    evals = EvaluationSet((1, 2), (judge,), TEN)
    pmap = build_rating_terms(evals)
    # ordered contributions (1/40)|z-4| and (1/40)|z+4| fold onto the pair
    assert pmap.pair_terms == {(1, 2): PiecewiseLinearFn.absolute(4, Fraction(1, 20))}
    assert pmap.term(2, 1)(3) == Fraction(1, 20) * 7


def test_rating_terms_skip_singletons():
    judge = JudgeEvaluation(1, IncompleteRating(1, {1: 8}), None)
    evals = EvaluationSet((1, 2), (judge,), TEN)
    assert build_rating_terms(evals).is_empty


def test_rating_terms_double_with_identical_judges():
    j1 = JudgeEvaluation(1, IncompleteRating(1, {1: 8, 2: 4}), None)
    j2 = JudgeEvaluation(2, IncompleteRating(2, {1: 8, 2: 4}), None)
    single = build_rating_terms(EvaluationSet((1, 2), (j1,), TEN))
    double = build_rating_terms(EvaluationSet((1, 2), (j1, j2), TEN))
    assert double.pair_terms[(1, 2)] == single.pair_terms[(1, 2)].scaled(2)


def test_rating_terms_match_total_distance():
    rng = random.Random(8)
    for _ in range(25):
        evals = random_instance(rng)
        pmap = build_rating_terms(evals)
        x = {obj: rng.choice(evals.scale.grid()) for obj in evals.objects}
        assert pmap.evaluate(x) == total_rating_distance(evals, x)


# --- ranking terms

def test_ranking_terms_score_target_orientation():
    judge = JudgeEvaluation(1, None, IncompleteRanking(1, {1: 1, 2: 2}))
    evals = EvaluationSet((1, 2), (judge,), TEN)
    pmap = build_ranking_terms(evals, "scores")
    # both ordered contributions fold to one hinge wanting z_12 >= 1
    assert pmap.pair_terms == {(1, 2): PiecewiseLinearFn.direction_penalty(1, 1, 1)}
    assert pmap.grid == TEN
    assert pmap.orientation == "scores"


def test_ranking_terms_rank_target_flips_sign_and_grid():
    judge = JudgeEvaluation(1, None, IncompleteRanking(1, {1: 1, 2: 2}))
    evals = EvaluationSet((1, 2), (judge,), TEN)
    pmap = build_ranking_terms(evals, "ranks")
    # in rank space the preferred object wants the smaller value
    assert pmap.pair_terms == {(1, 2): PiecewiseLinearFn.direction_penalty(-1, 1, 1)}
    assert pmap.grid == ScoreScale(1, 2, 1)
    assert pmap.orientation == "ranks"


def test_ranking_terms_all_tied_judge():
    judge = JudgeEvaluation(1, None, IncompleteRanking(1, {1: 3, 2: 3}))
    evals = EvaluationSet((1, 2), (judge,), TEN)
    pmap = build_ranking_terms(evals, "scores")
    # two mirrored tie terms: weight 1/2 each, folded
    assert pmap.pair_terms == {(1, 2): PiecewiseLinearFn.direction_penalty(0, 1, 1)}


def test_ranking_terms_empty_without_rankings():
    judge = JudgeEvaluation(1, IncompleteRating(1, {1: 5, 2: 5}), None)
    evals = EvaluationSet((1, 2), (judge,), TEN)
    assert build_ranking_terms(evals, "scores").is_empty


def test_ranking_terms_separation_knob():
    judge = JudgeEvaluation(1, None, IncompleteRanking(1, {1: 1, 2: 2}))
    evals = EvaluationSet((1, 2), (judge,), ScoreScale(1, 10, Fraction(1, 2)))
    widened = build_ranking_terms(evals, "scores", strict_sep=2)
    fn = widened.pair_terms[(1, 2)]
    assert fn(2) == 0
    assert fn(1) == Fraction(1, 4)
    assert fn(0) == Fraction(1, 2)


# --- combined objective

def _mixed_instance():
    j1 = JudgeEvaluation(1, IncompleteRating(1, {1: 8, 2: 4}), IncompleteRanking(1, {1: 1, 2: 2}))
    j2 = JudgeEvaluation(2, IncompleteRating(2, {2: 6, 3: 6}), IncompleteRanking(2, {2: 1, 3: 1}))
    return EvaluationSet((1, 2, 3), (j1, j2), TEN)


def test_cat_weight_identities():
    evals = _mixed_instance()
    assert build_cat(evals, 1, 0) == build_rating_terms(evals)
    assert build_cat(evals, 0, 1) == build_ranking_terms(evals, "scores")


def test_cat_rejects_zero_weights():
    with pytest.raises(ValueError):
        build_cat(_mixed_instance(), 0, 0)


def test_cat_sums_both_sides_pointwise():
    evals = _mixed_instance()
    combined = build_cat(evals, 2, Fraction(1, 2))
    ratings = build_rating_terms(evals)
    rankings = build_ranking_terms(evals, "scores")
    rng = random.Random(9)
    for _ in range(20):
        x = {obj: rng.randint(0, 10) for obj in evals.objects}
        assert combined.evaluate(x) == 2 * ratings.evaluate(x) + Fraction(1, 2) * rankings.evaluate(x)


def test_cat_with_singleton_ratings_reduces_to_ranking_terms():
    j1 = JudgeEvaluation(1, IncompleteRating(1, {1: 9}), IncompleteRanking(1, {1: 1, 2: 2}))
    j2 = JudgeEvaluation(2, IncompleteRating(2, {2: 3}), IncompleteRanking(2, {1: 2, 2: 1}))
    evals = EvaluationSet((1, 2), (j1, j2), TEN)
    assert build_cat(evals, 1, 1) == build_ranking_terms(evals, "scores")


# --- structural invariants

def test_every_assembled_term_is_grid_convex():
    rng = random.Random(10)
    for _ in range(20):
        evals = random_instance(rng)
        pmap = build_cat(evals, 1, 1)
        unit = pmap.grid.unit
        span = pmap.grid.span
        steps = int(span / unit)
        for fn in pmap.pair_terms.values():
            for k in range(-steps + 1, steps):
                z = unit * k
                assert fn(z - unit) - 2 * fn(z) + fn(z + unit) >= 0


def test_mirrored_pair_consistency():
    rng = random.Random(11)
    for _ in range(10):
        evals = random_instance(rng)
        pmap = build_cat(evals, 1, 1)
        for (i, j) in pmap.pair_terms:
            for k in range(-4, 5):
                z = pmap.grid.unit * k
                assert pmap.term(i, j)(z) == pmap.term(j, i)(-z)


def test_judge_tagged_terms_sum_to_pair_terms():
    rng = random.Random(12)
    for _ in range(10):
        evals = random_instance(rng)
        pmap = build_cat(evals, 1, 1)
        x = {obj: rng.choice(evals.scale.grid()) for obj in evals.objects}
        assert sum(pmap.judge_shares(x).values(), Fraction(0)) == pmap.evaluate(x)
