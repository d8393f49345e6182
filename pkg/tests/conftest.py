from __future__ import annotations

import random
from fractions import Fraction
from pathlib import Path

import pytest

from panelrank import (
    EvaluationSet,
    IncompleteRanking,
    IncompleteRating,
    JudgeEvaluation,
    ScoreScale,
)

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def default_scale() -> ScoreScale:
    return ScoreScale(1, 10, Fraction(1, 2))


@pytest.fixture
def small_scale() -> ScoreScale:
    return ScoreScale(0, 4, 1)


def random_instance(
    rng: random.Random,
    sizes=(3, 4, 5),
    judge_counts=(2, 3),
    scale: ScoreScale | None = None,
    singleton_ratings: bool = False,
) -> EvaluationSet:
    """A random small evaluation set with incomplete supports on both sides.

    Support sizes range over 0..n per side; a judge left with nothing gets a
    one-object ranking so the evaluation stays well formed.
    """
    scale = scale or ScoreScale(0, 4, 1)
    n = rng.choice(list(sizes))
    objects = tuple(range(1, n + 1))
    grid = scale.grid()
    judges = []
    for k in range(rng.choice(list(judge_counts))):
        if singleton_ratings:
            rated = [rng.choice(objects)]
        else:
            rated = rng.sample(objects, rng.randint(0, n))
        ranked = rng.sample(objects, rng.randint(0, n))
        rating = IncompleteRating(k, {o: rng.choice(grid) for o in rated}) if rated else None
        ranking = IncompleteRanking(k, {o: rng.randint(1, n) for o in ranked}) if ranked else None
        if rating is None and ranking is None:
            ranking = IncompleteRanking(k, {rng.choice(objects): 1})
        judges.append(JudgeEvaluation(k, rating, ranking))
    return EvaluationSet(objects, tuple(judges), scale)


@pytest.fixture
def make_random_instance():
    return random_instance
