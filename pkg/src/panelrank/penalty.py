"""Convex piecewise-linear penalty algebra and objective assembly.

Every aggregation problem in this package minimizes a sum of convex
piecewise-linear penalties: per ordered object pair a function of the score
difference z_ij = x_i - x_j, and optionally per object a function of x_i.
:class:`PiecewiseLinearFn` is the currency of those penalties and
:class:`PairPenaltyMap` the assembled objective.

Rating disagreement penalizes |z_ij - p_ij| around each judge's implied gap
p_ij. Ranking disagreement uses a convex surrogate of the rank-reversal
kernel (:func:`h_penalty`): a hinge that is zero once the difference is on
the desired side by a full separation step, 1/2 at a tie, and grows linearly
past a reversal. Each judge's terms are weighted by the same normalizers the
distances use, so objective values stay comparable to distance totals.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .distance import ranking_pair_weight, rating_pair_weight
from .model import EvaluationSet, ScoreScale, as_score, id_key, sign

RANK_TARGET = "ranks"
SCORE_TARGET = "scores"


@dataclass(frozen=True)
class PiecewiseLinearFn:
    """A convex piecewise-linear function on the rationals.

    ``slopes[k]`` applies between ``breakpoints[k-1]`` and ``breakpoints[k]``
    (one more slope than breakpoints), and the function is pinned by its
    value at zero. Slopes must be non-decreasing, which is exactly
    convexity; the representation is canonical because breakpoints where the
    slope does not change are dropped.
    """

    breakpoints: tuple = ()
    slopes: tuple = (Fraction(0),)
    value_at_zero: Fraction = Fraction(0)

    def __post_init__(self):
        knots = tuple(as_score(b) for b in self.breakpoints)
        slopes = tuple(as_score(s) for s in self.slopes)
        if len(slopes) != len(knots) + 1:
            raise ValueError("need exactly one more slope than breakpoints")
        if any(b2 <= b1 for b1, b2 in zip(knots, knots[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if any(s2 < s1 for s1, s2 in zip(slopes, slopes[1:])):
            raise ValueError("slopes must be non-decreasing (convexity)")
        # canonicalize: drop breakpoints with no slope change
        kept_knots, kept_slopes = [], [slopes[0]]
        for knot, slope in zip(knots, slopes[1:]):
            if slope == kept_slopes[-1]:
                continue
            kept_knots.append(knot)
            kept_slopes.append(slope)
        object.__setattr__(self, "breakpoints", tuple(kept_knots))
        object.__setattr__(self, "slopes", tuple(kept_slopes))
        object.__setattr__(self, "value_at_zero", as_score(self.value_at_zero))

    @classmethod
    def zero(cls) -> "PiecewiseLinearFn":
        return cls()

    @classmethod
    def absolute(cls, center, weight=1) -> "PiecewiseLinearFn":
        """``weight * |z - center|``."""
        center, weight = as_score(center), as_score(weight)
        if weight < 0:
            raise ValueError("weight must be nonnegative")
        if weight == 0:
            return cls.zero()
        return cls((center,), (-weight, weight), weight * abs(center))

    @classmethod
    def direction_penalty(cls, wanted_sign: int, separation=1, weight=1) -> "PiecewiseLinearFn":
        """Convex surrogate for pushing a difference z to carry ``wanted_sign``.

        For ``wanted_sign`` +1 the penalty is ``weight * max((sep - z)/(2 sep), 0)``:
        zero once z >= separation, 1/2 weight at a tie, full weight at a
        reversal by one separation step. 0 asks for a tie and -1 mirrors +1.
        """
        separation, weight = as_score(separation), as_score(weight)
        if separation <= 0:
            raise ValueError("separation must be positive")
        if weight < 0:
            raise ValueError("weight must be nonnegative")
        if weight == 0:
            return cls.zero()
        slope = weight / (2 * separation)
        if wanted_sign == 1:
            return cls((separation,), (-slope, Fraction(0)), weight / 2)
        if wanted_sign == -1:
            return cls((-separation,), (Fraction(0), slope), weight / 2)
        if wanted_sign == 0:
            return cls((Fraction(0),), (-slope, slope), Fraction(0))
        raise ValueError(f"wanted_sign must be -1, 0, or +1, got {wanted_sign!r}")

    def __call__(self, z) -> Fraction:
        z = as_score(z)
        lo, hi = (Fraction(0), z) if z >= 0 else (z, Fraction(0))
        cuts = [lo] + [b for b in self.breakpoints if lo < b < hi] + [hi]
        area = Fraction(0)
        for left, right in zip(cuts, cuts[1:]):
            area += self.slopes[bisect_right(self.breakpoints, left)] * (right - left)
        return self.value_at_zero + (area if z >= 0 else -area)

    def __add__(self, other: "PiecewiseLinearFn") -> "PiecewiseLinearFn":
        if not isinstance(other, PiecewiseLinearFn):
            return NotImplemented
        knots = sorted(set(self.breakpoints) | set(other.breakpoints))
        slopes = [self.slopes[0] + other.slopes[0]]
        for knot in knots:
            slopes.append(
                self.slopes[bisect_right(self.breakpoints, knot)]
                + other.slopes[bisect_right(other.breakpoints, knot)]
            )
        return PiecewiseLinearFn(tuple(knots), tuple(slopes), self.value_at_zero + other.value_at_zero)

    def scaled(self, factor) -> "PiecewiseLinearFn":
        factor = as_score(factor)
        if factor < 0:
            raise ValueError("scaling a convex penalty by a negative factor")
        if factor == 0:
            return PiecewiseLinearFn.zero()
        return PiecewiseLinearFn(
            self.breakpoints,
            tuple(s * factor for s in self.slopes),
            self.value_at_zero * factor,
        )

    def reflected(self) -> "PiecewiseLinearFn":
        """The function z -> f(-z)."""
        return PiecewiseLinearFn(
            tuple(-b for b in reversed(self.breakpoints)),
            tuple(-s for s in reversed(self.slopes)),
            self.value_at_zero,
        )

    @property
    def is_zero(self) -> bool:
        return not self.breakpoints and self.slopes == (Fraction(0),) and self.value_at_zero == 0


def pwl_eval(fn: PiecewiseLinearFn, z) -> Fraction:
    """Exact value of a piecewise-linear function at ``z``."""
    return fn(z)


def h_penalty(wanted_sign: int, z, separation=1) -> Fraction:
    """Convex surrogate penalty for a difference z that should carry ``wanted_sign``.

    +1: max((sep - z) / (2 sep), 0); 0: |z| / (2 sep); -1: max((z + sep) / (2 sep), 0).
    On whole-step differences it never undercuts the half-reversal kernel
    |sign(z) - wanted_sign| / 2 and agrees with it for z in {-sep, 0, sep}.
    """
    return PiecewiseLinearFn.direction_penalty(wanted_sign, separation)(z)


@dataclass(frozen=True)
class PairPenaltyMap:
    """An assembled objective over complete score vectors on a grid.

    ``pair_terms`` maps canonically ordered object pairs (earlier id first)
    to convex functions of z_ij = x_i - x_j; contributions arriving for the
    mirrored pair are folded through z_ji = -z_ij. ``object_terms`` maps
    objects to convex functions of their own score (deviation penalties).
    ``judge_pair_terms`` keeps the same pair terms split by contributing
    judge so solutions can be decomposed; summing them over judges yields
    ``pair_terms`` exactly.

    ``orientation`` records what the variable means: "scores" (higher is
    better) or "ranks" (lower is better); it controls how a solution vector
    is turned into a ranking.
    """

    grid: ScoreScale
    objects: tuple
    pair_terms: dict = field(default_factory=dict)
    object_terms: dict = field(default_factory=dict)
    judge_pair_terms: dict = field(default_factory=dict)
    orientation: str = SCORE_TARGET

    def __post_init__(self):
        objects = tuple(sorted(set(self.objects), key=id_key))
        object.__setattr__(self, "objects", objects)
        if self.orientation not in (SCORE_TARGET, RANK_TARGET):
            raise ValueError(f"orientation must be {SCORE_TARGET!r} or {RANK_TARGET!r}")
        position = {obj: idx for idx, obj in enumerate(objects)}
        for (i, j) in self.pair_terms:
            if i not in position or j not in position:
                raise ValueError(f"pair ({i}, {j}) involves unknown objects")
            if position[i] >= position[j]:
                raise ValueError(f"pair ({i}, {j}) is not in canonical object order")
        for obj in self.object_terms:
            if obj not in position:
                raise ValueError(f"object term for unknown object {obj}")

    @property
    def is_empty(self) -> bool:
        return not self.pair_terms and not self.object_terms

    def term(self, i, j) -> PiecewiseLinearFn:
        """The penalty on z_ij for any ordered pair, reflecting when needed."""
        position = {obj: idx for idx, obj in enumerate(self.objects)}
        if position[i] < position[j]:
            return self.pair_terms.get((i, j), PiecewiseLinearFn.zero())
        stored = self.pair_terms.get((j, i))
        return stored.reflected() if stored is not None else PiecewiseLinearFn.zero()

    def evaluate(self, scores: Mapping) -> Fraction:
        """Exact objective value at a complete score vector."""
        x = {obj: as_score(scores[obj]) for obj in self.objects}
        total = Fraction(0)
        for (i, j), fn in self.pair_terms.items():
            total += fn(x[i] - x[j])
        for obj, fn in self.object_terms.items():
            total += fn(x[obj])
        return total

    def judge_shares(self, scores: Mapping) -> dict:
        """Objective value split by contributing judge (judge-tagged terms only)."""
        x = {obj: as_score(scores[obj]) for obj in self.objects}
        shares: dict = {}
        for judge, terms in self.judge_pair_terms.items():
            share = Fraction(0)
            for (i, j), fn in terms.items():
                share += fn(x[i] - x[j])
            shares[judge] = share
        return shares

    def object_shares(self, scores: Mapping) -> dict:
        """Objective value split by object; a pair's value counts at both endpoints."""
        x = {obj: as_score(scores[obj]) for obj in self.objects}
        shares: dict = {obj: Fraction(0) for obj in self.objects}
        for (i, j), fn in self.pair_terms.items():
            value = fn(x[i] - x[j])
            shares[i] += value
            shares[j] += value
        for obj, fn in self.object_terms.items():
            shares[obj] += fn(x[obj])
        return shares


class _MapBuilder:
    """Accumulates folded, judge-tagged pair terms before freezing a map."""

    def __init__(self, grid: ScoreScale, objects: Iterable, orientation: str):
        self.grid = grid
        self.objects = tuple(sorted(set(objects), key=id_key))
        self.position = {obj: idx for idx, obj in enumerate(self.objects)}
        self.orientation = orientation
        self.by_judge: dict = {}

    def add_pair(self, judge, i, j, fn: PiecewiseLinearFn) -> None:
        if fn.is_zero:
            return
        if i not in self.position or j not in self.position:
            raise ValueError(
                f"judge {judge} evaluates ({i}, {j}) outside the ground set; "
                "run validate() on the evaluation set"
            )
        if self.position[i] >= self.position[j]:
            i, j, fn = j, i, fn.reflected()
        terms = self.by_judge.setdefault(judge, {})
        terms[(i, j)] = terms.get((i, j), PiecewiseLinearFn.zero()) + fn

    def build(self) -> PairPenaltyMap:
        pair_terms: dict = {}
        judge_terms: dict = {}
        for judge in sorted(self.by_judge, key=id_key):
            folded = {
                pair: self.by_judge[judge][pair]
                for pair in sorted(self.by_judge[judge], key=lambda p: (id_key(p[0]), id_key(p[1])))
            }
            judge_terms[judge] = folded
            for pair, fn in folded.items():
                pair_terms[pair] = pair_terms.get(pair, PiecewiseLinearFn.zero()) + fn
        ordered_pairs = sorted(pair_terms, key=lambda p: (id_key(p[0]), id_key(p[1])))
        return PairPenaltyMap(
            grid=self.grid,
            objects=self.objects,
            pair_terms={pair: pair_terms[pair] for pair in ordered_pairs},
            object_terms={},
            judge_pair_terms=judge_terms,
            orientation=self.orientation,
        )


def build_rating_terms(evals: EvaluationSet) -> PairPenaltyMap:
    """Objective for fitting a complete score vector to all judges' rating gaps.

    Each judge with at least two rated objects contributes, for every ordered
    pair (i, j) of their support, the penalty w * |z_ij - gap_ij| with the
    judge's rating normalizer as weight. Judges rating fewer than two objects
    contribute nothing.
    """
    builder = _MapBuilder(evals.scale, evals.objects, SCORE_TARGET)
    for evaluation in evals.judges:
        rating = evaluation.rating
        if rating is None or len(rating.support) < 2:
            continue
        weight = rating_pair_weight(len(rating.support), evals.scale.span)
        support = sorted(rating.support, key=id_key)
        for i in support:
            for j in support:
                if i == j:
                    continue
                gap = rating.scores[i] - rating.scores[j]
                builder.add_pair(evaluation.judge, i, j, PiecewiseLinearFn.absolute(gap, weight))
    return builder.build()


def build_ranking_terms(
    evals: EvaluationSet, target: str = SCORE_TARGET, strict_sep=1
) -> PairPenaltyMap:
    """Objective for fitting a complete vector to all judges' rankings.

    ``target`` selects what the solved-for vector means. With "scores"
    (higher is better) a judge preferring i over j wants z_ij positive; with
    "ranks" (lower is better, solved on an integer grid of 1..n) the wanted
    sign flips. ``strict_sep`` is the difference, in the vector's own units,
    at which a preference counts as fully honored; it defaults to one whole
    point, which on a half-unit score grid means two grid steps.
    """
    if target not in (SCORE_TARGET, RANK_TARGET):
        raise ValueError(f"target must be {SCORE_TARGET!r} or {RANK_TARGET!r}")
    if target == RANK_TARGET:
        grid = ScoreScale(1, max(evals.n, 2), 1)
    else:
        grid = evals.scale
    builder = _MapBuilder(grid, evals.objects, target)
    for evaluation in evals.judges:
        ranking = evaluation.ranking
        if ranking is None or len(ranking.support) < 2:
            continue
        weight = ranking_pair_weight(len(ranking.support))
        support = sorted(ranking.support, key=id_key)
        for i in support:
            for j in support:
                if i == j:
                    continue
                wanted = sign(ranking.ranks[i] - ranking.ranks[j])
                if target == SCORE_TARGET:
                    wanted = -wanted  # good rank (low) must become high score
                builder.add_pair(
                    evaluation.judge,
                    i,
                    j,
                    PiecewiseLinearFn.direction_penalty(wanted, strict_sep, weight),
                )
    return builder.build()


def build_cat(evals: EvaluationSet, w_rating=1, w_ranking=1, strict_sep=1) -> PairPenaltyMap:
    """Combined objective: weighted rating terms plus score-target ranking terms.

    With the default 1:1 weights the two sides count equally, which the
    normalized per-judge weights already make meaningful; other weightings
    are allowed when the decision context justifies them. A zero weight
    drops that side entirely, so (1, 0) is exactly the rating objective and
    (0, 1) exactly the ranking objective.
    """
    w_rating, w_ranking = as_score(w_rating), as_score(w_ranking)
    if w_rating < 0 or w_ranking < 0:
        raise ValueError("weights must be nonnegative")
    if w_rating == 0 and w_ranking == 0:
        raise ValueError("at least one of the weights must be positive")
    parts = []
    if w_rating > 0:
        parts.append(_scaled_map(build_rating_terms(evals), w_rating))
    if w_ranking > 0:
        parts.append(_scaled_map(build_ranking_terms(evals, SCORE_TARGET, strict_sep), w_ranking))
    if len(parts) == 1:
        return parts[0]
    return _merged_map(parts)


def _scaled_map(pmap: PairPenaltyMap, factor) -> PairPenaltyMap:
    factor = as_score(factor)
    if factor == 1:
        return pmap
    return PairPenaltyMap(
        grid=pmap.grid,
        objects=pmap.objects,
        pair_terms={pair: fn.scaled(factor) for pair, fn in pmap.pair_terms.items()},
        object_terms={obj: fn.scaled(factor) for obj, fn in pmap.object_terms.items()},
        judge_pair_terms={
            judge: {pair: fn.scaled(factor) for pair, fn in terms.items()}
            for judge, terms in pmap.judge_pair_terms.items()
        },
        orientation=pmap.orientation,
    )


def _merged_map(parts: list[PairPenaltyMap]) -> PairPenaltyMap:
    first = parts[0]
    if any(p.grid != first.grid or p.objects != first.objects or p.orientation != first.orientation for p in parts):
        raise ValueError("can only merge maps over the same grid, objects, and orientation")
    pair_terms: dict = {}
    object_terms: dict = {}
    judge_terms: dict = {}
    for part in parts:
        for pair, fn in part.pair_terms.items():
            pair_terms[pair] = pair_terms.get(pair, PiecewiseLinearFn.zero()) + fn
        for obj, fn in part.object_terms.items():
            object_terms[obj] = object_terms.get(obj, PiecewiseLinearFn.zero()) + fn
        for judge, terms in part.judge_pair_terms.items():
            folded = judge_terms.setdefault(judge, {})
            for pair, fn in terms.items():
                folded[pair] = folded.get(pair, PiecewiseLinearFn.zero()) + fn
    ordered = sorted(pair_terms, key=lambda p: (id_key(p[0]), id_key(p[1])))
    return PairPenaltyMap(
        grid=first.grid,
        objects=first.objects,
        pair_terms={pair: pair_terms[pair] for pair in ordered},
        object_terms={obj: object_terms[obj] for obj in sorted(object_terms, key=id_key)},
        judge_pair_terms={
            judge: judge_terms[judge] for judge in sorted(judge_terms, key=id_key)
        },
        orientation=first.orientation,
    )
