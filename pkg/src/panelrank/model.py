"""Domain model for incomplete judge evaluations.

Judges evaluate a subset of a ground set of objects in two currencies:
cardinal scores on a bounded grid, and ordinal ranks (1 = most preferred,
ties allowed). Either side may be absent for a judge. This module holds the
data types, the CSV ingestion/serialization pair, structural validation,
and the elementary order operations everything else builds on.

All score arithmetic is exact: scores are ``fractions.Fraction`` values and
stay that way through every computation in the package.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import groupby
from typing import Mapping


class EvaluationError(Exception):
    """Base class for errors raised by panelrank."""


class ParseError(EvaluationError):
    """Malformed evaluation CSV content."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


class InstanceTooLargeError(EvaluationError):
    """An exhaustive routine was asked to enumerate an infeasible space."""


def id_key(identifier) -> tuple:
    """Deterministic sort key for judge and object ids.

    Numeric ids order numerically and come before non-numeric ids, so data
    keyed by ids prints in the order people expect ("2" before "10").
    """
    text = str(identifier)
    body = text[1:] if text[:1] == "-" else text
    if body.isdigit():
        return (0, int(text), "")
    return (1, 0, text)


def as_score(value) -> Fraction:
    """Coerce ``value`` to an exact rational.

    Accepts ints, Fractions, numeric strings ("7", "4.5", "9/2"), and floats
    (converted through their shortest decimal form, so 4.5 means 9/2).
    """
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"score must be finite, got {value!r}")
        return Fraction(str(value))
    return Fraction(value)


def score_text(value) -> str:
    """Render a rational exactly: a decimal when terminating, else ``p/q``."""
    value = as_score(value)
    if value.denominator == 1:
        return str(value.numerator)
    den = value.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{value.numerator}/{value.denominator}"
    places = max(twos, fives)
    digits = str(abs(value.numerator) * 10 ** places // value.denominator).rjust(places + 1, "0")
    sign_ = "-" if value < 0 else ""
    return f"{sign_}{digits[:-places]}.{digits[-places:]}"


def sign(x) -> int:
    """Sign of a finite number: -1, 0, or +1."""
    if isinstance(x, float) and not math.isfinite(x):
        raise ValueError("sign is defined for finite values only")
    if x < 0:
        return -1
    if x > 0:
        return 1
    return 0


@dataclass(frozen=True)
class ScoreScale:
    """Inclusive score interval ``[lower, upper]`` with a fixed grading unit.

    Valid scores are ``lower + k * unit`` for integer ``k``; the interval
    width must be a whole number of units.
    """

    lower: Fraction
    upper: Fraction
    unit: Fraction = Fraction(1, 2)

    def __post_init__(self):
        object.__setattr__(self, "lower", as_score(self.lower))
        object.__setattr__(self, "upper", as_score(self.upper))
        object.__setattr__(self, "unit", as_score(self.unit))
        if not self.lower < self.upper:
            raise ValueError(f"scale needs lower < upper, got [{self.lower}, {self.upper}]")
        if not self.unit > 0:
            raise ValueError(f"grading unit must be positive, got {self.unit}")
        if (self.upper - self.lower) % self.unit != 0:
            raise ValueError(
                f"interval width {self.upper - self.lower} is not a multiple of unit {self.unit}"
            )

    @property
    def span(self) -> Fraction:
        """Width ``upper - lower`` of the scale."""
        return self.upper - self.lower

    @property
    def level_count(self) -> int:
        """Number of valid grid scores."""
        return int((self.upper - self.lower) / self.unit) + 1

    def score_at(self, level: int) -> Fraction:
        return self.lower + self.unit * level

    def level_of(self, score) -> int:
        score = as_score(score)
        if not self.contains(score):
            raise ValueError(f"score {score} is not on the scale {self}")
        return int((score - self.lower) / self.unit)

    def contains(self, score) -> bool:
        score = as_score(score)
        return self.lower <= score <= self.upper and (score - self.lower) % self.unit == 0

    def grid(self) -> list[Fraction]:
        return [self.score_at(t) for t in range(self.level_count)]


@dataclass(frozen=True)
class IncompleteRating:
    """One judge's cardinal scores over the subset of objects they rated.

    Scores are expected to lie on the evaluation set's scale; that is checked
    at ingestion and by :func:`validate`, not here (the rating itself does
    not know the scale). An empty rating is not allowed; model "no rating"
    as ``None`` on :class:`JudgeEvaluation` instead.
    """

    judge: object
    scores: dict = field(default_factory=dict)

    def __post_init__(self):
        coerced = {obj: as_score(value) for obj, value in dict(self.scores).items()}
        if not coerced:
            raise ValueError(f"judge {self.judge}: a rating must score at least one object")
        object.__setattr__(self, "scores", coerced)

    @property
    def support(self) -> frozenset:
        return frozenset(self.scores)


@dataclass(frozen=True)
class IncompleteRanking:
    """One judge's ordinal ranks over the subset of objects they ranked.

    Ranks are positive integers, 1 = most preferred, ties allowed. Only the
    order relation between ranks carries meaning; values need not be
    consecutive or start at 1.
    """

    judge: object
    ranks: dict = field(default_factory=dict)

    def __post_init__(self):
        coerced = {}
        for obj, value in dict(self.ranks).items():
            if isinstance(value, bool) or not isinstance(value, int):
                raise ValueError(f"judge {self.judge}: rank of {obj} must be an integer, got {value!r}")
            if value <= 0:
                raise ValueError(f"judge {self.judge}: rank of {obj} must be positive, got {value}")
            coerced[obj] = value
        if not coerced:
            raise ValueError(f"judge {self.judge}: a ranking must rank at least one object")
        object.__setattr__(self, "ranks", coerced)

    @property
    def support(self) -> frozenset:
        return frozenset(self.ranks)


@dataclass(frozen=True)
class JudgeEvaluation:
    """A judge's rating/ranking pair; either side may be absent, not both."""

    judge: object
    rating: IncompleteRating | None = None
    ranking: IncompleteRanking | None = None

    def __post_init__(self):
        if self.rating is None and self.ranking is None:
            raise ValueError(f"judge {self.judge}: needs a rating, a ranking, or both")
        for part in (self.rating, self.ranking):
            if part is not None and part.judge != self.judge:
                raise ValueError(
                    f"judge id mismatch: evaluation is for {self.judge!r}, part is for {part.judge!r}"
                )

    @property
    def rating_support(self) -> frozenset:
        return self.rating.support if self.rating is not None else frozenset()

    @property
    def ranking_support(self) -> frozenset:
        return self.ranking.support if self.ranking is not None else frozenset()

    @property
    def support(self) -> frozenset:
        return self.rating_support | self.ranking_support


@dataclass(frozen=True)
class EvaluationSet:
    """All judges' evaluations over a common ground set of objects.

    The ground set may include objects nobody evaluated. Structural problems
    (too few objects, duplicate judges, stray objects) are reported by
    :func:`validate`, not rejected here, so that defective inputs can be
    loaded and diagnosed.
    """

    objects: tuple
    judges: tuple[JudgeEvaluation, ...]
    scale: ScoreScale

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(sorted(set(self.objects), key=id_key)))
        object.__setattr__(self, "judges", tuple(self.judges))

    @property
    def n(self) -> int:
        return len(self.objects)

    @property
    def judge_ids(self) -> list:
        return [j.judge for j in self.judges]


@dataclass(frozen=True)
class GapMatrix:
    """Score differences implied by one rating, for every ordered pair rated.

    ``gaps[(i, j)]`` is the rater's score for ``i`` minus their score for
    ``j``; pairs outside the rating's support are absent. Antisymmetry and
    additive consistency along triples hold by construction and are checked.
    """

    gaps: dict

    def __post_init__(self):
        gaps = {pair: as_score(value) for pair, value in dict(self.gaps).items()}
        object.__setattr__(self, "gaps", gaps)
        for (i, j), value in gaps.items():
            if gaps.get((j, i)) != -value:
                raise ValueError(f"gap matrix is not antisymmetric at ({i}, {j})")
        support = sorted({i for i, _ in gaps}, key=id_key)
        for i in support:
            for j in support:
                for k in support:
                    if i != j != k and i != k:
                        if gaps[(i, j)] + gaps[(j, k)] != gaps[(i, k)]:
                            raise ValueError(f"gaps are inconsistent on triple ({i}, {j}, {k})")

    @property
    def support(self) -> frozenset:
        return frozenset(i for i, _ in self.gaps)

    def get(self, i, j) -> Fraction | None:
        return self.gaps.get((i, j))


@dataclass(frozen=True)
class Ranking:
    """A complete competition ranking: rank = 1 + number of strictly better objects.

    Ties share a rank and the following rank values are skipped (the "1224"
    scheme), which the constructor enforces.
    """

    ranks: dict

    def __post_init__(self):
        coerced = {}
        for obj, value in dict(self.ranks).items():
            if isinstance(value, bool) or not isinstance(value, int):
                raise ValueError(f"rank of {obj} must be an integer, got {value!r}")
            coerced[obj] = value
        if not coerced:
            raise ValueError("a ranking must cover at least one object")
        object.__setattr__(self, "ranks", coerced)
        placed = 0
        for value, members in groupby(sorted(coerced.values())):
            if value != placed + 1:
                raise ValueError(
                    f"rank {value} breaks the competition scheme (expected {placed + 1})"
                )
            placed += len(list(members))

    @property
    def objects(self) -> frozenset:
        return frozenset(self.ranks)

    def as_incomplete(self, judge="consensus") -> IncompleteRanking:
        """View this ranking as a judge-style incomplete ranking."""
        return IncompleteRanking(judge, dict(self.ranks))


def rank_from_scores(scores: Mapping) -> Ranking:
    """Competition ranking implied by scores: higher score, better (smaller) rank."""
    values = {obj: as_score(v) for obj, v in scores.items()}
    return Ranking(
        {obj: 1 + sum(1 for w in values.values() if w > v) for obj, v in values.items()}
    )


def separation_gaps(rating: IncompleteRating) -> GapMatrix:
    """Pairwise score differences implied by one rating."""
    support = sorted(rating.scores, key=id_key)
    return GapMatrix(
        {
            (i, j): rating.scores[i] - rating.scores[j]
            for i in support
            for j in support
            if i != j
        }
    )


# --- CSV ingestion and serialization

CSV_HEADER = ("judge", "object", "score", "rank")
_OBJECTS_PRAGMA = "# objects:"


def parse_evaluations(text: str, scale: ScoreScale) -> EvaluationSet:
    """Parse evaluation rows from CSV text.

    Expected header: ``judge,object,score,rank``. Score and rank may each be
    blank, but not both. ``#``-prefixed lines are comments and are ignored;
    a ``# objects: a b c`` comment may declare ground-set members that have
    no evaluation rows. Raises :class:`ParseError` with the offending line
    number for malformed rows, off-scale scores, non-positive ranks, and
    duplicate (judge, object) rows.
    """
    declared_objects: list[str] = []
    data_lines: list[tuple[int, str]] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            if stripped.lower().startswith(_OBJECTS_PRAGMA):
                declared_objects.extend(stripped[len(_OBJECTS_PRAGMA):].split())
            continue
        data_lines.append((line_no, raw))
    if not data_lines:
        raise ParseError("missing header row")

    header_no, header_raw = data_lines[0]
    header = tuple(cell.strip().lower() for cell in next(csv.reader([header_raw])))
    if header != CSV_HEADER:
        raise ParseError(f"expected header {','.join(CSV_HEADER)!r}", header_no)

    scores: dict[str, dict] = {}
    ranks: dict[str, dict] = {}
    judge_order: list[str] = []
    seen: set[tuple[str, str]] = set()
    for line_no, raw in data_lines[1:]:
        cells = next(csv.reader([raw]))
        if len(cells) != 4:
            raise ParseError(f"expected 4 fields, got {len(cells)}", line_no)
        judge, obj, score_cell, rank_cell = (cell.strip() for cell in cells)
        if not judge or not obj:
            raise ParseError("judge and object ids must be non-empty", line_no)
        if not score_cell and not rank_cell:
            raise ParseError("row must carry a score, a rank, or both", line_no)
        if (judge, obj) in seen:
            raise ParseError(f"duplicate row for judge {judge} and object {obj}", line_no)
        seen.add((judge, obj))
        if judge not in scores:
            scores[judge] = {}
            ranks[judge] = {}
            judge_order.append(judge)
        if score_cell:
            try:
                value = Fraction(score_cell)
            except (ValueError, ZeroDivisionError):
                raise ParseError(f"unreadable score {score_cell!r}", line_no) from None
            if not scale.contains(value):
                raise ParseError(
                    f"score {score_cell} is outside [{score_text(scale.lower)}, "
                    f"{score_text(scale.upper)}] or off the {score_text(scale.unit)} grid",
                    line_no,
                )
            scores[judge][obj] = value
        if rank_cell:
            try:
                rank = int(rank_cell)
            except ValueError:
                raise ParseError(f"unreadable rank {rank_cell!r}", line_no) from None
            if rank <= 0:
                raise ParseError(f"rank must be positive, got {rank}", line_no)
            ranks[judge][obj] = rank

    judges = []
    objects: set = set(declared_objects)
    for judge in judge_order:
        rating = IncompleteRating(judge, scores[judge]) if scores[judge] else None
        ranking = IncompleteRanking(judge, ranks[judge]) if ranks[judge] else None
        evaluation = JudgeEvaluation(judge, rating, ranking)
        judges.append(evaluation)
        objects |= evaluation.support
    return EvaluationSet(tuple(objects), tuple(judges), scale)


def serialize_evaluations(evals: EvaluationSet) -> str:
    """Serialize an evaluation set to the CSV format :func:`parse_evaluations` reads.

    Round-trips exactly: the ground set is recorded in a ``# objects:``
    comment and judge order is preserved.
    """
    import io

    out = io.StringIO()
    out.write(_OBJECTS_PRAGMA + " " + " ".join(str(o) for o in evals.objects) + "\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for evaluation in evals.judges:
        for obj in sorted(evaluation.support, key=id_key):
            score = evaluation.rating.scores.get(obj) if evaluation.rating else None
            rank = evaluation.ranking.ranks.get(obj) if evaluation.ranking else None
            writer.writerow(
                [
                    str(evaluation.judge),
                    str(obj),
                    score_text(score) if score is not None else "",
                    str(rank) if rank is not None else "",
                ]
            )
    return out.getvalue()


# --- Structural validation

@dataclass(frozen=True)
class Finding:
    severity: str  # "error" or "warning"
    code: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...]

    @property
    def errors(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity == "error")

    @property
    def warnings(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity == "warning")

    @property
    def ok(self) -> bool:
        return not self.errors


def validate(evals: EvaluationSet) -> ValidationReport:
    """Report structural problems in an evaluation set.

    Errors: fewer than two objects, duplicate judge ids, evaluated objects
    missing from the ground set, off-scale scores. Warning: a judge whose
    rating and ranking supports are both smaller than two contributes no
    pairwise information to any objective.
    """
    findings: list[Finding] = []
    if evals.n < 2:
        findings.append(
            Finding("error", "too-few-objects", f"ground set has {evals.n} object(s); need at least 2")
        )
    seen_ids: set = set()
    ground = set(evals.objects)
    for evaluation in evals.judges:
        jid = evaluation.judge
        if jid in seen_ids:
            findings.append(Finding("error", "duplicate-judge", f"judge id {jid} appears more than once"))
        seen_ids.add(jid)
        stray = sorted(evaluation.support - ground, key=id_key)
        if stray:
            findings.append(
                Finding(
                    "error",
                    "unknown-object",
                    f"judge {jid} evaluates objects outside the ground set: {', '.join(map(str, stray))}",
                )
            )
        if evaluation.rating is not None:
            bad = sorted(
                (o for o, s in evaluation.rating.scores.items() if not evals.scale.contains(s)),
                key=id_key,
            )
            if bad:
                findings.append(
                    Finding(
                        "error",
                        "off-scale-score",
                        f"judge {jid} has off-scale scores for: {', '.join(map(str, bad))}",
                    )
                )
        if len(evaluation.rating_support) < 2 and len(evaluation.ranking_support) < 2:
            findings.append(
                Finding(
                    "warning",
                    "no-pairwise-information",
                    f"judge {jid} evaluates fewer than two objects on both sides; "
                    "they contribute nothing to any pairwise objective",
                )
            )
    return ValidationReport(tuple(findings))
