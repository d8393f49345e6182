"""Command-line front end.

Four subcommands over one CSV input format (``judge,object,score,rank``):

* ``validate``  - report structural problems and exit accordingly.
* ``distances`` - pairwise judge-vs-judge distance matrices.
* ``aggregate`` - consensus rating, consensus ranking, and the combined
  rating/ranking pair, with their distance totals.
* ``analyze``   - contribution diagnostics, judge-adjusted scores, the
  rating-vs-ranking partial order, and the conflict graph.

Each subcommand prints its primary table to stdout; with ``--out-dir`` it
also writes CSV/JSON/DOT artifacts and PNG figures there, filtered by
``--format``. Identical inputs and flags produce byte-identical outputs.

Exit codes: 0 success, 1 invalid input data, 2 usage error.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import analysis, report, solver
from .distance import npck, npks, total_ranking_distance, total_rating_distance
from .model import (
    EvaluationError,
    EvaluationSet,
    ParseError,
    ScoreScale,
    id_key,
    parse_evaluations,
    validate,
)
from .penalty import build_cat, build_rating_terms

ALL_FORMATS = ("csv", "json", "dot", "png")


def _fraction_flag(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")


def _scale_flag(text: str) -> ScoreScale:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected lower,upper,unit (e.g. 1,10,0.5)")
    try:
        return ScoreScale(*(Fraction(p) for p in parts))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _weights_flag(text: str) -> tuple[Fraction, Fraction]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected rating,ranking weights (e.g. 1,1)")
    try:
        weights = tuple(Fraction(p) for p in parts)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not numbers: {text!r}")
    if any(w < 0 for w in weights) or weights == (0, 0):
        raise argparse.ArgumentTypeError("weights must be nonnegative and not both zero")
    return weights


def _formats_flag(text: str) -> tuple[str, ...]:
    chosen = tuple(part.strip() for part in text.split(",") if part.strip())
    unknown = [f for f in chosen if f not in ALL_FORMATS]
    if unknown:
        raise argparse.ArgumentTypeError(f"unknown format(s): {', '.join(unknown)}")
    return chosen


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="panelrank",
        description="Aggregate incomplete judge ratings and rankings into a consensus.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(cmd: argparse.ArgumentParser) -> None:
        cmd.add_argument("--in", dest="input", required=True, help="evaluation CSV file")
        cmd.add_argument(
            "--scale",
            type=_scale_flag,
            default=ScoreScale(1, 10, Fraction(1, 2)),
            help="score scale as lower,upper,unit (default 1,10,0.5)",
        )
        cmd.add_argument("--out-dir", dest="out_dir", default=None, help="directory for output files")
        cmd.add_argument(
            "--format",
            dest="formats",
            type=_formats_flag,
            default=ALL_FORMATS,
            help="comma list of output kinds to write: csv,json,dot,png (default all)",
        )

    common(sub.add_parser("validate", help="check an evaluation file and report findings"))
    common(sub.add_parser("distances", help="pairwise judge distance matrices"))

    aggregate = sub.add_parser("aggregate", help="solve the three aggregation problems")
    common(aggregate)
    aggregate.add_argument(
        "--weights",
        type=_weights_flag,
        default=(Fraction(1), Fraction(1)),
        help="rating,ranking weights for the combined solve (default 1,1)",
    )
    aggregate.add_argument(
        "--strict-sep",
        dest="strict_sep",
        type=_fraction_flag,
        default=Fraction(1),
        help="score difference that fully honors a rank preference (default 1)",
    )

    analyze = sub.add_parser("analyze", help="diagnose disagreements around the consensus")
    common(analyze)
    analyze.add_argument("--weights", type=_weights_flag, default=(Fraction(1), Fraction(1)))
    analyze.add_argument("--strict-sep", dest="strict_sep", type=_fraction_flag, default=Fraction(1))

    return parser


def _load(args) -> tuple[EvaluationSet, object]:
    text = Path(args.input).read_text(encoding="utf-8")
    evals = parse_evaluations(text, args.scale)
    return evals, validate(evals)


def _out_path(args, name: str) -> Path | None:
    if args.out_dir is None:
        return None
    kind = name.rsplit(".", 1)[-1]
    if kind not in args.formats:
        return None
    directory = Path(args.out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    return directory / name

def _write_text(args, name: str, text: str) -> None:
    path = _out_path(args, name)
    if path is not None:
        path.write_text(text, encoding="utf-8", newline="\n")


def _write_json(args, name: str, payload) -> None:
    path = _out_path(args, name)
    if path is not None:
        path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8", newline="\n")


def _print_findings(check) -> None:
    for finding in check.findings:
        print(f"{finding.severity}: {finding.code}: {finding.message}")


def cmd_validate(args) -> int:
    evals, check = _load(args)
    _print_findings(check)
    print(
        f"{len(evals.judges)} judge(s), {evals.n} object(s): "
        f"{len(check.errors)} error(s), {len(check.warnings)} warning(s)"
    )
    _write_json(
        args,
        "validation.json",
        {
            "judges": len(evals.judges),
            "objects": evals.n,
            "findings": [
                {"severity": f.severity, "code": f.code, "message": f.message}
                for f in check.findings
            ],
        },
    )
    return 0 if check.ok else 1


def _gate(check) -> None:
    if not check.ok:
        for finding in check.errors:
            print(f"error: {finding.code}: {finding.message}", file=sys.stderr)
        raise EvaluationError("input failed validation")


def _matrix_csv(judge_ids, matrix) -> str:
    out = io.StringIO()
    out.write("judge," + ",".join(str(j) for j in judge_ids) + "\n")
    for jid, row in zip(judge_ids, matrix):
        out.write(str(jid) + "," + ",".join(report.fmt_fixed(cell) for cell in row) + "\n")
    return out.getvalue()


def cmd_distances(args) -> int:
    evals, check = _load(args)
    _gate(check)
    order = sorted(evals.judges, key=lambda ev: id_key(ev.judge))
    ids = [ev.judge for ev in order]
    rating_matrix = [
        [
            npck(a.rating, b.rating, evals.scale)
            if a.rating is not None and b.rating is not None
            else Fraction(0)
            for b in order
        ]
        for a in order
    ]
    ranking_matrix = [
        [
            npks(a.ranking, b.ranking)
            if a.ranking is not None and b.ranking is not None
            else Fraction(0)
            for b in order
        ]
        for a in order
    ]
    rating_csv = _matrix_csv(ids, rating_matrix)
    ranking_csv = _matrix_csv(ids, ranking_matrix)
    print("# pairwise rating distance")
    print(rating_csv, end="")
    print("# pairwise ranking distance")
    print(ranking_csv, end="")
    _write_text(args, "distances_rating.csv", rating_csv)
    _write_text(args, "distances_ranking.csv", ranking_csv)
    _write_json(
        args,
        "distances.json",
        {
            "judges": [str(j) for j in ids],
            "rating": [[report.as_float(cell) for cell in row] for row in rating_matrix],
            "ranking": [[report.as_float(cell) for cell in row] for row in ranking_matrix],
        },
    )
    png = _out_path(args, "distances.png")
    if png is not None:
        report.render_distance_heatmap(ids, rating_matrix, ranking_matrix, png)
    return 0


def _solve_all(evals: EvaluationSet, weights, strict_sep):
    w_rating, w_ranking = weights
    rating_map = build_rating_terms(evals)
    rating = solver.anchor_to_mean(solver.minimize(rating_map), rating_map, evals)
    ranking = solver.consensus_ranking_convex(evals)
    combined_map = build_cat(evals, w_rating, w_ranking, strict_sep)
    combined = solver.anchor_to_mean(solver.minimize(combined_map), combined_map, evals)
    return rating, ranking, combined


def _aggregate_table(evals, rating, ranking, combined) -> str:
    out = io.StringIO()
    out.write("object,consensus_score,consensus_rank,combined_score,combined_rank\n")
    for obj in evals.objects:
        out.write(
            ",".join(
                [
                    str(obj),
                    report.fmt_score(rating.scores[obj]),
                    str(ranking.implied_ranking.ranks[obj]),
                    report.fmt_score(combined.scores[obj]),
                    str(combined.implied_ranking.ranks[obj]),
                ]
            )
            + "\n"
        )
    return out.getvalue()


def _distance_summary(evals, rating, ranking, combined) -> dict:
    return {
        "consensus_rating_total_rating_distance": total_rating_distance(evals, rating.scores),
        "consensus_ranking_total_ranking_distance": total_ranking_distance(
            evals, ranking.implied_ranking
        ),
        "combined_total_rating_distance": total_rating_distance(evals, combined.scores),
        "combined_total_ranking_distance": total_ranking_distance(
            evals, combined.implied_ranking
        ),
    }


def cmd_aggregate(args) -> int:
    evals, check = _load(args)
    _gate(check)
    rating, ranking, combined = _solve_all(evals, args.weights, args.strict_sep)
    table = _aggregate_table(evals, rating, ranking, combined)
    print(table, end="")
    summary = _distance_summary(evals, rating, ranking, combined)
    for key, value in summary.items():
        print(f"# {key} = {report.fmt_fixed(value)}")
    _write_text(args, "aggregate.csv", table)
    _write_json(
        args,
        "aggregate.json",
        {
            "objects": [str(o) for o in evals.objects],
            "consensus_rating": {
                "scores": {str(o): report.as_float(rating.scores[o]) for o in evals.objects},
                "objective": report.as_float(rating.objective),
            },
            "consensus_ranking": {
                "ranks": {str(o): ranking.implied_ranking.ranks[o] for o in evals.objects},
                "objective": report.as_float(ranking.objective),
            },
            "combined": {
                "scores": {str(o): report.as_float(combined.scores[o]) for o in evals.objects},
                "ranks": {str(o): combined.implied_ranking.ranks[o] for o in evals.objects},
                "objective": report.as_float(combined.objective),
                "weights": [report.as_float(w) for w in args.weights],
            },
            "distance_totals": {key: report.as_float(value) for key, value in summary.items()},
        },
    )
    png = _out_path(args, "aggregate.png")
    if png is not None:
        report.render_aggregate_figure(evals.objects, rating.scores, combined.scores, png)
    return 0


def cmd_analyze(args) -> int:
    evals, check = _load(args)
    _gate(check)
    rating, ranking, combined = _solve_all(evals, args.weights, args.strict_sep)
    contributions = analysis.judge_contributions(evals, combined.scores)
    adjusted = analysis.adjusted_scores(evals)
    order = analysis.partial_order(rating, ranking)
    conflicts = analysis.conflict_pairs(order, rating)
    dot = analysis.conflict_graph_dot(order, rating)

    counts = order.counts()
    print(
        f"pairs: {counts['preferred']} ordered, {counts['tied']} tied, "
        f"{counts['incomparable']} in conflict"
    )
    for a, b in conflicts:
        print(f"conflict: {a} is rated above {b} but ranked below")
    print("# top separation contributors (judges)")
    for judge, share in contributions.top_judges()[:5]:
        print(f"{judge},{report.fmt_fixed(share)}")
    print("# top separation contributors (objects)")
    for obj, share in contributions.top_objects()[:5]:
        print(f"{obj},{report.fmt_fixed(share)}")

    contrib_csv = io.StringIO()
    contrib_csv.write("kind,id,separation_share\n")
    for judge, share in contributions.top_judges():
        contrib_csv.write(f"judge,{judge},{report.fmt_fixed(share)}\n")
    for obj, share in contributions.top_objects():
        contrib_csv.write(f"object,{obj},{report.fmt_fixed(share)}\n")
    _write_text(args, "contributions.csv", contrib_csv.getvalue())

    adjusted_csv = io.StringIO()
    adjusted_csv.write("object,judge,score,judge_mean,adjusted_score,object_mean_adjusted\n")
    for obj, judge, value in adjusted.rows:
        evaluation = next(ev for ev in evals.judges if ev.judge == judge)
        scores = evaluation.rating.scores
        mean = sum(scores.values(), Fraction(0)) / len(scores)
        adjusted_csv.write(
            ",".join(
                [
                    str(obj),
                    str(judge),
                    report.fmt_score(scores[obj]),
                    report.fmt_fixed(mean, 2),
                    report.fmt_fixed(value, 2),
                    report.fmt_fixed(adjusted.object_means[obj], 2),
                ]
            )
            + "\n"
        )
    _write_text(args, "adjusted_scores.csv", adjusted_csv.getvalue())

    _write_text(args, "conflict_graph.dot", dot)
    _write_json(
        args,
        "report.json",
        {
            "consensus": {
                "rating": {
                    "scores": {str(o): report.as_float(rating.scores[o]) for o in evals.objects},
                    "objective": report.as_float(rating.objective),
                },
                "ranking": {
                    "ranks": {str(o): ranking.implied_ranking.ranks[o] for o in evals.objects},
                    "objective": report.as_float(ranking.objective),
                },
                "combined": {
                    "scores": {str(o): report.as_float(combined.scores[o]) for o in evals.objects},
                    "ranks": {str(o): combined.implied_ranking.ranks[o] for o in evals.objects},
                    "objective": report.as_float(combined.objective),
                },
            },
            "contributions": {
                "rating_separation": {
                    "judges": {str(j): report.as_float(s) for j, s in contributions.top_judges()},
                    "objects": {str(o): report.as_float(s) for o, s in contributions.top_objects()},
                },
                "combined_model": {
                    "judges": {
                        str(j): report.as_float(s)
                        for j, s in sorted(
                            combined.decomposition.per_judge.items(),
                            key=lambda kv: (-kv[1], id_key(kv[0])),
                        )
                    },
                    "objects": {
                        str(o): report.as_float(s)
                        for o, s in sorted(
                            combined.decomposition.per_object.items(),
                            key=lambda kv: (-kv[1], id_key(kv[0])),
                        )
                    },
                },
            },
            "conflicts": [[str(a), str(b)] for a, b in conflicts],
        },
    )
    png = _out_path(args, "conflict_graph.png")
    if png is not None:
        report.render_conflict_figure(conflicts, rating.scores, png)
    png = _out_path(args, "contributions.png")
    if png is not None:
        report.render_contribution_figure(
            contributions.per_judge, contributions.per_object, png
        )
    return 0


_COMMANDS = {
    "validate": cmd_validate,
    "distances": cmd_distances,
    "aggregate": cmd_aggregate,
    "analyze": cmd_analyze,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (EvaluationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
