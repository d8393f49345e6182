"""Presentation layer: number formatting and figure rendering.

Everything upstream works in exact rationals; this module is where values
become text (scores as minimal decimals, distances fixed to four places)
and where report figures get drawn. Figures render through the Agg backend
to PNG files with fixed geometry and stripped metadata, so identical inputs
produce identical bytes.
"""

from __future__ import annotations

from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .model import as_score, id_key, score_text

_SAVEFIG = dict(dpi=120, metadata={"Software": None})


def fmt_fixed(value, places: int = 4) -> str:
    """Fixed-point decimal with ``places`` digits, rounding half away from zero."""
    value = as_score(value)
    scaled = value * 10 ** places
    whole = (abs(scaled.numerator) * 2 + scaled.denominator) // (2 * scaled.denominator)
    sign_ = "-" if value < 0 and whole else ""
    digits = str(whole).rjust(places + 1, "0")
    return f"{sign_}{digits[:-places]}.{digits[-places:]}"


def fmt_score(value) -> str:
    """Minimal exact rendering of a score (7, 4.5, ...)."""
    return score_text(value)


def as_float(value) -> float:
    """Rational to float rounded at four decimals, for JSON payloads."""
    return float(round(as_score(value), 4))


def render_conflict_figure(
    conflicts: Sequence[tuple], scores: Mapping, path
) -> None:
    """Draw the conflict graph: score rows top-down, one arrow per conflict."""
    objects = sorted(scores, key=id_key)
    groups: dict = {}
    for obj in objects:
        groups.setdefault(scores[obj], []).append(obj)
    positions = {}
    for value in sorted(groups, reverse=True):
        row = groups[value]
        for slot, obj in enumerate(row):
            positions[obj] = (slot - (len(row) - 1) / 2, float(value))

    fig, ax = plt.subplots(figsize=(8, 6))
    for a, b in conflicts:
        xa, ya = positions[a]
        xb, yb = positions[b]
        ax.annotate(
            "",
            xy=(xb, yb),
            xytext=(xa, ya),
            arrowprops=dict(arrowstyle="-|>", color="firebrick", lw=1.2, shrinkA=12, shrinkB=12),
        )
    for obj, (x, y) in positions.items():
        ax.plot(x, y, "o", ms=22, mfc="white", mec="black", zorder=3)
        ax.annotate(str(obj), (x, y), ha="center", va="center", fontsize=8, zorder=4)
    ax.set_ylabel("consensus score")
    ax.set_title("score order vs. rank order conflicts")
    ax.set_xticks([])
    fig.tight_layout()
    fig.savefig(path, **_SAVEFIG)
    plt.close(fig)


def render_contribution_figure(per_judge: Mapping, per_object: Mapping, path) -> None:
    """Horizontal bars of separation-penalty shares, judges beside objects."""
    fig, (ax_judges, ax_objects) = plt.subplots(1, 2, figsize=(10, 6))
    for ax, shares, title in (
        (ax_judges, per_judge, "by judge"),
        (ax_objects, per_object, "by object"),
    ):
        items = sorted(shares.items(), key=lambda kv: (kv[1], id_key(kv[0])))
        labels = [str(key) for key, _ in items]
        values = [float(value) for _, value in items]
        ax.barh(range(len(items)), values, color="steelblue")
        ax.set_yticks(range(len(items)), labels=labels, fontsize=8)
        ax.set_title(f"separation penalty {title}")
    fig.tight_layout()
    fig.savefig(path, **_SAVEFIG)
    plt.close(fig)


def render_distance_heatmap(
    judge_ids: Sequence, rating_matrix: Sequence[Sequence], ranking_matrix: Sequence[Sequence], path
) -> None:
    """Side-by-side heatmaps of pairwise judge distances (ratings, rankings)."""
    fig, axes = plt.subplots(1, 2, figsize=(11, 5))
    labels = [str(j) for j in judge_ids]
    for ax, matrix, title in (
        (axes[0], rating_matrix, "rating distance"),
        (axes[1], ranking_matrix, "ranking distance"),
    ):
        data = [[float(cell) for cell in row] for row in matrix]
        image = ax.imshow(data, vmin=0.0, vmax=1.0, cmap="viridis")
        ax.set_xticks(range(len(labels)), labels=labels, fontsize=7, rotation=90)
        ax.set_yticks(range(len(labels)), labels=labels, fontsize=7)
        ax.set_title(title)
        fig.colorbar(image, ax=ax, fraction=0.046)
    fig.tight_layout()
    fig.savefig(path, **_SAVEFIG)
    plt.close(fig)


def render_aggregate_figure(
    objects: Sequence, consensus: Mapping, combined: Mapping, path
) -> None:
    """Grouped bars comparing the rating-only and the combined score per object."""
    fig, ax = plt.subplots(figsize=(max(6, 0.45 * len(objects)), 4.5))
    xs = range(len(objects))
    width = 0.4
    ax.bar(
        [x - width / 2 for x in xs],
        [float(consensus[obj]) for obj in objects],
        width,
        label="consensus rating",
        color="steelblue",
    )
    ax.bar(
        [x + width / 2 for x in xs],
        [float(combined[obj]) for obj in objects],
        width,
        label="combined rating",
        color="darkorange",
    )
    ax.set_xticks(list(xs), labels=[str(o) for o in objects], fontsize=7, rotation=90)
    ax.set_ylabel("score")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, **_SAVEFIG)
    plt.close(fig)
