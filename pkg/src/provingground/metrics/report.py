"""Aggregation of episode results into leaderboard-style tables."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Sequence

from provingground.metrics.scores import INFRACTION_KINDS, EpisodeResult

CSV_COLUMNS = ("agent", "item", "variant", "R", "P", "RP") + tuple(
    f"n_{kind}" for kind in INFRACTION_KINDS
)


@dataclass(frozen=True)
class ItemRow:
    """Per-(agent, item) means over that item's variants."""

    agent: str
    item: str
    variants: int
    completion: float
    penalty: float
    score: float
    infraction_counts: dict[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class Report:
    """Aggregated batch results: variant rows, item rows, per-agent averages."""

    results: tuple[EpisodeResult, ...]
    item_rows: tuple[ItemRow, ...]
    averages: dict[str, dict[str, float]]

    def to_csv(self, delimiter: str = ",") -> str:
        """Delimiter-separated per-variant table with fixed columns."""
        out = io.StringIO()
        out.write(delimiter.join(CSV_COLUMNS) + "\n")
        for r in self.results:
            cells = [r.agent, r.item, str(r.variant), repr(r.completion), repr(r.penalty), repr(r.score)]
            cells += [str(r.infraction_counts.get(kind, 0)) for kind in INFRACTION_KINDS]
            out.write(delimiter.join(cells) + "\n")
        return out.getvalue()

    def to_dict(self) -> dict:
        """Structured summary: item means and per-agent overall averages."""
        return {
            "items": [
                {
                    "agent": row.agent,
                    "item": row.item,
                    "variants": row.variants,
                    "R": row.completion,
                    "P": row.penalty,
                    "RP": row.score,
                    "infractions": {k: row.infraction_counts.get(k, 0) for k in INFRACTION_KINDS},
                }
                for row in self.item_rows
            ],
            "averages": {
                agent: {"R": vals["R"], "P": vals["P"], "RP": vals["RP"]}
                for agent, vals in sorted(self.averages.items())
            },
        }


def aggregate_report(results: Sequence[EpisodeResult]) -> Report:
    """Aggregate episode results into per-item means and per-agent averages.

    Item rows average R, P and RP over the item's variants and sum its
    infraction counts. The per-agent overall average weights every item
    uniformly regardless of its variant count, and the whole aggregation is
    invariant to the order of `results`.
    """
    if not results:
        raise ValueError("no results to aggregate")
    ordered = sorted(results, key=lambda r: (r.agent, r.item, r.variant, r.instance_id))

    groups: dict[tuple[str, str], list[EpisodeResult]] = {}
    for r in ordered:
        groups.setdefault((r.agent, r.item), []).append(r)

    item_rows = []
    for (agent, item), members in sorted(groups.items()):
        n = len(members)
        counts: dict[str, int] = {}
        for m in members:
            for kind, c in m.infraction_counts.items():
                counts[kind] = counts.get(kind, 0) + c
        item_rows.append(
            ItemRow(
                agent=agent,
                item=item,
                variants=n,
                completion=sum(m.completion for m in members) / n,
                penalty=sum(m.penalty for m in members) / n,
                score=sum(m.score for m in members) / n,
                infraction_counts=counts,
            )
        )

    averages: dict[str, dict[str, float]] = {}
    for agent in sorted({row.agent for row in item_rows}):
        rows = [row for row in item_rows if row.agent == agent]
        averages[agent] = {
            "R": sum(r.completion for r in rows) / len(rows),
            "P": sum(r.penalty for r in rows) / len(rows),
            "RP": sum(r.score for r in rows) / len(rows),
        }
    return Report(results=tuple(ordered), item_rows=tuple(item_rows), averages=averages)
