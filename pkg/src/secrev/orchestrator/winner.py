"""Select the provider/strategy combination with the best suitability rate.

Rate for a combination = adjudicated-suitable cells / total cells. Ties
break by higher annotator kappa (a combination judged consistently beats a
noisy one), then lexicographically by provider id and strategy; the rule
that decided is recorded in the output.
"""

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from secrev.errors import IncompleteLabels
from secrev.metrics.kappa import cohen_kappa


@dataclass(frozen=True)
class CellLabel:
    cell_id: str
    provider_id: str
    strategy: str
    verdict_a: bool
    verdict_b: bool
    final_verdict: bool


@dataclass(frozen=True)
class ComboScore:
    provider_id: str
    strategy: str
    n_cells: int
    suitable: int
    rate: float
    kappa: float

    def to_dict(self) -> dict:
        return {
            "provider_id": self.provider_id,
            "strategy": self.strategy,
            "n_cells": self.n_cells,
            "suitable": self.suitable,
            "rate": self.rate,
            "kappa": self.kappa,
        }


@dataclass(frozen=True)
class WinnerReport:
    provider_id: str
    strategy: str
    decided_by: str  # "rate", "kappa", or "lexicographic"
    ranking: tuple[ComboScore, ...]

    def to_dict(self) -> dict:
        return {
            "provider_id": self.provider_id,
            "strategy": self.strategy,
            "decided_by": self.decided_by,
            "ranking": [c.to_dict() for c in self.ranking],
        }


def cells_from_export(export_items: Iterable[Mapping]) -> list[CellLabel]:
    """Adapt an annotation-session export into cell labels.

    Items must carry meta.cell_id/provider_id/strategy (provenance is hidden
    from annotators but preserved in the export) and a final verdict.
    """
    labels = []
    for item in export_items:
        meta = item.get("meta") or {}
        cid = meta.get("cell_id")
        if not cid:
            raise IncompleteLabels(f"item {item.get('item_id')!r} has no cell_id meta")
        final = item.get("final_verdict")
        if final is None:
            raise IncompleteLabels(f"cell {cid} has no final verdict")
        raw_labels = item.get("labels") or {}
        if len(raw_labels) != 2:
            raise IncompleteLabels(f"cell {cid} is not doubly labeled")
        verdict_a, verdict_b = (raw_labels[k]["verdict"] for k in sorted(raw_labels))
        labels.append(CellLabel(
            cell_id=cid,
            provider_id=meta["provider_id"],
            strategy=meta["strategy"],
            verdict_a=bool(verdict_a),
            verdict_b=bool(verdict_b),
            final_verdict=bool(final),
        ))
    return labels


def select_winner(
    labels: Sequence[CellLabel],
    expected_cells: Iterable[str] | None = None,
) -> WinnerReport:
    """Pick the best combination; every expected cell must be labeled."""
    by_cell = {label.cell_id: label for label in labels}
    if expected_cells is not None:
        missing = sorted(set(expected_cells) - set(by_cell))
        if missing:
            raise IncompleteLabels(
                f"{len(missing)} grid cells lack labels (first: {missing[0]})")
    if not labels:
        raise IncompleteLabels("no labeled cells")

    combos: dict[tuple[str, str], list[CellLabel]] = {}
    for label in by_cell.values():
        combos.setdefault((label.provider_id, label.strategy), []).append(label)

    scores = []
    for (provider_id, strategy), cells in combos.items():
        suitable = sum(c.final_verdict for c in cells)
        kappa = cohen_kappa([c.verdict_a for c in cells],
                            [c.verdict_b for c in cells]).kappa
        scores.append(ComboScore(
            provider_id=provider_id,
            strategy=strategy,
            n_cells=len(cells),
            suitable=suitable,
            rate=suitable / len(cells),
            kappa=kappa,
        ))

    scores.sort(key=lambda s: (-s.rate, -s.kappa, s.provider_id, s.strategy))
    winner = scores[0]
    decided_by = "rate"
    if len(scores) > 1:
        runner_up = scores[1]
        if runner_up.rate == winner.rate:
            decided_by = "kappa" if runner_up.kappa != winner.kappa else "lexicographic"
    return WinnerReport(
        provider_id=winner.provider_id,
        strategy=winner.strategy,
        decided_by=decided_by,
        ranking=tuple(scores),
    )
