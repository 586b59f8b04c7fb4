"""Two-round keyword refinement driven by adjudicated human labels.

Each round updates per-keyword precision from the annotation verdicts and
retains a keyword only when precision strictly exceeds the threshold
("over 75%" is strict). Humans propose new keywords through the annotation
UI free-text field; the engine never invents keywords itself. After round
two the state is terminal: anything still unvalidated is dropped.
"""

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping

from secrev.errors import NoLabels, RoundOrderViolation

DEFAULT_RETENTION_THRESHOLD = 0.75

ORIGINS = ("seed_list", "proposed_iter1", "proposed_iter2")
STATUSES = ("candidate", "retained", "dropped")


@dataclass(frozen=True)
class KeywordEntry:
    text: str
    origin: str = "seed_list"
    status: str = "candidate"
    labeled: int = 0
    true_positive: int = 0

    @property
    def precision(self) -> float | None:
        if self.labeled == 0:
            return None
        return self.true_positive / self.labeled

    def to_dict(self) -> dict:
        return {
            "text": self.text,
            "origin": self.origin,
            "status": self.status,
            "labeled": self.labeled,
            "true_positive": self.true_positive,
            "precision": self.precision,
        }


def update_precision(entry: KeywordEntry, labels: Iterable[bool],
                     threshold: float = DEFAULT_RETENTION_THRESHOLD) -> KeywordEntry:
    """Fold adjudicated verdicts into the entry and settle its status."""
    labels = list(labels)
    if not labels:
        raise NoLabels(f"no labels for keyword {entry.text!r}")
    labeled = entry.labeled + len(labels)
    true_positive = entry.true_positive + sum(bool(v) for v in labels)
    status = "retained" if true_positive / labeled > threshold else "dropped"
    return replace(entry, labeled=labeled, true_positive=true_positive, status=status)


@dataclass(frozen=True)
class RefinementState:
    entries: dict[str, KeywordEntry]
    completed_rounds: int = 0
    retention_threshold: float = DEFAULT_RETENTION_THRESHOLD

    @classmethod
    def from_seed_list(cls, keywords: Iterable[str],
                       retention_threshold: float = DEFAULT_RETENTION_THRESHOLD) -> "RefinementState":
        entries = {}
        for raw in keywords:
            text = raw.strip().lower()
            if text and text not in entries:
                entries[text] = KeywordEntry(text=text, origin="seed_list")
        return cls(entries=entries, retention_threshold=retention_threshold)

    def retained_keywords(self) -> list[str]:
        return sorted(t for t, e in self.entries.items() if e.status == "retained")

    def candidate_keywords(self) -> list[str]:
        return sorted(t for t, e in self.entries.items() if e.status == "candidate")

    def to_dict(self) -> dict:
        return {
            "completed_rounds": self.completed_rounds,
            "retention_threshold": self.retention_threshold,
            "entries": {t: e.to_dict() for t, e in sorted(self.entries.items())},
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "RefinementState":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        entries = {
            text: KeywordEntry(
                text=text,
                origin=raw["origin"],
                status=raw["status"],
                labeled=raw["labeled"],
                true_positive=raw["true_positive"],
            )
            for text, raw in data["entries"].items()
        }
        return cls(
            entries=entries,
            completed_rounds=data["completed_rounds"],
            retention_threshold=data["retention_threshold"],
        )


def refinement_round(state: RefinementState,
                     adjudicated_labels: Mapping[str, Iterable[bool]],
                     proposed_keywords: Iterable[str],
                     round_number: int) -> RefinementState:
    """Run one refinement iteration and return the new state.

    Labels are keyed by keyword text; each proposed keyword enters as a
    candidate tagged with its round of origin. Round 2 terminalizes the
    state: entries never validated by labels are dropped.
    """
    if round_number not in (1, 2):
        raise RoundOrderViolation(f"round must be 1 or 2, got {round_number}")
    if round_number != state.completed_rounds + 1:
        raise RoundOrderViolation(
            f"round {round_number} cannot run after {state.completed_rounds} completed rounds")

    entries = dict(state.entries)
    for keyword, labels in adjudicated_labels.items():
        key = keyword.strip().lower()
        if key not in entries:
            raise KeyError(f"labels supplied for unknown keyword {key!r}")
        entries[key] = update_precision(entries[key], labels, state.retention_threshold)

    origin = f"proposed_iter{round_number}"
    for raw in proposed_keywords:
        text = raw.strip().lower()
        if text and text not in entries:
            entries[text] = KeywordEntry(text=text, origin=origin)

    if round_number == 2:
        entries = {
            text: (replace(e, status="dropped") if e.status == "candidate" else e)
            for text, e in entries.items()
        }

    return replace(state, entries=entries, completed_rounds=round_number)


def labels_from_export(export_items: Iterable[Mapping]) -> tuple[dict[str, list[bool]], list[str]]:
    """Extract per-keyword verdict lists and proposed keywords from an
    annotation-session export (the only label format this module accepts).

    Items must be keyword_commit items: payload.keyword names the keyword
    being validated, final_verdict is the adjudicated-else-agreed verdict.
    Items without a final verdict are skipped.
    """
    labels: dict[str, list[bool]] = {}
    proposals: list[str] = []
    seen_proposals: set[str] = set()
    for item in export_items:
        keyword = (item.get("payload") or {}).get("keyword")
        verdict = item.get("final_verdict")
        if keyword and verdict is not None:
            labels.setdefault(keyword.strip().lower(), []).append(bool(verdict))
        for proposal in item.get("proposed_keywords") or []:
            text = proposal.strip().lower()
            if text and text not in seen_proposals:
                seen_proposals.add(text)
                proposals.append(text)
    return labels, proposals
