"""Annotation domain model: sessions, items, labels, and the rubric rules.

A session has exactly two primary annotators plus an optional adjudicator.
Items are immutable after creation; labels accumulate per annotator and an
adjudicated label resolves disagreements. The final verdict consumed
downstream is adjudicated-else-agreed.
"""

from dataclasses import dataclass, field, replace
from datetime import datetime

from secrev.errors import InvalidLabel
from secrev.mining.types import isoformat_utc, parse_utc, utc_now

SESSION_KINDS = (
    "keyword_commit",
    "review_suitability",
    "external_vetting",
    "final_evaluation",
)

SUITABILITY_CRITERIA = ("coherent", "addresses_vulnerability", "plausible_trigger")


@dataclass(frozen=True)
class Label:
    verdict: bool
    criteria: dict[str, bool] | None = None  # review_suitability only
    semantic_equivalence: bool | None = None  # final_evaluation only
    applicability: bool | None = None  # final_evaluation only
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "criteria": dict(self.criteria) if self.criteria is not None else None,
            "semantic_equivalence": self.semantic_equivalence,
            "applicability": self.applicability,
            "note": self.note,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Label":
        return cls(
            verdict=data["verdict"],
            criteria=data.get("criteria"),
            semantic_equivalence=data.get("semantic_equivalence"),
            applicability=data.get("applicability"),
            note=data.get("note", ""),
        )


def validate_label(kind: str, payload: dict) -> Label:
    """Check a raw label payload against the session kind's rubric and
    derive the verdict where the rubric defines it as a conjunction."""
    note = payload.get("note") or ""
    criteria = payload.get("criteria")
    sem = payload.get("semantic_equivalence")
    app = payload.get("applicability")
    verdict = payload.get("verdict")

    if kind == "review_suitability":
        if not isinstance(criteria, dict) or set(criteria) != set(SUITABILITY_CRITERIA):
            raise InvalidLabel(
                f"review_suitability labels need the criteria {SUITABILITY_CRITERIA}")
        if not all(isinstance(v, bool) for v in criteria.values()):
            raise InvalidLabel("criteria values must be booleans")
        derived = all(criteria.values())
        if verdict is not None and bool(verdict) != derived:
            raise InvalidLabel("verdict must equal the conjunction of the criteria")
        return Label(verdict=derived, criteria=dict(criteria), note=note)

    if kind == "final_evaluation":
        if not isinstance(sem, bool) or not isinstance(app, bool):
            raise InvalidLabel(
                "final_evaluation labels need semantic_equivalence and applicability")
        derived = sem and app
        if verdict is not None and bool(verdict) != derived:
            raise InvalidLabel("verdict must equal the conjunction of the two metrics")
        return Label(verdict=derived, semantic_equivalence=sem, applicability=app,
                     note=note)

    # keyword_commit / external_vetting: a plain boolean verdict
    if not isinstance(verdict, bool):
        raise InvalidLabel(f"{kind} labels need a boolean verdict")
    if criteria is not None or sem is not None or app is not None:
        raise InvalidLabel(f"{kind} labels carry only a verdict and a note")
    return Label(verdict=verdict, note=note)


@dataclass
class AnnotationItem:
    item_id: str
    payload: dict  # shown to annotators
    meta: dict = field(default_factory=dict)  # provenance, hidden from annotators
    labels: dict[str, Label] = field(default_factory=dict)
    adjudicated: Label | None = None
    proposed_keywords: list[str] = field(default_factory=list)

    def state(self, annotators: tuple[str, str]) -> str:
        submitted = [a for a in annotators if a in self.labels]
        if len(submitted) < 2:
            return "awaiting_labels"
        a, b = (self.labels[x] for x in annotators)
        if a.verdict == b.verdict:
            return "agreed"
        return "adjudicated" if self.adjudicated is not None else "needs_adjudication"

    def final_verdict(self, annotators: tuple[str, str]) -> bool | None:
        state = self.state(annotators)
        if state == "agreed":
            return self.labels[annotators[0]].verdict
        if state == "adjudicated":
            return self.adjudicated.verdict
        return None

    def to_dict(self) -> dict:
        return {
            "item_id": self.item_id,
            "payload": self.payload,
            "meta": self.meta,
            "labels": {a: l.to_dict() for a, l in self.labels.items()},
            "adjudicated": self.adjudicated.to_dict() if self.adjudicated else None,
            "proposed_keywords": list(self.proposed_keywords),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AnnotationItem":
        return cls(
            item_id=data["item_id"],
            payload=data["payload"],
            meta=data.get("meta", {}),
            labels={a: Label.from_dict(l) for a, l in data.get("labels", {}).items()},
            adjudicated=Label.from_dict(data["adjudicated"])
            if data.get("adjudicated") else None,
            proposed_keywords=list(data.get("proposed_keywords", [])),
        )


@dataclass
class AnnotationSession:
    session_id: str
    kind: str
    rubric_version: str
    annotators: tuple[str, str]
    adjudicator: str | None
    shuffle_seed: int
    created_at: datetime
    item_order: list[str]
    items: dict[str, AnnotationItem]
    tokens: dict[str, dict]  # token -> {"role": ..., "actor": ...}

    def states(self) -> dict[str, int]:
        counts = {"awaiting_labels": 0, "needs_adjudication": 0,
                  "agreed": 0, "adjudicated": 0}
        for item in self.items.values():
            counts[item.state(self.annotators)] += 1
        return counts

    def is_complete(self) -> bool:
        states = self.states()
        return states["awaiting_labels"] == 0 and states["needs_adjudication"] == 0

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "kind": self.kind,
            "rubric_version": self.rubric_version,
            "annotators": list(self.annotators),
            "adjudicator": self.adjudicator,
            "shuffle_seed": self.shuffle_seed,
            "created_at": isoformat_utc(self.created_at),
            "item_order": list(self.item_order),
            "items": {iid: item.to_dict() for iid, item in self.items.items()},
            "tokens": self.tokens,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AnnotationSession":
        return cls(
            session_id=data["session_id"],
            kind=data["kind"],
            rubric_version=data["rubric_version"],
            annotators=tuple(data["annotators"]),
            adjudicator=data.get("adjudicator"),
            shuffle_seed=data["shuffle_seed"],
            created_at=parse_utc(data["created_at"]),
            item_order=list(data["item_order"]),
            items={iid: AnnotationItem.from_dict(raw)
                   for iid, raw in data["items"].items()},
            tokens=data.get("tokens", {}),
        )
