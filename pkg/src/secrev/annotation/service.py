"""Annotation session logic and persistence.

Every mutation is persisted before it returns (crash-safe annotation) and
per-item mutations are serialized under a session lock. Responses are
redacted per caller: an annotator never sees the other annotator's label
until both labels exist, and provenance metadata is never shown to either.
"""

import json
import os
import random
import secrets
import tempfile
import threading
import uuid
from pathlib import Path
from typing import Iterator

from secrev.errors import (
    AlreadyLabeled,
    ConflictOfInterest,
    DuplicateAnnotators,
    EmptyItems,
    IncompleteSession,
    InvalidLabel,
    NotDisagreed,
    NotYourSession,
    UnknownItem,
)
from secrev.annotation.models import (
    SESSION_KINDS,
    AnnotationItem,
    AnnotationSession,
    validate_label,
)
from secrev.metrics.kappa import cohen_kappa
from secrev.mining.types import utc_now


class AnnotationService:
    def __init__(self, sessions_dir: str | Path):
        self.sessions_dir = Path(sessions_dir)
        self.sessions_dir.mkdir(parents=True, exist_ok=True)
        self._cache: dict[str, AnnotationSession] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    # --- persistence ---

    def _path(self, session_id: str) -> Path:
        return self.sessions_dir / f"{session_id}.json"

    def _lock_for(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def _save(self, session: AnnotationSession) -> None:
        path = self._path(session.session_id)
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(session.to_dict(), fh, ensure_ascii=False)
        os.replace(tmp, path)
        self._cache[session.session_id] = session

    def _load(self, session_id: str) -> AnnotationSession:
        if session_id in self._cache:
            return self._cache[session_id]
        path = self._path(session_id)
        if not path.exists():
            raise NotYourSession(f"no session {session_id}")
        session = AnnotationSession.from_dict(
            json.loads(path.read_text(encoding="utf-8")))
        self._cache[session_id] = session
        return session

    def list_sessions(self) -> list[str]:
        return sorted(p.stem for p in self.sessions_dir.glob("*.json"))

    # --- auth ---

    def authenticate(self, session_id: str, token: str) -> tuple[AnnotationSession, str, str]:
        """Resolve a bearer token to (session, role, actor_id)."""
        session = self._load(session_id)
        entry = session.tokens.get(token)
        if entry is None:
            raise NotYourSession("invalid token for this session")
        return session, entry["role"], entry["actor"]

    # --- operations ---

    def create_session(
        self,
        kind: str,
        items: list[dict],
        annotator_ids: list[str],
        rubric_version: str,
        adjudicator_id: str | None = None,
        seed: int | None = None,
    ) -> dict:
        if kind not in SESSION_KINDS:
            raise ValueError(f"unknown session kind {kind!r}")
        if not items:
            raise EmptyItems("a session needs at least one item")
        if len(annotator_ids) != 2:
            raise DuplicateAnnotators("exactly two primary annotators are required")
        if annotator_ids[0] == annotator_ids[1]:
            raise DuplicateAnnotators("the two annotators must be distinct")
        if adjudicator_id is not None and adjudicator_id in annotator_ids:
            raise ConflictOfInterest("the adjudicator must not be a primary annotator")

        session_id = uuid.uuid4().hex[:12]
        shuffle_seed = seed if seed is not None else secrets.randbelow(2**31)
        built: dict[str, AnnotationItem] = {}
        order: list[str] = []
        for i, raw in enumerate(items):
            item_id = raw.get("item_id") or f"item-{i:05d}"
            if item_id in built:
                raise ValueError(f"duplicate item_id {item_id!r}")
            built[item_id] = AnnotationItem(
                item_id=item_id,
                payload=raw.get("payload") or {},
                meta=raw.get("meta") or {},
            )
            order.append(item_id)

        tokens = {secrets.token_urlsafe(16): {"role": "annotator", "actor": a}
                  for a in annotator_ids}
        adjudicator_token = None
        if adjudicator_id is not None:
            adjudicator_token = secrets.token_urlsafe(16)
            tokens[adjudicator_token] = {"role": "adjudicator", "actor": adjudicator_id}

        session = AnnotationSession(
            session_id=session_id,
            kind=kind,
            rubric_version=rubric_version,
            annotators=(annotator_ids[0], annotator_ids[1]),
            adjudicator=adjudicator_id,
            shuffle_seed=shuffle_seed,
            created_at=utc_now(),
            item_order=order,
            items=built,
            tokens=tokens,
        )
        self._save(session)
        annotator_tokens = {entry["actor"]: token for token, entry in tokens.items()
                            if entry["role"] == "annotator"}
        return {
            "session_id": session_id,
            "annotator_tokens": annotator_tokens,
            "adjudicator_token": adjudicator_token,
            "shuffle_seed": shuffle_seed,
            "n_items": len(order),
        }

    def presentation_order(self, session: AnnotationSession, annotator_id: str) -> list[str]:
        """Per-annotator shuffled order, reproducible from the recorded seed."""
        order = list(session.item_order)
        random.Random(f"{session.shuffle_seed}:{annotator_id}").shuffle(order)
        return order

    def _item_view(self, session: AnnotationSession, item: AnnotationItem,
                   annotator_id: str) -> dict:
        """Redacted item as seen by one annotator; never includes meta, and
        never includes the peer's label until this annotator has submitted."""
        own = item.labels.get(annotator_id)
        view = {
            "item_id": item.item_id,
            "payload": item.payload,
            "kind": session.kind,
            "your_label": own.to_dict() if own else None,
            "proposed_keywords": list(item.proposed_keywords),
        }
        if own is None:
            view["state"] = "awaiting_your_label"
            return view
        peer = [a for a in session.annotators if a != annotator_id][0]
        if peer not in item.labels:
            view["state"] = "awaiting_peer"
            return view
        view["state"] = item.state(session.annotators)
        view["peer_label"] = item.labels[peer].to_dict()
        view["final_verdict"] = item.final_verdict(session.annotators)
        return view

    def annotator_items(self, session_id: str, annotator_id: str) -> list[dict]:
        session = self._load(session_id)
        if annotator_id not in session.annotators:
            raise NotYourSession(f"{annotator_id} is not an annotator here")
        return [
            self._item_view(session, session.items[iid], annotator_id)
            for iid in self.presentation_order(session, annotator_id)
        ]

    def submit_label(self, session_id: str, annotator_id: str, item_id: str,
                     label_payload: dict) -> dict:
        with self._lock_for(session_id):
            session = self._load(session_id)
            if annotator_id not in session.annotators:
                raise NotYourSession(f"{annotator_id} is not an annotator here")
            item = session.items.get(item_id)
            if item is None:
                raise UnknownItem(f"no item {item_id} in session")
            if annotator_id in item.labels:
                raise AlreadyLabeled(f"{annotator_id} already labeled {item_id}")
            label = validate_label(session.kind, label_payload)
            proposals = label_payload.get("proposed_keywords") or []
            if proposals and session.kind != "keyword_commit":
                raise InvalidLabel("keyword proposals only apply to keyword sessions")
            item.labels[annotator_id] = label
            for proposal in proposals:
                text = str(proposal).strip().lower()
                if text and text not in item.proposed_keywords:
                    item.proposed_keywords.append(text)
            self._save(session)
            return self._item_view(session, item, annotator_id)

    def adjudicate(self, session_id: str, adjudicator_id: str, item_id: str,
                   label_payload: dict) -> dict:
        with self._lock_for(session_id):
            session = self._load(session_id)
            if adjudicator_id in session.annotators:
                raise ConflictOfInterest("annotators cannot adjudicate their own items")
            if session.adjudicator != adjudicator_id:
                raise NotYourSession(f"{adjudicator_id} is not this session's adjudicator")
            item = session.items.get(item_id)
            if item is None:
                raise UnknownItem(f"no item {item_id} in session")
            if item.state(session.annotators) != "needs_adjudication":
                raise NotDisagreed(f"item {item_id} is not awaiting adjudication")
            item.adjudicated = validate_label(session.kind, label_payload)
            self._save(session)
            return self.adjudication_view_item(session, item)

    def adjudication_view_item(self, session: AnnotationSession,
                               item: AnnotationItem) -> dict:
        return {
            "item_id": item.item_id,
            "payload": item.payload,
            "kind": session.kind,
            "labels": {a: l.to_dict() for a, l in item.labels.items()},
            "adjudicated": item.adjudicated.to_dict() if item.adjudicated else None,
            "state": item.state(session.annotators),
            "final_verdict": item.final_verdict(session.annotators),
        }

    def adjudication_queue(self, session_id: str, adjudicator_id: str) -> list[dict]:
        session = self._load(session_id)
        if adjudicator_id in session.annotators or session.adjudicator != adjudicator_id:
            raise ConflictOfInterest("only the session adjudicator sees both labels")
        return [
            self.adjudication_view_item(session, session.items[iid])
            for iid in session.item_order
            if session.items[iid].state(session.annotators) == "needs_adjudication"
        ]

    def session_stats(self, session_id: str) -> dict:
        session = self._load(session_id)
        states = session.states()
        a, b = session.annotators
        votes_a, votes_b = [], []
        for iid in session.item_order:
            item = session.items[iid]
            if a in item.labels and b in item.labels:
                votes_a.append(item.labels[a].verdict)
                votes_b.append(item.labels[b].verdict)
        if votes_a:
            agreement = cohen_kappa(votes_a, votes_b)
            kappa = {
                "kappa": agreement.kappa,
                "observed_agreement": agreement.observed_agreement,
                "expected_agreement": agreement.expected_agreement,
                "n_items": agreement.n_items,
            }
        else:
            kappa = None
        return {
            "session_id": session_id,
            "kind": session.kind,
            "rubric_version": session.rubric_version,
            "n_items": len(session.item_order),
            "states": states,
            "progress": {
                annotator: sum(1 for item in session.items.values()
                               if annotator in item.labels)
                for annotator in session.annotators
            },
            "complete": session.is_complete(),
            "kappa": kappa,
        }

    def export_labels(self, session_id: str, force: bool = False) -> Iterator[dict]:
        """The canonical label format consumed by the keywords and
        orchestrator modules."""
        session = self._load(session_id)
        if not session.is_complete() and not force:
            raise IncompleteSession(
                f"session {session_id} has unresolved items; use force to export anyway")
        for iid in session.item_order:
            item = session.items[iid]
            yield {
                "session_id": session_id,
                "kind": session.kind,
                "rubric_version": session.rubric_version,
                "item_id": iid,
                "payload": item.payload,
                "meta": item.meta,
                "labels": {a: l.to_dict() for a, l in item.labels.items()},
                "adjudicated": item.adjudicated.to_dict() if item.adjudicated else None,
                "state": item.state(session.annotators),
                "final_verdict": item.final_verdict(session.annotators),
                "proposed_keywords": list(item.proposed_keywords),
            }
