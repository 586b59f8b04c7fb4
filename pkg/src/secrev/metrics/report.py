"""Evaluation report: BLEU plus the two manual metrics with rater agreement."""

from dataclasses import dataclass
from typing import Sequence

from secrev.errors import LengthMismatch, MissingLabels
from secrev.metrics.bleu import bleu4, corpus_bleu4, tokenize_review
from secrev.metrics.kappa import AgreementReport, cohen_kappa


@dataclass(frozen=True)
class PairJudgment:
    """One annotator's manual metrics for one generated/ground-truth pair."""

    semantic_equivalence: bool
    applicability: bool


@dataclass(frozen=True)
class EvalReport:
    n_pairs: int
    mean_sentence_bleu: float
    corpus_bleu: float
    semantic_equivalence_rate: float
    applicability_rate: float
    kappa_semantic_equivalence: AgreementReport
    kappa_applicability: AgreementReport

    def to_dict(self) -> dict:
        return {
            "n_pairs": self.n_pairs,
            "mean_sentence_bleu": self.mean_sentence_bleu,
            "corpus_bleu": self.corpus_bleu,
            "semantic_equivalence_rate": self.semantic_equivalence_rate,
            "applicability_rate": self.applicability_rate,
            "kappa_semantic_equivalence": self.kappa_semantic_equivalence.kappa,
            "kappa_applicability": self.kappa_applicability.kappa,
        }


def _final_votes(
    votes_a: list[bool],
    votes_b: list[bool],
    adjudicated: list[bool | None],
    metric: str,
) -> list[bool]:
    finals = []
    for i, (a, b, adj) in enumerate(zip(votes_a, votes_b, adjudicated)):
        if a == b:
            finals.append(a)
        elif adj is not None:
            finals.append(adj)
        else:
            raise MissingLabels(
                f"pair {i}: annotators disagree on {metric} and no adjudicated label given")
    return finals


def eval_report(
    pairs: Sequence[tuple[str, str]],
    labels_a: Sequence[PairJudgment],
    labels_b: Sequence[PairJudgment],
    adjudicated: Sequence[PairJudgment | None] | None = None,
) -> EvalReport:
    """Aggregate metrics over (generated review, ground-truth review) pairs.

    Rates use the agreed-else-adjudicated label per pair; a disagreement
    without an adjudicated label raises MissingLabels. Kappas are computed
    per metric over the two annotators' raw votes.
    """
    if not pairs:
        raise MissingLabels("no pairs to evaluate")
    if not (len(pairs) == len(labels_a) == len(labels_b)):
        raise LengthMismatch("pairs and label vectors must have equal length")
    if adjudicated is None:
        adjudicated = [None] * len(pairs)
    elif len(adjudicated) != len(pairs):
        raise LengthMismatch("adjudicated vector must match pairs length")

    token_pairs = [(tokenize_review(gen), tokenize_review(truth)) for gen, truth in pairs]
    sentence_scores = [bleu4(c, r).score for c, r in token_pairs]

    sem_a = [j.semantic_equivalence for j in labels_a]
    sem_b = [j.semantic_equivalence for j in labels_b]
    app_a = [j.applicability for j in labels_a]
    app_b = [j.applicability for j in labels_b]
    sem_adj = [j.semantic_equivalence if j is not None else None for j in adjudicated]
    app_adj = [j.applicability if j is not None else None for j in adjudicated]

    sem_final = _final_votes(sem_a, sem_b, sem_adj, "semantic_equivalence")
    app_final = _final_votes(app_a, app_b, app_adj, "applicability")

    n = len(pairs)
    return EvalReport(
        n_pairs=n,
        mean_sentence_bleu=sum(sentence_scores) / n,
        corpus_bleu=corpus_bleu4(token_pairs),
        semantic_equivalence_rate=sum(sem_final) / n,
        applicability_rate=sum(app_final) / n,
        kappa_semantic_equivalence=cohen_kappa(sem_a, sem_b),
        kappa_applicability=cohen_kappa(app_a, app_b),
    )


def format_report(report: EvalReport) -> str:
    """Human-readable table for stdout."""
    rows = [
        ("pairs", str(report.n_pairs)),
        ("mean sentence BLEU-4", f"{report.mean_sentence_bleu:.4f}"),
        ("corpus BLEU-4", f"{report.corpus_bleu:.4f}"),
        ("semantic equivalence", f"{report.semantic_equivalence_rate:.1%}"),
        ("applicability", f"{report.applicability_rate:.1%}"),
        ("kappa (semantic eq.)", f"{report.kappa_semantic_equivalence.kappa:.4f}"),
        ("kappa (applicability)", f"{report.kappa_applicability.kappa:.4f}"),
    ]
    width = max(len(name) for name, _ in rows)
    return "\n".join(f"{name.ljust(width)}  {value}" for name, value in rows)
