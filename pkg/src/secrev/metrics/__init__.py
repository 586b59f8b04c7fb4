"""Evaluation metrics: BLEU-4, Cohen's kappa, and report aggregation."""

from secrev.metrics.bleu import BleuScore, bleu4, corpus_bleu4, tokenize_review
from secrev.metrics.kappa import AgreementReport, cohen_kappa
from secrev.metrics.report import EvalReport, PairJudgment, eval_report, format_report

__all__ = [
    "BleuScore",
    "bleu4",
    "corpus_bleu4",
    "tokenize_review",
    "AgreementReport",
    "cohen_kappa",
    "EvalReport",
    "PairJudgment",
    "eval_report",
    "format_report",
]
