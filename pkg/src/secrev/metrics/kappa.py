"""Cohen's kappa for two raters over categorical labels."""

from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Sequence

from secrev.errors import LengthMismatch, SingleItemDegenerate


@dataclass(frozen=True)
class AgreementReport:
    kappa: float
    observed_agreement: float
    expected_agreement: float
    n_items: int


def cohen_kappa(labels_a: Sequence[Hashable], labels_b: Sequence[Hashable]) -> AgreementReport:
    """Chance-corrected agreement between two label vectors.

    kappa = (p_o - p_e) / (1 - p_e); when both raters agree perfectly and
    chance agreement is also 1 (single shared category), kappa is 1 by
    convention. p_e = 1 with imperfect observed agreement leaves kappa
    undefined and raises SingleItemDegenerate.
    """
    if len(labels_a) != len(labels_b):
        raise LengthMismatch(
            f"label vectors differ in length: {len(labels_a)} vs {len(labels_b)}")
    n = len(labels_a)
    if n == 0:
        raise LengthMismatch("label vectors are empty")

    p_o = sum(a == b for a, b in zip(labels_a, labels_b)) / n
    freq_a = Counter(labels_a)
    freq_b = Counter(labels_b)
    p_e = sum(freq_a[cat] * freq_b.get(cat, 0) for cat in freq_a) / (n * n)

    if p_e == 1.0:
        if p_o == 1.0:
            kappa = 1.0
        else:
            raise SingleItemDegenerate(
                "expected agreement is 1 with observed agreement < 1")
    else:
        kappa = (p_o - p_e) / (1.0 - p_e)
    return AgreementReport(
        kappa=kappa,
        observed_agreement=p_o,
        expected_agreement=p_e,
        n_items=n,
    )
