"""secrev: mine vulnerability-fixing commits and synthesize review comments.

Pipeline stages: repository mining, commit candidacy filtering, security
keyword refinement, LLM prompt/provider grid evaluation, synthetic dataset
generation, and evaluation metrics, plus an HTTP annotation service for the
double-annotation steps.
"""

__version__ = "0.1.0"
