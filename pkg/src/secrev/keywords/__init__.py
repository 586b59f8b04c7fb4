"""Security-keyword matching, sampling, and two-round refinement."""

from importlib import resources

from secrev.keywords.matching import (
    KeywordMatcher,
    keyword_list_version,
    load_keyword_file,
    match_keywords,
)
from secrev.keywords.refinement import (
    DEFAULT_RETENTION_THRESHOLD,
    KeywordEntry,
    RefinementState,
    labels_from_export,
    refinement_round,
    update_precision,
)
from secrev.keywords.sampling import (
    SamplePlan,
    draw_sample,
    make_plan,
    normal_quantile,
    required_sample_size,
)


def default_seed_list_path():
    """Path to the packaged seed keyword list."""
    return resources.files("secrev.keywords").joinpath("data/seed_keywords.txt")


__all__ = [
    "KeywordMatcher",
    "keyword_list_version",
    "load_keyword_file",
    "match_keywords",
    "DEFAULT_RETENTION_THRESHOLD",
    "KeywordEntry",
    "RefinementState",
    "labels_from_export",
    "refinement_round",
    "update_precision",
    "SamplePlan",
    "draw_sample",
    "make_plan",
    "normal_quantile",
    "required_sample_size",
    "default_seed_list_path",
]
