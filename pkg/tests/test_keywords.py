"""Keyword matching, sampling, and refinement tests.

Sample-size expectations were computed before build with an independent
statistics oracle (scipy.stats.norm.ppf cross-checked against mpmath):
N=43131 -> 381, N=1e9 -> 385, N=10 -> 10 (cap), N=1000 -> 278.
"""

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from secrev.errors import DomainError, NoLabels, RoundOrderViolation
from secrev.kernels import _pytokens, tokenize
from secrev.keywords import (
    KeywordEntry,
    KeywordMatcher,
    RefinementState,
    draw_sample,
    labels_from_export,
    load_keyword_file,
    make_plan,
    match_keywords,
    refinement_round,
    required_sample_size,
    update_precision,
)
from secrev.keywords.sampling import SamplePlan


class TestTokenizerBackends:
    @given(st.text(max_size=200))
    def test_backends_agree(self, text):
        assert tokenize(text) == _pytokens.tokenize(text)

    def test_runs_and_lowercase(self):
        assert tokenize("Fix XSS, CVE-2021-44228!") == ["fix", "xss", "cve", "2021", "44228"]

    def test_underscore_splits(self):
        # underscore is not alphanumeric, so it separates tokens
        assert tokenize("fix_buffer_overflow") == ["fix", "buffer", "overflow"]


class TestMatching:
    def test_direct_hit(self):
        keywords = [KeywordEntry("xss"), KeywordEntry("overflow")]
        assert match_keywords("Fix XSS vulnerability in parser", keywords) == {"xss"}

    def test_no_substring_false_positive(self):
        assert match_keywords("classify inputs", [KeywordEntry("ssl")]) == set()
        # "classless" contains "ssl" as a substring; token matching must not fire
        assert match_keywords("make classless helpers", [KeywordEntry("ssl")]) == set()

    def test_empty_message(self):
        assert match_keywords("", [KeywordEntry("xss")]) == set()

    def test_multiword_adjacent_tokens(self):
        matcher = KeywordMatcher(["buffer overflow", "overflow"])
        assert matcher.match("fix buffer overflow in decoder") == {"buffer overflow", "overflow"}
        assert matcher.match("buffer the overflow") == {"overflow"}

    def test_case_insensitive_and_boundary_punctuation(self):
        matcher = KeywordMatcher(["sql injection"])
        assert matcher.match("Prevent SQL-Injection.") == {"sql injection"}

    def test_accepts_plain_strings(self):
        assert match_keywords("escape the output", ["escape"]) == {"escape"}

    def test_load_keyword_file(self, tmp_path):
        path = tmp_path / "kw.txt"
        path.write_text("# comment\nxss\nBuffer Overflow  \n\n  # another\ncsrf # trailing\n")
        assert load_keyword_file(path) == ["xss", "buffer overflow", "csrf"]


class TestRequiredSampleSize:
    def test_paper_scale_population(self):
        assert required_sample_size(43131, 0.95, 0.05) == 381

    def test_very_large_population(self):
        assert required_sample_size(10**9, 0.95, 0.05) == 385

    def test_cap_at_population(self):
        assert required_sample_size(10, 0.95, 0.05) == 10

    def test_mid_population(self):
        assert required_sample_size(1000, 0.95, 0.05) == 278

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            required_sample_size(0, 0.95, 0.05)
        with pytest.raises(DomainError):
            required_sample_size(100, 1.0, 0.05)
        with pytest.raises(DomainError):
            required_sample_size(100, 0.95, 0.0)

    @given(st.integers(min_value=1, max_value=10**6))
    def test_monotone_in_population(self, population):
        assert (required_sample_size(population + 1, 0.95, 0.05)
                >= required_sample_size(population, 0.95, 0.05))

    @given(st.integers(min_value=1, max_value=10**6),
           st.sampled_from([0.01, 0.02, 0.05, 0.10]))
    def test_non_increasing_in_margin(self, population, margin):
        assert (required_sample_size(population, 0.95, margin)
                >= required_sample_size(population, 0.95, min(margin * 2, 0.5)))


class TestDrawSample:
    def test_deterministic(self):
        ids = [f"c{i}" for i in range(50)]
        plan = SamplePlan(population_size=50, confidence=0.95, margin=0.05,
                          sample_size=10, seed=42)
        assert draw_sample(ids, plan) == draw_sample(ids, plan)

    def test_full_population(self):
        ids = list(range(7))
        plan = SamplePlan(7, 0.95, 0.05, sample_size=7, seed=1)
        assert sorted(draw_sample(ids, plan)) == ids

    def test_population_size_mismatch(self):
        plan = SamplePlan(5, 0.95, 0.05, sample_size=3, seed=1)
        with pytest.raises(DomainError):
            draw_sample([1, 2, 3], plan)

    def test_frequency_balance(self):
        # 10,000 draws of 2-of-4: each id expected 5,000 times, binomial
        # sigma = sqrt(10000 * 0.5 * 0.5) = 50, so +/- 3 sigma = 150.
        counts = {i: 0 for i in range(4)}
        for seed in range(10_000):
            plan = SamplePlan(4, 0.95, 0.05, sample_size=2, seed=seed)
            for picked in draw_sample(list(range(4)), plan):
                counts[picked] += 1
        for i, count in counts.items():
            assert abs(count - 5000) <= 150, f"id {i} drawn {count} times"

    def test_plan_validation(self):
        with pytest.raises(DomainError):
            SamplePlan(5, 0.95, 0.05, sample_size=6, seed=1)
        with pytest.raises(DomainError):
            SamplePlan(5, 0.95, 0.05, sample_size=0, seed=1)

    def test_make_plan_uses_formula(self):
        plan = make_plan(43131, seed=7)
        assert plan.sample_size == 381


class TestUpdatePrecision:
    def test_retained_above_threshold(self):
        entry = update_precision(KeywordEntry("xss"), [True] * 80 + [False] * 20)
        assert entry.precision == 0.80
        assert entry.status == "retained"

    def test_exactly_threshold_dropped(self):
        entry = update_precision(KeywordEntry("xss"), [True] * 75 + [False] * 25)
        assert entry.precision == 0.75
        assert entry.status == "dropped"

    def test_no_labels(self):
        with pytest.raises(NoLabels):
            update_precision(KeywordEntry("xss"), [])

    def test_threshold_configurable(self):
        entry = update_precision(KeywordEntry("xss"), [True, False], threshold=0.4)
        assert entry.status == "retained"

    @given(st.lists(st.booleans(), min_size=1, max_size=50),
           st.lists(st.booleans(), min_size=1, max_size=50))
    def test_threshold_local(self, labels_a, labels_b):
        # one keyword's labels never change another keyword's entry
        a = update_precision(KeywordEntry("a"), labels_a)
        a_again = update_precision(KeywordEntry("a"), labels_a)
        update_precision(KeywordEntry("b"), labels_b)
        assert a == a_again


class TestRefinementRound:
    def test_round_one_retain_and_propose(self):
        state = RefinementState.from_seed_list(["xss"])
        state = refinement_round(
            state, {"xss": [True] * 9 + [False]}, ["sanitize"], round_number=1)
        assert state.entries["xss"].status == "retained"
        assert state.entries["sanitize"].status == "candidate"
        assert state.entries["sanitize"].origin == "proposed_iter1"
        assert state.completed_rounds == 1

    def test_round_two_terminal(self):
        state = RefinementState.from_seed_list(["xss", "csrf"])
        state = refinement_round(
            state, {"xss": [True] * 4, "csrf": [True] * 4}, [], round_number=1)
        state = refinement_round(state, {}, [], round_number=2)
        assert state.retained_keywords() == ["csrf", "xss"]
        assert state.candidate_keywords() == []
        assert state.completed_rounds == 2

    def test_round_two_before_one(self):
        state = RefinementState.from_seed_list(["xss"])
        with pytest.raises(RoundOrderViolation):
            refinement_round(state, {}, [], round_number=2)

    def test_round_one_twice(self):
        state = RefinementState.from_seed_list(["xss"])
        state = refinement_round(state, {"xss": [True]}, [], round_number=1)
        with pytest.raises(RoundOrderViolation):
            refinement_round(state, {}, [], round_number=1)

    def test_unvalidated_candidates_dropped_at_round_two(self):
        state = RefinementState.from_seed_list(["xss"])
        state = refinement_round(state, {"xss": [True]}, ["newkw"], round_number=1)
        state = refinement_round(state, {}, ["latecomer"], round_number=2)
        assert state.entries["newkw"].status == "dropped"
        assert state.entries["latecomer"].status == "dropped"
        assert state.entries["xss"].status == "retained"

    def test_acceptance_retention_fixture(self):
        # A at 0.80, B at exactly 0.75, C at 0.50: only A survives.
        state = RefinementState.from_seed_list(["a", "b", "c"])
        labels = {
            "a": [True] * 80 + [False] * 20,
            "b": [True] * 75 + [False] * 25,
            "c": [True] * 50 + [False] * 50,
        }
        state = refinement_round(state, labels, [], round_number=1)
        state = refinement_round(state, {}, [], round_number=2)
        assert state.retained_keywords() == ["a"]

    def test_unknown_keyword_rejected(self):
        state = RefinementState.from_seed_list(["xss"])
        with pytest.raises(KeyError):
            refinement_round(state, {"nonexistent": [True]}, [], round_number=1)

    def test_state_roundtrip(self, tmp_path):
        state = RefinementState.from_seed_list(["xss", "csrf"])
        state = refinement_round(state, {"xss": [True, True, False]}, ["esc"], 1)
        path = tmp_path / "state.json"
        state.save(path)
        loaded = RefinementState.load(path)
        assert loaded == state

    def test_labels_from_export(self):
        items = [
            {"payload": {"keyword": "xss"}, "final_verdict": True,
             "proposed_keywords": ["sanitize"]},
            {"payload": {"keyword": "xss"}, "final_verdict": False,
             "proposed_keywords": []},
            {"payload": {"keyword": "csrf"}, "final_verdict": None,
             "proposed_keywords": ["sanitize", "escape"]},
        ]
        labels, proposals = labels_from_export(items)
        assert labels == {"xss": [True, False]}
        assert proposals == ["sanitize", "escape"]
