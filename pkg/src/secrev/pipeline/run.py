"""Pipeline stage implementations behind the CLI commands.

Each stage reads declared input artifacts, writes its outputs under the
workdir, and records output hashes in a per-stage manifest so downstream
stages can verify integrity. Stages are idempotent given unchanged inputs.
"""

import json
import logging
import re
from pathlib import Path

from secrev import keywords as kw
from secrev.datasets import filter_external_partition, read_external_jsonl
from secrev.diffkit import filter_candidates, parse_unified_diff
from secrev.errors import ConfigError, MalformedDiff, MissingStageInput
from secrev.gateway import LlmGateway
from secrev.keywords import (
    KeywordMatcher,
    RefinementState,
    labels_from_export,
    load_keyword_file,
    make_plan,
    refinement_round,
)
from secrev.metrics import PairJudgment, eval_report, format_report
from secrev.mining import FixtureHost, GitHubHost, RecordStore, mine
from secrev.mining.types import CommitRecord
from secrev.orchestrator import (
    GridCommit,
    GridSpec,
    build_dataset,
    cells_from_export,
    run_grid,
    sample_grid_commits,
    select_winner,
    write_dataset_manifest,
)
from secrev.pipeline.config import PipelineConfig
from secrev.pipeline.stages import StageIO, file_sha256
from secrev.prompts import load_templates

logger = logging.getLogger(__name__)


# --- shared helpers ---

def build_host(config: PipelineConfig):
    host_config = config.mining.host
    if host_config.kind == "fixture":
        if not host_config.fixture_path:
            raise ConfigError("fixture host needs mining.host.fixture_path")
        return FixtureHost.from_json(
            host_config.fixture_path,
            exclude_forks=host_config.exclude_forks,
            diff_byte_cap=config.mining.diff_byte_cap,
        )
    if host_config.kind == "github":
        return GitHubHost(
            base_url=host_config.base_url,
            token_env=host_config.token_env,
            requests_per_minute=host_config.requests_per_minute,
            exclude_forks=host_config.exclude_forks,
            diff_byte_cap=config.mining.diff_byte_cap,
        )
    raise ConfigError(f"unknown host kind {host_config.kind!r}")


def build_gateway(config: PipelineConfig) -> LlmGateway:
    if not config.providers:
        raise ConfigError("no providers configured")
    gateway = LlmGateway(config.workdir_path / "llm_cache")
    for entry in config.providers:
        gateway.register_provider(entry.to_provider_config())
    return gateway


def paths(config: PipelineConfig) -> dict[str, Path]:
    workdir = config.workdir_path
    return {
        "store": workdir / "store",
        "candidates": workdir / "candidates.jsonl",
        "funnel_report": workdir / "funnel_report.json",
        "keyword_plans": workdir / "keyword_plans.json",
        "keyword_items": workdir / "keyword_items.jsonl",
        "keywords_state": workdir / "keywords_state.json",
        "grid_dir": workdir / "grid",
        "grid_items": workdir / "grid_items.jsonl",
        "winner": workdir / "winner.json",
        "dataset": workdir / "dataset.jsonl",
        "dataset_manifest": workdir / "dataset_manifest.json",
        "external_flagged": workdir / "external_flagged.jsonl",
        "external_items": workdir / "external_items.jsonl",
        "eval_report": workdir / "eval_report.json",
        "sessions": workdir / "sessions",
    }


def _seed_list_path(config: PipelineConfig):
    if config.keywords.seed_list:
        return Path(config.keywords.seed_list)
    return kw.default_seed_list_path()


def load_refinement_state(config: PipelineConfig) -> RefinementState:
    state_path = paths(config)["keywords_state"]
    if state_path.exists():
        return RefinementState.load(state_path)
    seed_path = _seed_list_path(config)
    seed_keywords = (load_keyword_file(seed_path) if isinstance(seed_path, Path)
                     else [l.split("#", 1)[0].strip().lower()
                           for l in seed_path.read_text(encoding="utf-8").splitlines()
                           if l.split("#", 1)[0].strip()])
    return RefinementState.from_seed_list(
        seed_keywords, retention_threshold=config.keywords.retention_threshold)


def current_keyword_list(config: PipelineConfig) -> tuple[list[str], str]:
    """Retained keywords once refinement produced any, else the seed list.

    Returns (keywords, version) where version hashes the deciding artifact.
    """
    state_path = paths(config)["keywords_state"]
    if state_path.exists():
        state = RefinementState.load(state_path)
        retained = state.retained_keywords()
        if retained:
            return retained, file_sha256(state_path)
    seed_path = _seed_list_path(config)
    if isinstance(seed_path, Path):
        return load_keyword_file(seed_path), file_sha256(seed_path)
    text = seed_path.read_text(encoding="utf-8")
    import hashlib
    keywords = [l.split("#", 1)[0].strip().lower() for l in text.splitlines()
                if l.split("#", 1)[0].strip()]
    return keywords, hashlib.sha256(text.encode("utf-8")).hexdigest()


def _structured_diff(diff_text: str) -> list[dict] | None:
    """Hunk structure for the annotation UI; None when unparseable."""
    try:
        return [fd.to_dict() for fd in parse_unified_diff(diff_text)]
    except MalformedDiff:
        return None


def _read_candidates(path: Path) -> list[CommitRecord]:
    records = []
    with path.open("r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(CommitRecord.from_dict(json.loads(line)))
    return records


def _read_ndjson(path: Path) -> list[dict]:
    lines = []
    with path.open("r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                lines.append(json.loads(line))
    return lines


# --- stages ---

def stage_mine(config: PipelineConfig) -> dict:
    io = StageIO(config.workdir_path, "mine")
    host = build_host(config)
    store = RecordStore(paths(config)["store"])
    report = mine(host, store, config.mining.language, config.mining.min_prs,
                  page_limit=config.mining.page_limit,
                  workers=config.mining.workers)
    io.record_output(store.repos_path)
    io.record_output(store.commits_path)
    io.finalize()
    return {"stage": "mine", **report.to_dict()}


def stage_filter(config: PipelineConfig) -> dict:
    io = StageIO(config.workdir_path, "filter")
    artifact = paths(config)
    store = RecordStore(paths(config)["store"])
    io.require_input(store.commits_path, producer_stage="mine")

    accepted_iter, report = filter_candidates(store.commits())
    with artifact["candidates"].open("w", encoding="utf-8") as fh:
        for commit in accepted_iter:
            fh.write(json.dumps(commit.to_dict(), ensure_ascii=False) + "\n")
    artifact["funnel_report"].write_text(
        json.dumps(report.to_dict(), indent=1, sort_keys=True) + "\n",
        encoding="utf-8")
    io.record_output(artifact["candidates"])
    io.record_output(artifact["funnel_report"])
    io.finalize()
    return {"stage": "filter", "funnel": report.to_dict(),
            "accepted": report.accepted}


def stage_keywords_sample(config: PipelineConfig) -> dict:
    io = StageIO(config.workdir_path, "keywords_sample")
    artifact = paths(config)
    io.require_input(artifact["candidates"], producer_stage="filter")

    candidates = _read_candidates(artifact["candidates"])
    store = RecordStore(artifact["store"])
    state = load_refinement_state(config)
    state.save(artifact["keywords_state"])  # checkpoint the starting state

    targets = state.candidate_keywords()
    matcher = KeywordMatcher(list(state.entries))
    matches: dict[str, list[CommitRecord]] = {t: [] for t in targets}
    unmatched: list[CommitRecord] = []
    for commit in candidates:
        hit = matcher.match(commit.message)
        if not hit:
            unmatched.append(commit)
            continue
        for keyword in hit:
            if keyword in matches:
                matches[keyword].append(commit)

    seed = config.seeds.sampling
    plans: dict[str, dict] = {}
    items: list[dict] = []

    def add_items(keyword: str | None, population: list[CommitRecord], plan_key: str):
        if not population:
            plans[plan_key] = {"population_size": 0, "sample_size": 0}
            return
        plan = make_plan(len(population), seed=seed,
                         confidence=config.keywords.confidence,
                         margin=config.keywords.margin)
        refs = sorted((c.repo, c.sha) for c in population)
        sampled = kw.draw_sample(refs, plan)
        plans[plan_key] = {
            "population_size": plan.population_size,
            "sample_size": plan.sample_size,
            "confidence": plan.confidence,
            "margin": plan.margin,
            "seed": plan.seed,
        }
        slug = re.sub(r"[^a-z0-9]+", "-", plan_key).strip("-") or "negative"
        by_key = {(c.repo, c.sha): c for c in population}
        for repo, sha in sampled:
            commit = by_key[(repo, sha)]
            payload = {"message": commit.message}
            if keyword is not None:
                payload["keyword"] = keyword
            else:
                payload["negative_sample"] = True
            if store.has_diff(repo, sha):
                diff_text = store.get_diff(repo, sha)
                payload["diff"] = diff_text
                structured = _structured_diff(diff_text)
                if structured is not None:
                    payload["diff_hunks"] = structured
            items.append({
                "item_id": f"{slug}__{sha}",
                "payload": payload,
                "meta": {"repo": repo, "sha": sha, "plan": plan_key},
            })

    for keyword in targets:
        add_items(keyword, matches[keyword], keyword)
    add_items(None, unmatched, "__negative__")

    artifact["keyword_plans"].write_text(
        json.dumps(plans, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    with artifact["keyword_items"].open("w", encoding="utf-8") as fh:
        for item in items:
            fh.write(json.dumps(item, ensure_ascii=False) + "\n")
    io.record_output(artifact["keyword_plans"])
    io.record_output(artifact["keyword_items"])
    io.record_output(artifact["keywords_state"])
    io.finalize()
    return {"stage": "keywords_sample", "keywords_sampled": len(targets),
            "items": len(items), "plans": plans}


def stage_keywords_refine(config: PipelineConfig, labels_path: str | Path,
                          round_number: int) -> dict:
    io = StageIO(config.workdir_path, "keywords_refine")
    artifact = paths(config)
    labels_path = Path(labels_path)
    io.require_input(labels_path)

    state = load_refinement_state(config)
    labels, proposals = labels_from_export(_read_ndjson(labels_path))
    new_state = refinement_round(state, labels, proposals, round_number)
    new_state.save(artifact["keywords_state"])
    io.record_output(artifact["keywords_state"])
    io.finalize()
    return {
        "stage": "keywords_refine",
        "round": round_number,
        "retained": new_state.retained_keywords(),
        "candidates": new_state.candidate_keywords(),
        "proposals_ingested": proposals,
    }


def _keyword_matching_commits(config: PipelineConfig) -> tuple[list[CommitRecord], str]:
    artifact = paths(config)
    candidates = _read_candidates(artifact["candidates"])
    keywords, version = current_keyword_list(config)
    matcher = KeywordMatcher(keywords)
    return [c for c in candidates if matcher.match(c.message)], version


def _grid_resolver(config: PipelineConfig):
    artifact = paths(config)
    store = RecordStore(artifact["store"])
    candidates = {(c.repo, c.sha): c for c in _read_candidates(artifact["candidates"])}

    def resolve(ref: tuple[str, str]) -> GridCommit:
        repo, sha = ref
        commit = candidates[(repo, sha)]
        return GridCommit(repo=repo, sha=sha, message=commit.message,
                          diff=store.get_diff(repo, sha))

    return resolve


def stage_grid_run(config: PipelineConfig, stop_after_cells: int | None = None) -> dict:
    io = StageIO(config.workdir_path, "grid_run")
    artifact = paths(config)
    io.require_input(artifact["candidates"], producer_stage="filter")

    matching, _ = _keyword_matching_commits(config)
    store = RecordStore(artifact["store"])
    population = [(c.repo, c.sha) for c in matching
                  if store.has_diff(c.repo, c.sha)]
    if len(population) < config.grid.sample_size:
        raise MissingStageInput(
            f"grid needs {config.grid.sample_size} keyword-matching commits with "
            f"diffs, found {len(population)}")

    provider_ids = config.grid.providers or config.provider_ids()
    if not provider_ids:
        raise ConfigError("grid needs at least one provider")
    spec = GridSpec(
        commit_sample=sample_grid_commits(population, config.grid.sample_size,
                                          config.seeds.grid),
        providers=tuple(provider_ids),
        strategies=tuple(config.grid.strategies),
        seed=config.seeds.grid,
    )
    gateway = build_gateway(config)
    templates = load_templates(config.templates_dir)
    run = run_grid(spec, gateway=gateway, templates=templates,
                   resolve_commit=_grid_resolver(config),
                   out_dir=artifact["grid_dir"], workers=config.grid.workers,
                   stop_after_cells=stop_after_cells)

    resolver = _grid_resolver(config)
    with artifact["grid_items"].open("w", encoding="utf-8") as fh:
        for payload in run.results:
            commit = resolver((payload["repo"], payload["sha"]))
            item_payload = {
                "message": commit.message,
                "diff": commit.diff,
                "review": payload["response_text"],
            }
            structured = _structured_diff(commit.diff)
            if structured is not None:
                item_payload["diff_hunks"] = structured
            item = {
                "item_id": payload["cell_id"],
                "payload": item_payload,
                # provenance hidden from annotators, carried for selection
                "meta": {
                    "cell_id": payload["cell_id"],
                    "provider_id": payload["provider_id"],
                    "strategy": payload["strategy"],
                    "repo": payload["repo"],
                    "sha": payload["sha"],
                },
            }
            fh.write(json.dumps(item, ensure_ascii=False) + "\n")
    io.record_output(artifact["grid_items"])
    io.finalize()
    return {
        "stage": "grid_run",
        "expected_cells": spec.expected_cells,
        "results": len(run.results),
        "executed": run.executed,
        "reused": run.reused,
        "manifest": run.manifest.counts(),
    }


def stage_grid_select(config: PipelineConfig, labels_path: str | Path) -> dict:
    io = StageIO(config.workdir_path, "grid_select")
    artifact = paths(config)
    labels_path = Path(labels_path)
    io.require_input(labels_path)
    manifest_path = artifact["grid_dir"] / "manifest.json"
    io.require_input(manifest_path)

    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    expected = [cid for cid, cell in manifest.get("cells", {}).items()
                if cell.get("status") == "ok"]
    labels = cells_from_export(_read_ndjson(labels_path))
    report = select_winner(labels, expected_cells=expected)
    artifact["winner"].write_text(
        json.dumps(report.to_dict(), indent=1, sort_keys=True) + "\n",
        encoding="utf-8")
    io.record_output(artifact["winner"])
    io.finalize()
    return {"stage": "grid_select", **report.to_dict()}


def stage_dataset_build(config: PipelineConfig) -> dict:
    io = StageIO(config.workdir_path, "dataset_build")
    artifact = paths(config)
    io.require_input(artifact["candidates"], producer_stage="filter")

    provider = config.dataset.provider
    strategy = config.dataset.strategy
    if provider is None or strategy is None:
        winner_path = io.require_input(artifact["winner"],
                                       producer_stage="grid_select")
        winner = json.loads(winner_path.read_text(encoding="utf-8"))
        provider = provider or winner["provider_id"]
        strategy = strategy or winner["strategy"]

    matching, keyword_version = _keyword_matching_commits(config)
    store = RecordStore(artifact["store"])
    resolver = _grid_resolver(config)
    commits = [resolver((c.repo, c.sha)) for c in matching
               if store.has_diff(c.repo, c.sha)]

    gateway = build_gateway(config)
    templates = load_templates(config.templates_dir)
    report = build_dataset(commits, provider, strategy, gateway=gateway,
                           templates=templates, out_path=artifact["dataset"])
    write_dataset_manifest(artifact["dataset_manifest"], report,
                           keyword_list_version=keyword_version,
                           extra={"input_commits": len(commits)})
    io.record_output(artifact["dataset"])
    io.record_output(artifact["dataset_manifest"])
    io.finalize()
    return {"stage": "dataset_build", **report.to_dict(),
            "input_commits": len(commits)}


def stage_external_filter(config: PipelineConfig,
                          input_path: str | Path | None = None) -> dict:
    io = StageIO(config.workdir_path, "external_filter")
    artifact = paths(config)
    raw_source = input_path or config.external.input
    if not raw_source:
        raise MissingStageInput("external filter needs an input file "
                                "(--input or external.input)")
    source = Path(raw_source)
    io.require_input(source)

    keywords, keyword_version = current_keyword_list(config)
    samples = read_external_jsonl(
        source,
        diff_hunk_column=config.external.diff_hunk_column,
        review_comment_column=config.external.review_comment_column,
        partition_column=config.external.partition_column,
        default_partition=config.external.default_partition,
    )
    flagged = list(filter_external_partition(samples, keywords))
    with artifact["external_flagged"].open("w", encoding="utf-8") as fh:
        for sample in flagged:
            fh.write(json.dumps(sample.to_dict(), ensure_ascii=False) + "\n")
    with artifact["external_items"].open("w", encoding="utf-8") as fh:
        for i, sample in enumerate(flagged):
            item = {
                "item_id": f"ext-{i:05d}",
                "payload": {
                    "diff_hunk": sample.sample.diff_hunk,
                    "review_comment": sample.sample.review_comment,
                    "matched_keywords": list(sample.matched_keywords),
                },
                "meta": {"source_partition": sample.sample.source_partition},
            }
            fh.write(json.dumps(item, ensure_ascii=False) + "\n")
    io.record_output(artifact["external_flagged"])
    io.record_output(artifact["external_items"])
    io.finalize()
    return {"stage": "external_filter", "flagged": len(flagged),
            "keyword_list_version": keyword_version}


def stage_evaluate(config: PipelineConfig, labels_path: str | Path) -> dict:
    io = StageIO(config.workdir_path, "evaluate")
    artifact = paths(config)
    labels_path = Path(labels_path)
    io.require_input(labels_path)
    items = _read_ndjson(labels_path)
    if not items:
        raise MissingStageInput(f"{labels_path} contains no labeled pairs")

    pairs = []
    labels_a, labels_b, adjudicated = [], [], []
    for item in items:
        payload = item.get("payload") or {}
        try:
            pairs.append((payload["generated"], payload["ground_truth"]))
        except KeyError as exc:
            raise MissingStageInput(
                f"item {item.get('item_id')!r} lacks payload.{exc.args[0]}") from exc
        raw_labels = item.get("labels") or {}
        if len(raw_labels) != 2:
            raise MissingStageInput(
                f"item {item.get('item_id')!r} is not doubly labeled")
        first, second = (raw_labels[k] for k in sorted(raw_labels))
        labels_a.append(PairJudgment(bool(first["semantic_equivalence"]),
                                     bool(first["applicability"])))
        labels_b.append(PairJudgment(bool(second["semantic_equivalence"]),
                                     bool(second["applicability"])))
        adj = item.get("adjudicated")
        adjudicated.append(
            PairJudgment(bool(adj["semantic_equivalence"]), bool(adj["applicability"]))
            if adj else None)

    report = eval_report(pairs, labels_a, labels_b, adjudicated)
    artifact["eval_report"].write_text(
        json.dumps(report.to_dict(), indent=1, sort_keys=True) + "\n",
        encoding="utf-8")
    io.record_output(artifact["eval_report"])
    io.finalize()
    return {"stage": "evaluate", "table": format_report(report),
            **report.to_dict()}


def stage_report(config: PipelineConfig) -> dict:
    artifact = paths(config)
    summary: dict = {"stage": "report", "workdir": str(config.workdir_path)}
    if artifact["funnel_report"].exists():
        summary["funnel"] = json.loads(artifact["funnel_report"].read_text())
    if artifact["keywords_state"].exists():
        state = RefinementState.load(artifact["keywords_state"])
        summary["keywords"] = {
            "completed_rounds": state.completed_rounds,
            "retained": state.retained_keywords(),
            "candidates": state.candidate_keywords(),
        }
    grid_manifest = artifact["grid_dir"] / "manifest.json"
    if grid_manifest.exists():
        summary["grid"] = json.loads(grid_manifest.read_text()).get("counts")
    if artifact["winner"].exists():
        winner = json.loads(artifact["winner"].read_text())
        summary["winner"] = {"provider_id": winner["provider_id"],
                             "strategy": winner["strategy"]}
    if artifact["dataset_manifest"].exists():
        summary["dataset"] = json.loads(artifact["dataset_manifest"].read_text())
    if artifact["eval_report"].exists():
        summary["evaluation"] = json.loads(artifact["eval_report"].read_text())
    return summary
