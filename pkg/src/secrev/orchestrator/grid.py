"""Prompt/provider grid evaluation with resumable, idempotent cells.

Each (commit, provider, strategy) cell produces exactly one result file.
Cell files hold only run-independent content (response text, hashes, token
estimates), so two runs with the same seeds produce byte-identical files;
volatile run data (latency, retries, cache hits) lives in the manifest.
A rerun executes only cells whose files are missing.
"""

import json
import logging
import os
import tempfile
import threading
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable

from secrev.gateway import LlmGateway
from secrev.mining.types import isoformat_utc, utc_now
from secrev.prompts import PromptTemplate, render_plan

logger = logging.getLogger(__name__)


class GridInterrupted(RuntimeError):
    """Raised by the stop_after_cells test hook to simulate a mid-run crash."""


@dataclass(frozen=True)
class GridCommit:
    repo: str
    sha: str
    message: str
    diff: str


@dataclass(frozen=True)
class GridSpec:
    commit_sample: tuple[tuple[str, str], ...]  # (repo, sha)
    providers: tuple[str, ...]
    strategies: tuple[str, ...]
    seed: int = 0

    @property
    def expected_cells(self) -> int:
        return len(self.commit_sample) * len(self.providers) * len(self.strategies)

    def cells(self) -> list[tuple[str, str, tuple[str, str]]]:
        return [
            (provider, strategy, ref)
            for provider in self.providers
            for strategy in self.strategies
            for ref in self.commit_sample
        ]

    def to_dict(self) -> dict:
        return {
            "commit_sample": [list(ref) for ref in self.commit_sample],
            "providers": list(self.providers),
            "strategies": list(self.strategies),
            "seed": self.seed,
        }


def cell_id(provider: str, strategy: str, repo: str, sha: str) -> str:
    return f"{provider}__{strategy}__{repo.replace('/', '_')}__{sha}"


class GridManifest:
    """Synchronized ledger of per-cell outcomes, persisted after every cell."""

    def __init__(self, path: Path, spec: GridSpec | None = None):
        self.path = path
        self._lock = threading.Lock()
        if path.exists():
            data = json.loads(path.read_text(encoding="utf-8"))
            self.spec = data.get("spec")
            self.cells: dict[str, dict] = data.get("cells", {})
        else:
            self.spec = spec.to_dict() if spec else None
            self.cells = {}

    def record(self, cid: str, status: str, **extra) -> None:
        with self._lock:
            self.cells[cid] = {"status": status,
                               "completed_at": isoformat_utc(utc_now()), **extra}
            self._save()

    def _save(self) -> None:
        payload = {
            "spec": self.spec,
            "counts": self.counts(),
            "cells": self.cells,
        }
        self.path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.path.parent, suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
        os.replace(tmp, self.path)

    def counts(self) -> dict[str, int]:
        ok = sum(1 for c in self.cells.values() if c["status"] == "ok")
        failed = sum(1 for c in self.cells.values() if c["status"] == "failed")
        return {"ok": ok, "failed": failed, "total": len(self.cells)}

    def failed_cells(self) -> dict[str, dict]:
        return {cid: c for cid, c in self.cells.items() if c["status"] == "failed"}


CELL_PAYLOAD_KEYS = (
    "cell_id", "repo", "sha", "provider_id", "model_name", "strategy",
    "template_version", "prompt_hash", "response_text", "turn_responses",
    "tokens_in", "tokens_out", "tokens_approximate",
)


def _write_cell_file(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    with os.fdopen(fd, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(payload, ensure_ascii=False, sort_keys=True) + "\n")
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


@dataclass
class GridRunResult:
    results: list[dict]
    manifest: GridManifest
    executed: int
    reused: int


def run_grid(
    spec: GridSpec,
    *,
    gateway: LlmGateway,
    templates: dict[str, PromptTemplate],
    resolve_commit: Callable[[tuple[str, str]], GridCommit],
    out_dir: str | Path,
    workers: int = 4,
    stop_after_cells: int | None = None,
) -> GridRunResult:
    """Execute (or finish) the grid; returns all cell payloads sorted by id.

    Per-cell failures are recorded in the manifest, never fatal; failed or
    missing cells are re-attempted on the next run.
    """
    out_dir = Path(out_dir)
    cells_dir = out_dir / "cells"
    cells_dir.mkdir(parents=True, exist_ok=True)
    manifest = GridManifest(out_dir / "manifest.json", spec)

    todo = []
    reused = 0
    for provider, strategy, ref in spec.cells():
        cid = cell_id(provider, strategy, *ref)
        if (cells_dir / f"{cid}.json").exists():
            reused += 1
            if manifest.cells.get(cid, {}).get("status") != "ok":
                manifest.record(cid, "ok", recovered=True)
        else:
            todo.append((cid, provider, strategy, ref))

    executed = 0
    counter_lock = threading.Lock()

    def run_cell(cid: str, provider: str, strategy: str, ref: tuple[str, str]) -> None:
        nonlocal executed
        commit = resolve_commit(ref)
        template = templates[strategy]
        plan = render_plan(template, commit.diff, commit.message)
        result = gateway.generate(
            provider, plan, commit_ref=(commit.repo, commit.sha),
            strategy=strategy, template_version=template.version_tag)
        payload = {
            "cell_id": cid,
            "repo": commit.repo,
            "sha": commit.sha,
            "provider_id": result.provider_id,
            "model_name": result.model_name,
            "strategy": strategy,
            "template_version": result.template_version,
            "prompt_hash": result.prompt_hash,
            "response_text": result.response_text,
            "turn_responses": list(result.turn_responses),
            "tokens_in": result.tokens_in,
            "tokens_out": result.tokens_out,
            "tokens_approximate": result.tokens_approximate,
        }
        _write_cell_file(cells_dir / f"{cid}.json", payload)
        manifest.record(cid, "ok", from_cache=result.from_cache,
                        latency_ms=result.latency_ms,
                        retry_count=result.retry_count)
        with counter_lock:
            executed += 1
            if stop_after_cells is not None and executed >= stop_after_cells:
                raise GridInterrupted(f"stopped after {executed} cells")

    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {pool.submit(run_cell, *item): item for item in todo}
        for future in as_completed(futures):
            cid, provider, strategy, ref = futures[future]
            try:
                future.result()
            except GridInterrupted:
                for pending in futures:
                    pending.cancel()
                raise
            except Exception as exc:
                logger.error("cell %s failed: %s", cid, exc)
                manifest.record(cid, "failed", error=f"{type(exc).__name__}: {exc}")

    results = []
    for provider, strategy, ref in spec.cells():
        path = cells_dir / f"{cell_id(provider, strategy, *ref)}.json"
        if path.exists():
            results.append(json.loads(path.read_text(encoding="utf-8")))
    results.sort(key=lambda r: r["cell_id"])
    return GridRunResult(results=results, manifest=manifest,
                         executed=executed, reused=reused)


def sample_grid_commits(
    population: Iterable[tuple[str, str]], size: int, seed: int,
) -> tuple[tuple[str, str], ...]:
    """Draw the grid's commit sample with the seeded keyword sampler so the
    selection is auditable."""
    from secrev.keywords.sampling import SamplePlan, draw_sample

    ids = sorted(population)
    if len(ids) < size:
        raise ValueError(f"population has {len(ids)} commits, need {size}")
    plan = SamplePlan(population_size=len(ids), confidence=0.95, margin=0.05,
                      sample_size=size, seed=seed)
    return tuple(draw_sample(ids, plan))
