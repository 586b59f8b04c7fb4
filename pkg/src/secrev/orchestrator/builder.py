"""Full dataset generation with the winning provider/strategy combination.

A resumable batch job: samples already present in the output are skipped,
per-commit failures are aggregated in the run report (never silently
dropped), and written + failed + skipped always equals the input size.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from secrev.datasets.records import DatasetSample, sample_id
from secrev.gateway import LlmGateway
from secrev.mining.types import isoformat_utc, utc_now
from secrev.orchestrator.grid import GridCommit
from secrev.prompts import PromptTemplate, render_plan

logger = logging.getLogger(__name__)


@dataclass
class BuildReport:
    provider_id: str
    strategy: str
    template_version: str
    written: int = 0
    skipped_existing: int = 0
    failed: int = 0
    failures: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "provider_id": self.provider_id,
            "strategy": self.strategy,
            "template_version": self.template_version,
            "written": self.written,
            "skipped_existing": self.skipped_existing,
            "failed": self.failed,
            "failures": self.failures,
        }


def _existing_ids(path: Path) -> set[str]:
    ids = set()
    if path.exists():
        with path.open("r", encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    ids.add(json.loads(line)["id"])
    return ids


def build_dataset(
    commits: Iterable[GridCommit],
    provider_id: str,
    strategy: str,
    *,
    gateway: LlmGateway,
    templates: dict[str, PromptTemplate],
    out_path: str | Path,
    resume: bool = True,
) -> BuildReport:
    """Generate one sample per commit into a JSONL file."""
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    template = templates[strategy]
    report = BuildReport(provider_id=provider_id, strategy=strategy,
                         template_version=template.version_tag)

    seen = _existing_ids(out_path) if resume else set()
    mode = "a" if resume and out_path.exists() else "w"
    with out_path.open(mode, encoding="utf-8") as fh:
        for commit in commits:
            sid = sample_id(commit.repo, commit.sha, provider_id, strategy,
                            template.version_tag)
            if sid in seen:
                report.skipped_existing += 1
                continue
            try:
                plan = render_plan(template, commit.diff, commit.message)
                result = gateway.generate(
                    provider_id, plan, commit_ref=(commit.repo, commit.sha),
                    strategy=strategy, template_version=template.version_tag)
                sample = DatasetSample(
                    repo=commit.repo,
                    sha=commit.sha,
                    diff=commit.diff,
                    message=commit.message,
                    synthetic_review=result.response_text,
                    provider_id=provider_id,
                    strategy=strategy,
                    template_version=template.version_tag,
                    created_at=utc_now(),
                )
            except Exception as exc:
                logger.warning("sample for %s failed: %s", commit.sha, exc)
                report.failed += 1
                report.failures[f"{commit.repo}@{commit.sha}"] = \
                    f"{type(exc).__name__}: {exc}"
                continue
            fh.write(json.dumps(sample.to_dict(), ensure_ascii=False) + "\n")
            fh.flush()
            seen.add(sid)
            report.written += 1
    return report


def write_dataset_manifest(
    path: str | Path,
    report: BuildReport,
    keyword_list_version: str = "",
    extra: dict | None = None,
) -> None:
    """Companion manifest: counts, keyword list version, template version."""
    payload = {
        "created_at": isoformat_utc(utc_now()),
        "keyword_list_version": keyword_list_version,
        **report.to_dict(),
    }
    if extra:
        payload.update(extra)
    Path(path).write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n",
                          encoding="utf-8")
