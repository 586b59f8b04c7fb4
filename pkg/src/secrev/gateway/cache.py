"""On-disk response cache: one JSON file per prompt hash.

Keyed by (provider_id, model_name, temperature, prompt_hash) so identical
requests never hit the network twice and long grid runs survive restarts.
Writes are atomic (tmp file + rename) and flushed before rename, making a
persisted result the durable commit point of a generation.
"""

import json
import os
import re
import tempfile
from pathlib import Path

_SAFE_RE = re.compile(r"[^A-Za-z0-9._-]+")


def _safe(component: str) -> str:
    return _SAFE_RE.sub("_", component) or "_"


class ResponseCache:
    def __init__(self, root: str | Path):
        self.root = Path(root)

    def path(self, provider_id: str, model_name: str, temperature: float,
             prompt_hash: str) -> Path:
        return (self.root / _safe(provider_id) / _safe(model_name or "default")
                / f"t{temperature:g}" / f"{prompt_hash}.json")

    def get(self, provider_id: str, model_name: str, temperature: float,
            prompt_hash: str) -> dict | None:
        path = self.path(provider_id, model_name, temperature, prompt_hash)
        try:
            with path.open("r", encoding="utf-8") as fh:
                return json.load(fh)
        except FileNotFoundError:
            return None
        except json.JSONDecodeError:
            return None  # torn write from a crash: treat as a miss

    def put(self, provider_id: str, model_name: str, temperature: float,
            prompt_hash: str, payload: dict) -> None:
        path = self.path(provider_id, model_name, temperature, prompt_hash)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(payload, fh, ensure_ascii=False)
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
