"""Stage artifact bookkeeping: manifests with content hashes and a lock.

Every stage records the hashes of its outputs; a consuming stage refuses to
run when a declared input is missing or no longer matches the hash its
producer recorded. One command at a time per output directory, enforced by
a pid lock file (stale locks from killed processes are reclaimed).
"""

import hashlib
import json
import os
from contextlib import contextmanager
from pathlib import Path

from secrev.errors import MissingStageInput, OutputDirLocked, StageIntegrityError

LOCK_NAME = ".secrev.lock"
MANIFESTS_DIR = "manifests"


def file_sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as fh:
        while chunk := fh.read(1 << 16):
            digest.update(chunk)
    return digest.hexdigest()


def _pid_alive(pid: int) -> bool:
    try:
        os.kill(pid, 0)
    except ProcessLookupError:
        return False
    except PermissionError:
        return True
    return True


@contextmanager
def workdir_lock(workdir: Path):
    workdir.mkdir(parents=True, exist_ok=True)
    lock_path = workdir / LOCK_NAME
    while True:
        try:
            fd = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
            os.write(fd, str(os.getpid()).encode())
            os.close(fd)
            break
        except FileExistsError:
            try:
                holder = int(lock_path.read_text().strip() or "0")
            except (ValueError, FileNotFoundError):
                holder = 0
            if holder and _pid_alive(holder):
                raise OutputDirLocked(
                    f"{workdir} is locked by running process {holder}") from None
            lock_path.unlink(missing_ok=True)  # stale lock: reclaim
    try:
        yield
    finally:
        lock_path.unlink(missing_ok=True)


class StageIO:
    """Declared inputs/outputs of one pipeline stage."""

    def __init__(self, workdir: Path, stage: str):
        self.workdir = workdir
        self.stage = stage
        self.manifests_dir = workdir / MANIFESTS_DIR
        self._output_hashes: dict[str, str] = {}

    def _manifest_path(self, stage: str) -> Path:
        return self.manifests_dir / f"{stage}.json"

    def require_input(self, path: Path, producer_stage: str | None = None) -> Path:
        """The artifact must exist; if its producer recorded a hash, verify it."""
        if not path.exists():
            raise MissingStageInput(
                f"stage {self.stage!r} needs {path} "
                + (f"(produced by {producer_stage!r})" if producer_stage else ""))
        if producer_stage:
            manifest_path = self._manifest_path(producer_stage)
            if manifest_path.exists():
                manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
                recorded = manifest.get("outputs", {}).get(str(path))
                if recorded and recorded != file_sha256(path):
                    raise StageIntegrityError(
                        f"{path} was modified after {producer_stage!r} produced it")
        return path

    def record_output(self, path: Path) -> Path:
        if path.exists():
            self._output_hashes[str(path)] = file_sha256(path)
        return path

    def finalize(self) -> None:
        self.manifests_dir.mkdir(parents=True, exist_ok=True)
        self._manifest_path(self.stage).write_text(
            json.dumps({"stage": self.stage, "outputs": self._output_hashes},
                       indent=1, sort_keys=True) + "\n",
            encoding="utf-8")
