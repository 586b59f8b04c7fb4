"""Grid evaluation, winner selection, and dataset generation."""

from secrev.orchestrator.builder import BuildReport, build_dataset, write_dataset_manifest
from secrev.orchestrator.grid import (
    GridCommit,
    GridInterrupted,
    GridManifest,
    GridRunResult,
    GridSpec,
    cell_id,
    run_grid,
    sample_grid_commits,
)
from secrev.orchestrator.winner import (
    CellLabel,
    ComboScore,
    WinnerReport,
    cells_from_export,
    select_winner,
)

__all__ = [
    "BuildReport",
    "build_dataset",
    "write_dataset_manifest",
    "GridCommit",
    "GridInterrupted",
    "GridManifest",
    "GridRunResult",
    "GridSpec",
    "cell_id",
    "run_grid",
    "sample_grid_commits",
    "CellLabel",
    "ComboScore",
    "WinnerReport",
    "cells_from_export",
    "select_winner",
]
