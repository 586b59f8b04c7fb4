"""Shared fixtures: fixture-host data and paths."""

import json
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def funnel_host_path() -> Path:
    return FIXTURES / "funnel_host.json"


@pytest.fixture(scope="session")
def grid_host_path() -> Path:
    return FIXTURES / "grid_host.json"


@pytest.fixture()
def funnel_host_data(funnel_host_path) -> dict:
    return json.loads(funnel_host_path.read_text())


@pytest.fixture()
def grid_host_data(grid_host_path) -> dict:
    return json.loads(grid_host_path.read_text())
