from pathlib import Path

import pytest


@pytest.fixture(scope="session")
def repo_fixtures_dir() -> Path:
    return Path(__file__).resolve().parents[2] / "fixtures"
