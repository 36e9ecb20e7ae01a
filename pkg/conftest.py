"""Shared pytest options: long G26 cases run only with --runslow or HECKE_RUN_SLOW=1."""

import os

import pytest


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run the long G26 cases")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long enumeration, enabled with --runslow or HECKE_RUN_SLOW=1")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow") or os.getenv("HECKE_RUN_SLOW", "").lower() in ("1", "true", "yes", "on"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow or HECKE_RUN_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(autouse=True)
def cache_dir(tmp_path, monkeypatch):
    """Isolated enumeration cache for every test."""
    path = tmp_path / "cache"
    monkeypatch.setenv("HECKE_CACHE_DIR", str(path))
    return path
