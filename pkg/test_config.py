#!/usr/bin/env python3
"""
Tests for settings loading.
"""

import json
from fractions import Fraction
from pathlib import Path

import pytest

from app.coeff import RingSpec
from app.config import ConfigError, Settings, load_settings


@pytest.fixture(autouse=True)
def clean_env(monkeypatch, tmp_path):
    for name in ("HECKE_CONFIG", "HECKE_CACHE_DIR", "HECKE_SEED", "HECKE_RUN_SLOW"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.chdir(tmp_path)


def test_defaults():
    settings = load_settings()
    assert settings == Settings()
    assert settings.cache_dir == Path(".hecke_cache")
    assert settings.seed == 7
    assert settings.max_dim == 50000


def test_environment_overrides_config_file(tmp_path, monkeypatch):
    config = tmp_path / "custom.json"
    config.write_text(json.dumps({"seed": 3, "max_len": 40, "cache_dir": "from-file"}))
    monkeypatch.setenv("HECKE_CONFIG", str(config))
    monkeypatch.setenv("HECKE_CACHE_DIR", "from-env")
    monkeypatch.setenv("HECKE_RUN_SLOW", "yes")
    settings = load_settings()
    assert settings.seed == 3
    assert settings.max_len == 40
    assert settings.cache_dir == Path("from-env")
    assert settings.run_slow
    assert settings.config_file == config


def test_default_config_file_in_working_directory(tmp_path, monkeypatch):
    (tmp_path / "hecke.json").write_text(json.dumps({"jobs": 4}))
    monkeypatch.setenv("HECKE_SEED", "11")
    settings = load_settings()
    assert settings.jobs == 4
    assert settings.seed == 11


def test_unreadable_config(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("[")
    with pytest.raises(ConfigError):
        load_settings(str(path))
    with pytest.raises(ConfigError):
        load_settings(str(tmp_path / "missing.json"))


def test_named_specializations():
    ring = RingSpec(("a", "b", "c"), frozenset({"c"}))
    settings = Settings(specializations={"p": {"a": "1/2", "b": "0", "c": "-1"}})
    s = settings.specialization("@p", ring)
    assert s.values == {"a": Fraction(1, 2), "b": Fraction(0), "c": Fraction(-1)}
    assert settings.specialization("a=1,b=2,c=3", ring).values["b"] == 2
    with pytest.raises(ConfigError):
        settings.specialization("@q", ring)
