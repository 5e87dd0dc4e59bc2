import pathlib
import sys

import pytest

SCRIPTS = pathlib.Path(__file__).resolve().parent.parent / "scripts"
if str(SCRIPTS) not in sys.path:
    sys.path.insert(0, str(SCRIPTS))

import artifact_cache  # noqa: E402
from artifact_cache import BuildCache  # noqa: E402


@pytest.fixture
def isolated_cache(tmp_path, monkeypatch):
    """A fresh build cache in tmp_path, installed as the global instance."""
    cache = BuildCache(tmp_path / "cache.db")
    monkeypatch.setattr(artifact_cache, "_cache_instance", cache)
    monkeypatch.delenv("KRKIT_CACHE", raising=False)
    return cache


@pytest.fixture
def no_cache(monkeypatch):
    monkeypatch.setenv("KRKIT_CACHE", "0")
