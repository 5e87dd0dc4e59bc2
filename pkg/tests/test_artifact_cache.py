import pytest

import artifact_cache
from artifact_cache import BuildCache, cache_enabled, get_cache

SPEC = {"family": "C1", "n": 2, "r": 1, "s": 2}
ARTIFACT = {"schema_version": 1, "nodes": [{"id": 0}, {"id": 1}], "edges": []}


@pytest.fixture
def expired_cache(tmp_path):
    return BuildCache(tmp_path / "expired.db", cache_ttl_hours=-1)


def test_set_and_get(isolated_cache):
    assert isolated_cache.get(SPEC) is None
    assert isolated_cache.set(SPEC, ARTIFACT)
    assert isolated_cache.get(SPEC) == ARTIFACT
    assert isolated_cache.get(dict(SPEC, s=3)) is None


def test_cache_key_ignores_field_order(isolated_cache):
    reordered = {"s": 2, "r": 1, "n": 2, "family": "C1"}
    assert isolated_cache._generate_cache_key(reordered) == isolated_cache._generate_cache_key(SPEC)
    assert isolated_cache._generate_cache_key(SPEC).startswith("C1:")


def test_expired_entries_are_misses(expired_cache):
    assert expired_cache.set(SPEC, ARTIFACT)
    assert expired_cache.get(SPEC) is None
    assert expired_cache.list_entries(status="expired")[0]["status"] == "expired"
    assert expired_cache.list_entries() == []
    assert expired_cache.clear_expired() == 1
    assert expired_cache.get_stats()["total_entries"] == 0


def test_stats_and_listing(isolated_cache):
    isolated_cache.set(SPEC, ARTIFACT)
    isolated_cache.set({"family": "A1", "n": 3, "r": 1, "s": 1}, ARTIFACT)
    stats = isolated_cache.get_stats()
    assert stats["total_entries"] == 2
    assert stats["valid_entries"] == 2
    assert stats["entries_by_family"] == {"A1": 1, "C1": 1}
    entries = isolated_cache.list_entries(family="C1")
    assert len(entries) == 1
    assert entries[0]["summary"] == "C1:2 | r=1 | s=2 | elements=2"
    assert entries[0]["status"] == "valid"


def test_clear_all(isolated_cache):
    isolated_cache.set(SPEC, ARTIFACT)
    assert isolated_cache.clear_all() == 1
    assert isolated_cache.get(SPEC) is None


def test_global_instance(isolated_cache):
    assert get_cache() is isolated_cache
    artifact_cache.print_cache_stats()


def test_cache_enabled(monkeypatch):
    monkeypatch.delenv("KRKIT_CACHE", raising=False)
    assert cache_enabled()
    monkeypatch.setenv("KRKIT_CACHE", "0")
    assert not cache_enabled()
    monkeypatch.setenv("KRKIT_CACHE", "1")
    assert cache_enabled()
