#!/usr/bin/env python3
"""
SQLite store for built graph artifacts.

A JSON artifact depends only on (family, n, r, s) and the schema version,
so `krkit build` reuses a stored copy when one is still fresh. Element
payloads are never stored; callers that need them rebuild in-process.
"""

import contextlib
import hashlib
import json
import logging
import os
import pathlib
import sqlite3
from datetime import datetime, timedelta
from typing import Any, Dict, Iterator, List, Optional

import config

logging.basicConfig(level=logging.INFO, format="[%(levelname)s] %(message)s")
log = logging.getLogger(__name__)

ROOT = pathlib.Path(__file__).resolve().parent.parent
CACHE_DB = ROOT / config.DATA_DIR / config.CACHE_DB_FILE

SCHEMA_SQL = (
    "CREATE TABLE IF NOT EXISTS artifacts ("
    " key TEXT PRIMARY KEY, family TEXT NOT NULL, label TEXT, body TEXT NOT NULL,"
    " stored TEXT NOT NULL, stale_after TEXT NOT NULL, summary TEXT, bytes INTEGER)",
    "CREATE INDEX IF NOT EXISTS artifacts_by_staleness ON artifacts(stale_after)",
    "CREATE INDEX IF NOT EXISTS artifacts_by_family ON artifacts(family)",
)
UPSERT_SQL = ("REPLACE INTO artifacts (key, family, label, body, stored, stale_after, summary, bytes)"
              " VALUES (:key, :family, :label, :body, :stored, :stale_after, :summary, :bytes)")
STALE = "stale_after <= :now"
FRESH = "stale_after > :now"


def cache_enabled() -> bool:
    return os.getenv(config.CACHE_ENV_VAR, "1").strip() != "0"


def _now() -> str:
    return datetime.now().isoformat()


class BuildCache:
    """Artifacts keyed by KR label and schema version, each with a staleness deadline."""

    def __init__(self, db_path: pathlib.Path = None, cache_ttl_hours: int = None):
        self.db_path = pathlib.Path(db_path or CACHE_DB)
        self.cache_ttl_hours = cache_ttl_hours or config.CACHE_TTL_HOURS
        self.db_path.parent.mkdir(parents=True, exist_ok=True)
        with self._connect() as db:
            for statement in SCHEMA_SQL:
                db.execute(statement)
        log.debug(f"🗄️ Artifact store ready: {self.db_path}")

    @contextlib.contextmanager
    def _connect(self) -> Iterator[sqlite3.Connection]:
        db = sqlite3.connect(self.db_path)
        db.row_factory = sqlite3.Row
        try:
            yield db
            db.commit()
        finally:
            db.close()

    def _generate_cache_key(self, spec: Dict[str, Any]) -> str:
        """family:md5 of the KR label plus schema version."""
        payload = json.dumps({**spec, "schema": config.SCHEMA_VERSION}, sort_keys=True)
        return f"{spec.get('family', 'unknown')}:{hashlib.md5(payload.encode('utf-8')).hexdigest()}"

    @staticmethod
    def _summary(spec: Dict[str, Any], artifact: Dict[str, Any]) -> str:
        return (f"{spec.get('family')}:{spec.get('n')} | r={spec.get('r')} | s={spec.get('s')}"
                f" | elements={len(artifact.get('nodes', []))}")

    def _count(self, db: sqlite3.Connection, where: str = "") -> int:
        clause = f" WHERE {where}" if where else ""
        return db.execute(f"SELECT COUNT(*) FROM artifacts{clause}", {"now": _now()}).fetchone()[0]

    def get(self, spec: Dict[str, Any]) -> Optional[Dict[str, Any]]:
        """Stored artifact for a spec; None when absent or stale."""
        key = self._generate_cache_key(spec)
        try:
            with self._connect() as db:
                row = db.execute(f"SELECT body FROM artifacts WHERE key = :key AND {FRESH}",
                                 {"key": key, "now": _now()}).fetchone()
        except sqlite3.Error as e:
            log.warning(f"⚠️ Artifact lookup failed for {key}: {e}")
            return None
        log.debug(f"{'🎯 hit' if row else '💨 miss'} {key}")
        return json.loads(row["body"]) if row else None

    def set(self, spec: Dict[str, Any], artifact: Dict[str, Any]) -> bool:
        body = json.dumps(artifact, ensure_ascii=False)
        stored = datetime.now()
        record = {
            "key": self._generate_cache_key(spec),
            "family": spec.get("family", "unknown"),
            "label": json.dumps(spec, sort_keys=True),
            "body": body,
            "stored": stored.isoformat(),
            "stale_after": (stored + timedelta(hours=self.cache_ttl_hours)).isoformat(),
            "summary": self._summary(spec, artifact),
            "bytes": len(body),
        }
        try:
            with self._connect() as db:
                db.execute(UPSERT_SQL, record)
        except sqlite3.Error as e:
            log.warning(f"⚠️ Could not store artifact {record['key']}: {e}")
            return False
        log.debug(f"💾 Stored {record['summary']}")
        return True

    def _purge(self, where: str = "") -> int:
        try:
            with self._connect() as db:
                removed = self._count(db, where)
                clause = f" WHERE {where}" if where else ""
                db.execute(f"DELETE FROM artifacts{clause}", {"now": _now()})
        except sqlite3.Error as e:
            log.warning(f"⚠️ Artifact purge failed: {e}")
            return 0
        return removed

    def clear_expired(self) -> int:
        removed = self._purge(STALE)
        if removed:
            log.info(f"🧹 Dropped {removed} stale artifact(s)")
        return removed

    def clear_all(self) -> int:
        removed = self._purge()
        log.info(f"🧹 Emptied the artifact store ({removed} removed)")
        return removed

    def list_entries(self, family: str = None, status: str = "valid",
                     limit: int = 20) -> List[Dict[str, Any]]:
        """Stored artifacts, most recent first.

        Args:
            family: restrict to one family tag
            status: 'valid', 'expired' or 'all'
            limit: row cap
        """
        filters = {"valid": [FRESH], "expired": [STALE]}.get(status, [])
        if family:
            filters.append("family = :family")
        where = " WHERE " + " AND ".join(filters) if filters else ""
        sql = (f"SELECT key, family, summary, bytes, stored, stale_after, {FRESH} AS fresh"
               f" FROM artifacts{where} ORDER BY stored DESC LIMIT :limit")
        try:
            with self._connect() as db:
                rows = db.execute(sql, {"now": _now(), "family": family, "limit": limit}).fetchall()
        except sqlite3.Error as e:
            log.warning(f"⚠️ Artifact listing failed: {e}")
            return []
        return [{
            "cache_key": row["key"],
            "family": row["family"],
            "summary": row["summary"],
            "artifact_size": row["bytes"],
            "created_at": row["stored"],
            "expires_at": row["stale_after"],
            "status": "valid" if row["fresh"] else "expired",
        } for row in rows]

    def get_stats(self) -> Dict[str, Any]:
        try:
            with self._connect() as db:
                total = self._count(db)
                stale = self._count(db, STALE)
                by_family = {row["family"]: row["n"] for row in db.execute(
                    "SELECT family, COUNT(*) AS n FROM artifacts GROUP BY family")}
        except sqlite3.Error as e:
            log.warning(f"⚠️ Artifact statistics unavailable: {e}")
            return {}
        size = self.db_path.stat().st_size if self.db_path.exists() else 0
        return {
            "total_entries": total,
            "valid_entries": total - stale,
            "expired_entries": stale,
            "entries_by_family": by_family,
            "db_size_bytes": size,
            "db_size_mb": round(size / 2 ** 20, 2),
            "cache_ttl_hours": self.cache_ttl_hours,
        }


_cache_instance = None


def get_cache() -> BuildCache:
    global _cache_instance
    _cache_instance = _cache_instance or BuildCache()
    return _cache_instance


def print_cache_stats(cache: BuildCache = None):
    cache = cache or get_cache()
    stats = cache.get_stats()
    if not stats:
        log.warning("⚠️ No statistics for the artifact store")
        return
    log.info(f"📊 Artifact store {cache.db_path}")
    for label, field in (("entries", "total_entries"), ("fresh", "valid_entries"),
                         ("stale", "expired_entries"), ("size (MB)", "db_size_mb"),
                         ("ttl (h)", "cache_ttl_hours")):
        log.info(f"  {label}: {stats[field]}")
    for family, count in sorted(stats["entries_by_family"].items()):
        log.info(f"  {family}: {count}")
