"""
Gröbner basis cache.
One JSON file per ideal, keyed by a content hash that includes the engine
version, so bases written by another release are never read back.
"""

import hashlib
import json
import logging
import os
from pathlib import Path
from threading import Lock
from typing import Callable

from pydantic import ValidationError

from config import settings
from models.certificate import CacheEntry, Term

logger = logging.getLogger("nodehilb.services.cache")


class GroebnerCache:
    """Memory-backed, file-persisted store with one lock per key."""

    def __init__(self, directory: Path | None = None, engine_version: str | None = None) -> None:
        self.directory = Path(directory) if directory is not None else Path(settings.cache_dir)
        self.engine_version = engine_version or settings.engine_version
        self._memory: dict[str, CacheEntry] = {}
        self._locks: dict[str, Lock] = {}
        self._master = Lock()
        self.hits = 0
        self.misses = 0

    # ── Keys ────────────────────────────────────────────────
    def content_key(self, order: str, gens: tuple[str, ...], generators: tuple[tuple[Term, ...], ...]) -> str:
        material = json.dumps(
            {
                "engine": self.engine_version,
                "order": order,
                "gens": list(gens),
                "generators": [[[list(m), c] for m, c in poly] for poly in generators],
            },
            separators=(",", ":"),
        )
        return hashlib.sha256(material.encode("utf-8")).hexdigest()

    def _lock_for(self, key: str) -> Lock:
        with self._master:
            return self._locks.setdefault(key, Lock())

    def _path(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    # ── Read / compute ──────────────────────────────────────
    def get_or_compute(
        self,
        order: str,
        gens: tuple[str, ...],
        generators: tuple[tuple[Term, ...], ...],
        compute: Callable[[], tuple[tuple[Term, ...], ...]],
    ) -> CacheEntry:
        key = self.content_key(order, gens, generators)
        with self._lock_for(key):
            entry = self._memory.get(key) or self._load(key)
            if entry is not None:
                self.hits += 1
                logger.debug("Cache hit %s", key[:12])
                self._memory[key] = entry
                return entry

            self.misses += 1
            entry = CacheEntry(
                key=key,
                engine_version=self.engine_version,
                order=order,
                gens=gens,
                generators=generators,
                basis=compute(),
            )
            self._memory[key] = entry
            self._save(entry)
            return entry

    def _load(self, key: str) -> CacheEntry | None:
        path = self._path(key)
        if not path.exists():
            return None
        try:
            entry = CacheEntry.model_validate_json(path.read_text(encoding="utf-8"))
        except (OSError, ValidationError, ValueError):
            logger.warning("Corrupted cache entry %s, ignoring", path)
            return None
        if entry.engine_version != self.engine_version or entry.key != key:
            logger.warning("Stale cache entry %s, ignoring", path)
            return None
        return entry

    # ── Write ───────────────────────────────────────────────
    def _save(self, entry: CacheEntry) -> None:
        path = self._path(entry.key)
        tmp = path.with_name(f"{path.name}.{os.getpid()}.tmp")
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
            with tmp.open("w", encoding="utf-8", newline="\n") as f:
                f.write(entry.model_dump_json())
                f.flush()
                os.fsync(f.fileno())
            os.replace(tmp, path)
            logger.debug("Cached basis %s", entry.key[:12])
        except OSError as exc:
            # a read-only cache only costs time
            logger.warning("Cannot persist cache entry %s: %s", path, exc)
            tmp.unlink(missing_ok=True)

    def clear_memory(self) -> None:
        with self._master:
            self._memory.clear()
