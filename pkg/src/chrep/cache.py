"""Content-addressed result cache.

Keys are sha256 of (operation name, canonical input serialization,
artifact version); values are canonical JSON documents.  Writes go to a
temporary file and are renamed into place; unreadable entries are evicted
rather than trusted.  A per-key in-process lock gives single-flight
semantics for concurrent readers.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import threading
from pathlib import Path
from typing import Any, Callable

from . import __version__
from .serialize import canon_bytes


class ResultCache:
    def __init__(self, root: str | os.PathLike | None):
        self.root = Path(root) if root is not None else None
        self.hits = 0
        self.misses = 0
        self._locks: dict[str, threading.Lock] = {}
        self._guard = threading.Lock()

    def key(self, op: str, payload: Any) -> str:
        blob = canon_bytes([op, payload, __version__])
        return hashlib.sha256(blob).hexdigest()

    def _path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def _lock_for(self, key: str) -> threading.Lock:
        with self._guard:
            lock = self._locks.get(key)
            if lock is None:
                lock = threading.Lock()
                self._locks[key] = lock
            return lock

    def get_or_compute(self, op: str, payload: Any, compute: Callable[[], Any]) -> Any:
        if self.root is None:
            self.misses += 1
            return compute()
        key = self.key(op, payload)
        path = self._path(key)
        with self._lock_for(key):
            if path.exists():
                try:
                    value = json.loads(path.read_bytes())
                    self.hits += 1
                    return value
                except (ValueError, OSError):
                    try:
                        path.unlink()
                    except OSError:
                        pass
            self.misses += 1
            value = compute()
            blob = canon_bytes(value)
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
            try:
                with os.fdopen(fd, "wb") as fh:
                    fh.write(blob)
                os.replace(tmp, path)
            except OSError:
                try:
                    os.unlink(tmp)
                except OSError:
                    pass
            # round-trip through the canonical form so cached and fresh
            # results are bit-identical documents
            return json.loads(blob)
