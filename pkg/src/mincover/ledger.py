"""Append-only JSON-lines store of search records, deduplicated by instance hash."""
from __future__ import annotations

import json
import threading
from pathlib import Path
from typing import Iterator

from .constructions import SearchRecord

LEDGER_FORMAT = "mincover-search-ledger"
LEDGER_VERSION = 1


class LedgerError(RuntimeError):
    pass


class SearchLedger:
    """A ledger file; the first line is a header, every later line one record.

    Appends are serialized by a lock, so concurrent evaluators can share
    one instance. A record whose instance hash is already present is
    skipped and :meth:`append` returns False.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._seen: set[str] = set()
        if self.path.exists() and self.path.stat().st_size:
            for rec in self.records():
                self._seen.add(rec.instance_hash)
        else:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            header = {"format": LEDGER_FORMAT, "version": LEDGER_VERSION}
            self.path.write_text(json.dumps(header, sort_keys=True) + "\n", encoding="utf-8")

    def __contains__(self, instance_hash: str) -> bool:
        return instance_hash in self._seen

    def __len__(self) -> int:
        return len(self._seen)

    def append(self, rec: SearchRecord) -> bool:
        with self._lock:
            if rec.instance_hash in self._seen:
                return False
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(rec.to_json() + "\n")
            self._seen.add(rec.instance_hash)
            return True

    def records(self) -> Iterator[SearchRecord]:
        with self.path.open(encoding="utf-8") as fh:
            lines = iter(fh)
            first = next(lines, None)
            if first is None:
                return
            try:
                header = json.loads(first)
            except ValueError:
                header = None
            if not isinstance(header, dict) or header.get("format") != LEDGER_FORMAT:
                raise LedgerError(f"{self.path}: not a search ledger")
            if header.get("version") != LEDGER_VERSION:
                raise LedgerError(f"{self.path}: unsupported ledger version {header.get('version')}")
            for lineno, line in enumerate(lines, 2):
                if not line.strip():
                    continue
                try:
                    yield SearchRecord.from_dict(json.loads(line))
                except (ValueError, TypeError, KeyError) as exc:
                    raise LedgerError(f"{self.path}:{lineno}: bad record ({exc})") from None
