"""Durable storage for rankings, rosters, panels and access tokens.

Backed by an embedded SQLite database so the whole service runs as a
single binary with one data file. Records are JSON documents keyed by
their natural ids; every write is one transaction, so a crash between
commands never leaves a half-written panel. A connection is opened per
operation, which keeps the store safe to call from any thread.
"""

from __future__ import annotations

import json
import sqlite3
from contextlib import contextmanager
from typing import Iterator

from .delphi import Panel
from .errors import DomainError
from .ranking import RankedList, Scope


class StorageError(DomainError):
    code = "STORAGE_ERROR"


class StorageUnavailable(StorageError):
    code = "STORAGE_UNAVAILABLE"


class CorruptRecord(StorageError):
    code = "CORRUPT_RECORD"


_SCHEMA = """
CREATE TABLE IF NOT EXISTS rankings (
    field_id TEXT NOT NULL,
    scope    TEXT NOT NULL,
    doc      TEXT NOT NULL,
    PRIMARY KEY (field_id, scope)
);
CREATE TABLE IF NOT EXISTS rosters (
    field_id TEXT PRIMARY KEY,
    doc      TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS panels (
    panel_id TEXT PRIMARY KEY,
    doc      TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS tokens (
    token     TEXT PRIMARY KEY,
    panel_id  TEXT NOT NULL,
    expert_id TEXT NOT NULL,
    issued_at TEXT NOT NULL,
    UNIQUE (panel_id, expert_id)
);
"""


class PanelStore:
    """File-backed store; each public method is one atomic transaction."""

    def __init__(self, path: str) -> None:
        self.path = path
        with self._connect() as conn:
            conn.executescript(_SCHEMA)

    @contextmanager
    def _connect(self) -> Iterator[sqlite3.Connection]:
        try:
            conn = sqlite3.connect(self.path, timeout=30.0)
        except sqlite3.Error as exc:
            raise StorageUnavailable(f"cannot open store at {self.path!r}: {exc}") from exc
        try:
            with conn:
                yield conn
        except sqlite3.IntegrityError as exc:
            raise StorageError(f"constraint violated: {exc}") from exc
        except sqlite3.DatabaseError as exc:
            raise CorruptRecord(f"store at {self.path!r} is unreadable: {exc}") from exc
        except sqlite3.Error as exc:
            raise StorageUnavailable(f"store at {self.path!r} failed: {exc}") from exc
        finally:
            conn.close()

    @staticmethod
    def _decode(doc: str, what: str) -> dict:
        try:
            return json.loads(doc)
        except json.JSONDecodeError as exc:
            raise CorruptRecord(f"{what}: invalid stored document: {exc}") from exc

    # -- rankings ----------------------------------------------------------

    def save_ranking(self, ranked: RankedList) -> None:
        doc = json.dumps(ranked.to_dict(), sort_keys=True)
        with self._connect() as conn:
            conn.execute(
                "INSERT OR REPLACE INTO rankings (field_id, scope, doc) VALUES (?, ?, ?)",
                (ranked.field.id, ranked.scope.value, doc),
            )

    def load_ranking(self, field_id: str, scope: Scope) -> RankedList | None:
        with self._connect() as conn:
            row = conn.execute(
                "SELECT doc FROM rankings WHERE field_id = ? AND scope = ?",
                (field_id, scope.value),
            ).fetchone()
        if row is None:
            return None
        return RankedList.from_dict(self._decode(row[0], f"ranking {field_id}/{scope.value}"))

    def list_rankings(self) -> list[tuple[str, Scope]]:
        with self._connect() as conn:
            rows = conn.execute(
                "SELECT field_id, scope FROM rankings ORDER BY field_id, scope"
            ).fetchall()
        return [(field_id, Scope(scope)) for field_id, scope in rows]

    # -- rosters -----------------------------------------------------------

    def save_roster(self, field_id: str, doc: dict) -> None:
        with self._connect() as conn:
            conn.execute(
                "INSERT OR REPLACE INTO rosters (field_id, doc) VALUES (?, ?)",
                (field_id, json.dumps(doc, sort_keys=True)),
            )

    def load_roster(self, field_id: str) -> dict | None:
        with self._connect() as conn:
            row = conn.execute(
                "SELECT doc FROM rosters WHERE field_id = ?", (field_id,)
            ).fetchone()
        return None if row is None else self._decode(row[0], f"roster {field_id}")

    # -- panels ------------------------------------------------------------

    def save_panel(self, panel: Panel) -> None:
        doc = json.dumps(panel.to_dict(), sort_keys=True)
        with self._connect() as conn:
            conn.execute(
                "INSERT OR REPLACE INTO panels (panel_id, doc) VALUES (?, ?)",
                (panel.id, doc),
            )

    def load_panel(self, panel_id: str) -> Panel | None:
        with self._connect() as conn:
            row = conn.execute(
                "SELECT doc FROM panels WHERE panel_id = ?", (panel_id,)
            ).fetchone()
        if row is None:
            return None
        data = self._decode(row[0], f"panel {panel_id}")
        try:
            return Panel.from_dict(data)
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptRecord(f"panel {panel_id}: malformed document: {exc}") from exc

    def list_panels(self) -> list[str]:
        with self._connect() as conn:
            rows = conn.execute("SELECT panel_id FROM panels ORDER BY panel_id").fetchall()
        return [row[0] for row in rows]

    # -- tokens ------------------------------------------------------------

    def save_token(self, token: str, panel_id: str, expert_id: str, issued_at: str) -> None:
        with self._connect() as conn:
            conn.execute(
                "INSERT INTO tokens (token, panel_id, expert_id, issued_at) VALUES (?, ?, ?, ?)",
                (token, panel_id, expert_id, issued_at),
            )

    def resolve_token(self, token: str) -> tuple[str, str] | None:
        with self._connect() as conn:
            row = conn.execute(
                "SELECT panel_id, expert_id FROM tokens WHERE token = ?", (token,)
            ).fetchone()
        return None if row is None else (row[0], row[1])

    def tokens_for_panel(self, panel_id: str) -> dict[str, str]:
        """expert_id -> token for every token issued on the panel."""
        with self._connect() as conn:
            rows = conn.execute(
                "SELECT expert_id, token FROM tokens WHERE panel_id = ? ORDER BY expert_id",
                (panel_id,),
            ).fetchall()
        return {expert_id: token for expert_id, token in rows}
