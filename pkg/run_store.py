from __future__ import annotations

import json
import os
import sqlite3
import threading
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional

from settings import RUNS_DB_PATH

_DB_LOCK = threading.RLock()

CMD_LOG_KEEP = 300


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _connect() -> sqlite3.Connection:
    os.makedirs(os.path.dirname(RUNS_DB_PATH) or ".", exist_ok=True)
    conn = sqlite3.connect(RUNS_DB_PATH, timeout=10)
    conn.execute("PRAGMA journal_mode=WAL;")
    conn.execute("PRAGMA synchronous=NORMAL;")
    return conn


def init_run_db() -> None:
    with _DB_LOCK:
        conn = _connect()
        try:
            conn.execute(
                """
                CREATE TABLE IF NOT EXISTS cmd_log (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    ts TEXT NOT NULL,
                    command TEXT NOT NULL DEFAULT '',
                    argv TEXT NOT NULL DEFAULT '',
                    exit_code INTEGER NOT NULL DEFAULT 0
                )
                """
            )
            conn.execute(
                """
                CREATE TABLE IF NOT EXISTS enum_reports (
                    max_n INTEGER PRIMARY KEY,
                    ts TEXT NOT NULL,
                    payload_json TEXT NOT NULL
                )
                """
            )
            conn.commit()
        finally:
            conn.close()


def insert_cmd_log(command: str, argv: List[str], exit_code: int, ts: Optional[str] = None) -> None:
    init_run_db()
    with _DB_LOCK:
        conn = _connect()
        try:
            conn.execute(
                "INSERT INTO cmd_log (ts, command, argv, exit_code) VALUES (?, ?, ?, ?)",
                (str(ts or _now()), str(command or ""), json.dumps(list(argv or []))[:300], int(exit_code)),
            )
            conn.execute(
                f"""
                DELETE FROM cmd_log
                WHERE id NOT IN (SELECT id FROM cmd_log ORDER BY id DESC LIMIT {CMD_LOG_KEEP})
                """
            )
            conn.commit()
        finally:
            conn.close()


def list_cmd_log(limit: int = 50) -> List[Dict[str, Any]]:
    init_run_db()
    lim = max(1, min(CMD_LOG_KEEP, int(limit)))
    with _DB_LOCK:
        conn = _connect()
        try:
            rows = conn.execute(
                "SELECT ts, command, argv, exit_code FROM cmd_log ORDER BY id DESC LIMIT ?",
                (lim,),
            ).fetchall()
            out: List[Dict[str, Any]] = []
            for ts, command, argv, exit_code in rows:
                try:
                    args = json.loads(argv) if argv else []
                except Exception:
                    args = []
                out.append({"ts": ts, "command": command, "argv": args, "exit_code": int(exit_code)})
            return out
        finally:
            conn.close()


def save_enum_report(max_n: int, payload: Dict[str, Any]) -> None:
    init_run_db()
    payload_json = json.dumps(payload, ensure_ascii=False, sort_keys=False)
    with _DB_LOCK:
        conn = _connect()
        try:
            conn.execute(
                """
                INSERT INTO enum_reports (max_n, ts, payload_json)
                VALUES (?, ?, ?)
                ON CONFLICT(max_n) DO UPDATE SET
                  ts=excluded.ts,
                  payload_json=excluded.payload_json
                """,
                (int(max_n), _now(), payload_json),
            )
            conn.commit()
        finally:
            conn.close()


def load_enum_report(max_n: int) -> Optional[Dict[str, Any]]:
    init_run_db()
    with _DB_LOCK:
        conn = _connect()
        try:
            row = conn.execute(
                "SELECT payload_json FROM enum_reports WHERE max_n = ?", (int(max_n),)
            ).fetchone()
            if not row or not row[0]:
                return None
            try:
                data = json.loads(str(row[0]))
                return data if isinstance(data, dict) else None
            except Exception:
                return None
        finally:
            conn.close()
