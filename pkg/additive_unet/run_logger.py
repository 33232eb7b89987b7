"""
Run logger for training and evaluation sessions.

Writes one JSON object per line: a ``session_start`` record holding the
command and configuration snapshot, step/evaluation records, and a
``session_end`` record. Timestamps are informational only; nothing reads
them back into results.
"""

from __future__ import annotations

import datetime
import hashlib
import json
import os
from typing import Any


def config_digest(config: dict[str, Any]) -> str:
    """Stable short hash of a JSON-serializable configuration."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:16]


class RunLogger:
    """
    JSONL event log for one output directory.

    The session id is the digest of the configuration, so rerunning a
    configuration appends to the same file instead of scattering sessions.
    """

    DEFAULT_FILE = "events.jsonl"

    def __init__(self, log_dir: str, file_name: str | None = None, enabled: bool = True):
        self.log_dir = log_dir
        self.enabled = enabled
        self.log_file = os.path.join(log_dir, file_name or self.DEFAULT_FILE)
        self.session_id: str | None = None
        if enabled:
            os.makedirs(log_dir, exist_ok=True)

    def start_session(self, command: str, config: dict[str, Any], extra_info: dict | None = None) -> str:
        self.session_id = config_digest({"command": command, "config": config})
        self._write(
            {
                "log_type": "session_start",
                "command": command,
                "config": config,
                "extra_info": extra_info or {},
            }
        )
        return self.session_id

    def log_event(self, log_type: str, **fields: Any) -> None:
        if not self.session_id:
            return
        self._write({"log_type": log_type, **fields})

    def end_session(self, final_message: str = "", **fields: Any) -> None:
        if not self.session_id:
            return
        self._write({"log_type": "session_end", "message": final_message, **fields})
        self.session_id = None

    def _write(self, message: dict[str, Any]) -> None:
        if not self.enabled:
            return
        entry = {
            "session_id": self.session_id,
            "timestamp": datetime.datetime.now().strftime("%Y-%m-%d %H:%M:%S"),
            "message": message,
        }
        try:
            with open(self.log_file, "a", encoding="utf-8") as f:
                f.write(json.dumps(entry, ensure_ascii=False) + "\n")
        except OSError as e:
            print(f"[RunLogger] could not write {self.log_file}: {e}")

    @staticmethod
    def read_events(log_file: str) -> list[dict[str, Any]]:
        if not os.path.exists(log_file):
            return []
        with open(log_file, "r", encoding="utf-8") as f:
            return [json.loads(line) for line in f if line.strip()]
