# Result Storage - Wiener Lab
# Atomic CSV/JSON writers; repeated runs with the same inputs produce identical bytes

import hashlib
import json
import logging
import os
import tempfile
from typing import Any, Dict, Iterable, List, Optional, Sequence

from wiener_lab.constants import CSV_SIGNIFICANT_DIGITS

logger = logging.getLogger(__name__)


def format_value(value: Any) -> str:
    """12 significant digits for floats, plain text otherwise."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return format(value, f".{CSV_SIGNIFICANT_DIGITS}g")
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    lines = [",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row has {len(row)} fields, header has {len(header)}")
        lines.append(",".join(format_value(v) for v in row))
    return "\n".join(lines) + "\n"


def canonical_json(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False, default=str)


def content_hash(payload: Dict[str, Any]) -> str:
    """Git-style blob hash of the canonical JSON encoding."""
    data = canonical_json(payload).encode("utf-8")
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def atomic_write(path: str, text: str) -> None:
    """Write to a temporary file in the destination directory, fsync, then rename over path."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp_path, path)
    except Exception:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


class ResultStore:
    """Writes a CSV table and its JSON metadata sidecar (<out>.json)."""

    def __init__(self, out_path: str):
        self.out_path = out_path

    @property
    def metadata_path(self) -> str:
        return f"{self.out_path}.json"

    def save(self, header: Sequence[str], rows: Iterable[Sequence[Any]],
             config: Dict[str, Any], command: Optional[str] = None) -> str:
        text = render_csv(header, list(rows))
        metadata = {
            "command": command or config.get("command"),
            "config": config,
            "content_hash": content_hash(config),
            "columns": list(header),
        }
        atomic_write(self.out_path, text)
        atomic_write(self.metadata_path, json.dumps(metadata, sort_keys=True, indent=2, default=str) + "\n")
        logger.info(f"💾 Saved {text.count(chr(10)) - 1} rows to {self.out_path}")
        return text

    def load_rows(self) -> List[Dict[str, str]]:
        with open(self.out_path, encoding="utf-8") as f:
            lines = f.read().splitlines()
        if not lines:
            return []
        header = lines[0].split(",")
        return [dict(zip(header, line.split(","))) for line in lines[1:]]


__all__ = ["format_value", "render_csv", "canonical_json", "content_hash", "atomic_write", "ResultStore"]
