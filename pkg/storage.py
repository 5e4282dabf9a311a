# storage.py
from __future__ import annotations
import copy
import json
import os
import threading
from contextlib import contextmanager
from typing import Any, Dict, List, Optional, Tuple

from pog import DocumentError, PartiallyOrientedGraph, PogError, make_pog
from settings import CONFIG_PATH

_FILE_WRITE_LOCK = threading.RLock()

try:
    import fcntl  # type: ignore
except Exception:  # pragma: no cover
    fcntl = None  # type: ignore

DEFAULT_CONFIG: Dict[str, Any] = {
    "oracle": {"edge_cap": 25},
    "enumerate": {"max_n": 5, "long_max_n": 6, "threads": 1},
    "obstruction": {"workers": 1},
    "logging": {"max_bytes": 5 * 1024 * 1024, "backup_count": 5},
}


@contextmanager
def _interprocess_lock(lock_name: str):
    """
    Best-effort cross-process lock (Linux flock). Falls back to process-local only.
    """
    lock_path = f"{lock_name}.lock"
    fh = None
    try:
        try:
            fh = open(lock_path, "a+", encoding="utf-8")
        except OSError:
            fh = None
        if fh is not None and fcntl is not None:
            fcntl.flock(fh.fileno(), fcntl.LOCK_EX)
        yield
    finally:
        try:
            if fh is not None and fcntl is not None:
                fcntl.flock(fh.fileno(), fcntl.LOCK_UN)
        except Exception:
            pass
        try:
            if fh is not None:
                fh.close()
        except Exception:
            pass

def load_json(path: str, fallback: Any) -> Any:
    # Readers never create lock files; writers replace the file atomically.
    with _FILE_WRITE_LOCK:
        if not os.path.exists(path):
            return fallback
        try:
            with open(path, "r", encoding="utf-8") as f:
                return json.load(f)
        except Exception:
            # Try backup if primary is malformed/corrupt.
            bak = f"{path}.bak"
            if os.path.exists(bak):
                try:
                    with open(bak, "r", encoding="utf-8") as f:
                        return json.load(f)
                except Exception:
                    pass
            return fallback

def save_json_atomic(path: str, data: Any) -> None:
    with _FILE_WRITE_LOCK, _interprocess_lock(path):
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        tmp = f"{path}.tmp"
        with open(tmp, "w", encoding="utf-8") as f:
            json.dump(data, f, indent=2, ensure_ascii=False)
            f.write("\n")
        os.replace(tmp, path)

def save_text_atomic(path: str, text: str) -> None:
    with _FILE_WRITE_LOCK, _interprocess_lock(path):
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        tmp = f"{path}.tmp"
        with open(tmp, "w", encoding="utf-8") as f:
            f.write(text)
        os.replace(tmp, path)

def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    out = copy.deepcopy(base)
    for key, value in (override or {}).items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out

def load_config(path: Optional[str] = None) -> Dict[str, Any]:
    raw = load_json(path or CONFIG_PATH, fallback={})
    if not isinstance(raw, dict):
        raw = {}
    return _merge(DEFAULT_CONFIG, raw)


# ----------------------------
# PogDocument (JSON graph files)
# ----------------------------
def pog_to_document(H: PartiallyOrientedGraph, name: Optional[str] = None) -> Dict[str, Any]:
    # Key order n / edges / arcs / name is part of the file format.
    doc: Dict[str, Any] = {
        "n": H.n,
        "edges": [[u, v] for u, v in sorted(H.edges)],
        "arcs": [[u, v] for u, v in sorted(H.arcs)],
    }
    if name is not None:
        doc["name"] = name
    return doc

def dumps_document(H: PartiallyOrientedGraph, name: Optional[str] = None) -> str:
    return json.dumps(pog_to_document(H, name), indent=2, ensure_ascii=False) + "\n"

def _quoted(key: str) -> str:
    return f'"{key}"'

def _line_of(text: str, needle: str) -> int:
    idx = text.find(needle)
    if idx < 0:
        return 1
    return text.count("\n", 0, idx) + 1

def parse_document(text: str) -> Tuple[PartiallyOrientedGraph, Optional[str]]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(f"line {e.lineno}, column {e.colno}: {e.msg}")

    if not isinstance(doc, dict):
        raise DocumentError("line 1: document must be a JSON object")
    for key in ("n", "edges", "arcs"):
        if key not in doc:
            raise DocumentError(f"line 1: missing field {key!r}")

    n = doc["n"]
    lists: Dict[str, List] = {}
    for key in ("edges", "arcs"):
        items = doc[key]
        if not isinstance(items, list):
            raise DocumentError(f"line {_line_of(text, _quoted(key))}: {key!r} must be a list")
        for i, item in enumerate(items):
            if not isinstance(item, list) or len(item) != 2:
                raise DocumentError(
                    f"line {_line_of(text, _quoted(key))}: {key}[{i}] must be a 2-element list"
                )
        lists[key] = items

    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        raise DocumentError(f"line {_line_of(text, _quoted('name'))}: 'name' must be a string")

    try:
        H = make_pog(n, lists["edges"], lists["arcs"])
    except PogError as e:
        msg = str(e)
        field = "edges" if msg.startswith("edge") else "n" if msg.startswith("vertex count") else "arcs"
        raise DocumentError(f"line {_line_of(text, _quoted(field))}: {msg}")
    return H, name

def load_document(path: str) -> Tuple[PartiallyOrientedGraph, Optional[str]]:
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise DocumentError(f"cannot read {path}: {e}")
    return parse_document(text)

def save_document(path: str, H: PartiallyOrientedGraph, name: Optional[str] = None) -> None:
    save_text_atomic(path, dumps_document(H, name))
