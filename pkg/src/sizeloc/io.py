"""Versioned JSON/CSV result files, body series as JSON lines, and config loading.

Every result file carries a meta block with ``schema_version``, ``seed``,
``config_hash`` and the library ``version``. In CSV files the meta block is a
single leading comment line ``# meta {json}``.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

from . import __version__
from .errors import ConfigError, DataError
from .geometry import ConvexBody, body_from_dict, body_to_dict

SCHEMA_VERSION = 1
META_PREFIX = "# meta "


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(canonical_json(cfg).encode()).hexdigest()[:16]


def make_meta(command: str, cfg: dict, seed: int) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "seed": int(seed),
        "config_hash": config_hash(cfg),
        "version": __version__,
    }


def _jsonable(v):
    if v is None or isinstance(v, (bool, str)):
        return v
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if hasattr(v, "tolist"):
        return _jsonable(v.tolist())
    if isinstance(v, int):
        return int(v)
    f = float(v)
    # JSON has no NaN; undefined numbers are written as null
    return f if math.isfinite(f) else None


def write_json(path, payload: dict, meta: dict) -> None:
    doc = {"meta": meta, **_jsonable(payload)}
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n")


def _check_meta(meta, path) -> dict:
    if not isinstance(meta, dict):
        raise DataError(f"{path}: missing meta block")
    for key in ("schema_version", "seed", "config_hash", "version"):
        if key not in meta:
            raise DataError(f"{path}: meta block lacks '{key}'")
    if meta["schema_version"] != SCHEMA_VERSION:
        raise DataError(f"{path}: unsupported schema_version {meta['schema_version']!r}")
    return meta


def read_json(path) -> tuple[dict, dict]:
    """Parse a result file written by ``write_json``; returns (meta, payload)."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    meta = _check_meta(doc.pop("meta", None), path)
    return meta, doc


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, str)):
        return str(v)
    f = float(v)
    return repr(f) if math.isfinite(f) else ""


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence], meta: dict) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(META_PREFIX + canonical_json(meta) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            if len(row) != len(header):
                raise DataError(f"row has {len(row)} cells, header has {len(header)}")
            w.writerow([_cell(v) for v in row])


def _parse_cell(s: str):
    if s == "":
        return None
    if s in ("true", "false"):
        return s == "true"
    for conv in (int, float):
        try:
            return conv(s)
        except ValueError:
            pass
    return s


def read_csv(path) -> tuple[dict, list[str], list[list]]:
    """Parse a result CSV; returns (meta, header, rows) with cells typed back."""
    with open(path, newline="") as fh:
        first = fh.readline()
        if not first.startswith(META_PREFIX):
            raise DataError(f"{path}: missing '# meta' header line")
        try:
            meta = _check_meta(json.loads(first[len(META_PREFIX):]), path)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: malformed meta line: {exc.msg}") from None
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataError(f"{path}: missing column header")
        rows = [[_parse_cell(c) for c in row] for row in reader]
    for i, row in enumerate(rows):
        if len(row) != len(header):
            raise DataError(f"{path}: row {i + 1} has {len(row)} cells, header has {len(header)}")
    return meta, header, rows


def write_bodies_jsonl(path, bodies: Iterable[ConvexBody]) -> None:
    with open(path, "w") as fh:
        for b in bodies:
            fh.write(canonical_json(body_to_dict(b)) + "\n")


def read_bodies_jsonl(path) -> list[ConvexBody]:
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                out.append(body_from_dict(json.loads(line)))
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from None
            except (KeyError, TypeError, ValueError) as exc:
                raise DataError(f"{path}:{lineno}: invalid body: {exc}") from None
    if not out:
        raise DataError(f"{path}: no bodies")
    return out


def load_config(path) -> dict:
    """Read a TOML (``.toml``) or JSON config file into a dict."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    if p.suffix == ".toml":
        try:
            import tomllib
        except ModuleNotFoundError:  # Python < 3.11
            import tomli as tomllib
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a table/object")
    return data
