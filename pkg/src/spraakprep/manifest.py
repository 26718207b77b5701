"""Line-delimited manifest files: the toolkit's interchange format.

A manifest is UTF-8 JSON, one object per line. The first line may be a
header object (``{"kind": "header", ...}``) carrying the reproducibility
fields (tool version, seed, hash of the effective parameters); readers
skip it. Serialization is canonical (sorted keys, compact separators) so
identical runs produce byte-identical files.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from filelock import FileLock

from . import __version__
from .errors import ManifestError, UnreadableFileError

HEADER_KIND = "header"


def dump_row(row: dict) -> str:
    return json.dumps(row, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def make_header(seed=None, params_sha256=None, extra=None) -> dict:
    header = {"kind": HEADER_KIND, "tool": "spraakprep", "version": __version__}
    if seed is not None:
        header["seed"] = seed
    if params_sha256 is not None:
        header["params_sha256"] = params_sha256
    if extra:
        header.update(extra)
    return header


def write_manifest(path, rows, header: dict | None = None) -> int:
    """Write rows (plus optional header) atomically; returns row count."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    count = 0
    try:
        with open(tmp, "w", encoding="utf-8") as fh:
            if header is not None:
                fh.write(dump_row(header) + "\n")
            for row in rows:
                fh.write(dump_row(row) + "\n")
                count += 1
        os.replace(tmp, path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise
    return count


def append_rows(path, rows) -> int:
    """Append rows under a sidecar file lock (single-writer appends)."""
    path = Path(path)
    count = 0
    with FileLock(str(path) + ".lock"):
        with open(path, "a", encoding="utf-8") as fh:
            for row in rows:
                fh.write(dump_row(row) + "\n")
                count += 1
    return count


def iter_manifest(path, with_header: bool = False):
    """Yield manifest rows as dicts, skipping the header unless asked."""
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise UnreadableFileError(f"cannot read {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"{path}:{lineno}: invalid JSON ({exc})") from exc
            if not isinstance(row, dict):
                raise ManifestError(f"{path}:{lineno}: expected an object per line")
            if row.get("kind") == HEADER_KIND:
                if with_header:
                    yield row
                continue
            yield row


def read_manifest(path) -> tuple[dict | None, list[dict]]:
    """Return (header or None, data rows)."""
    header = None
    rows = []
    for row in iter_manifest(path, with_header=True):
        if row.get("kind") == HEADER_KIND and header is None:
            header = row
        else:
            rows.append(row)
    return header, rows


def build_index(path, id_field: str) -> dict[str, int]:
    """Map record id -> byte offset of its line. Rebuildable any time."""
    index: dict[str, int] = {}
    with open(path, "rb") as fh:
        offset = fh.tell()
        for raw in fh:
            line = raw.decode("utf-8").strip()
            if line:
                row = json.loads(line)
                if isinstance(row, dict) and row.get("kind") != HEADER_KIND:
                    key = row.get(id_field)
                    if key is not None:
                        index[str(key)] = offset
            offset = fh.tell()
    return index


def write_index(path, index: dict[str, int]) -> Path:
    idx_path = Path(str(path) + ".idx.json")
    tmp = idx_path.with_name(idx_path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(index, fh, sort_keys=True)
    os.replace(tmp, idx_path)
    return idx_path


def load_index(path) -> dict[str, int]:
    with open(str(path) + ".idx.json", "r", encoding="utf-8") as fh:
        return {k: int(v) for k, v in json.load(fh).items()}


def get_row(path, index: dict[str, int], key: str) -> dict:
    """Random access into a manifest via a prebuilt index."""
    try:
        offset = index[key]
    except KeyError:
        raise ManifestError(f"id {key!r} not in index for {path}") from None
    with open(path, "rb") as fh:
        fh.seek(offset)
        return json.loads(fh.readline().decode("utf-8"))
