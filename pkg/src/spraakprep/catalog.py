"""Metadata-driven corpus curation and statistics.

Archive catalogs arrive as CSV (documented column order: id, title,
summary, publication_date, genre, duration_s, media_path) or as
line-delimited records. Filtering keeps whitelisted genres (or drops
denied ones), removes broadcasts longer than the duration cap (three
hours by default, boundary kept), and de-duplicates consecutive
broadcasts that repeat title, summary and publication date exactly.
"""

from __future__ import annotations

import csv
import datetime
from dataclasses import dataclass
from pathlib import Path

from .errors import ManifestError, UnreadableFileError, UnsortedInputError, UsageError
from .manifest import iter_manifest

#: "longer than three hours" removal boundary, in seconds.
MAX_BROADCAST_S = 3 * 3600.0

CSV_COLUMNS = ("id", "title", "summary", "publication_date", "genre", "duration_s", "media_path")


@dataclass(frozen=True)
class BroadcastRecord:
    id: str
    title: str
    summary: str
    publication_date: datetime.date
    genre: str
    duration_s: float
    media_path: str | None = None

    def __post_init__(self):
        if self.duration_s <= 0:
            raise ValueError(f"record {self.id!r}: duration must be positive")

    @property
    def sort_key(self):
        return (self.publication_date, self.id)

    def to_row(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "summary": self.summary,
            "publication_date": self.publication_date.isoformat(),
            "genre": self.genre,
            "duration_s": self.duration_s,
            "media_path": self.media_path,
        }


def record_from_row(row: dict) -> BroadcastRecord:
    try:
        return BroadcastRecord(
            id=str(row["id"]),
            title=str(row["title"]),
            summary=str(row["summary"]),
            publication_date=datetime.date.fromisoformat(str(row["publication_date"])),
            genre=str(row["genre"]),
            duration_s=float(row["duration_s"]),
            media_path=row.get("media_path") or None,
        )
    except (KeyError, ValueError) as exc:
        raise ManifestError(f"bad catalog record {row!r}: {exc}") from exc


def read_catalog(path) -> list[BroadcastRecord]:
    """Read a catalog from CSV (by .csv suffix) or line-delimited records."""
    path = Path(path)
    if not path.exists():
        raise UnreadableFileError(f"catalog {path} does not exist")
    if path.suffix.lower() == ".csv":
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            missing = set(CSV_COLUMNS[:-1]) - set(reader.fieldnames or ())
            if missing:
                raise ManifestError(f"catalog CSV misses columns: {sorted(missing)}")
            return [record_from_row(row) for row in reader]
    return [record_from_row(row) for row in iter_manifest(path)]


def filter_genre(records, allow=(), deny=()):
    """Keep allowed genres; with an empty allow list, drop denied ones.

    Genres compare exactly after surrounding-whitespace trimming.
    """
    allow = {g.strip() for g in allow}
    deny = {g.strip() for g in deny}
    overlap = allow & deny
    if overlap:
        raise UsageError(f"genres in both allow and deny: {sorted(overlap)}")
    if allow:
        return [r for r in records if r.genre.strip() in allow]
    return [r for r in records if r.genre.strip() not in deny]


def filter_duration(records, max_s: float = MAX_BROADCAST_S):
    """Drop broadcasts strictly longer than max_s (boundary is kept)."""
    if max_s <= 0:
        raise UsageError("max_s must be positive")
    return [r for r in records if r.duration_s <= max_s]


def dedup_consecutive(records):
    """Collapse adjacent runs sharing (title, summary, publication_date).

    Input must be sorted by (publication_date, id); only the first
    record of each run survives. Title and summary compare exactly
    after trimming.
    """
    records = list(records)
    for prev, cur in zip(records, records[1:]):
        if cur.sort_key < prev.sort_key:
            raise UnsortedInputError(
                f"records {prev.id!r} and {cur.id!r} are not sorted by (date, id)"
            )
    out = []
    prev_key = None
    for r in records:
        key = (r.title.strip(), r.summary.strip(), r.publication_date)
        if key != prev_key:
            out.append(r)
        prev_key = key
    return out


@dataclass(frozen=True)
class CorpusStats:
    utterance_count: int
    total_hours: float
    mean_duration_s: float
    min_duration_s: float
    max_duration_s: float
    hours_by_genre: dict
    empty: bool

    def to_dict(self) -> dict:
        return {
            "utterance_count": self.utterance_count,
            "total_hours": self.total_hours,
            "mean_duration_s": self.mean_duration_s,
            "min_duration_s": self.min_duration_s,
            "max_duration_s": self.max_duration_s,
            "hours_by_genre": dict(sorted(self.hours_by_genre.items())),
            "empty": self.empty,
        }


def _duration_of(item) -> float:
    if isinstance(item, dict):
        return float(item["duration_s"])
    return float(item.duration_s)


def _genre_of(item):
    if isinstance(item, dict):
        return item.get("genre")
    return getattr(item, "genre", None)


def compute_stats(items) -> CorpusStats:
    """Aggregate durations (and genres where present) of any item list."""
    durations = []
    by_genre: dict[str, float] = {}
    for item in items:
        d = _duration_of(item)
        durations.append(d)
        genre = _genre_of(item)
        if genre is not None:
            by_genre[genre] = by_genre.get(genre, 0.0) + d / 3600.0
    if not durations:
        return CorpusStats(0, 0.0, 0.0, 0.0, 0.0, {}, empty=True)
    total_s = sum(durations)
    return CorpusStats(
        utterance_count=len(durations),
        total_hours=total_s / 3600.0,
        mean_duration_s=total_s / len(durations),
        min_duration_s=min(durations),
        max_duration_s=max(durations),
        hours_by_genre=by_genre,
        empty=False,
    )


def retained_fraction(before: CorpusStats, after: CorpusStats) -> float:
    """Hours surviving a pipeline step, as a fraction of the input."""
    if before.total_hours == 0.0:
        raise ValueError("retained fraction undefined for an empty input corpus")
    return after.total_hours / before.total_hours
