"""Controlled data-quality degradation of a clean utterance corpus.

Nine modes simulate what sloppy segmentation of broadcast audio leaves
behind: ``1spk-cat`` / ``2spk-cat`` concatenate a partner utterance
(same session / different speaker), ``2spk-mix`` overlays a different
speaker, ``sub-*`` replace the utterance with noise or music, and
``mix-*`` overlay noise, music, or separated vocal / instrumental
stems. Mixing draws the SNR uniformly from [0, 15] dB by default.

Concat modes degrade every utterance in the batch; mix and substitute
modes touch exactly round(fraction * N) utterances, leaving the rest
bit-identical. All randomness flows from one per-batch generator
derived from (seed, batch_index), so batches can be processed in
parallel and whole runs replayed exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .audio import AudioClip, concat, match_length, mix_at_snr_report, read_pcm
from .errors import (
    EmptyPoolError,
    NoEligiblePartnerError,
    SampleRateMismatchError,
    UsageError,
)

MODE_1SPK_CAT = "1spk-cat"
MODE_2SPK_CAT = "2spk-cat"
MODE_2SPK_MIX = "2spk-mix"
MODE_SUB_NOISE = "sub-noise"
MODE_SUB_MUSIC = "sub-music"
MODE_MIX_NOISE = "mix-noise"
MODE_MIX_MUSIC = "mix-music"
MODE_MIX_VOCAL = "mix-vocal"
MODE_MIX_INSTR = "mix-instr"

MODES = (
    MODE_1SPK_CAT,
    MODE_2SPK_CAT,
    MODE_2SPK_MIX,
    MODE_SUB_NOISE,
    MODE_SUB_MUSIC,
    MODE_MIX_NOISE,
    MODE_MIX_MUSIC,
    MODE_MIX_VOCAL,
    MODE_MIX_INSTR,
)

CAT_MODES = (MODE_1SPK_CAT, MODE_2SPK_CAT)
SUB_MODES = (MODE_SUB_NOISE, MODE_SUB_MUSIC)

ROLE_NOISE = "noise"
ROLE_MUSIC = "music"
ROLE_VOCAL = "vocal-stem"
ROLE_INSTR = "instrumental-stem"
ROLE_SPEECH = "speech"
ROLES = (ROLE_NOISE, ROLE_MUSIC, ROLE_VOCAL, ROLE_INSTR, ROLE_SPEECH)

#: Source pool role each mode draws from.
MODE_ROLE = {
    MODE_1SPK_CAT: ROLE_SPEECH,
    MODE_2SPK_CAT: ROLE_SPEECH,
    MODE_2SPK_MIX: ROLE_SPEECH,
    MODE_SUB_NOISE: ROLE_NOISE,
    MODE_SUB_MUSIC: ROLE_MUSIC,
    MODE_MIX_NOISE: ROLE_NOISE,
    MODE_MIX_MUSIC: ROLE_MUSIC,
    MODE_MIX_VOCAL: ROLE_VOCAL,
    MODE_MIX_INSTR: ROLE_INSTR,
}


@dataclass(frozen=True)
class AugmentSpec:
    """One degradation recipe, fully determined by its seed."""

    mode: str
    fraction: float = 0.10
    snr_range: tuple[float, float] = (0.0, 15.0)
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise UsageError(f"unknown augmentation mode {self.mode!r}")
        if not 0.0 < self.fraction <= 1.0:
            raise UsageError(f"fraction must be in (0, 1], got {self.fraction}")
        lo, hi = self.snr_range
        if lo > hi:
            raise UsageError(f"snr_range low {lo} exceeds high {hi}")


@dataclass
class PoolEntry:
    """One interferer source; audio loads lazily from path when needed."""

    id: str
    role: str
    clip: AudioClip | None = None
    path: str | None = None
    speaker: str | None = None
    session: str | None = None

    def load(self) -> AudioClip:
        if self.clip is None:
            if self.path is None:
                raise UsageError(f"pool entry {self.id!r} has neither clip nor path")
            self.clip = read_pcm(self.path)
        return self.clip


@dataclass
class SourcePool:
    role: str
    entries: list[PoolEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass
class BatchItem:
    """An utterance with its audio and the metadata eligibility needs."""

    id: str
    clip: AudioClip
    speaker: str | None = None
    session: str | None = None


def read_pool_file(path) -> dict[str, SourcePool]:
    """Load pool definitions (JSONL: path, role, speaker?, session?, id?).

    Relative entry paths resolve against the pool file's directory so a
    corpus stays relocatable.
    """
    from pathlib import Path

    from .manifest import iter_manifest

    base = Path(path).parent
    pools: dict[str, SourcePool] = {}
    for row in iter_manifest(path):
        role = row.get("role")
        if role not in ROLES:
            raise UsageError(f"pool entry has unknown role {role!r}")
        clip_path = Path(row["path"])
        if not clip_path.is_absolute():
            clip_path = base / clip_path
        entry = PoolEntry(
            id=str(row.get("id", row["path"])),
            role=role,
            path=str(clip_path),
            speaker=row.get("speaker"),
            session=row.get("session"),
        )
        pools.setdefault(role, SourcePool(role)).entries.append(entry)
    return pools


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def select_targets(batch, fraction: float, seed) -> list[int]:
    """Pick exactly round(fraction * N) batch indices, without replacement."""
    n = len(batch)
    if n == 0:
        raise ValueError("batch must be non-empty")
    k = _round_half_up(fraction * n)
    rng = _as_rng(seed)
    chosen = rng.choice(n, size=k, replace=False)
    return sorted(int(i) for i in chosen)


def apply_concat(item: BatchItem, pool: SourcePool, mode: str, rng) -> tuple[AudioClip, str]:
    """Concatenate a partner utterance after the input.

    1spk-cat partners share the session (an utterance with no session
    has no eligible partner); 2spk-cat partners have a different
    speaker. Returns (clip, partner id).
    """
    if mode == MODE_1SPK_CAT:
        eligible = [
            e
            for e in pool.entries
            if item.session is not None and e.session == item.session and e.id != item.id
        ]
    elif mode == MODE_2SPK_CAT:
        eligible = [e for e in pool.entries if e.speaker != item.speaker]
    else:
        raise UsageError(f"apply_concat does not handle mode {mode!r}")
    if not eligible:
        raise NoEligiblePartnerError(f"no partner for {item.id!r} under {mode}")
    partner = eligible[int(rng.integers(0, len(eligible)))]
    return concat(item.clip, partner.load()), partner.id


def apply_mix(item: BatchItem, pool: SourcePool, snr_range, rng):
    """Overlay one pool clip at a uniformly drawn SNR.

    Speech pools exclude same-speaker interferers. Returns
    (clip, interferer id, MixReport).
    """
    if not pool.entries:
        raise EmptyPoolError(f"pool {pool.role!r} is empty")
    if pool.role == ROLE_SPEECH:
        eligible = [e for e in pool.entries if e.speaker != item.speaker]
        if not eligible:
            raise NoEligiblePartnerError(f"no different-speaker interferer for {item.id!r}")
    else:
        eligible = pool.entries
    lo, hi = snr_range
    snr_db = float(rng.uniform(lo, hi))
    interferer = eligible[int(rng.integers(0, len(eligible)))]
    mixed, report = mix_at_snr_report(item.clip, interferer.load(), snr_db, rng)
    return mixed, interferer.id, report


def apply_substitute(item: BatchItem, pool: SourcePool, rng):
    """Replace the utterance with a length-matched pool clip.

    Returns (clip, source id, crop offset in samples).
    """
    if not pool.entries:
        raise EmptyPoolError(f"pool {pool.role!r} is empty")
    source = pool.entries[int(rng.integers(0, len(pool.entries)))]
    clip = source.load()
    if clip.sample_rate != item.clip.sample_rate:
        raise SampleRateMismatchError(
            f"pool clip {source.id!r} at {clip.sample_rate} Hz vs {item.clip.sample_rate} Hz"
        )
    matched, offset = match_length(clip, len(item.clip), rng)
    return matched, source.id, offset


def augment_batch(batch, spec: AugmentSpec, pools, batch_index: int = 0):
    """Degrade one batch per the spec; returns (items, provenance rows).

    ``pools`` maps role -> SourcePool (a bare SourcePool is accepted).
    Untouched items are returned as the same objects, so pass-through is
    bit-exact. One provenance row is emitted per touched utterance.
    """
    if isinstance(pools, SourcePool):
        pools = {pools.role: pools}
    role = MODE_ROLE[spec.mode]
    pool = pools.get(role)
    if pool is None or not pool.entries:
        raise EmptyPoolError(f"mode {spec.mode} requires a non-empty {role!r} pool")

    rng = np.random.default_rng([spec.seed, batch_index])
    if spec.mode in CAT_MODES:
        touched = list(range(len(batch)))
    else:
        touched = select_targets(batch, spec.fraction, rng)
    touched_set = set(touched)

    out_items = []
    log_rows = []
    for i, item in enumerate(batch):
        if i not in touched_set:
            out_items.append(item)
            continue
        row = {"utterance_id": item.id, "mode": spec.mode, "batch_index": batch_index}
        if spec.mode in CAT_MODES:
            clip, partner_id = apply_concat(item, pool, spec.mode, rng)
            row["partner_id"] = partner_id
        elif spec.mode in SUB_MODES:
            clip, source_id, offset = apply_substitute(item, pool, rng)
            row["source_id"] = source_id
            row["source_offset"] = offset
        else:
            clip, source_id, report = apply_mix(item, pool, spec.snr_range, rng)
            row["interferer_id"] = source_id
            row["snr_db"] = report.snr_db
            row["gain"] = report.gain
            row["peak_scale"] = report.peak_scale
            row["noise_offset"] = report.noise_offset
        out_items.append(BatchItem(id=item.id, clip=clip, speaker=item.speaker, session=item.session))
        log_rows.append(row)
    return out_items, log_rows
