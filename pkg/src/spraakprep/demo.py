"""Synthetic demo corpus generator.

Builds a small, fully deterministic corpus that exercises every
pipeline stage: ten media files with transcript segments, a catalog
with records that the genre / duration / duplicate rules remove, and
noise + music source pools. Nothing here is real speech; the "voices"
are amplitude-modulated harmonic tones, which is enough for the signal
path (non-silent everywhere, mixable, croppable).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .audio import AudioClip, write_pcm
from .manifest import write_manifest

SAMPLE_RATE = 16000

_WORDS = (
    "de het een en maar want als dan nog wel niet ook zo naar van "
    "vandaag morgen avond programma uitzending gesprek vraag antwoord "
    "muziekstuk verhaal gast studio camera beeld geluid land stad dorp "
    "water lucht kijker luisteraar café reünie geëerd zo'n "
    "ideeën京 boer tuin markt trein fiets regen zon wolk"
).split()

# One word above is deliberately unmappable (CJK) so the demo also
# exercises the unmapped-letter counter.

_SPEAKERS = ("spk_a", "spk_b", "spk_c")

_GENRES_GOOD = ("documentaire", "actualiteitenrubriek", "quiz")
_GENRES_DENY = ("sportverslag", "nachtjournaal")


def _speech_like(rng: np.random.Generator, duration_s: float) -> np.ndarray:
    n = round(duration_s * SAMPLE_RATE)
    t = np.arange(n) / SAMPLE_RATE
    f0 = rng.uniform(90.0, 220.0)
    sig = np.zeros(n)
    for k in (1, 2, 3):
        sig += (rng.uniform(0.2, 0.5) / k) * np.sin(2 * np.pi * f0 * k * t + rng.uniform(0, 6.28))
    syllable = 0.55 + 0.45 * np.sin(2 * np.pi * rng.uniform(2.0, 5.0) * t + rng.uniform(0, 6.28))
    sig = sig * syllable + 0.01 * rng.standard_normal(n)
    return 0.45 * sig / np.max(np.abs(sig))


def _noise_like(rng: np.random.Generator, duration_s: float) -> np.ndarray:
    n = round(duration_s * SAMPLE_RATE)
    return 0.3 * rng.standard_normal(n).clip(-3, 3) / 3.0


def _music_like(rng: np.random.Generator, duration_s: float) -> np.ndarray:
    n = round(duration_s * SAMPLE_RATE)
    t = np.arange(n) / SAMPLE_RATE
    root = rng.uniform(110.0, 196.0)
    sig = np.zeros(n)
    for ratio in (1.0, 1.25, 1.5, 2.0):
        sig += rng.uniform(0.2, 0.4) * np.sin(2 * np.pi * root * ratio * t)
    beat = 0.6 + 0.4 * np.sign(np.sin(2 * np.pi * 2.0 * t))
    sig *= beat
    return 0.4 * sig / np.max(np.abs(sig))


def _sentence(rng: np.random.Generator, n_words: int) -> str:
    words = [_WORDS[int(rng.integers(0, len(_WORDS)))] for _ in range(n_words)]
    return " ".join(words)


def _segments_for(rng: np.random.Generator, media_id: str, duration_s: float) -> list[dict]:
    rows = []
    cursor = 0.5
    while cursor < duration_s - 3.0:
        seg_len = float(rng.uniform(1.5, 8.0))
        end = min(cursor + seg_len, duration_s - 0.2)
        if end - cursor < 0.8:
            break
        roll = rng.random()
        if roll < 0.08:
            text = " Muziek " if rng.random() < 0.5 else "muziek"
        else:
            text = _sentence(rng, int(rng.integers(3, 9)))
            punct_roll = rng.random()
            if punct_roll < 0.45:
                text += "."
            elif punct_roll < 0.52:
                text += "?"
            elif punct_roll < 0.56:
                text += "!"
        rows.append(
            {
                "media_id": media_id,
                "start_s": round(cursor, 3),
                "end_s": round(end, 3),
                "text": text,
                "speaker": _SPEAKERS[int(rng.integers(0, len(_SPEAKERS)))],
            }
        )
        cursor = end + float(rng.uniform(0.0, 0.4))
    return rows


def make_demo_corpus(out_dir, seed: int = 1234) -> dict:
    """Write the demo corpus under out_dir; returns the path map."""
    out = Path(out_dir)
    media_dir = out / "media"
    pool_dir = out / "pools"
    media_dir.mkdir(parents=True, exist_ok=True)
    pool_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)

    media_ids = [f"m{i:02d}" for i in range(10)]
    durations = {}
    seg_rows_asr = []
    seg_rows_diar = []
    for media_id in media_ids:
        duration = float(rng.uniform(35.0, 70.0))
        durations[media_id] = round(duration, 3)
        write_pcm(
            media_dir / f"{media_id}.wav",
            AudioClip(_speech_like(rng, duration), SAMPLE_RATE),
            encoding="pcm16",
        )
        segs = _segments_for(rng, media_id, duration)
        for s in segs:
            seg_rows_asr.append({**s, "speaker": None, "stage": "asr"})
            seg_rows_diar.append({**s, "stage": "diarized"})

    # Catalog: ten keepers plus one denied genre, one over the duration
    # cap, and one adjacent duplicate (same title/summary/date as r07).
    records = []
    for i, media_id in enumerate(media_ids):
        records.append(
            {
                "id": f"r{i:02d}",
                "title": f"Uitzending {i:02d}",
                "summary": f"Aflevering {i:02d} van het demoprogramma",
                "publication_date": f"1994-03-{i + 1:02d}",
                "genre": _GENRES_GOOD[i % len(_GENRES_GOOD)],
                "duration_s": durations[media_id],
                "media_path": f"media/{media_id}.wav",
            }
        )
    records.append(
        {
            "id": "r07b",
            "title": "Uitzending 07",
            "summary": "Aflevering 07 van het demoprogramma",
            "publication_date": "1994-03-08",
            "genre": _GENRES_GOOD[7 % len(_GENRES_GOOD)],
            "duration_s": durations["m07"],
            "media_path": "media/m07.wav",
        }
    )
    records.append(
        {
            "id": "r90",
            "title": "Sportzondag",
            "summary": "Wedstrijdverslagen",
            "publication_date": "1994-04-01",
            "genre": _GENRES_DENY[0],
            "duration_s": durations["m03"],
            "media_path": "media/m03.wav",
        }
    )
    records.append(
        {
            "id": "r91",
            "title": "Verkiezingsmarathon",
            "summary": "Live verslag de hele nacht",
            "publication_date": "1994-04-02",
            "genre": _GENRES_GOOD[0],
            "duration_s": 11700.0,
            "media_path": "media/m05.wav",
        }
    )

    catalog_path = out / "catalog.csv"
    with open(catalog_path, "w", encoding="utf-8") as fh:
        fh.write("id,title,summary,publication_date,genre,duration_s,media_path\n")
        for r in sorted(records, key=lambda r: (r["publication_date"], r["id"])):
            fh.write(
                f'{r["id"]},{r["title"]},{r["summary"]},{r["publication_date"]},'
                f'{r["genre"]},{r["duration_s"]},{r["media_path"]}\n'
            )

    stages_asr = out / "stages_asr.jsonl"
    stages_diar = out / "stages_diarized.jsonl"
    write_manifest(stages_asr, seg_rows_asr)
    write_manifest(stages_diar, seg_rows_diar)

    # Pool paths are relative to pools.jsonl so the corpus can move.
    pool_rows = []
    for i in range(3):
        name = f"noise{i}.wav"
        write_pcm(
            pool_dir / name,
            AudioClip(_noise_like(rng, float(rng.uniform(4.0, 9.0))), SAMPLE_RATE),
            encoding="pcm16",
        )
        pool_rows.append({"id": f"noise{i}", "path": f"pools/{name}", "role": "noise"})
    for i in range(2):
        name = f"music{i}.wav"
        write_pcm(
            pool_dir / name,
            AudioClip(_music_like(rng, float(rng.uniform(6.0, 10.0))), SAMPLE_RATE),
            encoding="pcm16",
        )
        pool_rows.append({"id": f"music{i}", "path": f"pools/{name}", "role": "music"})
    pools_path = out / "pools.jsonl"
    write_manifest(pools_path, pool_rows)

    config = {
        "seed": seed,
        "paths": {
            "catalog": str(catalog_path),
            "stage_manifest": str(stages_asr),
            "pools": str(pools_path),
            "media_dir": str(media_dir),
            "out_dir": str(out / "out"),
        },
        "variant": "w-pp-3s",
        "keywords": ["muziek"],
        "catalog_filter": {
            "allow_genres": [],
            "deny_genres": list(_GENRES_DENY),
            "max_duration_s": 10800,
        },
        "augment": {"mode": "mix-noise", "fraction": 0.10, "snr_range": [0, 15]},
        "batch": {"token_budget": 4800000, "sample_rate": SAMPLE_RATE},
        "schedule": {
            "kind": "triangular",
            "peak_lr": 1e-4,
            "steps_up": 25000,
            "steps_down": 25000,
        },
    }
    config_path = out / "config.json"
    with open(config_path, "w", encoding="utf-8") as fh:
        json.dump(config, fh, indent=2, ensure_ascii=False)
        fh.write("\n")

    return {
        "catalog": catalog_path,
        "stages_asr": stages_asr,
        "stages_diarized": stages_diar,
        "pools": pools_path,
        "media_dir": media_dir,
        "config": config_path,
    }
