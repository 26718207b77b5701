"""Independent brute-force reference for the segmentation recipes.

Deliberately written from scratch against the documented rules, in a
different style from the library (recursive descent over plain dicts),
so the two can cross-check each other. Keep this file free of imports
from spraakprep.segment.
"""

SENTENCE_MARKS = (".", "!", "?")
MAX_LEN = 30.0

ORACLE_VARIANTS = {
    # name: (merge, min_len)  merge in {None, "punct", "speaker"}
    "w-raw": (None, None),
    "w-pp-1s": ("punct", 1.0),
    "w-pp-3s": ("punct", 3.0),
    "wx-asr": (None, None),
    "wx-align": (None, None),
    "wx-diar": (None, None),
    "wx-diar-1s": ("speaker", 1.0),
    "wx-diar-3s": ("speaker", 3.0),
}


def _drop_keywords(segs, keywords):
    folded = {k.strip().casefold() for k in keywords}
    return [s for s in segs if s["text"].strip().casefold() not in folded]


def _combine(group):
    speakers = {g["speaker"] for g in group}
    return {
        "media_id": group[0]["media_id"],
        "start_s": group[0]["start_s"],
        "end_s": group[-1]["end_s"],
        "text": " ".join(g["text"] for g in group),
        "speaker": next(iter(speakers)) if len(speakers) == 1 else None,
    }


def _grow_punct(group, rest):
    joined = " ".join(g["text"] for g in group)
    if joined.rstrip().endswith(SENTENCE_MARKS):
        return group, rest
    if not rest or rest[0]["end_s"] - group[0]["start_s"] > MAX_LEN:
        return group, rest
    return _grow_punct(group + [rest[0]], rest[1:])


def merge_punct_recursive(segs):
    if not segs:
        return []
    group, rest = _grow_punct([segs[0]], segs[1:])
    return [_combine(group)] + merge_punct_recursive(rest)


def _grow_speaker(group, rest):
    if not rest:
        return group, rest
    nxt = rest[0]
    if nxt["speaker"] != group[0]["speaker"]:
        return group, rest
    if nxt["end_s"] - group[0]["start_s"] > MAX_LEN:
        return group, rest
    return _grow_speaker(group + [nxt], rest[1:])


def merge_speaker_recursive(segs):
    if not segs:
        return []
    group, rest = _grow_speaker([segs[0]], segs[1:])
    return [_combine(group)] + merge_speaker_recursive(rest)


def run_variant_oracle(name, segs, keywords=("muziek",)):
    """Apply one recipe to segment dicts; returns utterance dicts."""
    merge, min_len = ORACLE_VARIANTS[name]
    work = list(segs)
    if merge is not None:
        work = _drop_keywords(work, keywords)
        if merge == "punct":
            work = merge_punct_recursive(work)
        else:
            work = merge_speaker_recursive(work)
    else:
        work = [_combine([s]) for s in work]
    if min_len is not None:
        work = [s for s in work if s["end_s"] - s["start_s"] >= min_len]
    return [s for s in work if s["end_s"] - s["start_s"] <= MAX_LEN]


_WORD_POOL = (
    "hallo wereld goed zo ja nee daar hier dus toch echt wel even nog "
    "vraag antwoord verhaal misschien"
).split()


def random_segment_dicts(rng, max_segments=12):
    """Random sorted, non-overlapping segment dicts for one media file.

    Durations deliberately range past 30 s to exercise the length cap,
    and texts mix keywords, punctuation, trailing spaces and empties.
    """
    n = int(rng.integers(1, max_segments + 1))
    rows = []
    t = float(rng.uniform(0.0, 5.0))
    for _ in range(n):
        dur = float(rng.uniform(0.3, 34.0))
        roll = rng.random()
        if roll < 0.08:
            text = "muziek" if rng.random() < 0.5 else " Muziek "
        elif roll < 0.12:
            text = ""
        else:
            words = [_WORD_POOL[int(rng.integers(0, len(_WORD_POOL)))] for _ in range(int(rng.integers(1, 5)))]
            text = " ".join(words)
            p = rng.random()
            if p < 0.40:
                text += "." if p < 0.25 else ("!" if p < 0.33 else "?")
            if rng.random() < 0.10:
                text += " "
        rows.append(
            {
                "media_id": "m",
                "start_s": t,
                "end_s": t + dur,
                "text": text,
                "speaker": ("A", "B", "C")[int(rng.integers(0, 3))],
            }
        )
        t = t + dur + float(rng.uniform(0.0, 2.0))
    return rows
