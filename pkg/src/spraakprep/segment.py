"""Transcript post-processing variants.

Converts the timed segments emitted by external ASR / alignment /
diarization stages into corpus utterances. Nine named recipes exist:

=============  ========  ===========  ======  ==========================
variant        stage     merge mode   min s   steps
=============  ========  ===========  ======  ==========================
w-raw          asr       none         -       pass through, 30 s cap
w-pp-1s        asr       punctuation  1       keywords, merge, min, cap
w-pp-3s        asr       punctuation  3       keywords, merge, min, cap
wx-asr         asr       none         -       pass through, 30 s cap
wx-align       aligned   none         -       pass through, 30 s cap
wx-diar        diarized  none         -       pass through, 30 s cap
wx-diar-1s     diarized  speaker      1       keywords, merge, min, cap
wx-diar-3s     diarized  speaker      3       keywords, merge, min, cap
sequential     -         none         -       fixed 30 s windows
=============  ========  ===========  ======  ==========================

Merging joins texts with a single space and spans from the first start
to the last end, inter-segment gaps included (stage timestamps are
approximate; cutting gaps out would re-cut audio mid-word). A group is
force-closed when taking the next segment would stretch it past 30 s.
Segments still longer than 30 s afterwards are dropped, which is what
keeps every emitted utterance inside the 3..30 s corpus envelope.
"""

from __future__ import annotations

from dataclasses import dataclass

from .audio import AudioClip, crop
from .errors import MissingSpeakerError, StageMismatchError, UnsortedInputError, UsageError

STAGE_ASR = "asr"
STAGE_ALIGNED = "aligned"
STAGE_DIARIZED = "diarized"
STAGES = (STAGE_ASR, STAGE_ALIGNED, STAGE_DIARIZED)

MAX_UTTERANCE_S = 30.0

#: Sentence-final marks that close a punctuation merge group. Commas
#: deliberately do not.
SENTENCE_PUNCTUATION = (".", "!", "?")

#: Default hallucination keyword list; a config input in the pipeline.
DEFAULT_KEYWORDS = frozenset({"muziek"})


@dataclass(frozen=True)
class TranscriptSegment:
    """One timed text span from an external transcription stage."""

    media_id: str
    start_s: float
    end_s: float
    text: str
    speaker: str | None = None
    stage: str = STAGE_ASR

    def __post_init__(self):
        if not self.start_s < self.end_s:
            raise ValueError(f"segment span [{self.start_s}, {self.end_s}] is empty or reversed")
        if self.stage not in STAGES:
            raise ValueError(f"unknown stage {self.stage!r}")

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s


@dataclass(frozen=True)
class Utterance:
    """Final corpus unit: a media span with (to-be-normalized) text."""

    media_id: str
    start_s: float
    end_s: float
    text: str
    speaker: str | None = None

    def __post_init__(self):
        if not self.start_s < self.end_s:
            raise ValueError(f"utterance span [{self.start_s}, {self.end_s}] is empty or reversed")

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s


@dataclass(frozen=True)
class SegmentationVariant:
    name: str
    min_len_s: float | None
    merge_mode: str  # none | punctuation | speaker
    stage: str | None  # required input stage; None = ignores transcripts
    max_len_s: float = MAX_UTTERANCE_S


VARIANTS: dict[str, SegmentationVariant] = {
    v.name: v
    for v in (
        SegmentationVariant("w-raw", None, "none", STAGE_ASR),
        SegmentationVariant("w-pp-1s", 1.0, "punctuation", STAGE_ASR),
        SegmentationVariant("w-pp-3s", 3.0, "punctuation", STAGE_ASR),
        SegmentationVariant("wx-asr", None, "none", STAGE_ASR),
        SegmentationVariant("wx-align", None, "none", STAGE_ALIGNED),
        SegmentationVariant("wx-diar", None, "none", STAGE_DIARIZED),
        SegmentationVariant("wx-diar-1s", 1.0, "speaker", STAGE_DIARIZED),
        SegmentationVariant("wx-diar-3s", 3.0, "speaker", STAGE_DIARIZED),
        SegmentationVariant("sequential", None, "none", None),
    )
}


def _check_sorted(segments) -> None:
    for prev, cur in zip(segments, segments[1:]):
        if cur.media_id != prev.media_id:
            raise UnsortedInputError("merge input must come from a single media file")
        if cur.start_s < prev.start_s:
            raise UnsortedInputError(
                f"segments out of order at {cur.start_s} s after {prev.start_s} s"
            )


def _ends_with_punctuation(text: str) -> bool:
    return text.rstrip().endswith(SENTENCE_PUNCTUATION)


def _merged(group: list[TranscriptSegment]) -> TranscriptSegment:
    speakers = {s.speaker for s in group}
    return TranscriptSegment(
        media_id=group[0].media_id,
        start_s=group[0].start_s,
        end_s=group[-1].end_s,
        text=" ".join(s.text for s in group),
        speaker=speakers.pop() if len(speakers) == 1 else None,
        stage=group[0].stage,
    )


def keyword_filter(segments, keywords=DEFAULT_KEYWORDS):
    """Drop segments whose trimmed, casefolded text equals a keyword.

    Whisper capitalizes its hallucinated markers inconsistently, so the
    comparison folds case and trims surrounding whitespace first.
    """
    folded = {k.strip().casefold() for k in keywords}
    return [s for s in segments if s.text.strip().casefold() not in folded]


def merge_until_punctuation(segments, max_len_s: float = MAX_UTTERANCE_S):
    """Merge consecutive segments until the text ends a sentence.

    A group keeps absorbing the next segment while its accumulated text
    lacks a sentence-final mark and the extended span would stay within
    ``max_len_s``. The trailing group is emitted even without
    punctuation.
    """
    segments = list(segments)
    _check_sorted(segments)
    out = []
    i = 0
    n = len(segments)
    while i < n:
        group = [segments[i]]
        text = segments[i].text
        j = i + 1
        while (
            not _ends_with_punctuation(text)
            and j < n
            and segments[j].end_s - group[0].start_s <= max_len_s
        ):
            group.append(segments[j])
            text = text + " " + segments[j].text
            j += 1
        out.append(_merged(group))
        i = j
    return out


def merge_on_speaker(segments, max_len_s: float = MAX_UTTERANCE_S):
    """Merge consecutive same-speaker segments, capped at ``max_len_s``."""
    segments = list(segments)
    _check_sorted(segments)
    for s in segments:
        if s.speaker is None:
            raise MissingSpeakerError(f"segment at {s.start_s} s has no speaker label")
    out = []
    i = 0
    n = len(segments)
    while i < n:
        group = [segments[i]]
        j = i + 1
        while (
            j < n
            and segments[j].speaker == group[0].speaker
            and segments[j].end_s - group[0].start_s <= max_len_s
        ):
            group.append(segments[j])
            j += 1
        out.append(_merged(group))
        i = j
    return out


def min_length_filter(segments, min_s: float):
    """Keep segments of duration >= min_s (inclusive boundary)."""
    if min_s <= 0:
        raise ValueError("min_s must be positive")
    return [s for s in segments if s.duration_s >= min_s]


def max_length_filter(segments, max_s: float = MAX_UTTERANCE_S):
    """Drop segments longer than max_s; the corpus envelope cap."""
    return [s for s in segments if s.duration_s <= max_s]


def sequential_windows(media_id: str, media_duration_s: float, window_s: float = MAX_UTTERANCE_S):
    """Fixed non-overlapping windows; the final short window is kept."""
    out = []
    start = 0.0
    while start < media_duration_s:
        end = min(start + window_s, media_duration_s)
        out.append(Utterance(media_id=media_id, start_s=start, end_s=end, text=""))
        start = end
    return out


def run_variant(
    variant,
    segments,
    *,
    keywords=DEFAULT_KEYWORDS,
    media_duration_s: float | None = None,
    media_id: str | None = None,
):
    """Apply one segmentation recipe and return utterances.

    ``variant`` is a name or a SegmentationVariant. Input may span
    several media files; each is processed independently, in order of
    first appearance. ``sequential`` ignores the segments and needs
    ``media_duration_s`` (and ``media_id`` unless segments provide one).
    """
    if isinstance(variant, str):
        try:
            variant = VARIANTS[variant]
        except KeyError:
            raise UsageError(f"unknown segmentation variant {variant!r}") from None

    if variant.stage is None:
        if media_duration_s is None:
            raise UsageError("sequential variant requires media_duration_s")
        if media_id is None:
            if not segments:
                raise UsageError("sequential variant requires media_id when no segments given")
            media_id = segments[0].media_id
        return sequential_windows(media_id, media_duration_s, variant.max_len_s)

    by_media: dict[str, list[TranscriptSegment]] = {}
    for seg in segments:
        if seg.stage != variant.stage:
            raise StageMismatchError(
                f"variant {variant.name} needs stage {variant.stage!r}, got {seg.stage!r}"
            )
        by_media.setdefault(seg.media_id, []).append(seg)

    utterances = []
    for media_segments in by_media.values():
        worked = media_segments
        if variant.merge_mode != "none":
            worked = keyword_filter(worked, keywords)
        if variant.merge_mode == "punctuation":
            worked = merge_until_punctuation(worked, variant.max_len_s)
        elif variant.merge_mode == "speaker":
            worked = merge_on_speaker(worked, variant.max_len_s)
        if variant.min_len_s is not None:
            worked = min_length_filter(worked, variant.min_len_s)
        worked = max_length_filter(worked, variant.max_len_s)
        utterances.extend(
            Utterance(
                media_id=s.media_id,
                start_s=s.start_s,
                end_s=s.end_s,
                text=s.text,
                speaker=s.speaker,
            )
            for s in worked
        )
    return utterances


def extract_utterance_audio(media: AudioClip, utterances) -> list[AudioClip]:
    """Crop one clip per utterance from the source media."""
    return [crop(media, u.start_s, u.end_s) for u in utterances]
