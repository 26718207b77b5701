"""Exception hierarchy shared by all pipeline stages.

The CLI maps these onto exit codes: ``UsageError`` -> 1, ``DataError``
(and subclasses) -> 2.
"""


class SpraakprepError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(SpraakprepError):
    """Invalid flags, malformed configuration, unknown names."""


class DataError(SpraakprepError):
    """Input data violates a documented precondition."""


class UnreadableFileError(DataError):
    """File missing or not readable at the OS level."""


class UnsupportedEncodingError(DataError):
    """File parses as WAV but uses an encoding outside the contract."""


class SampleRateMismatchError(DataError):
    """Two clips combined at different sample rates."""


class EmptyAudioError(DataError):
    """Operation requires a non-empty clip."""


class SilentAudioError(DataError):
    """SNR is undefined for all-zero audio."""


class SpanError(DataError):
    """Requested time span falls outside the clip."""


class StageMismatchError(DataError):
    """Segment stage does not match the variant's required stage."""


class UnsortedInputError(DataError):
    """Records or segments violate the required sort order."""


class MissingSpeakerError(DataError):
    """Speaker-based merge requires a speaker label on every segment."""


class EmptyPoolError(DataError):
    """Augmentation mode references an empty source pool."""


class NoEligiblePartnerError(DataError):
    """No pool entry satisfies the mode's partner constraint."""


class OversizeUtteranceError(DataError):
    """A single utterance exceeds the batch token budget."""


class EmptyReferenceError(DataError):
    """WER is undefined for an empty normalized reference."""


class ManifestError(DataError):
    """Malformed manifest file or record."""
