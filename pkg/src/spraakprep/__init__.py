"""Broadcast speech corpus preparation toolkit.

Turns raw long-form audio plus externally produced transcript and
diarization files into a segmented, quality-controlled corpus for
self-supervised pre-training, and simulates controlled data-quality
degradations (speaker overlap, noise, music) on clean corpora.
"""

__version__ = "0.1.0"
