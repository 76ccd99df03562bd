"""Cepstral front ends: MFCC and CQCC plus delta utilities."""

from .cqt import CqtGeometry, CqtParams, cqcc, cqt, cqt_geometry, linear_grid
from .framing import (FrameParams, frame_and_window, parseval_weights, power_spectrum,
                      pre_emphasize)
from .matrix import (FeatureMatrix, dct_matrix, delta, flatten_first_frames,
                     stack_with_delta)
from .mfcc import LOG_FLOOR, MelParams, hz_to_mel, mel_filterbank, mel_to_hz, mfcc

__all__ = [
    "CqtGeometry", "CqtParams", "FeatureMatrix", "FrameParams", "LOG_FLOOR", "MelParams",
    "cqcc", "cqt", "cqt_geometry", "dct_matrix", "delta", "extract", "flatten_first_frames",
    "frame_and_window", "hz_to_mel", "linear_grid", "mel_filterbank", "mel_to_hz", "mfcc",
    "parseval_weights", "power_spectrum", "pre_emphasize", "stack_with_delta",
]


def extract(clip, kind, fp=None, mp=None, cp=None):
    """Dispatch to :func:`mfcc` or :func:`cqcc` by name."""
    fp = fp or FrameParams()
    if kind == "mfcc":
        return mfcc(clip, fp, mp or MelParams())
    if kind == "cqcc":
        return cqcc(clip, cp or CqtParams(), fp)
    raise ValueError(f"unknown feature kind {kind!r}")
