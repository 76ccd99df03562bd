"""Framing, windowing and short-time power spectra."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ClipTooShort, InvalidParams

WINDOWS = {"hamming": np.hamming, "hann": np.hanning}


@dataclass(frozen=True)
class FrameParams:
    win_len: float = 0.025
    hop: float = 0.010
    window: str = "hamming"
    pre_emphasis: float = 0.97

    def __post_init__(self):
        if not 0 < self.hop <= self.win_len:
            raise InvalidParams(f"need 0 < hop <= win_len, got hop={self.hop} win_len={self.win_len}")
        if self.window not in WINDOWS:
            raise InvalidParams(f"unknown window {self.window!r}")
        if not 0 <= self.pre_emphasis < 1:
            raise InvalidParams("pre_emphasis must lie in [0, 1)")

    def win_samples(self, sample_rate):
        n = int(round(self.win_len * sample_rate))
        if n < 2:
            raise InvalidParams(f"window of {self.win_len}s is under two samples at {sample_rate} Hz")
        return n

    def hop_samples(self, sample_rate):
        return max(1, int(round(self.hop * sample_rate)))

    def n_frames(self, n_samples, sample_rate):
        win = self.win_samples(sample_rate)
        if n_samples < win:
            raise ClipTooShort(f"{n_samples} samples is shorter than one {win}-sample window")
        return 1 + (n_samples - win) // self.hop_samples(sample_rate)

    def frame_centers(self, n_samples, sample_rate):
        """Centre of every analysis frame, in samples."""
        win = self.win_samples(sample_rate)
        hop = self.hop_samples(sample_rate)
        return np.arange(self.n_frames(n_samples, sample_rate)) * hop + (win - 1) / 2.0


def frame_signal(x, win, hop):
    """Stack overlapping frames of ``x`` as rows (a copy, not a view)."""
    x = np.asarray(x, dtype=np.float64)
    if x.size < win:
        raise ClipTooShort(f"{x.size} samples is shorter than one {win}-sample window")
    n = 1 + (x.size - win) // hop
    idx = np.arange(win)[None, :] + hop * np.arange(n)[:, None]
    return x[idx]


def frame_and_window(clip, params=FrameParams(), signal=None):
    """Cut ``clip`` into frames and multiply each by the analysis window.

    ``signal`` overrides the clip's samples (e.g. after pre-emphasis) while
    keeping its sample rate.
    """
    x = clip.samples if signal is None else signal
    win = params.win_samples(clip.sample_rate)
    frames = frame_signal(x, win, params.hop_samples(clip.sample_rate))
    return frames * WINDOWS[params.window](win)


def pre_emphasize(x, coeff):
    x = np.asarray(x, dtype=np.float64)
    if coeff == 0:
        return x.copy()
    return np.concatenate([x[:1], x[1:] - coeff * x[:-1]])


def next_pow2(n):
    return 1 << max(0, int(n - 1).bit_length())


def power_spectrum(frames, n_fft):
    """|DFT|^2 / n_fft of each (zero-padded) frame; last axis has n_fft//2 + 1 bins."""
    frames = np.asarray(frames, dtype=np.float64)
    if frames.shape[-1] > n_fft:
        raise InvalidParams(f"frame length {frames.shape[-1]} exceeds n_fft={n_fft}")
    spec = np.fft.rfft(frames, n_fft)
    return (spec.real ** 2 + spec.imag ** 2) / n_fft


def parseval_weights(n_fft):
    """Weights that fold the one-sided spectrum back onto the full DFT."""
    w = np.full(n_fft // 2 + 1, 2.0)
    w[0] = 1.0
    if n_fft % 2 == 0:
        w[-1] = 1.0
    return w
