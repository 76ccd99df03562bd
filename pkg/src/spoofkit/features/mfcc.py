"""Mel-frequency cepstral coefficients."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import DegenerateFilter, InvalidParams
from .framing import FrameParams, frame_and_window, next_pow2, power_spectrum, pre_emphasize
from .matrix import FeatureMatrix, dct_matrix

LOG_FLOOR = 1e-10


@dataclass(frozen=True)
class MelParams:
    """Filterbank and cepstrum sizes. ``fmax=None`` means Nyquist, ``n_fft=None``
    the smallest power of two holding one window."""

    n_filters: int = 26
    n_ceps: int = 13
    fmin: float = 0.0
    fmax: float | None = None
    n_fft: int | None = None

    def __post_init__(self):
        if self.n_filters < 1 or not 1 <= self.n_ceps <= self.n_filters:
            raise InvalidParams("need 1 <= n_ceps <= n_filters")
        if self.n_fft is not None and (self.n_fft < 2 or self.n_fft & (self.n_fft - 1)):
            raise InvalidParams(f"n_fft must be a power of two, got {self.n_fft}")

    def band(self, sample_rate):
        fmax = sample_rate / 2 if self.fmax is None else self.fmax
        if not 0 <= self.fmin < fmax <= sample_rate / 2:
            raise InvalidParams(f"need 0 <= fmin < fmax <= {sample_rate / 2}, "
                                f"got fmin={self.fmin} fmax={fmax}")
        return float(self.fmin), float(fmax)

    def fft_size(self, win_samples):
        n_fft = next_pow2(win_samples) if self.n_fft is None else self.n_fft
        if n_fft < win_samples:
            raise InvalidParams(f"n_fft={n_fft} is shorter than the {win_samples}-sample window")
        return n_fft


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(params, sample_rate, n_fft=None):
    """Triangular filters on FFT bins, with edges equally spaced in mel.

    Filter ``j`` rises from edge bin ``j`` to a peak of 1 at edge bin
    ``j + 1`` and falls to zero at edge bin ``j + 2``, which is also the
    next filter's peak.
    """
    n_fft = n_fft or params.n_fft or 512
    fmin, fmax = params.band(sample_rate)
    return _filterbank(params.n_filters, fmin, fmax, int(sample_rate), int(n_fft))


@lru_cache(maxsize=16)
def _filterbank(n_filters, fmin, fmax, sample_rate, n_fft):
    mels = np.linspace(hz_to_mel(fmin), hz_to_mel(fmax), n_filters + 2)
    edges = np.round(mel_to_hz(mels) * n_fft / sample_rate).astype(int)
    if np.any(np.diff(edges) == 0):
        j = int(np.flatnonzero(np.diff(edges) == 0)[0])
        raise DegenerateFilter(f"{n_filters} filters over {fmin}-{fmax} Hz put two centres on "
                               f"FFT bin {edges[j]} (n_fft={n_fft})")
    bins = np.arange(n_fft // 2 + 1)[None, :]
    lo, mid, hi = edges[:-2, None], edges[1:-1, None], edges[2:, None]
    rise = (bins - lo) / (mid - lo)
    fall = (hi - bins) / (hi - mid)
    fb = np.clip(np.minimum(rise, fall), 0.0, None)
    fb.setflags(write=False)
    return fb


def log_mel_energies(clip, fp=FrameParams(), mp=MelParams()):
    win = fp.win_samples(clip.sample_rate)
    n_fft = mp.fft_size(win)
    emphasized = pre_emphasize(clip.samples, fp.pre_emphasis)
    frames = frame_and_window(clip, fp, signal=emphasized)
    fb = mel_filterbank(mp, clip.sample_rate, n_fft)
    energies = power_spectrum(frames, n_fft) @ fb.T
    return np.log(np.maximum(energies, LOG_FLOOR))


def mfcc(clip, fp=FrameParams(), mp=MelParams()):
    """MFCCs (c0 included) of shape ``(time_step, n_ceps)``."""
    logfb = log_mel_energies(clip, fp, mp)
    ceps = logfb @ dct_matrix(mp.n_filters, mp.n_ceps).T
    return FeatureMatrix(ceps, "mfcc", fp)
