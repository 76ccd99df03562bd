"""Constant-Q transform and constant-Q cepstral coefficients.

The transform evaluates one Hann-windowed complex exponential per bin at
the centre of every analysis frame, so its time grid is identical to the
MFCC grid for the same :class:`FrameParams`.  Lower octaves are computed
on a decimated copy of the signal to keep kernels short; bins are always
at most a quarter of the working rate, which leaves the decimation
filter's transition band unused.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline

from ..audio import resample_array
from ..errors import InvalidGeometry, InvalidParams, KernelTooLong
from .framing import FrameParams
from .matrix import FeatureMatrix, dct_matrix
from .mfcc import LOG_FLOOR


DECIMATION_TAPS = 64


@dataclass(frozen=True)
class CqtParams:
    bins_per_octave: int = 96
    fmax: float | None = None
    n_octaves: int = 9
    resample_period: int = 16
    n_ceps: int = 60
    # longest permitted kernel; anything longer is treated as a configuration error
    max_kernel_seconds: float = 60.0

    def __post_init__(self):
        if self.bins_per_octave < 1 or self.n_octaves < 1:
            raise InvalidGeometry("bins_per_octave and n_octaves must be >= 1")
        if self.resample_period < 1 or self.n_ceps < 1:
            raise InvalidParams("resample_period and n_ceps must be >= 1")

    @property
    def q_factor(self):
        return 1.0 / (2.0 ** (1.0 / self.bins_per_octave) - 1.0)

    @property
    def n_bins(self):
        return self.bins_per_octave * self.n_octaves

    def band(self, sample_rate):
        fmax = sample_rate / 2 if self.fmax is None else float(self.fmax)
        if not 0 < fmax <= sample_rate / 2:
            raise InvalidGeometry(f"fmax={fmax} must lie in (0, {sample_rate / 2}]")
        return fmax / 2.0 ** self.n_octaves, fmax


@dataclass(frozen=True)
class CqtGeometry:
    freqs: np.ndarray
    exact_lengths: np.ndarray
    lengths: np.ndarray
    bandwidths: np.ndarray
    q_factor: float


def cqt_geometry(cp, sample_rate):
    """Centre frequency, window length and bandwidth of every bin at full rate."""
    fmin, fmax = cp.band(sample_rate)
    k = np.arange(cp.n_bins)
    freqs = fmin * 2.0 ** (k / cp.bins_per_octave)
    exact = cp.q_factor * sample_rate / freqs
    if exact[0] > cp.max_kernel_seconds * sample_rate:
        raise KernelTooLong(f"lowest bin ({fmin:.4g} Hz) needs a {exact[0] / sample_rate:.1f}s "
                            f"kernel, limit is {cp.max_kernel_seconds}s")
    lengths = np.round(exact).astype(int)
    if lengths[-1] < 2:
        raise InvalidGeometry("highest bin has a kernel shorter than two samples")
    return CqtGeometry(freqs, exact, lengths, sample_rate / exact, cp.q_factor)


def _decimation(f_top, sample_rate):
    d = 1
    while f_top <= sample_rate / (8.0 * d):
        d *= 2
    return d


@lru_cache(maxsize=64)
def _octave_kernels(freqs, q_factor, rate):
    """Stacked kernels (real, imag) for one octave in a common buffer, plus
    each kernel's centre position within that buffer."""
    freqs = np.asarray(freqs)
    lengths = np.round(q_factor * rate / freqs).astype(int)
    width = int(lengths.max())
    re = np.zeros((freqs.size, width))
    im = np.zeros((freqs.size, width))
    for i, (f, n) in enumerate(zip(freqs, lengths)):
        t = np.arange(n) - (n - 1) / 2.0
        w = np.hanning(n) / n if n > 1 else np.ones(1)
        off = (width - n) // 2
        re[i, off:off + n] = w * np.cos(2 * np.pi * f * t / rate)
        im[i, off:off + n] = -w * np.sin(2 * np.pi * f * t / rate)
    centres = (width - lengths) // 2 + (lengths - 1) / 2.0
    for arr in (re, im, centres):
        arr.setflags(write=False)
    return re, im, centres


def cqt(clip, cp=CqtParams(), fp=FrameParams()):
    """Complex constant-Q spectrogram, shape ``(time_step, n_bins)``.

    Frames outside the clip are treated as zeros, so kernels longer than
    the clip are allowed.
    """
    fs = clip.sample_rate
    geom = cqt_geometry(cp, fs)
    centers = fp.frame_centers(clip.samples.size, fs)
    fmin, fmax = cp.band(fs)
    b = cp.bins_per_octave
    out = np.empty((centers.size, cp.n_bins), dtype=np.complex128)

    factors = [_decimation(fmax / 2.0 ** o, fs) for o in range(cp.n_octaves)]
    # zero margin wide enough for every decimation stage's filter tails,
    # a multiple of the largest factor so positions stay on the grid
    margin = DECIMATION_TAPS * max(factors)
    signals = {1: np.concatenate([np.zeros(margin), clip.samples, np.zeros(margin)])}
    for octave, d in enumerate(factors):
        hi = cp.n_bins - octave * b
        lo = hi - b
        if d not in signals:
            prev = max(k for k in signals if k < d)
            x = signals[prev]
            while prev < d:
                x = resample_array(x, 2, 1, taps=DECIMATION_TAPS)
                prev *= 2
                signals[prev] = x
        x = signals[d]
        freqs = geom.freqs[lo:hi]
        re, im, kcentre = _octave_kernels(tuple(freqs), geom.q_factor, fs / d)
        width = re.shape[1]
        target = (centers + margin) / d
        start = np.round(target - (width - 1) / 2.0).astype(int)
        padded = np.concatenate([np.zeros(width), x, np.zeros(width)])
        idx = np.clip(start[:, None] + width + np.arange(width)[None, :], 0, padded.size - 1)
        segs = padded[idx]
        # refer every phase to the exact frame centre rather than the rounded one
        shift = target[:, None] - (start[:, None] + kcentre[None, :])
        rot = np.exp(2j * np.pi * freqs[None, :] * shift / (fs / d))
        out[:, lo:hi] = (segs @ re.T + 1j * (segs @ im.T)) * rot
    return out


def linear_grid(freqs, resample_period):
    """Uniform frequency grid with spacing ``fmin / resample_period``."""
    step = freqs[0] / resample_period
    n = int(np.floor((freqs[-1] - freqs[0]) / step + 1e-9)) + 1
    return freqs[0] + step * np.arange(n)


def cqcc(clip, cp=CqtParams(), fp=FrameParams()):
    """Constant-Q cepstral coefficients, shape ``(time_step, n_ceps)``.

    log |CQT|^2 is spline-resampled from the geometric bin spacing onto a
    linear frequency grid before the DCT.
    """
    spec = cqt(clip, cp, fp)
    logp = np.log(np.maximum(spec.real ** 2 + spec.imag ** 2, LOG_FLOOR))
    freqs = cqt_geometry(cp, clip.sample_rate).freqs
    grid = linear_grid(freqs, cp.resample_period)
    if grid.size < cp.n_ceps:
        raise InvalidGeometry(f"linear grid has {grid.size} points, fewer than {cp.n_ceps} coefficients")
    uniform = CubicSpline(freqs, logp, axis=1)(grid)
    ceps = uniform @ dct_matrix(grid.size, cp.n_ceps).T
    return FeatureMatrix(ceps, "cqcc", fp)
