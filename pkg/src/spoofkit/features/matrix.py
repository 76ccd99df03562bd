"""Feature matrices and the frame-level operations shared by MFCC and CQCC."""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from ..errors import InvalidParams
from .framing import FrameParams

FEATURE_KINDS = ("mfcc", "cqcc")


@dataclass(frozen=True)
class FeatureMatrix:
    """A ``(time_step, dim)`` matrix of frame features.

    ``n_deltas`` records how many derivative blocks were appended to the
    static coefficients, so ``dim == base_dim * (1 + n_deltas)``.
    """

    data: np.ndarray
    feature_kind: str
    frame_params: FrameParams = FrameParams()
    n_deltas: int = 0

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
            raise InvalidParams(f"feature data must be a non-empty 2-D matrix, got shape {data.shape}")
        if self.feature_kind not in FEATURE_KINDS:
            raise InvalidParams(f"unknown feature kind {self.feature_kind!r}")
        if data.shape[1] % (1 + self.n_deltas):
            raise InvalidParams("dim is not a multiple of the delta block count")
        if not np.all(np.isfinite(data)):
            raise InvalidParams("feature matrix contains NaN or Inf")
        object.__setattr__(self, "data", data)

    @property
    def time_step(self):
        return self.data.shape[0]

    @property
    def dim(self):
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape

    @property
    def base_dim(self):
        return self.dim // (1 + self.n_deltas)


@lru_cache(maxsize=32)
def _dct_rows(n, n_rows):
    k = np.arange(n_rows)[:, None]
    t = np.arange(n)[None, :]
    d = np.cos(np.pi * k * (2 * t + 1) / (2 * n)) * np.sqrt(2.0 / n)
    d[0] /= np.sqrt(2.0)
    d.setflags(write=False)
    return d


def dct_matrix(n, n_rows=None):
    """First ``n_rows`` rows of the orthonormal DCT-II matrix of size ``n``."""
    n_rows = n if n_rows is None else n_rows
    if not 1 <= n_rows <= n:
        raise InvalidParams(f"cannot keep {n_rows} of {n} DCT coefficients")
    return _dct_rows(int(n), int(n_rows))


def delta_array(x, half_width=2):
    x = np.asarray(x, dtype=np.float64)
    if half_width < 1:
        raise InvalidParams("delta half width must be >= 1")
    t = x.shape[0]
    padded = np.concatenate([np.repeat(x[:1], half_width, 0), x,
                             np.repeat(x[-1:], half_width, 0)])
    out = np.zeros_like(x)
    for m in range(1, half_width + 1):
        out += m * (padded[half_width + m:half_width + m + t] - padded[half_width - m:half_width - m + t])
    return out / (2 * sum(m * m for m in range(1, half_width + 1)))


def delta(features, half_width=2):
    """Regression deltas over +/- ``half_width`` frames with replicated edges."""
    return replace(features, data=delta_array(features.data, half_width))


def stack_with_delta(features, half_width=2):
    """Append the deltas of the static block as extra columns."""
    if features.n_deltas:
        raise InvalidParams("features already carry deltas")
    d = delta_array(features.data, half_width)
    return replace(features, data=np.hstack([features.data, d]), n_deltas=1)


def flatten_first_frames(features, n_frames=50):
    """Row-major flatten of the first ``n_frames`` rows, zero-padded to fixed length."""
    data = features.data if isinstance(features, FeatureMatrix) else np.asarray(features, float)
    out = np.zeros(n_frames * data.shape[1])
    head = data[:n_frames].ravel()
    out[:head.size] = head
    return out
