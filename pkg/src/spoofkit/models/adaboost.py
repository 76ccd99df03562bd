"""Discrete AdaBoost with RBF-SVM base learners."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidParams
from .svm import BONAFIDE, SPOOF, LabeledDataset, svm_fit

# keeps the stage weight finite when a round makes no training errors
ERROR_EPS = 1e-10


def _vote(values):
    """Sign with ties sent to spoof."""
    return np.where(np.asarray(values) > 0, BONAFIDE, SPOOF)


@dataclass(frozen=True)
class AdaBoostEnsemble:
    """Weighted SVM votes. ``degenerate`` marks a fit whose first round was
    no better than chance, leaving no usable rounds."""

    rounds: tuple = ()
    degenerate: bool = False
    errors: tuple = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "rounds", tuple((m, float(a)) for m, a in self.rounds))
        if any(not np.isfinite(a) for _, a in self.rounds):
            raise InvalidParams("stage weights must be finite")
        if not self.rounds and not self.degenerate:
            raise InvalidParams("a non-degenerate ensemble needs at least one round")

    @property
    def n_rounds(self):
        return len(self.rounds)

    @property
    def dim(self):
        return self.rounds[0][0].dim if self.rounds else None

    def decision_function(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        total = np.zeros(x.shape[0])
        for model, alpha in self.rounds:
            total += alpha * _vote(model.decision_function(x))
        return total

    def predict(self, x):
        return _vote(self.decision_function(x))


def ensemble_decision(ens, x):
    """Sum of stage-weighted votes; ``<= 0`` is read as spoof."""
    x = np.asarray(x, dtype=np.float64)
    out = ens.decision_function(x)
    return float(out[0]) if x.ndim == 1 else out


def weighted_error(weights, miss):
    weights = np.asarray(weights, dtype=np.float64)
    return float(np.sum(weights[miss]) / np.sum(weights))


def stage_weight(err):
    err = min(max(err, ERROR_EPS), 1.0 - ERROR_EPS)
    return 0.5 * np.log((1.0 - err) / err)


def _draw(rng, weights, labels, n, attempts=10):
    """Weighted bootstrap (unique indices) that keeps both classes."""
    for _ in range(attempts):
        idx = np.unique(rng.choice(labels.size, size=n, replace=True, p=weights))
        if np.unique(labels[idx]).size == 2:
            return idx
    # fall back to the heaviest example of each class
    extra = [int(np.argmax(np.where(labels == c, weights, -1.0))) for c in (BONAFIDE, SPOOF)]
    return np.unique(np.concatenate([idx, extra]))


def adaboost_fit(data, n_rounds=10, base_params=None, seed=0, base_fit=None):
    """Boost SVMs trained on weighted bootstrap resamples of ``data``.

    Stops early when a round's weighted error reaches 0.5 (that round is
    discarded) or hits zero (that round is kept).
    """
    if n_rounds < 1:
        raise InvalidParams("n_rounds must be >= 1")
    data.require_both_classes()
    base_params = dict(base_params or {})
    base_fit = base_fit or svm_fit
    rng = np.random.default_rng(seed)
    n = len(data)
    y = data.labels
    w = np.full(n, 1.0 / n)
    rounds, errors = [], []
    for m in range(n_rounds):
        idx = _draw(rng, w, y, n)
        model = base_fit(data.subset(idx), **base_params)
        pred = _vote(model.decision_function(data.vectors))
        miss = pred != y
        err = weighted_error(w, miss)
        errors.append(err)
        if err >= 0.5:
            break
        alpha = stage_weight(err)
        rounds.append((model, alpha))
        if err == 0.0:
            break
        w = w * np.exp(-alpha * y * pred)
        w /= w.sum()
    return AdaBoostEnsemble(tuple(rounds), degenerate=not rounds, errors=tuple(errors))
