"""Diagonal-covariance Gaussian mixtures trained by EM, and the two-model LLR scorer."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from ..errors import DegenerateComponent, DimensionMismatch, InsufficientData, InvalidParams

log = logging.getLogger(__name__)

LOG_2PI = np.log(2.0 * np.pi)
VARIANCE_FLOOR_SCALE = 1e-6
ABSOLUTE_VARIANCE_FLOOR = 1e-10
# components whose expected count falls below this are re-seeded
MIN_COMPONENT_MASS = 1e-8


@dataclass(frozen=True)
class GmmModel:
    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    trained_on: str = ""
    # mean per-frame log-likelihood before each M-step
    history: tuple = field(default=(), compare=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        mu = np.atleast_2d(np.asarray(self.means, dtype=np.float64))
        var = np.atleast_2d(np.asarray(self.variances, dtype=np.float64))
        if w.ndim != 1 or w.size < 1 or mu.shape != (w.size, mu.shape[1]) or var.shape != mu.shape:
            raise InvalidParams("inconsistent GMM parameter shapes")
        if abs(w.sum() - 1.0) > 1e-9 or np.any(w < 0):
            raise InvalidParams("mixture weights must form a simplex")
        if np.any(var <= 0) or not np.all(np.isfinite(var)) or not np.all(np.isfinite(mu)):
            raise InvalidParams("variances must be positive and parameters finite")
        for name, arr in (("weights", w), ("means", mu), ("variances", var)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_components(self):
        return self.weights.size

    @property
    def dim(self):
        return self.means.shape[1]

    def component_log_densities(self, x):
        """``(N, K)`` matrix of log w_k + log N(x_n; mu_k, diag var_k)."""
        x = _frames(x)
        if x.shape[1] != self.dim:
            raise DimensionMismatch(f"features have dim {x.shape[1]}, model expects {self.dim}")
        prec = 1.0 / self.variances
        logdet = np.sum(np.log(self.variances), axis=1)
        quad = np.empty((x.shape[0], self.n_components))
        step = max(1, 2_000_000 // (self.n_components * self.dim))
        for i in range(0, x.shape[0], step):
            diff = x[i:i + step, None, :] - self.means[None, :, :]
            quad[i:i + step] = np.einsum("nkd,kd->nk", diff * diff, prec)
        return np.log(self.weights) - 0.5 * (self.dim * LOG_2PI + logdet + quad)

    def score_samples(self, x):
        return logsumexp(self.component_log_densities(x), axis=1)


def _frames(features):
    data = getattr(features, "data", features)
    x = np.asarray(data, dtype=np.float64)
    return x[None, :] if x.ndim == 1 else x


def kmeans(x, k, rng, n_iter=20):
    """Lloyd iterations from a k-means++ start; returns ``(centres, labels)``."""
    n = x.shape[0]
    centres = np.empty((k, x.shape[1]))
    centres[0] = x[rng.integers(n)]
    d2 = np.sum((x - centres[0]) ** 2, axis=1)
    for j in range(1, k):
        total = d2.sum()
        i = rng.choice(n, p=d2 / total) if total > 0 else rng.integers(n)
        centres[j] = x[i]
        d2 = np.minimum(d2, np.sum((x - centres[j]) ** 2, axis=1))
    labels = np.zeros(n, dtype=int)
    for _ in range(n_iter):
        dist = (np.sum(x ** 2, 1)[:, None] - 2 * x @ centres.T + np.sum(centres ** 2, 1)[None, :])
        new = np.argmin(dist, axis=1)
        for j in range(k):
            members = new == j
            if members.any():
                centres[j] = x[members].mean(axis=0)
        if np.array_equal(new, labels):
            break
        labels = new
    return centres, labels


def gmm_fit(frames, n_components=32, seed=0, max_iters=100, tol=1e-4, trained_on=""):
    """Fit a diagonal GMM by EM from a seeded k-means initialisation.

    Stops once the mean log-likelihood changes by less than ``tol``. Each
    variance is floored at 1e-6 times that dimension's data variance.
    """
    x = _frames(frames)
    n, dim = x.shape
    k = int(n_components)
    if k < 1 or dim < 1:
        raise InvalidParams("need at least one component and one dimension")
    if n < k:
        raise InsufficientData(f"{n} frames cannot support {k} components")
    if not np.all(np.isfinite(x)):
        raise InvalidParams("training frames contain NaN or Inf")

    rng = np.random.default_rng(seed)
    floor = np.maximum(VARIANCE_FLOOR_SCALE * x.var(axis=0), ABSOLUTE_VARIANCE_FLOOR)
    means, labels = kmeans(x, k, rng)
    counts = np.bincount(labels, minlength=k).astype(float)
    weights = np.maximum(counts, 1.0)
    weights /= weights.sum()
    variances = np.empty((k, dim))
    for j in range(k):
        members = x[labels == j]
        variances[j] = members.var(axis=0) if len(members) > 1 else x.var(axis=0)
    variances = np.maximum(variances, floor)

    history = []
    reseeds = 0
    model = GmmModel(weights, means, variances, trained_on)
    for it in range(max_iters):
        logp = model.component_log_densities(x)
        norm = logsumexp(logp, axis=1)
        ll = float(norm.mean())
        if history and abs(ll - history[-1]) < tol:
            history.append(ll)
            break
        history.append(ll)
        resp = np.exp(logp - norm[:, None])
        nk = resp.sum(axis=0)
        dead = nk < MIN_COMPONENT_MASS * n
        if dead.any():
            reseeds += 1
            if reseeds > 2:
                raise DegenerateComponent(f"{int(dead.sum())} components collapsed after two re-seeds")
            log.warning("re-seeding %d collapsed GMM components (iteration %d)", dead.sum(), it)
            # give each dead component the worst-explained frames
            worst = np.argsort(norm)[:int(dead.sum())]
            resp[:, dead] = 0.0
            resp[worst, np.flatnonzero(dead)] = 1.0
            resp /= resp.sum(axis=1, keepdims=True)
            nk = resp.sum(axis=0)
        weights = nk / n
        means = (resp.T @ x) / nk[:, None]
        sq = (resp.T @ (x ** 2)) / nk[:, None]
        variances = np.maximum(sq - means ** 2, floor)
        model = GmmModel(weights / weights.sum(), means, variances, trained_on)
    return GmmModel(model.weights, model.means, model.variances, trained_on, tuple(history))


def gmm_loglik(model, features):
    """Mean per-frame log-likelihood of ``features`` under ``model``."""
    return float(np.mean(model.score_samples(features)))


@dataclass(frozen=True)
class GmmPairScorer:
    bonafide: GmmModel
    spoof: GmmModel

    def __post_init__(self):
        if self.bonafide.dim != self.spoof.dim:
            raise DimensionMismatch("bonafide and spoof models have different dimensions")

    def swapped(self):
        return GmmPairScorer(self.spoof, self.bonafide)

    def score(self, features):
        return llr_score(self, features)


def llr_score(scorer, features):
    """Log-likelihood ratio; positive values favour bonafide."""
    return gmm_loglik(scorer.bonafide, features) - gmm_loglik(scorer.spoof, features)
