"""RBF-kernel support vector machine trained with SMO.

Working-set selection uses second-order information (the maximal-gain
pair) and the solver stops once the maximal KKT violation drops below
``tol``; every training point then satisfies its KKT condition to within
``tol``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from ..errors import DimensionMismatch, InvalidParams, NonFiniteInput, SingleClassData

log = logging.getLogger(__name__)

TAU = 1e-12
BONAFIDE, SPOOF = 1, -1


@dataclass(frozen=True)
class LabeledDataset:
    vectors: np.ndarray
    labels: np.ndarray
    ids: tuple = ()

    def __post_init__(self):
        x = np.atleast_2d(np.asarray(self.vectors, dtype=np.float64))
        y = np.asarray(self.labels).astype(int)
        if y.shape != (x.shape[0],):
            raise InvalidParams("need one label per vector")
        if not np.all(np.isin(y, (BONAFIDE, SPOOF))):
            raise InvalidParams("labels must be +1 (bonafide) or -1 (spoof)")
        if not np.all(np.isfinite(x)):
            raise NonFiniteInput("dataset vectors contain NaN or Inf")
        if self.ids and len(self.ids) != x.shape[0]:
            raise InvalidParams("need one id per vector")
        object.__setattr__(self, "vectors", x)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "ids", tuple(self.ids))

    def __len__(self):
        return self.labels.size

    def subset(self, idx):
        idx = np.asarray(idx)
        ids = tuple(self.ids[i] for i in idx) if self.ids else ()
        return LabeledDataset(self.vectors[idx], self.labels[idx], ids)

    def require_both_classes(self):
        if not (np.any(self.labels == BONAFIDE) and np.any(self.labels == SPOOF)):
            raise SingleClassData("training data must contain both bonafide and spoof examples")


def rbf_kernel(a, b, gamma):
    return np.exp(-gamma * cdist(np.atleast_2d(a), np.atleast_2d(b), "sqeuclidean"))


def scale_gamma(x):
    """1 / (n_features * Var(X)), falling back to 1 / n_features for constant data."""
    x = np.asarray(x, dtype=np.float64)
    var = x.var()
    return 1.0 / (x.shape[1] * var) if var > 0 else 1.0 / x.shape[1]


@dataclass(frozen=True)
class SvmModel:
    support_vectors: np.ndarray
    dual_coefs: np.ndarray
    bias: float
    gamma: float
    C: float

    def __post_init__(self):
        sv = np.atleast_2d(np.asarray(self.support_vectors, dtype=np.float64))
        coef = np.asarray(self.dual_coefs, dtype=np.float64).ravel()
        if coef.size != sv.shape[0]:
            raise InvalidParams("one dual coefficient per support vector required")
        if self.gamma <= 0 or self.C <= 0:
            raise InvalidParams("gamma and C must be positive")
        for name, arr in (("support_vectors", sv), ("dual_coefs", coef)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "bias", float(self.bias))
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "C", float(self.C))

    @property
    def dim(self):
        return self.support_vectors.shape[1]

    def decision_function(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if x.shape[1] != self.dim:
            raise DimensionMismatch(f"input has dim {x.shape[1]}, model expects {self.dim}")
        return rbf_kernel(x, self.support_vectors, self.gamma) @ self.dual_coefs + self.bias

    def predict(self, x):
        return np.where(self.decision_function(x) > 0, BONAFIDE, SPOOF)


def svm_decision(model, x):
    """Decision value f(x); positive favours bonafide."""
    x = np.asarray(x, dtype=np.float64)
    out = model.decision_function(x)
    return float(out[0]) if x.ndim == 1 else out


@dataclass
class SmoResult:
    alpha: np.ndarray
    bias: float
    gradient: np.ndarray
    n_iter: int
    converged: bool


def smo_solve(kernel, y, C=1.0, tol=1e-3, max_iter=None):
    """Solve max sum(a) - 1/2 a'Qa s.t. 0 <= a <= C, y'a = 0 with Q = yy' * K."""
    y = np.asarray(y, dtype=np.float64)
    n = y.size
    max_iter = max_iter or max(100_000, 100 * n)
    alpha = np.zeros(n)
    grad = -np.ones(n)
    diag = np.diag(kernel).copy()
    pos = y > 0

    it = 0
    converged = False
    while it < max_iter:
        # violating-pair selection on -y*G
        up = np.where(pos, alpha < C, alpha > 0)
        low = np.where(pos, alpha > 0, alpha < C)
        score = -y * grad
        if not up.any() or not low.any():
            converged = True
            break
        cand = np.where(up, score, -np.inf)
        i = int(np.argmax(cand))
        g_max = cand[i]
        low_scores = np.where(low, score, np.inf)
        if g_max - low_scores.min() < tol:
            converged = True
            break
        b = g_max - low_scores
        ok = low & (b > 0)
        quad = diag[i] + diag - 2.0 * kernel[i]
        quad = np.where(quad > 0, quad, TAU)
        gain = np.where(ok, -(b * b) / quad, np.inf)
        j = int(np.argmin(gain))

        yi, yj = y[i], y[j]
        ai, aj = alpha[i], alpha[j]
        k_ij = kernel[i, j]
        if yi != yj:
            q = diag[i] + diag[j] + 2.0 * yi * yj * k_ij
            q = q if q > 0 else TAU
            delta = (-grad[i] - grad[j]) / q
            diff = ai - aj
            ai += delta
            aj += delta
            if diff > 0:
                if aj < 0:
                    aj, ai = 0.0, diff
            elif ai < 0:
                ai, aj = 0.0, -diff
            if diff > 0:
                if ai > C:
                    ai, aj = C, C - diff
            elif aj > C:
                aj, ai = C, C + diff
        else:
            q = diag[i] + diag[j] - 2.0 * k_ij
            q = q if q > 0 else TAU
            delta = (grad[i] - grad[j]) / q
            total = ai + aj
            ai -= delta
            aj += delta
            if total > C:
                if ai > C:
                    ai, aj = C, total - C
                if aj > C:
                    aj, ai = C, total - C
            else:
                if aj < 0:
                    aj, ai = 0.0, total
                if ai < 0:
                    ai, aj = 0.0, total
        d_i, d_j = ai - alpha[i], aj - alpha[j]
        alpha[i], alpha[j] = ai, aj
        grad += y * (kernel[i] * (yi * d_i) + kernel[j] * (yj * d_j))
        it += 1

    yg = y * grad
    free = (alpha > 0) & (alpha < C)
    if free.any():
        rho = float(yg[free].mean())
    else:
        # every point sits on a box edge; rho lies between these bounds
        at_upper = alpha >= C
        at_lower = alpha <= 0
        upper_set = (at_upper & ~pos) | (at_lower & pos)
        lower_set = (at_upper & pos) | (at_lower & ~pos)
        ub = float(yg[upper_set].min()) if upper_set.any() else np.inf
        lb = float(yg[lower_set].max()) if lower_set.any() else -np.inf
        rho = (ub + lb) / 2.0 if np.isfinite(ub) and np.isfinite(lb) else (ub if np.isfinite(ub) else lb)
    if not converged:
        log.warning("SMO stopped after %d iterations without reaching tol=%g", it, tol)
    return SmoResult(alpha, -rho, grad, it, converged)


def dual_objective(alpha, y, kernel):
    ay = np.asarray(alpha) * np.asarray(y)
    return float(np.sum(alpha) - 0.5 * ay @ kernel @ ay)


def svm_fit(data, C=1.0, gamma=None, seed=0, tol=1e-3, max_passes=None):
    """Train an RBF SVM on ``data``; ``gamma=None`` uses :func:`scale_gamma`.

    ``seed`` is accepted for interface symmetry; the solver itself is
    deterministic.
    """
    if C <= 0:
        raise InvalidParams("C must be positive")
    data.require_both_classes()
    x, y = data.vectors, data.labels.astype(np.float64)
    gamma = scale_gamma(x) if gamma is None else float(gamma)
    if gamma <= 0:
        raise InvalidParams("gamma must be positive")
    kernel = rbf_kernel(x, x, gamma)
    max_iter = max_passes * len(y) if max_passes else None
    res = smo_solve(kernel, y, C, tol, max_iter)
    sv = res.alpha > 0
    return SvmModel(x[sv], (res.alpha * y)[sv], res.bias, gamma, C)
