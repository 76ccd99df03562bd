"""Countermeasure metrics: accuracy, DET sweep, EER and minimum normalised t-DCF.

Scores follow one convention throughout: higher means more bonafide.  At a
threshold ``t`` a trial is accepted as bonafide when ``score >= t``, so

* ``far`` (false acceptance) is the fraction of spoof trials accepted, and
* ``frr`` (false rejection) is the fraction of bonafide trials rejected.

These are the countermeasure's false-alarm and miss rates in the t-DCF.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .errors import EmptyScoreSet, InvalidParams, MalformedLine, MissingClass, UnknownKey

KEYS = ("bonafide", "spoof")


@dataclass(frozen=True)
class ScoreSet:
    """Scored trials as parallel arrays; ``is_bonafide`` encodes the key."""

    utt_ids: tuple
    scores: np.ndarray
    is_bonafide: np.ndarray

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64).ravel()
        keys = np.asarray(self.is_bonafide, dtype=bool).ravel()
        ids = tuple(self.utt_ids) if self.utt_ids else tuple(f"trial{i}" for i in range(scores.size))
        if not (len(ids) == scores.size == keys.size):
            raise InvalidParams("utt_ids, scores and keys must have equal length")
        if not np.all(np.isfinite(scores)):
            raise InvalidParams("scores must be finite")
        object.__setattr__(self, "utt_ids", ids)
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "is_bonafide", keys)

    @classmethod
    def from_records(cls, records):
        """Build from ``(utt_id, score, key)`` triples."""
        records = list(records)
        for _, _, key in records:
            if key not in KEYS:
                raise InvalidParams(f"unknown key {key!r}")
        return cls(tuple(r[0] for r in records), [r[1] for r in records],
                   [r[2] == "bonafide" for r in records])

    @classmethod
    def from_arrays(cls, bonafide_scores, spoof_scores):
        b = np.asarray(bonafide_scores, dtype=np.float64).ravel()
        s = np.asarray(spoof_scores, dtype=np.float64).ravel()
        return cls((), np.concatenate([b, s]),
                   np.concatenate([np.ones(b.size, bool), np.zeros(s.size, bool)]))

    def __len__(self):
        return self.scores.size

    @property
    def bonafide(self):
        return self.scores[self.is_bonafide]

    @property
    def spoof(self):
        return self.scores[~self.is_bonafide]

    def records(self):
        return [(u, float(s), "bonafide" if b else "spoof")
                for u, s, b in zip(self.utt_ids, self.scores, self.is_bonafide)]

    def require_both(self):
        if not self.is_bonafide.any() or self.is_bonafide.all():
            raise MissingClass("need at least one bonafide and one spoof trial")


@dataclass(frozen=True)
class TdcfParams:
    """Costs, priors and fixed ASV error rates of the constrained t-DCF.

    ``target_share`` splits the non-spoof prior between target and
    non-target trials.
    """

    cost_miss_cm: float = 1.0
    cost_fa_cm: float = 10.0
    prior_spoof: float = 0.05
    p_fa_asv: float = 0.01
    p_miss_asv: float = 0.01
    p_miss_spoof_asv: float = 0.10
    cost_miss_asv: float = 1.0
    cost_fa_asv: float = 10.0
    target_share: float = 0.99

    def __post_init__(self):
        for name in ("cost_miss_cm", "cost_fa_cm", "cost_miss_asv", "cost_fa_asv"):
            if not getattr(self, name) > 0:
                raise InvalidParams(f"{name} must be positive")
        for name in ("p_fa_asv", "p_miss_asv", "p_miss_spoof_asv", "target_share"):
            if not 0 <= getattr(self, name) <= 1:
                raise InvalidParams(f"{name} must lie in [0, 1]")
        if not 0 < self.prior_spoof < 1:
            raise InvalidParams("prior_spoof must lie in (0, 1)")

    @property
    def prior_target(self):
        return (1 - self.prior_spoof) * self.target_share

    @property
    def prior_nontarget(self):
        return (1 - self.prior_spoof) * (1 - self.target_share)

    def cost_weights(self):
        """(C1, C2): weights on the CM miss rate and CM false-alarm rate."""
        c1 = (self.prior_target * (self.cost_miss_cm - self.cost_miss_asv * self.p_miss_asv)
              - self.prior_nontarget * self.cost_fa_asv * self.p_fa_asv)
        c2 = self.cost_fa_cm * self.prior_spoof * (1 - self.p_miss_spoof_asv)
        return c1, c2

    def beta(self):
        c1, c2 = self.cost_weights()
        if c1 <= 0 or c2 <= 0:
            raise InvalidParams(f"t-DCF cost weights must be positive, got C1={c1:.4g} C2={c2:.4g}")
        return c1 / c2

    def as_dict(self):
        return asdict(self)


def accuracy(scores, threshold=0.0):
    """Fraction of trials on the correct side of ``threshold``."""
    if len(scores) == 0:
        raise EmptyScoreSet("no trials to score")
    accepted = scores.scores >= threshold
    return float(np.mean(accepted == scores.is_bonafide))


@dataclass(frozen=True)
class DetCurve:
    thresholds: np.ndarray
    far: np.ndarray
    frr: np.ndarray

    def __iter__(self):
        return iter(zip(self.thresholds.tolist(), self.far.tolist(), self.frr.tolist()))

    def __len__(self):
        return self.thresholds.size


def det_curve(scores):
    """Error rates at ``-inf``, every distinct score and ``+inf``, in increasing order."""
    scores.require_both()
    bona = np.sort(scores.bonafide)
    spoof = np.sort(scores.spoof)
    thresholds = np.concatenate([[-np.inf], np.unique(scores.scores), [np.inf]])
    frr = np.searchsorted(bona, thresholds, side="left") / bona.size
    far = (spoof.size - np.searchsorted(spoof, thresholds, side="left")) / spoof.size
    return DetCurve(thresholds, far, frr)


def eer_from_rates(far, frr, thresholds):
    far = np.asarray(far, dtype=np.float64)
    frr = np.asarray(frr, dtype=np.float64)
    diff = far - frr
    i = int(np.argmax(diff <= 0))
    if diff[i] == 0:
        return float(far[i]), float(thresholds[i])
    # far - frr changes sign between i-1 and i; both rates are linear in t there
    t = diff[i - 1] / (diff[i - 1] - diff[i])
    eer = far[i - 1] + t * (far[i] - far[i - 1])
    return float(eer), float(thresholds[i])


def eer(scores):
    """Equal error rate and the first sweep threshold at or past the crossing."""
    curve = det_curve(scores)
    return eer_from_rates(curve.far, curve.frr, curve.thresholds)


def normalized_tdcf(far, frr, beta):
    return (beta * np.asarray(frr) + np.asarray(far)) / min(beta, 1.0)


def min_tdcf(scores, params=TdcfParams()):
    """Minimum over the DET sweep of the normalised t-DCF."""
    beta = params.beta()
    curve = det_curve(scores)
    values = normalized_tdcf(curve.far, curve.frr, beta)
    i = int(np.argmin(values))
    return float(values[i]), float(curve.thresholds[i])


def read_scores(path):
    """Parse ``<utt_id> <key> <score>`` lines; ``#`` starts a comment."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise MalformedLine(lineno, f"expected 3 fields, got {len(parts)}")
            utt, key, value = parts
            if key not in KEYS:
                raise UnknownKey(lineno, f"unknown key {key!r}")
            try:
                score = float(value)
            except ValueError:
                raise MalformedLine(lineno, f"score {value!r} is not a number") from None
            if not math.isfinite(score):
                raise MalformedLine(lineno, "score is not finite")
            records.append((utt, score, key))
    return ScoreSet.from_records(records)


def format_scores(scores):
    return "".join(f"{u} {k} {s!r}\n" for u, s, k in scores.records())


def write_scores(path, scores):
    Path(path).write_text(format_scores(scores), encoding="utf-8")


def evaluate(scores, params=TdcfParams(), threshold=None):
    """Everything a report needs, as a plain dict."""
    e, e_thr = eer(scores)
    t, t_thr = min_tdcf(scores, params)
    acc_thr = e_thr if threshold is None else float(threshold)
    return {
        "n_trials": len(scores),
        "n_bonafide": int(scores.is_bonafide.sum()),
        "n_spoof": int((~scores.is_bonafide).sum()),
        "eer": e,
        "eer_threshold": e_thr,
        "accuracy": accuracy(scores, acc_thr),
        "accuracy_threshold": acc_thr,
        "accuracy_at_zero": accuracy(scores, 0.0),
        "min_tdcf": t,
        "min_tdcf_threshold": t_thr,
        "tdcf_beta": params.beta(),
        "tdcf_params": params.as_dict(),
    }


def _json_float(x):
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")


def report_json(report, curve=None):
    """Machine-readable dump; infinities become the strings "inf"/"-inf"."""
    out = {k: (_json_float(v) if isinstance(v, float) else v) for k, v in report.items()}
    if curve is not None:
        out["det_curve"] = {
            "thresholds": [_json_float(t) for t in curve.thresholds.tolist()],
            "far": curve.far.tolist(),
            "frr": curve.frr.tolist(),
        }
    return json.dumps(out, indent=2, sort_keys=True)


def parse_report_json(text):
    def fix(v):
        if v == "inf":
            return math.inf
        if v == "-inf":
            return -math.inf
        return v
    data = json.loads(text)
    return {k: fix(v) for k, v in data.items()}


def _flatten(prefix, value, out):
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else k, v, out)
    else:
        out.append(f"{prefix} = {value!r}")


def report_text(report):
    """``key = value`` lines, nested dicts flattened to dotted keys."""
    lines = []
    _flatten("", report, lines)
    return "\n".join(lines) + "\n"
