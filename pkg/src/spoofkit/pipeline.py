"""The four pipeline stages: extract, train, score and eval.

Each stage reads the artefacts of the previous one from the work
directory named in the :class:`~spoofkit.config.RunConfig`, so they can be
run separately or chained with :func:`cmd_run`.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .audio import load_wav, resample
from .errors import DimensionMismatch, SingleClassData, SpoofkitError
from .features import extract, flatten_first_frames, stack_with_delta
from .metrics import (ScoreSet, det_curve, evaluate, read_scores, report_json, report_text,
                      write_scores)
from .models import (AdaBoostEnsemble, GmmPairScorer, LabeledDataset, SvmModel, adaboost_fit,
                     gmm_fit, llr_score, load_model, save_model, svm_fit)
from .protocol import FeatureCacheEntry, cache_index, cache_read, cache_write, parse_protocol, sample_balanced

log = logging.getLogger(__name__)


@dataclass
class ExtractResult:
    cache_path: Path
    n_written: int
    failures: list

    @property
    def manifest_path(self):
        return self.cache_path.with_suffix(".failures.txt")


def _extract_one(args):
    cfg, utt_id = args
    try:
        clip = resample(load_wav(cfg.paths.audio(utt_id), utt_id), cfg.target_rate)
        return utt_id, extract(clip, cfg.feature, cfg.frame, cfg.mel, cfg.cqt), None
    except (SpoofkitError, OSError) as exc:
        return utt_id, None, f"{type(exc).__name__}: {exc}"


def _ordered_map(fn, items, workers):
    if workers <= 1:
        return list(map(fn, items))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=8))


def cmd_extract(cfg, split="train"):
    """Extract features for every trial of ``split`` into the feature cache.

    Files that fail to load or featurise are skipped and listed, one per
    line, in a ``.failures.txt`` manifest next to the cache.
    """
    records = parse_protocol(cfg.paths.protocol(split), split)
    results = _ordered_map(_extract_one, [(cfg, r.utt_id) for r in records], cfg.workers)
    entries = [FeatureCacheEntry(u, fm) for u, fm, err in results if err is None]
    failures = [(u, err) for u, _, err in results if err is not None]
    path = cfg.paths.cache(cfg.feature, split)
    cache_write(path, entries)
    result = ExtractResult(path, len(entries), failures)
    manifest = result.manifest_path
    if failures:
        manifest.write_text("".join(f"{u}\t{e}\n" for u, e in failures), encoding="utf-8")
        for u, e in failures:
            log.warning("extract %s failed: %s", u, e)
    elif manifest.exists():
        manifest.unlink()
    log.info("extracted %d/%d %s utterances into %s", len(entries), len(records), split, path)
    return result


def _features(cfg, split, records):
    path = cfg.paths.cache(cfg.feature, split)
    available = cache_index(path)
    present = [r for r in records if r.utt_id in available]
    if len(present) < len(records):
        log.warning("%d %s trials have no cached features and are skipped",
                    len(records) - len(present), split)
    entries = cache_read(path, [r.utt_id for r in present], cfg.frame)
    return present, [e.features for e in entries]


def _gmm_input(cfg, fm):
    return stack_with_delta(fm) if cfg.gmm.use_deltas else fm


def _vectors(cfg, feats):
    return np.array([flatten_first_frames(f, cfg.frames) for f in feats])


def cmd_train(cfg, split="train"):
    """Train the configured classifier on a class-balanced sample of ``split``."""
    records = sample_balanced(parse_protocol(cfg.paths.protocol(split), split),
                              cfg.n_per_class, cfg.seed)
    records, feats = _features(cfg, split, records)
    labels = np.array([1 if r.is_bonafide else -1 for r in records])
    if cfg.classifier == "gmm":
        pools = {}
        for key, flag in (("bonafide", 1), ("spoof", -1)):
            chosen = [_gmm_input(cfg, f).data for f, y in zip(feats, labels) if y == flag]
            if not chosen:
                raise SingleClassData(f"{split} split has no usable {key} utterances")
            pools[key] = np.vstack(chosen)
        model = GmmPairScorer(
            gmm_fit(pools["bonafide"], cfg.gmm.n_components, cfg.seed, cfg.gmm.max_iters,
                    cfg.gmm.tol, "bonafide"),
            gmm_fit(pools["spoof"], cfg.gmm.n_components, cfg.seed + 1, cfg.gmm.max_iters,
                    cfg.gmm.tol, "spoof"))
    else:
        data = LabeledDataset(_vectors(cfg, feats), labels, tuple(r.utt_id for r in records))
        svm_args = {"C": cfg.svm.C, "gamma": cfg.svm.gamma, "tol": cfg.svm.tol}
        if cfg.classifier == "svm":
            model = svm_fit(data, seed=cfg.seed, **svm_args)
        else:
            model = adaboost_fit(data, cfg.adaboost.n_rounds, svm_args, cfg.seed)
            if model.degenerate:
                log.warning("AdaBoost degenerate: first round error %.3f >= 0.5", model.errors[0])
    path = cfg.paths.model(cfg.classifier, cfg.feature)
    save_model(path, model, cfg.to_dict())
    log.info("trained %s on %d %s utterances -> %s", cfg.classifier, len(records), split, path)
    return path


def score_features(model, cfg, feats):
    """Scores for a list of feature matrices; higher means more bonafide."""
    if isinstance(model, GmmPairScorer):
        return np.array([llr_score(model, _gmm_input(cfg, f)) for f in feats])
    if isinstance(model, (SvmModel, AdaBoostEnsemble)):
        x = _vectors(cfg, feats)
        if model.dim is not None and x.shape[1] != model.dim:
            raise DimensionMismatch(f"feature vectors have dim {x.shape[1]}, model expects {model.dim}")
        return model.decision_function(x)
    raise TypeError(f"cannot score with {type(model).__name__}")


def cmd_score(cfg, split="dev"):
    """Score every trial of ``split``; a missing cache entry is an error."""
    records = parse_protocol(cfg.paths.protocol(split), split)
    model, _ = load_model(cfg.paths.model(cfg.classifier, cfg.feature))
    entries = cache_read(cfg.paths.cache(cfg.feature, split), [r.utt_id for r in records], cfg.frame)
    scores = score_features(model, cfg, [e.features for e in entries]) if entries else np.zeros(0)
    score_set = ScoreSet(tuple(r.utt_id for r in records), scores, [r.is_bonafide for r in records])
    path = cfg.paths.scores(cfg.classifier, cfg.feature, split)
    path.parent.mkdir(parents=True, exist_ok=True)
    write_scores(path, score_set)
    log.info("wrote %d scores to %s", len(score_set), path)
    return path


def cmd_eval(cfg, split="dev", threshold=None, report_format="text", det=False, scores_path=None):
    """Compute the report for a score file; returns ``(report, written paths)``."""
    scores = read_scores(scores_path or cfg.paths.scores(cfg.classifier, cfg.feature, split))
    report = evaluate(scores, cfg.tdcf, threshold)
    report["config"] = cfg.to_dict()
    written = []
    text_path = cfg.paths.report(cfg.classifier, cfg.feature, split, "txt")
    text_path.parent.mkdir(parents=True, exist_ok=True)
    text_path.write_text(report_text(report), encoding="utf-8")
    written.append(text_path)
    if report_format == "json" or det:
        json_path = cfg.paths.report(cfg.classifier, cfg.feature, split, "json")
        json_path.write_text(report_json(report, det_curve(scores) if det else None), encoding="utf-8")
        written.append(json_path)
    return report, written


def cmd_run(cfg, train_split="train", eval_split="dev", **eval_kwargs):
    """extract -> train -> score -> eval; returns the eval report."""
    extracted = [cmd_extract(cfg, train_split)]
    if eval_split != train_split:
        extracted.append(cmd_extract(cfg, eval_split))
    cmd_train(cfg, train_split)
    cmd_score(cfg, eval_split)
    report, _ = cmd_eval(cfg, eval_split, **eval_kwargs)
    return report, extracted
