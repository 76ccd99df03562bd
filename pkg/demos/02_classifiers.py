"""
Three countermeasure back ends
==============================

A pair of diagonal GMMs scored by log-likelihood ratio, an RBF SVM trained
with SMO, and AdaBoost over SVMs. All three follow the same convention:
higher scores mean "more bonafide".
"""

import numpy as np

from spoofkit.models import (GmmPairScorer, LabeledDataset, adaboost_fit, decode_model,
                             encode_model, gmm_fit, svm_fit)

rng = np.random.default_rng(0)

###############################################################################
# Frame-level data for the GMMs: bonafide frames sit near the origin,
# spoofed frames are shifted and stretched.
bona_frames = rng.normal(0.0, 1.0, (2000, 4))
spoof_frames = rng.normal(0.8, 1.4, (2000, 4))

bona = gmm_fit(bona_frames, n_components=8, seed=0, trained_on="bonafide")
spoof = gmm_fit(spoof_frames, n_components=8, seed=1, trained_on="spoof")
print("EM iterations:", len(bona.history), "/", len(spoof.history))
print("log-likelihood trace is monotone:", bool(np.all(np.diff(bona.history) >= -1e-8)))

scorer = GmmPairScorer(bona, spoof)
test_bona = rng.normal(0.0, 1.0, (80, 4))
test_spoof = rng.normal(0.8, 1.4, (80, 4))
print(f"LLR on bonafide utterance: {scorer.score(test_bona):+.3f}")
print(f"LLR on spoofed utterance:  {scorer.score(test_spoof):+.3f}")

###############################################################################
# Utterance-level vectors for the SVM (in the pipeline these are the first
# 50 frames, flattened).
y = np.repeat([1, -1], 100)
x = rng.normal(0, 1, (200, 6)) + 0.9 * y[:, None] * np.array([1, 1, 0, 0, 0, 0])
train, test = LabeledDataset(x[::2], y[::2]), LabeledDataset(x[1::2], y[1::2])

svm = svm_fit(train, C=1.0)
print(f"SVM: {svm.support_vectors.shape[0]} support vectors, gamma={svm.gamma:.4f}")
print("SVM test accuracy:", np.mean(svm.predict(test.vectors) == test.labels))

###############################################################################
# AdaBoost re-draws a weighted bootstrap each round; a round no better
# than chance ends boosting.
ens = adaboost_fit(train, n_rounds=5, seed=0)
print("AdaBoost rounds kept:", ens.n_rounds, "weighted errors:", np.round(ens.errors, 3))
print("AdaBoost test accuracy:", np.mean(ens.predict(test.vectors) == test.labels))

###############################################################################
# Every model round-trips through the checksummed binary container.
blob = encode_model(svm, {"note": "demo"})
back, meta = decode_model(blob)
print("container bytes:", len(blob), "config:", meta)
print("identical decisions:", np.array_equal(back.decision_function(test.vectors),
                                             svm.decision_function(test.vectors)))
