"""
Accuracy, EER and the tandem detection cost
===========================================

Given countermeasure scores and keys, sweep every distinct threshold to
get the DET curve, read off the equal error rate, and minimise the
normalised t-DCF against a fixed ASV operating point.
"""

import numpy as np

from spoofkit.metrics import (ScoreSet, TdcfParams, accuracy, det_curve, eer, evaluate, min_tdcf,
                              report_json, report_text)

rng = np.random.default_rng(1)
scores = ScoreSet.from_arrays(rng.normal(1.5, 1.0, 300), rng.normal(-1.0, 1.2, 700))

###############################################################################
# Threshold sweep. far: spoof accepted; frr: bonafide rejected.
curve = det_curve(scores)
print("sweep points:", len(curve))
for t, far, frr in list(curve)[::200]:
    print(f"  theta={t:+8.3f}  far={far:.3f}  frr={frr:.3f}")

###############################################################################
# The EER interpolates linearly where far - frr changes sign.
e, thr = eer(scores)
print(f"EER = {e:.4f} at threshold {thr:+.3f}")
print(f"accuracy at that threshold = {accuracy(scores, thr):.4f}")

###############################################################################
# The t-DCF weighs CM misses by beta relative to CM false alarms; beta is
# fixed by the costs, the spoof prior and the ASV error rates.
params = TdcfParams()
print(f"beta = {params.beta():.4f}")
t, t_thr = min_tdcf(scores, params)
print(f"min normalised t-DCF = {t:.4f} at threshold {t_thr:+.3f}")

# only the order of the scores matters
warped = ScoreSet((), np.exp(scores.scores), scores.is_bonafide)
print("unchanged under exp():", eer(warped)[0] == e, min_tdcf(warped, params)[0] == t)

###############################################################################
# A full report, as text and as JSON with the DET curve attached.
report = evaluate(scores, params)
print(report_text(report))
print(report_json(report, curve)[:200], "...")
