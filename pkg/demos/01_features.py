"""
Cepstral features from a clip
=============================

Load or synthesise audio, bring it to 16 kHz, and compute the two
frame-level representations: MFCC (13 per frame) and CQCC (60 per frame).
Both use the same 25 ms / 10 ms framing, so their time axes line up.
"""

import numpy as np

from spoofkit.audio import AudioClip, resample
from spoofkit.features import (CqtParams, cqcc, cqt, cqt_geometry, flatten_first_frames, mfcc,
                               stack_with_delta)

# a two-tone clip at 22.05 kHz, then brought to the canonical rate
rate = 22050
t = np.arange(rate) / rate
x = 0.4 * np.sin(2 * np.pi * 220 * t) + 0.2 * np.sin(2 * np.pi * 1760 * t)
clip = resample(AudioClip(x, rate, "two_tones"), 16000)
print("resampled:", clip.sample_rate, "Hz,", clip.samples.size, "samples")

###############################################################################
# MFCC: pre-emphasis, Hamming frames, mel filterbank, log, DCT.
m = mfcc(clip)
print("MFCC", m.shape, "->", m.time_step, "frames of", m.dim)

# deltas double the width; the GMM back end uses this stacked form
md = stack_with_delta(m)
print("MFCC + delta", md.shape)

###############################################################################
# The constant-Q transform spaces 96 bins per octave from fmax/512 up to
# Nyquist. Each bin's window is Q cycles of its centre frequency long.
cp = CqtParams()
g = cqt_geometry(cp, clip.sample_rate)
print(f"CQT bins: {g.freqs.size}, f0 = {g.freqs[0]:.3f} Hz, Q = {cp.q_factor:.1f}")
print("longest window:", g.lengths.max(), "samples; shortest:", g.lengths.min())

spec = np.abs(cqt(clip))
mid = spec[spec.shape[0] // 2]
low = g.freqs < 1000
print(f"peaks at {g.freqs[low][np.argmax(mid[low])]:.1f} Hz and {g.freqs[~low][np.argmax(mid[~low])]:.1f} Hz")

###############################################################################
# CQCC: log power of the CQT, resampled onto a uniform frequency grid,
# then a DCT.
c = cqcc(clip)
print("CQCC", c.shape, "same frames as MFCC:", c.shape[0] == m.shape[0])

###############################################################################
# Fixed-length vectors for the SVM: the first 50 frames, zero padded when
# the clip is shorter.
print("SVM input lengths:", flatten_first_frames(m).size, flatten_first_frames(c).size)
