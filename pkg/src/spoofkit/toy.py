"""Seeded synthetic corpus for smoke tests and demos.

Bonafide clips are glottal-like harmonic tones with a drifting pitch and
a little noise.  Spoof clips come from the same generator but are
low-pass filtered and carry a faint narrowband artefact, which mimics the
band-limited output of a cheap vocoder.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .audio import AudioClip, write_wav
from .protocol import TrialRecord, write_protocol


def harmonic_voice(rng, duration, sample_rate):
    n = int(duration * sample_rate)
    t = np.arange(n) / sample_rate
    f0 = rng.uniform(100.0, 250.0) * (1 + 0.05 * np.sin(2 * np.pi * rng.uniform(2, 6) * t))
    phase = 2 * np.pi * np.cumsum(f0) / sample_rate
    x = np.zeros(n)
    for h in range(1, int(0.45 * sample_rate / 100.0)):
        amp = np.where(h * f0 < 0.45 * sample_rate, 1.0 / h, 0.0)
        x += amp * np.sin(h * phase + rng.uniform(0, 2 * np.pi))
    envelope = 0.6 + 0.4 * np.sin(2 * np.pi * rng.uniform(1, 4) * t + rng.uniform(0, 2 * np.pi))
    x *= envelope
    x += 10 ** (-35 / 20) * np.std(x) * rng.standard_normal(n)
    return x


def spoof_distort(rng, x, sample_rate, cutoff=4000.0, artefact=5500.0):
    spec = np.fft.rfft(x)
    freqs = np.fft.rfftfreq(x.size, 1.0 / sample_rate)
    spec[freqs > cutoff * rng.uniform(0.85, 1.0)] = 0.0
    y = np.fft.irfft(spec, x.size)
    t = np.arange(x.size) / sample_rate
    y += 0.02 * np.std(y) * np.sin(2 * np.pi * artefact * rng.uniform(0.98, 1.02) * t)
    return y


def make_clip(rng, spoof, sample_rate=16000, duration=None, utt_id=""):
    duration = rng.uniform(0.6, 1.0) if duration is None else duration
    x = harmonic_voice(rng, duration, sample_rate)
    if spoof:
        x = spoof_distort(rng, x, sample_rate)
    x *= 0.5 / np.max(np.abs(x))
    return AudioClip(x, sample_rate, utt_id)


def generate_toy_corpus(out_dir, n_clips=200, seed=0, sample_rate=16000):
    """Write ``n_clips`` WAV files plus ``train.txt``/``dev.txt`` protocols.

    Clips alternate bonafide/spoof and are split evenly between train and
    dev. Returns ``{split: protocol_path}``.
    """
    out = Path(out_dir)
    (out / "wav").mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    records = {"train": [], "dev": []}
    for i in range(n_clips):
        split = "train" if i < n_clips // 2 else "dev"
        spoof = bool(i % 2)
        tag = "T" if split == "train" else "D"
        utt = f"TOY_{tag}_{i:05d}"
        clip = make_clip(rng, spoof, sample_rate, utt_id=utt)
        write_wav(out / "wav" / f"{utt}.wav", clip)
        records[split].append(TrialRecord(f"SPK_{i % 10:02d}", utt, "S01" if spoof else "-",
                                          "spoof" if spoof else "bonafide", split))
    paths = {}
    for split, recs in records.items():
        paths[split] = out / f"{split}.txt"
        write_protocol(paths[split], recs)
    return paths
