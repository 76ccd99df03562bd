import numpy as np
import pytest

from spoofkit.audio import AudioClip
from spoofkit.errors import ClipTooShort, InvalidGeometry, KernelTooLong
from spoofkit.features import CqtParams, FrameParams, cqcc, cqt, cqt_geometry, linear_grid, mfcc

from conftest import tone

FS = 16000


def test_default_geometry():
    cp = CqtParams()
    g = cqt_geometry(cp, FS)
    assert cp.n_bins == g.freqs.size == 864
    assert g.freqs[0] == 8000 / 512 == 15.625
    assert cp.q_factor == 1 / (2 ** (1 / 96) - 1)
    np.testing.assert_allclose(g.freqs[96::96] / g.freqs[:-96:96], 2.0)
    assert g.freqs[-1] < 8000


def test_constant_q_property():
    cp = CqtParams()
    g = cqt_geometry(cp, FS)
    ratio = g.freqs * (2 ** (1 / 96) - 1) / g.bandwidths
    np.testing.assert_allclose(ratio, 1.0, atol=1e-9)
    # with window lengths rounded to whole samples the ratio drifts by at most 1/(2N)
    rounded = g.freqs * (2 ** (1 / 96) - 1) / (FS / g.lengths)
    assert np.all(np.abs(rounded - 1) <= 0.5 / g.lengths + 1e-12)


def peak_bin(clip, cp=CqtParams()):
    mag = np.abs(cqt(clip, cp))
    return int(np.argmax(mag[mag.shape[0] // 2]))


def test_tone_at_fmin_peaks_at_bin_zero():
    assert peak_bin(tone(15.625, seconds=2.0)) == 0


def test_tone_one_octave_up_peaks_at_bin_b():
    assert peak_bin(tone(31.25, seconds=2.0)) == 96


@pytest.mark.parametrize("k", [200, 431, 600, 700, 863])
def test_tone_at_bin_centre(k):
    f = cqt_geometry(CqtParams(), FS).freqs[k]
    assert peak_bin(tone(f, seconds=1.0)) == k


def direct_cqt_bin(x, centre, freq, length, rate):
    """Full-rate inner product with a Hann-windowed exponential centred exactly at ``centre``."""
    m = np.arange(int(np.ceil(centre - (length - 1) / 2)), int(np.floor(centre + (length - 1) / 2)) + 1)
    u = m - centre
    w = (0.5 + 0.5 * np.cos(2 * np.pi * u / (length - 1))) / length
    seg = np.where((m >= 0) & (m < x.size), x[np.clip(m, 0, x.size - 1)], 0.0)
    return np.sum(seg * w * np.exp(-2j * np.pi * freq * u / rate))


def test_cqt_matches_direct_full_rate_oracle(rng):
    x = rng.uniform(-0.5, 0.5, 8000)
    clip = AudioClip(x, FS)
    cp = CqtParams()
    out = cqt(clip, cp)
    g = cqt_geometry(cp, FS)
    centres = FrameParams().frame_centers(x.size, FS)
    for k in (863, 768, 700, 671, 500, 300, 100, 0):
        got = out[[5, 20, 40], k]
        want = np.array([direct_cqt_bin(x, centres[j], g.freqs[k], g.lengths[k], FS) for j in (5, 20, 40)])
        tol = 1e-10 if k >= 672 else 0.01  # octaves computed at full rate vs decimated
        assert np.linalg.norm(got - want) <= tol * np.linalg.norm(want), k


def test_small_geometry_runs_fast():
    cp = CqtParams(bins_per_octave=12, n_octaves=6, n_ceps=20)
    out = cqt(tone(440), cp)
    assert out.shape == (98, 72)


def test_kernel_too_long():
    with pytest.raises(KernelTooLong):
        cqt(tone(100), CqtParams(n_octaves=14, max_kernel_seconds=60))


def test_invalid_geometry():
    with pytest.raises(InvalidGeometry):
        cqt(tone(100), CqtParams(fmax=9000))
    with pytest.raises(InvalidGeometry):
        CqtParams(bins_per_octave=0)


def test_cqcc_shape_matches_mfcc_time_steps():
    clip = tone(440, seconds=0.77)
    c = cqcc(clip)
    assert c.shape[1] == 60 and c.feature_kind == "cqcc"
    assert c.time_step == mfcc(clip).time_step


def test_cqcc_silence_constant_over_time():
    c = cqcc(AudioClip(np.zeros(6000), FS))
    assert np.all(c.data == c.data[0])


def test_cqcc_propagates_short_clip():
    with pytest.raises(ClipTooShort):
        cqcc(AudioClip(np.zeros(100), FS))


def test_linear_grid_spacing():
    freqs = cqt_geometry(CqtParams(), FS).freqs
    grid = linear_grid(freqs, 16)
    np.testing.assert_allclose(np.diff(grid), 15.625 / 16)
    assert grid[0] == freqs[0] and grid[-1] <= freqs[-1]
