import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spoofkit.errors import EmptyScoreSet, InvalidParams, MalformedLine, MissingClass, UnknownKey
from spoofkit.metrics import (ScoreSet, TdcfParams, accuracy, det_curve, eer, evaluate, min_tdcf,
                              normalized_tdcf, parse_report_json, read_scores, report_json, report_text, write_scores)


def brute_rates(bona, spoof, theta):
    far = sum(1 for s in spoof if s >= theta) / len(spoof)
    frr = sum(1 for b in bona if b < theta) / len(bona)
    return far, frr


def brute_thresholds(scores):
    """-inf, midpoints between consecutive distinct scores, +inf."""
    u = sorted(set(scores))
    return [-math.inf, u[0] - 1.0] + [(a + b) / 2 for a, b in zip(u, u[1:])] + [u[-1] + 1.0, math.inf]


def brute_eer(bona, spoof):
    pts = [brute_rates(bona, spoof, t) for t in brute_thresholds(list(bona) + list(spoof))]
    for (fa0, fr0), (fa1, fr1) in zip(pts, pts[1:]):
        d0, d1 = fa0 - fr0, fa1 - fr1
        if d0 == 0:
            return fa0
        if d1 == 0:
            return fa1
        if d0 > 0 > d1:
            return fa0 + d0 / (d0 - d1) * (fa1 - fa0)
    raise AssertionError("no crossing")


def brute_min_tdcf(bona, spoof, beta):
    best = math.inf
    for t in brute_thresholds(list(bona) + list(spoof)):
        far, frr = brute_rates(bona, spoof, t)
        best = min(best, (beta * frr + far) / min(beta, 1.0))
    return best


def random_set(rng, n=20):
    while True:
        keys = rng.random(n) < 0.5
        if 0 < keys.sum() < n:
            break
    # a coarse grid so ties and plateaus occur
    scores = np.round(rng.normal(keys * 0.8, 1.0), 1)
    return ScoreSet((), scores, keys)


MONOTONE_MAPS = [
    lambda x: 3.0 * x - 7.0,
    np.exp,
    lambda x: x ** 3 + x,
    np.arcsinh,
    lambda x: np.arctan(x / 4.0),
    lambda x: 1 / (1 + np.exp(-x / 3.0)),
    lambda x: np.sign(x) * np.abs(x) ** 1.5,
    lambda x: np.exp(x / 2.0) - np.exp(-x),
    lambda x: 1e6 * x + 1e3,
    lambda x: np.log1p(np.exp(x)),
]


class TestAccuracy:
    def test_perfect(self):
        assert accuracy(ScoreSet.from_arrays([1, 1, 1], [-1, -1]), 0.0) == 1.0

    def test_flipped(self):
        assert accuracy(ScoreSet.from_arrays([-1, -1], [1, 1, 1]), 0.0) == 0.0

    def test_three_of_four(self):
        s = ScoreSet.from_records([("a", 0.9, "bonafide"), ("b", -0.2, "bonafide"),
                                   ("c", -0.5, "spoof"), ("d", -1.0, "spoof")])
        assert accuracy(s, 0.0) == 0.75

    def test_threshold_is_inclusive(self):
        assert accuracy(ScoreSet.from_arrays([0.5], [0.4]), 0.5) == 1.0

    def test_empty(self):
        with pytest.raises(EmptyScoreSet):
            accuracy(ScoreSet((), [], []))

    @pytest.mark.parametrize("seed", range(10))
    def test_error_rate_identity(self, seed):
        s = random_set(np.random.default_rng(seed))
        nb, ns = int(s.is_bonafide.sum()), int((~s.is_bonafide).sum())
        for theta in [-np.inf, *np.unique(s.scores), 0.05, np.inf]:
            far, frr = brute_rates(s.bonafide, s.spoof, theta)
            assert accuracy(s, theta) == pytest.approx(1 - (nb * frr + ns * far) / len(s), abs=1e-15)


class TestDet:
    def test_sentinels(self):
        c = det_curve(ScoreSet.from_arrays([0.9, 0.8], [0.1, 0.3]))
        assert (c.far[0], c.frr[0]) == (1.0, 0.0)
        assert (c.far[-1], c.frr[-1]) == (0.0, 1.0)

    def test_hand_enumeration(self):
        s = ScoreSet.from_arrays([0.9, 0.8], [0.1, 0.3])
        assert brute_rates(s.bonafide, s.spoof, 0.5) == (0.0, 0.0)
        c = det_curve(s)
        i = list(c.thresholds).index(0.8)  # first sweep point above 0.5
        assert (c.far[i], c.frr[i]) == (0.0, 0.0)
        assert list(c.thresholds) == [-np.inf, 0.1, 0.3, 0.8, 0.9, np.inf]

    @pytest.mark.parametrize("seed", range(10))
    def test_monotone_and_matches_brute(self, seed):
        s = random_set(np.random.default_rng(seed))
        c = det_curve(s)
        assert np.all(np.diff(c.far) <= 0) and np.all(np.diff(c.frr) >= 0)
        for t, far, frr in c:
            assert (far, frr) == brute_rates(s.bonafide, s.spoof, t)

    def test_missing_class(self):
        with pytest.raises(MissingClass):
            det_curve(ScoreSet.from_arrays([1.0, 2.0], []))
        with pytest.raises(MissingClass):
            eer(ScoreSet.from_arrays([], [1.0]))


class TestEer:
    def test_separable(self):
        e, thr = eer(ScoreSet.from_arrays([2.0, 3.0, 2.5], [-1.0, 0.5]))
        assert e == 0.0
        assert 0.5 < thr <= 2.0

    def test_constant_scores(self):
        assert eer(ScoreSet.from_arrays([0.3] * 5, [0.3] * 7))[0] == 0.5

    def test_fully_inverted(self):
        assert eer(ScoreSet.from_arrays([-1.0, -2.0], [1.0, 2.0]))[0] == 1.0

    @pytest.mark.parametrize("seed", range(50))
    def test_brute_force_oracle(self, seed):
        s = random_set(np.random.default_rng(seed))
        assert eer(s)[0] == pytest.approx(brute_eer(s.bonafide, s.spoof), abs=1e-12)
        beta = TdcfParams().beta()
        assert min_tdcf(s)[0] == pytest.approx(brute_min_tdcf(s.bonafide, s.spoof, beta), abs=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_monotone_transform_invariance(self, seed):
        s = random_set(np.random.default_rng(seed), n=40)
        e0, t0 = eer(s)[0], min_tdcf(s)[0]
        for fn in MONOTONE_MAPS:
            mapped = ScoreSet((), fn(s.scores), s.is_bonafide)
            assert len(np.unique(mapped.scores)) == len(np.unique(s.scores))
            assert eer(mapped)[0] == e0
            assert min_tdcf(mapped)[0] == t0

    @pytest.mark.parametrize("seed", range(10))
    def test_swap_labels_and_negate(self, seed):
        s = random_set(np.random.default_rng(seed))
        flipped = ScoreSet((), -s.scores, ~s.is_bonafide)
        assert eer(flipped)[0] == pytest.approx(eer(s)[0], abs=1e-15)

    def test_in_unit_interval(self):
        for seed in range(20):
            e = eer(random_set(np.random.default_rng(seed), n=7))[0]
            assert 0.0 <= e <= 1.0


class TestTdcf:
    def test_default_beta(self):
        p = TdcfParams()
        c1, c2 = p.cost_weights()
        pt, pn = 0.95 * 0.99, 0.95 * 0.01
        assert c1 == pytest.approx(pt * (1 - 0.01) - pn * 10 * 0.01, abs=1e-15)
        assert c2 == pytest.approx(10 * 0.05 * 0.9, abs=1e-15)
        assert p.beta() == pytest.approx(c1 / c2)

    def test_perfect_cm(self):
        assert min_tdcf(ScoreSet.from_arrays([5, 6, 7], [-1, 0]))[0] == 0.0

    def test_chance_at_unit_beta(self):
        p = TdcfParams(prior_spoof=0.5, cost_fa_cm=1.0, p_fa_asv=0.0, p_miss_asv=0.0,
                       p_miss_spoof_asv=0.0, target_share=1.0)
        assert p.beta() == pytest.approx(1.0, abs=1e-15)
        assert min_tdcf(ScoreSet.from_arrays([0.0] * 4, [0.0] * 6), p)[0] == 1.0

    def test_bounds(self):
        p = TdcfParams()
        beta = p.beta()
        hi = max(beta, 1) / min(beta, 1)
        for seed in range(20):
            v = min_tdcf(random_set(np.random.default_rng(seed)), p)[0]
            assert 0.0 <= v <= hi

    def test_invalid_params(self):
        with pytest.raises(InvalidParams):
            TdcfParams(cost_fa_cm=0.0)
        with pytest.raises(InvalidParams):
            TdcfParams(prior_spoof=1.0)
        with pytest.raises(InvalidParams):
            TdcfParams(p_miss_asv=1.5)
        with pytest.raises(InvalidParams):
            min_tdcf(ScoreSet.from_arrays([1.0], [0.0]), TdcfParams(p_miss_spoof_asv=1.0))

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-5, 5), min_size=1, max_size=8),
           st.lists(st.floats(-5, 5), min_size=1, max_size=8),
           st.floats(0.05, 20.0))
    def test_property_brute_force(self, bona, spoof, beta):
        s = ScoreSet.from_arrays(bona, spoof)
        assert eer(s)[0] == pytest.approx(brute_eer(bona, spoof), abs=1e-12)
        c = det_curve(s)
        got = float(np.min(normalized_tdcf(c.far, c.frr, beta)))
        assert got == pytest.approx(brute_min_tdcf(bona, spoof, beta), abs=1e-12)


class TestFiles:
    def test_score_file_round_trip(self, tmp_path):
        rng = np.random.default_rng(0)
        s = ScoreSet(tuple(f"u{i}" for i in range(10)), rng.normal(size=10) / 3, rng.random(10) < 0.5)
        path = tmp_path / "scores.txt"
        write_scores(path, s)
        back = read_scores(path)
        assert back.utt_ids == s.utt_ids
        assert back.scores.tobytes() == s.scores.tobytes()
        assert np.array_equal(back.is_bonafide, s.is_bonafide)

    def test_comments_and_blank_lines(self, tmp_path):
        path = tmp_path / "s.txt"
        path.write_text("# header\n\nu1 bonafide 1.5  # trailing\nu2 spoof -2\n", encoding="utf-8")
        s = read_scores(path)
        assert s.records() == [("u1", 1.5, "bonafide"), ("u2", -2.0, "spoof")]

    @pytest.mark.parametrize("text,err", [
        ("u1 bonafide\n", MalformedLine),
        ("u1 Bonafide 1.0\n", UnknownKey),
        ("u1 spoof abc\n", MalformedLine),
        ("u1 spoof nan\n", MalformedLine),
    ])
    def test_bad_lines(self, tmp_path, text, err):
        path = tmp_path / "s.txt"
        path.write_text("u0 spoof 0.0\n" + text, encoding="utf-8")
        with pytest.raises(err) as info:
            read_scores(path)
        assert info.value.lineno == 2


class TestReport:
    def test_perfect_report(self):
        r = evaluate(ScoreSet.from_arrays([2.0, 3.0], [-1.0, -2.0, -3.0]))
        assert r["accuracy"] == 1.0 and r["eer"] == 0.0 and r["min_tdcf"] == 0.0
        assert r["n_trials"] == 5 and r["n_bonafide"] == 2 and r["n_spoof"] == 3
        assert r["tdcf_params"] == TdcfParams().as_dict()

    def test_explicit_threshold(self):
        r = evaluate(ScoreSet.from_arrays([2.0, 3.0], [-1.0, 2.5]), threshold=10.0)
        assert r["accuracy_threshold"] == 10.0 and r["accuracy"] == 0.5

    def test_json_round_trip(self):
        s = random_set(np.random.default_rng(3))
        r = evaluate(s)
        back = parse_report_json(report_json(r, det_curve(s)))
        curve = back.pop("det_curve")
        assert back == r
        assert curve["thresholds"][0] == "-inf" and curve["thresholds"][-1] == "inf"
        assert curve["far"] == det_curve(s).far.tolist()

    def test_text_lists_every_field(self):
        text = report_text(evaluate(ScoreSet.from_arrays([1.0], [0.0])))
        assert "eer = 0.0" in text
        assert "tdcf_params.prior_spoof = 0.05" in text
