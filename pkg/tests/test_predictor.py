import logging

import numpy as np
import pytest
from dataclasses import replace
from hypothesis import given, strategies as st

from bigridlab.bigrid import weight
from bigridlab.predictor import (SURVIVAL_THRESHOLD, PacketPrediction, PredictionError, classify, fold,
                                 predict_packets, predict_trajectory, prediction_report,
                                 velocity_order_check)
from bigridlab.runner import level_results
from bigridlab.scenario import Scenario

H = 2 * np.pi / 256
G = H ** -0.25
PI = np.pi
etas = st.floats(-PI, PI, exclude_min=True).filter(lambda e: e > -PI + 1e-9)


def _picks(preds):
    return [p.pick_eta for p in preds]


def test_classify_examples():
    assert str(classify(PI, 2, "restrict")) == "A"
    c = classify(PI / 2, 1, "restrict")
    assert c.label == "C" and c.l_star == 0
    b = classify(2 * PI / 3, 1, "restrict")
    assert b.label == "B_ii" and b.eta0_star == pytest.approx(-PI / 3, abs=1e-15)
    assert classify(PI / 2, 2, "restrict").label == "B_i"
    assert str(classify(0.3, 0, "none")) == "none"
    d = classify(2 * PI / 3, 1, "average")
    assert str(d) == "D(B_ii)" and d.base == "B_ii"


def test_classify_rejects_bad_input():
    with pytest.raises(ValueError):
        classify(4.0, 1, "restrict")
    with pytest.raises(ValueError):
        classify(0.1, 1, "inject")
    with pytest.raises(ValueError):
        classify(0.1, -1, "restrict")


@given(etas, st.integers(0, 3), st.sampled_from(["none", "restrict", "average"]))
def test_classify_total_and_star_range(eta0, k, proj):
    lab = classify(eta0, k, proj)
    if lab.label == "none":
        return
    n = 2 ** k
    assert -PI / n - 1e-12 <= lab.eta0_star <= PI / n + 1e-12
    assert abs(eta0 - lab.eta0_star - 2 * PI * lab.l_star / n) < 1e-12
    base = lab.base if lab.label == "D" else lab.label
    if base == "B_ii":
        assert 0 < abs(lab.eta0_star) < PI / n
    if base == "C":
        r = eta0 * n / PI
        assert abs(r - round(r)) < 1e-9 and round(r) % 2 == 1


def test_two_packets_at_two_thirds_pi():
    preds = predict_packets(2 * PI / 3, 1, "restrict", G, H)
    by = {round(p.pick_eta, 12): p for p in preds}
    a, b = by[round(2 * PI / 3, 12)], by[round(-PI / 3, 12)]
    assert a.velocity == pytest.approx(-2 * np.sin(2 * PI / 3) / H) and a.amplitude_factor == pytest.approx(0.25)
    assert b.velocity == pytest.approx(2 * np.sin(PI / 3) / H) and b.amplitude_factor == pytest.approx(0.75)


def test_zone_edge_restriction_k2():
    preds = predict_packets(PI, 2, "restrict", G, H)
    alive = [p for p in preds if p.survives]
    assert len(alive) == 1 and alive[0].pick_eta == 0.0 and alive[0].velocity == 0.0
    assert alive[0].amplitude_factor == 1.0
    dead = sorted(p.pick_eta for p in preds if not p.survives)
    np.testing.assert_allclose(dead, [-PI / 2, PI / 2, PI], atol=1e-15)
    assert all(p.amplitude_factor < 1e-30 for p in preds if not p.survives)


def test_average_half_pi_k1():
    preds = predict_packets(PI / 2, 1, "average", G, H)
    assert len(preds) == 2
    for p in preds:
        assert p.amplitude_factor == pytest.approx(0.25, abs=1e-15)


def test_half_pi_k2_average_vanishes_and_restrict_keeps_rest_packet():
    avg = predict_packets(PI / 2, 2, "average", G, H)
    assert all(p.amplitude_factor < 1e-30 for p in avg)
    res = predict_packets(PI / 2, 2, "restrict", G, H)
    factors = {round(p.pick_eta, 12): p.amplitude_factor for p in res}
    assert factors[round(PI / 2, 12)] < 1e-30
    assert factors[0.0] == 1.0      # the restriction coincides with that of the zone-edge datum


def test_unfiltered_single_packet():
    (p,) = predict_packets(0.4, 0, "none", G, H)
    assert p.amplitude_factor == 1.0 and p.decay_constant == 1.0
    assert p.velocity == pytest.approx(-2 * np.sin(0.4) / H) and p.q2 == pytest.approx(2 * np.cos(0.4))


def test_zone_edge_datum_continuous_symbol_has_two_half_packets():
    preds = predict_packets(PI, 0, "none", G, H, symbol="continuous")
    assert sorted(p.velocity for p in preds) == pytest.approx([-2 * PI / H, 2 * PI / H])
    assert all(p.decay_constant == 0.5 and p.q2 == 2.0 for p in preds)


def test_band_edge_carrier_gets_half_constant():
    (p,) = predict_packets(0.5, 0, "none", G, H, band=(0.5, PI))
    assert p.decay_constant == 0.5


@given(etas, st.integers(1, 3), st.sampled_from(["restrict", "average"]))
def test_prediction_invariants(eta0, k, proj):
    preds = predict_packets(eta0, k, proj, G, H)
    assert len(preds) == 2 ** k
    b0 = float(weight(k, eta0))
    for p in preds:
        assert fold(p.pick_eta) == p.pick_eta
        assert -PI < p.pick_eta <= PI
        assert 0.0 <= p.amplitude_factor <= 1.0
        assert p.velocity == -2 * np.sin(p.pick_eta) / H
        expected = float(weight(k, p.pick_eta)) * (1.0 if proj == "restrict" else b0)
        assert p.amplitude_factor == expected
    # picks are the aliases of eta0
    n = 2 ** k
    for p in preds:
        r = (p.pick_eta - eta0) * n / (2 * PI)
        assert abs(r - round(r)) < 1e-9


@given(etas.filter(lambda e: abs(e) < PI - 1e-9), st.integers(0, 3), st.sampled_from(["restrict", "average"]))
def test_velocities_odd_in_eta0(eta0, k, proj):
    proj = proj if k else "none"
    a = predict_packets(eta0, k, proj, G, H)
    b = predict_packets(-eta0, k, proj, G, H)
    va = sorted((round(fold(-p.pick_eta), 9), -p.velocity, p.amplitude_factor) for p in a)
    vb = sorted((round(p.pick_eta, 9), p.velocity, p.amplitude_factor) for p in b)
    for x, y in zip(va, vb):
        assert x[0] == pytest.approx(y[0], abs=1e-9) or abs(abs(x[0]) - PI) < 1e-9
        assert x[1] == pytest.approx(y[1], rel=1e-12, abs=1e-9)
        assert x[2] == pytest.approx(y[2], rel=1e-12, abs=1e-15)


def test_trajectory_at_t0():
    p = predict_packets(0.4, 0, "none", G, H)[0]
    c, w, a = predict_trajectory(p, 0.0, x_star=1.5, base_amplitude=2.0)
    assert (c, w, a) == (1.5, pytest.approx(G ** -0.5), 2.0)


def test_trajectory_frozen_at_half_pi():
    p = predict_packets(PI / 2, 0, "none", G, H)[0]
    w0, a0 = predict_trajectory(p, 0.0)[1:]
    for t in (0.5, 3.0, 100.0):
        _, w, a = predict_trajectory(p, t)
        assert w == pytest.approx(w0, rel=1e-15) and a == pytest.approx(a0, rel=1e-15)


def test_amplitude_decays_like_inverse_sqrt_t():
    p = predict_packets(0.0, 0, "none", G, H)[0]
    a1 = predict_trajectory(p, 1e4)[2]
    a2 = predict_trajectory(p, 4e4)[2]
    assert a1 / a2 == pytest.approx(2.0, rel=1e-6)


def test_order_case_c_k2():
    lab = classify(PI / 4, 2, "restrict")
    assert lab.label == "C"
    res = velocity_order_check(predict_packets(PI / 4, 2, "restrict", G, H), lab)
    assert len(res["pairs"]) == 2      # one collapse pair for each direction
    a, b, speed = res["pairs"][0]
    assert speed == pytest.approx(2 * np.sin(PI / 4) / H)


def test_order_case_b_k2():
    for eta0 in (0.3, -0.3, 2 * PI / 3, -2.5):
        lab = classify(eta0, 2, "restrict")
        assert lab.label == "B_ii"
        res = velocity_order_check(predict_packets(eta0, 2, "restrict", G, H), lab)
        assert len(res["pairs"]) == 2
        assert all(b > a for a, b in zip(res["chain"], res["chain"][1:]))


def test_order_case_a():
    lab = classify(PI, 2, "restrict")
    assert velocity_order_check(predict_packets(PI, 2, "restrict", G, H), lab)["chain"] == [0.0]


@given(etas, st.integers(1, 3), st.sampled_from(["restrict", "average"]))
def test_order_check_holds_everywhere(eta0, k, proj):
    lab = classify(eta0, k, proj)
    velocity_order_check(predict_packets(eta0, k, proj, G, H), lab)


def test_order_check_detects_corruption():
    lab = classify(0.3, 2, "restrict")
    preds = predict_packets(0.3, 2, "restrict", G, H)
    broken = [replace(preds[0], velocity=preds[0].velocity * 1.1)] + preds[1:]
    with pytest.raises(PredictionError):
        velocity_order_check(broken, lab)


def test_report_serialization():
    lab = classify(2 * PI / 3, 1, "restrict")
    rep = prediction_report(predict_packets(2 * PI / 3, 1, "restrict", G, H), lab)
    assert rep["case"]["name"] == "B_ii"
    assert set(rep["packets"][0]) >= {"pick_eta", "velocity", "amplitude_factor", "q2", "case"}


def test_regime_warning_logged(caplog):
    with caplog.at_level(logging.WARNING, logger="bigridlab.predictor"):
        predict_packets(0.1, 0, "none", 1.0, 0.9)
    assert "outside the packet regime" in caplog.text


@pytest.mark.parametrize("eta0, k", [(2 * PI / 3, 1), (2 * PI / 3, 2), (0.3, 2), (PI / 2, 1)])
def test_measured_average_amplitudes_follow_weight_product(eta0, k):
    sc = Scenario("avg", eta0=eta0, k_levels=(k,), projection="average", outputs=("comparison",))
    (res,) = level_results(sc)
    for pred, series in zip(res.predictions, res.packets):
        if pred.amplitude_factor < SURVIVAL_THRESHOLD:
            continue
        assert series["peak_amp"][0] == pytest.approx(pred.amplitude_factor, rel=0.07)
        # and not weight(pick)^2 unless the two coincide
        sq = float(weight(k, pred.pick_eta)) ** 2
        if abs(sq - pred.amplitude_factor) > 0.2 * pred.amplitude_factor:
            assert abs(series["peak_amp"][0] - sq) > 0.07 * sq
