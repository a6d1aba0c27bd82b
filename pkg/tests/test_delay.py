import math

import numpy as np
import pytest

from mecolat import (DeviceProfile, ValidationError, edge_delay, local_delay,
                     optimal_lambda, optimal_partial_delay, partial_delay,
                     special_case)
from mecolat.delay import CHANNEL_LIMITED, COMPUTE_LIMITED
from mecolat.scenario import MBIT, MBPS

BETA = 0.01


def _dev(size=50.0, cap=1.0, rate=10.0):
    return DeviceProfile(weight=1.0, data_size_bits=size * MBIT,
                         local_capacity_bps=cap * MBPS, avg_rate_bps=rate * MBPS)


def test_local_delay_value():
    # 50 Mbits at 1 Mbps plus 0.5 Mbits at 10 Mbps.
    assert local_delay(_dev(), BETA, 1.0) == pytest.approx(50.05, rel=1e-12)


def test_local_delay_no_compression_payload():
    assert local_delay(_dev(), 1e-300, 1.0) == pytest.approx(50.0)


def test_local_delay_transmission_scales_with_share():
    full = local_delay(_dev(), BETA, 1.0)
    half = local_delay(_dev(), BETA, 0.5)
    assert half - 50.0 == pytest.approx(2 * (full - 50.0), rel=1e-12)


def test_local_delay_starved():
    assert local_delay(_dev(), BETA, 0.0) == math.inf


def test_edge_delay_value():
    assert edge_delay(_dev(), 1.0, 40 * MBPS) == pytest.approx(6.25, rel=1e-12)


def test_edge_delay_limits():
    assert edge_delay(_dev(), 1.0, 1e15) == pytest.approx(5.0, rel=1e-6)
    assert edge_delay(_dev(), 0.0, 40 * MBPS) == math.inf
    assert edge_delay(_dev(), 1.0, 0.0) == math.inf


def test_edge_delay_symmetric_in_roles():
    # L/(tR) + L/V is symmetric under swapping tR with V.
    dev_a = _dev(rate=40.0)
    dev_b = _dev(rate=10.0)
    assert edge_delay(dev_a, 1.0, 10 * MBPS) == pytest.approx(
        edge_delay(dev_b, 1.0, 40 * MBPS), rel=1e-12)


def test_partial_delay_boundary_reductions_bitwise():
    dev = _dev()
    for t, v in ((1.0, 40 * MBPS), (0.37, 3.3e6), (0.05, 1e8)):
        assert partial_delay(dev, BETA, t, v, 1.0).total == local_delay(dev, BETA, t)
        assert partial_delay(dev, BETA, t, v, 0.0).total == edge_delay(dev, t, v)


def test_partial_delay_rejects_bad_lambda():
    with pytest.raises(ValidationError, match="lam"):
        partial_delay(_dev(), BETA, 1.0, 1e6, 1.5)


def test_partial_delay_starved_signals():
    bd = partial_delay(_dev(), BETA, 1.0, 0.0, 0.5)
    assert bd.total == math.inf
    bd = partial_delay(_dev(), BETA, 1.0, 0.0, 1.0)
    assert math.isfinite(bd.total)


def test_optimal_lambda_compute_limited_case():
    # tR = 1 Mbps exceeds sqrt(0.01 * 1 Mbps * 40 Mbps) ~ 0.632 Mbps.
    dev = _dev(rate=10.0)
    lam = optimal_lambda(dev, BETA, 0.1, 40 * MBPS)
    assert lam == pytest.approx(41.0 / 81.4, rel=1e-9)


def test_optimal_lambda_channel_limited_case():
    dev = _dev(rate=5.0)
    lam = optimal_lambda(dev, BETA, 0.1, 40 * MBPS)
    assert lam == pytest.approx(2.0 / 3.0, rel=1e-12)


def test_optimal_lambda_symmetric_identity():
    # tR = V_d makes the channel-limited split exactly one half.
    dev = _dev(cap=1.0, rate=1.0)
    assert optimal_lambda(dev, BETA, 0.5, 1e9) == pytest.approx(
        1e6 / (1e6 + 0.5e6), rel=1e-12)
    dev2 = _dev(cap=0.5, rate=1.0)
    assert optimal_lambda(dev2, BETA, 0.5, 1e9) == pytest.approx(0.5, rel=1e-12)


def test_optimal_lambda_beats_grid(rng=np.random.default_rng (5)):
    # Lemma-1 optimality against a dense grid of the raw pipeline delay.
    for _ in range(25):
        dev = _dev(size=rng.uniform(10, 100), cap=rng.uniform(0.5, 2),
                   rate=rng.uniform(20, 300))
        t = 10.0 ** rng.uniform(-3, 0)
        v = 10.0 ** rng.uniform(5, 8.5)
        lam_star = optimal_lambda(dev, BETA, t, v)
        at_star = partial_delay(dev, BETA, t, v, lam_star).total
        grid = np.linspace(0.0, 1.0, 1001)
        best = min(partial_delay(dev, BETA, t, v, lam).total for lam in grid)
        assert at_star <= best * (1 + 1e-9)


def test_optimal_partial_delay_consistent_with_pipeline():
    dev = _dev(rate=10.0)
    d_hat, branch, lam = optimal_partial_delay(dev, BETA, 0.1, 40 * MBPS)
    assert branch == COMPUTE_LIMITED
    assert lam == pytest.approx(0.5037, rel=1e-3)
    assert d_hat == pytest.approx(partial_delay(dev, BETA, 0.1, 40 * MBPS, lam).total,
                                  rel=1e-9)


def test_optimal_partial_delay_matches_max_of_pieces():
    rng = np.random.default_rng(6)
    for _ in range(100):
        dev = _dev(size=rng.uniform(10, 100), cap=rng.uniform(0.5, 2),
                   rate=rng.uniform(20, 300))
        t = 10.0 ** rng.uniform(-3, 0)
        v = 10.0 ** rng.uniform(5, 8.5)
        payload, w, r = dev.data_size_bits, dev.local_capacity_bps, dev.avg_rate_bps
        s = t * r
        d1 = payload / s * (s + v) * (s + BETA * w) / (w * v * (1 + BETA) + s * (w + v))
        d2 = payload / s * (s + BETA * w) / (w + s)
        d_hat, _, _ = optimal_partial_delay(dev, BETA, t, v)
        assert d_hat == pytest.approx(max(d1, d2), rel=1e-12)


def test_optimal_partial_delay_continuous_at_boundary():
    dev = _dev(rate=10.0)
    w, r = dev.local_capacity_bps, dev.avg_rate_bps
    v = 40 * MBPS
    t_star = math.sqrt(BETA * w * v) / r
    d_at, branch, _ = optimal_partial_delay(dev, BETA, t_star, v)
    for eps in (1e-6, 1e-9, 1e-12):
        lo, _, _ = optimal_partial_delay(dev, BETA, t_star * (1 - eps), v)
        hi, _, _ = optimal_partial_delay(dev, BETA, t_star * (1 + eps), v)
        assert lo == pytest.approx(d_at, rel=10 * eps + 1e-12)
        assert hi == pytest.approx(d_at, rel=10 * eps + 1e-12)
    assert branch == COMPUTE_LIMITED  # inclusive boundary


def test_optimal_partial_delay_large_cloud_limit():
    # With enormous V_c the compute-limited piece approaches the
    # channel-limited form evaluated at the same point.
    dev = _dev(rate=300.0)
    t = 0.5
    d_hat, branch, _ = optimal_partial_delay(dev, BETA, t, 1e12)
    assert branch == COMPUTE_LIMITED
    payload, w, r = dev.data_size_bits, dev.local_capacity_bps, dev.avg_rate_bps
    s = t * r
    d2_form = payload / s * (s + BETA * w) / (w + s)
    assert d_hat == pytest.approx(d2_form, rel=1e-3)


def test_special_case_no_channel():
    lam, d_bar = special_case(_dev(), 0.0, 40 * MBPS)
    assert lam == 1.0
    assert d_bar == pytest.approx(50.0, rel=1e-12)


def test_special_case_reference_value():
    dev = _dev(rate=50.0)
    lam, d_bar = special_case(dev, 1.0, 40 * MBPS)
    assert d_bar == pytest.approx(4.5e15 / 2.09e15, rel=1e-9)
    # Eq: lam L / V_d = (1-lam) L / (t R) + (1-lam) L / V_c
    payload, w, r = dev.data_size_bits, dev.local_capacity_bps, dev.avg_rate_bps
    lhs = lam * payload / w
    rhs = (1 - lam) * payload / (1.0 * r) + (1 - lam) * payload / (40 * MBPS)
    assert lhs == pytest.approx(rhs, rel=1e-9)


def test_special_case_balance_identity_random():
    rng = np.random.default_rng(9)
    for _ in range(200):
        dev = _dev(size=rng.uniform(10, 100), cap=rng.uniform(0.5, 2),
                   rate=rng.uniform(20, 300))
        t = 10.0 ** rng.uniform(-3, 0)
        v = 10.0 ** rng.uniform(5, 8.5)
        lam, _ = special_case(dev, t, v)
        payload, w, r = dev.data_size_bits, dev.local_capacity_bps, dev.avg_rate_bps
        lhs = lam * payload / w
        rhs = (1 - lam) * payload / (t * r) + (1 - lam) * payload / v
        assert abs(lhs - rhs) / lhs <= 1e-12


def test_special_case_is_beta_to_zero_limit():
    dev = _dev(rate=10.0)
    lam_bar, _ = special_case(dev, 0.1, 40 * MBPS)
    lam_beta0 = optimal_lambda(dev, 1e-14, 0.1, 40 * MBPS)
    assert lam_beta0 == pytest.approx(lam_bar, rel=1e-9)


def test_special_case_starved_signals_infinite():
    lam, d_bar = special_case(_dev(), 0.0, 0.0)
    assert lam == 1.0 and d_bar == math.inf
