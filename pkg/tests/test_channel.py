import math

import mpmath
import numpy as np
import pytest

from mecolat import (ChannelStats, expected_rate, instantaneous_rate, mean_snr,
                     simulate_transmission)
from mecolat.channel import transmit_once
from mecolat.rng import stream
from mecolat.scenario import dbm_to_watts


def test_mean_snr_unit_case():
    assert mean_snr(1.0, 1.0, 4.0, 1.0, 1.0) == 1.0


def test_mean_snr_pathloss_scaling():
    assert mean_snr(1.0, 10.0, 4.0, 1.0, 1.0) == pytest.approx(1e-4, rel=1e-12)


def test_mean_snr_reference_parameters():
    # 24 dBm at 100 m, exponent 4, -174 dBm/Hz over 10 MHz:
    # 0.2512 W * 1e-8 / 3.981e-14 W, evaluated independently here.
    expected = (10 ** 2.4 * 1e-3) * 100.0 ** -4 / (10 ** -20.4 * 1e7)
    got = mean_snr(dbm_to_watts(24.0), 100.0, 4.0, dbm_to_watts(-174.0), 1e7)
    assert got == pytest.approx(expected, rel=1e-12)
    assert got == pytest.approx(6.3096e4, rel=1e-4)


def test_mean_snr_rejects_zero_distance():
    with pytest.raises(ValueError, match="distance_m"):
        mean_snr(1.0, 0.0, 4.0, 1.0, 1.0)


@pytest.mark.parametrize("snr,expected", [(0.0, 0.0), (1.0, 1e7), (3.0, 2e7)])
def test_instantaneous_rate(snr, expected):
    assert instantaneous_rate(snr, 1e7) == pytest.approx(expected, rel=1e-12)


def test_instantaneous_rate_rejects_negative_snr():
    with pytest.raises(ValueError, match="snr_draw"):
        instantaneous_rate(-0.1, 1e7)


def test_expected_rate_zero_snr():
    assert expected_rate(ChannelStats(0.0, 1e7)) == 0.0


def test_expected_rate_quadrature_matches_exponential_integral():
    # Independent high-precision closed form: (B/ln2) e^{1/g} E1(1/g).
    mpmath.mp.dps = 40
    for gbar in (1e-3, 0.1, 1.0, 10.0, 1.6e3, 6.31e4, 6.3e8):
        inv = mpmath.mpf(1) / mpmath.mpf(gbar)
        truth = float(1e7 / mpmath.log(2) * mpmath.e1(inv) * mpmath.exp(inv))
        got = expected_rate(ChannelStats(gbar, 1e7))
        assert got == pytest.approx(truth, rel=1e-8), gbar


def test_expected_rate_monte_carlo_close_to_quadrature():
    stats = ChannelStats(6.31e4, 1e7)
    quad = expected_rate(stats)
    mc = expected_rate(stats, method="monte_carlo", seed=1, samples=1_000_000)
    assert abs(mc - quad) / quad <= 3e-3


def test_expected_rate_monte_carlo_needs_samples():
    with pytest.raises(ValueError, match="samples"):
        expected_rate(ChannelStats(1.0, 1e7), method="monte_carlo", samples=0)


def test_expected_rate_monotone_in_snr_and_linear_in_bandwidth():
    rates = [expected_rate(ChannelStats(g, 1e7))
             for g in (0.1, 1.0, 10.0, 100.0, 1e4)]
    assert all(a < b for a, b in zip(rates, rates[1:]))
    double = expected_rate(ChannelStats(10.0, 2e7))
    assert double == pytest.approx(2 * expected_rate(ChannelStats(10.0, 1e7)),
                                   rel=1e-12)


def test_expected_rate_jensen_bound():
    for g in (0.5, 5.0, 500.0):
        stats = ChannelStats(g, 1e7)
        assert expected_rate(stats) <= instantaneous_rate(g, 1e7)


def test_transmission_deterministic_channel_exact():
    stats = ChannelStats(3.0, 1e7)  # rate = 2e7 bits/s
    elapsed = simulate_transmission(1e8, 0.5, stats, slot_len=0.01, seed=0,
                                    trials=1, fading="none")
    assert elapsed == pytest.approx(1e8 / (0.5 * 2e7), rel=1e-12)


def test_transmission_zero_payload():
    assert simulate_transmission(0.0, 0.5, ChannelStats(1.0, 1e7), 0.01, 0, 1) == 0.0


def test_transmission_zero_fraction_rejected():
    with pytest.raises(ValueError, match="never completes"):
        simulate_transmission(1e6, 0.0, ChannelStats(1.0, 1e7), 0.01, 0, 1)


def test_transmission_trace_invariant():
    stats = ChannelStats(100.0, 1e7)
    trace = transmit_once(1e7, 0.5, stats, 0.01, stream("transmission", 0, 0))
    assert trace.bits_sent >= 1e7
    assert trace.elapsed <= trace.slots_used * 0.01


def test_transmission_matches_fluid_identity():
    # Rayleigh fading, small slots: mean elapsed within 1% of bits/(t R).
    stats = ChannelStats(1.6e3, 1e7)
    rate = expected_rate(stats)
    bits, frac = 1e8, 0.5
    slot = bits / (frac * rate) / 400.0
    mean_elapsed = simulate_transmission(bits, frac, stats, slot, seed=4,
                                         trials=3000)
    assert abs(mean_elapsed - bits / (frac * rate)) / (bits / (frac * rate)) < 0.01
