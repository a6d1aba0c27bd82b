"""TDMA uplink rates under Rayleigh fading.

Provides the per-slot Shannon rate, the long-run average rate
R = E[B log2(1 + snr)] for a unit-mean exponential power fade (the
|h|^2 distribution of unit-variance Rayleigh fading), and a slot-level
simulator that validates the average-transmission-delay identity
D_tran = bits / (t * R).
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .rng import stream

LN2 = math.log(2.0)


@dataclass(frozen=True)
class ChannelStats:
    """Distributional description of one device's uplink.

    Attributes:
        mean_snr: mean linear SNR of the fading channel (>= 0).
        bandwidth_hz: channel bandwidth in Hz (> 0).
    """

    mean_snr: float
    bandwidth_hz: float

    def __post_init__(self):
        if not (self.mean_snr >= 0.0 and math.isfinite(self.mean_snr)):
            raise ValueError(f"mean_snr must be finite and >= 0, got {self.mean_snr}")
        if not (self.bandwidth_hz > 0.0 and math.isfinite(self.bandwidth_hz)):
            raise ValueError(f"bandwidth_hz must be positive, got {self.bandwidth_hz}")


@dataclass(frozen=True)
class TransmissionTrace:
    """Outcome of one simulated upload.

    ``slots_used`` counts whole frames touched, ``elapsed`` credits the
    final partial slot fractionally (fluid model), and ``bits_sent``
    accumulates whole-slot deliveries, so bits_sent >= the target payload.
    """

    slots_used: int
    elapsed: float
    bits_sent: float


def mean_snr(tx_power_w: float, distance_m: float, pathloss_exp: float,
             noise_density_w_hz: float, bandwidth_hz: float) -> float:
    """Mean linear SNR p * d^-n / (N0 * B) for a device at distance d."""
    for name, val in (("tx_power_w", tx_power_w), ("distance_m", distance_m),
                      ("pathloss_exp", pathloss_exp),
                      ("noise_density_w_hz", noise_density_w_hz),
                      ("bandwidth_hz", bandwidth_hz)):
        if not (val > 0.0 and math.isfinite(val)):
            raise ValueError(f"{name} must be positive, got {val}")
    return tx_power_w * distance_m ** (-pathloss_exp) / (noise_density_w_hz * bandwidth_hz)


def instantaneous_rate(snr_draw: float, bandwidth_hz: float) -> float:
    """Per-slot achievable rate B * log2(1 + snr) in bits/s."""
    if snr_draw < 0.0:
        raise ValueError(f"snr_draw must be >= 0, got {snr_draw}")
    return bandwidth_hz * math.log1p(snr_draw) / LN2


def expected_rate(stats: ChannelStats, method: str = "quadrature",
                  seed: int = 0, samples: int = 1_000_000) -> float:
    """Average rate R = E[B log2(1 + gbar * X)], X ~ Exp(1).

    Args:
        stats: channel description.
        method: "quadrature" (deterministic, adaptive panel integration
            against the exponential density) or "monte_carlo"
            (deterministic per seed).
        seed: stream seed for the Monte Carlo estimator.
        samples: Monte Carlo sample count (>= 1).

    Returns:
        R in bits/s.
    """
    gbar = stats.mean_snr
    if gbar == 0.0:
        return 0.0
    if method == "quadrature":
        return _rate_quadrature(gbar, stats.bandwidth_hz)
    if method == "monte_carlo":
        if samples <= 0:
            raise ValueError(f"samples must be >= 1, got {samples}")
        g = stream("channel", seed)
        x = g.standard_exponential(int(samples))
        return stats.bandwidth_hz * float(np.mean(np.log1p(gbar * x))) / LN2
    raise ValueError(f"unknown method {method!r}")


def _rate_quadrature(gbar: float, bandwidth_hz: float) -> float:
    # Split at the log1p knee (x ~ 1/gbar) so the adaptive panels resolve
    # both the near-zero curvature and the exponential tail.
    f = lambda x: math.log1p(gbar * x) * math.exp(-x)
    brk = min(1.0 / gbar, 1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        head, _ = integrate.quad(f, 0.0, brk, epsabs=0.0, epsrel=1e-12, limit=200)
        tail, _ = integrate.quad(f, brk, np.inf, epsabs=0.0, epsrel=1e-12, limit=200)
    return bandwidth_hz * (head + tail) / LN2


def transmit_once(bits: float, slot_fraction: float, stats: ChannelStats,
                  slot_len: float, rng: np.random.Generator,
                  fading: str = "rayleigh") -> TransmissionTrace:
    """Simulate one upload of ``bits`` and return its trace.

    Each frame of length ``slot_len`` delivers slot_fraction * slot_len *
    r(i) bits at the i.i.d. per-slot rate r(i); the final partial slot is
    credited fractionally.
    """
    if bits == 0.0:
        return TransmissionTrace(slots_used=0, elapsed=0.0, bits_sent=0.0)
    gbar, bw = stats.mean_snr, stats.bandwidth_hz
    if fading == "none":
        per_frame = slot_fraction * slot_len * instantaneous_rate(gbar, bw)
        frames = bits / per_frame
        whole = int(math.ceil(frames))
        return TransmissionTrace(slots_used=whole, elapsed=frames * slot_len,
                                 bits_sent=whole * per_frame)
    if fading != "rayleigh":
        raise ValueError(f"unknown fading model {fading!r}")
    mean_per_frame = slot_fraction * slot_len * expected_rate(stats)
    block = max(int(bits / mean_per_frame * 1.25) + 16, 32)
    cum = 0.0
    frames_done = 0
    while True:
        draws = rng.standard_exponential(block)
        chunk = slot_fraction * slot_len * bw / LN2 * np.log1p(gbar * draws)
        csum = cum + np.cumsum(chunk)
        idx = int(np.searchsorted(csum, bits))
        if idx < len(csum):
            prev = csum[idx - 1] if idx > 0 else cum
            frac = (bits - prev) / chunk[idx]
            frames = frames_done + idx + frac
            return TransmissionTrace(slots_used=frames_done + idx + 1,
                                     elapsed=frames * slot_len,
                                     bits_sent=float(csum[idx]))
        cum = float(csum[-1])
        frames_done += block


def simulate_transmission(bits: float, slot_fraction: float, stats: ChannelStats,
                          slot_len: float, seed: int, trials: int,
                          fading: str = "rayleigh") -> float:
    """Mean elapsed upload time over ``trials`` independent channel draws.

    Used to validate the fluid-model identity mean elapsed -> bits / (t * R)
    as slot_len -> 0 and trials -> inf. Trial i draws from the stream
    ("transmission", seed, i), so trials may be evaluated in parallel.
    """
    if bits < 0.0:
        raise ValueError(f"bits must be >= 0, got {bits}")
    if not (0.0 < slot_fraction <= 1.0):
        raise ValueError(
            f"slot_fraction must be in (0, 1]; got {slot_fraction} "
            "(a zero fraction never completes)")
    if slot_len <= 0.0:
        raise ValueError(f"slot_len must be positive, got {slot_len}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if bits == 0.0:
        return 0.0
    if fading == "none":
        return transmit_once(bits, slot_fraction, stats, slot_len, None, "none").elapsed
    total = 0.0
    for i in range(int(trials)):
        g = stream("transmission", seed, i)
        total += transmit_once(bits, slot_fraction, stats, slot_len, g).elapsed
    return total / trials
