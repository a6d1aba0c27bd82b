"""End-to-end delay expressions for the three compression models.

A device with payload L, local compression speed V_d and effective uplink
rate t*R can (1) compress locally and upload the compressed payload,
(2) upload raw data for cloud compression at speed V_c, or (3) split the
payload: a fraction lam is compressed locally, the rest uploaded raw.
This module evaluates all three, the optimal split lam* (piecewise in
the comparison of t*R against the geometric-mean compression capacity
sqrt(beta * V_d * V_c)), and the simplified split used when the uplink
far outpaces local compression.

Starved resources (t == 0, V_c == 0) yield ``math.inf`` — a distinct
signaled value, never an overflow — so that solvers must treat
zero-allocation devices explicitly.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .scenario import DeviceProfile

INFINITE_DELAY = math.inf

# Branch labels for the pipelining cases: the local-compression stage
# either outlasts the raw upload (device-bound) or not (channel-bound).
DEVICE_BOUND = "device-bound"
CHANNEL_BOUND = "channel-bound"

# Branch labels for the two pieces of the optimized delay: the uplink
# capacity t*R either reaches sqrt(beta*V_d*V_c) (compute-limited piece)
# or falls below it (channel-limited piece).
COMPUTE_LIMITED = "compute-limited"
CHANNEL_LIMITED = "channel-limited"


@dataclass
class Allocation:
    """Decision vector for all devices: time fractions t, cloud capacities
    V_c (bits/s) and, for the partial model, local fractions lam."""

    t: np.ndarray
    v_c: np.ndarray
    lam: np.ndarray | None = None

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.v_c = np.asarray(self.v_c, dtype=float)
        if self.lam is not None:
            self.lam = np.asarray(self.lam, dtype=float)

    @classmethod
    def checked(cls, t, v_c, v_c_total: float, lam=None) -> "Allocation":
        """Construct and validate against the resource budgets."""
        alloc = cls(t, v_c, lam)
        if np.any(alloc.t < 0.0):
            raise ValidationError("t entries must be >= 0")
        if float(alloc.t.sum()) > 1.0 + 1e-9:
            raise ValidationError(f"sum(t) = {alloc.t.sum()} exceeds 1")
        if np.any(alloc.v_c < 0.0):
            raise ValidationError("v_c entries must be >= 0")
        if float(alloc.v_c.sum()) > v_c_total * (1.0 + 1e-9):
            raise ValidationError(
                f"sum(v_c) = {alloc.v_c.sum()} exceeds the budget {v_c_total}")
        if alloc.lam is not None and (np.any(alloc.lam < -1e-12)
                                      or np.any(alloc.lam > 1.0 + 1e-12)):
            raise ValidationError("lam entries must lie in [0, 1]")
        return alloc


@dataclass(frozen=True)
class DelayBreakdown:
    """The four component delays, the end-to-end total and the pipelining
    branch taken. Unused components are zero."""

    comp_d: float
    tran_d: float
    tran_c: float
    comp_c: float
    total: float
    branch: str


def _check_nonnegative(name, value):
    if value < 0.0 or not math.isfinite(value):
        raise ValidationError(f"{name} must be finite and >= 0, got {value}")


def local_delay(dev: DeviceProfile, beta: float, t_k: float) -> float:
    """All-local model: L/V_d + beta*L/(t*R). Returns inf when t_k == 0."""
    _check_nonnegative("t_k", t_k)
    payload = dev.data_size_bits
    if t_k == 0.0:
        return INFINITE_DELAY
    return payload / dev.local_capacity_bps + beta * payload / (t_k * dev.rate)


def edge_delay(dev: DeviceProfile, t_k: float, v_ck: float) -> float:
    """All-cloud model: L/(t*R) + L/V_c. Returns inf when either is zero."""
    _check_nonnegative("t_k", t_k)
    _check_nonnegative("v_ck", v_ck)
    payload = dev.data_size_bits
    if t_k == 0.0 or v_ck == 0.0:
        return INFINITE_DELAY
    return payload / (t_k * dev.rate) + payload / v_ck


def partial_delay(dev: DeviceProfile, beta: float, t_k: float, v_ck: float,
                  lam: float) -> DelayBreakdown:
    """Split model: fraction lam compressed locally, 1-lam uploaded raw.

    The single uplink serializes the two transmissions. When the local
    compression stage outlasts the raw upload the total is
    max(comp_d + tran_d, tran_c + comp_c); otherwise the compressed-part
    upload must queue behind the raw upload and the total is
    tran_c + max(tran_d, comp_c).

    lam == 1 reproduces local_delay and lam == 0 reproduces edge_delay
    bit-for-bit. v_ck may be 0 only when lam == 1; otherwise the result
    carries the infinite-delay signal.
    """
    _check_nonnegative("t_k", t_k)
    _check_nonnegative("v_ck", v_ck)
    if not (0.0 <= lam <= 1.0):
        raise ValidationError(f"lam must lie in [0, 1], got {lam}")
    payload = dev.data_size_bits
    comp_d = lam * payload / dev.local_capacity_bps
    if t_k == 0.0:
        tran_d = INFINITE_DELAY if lam > 0.0 else 0.0
        tran_c = INFINITE_DELAY if lam < 1.0 else 0.0
    else:
        tran_d = beta * lam * payload / (t_k * dev.rate)
        tran_c = (1.0 - lam) * payload / (t_k * dev.rate)
    if lam == 1.0:
        comp_c = 0.0
    else:
        comp_c = (1.0 - lam) * payload / v_ck if v_ck > 0.0 else INFINITE_DELAY
    if comp_d >= tran_c:
        total = max(comp_d + tran_d, tran_c + comp_c)
        branch = DEVICE_BOUND
    else:
        total = tran_c + max(tran_d, comp_c)
        branch = CHANNEL_BOUND
    return DelayBreakdown(comp_d, tran_d, tran_c, comp_c, total, branch)


def _require_positive_inputs(dev, t_k, v_ck):
    if t_k <= 0.0 or not math.isfinite(t_k):
        raise ValidationError(f"t_k must be positive, got {t_k}")
    if v_ck <= 0.0 or not math.isfinite(v_ck):
        raise ValidationError(f"v_ck must be positive, got {v_ck}")
    return dev.data_size_bits, dev.local_capacity_bps, dev.rate


def optimal_lambda(dev: DeviceProfile, beta: float, t_k: float, v_ck: float) -> float:
    """Delay-minimal split fraction for fixed (t_k, v_ck).

    When the uplink capacity s = t*R reaches the geometric-mean
    compression capacity sqrt(beta*V_d*V_c), the compute path is the
    bottleneck and the split balances the two pipelines; below it, the
    uplink is the bottleneck and lam* = V_d / (V_d + s).
    """
    payload, w, r = _require_positive_inputs(dev, t_k, v_ck)
    s = t_k * r
    if s >= math.sqrt(beta * w * v_ck):
        return w * (s + v_ck) / (w * v_ck * (1.0 + beta) + s * (w + v_ck))
    return w / (w + s)


def optimal_partial_delay(dev: DeviceProfile, beta: float, t_k: float,
                          v_ck: float) -> tuple[float, str, float]:
    """End-to-end delay at the optimal split for fixed (t_k, v_ck).

    Returns (delay, branch, lam*), where branch records the piece taken:
    COMPUTE_LIMITED when t*R >= sqrt(beta*V_d*V_c) (inclusive), else
    CHANNEL_LIMITED. At the boundary both pieces agree, so the choice is
    observable only through the branch label.
    """
    payload, w, r = _require_positive_inputs(dev, t_k, v_ck)
    s = t_k * r
    lam = optimal_lambda(dev, beta, t_k, v_ck)
    if s >= math.sqrt(beta * w * v_ck):
        d_hat = (payload / s) * (s + v_ck) * (s + beta * w) / (
            w * v_ck * (1.0 + beta) + s * (w + v_ck))
        return d_hat, COMPUTE_LIMITED, lam
    d_hat = (payload / s) * (s + beta * w) / (w + s)
    return d_hat, CHANNEL_LIMITED, lam


def special_case(dev: DeviceProfile, t_k: float, v_ck: float) -> tuple[float, float]:
    """Optimal split and delay when the compressed-part upload time is
    negligible (uplink much faster than local compression).

    Here the optimum balances local compression exactly against the raw
    upload plus cloud compression:
        lam * L / V_d = (1-lam) * L / (t*R) + (1-lam) * L / V_c,
    giving lam_bar = V_d (s + V_c) / (V_d V_c + s (V_d + V_c)) and delay
    L (s + V_c) / (V_d V_c + s (V_d + V_c)) with s = t*R.

    Accepts t_k = 0 or v_ck = 0 (one resource absent): t*R = 0 yields
    all-local (lam_bar = 1, delay L/V_d). Both zero is the starved case
    and returns (1.0, inf).
    """
    _check_nonnegative("t_k", t_k)
    _check_nonnegative("v_ck", v_ck)
    payload, w, r = dev.data_size_bits, dev.local_capacity_bps, dev.rate
    s = t_k * r
    denom = w * v_ck + s * (w + v_ck)
    if denom == 0.0:
        return 1.0, INFINITE_DELAY
    lam_bar = w * (s + v_ck) / denom
    d_bar = payload * (s + v_ck) / denom
    return lam_bar, d_bar
