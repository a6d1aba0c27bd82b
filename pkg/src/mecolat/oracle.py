"""Independent brute-force verifiers.

oracle_lambda re-minimizes the raw pipeline delay over a dense split
grid (no closed forms involved), oracle_allocation exhaustively
minimizes the weighted delay over the active-constraint simplices for
K <= 3, and kkt_residuals measures how far an allocation sits from the
stationarity/feasibility/slackness conditions of its model.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import delay
from .errors import ValidationError
from .scenario import DeviceProfile, Scenario


@dataclass(frozen=True)
class GridSpec:
    resolution: int = 1001
    bounds: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        if self.resolution < 2:
            raise ValidationError(f"resolution must be >= 2, got {self.resolution}")
        if not self.bounds[1] > self.bounds[0]:
            raise ValidationError(f"empty grid bounds {self.bounds}")


def _as_grid(grid) -> GridSpec:
    if isinstance(grid, GridSpec):
        return grid
    return GridSpec(resolution=int(grid))


def lambda_delay_curve(device: DeviceProfile, beta: float, t: float, v_c: float,
                       grid) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized pipeline delay over a split grid, straight from the
    component-delay definitions (independent of the closed forms)."""
    spec = _as_grid(grid)
    lams = np.linspace(spec.bounds[0], spec.bounds[1], spec.resolution)
    payload, w, r = device.data_size_bits, device.local_capacity_bps, device.rate
    comp_d = lams * payload / w
    tran_d = beta * lams * payload / (t * r)
    tran_c = (1.0 - lams) * payload / (t * r)
    comp_c = (1.0 - lams) * payload / v_c
    totals = np.where(comp_d >= tran_c,
                      np.maximum(comp_d + tran_d, tran_c + comp_c),
                      tran_c + np.maximum(tran_d, comp_c))
    return lams, totals


def oracle_lambda(device: DeviceProfile, beta: float, t: float, v_c: float,
                  grid=100_001) -> float:
    """Grid argmin of the pipeline delay over the split fraction."""
    lams, totals = lambda_delay_curve(device, beta, t, v_c, grid)
    return float(lams[int(np.argmin(totals))])


def _dhat_terms(dev: DeviceProfile, beta: float, t, v):
    """Optimal-split delay on arrays of (t, v), as max of the two pieces."""
    payload, w, r = dev.data_size_bits, dev.local_capacity_bps, dev.rate
    s = t * r
    d1 = payload / s * (s + v) * (s + beta * w) / (
        w * v * (1.0 + beta) + s * (w + v))
    d2 = payload / s * (s + beta * w) / (w + s)
    return np.maximum(d1, d2)


def oracle_allocation(scenario: Scenario, grid=201, refine_stages: int = 3
                      ) -> tuple[delay.Allocation, float]:
    """Exhaustive minimum of the weighted optimal-split delay over the
    active-constraint simplices sum(t) = 1, sum(V) = V_total.

    Restricting to the active constraints is justified because every
    delay expression strictly decreases in both resources (asserted as a
    property test). Cost grows as resolution^(2K-2); K <= 3 only.
    Coarse-to-local refinement sharpens the effective resolution.
    """
    n = scenario.n_devices
    if n > 3:
        raise ValidationError(f"oracle_allocation supports K <= 3, got K={n}")
    spec = _as_grid(grid)
    v_total = scenario.params.cloud_capacity_bps
    beta = scenario.params.compression_ratio
    devs = scenario.devices
    alpha = np.array([d.weight for d in devs])

    if n == 1:
        t = np.array([1.0])
        v = np.array([v_total])
        f_min = float(alpha[0] * _dhat_terms(devs[0], beta, t, v)[0])
        lam = np.array([delay.optimal_lambda(devs[0], beta, 1.0, v_total)])
        return delay.Allocation.checked(t, v, v_total, lam), f_min

    res = spec.resolution
    eps_t, eps_v = 1e-4, 1e-4 * v_total
    if n == 2:
        boxes = [(eps_t, 1.0 - eps_t), (eps_v, v_total - eps_v)]
        best = (math.inf, None)
        for _ in range(refine_stages):
            t1 = np.linspace(*boxes[0], res)
            v1 = np.linspace(*boxes[1], res)
            tt, vv = np.meshgrid(t1, v1, indexing="ij")
            f = (alpha[0] * _dhat_terms(devs[0], beta, tt, vv)
                 + alpha[1] * _dhat_terms(devs[1], beta, 1.0 - tt, v_total - vv))
            i, j = np.unravel_index(int(np.argmin(f)), f.shape)
            if f[i, j] < best[0]:
                best = (float(f[i, j]), (float(t1[i]), float(v1[j])))
            dt, dv = t1[1] - t1[0], v1[1] - v1[0]
            boxes = [(max(eps_t, t1[i] - 2 * dt), min(1 - eps_t, t1[i] + 2 * dt)),
                     (max(eps_v, v1[j] - 2 * dv),
                      min(v_total - eps_v, v1[j] + 2 * dv))]
        f_min, (t1b, v1b) = best
        t = np.array([t1b, 1.0 - t1b])
        v = np.array([v1b, v_total - v1b])
    else:
        res3 = min(res, 41)
        boxes = [(eps_t, 1.0 - eps_t), (eps_t, 1.0 - eps_t),
                 (eps_v, v_total - eps_v), (eps_v, v_total - eps_v)]
        best = (math.inf, None)
        for _ in range(max(refine_stages, 4)):
            axes = [np.linspace(*boxes[d], res3) for d in range(4)]
            t1, t2, v1, v2 = np.meshgrid(*axes, indexing="ij", sparse=True)
            t3 = 1.0 - t1 - t2
            v3 = v_total - v1 - v2
            valid = (t3 >= eps_t) & (v3 >= eps_v)
            f = (alpha[0] * _dhat_terms(devs[0], beta, t1, v1)
                 + alpha[1] * _dhat_terms(devs[1], beta, t2, v2)
                 + alpha[2] * _dhat_terms(devs[2], beta,
                                          np.maximum(t3, eps_t),
                                          np.maximum(v3, eps_v)))
            f = np.where(valid, f, math.inf)
            idx = np.unravel_index(int(np.argmin(f)), f.shape)
            point = tuple(float(axes[d][idx[d]]) for d in range(4))
            if f[idx] < best[0]:
                best = (float(f[idx]), point)
            new_boxes = []
            for d in range(4):
                step = axes[d][1] - axes[d][0]
                lo = max(boxes[d][0], point[d] - 2 * step)
                hi = min(boxes[d][1], point[d] + 2 * step)
                new_boxes.append((lo, hi))
            boxes = new_boxes
        f_min, (t1b, t2b, v1b, v2b) = best
        t = np.array([t1b, t2b, 1.0 - t1b - t2b])
        v = np.array([v1b, v2b, v_total - v1b - v2b])

    lam = np.array([delay.optimal_lambda(devs[k], beta, float(t[k]), float(v[k]))
                    for k in range(n)])
    return delay.Allocation.checked(t, v, v_total, lam), f_min


@dataclass
class KktReport:
    """Relative residuals of the model's optimality conditions."""

    model: str
    stationarity_spread: dict
    primal_gap_t: float
    primal_gap_v: float | None
    slackness_t: float
    slackness_v: float | None
    active_devices: int
    clipped_ok: bool = True

    @property
    def max_spread(self) -> float:
        return max(self.stationarity_spread.values())


def _spread(values: np.ndarray) -> float:
    mean = float(np.mean(values))
    return float((values.max() - values.min()) / abs(mean))


def kkt_residuals(scenario: Scenario, allocation: delay.Allocation,
                  model: str) -> KktReport:
    """Measure stationarity spread (max-min of the quantity each
    multiplier equalizes over devices with positive allocation), primal
    feasibility gaps and complementary slackness, all relative."""
    alpha = np.array([d.weight for d in scenario.devices])
    sizes = np.array([d.data_size_bits for d in scenario.devices])
    rates = np.array([d.rate for d in scenario.devices])
    caps = np.array([d.local_capacity_bps for d in scenario.devices])
    beta = scenario.params.compression_ratio
    v_total = scenario.params.cloud_capacity_bps
    t = allocation.t
    v = allocation.v_c
    gap_t = float(t.sum()) - 1.0

    if model == "local":
        if np.any(t <= 0):
            raise ValidationError("local-model allocation must have t > 0")
        q = alpha * beta * sizes / (rates * t ** 2)
        spread = {"nu": _spread(q)}
        nu = float(np.mean(q))
        return KktReport(model, spread, gap_t, None, abs(nu * gap_t) / nu,
                         None, active_devices=len(t))

    gap_v = (float(v.sum()) - v_total) / v_total
    if model == "edge":
        if np.any(t <= 0) or np.any(v <= 0):
            raise ValidationError("edge-model allocation must have t, v_c > 0")
        q_t = alpha * sizes / (rates * t ** 2)
        q_v = alpha * sizes / v ** 2
        spread = {"xi": _spread(q_t), "chi": _spread(q_v)}
        return KktReport(model, spread, gap_t, gap_v,
                         abs(gap_t), abs(gap_v), active_devices=len(t))

    if model == "partial-special":
        active = (t > 1e-9) & (v > 1e-9 * v_total)
        if not np.any(active):
            raise ValidationError("allocation has no active devices")
        s = t[active] * rates[active]
        denom = (s * caps[active] + s * v[active] + caps[active] * v[active]) ** 2
        q_theta = alpha[active] * sizes[active] * rates[active] * v[active] ** 2 / denom
        q_omega = alpha[active] * sizes[active] * s ** 2 / denom
        theta = float(np.mean(q_theta))
        omega = float(np.mean(q_omega))
        # Clipped devices must satisfy the inequality branch: the clip
        # condition sqrt(alpha L R / theta) <= V_d (or its omega twin).
        clipped_ok = True
        for k in np.nonzero(~active)[0]:
            a_k = math.sqrt(alpha[k] * sizes[k] * rates[k] / theta) - caps[k]
            c_k = math.sqrt(alpha[k] * sizes[k] / omega) - caps[k]
            if a_k > 0 and c_k > 0 and (max(a_k, 0) * max(c_k, 0)
                                        > caps[k] ** 2 * (1 + 1e-6)):
                clipped_ok = False
        spread = {"theta": _spread(q_theta), "omega": _spread(q_omega)}
        return KktReport(model, spread, gap_t, gap_v, abs(theta * gap_t) / theta,
                         abs(omega * gap_v) / omega,
                         active_devices=int(active.sum()), clipped_ok=clipped_ok)

    raise ValidationError(f"unknown model {model!r} for KKT residuals")
