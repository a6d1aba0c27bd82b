"""Closed-form optimal allocations.

Local model: the time shares follow the square-root rule
t_k* ∝ sqrt(alpha_k L_k / R_k), which equalizes the marginal value of
uplink time across devices. Edge model: the same time shares plus cloud
capacity shares V_k* ∝ sqrt(alpha_k L_k). Both minimum system delays
have closed forms, evaluated here via the full double sum so the tests
can cross-check against per-device delay summation independently.

The adequate-uplink special case of the partial model is solved by a
Lagrange-dual search: for trial multipliers (theta, omega) the coupled
stationarity equations

    t_k = V_k (sqrt(alpha_k L_k R_k / theta) - V_d)^+ / (R_k (V_d + V_k))
    V_k = t_k R_k (sqrt(alpha_k L_k / omega) - V_d)^+ / (t_k R_k + V_d)

are solved per device by a damped fixed point, and (theta, omega) are
driven to the active budgets sum(t) = 1, sum(V) = V_total by nested
bracketed root searches on the (empirically monotone) residuals.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import delay
from .errors import BracketingError, ConvergenceError, ValidationError
from .scenario import Scenario
from .subgradient import SolverReport

_FP_DAMPING = 0.5
_FP_TOL = 1e-12
_FP_MAX_ITERS = 500
_BRACKET_SCALE = 1e3
_BRACKET_EXPANSIONS = 40


@dataclass(frozen=True)
class DualState:
    """Optimal multipliers and the achieved constraint residuals."""

    theta: float
    omega: float
    residual_t: float
    residual_v: float


def _gather(scenario: Scenario):
    alpha = np.array([d.weight for d in scenario.devices])
    sizes = np.array([d.data_size_bits for d in scenario.devices])
    rates = np.array([d.rate for d in scenario.devices])
    caps = np.array([d.local_capacity_bps for d in scenario.devices])
    return alpha, sizes, rates, caps


def _exact_sum(values: np.ndarray, target: float) -> np.ndarray:
    """Nudge the last element so fsum(values) equals target exactly."""
    out = values.copy()
    for _ in range(4):
        residual = target - math.fsum(out)
        if residual == 0.0:
            return out
        out[-1] += residual
    return out


def _sqrt_shares(alpha, sizes, rates):
    w = np.sqrt(alpha * sizes / rates)
    return _exact_sum(w / w.sum(), 1.0)


def solve_local(scenario: Scenario) -> tuple[delay.Allocation, float]:
    """Optimal time shares and minimum system delay for the local model.

    The returned shares sum to 1 exactly (last element by complement).
    The closed-form delay is cross-checked against the summed per-device
    delays before returning.
    """
    alpha, sizes, rates, caps = _gather(scenario)
    beta = scenario.params.compression_ratio
    t = _sqrt_shares(alpha, sizes, rates)
    # Double-sum form, kept distinct from the squared-sum shortcut so the
    # summed per-device route stays an independent check.
    root = np.sqrt(alpha * sizes / rates)
    d_sys = float(np.sum(alpha * sizes / caps) + beta * np.sum(np.outer(root, root)))
    direct = math.fsum(
        dev.weight * delay.local_delay(dev, beta, float(t[k]))
        for k, dev in enumerate(scenario.devices))
    if abs(direct - d_sys) > 1e-9 * d_sys:
        raise ConvergenceError(
            f"closed-form delay {d_sys} disagrees with direct summation {direct}")
    alloc = delay.Allocation.checked(t, np.zeros_like(t),
                                     scenario.params.cloud_capacity_bps)
    return alloc, d_sys


def solve_edge(scenario: Scenario) -> tuple[delay.Allocation, float]:
    """Optimal time and cloud-capacity shares for the edge model.

    Both budgets are spent exactly; the closed-form delay is
    cross-checked against the summed per-device delays.
    """
    if scenario.params.cloud_capacity_bps <= 0:
        raise ValidationError("cloud_capacity_bps must be positive")
    alpha, sizes, rates, _ = _gather(scenario)
    v_total = scenario.params.cloud_capacity_bps
    t = _sqrt_shares(alpha, sizes, rates)
    w = np.sqrt(alpha * sizes)
    v_c = _exact_sum(w / w.sum() * v_total, v_total)
    root = np.sqrt(alpha * sizes)
    inv = 1.0 / np.sqrt(rates)
    d_sys = float(np.sum(np.outer(root, root)
                         * (np.outer(inv, inv) + 1.0 / v_total)))
    direct = math.fsum(
        dev.weight * delay.edge_delay(dev, float(t[k]), float(v_c[k]))
        for k, dev in enumerate(scenario.devices))
    if abs(direct - d_sys) > 1e-9 * d_sys:
        raise ConvergenceError(
            f"closed-form delay {d_sys} disagrees with direct summation {direct}")
    alloc = delay.Allocation.checked(t, v_c, v_total)
    return alloc, d_sys


def _special_objective(alpha, sizes, rates, caps, t, v) -> float:
    """Weighted simplified-split system delay; devices starved of both
    resources degrade to all-local compression (delay L / V_d)."""
    s = t * rates
    denom = caps * v + s * (caps + v)
    d_bar = np.where(denom > 0.0, sizes * (s + v) / np.where(denom > 0, denom, 1.0),
                     sizes / caps)
    return float(np.sum(alpha * d_bar))


class _FixedPoint:
    """Damped fixed point of the per-device stationarity equations,
    warm-started across multiplier evaluations."""

    def __init__(self, alpha, sizes, rates, caps, v_total):
        self.alpha, self.sizes, self.rates, self.caps = alpha, sizes, rates, caps
        self.v_total = v_total
        n = len(sizes)
        self.t = np.full(n, 1.0 / n)
        self.v = np.full(n, v_total / n)
        self.evals = 0

    def solve_at(self, theta: float, omega: float,
                 max_iters: int = _FP_MAX_ITERS, strict: bool = False):
        a = np.maximum(np.sqrt(self.alpha * self.sizes * self.rates / theta)
                       - self.caps, 0.0)
        c = np.maximum(np.sqrt(self.alpha * self.sizes / omega) - self.caps, 0.0)
        # A zero warm start sits exactly on the repelling fixed point; lift it.
        t = np.maximum(self.t, 1e-12)
        v = np.maximum(self.v, 1e-12 * self.v_total)
        converged = False
        for _ in range(max_iters):
            t_hat = v * a / (self.rates * (self.caps + v))
            v_hat = t_hat * self.rates * c / (t_hat * self.rates + self.caps)
            t_next = t + _FP_DAMPING * (t_hat - t)
            v_next = v + _FP_DAMPING * (v_hat - v)
            gap = max(float(np.max(np.abs(t_next - t))),
                      float(np.max(np.abs(v_next - v))) / self.v_total)
            t, v = t_next, v_next
            if gap <= _FP_TOL:
                converged = True
                break
        if strict and not converged:
            raise ConvergenceError(
                "the per-device fixed point did not converge at the optimal "
                "multipliers; use the sub-gradient solver for this instance")
        self.t, self.v = t, v
        self.evals += 1
        return t, v


def solve_partial_special(scenario: Scenario, tol: float = 1e-9
                          ) -> tuple[delay.Allocation, DualState, SolverReport]:
    """Closed-form partial-offloading solver for the adequate-uplink regime.

    Finds multipliers (theta, omega) activating both budgets to within
    tol and fills the per-device splits from the balance rule. The
    reported objective is the simplified-split system delay this model
    optimizes; in its intended regime (uplink far outpacing local
    compression) it coincides with the full pipeline objective to well
    under a percent, making it directly comparable with the sub-gradient
    solver's. Devices clipped to zero allocation fall back to all-local
    compression and report delay L / V_d.
    """
    if not tol > 0:
        raise ValidationError(f"tol must be positive, got {tol}")
    alpha, sizes, rates, caps = _gather(scenario)
    v_total = scenario.params.cloud_capacity_bps
    fp = _FixedPoint(alpha, sizes, rates, caps, v_total)
    history = []

    omega_seed = alpha * sizes / caps ** 2
    theta_seed = omega_seed * rates

    def find_omega(theta: float) -> float | None:
        """Inner search: omega with sum(V) = V_total, or None if the
        device set cannot absorb the budget at this theta."""
        lo = float(omega_seed.min()) / _BRACKET_SCALE
        hi = float(omega_seed.max()) * _BRACKET_SCALE
        sum_lo = float(fp.solve_at(theta, lo)[1].sum())
        for _ in range(_BRACKET_EXPANSIONS):
            if sum_lo > v_total:
                break
            lo *= 1e-2
            sum_lo = float(fp.solve_at(theta, lo)[1].sum())
        else:
            return None
        sum_hi = float(fp.solve_at(theta, hi)[1].sum())
        for _ in range(_BRACKET_EXPANSIONS):
            if sum_hi < v_total:
                break
            hi *= 1e2
            sum_hi = float(fp.solve_at(theta, hi)[1].sum())
        else:
            raise BracketingError(
                "cloud-capacity constraint cannot be deactivated: sum(V) stays "
                f"above the budget for omega up to {hi:.3e}",
                residuals={"residual_v": (sum_hi - v_total) / v_total})
        if not (sum_lo > v_total > sum_hi):
            raise BracketingError(
                "sum(V) is not monotone decreasing across the omega bracket",
                residuals={"sum_lo": sum_lo, "sum_hi": sum_hi})
        f = lambda lw: float(fp.solve_at(theta, math.exp(lw))[1].sum()) - v_total
        log_omega = brentq(f, math.log(lo), math.log(hi), xtol=1e-13, rtol=1e-15)
        return math.exp(log_omega)

    def sum_t_at(theta: float) -> tuple[float, float | None]:
        omega = find_omega(theta)
        if omega is None:
            return 0.0, None
        t, v = fp.solve_at(theta, omega)
        history.append(_special_objective(alpha, sizes, rates, caps, t, v))
        return float(t.sum()), omega

    lo = float(theta_seed.min()) / _BRACKET_SCALE
    hi = float(theta_seed.max()) * _BRACKET_SCALE
    sum_lo, _ = sum_t_at(lo)
    for _ in range(_BRACKET_EXPANSIONS):
        if sum_lo > 1.0:
            break
        lo *= 1e-2
        sum_lo, _ = sum_t_at(lo)
    else:
        raise BracketingError(
            "time constraint cannot be activated: sum(t) stays below 1 for "
            f"theta down to {lo:.3e}", residuals={"residual_t": sum_lo - 1.0})
    sum_hi, _ = sum_t_at(hi)
    for _ in range(_BRACKET_EXPANSIONS):
        if sum_hi < 1.0:
            break
        hi *= 1e2
        sum_hi, _ = sum_t_at(hi)
    else:
        raise BracketingError(
            "time constraint cannot be deactivated: sum(t) stays above 1 for "
            f"theta up to {hi:.3e}", residuals={"residual_t": sum_hi - 1.0})
    if not (sum_lo > 1.0 > sum_hi):
        raise BracketingError(
            "sum(t) is not monotone decreasing across the theta bracket",
            residuals={"sum_lo": sum_lo, "sum_hi": sum_hi})

    g = lambda lt: sum_t_at(math.exp(lt))[0] - 1.0
    log_theta = brentq(g, math.log(lo), math.log(hi), xtol=1e-13, rtol=1e-15)
    theta = math.exp(log_theta)
    omega = find_omega(theta)
    if omega is None:
        raise BracketingError("no feasible omega at the optimal theta",
                              residuals={"theta": theta})
    t, v = fp.solve_at(theta, omega, max_iters=4 * _FP_MAX_ITERS, strict=True)

    residual_t = float(t.sum()) - 1.0
    residual_v = (float(v.sum()) - v_total) / v_total
    if abs(residual_t) > tol or abs(residual_v) > tol:
        raise BracketingError(
            "dual search finished without activating both constraints to "
            f"tolerance {tol}", residuals={"residual_t": residual_t,
                                           "residual_v": residual_v})

    # The (.)^+ clip drives starved devices toward zero; snap them there
    # and keep them all-local (the zero-uplink limit of the split rule).
    clipped = (t <= 1e-9) | (v <= 1e-9 * v_total)
    t = np.where(clipped, 0.0, t)
    v = np.where(clipped, 0.0, v)
    lam = np.ones_like(t)
    for k, dev in enumerate(scenario.devices):
        if not clipped[k]:
            lam[k], _ = delay.special_case(dev, float(t[k]), float(v[k]))
    objective_value = _special_objective(alpha, sizes, rates, caps, t, v)
    alloc = delay.Allocation.checked(t, v, v_total, lam)
    dual = DualState(theta=theta, omega=omega,
                     residual_t=residual_t, residual_v=residual_v)
    report = SolverReport(
        objective_history=np.asarray(history),
        best_objective=objective_value,
        best_x=np.concatenate([alloc.t, alloc.v_c]),
        iterations=fp.evals,
        termination="tolerance",
        subgradient_norm_history=np.asarray([]),
        step_rule="dual-bisection",
    )
    return alloc, dual, report
