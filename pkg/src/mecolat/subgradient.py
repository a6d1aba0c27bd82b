"""Sub-gradient solver for the partial-offloading resource allocation.

Minimizes F(x) = sum_k alpha_k * Dhat_k over x = [t_1..t_K, V_1..V_K]
subject to sum(t) <= 1 and sum(V) <= V_total, where Dhat_k is the
optimal-split delay (a continuous, piecewise convex function that is
nonsmooth on the per-device boundary t_k R_k = sqrt(beta V_d V_c)).

The iteration is x <- x - phi_n g_n, where g_n is the objective
sub-gradient while both sum constraints hold and the violated
constraint's gradient (an "obstacle" direction) otherwise. Step rules:
a diminishing schedule a/(n+1) and the accelerated rule
phi_n = (F - F_best + gamma_n) / ||g||^2 with gamma_n = b/(n+1).

The analytic piecewise derivatives below come from differentiating the
two rational delay pieces with the quotient rule; they are gated by
finite-difference property tests, as are the closed-form Hessian
quantities used by the convexity diagnostics.

Internally the solver works in scaled coordinates (t, V/V_total), both
O(1), which is a pure reparameterization of the same iteration.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import delay
from .errors import SolverError, ValidationError
from .scenario import DeviceProfile, Scenario
from .rng import stream

POSITIVITY_FLOOR = 1e-9

_TERMINATIONS = ("tolerance", "stagnation", "max_iters")


@dataclass(frozen=True)
class SolverConfig:
    """Iteration controls.

    step_scale is the constant a (diminishing) or b (accelerated rule);
    when None it is derived from the instance: b = F(x0) and
    a = 8 F(x0) / ||g(x0)||^2, which keep early steps commensurate with
    the objective landscape. move_cap bounds the per-iteration
    displacement in scaled coordinates so the enormous sub-gradients
    near the positivity floor cannot eject the iterate.
    """

    step_rule: str = "polyak"
    step_scale: float | None = None
    max_iters: int = 200_000
    tol: float = 1e-6
    positivity_floor: float = POSITIVITY_FLOOR
    stagnation_window: int = 200
    move_cap: float = 0.25
    tol_debounce: int = 5

    def __post_init__(self):
        if self.step_rule not in ("polyak", "diminishing"):
            raise ValidationError(f"unknown step_rule {self.step_rule!r}")
        if self.step_scale is not None and not self.step_scale > 0:
            raise ValidationError(f"step_scale must be positive, got {self.step_scale}")
        if self.max_iters < 1:
            raise ValidationError(f"max_iters must be >= 1, got {self.max_iters}")
        if not self.tol > 0:
            raise ValidationError(f"tol must be positive, got {self.tol}")


@dataclass
class SolverReport:
    """Trajectory and outcome of one solve.

    objective_history holds F at every iterate, including the slightly
    infeasible ones the obstacle steps repair; feasible_best_history is
    the non-increasing running best over feasible iterates, whose final
    value best_objective is attained by best_x.
    """

    objective_history: np.ndarray
    best_objective: float
    best_x: np.ndarray
    iterations: int
    termination: str
    subgradient_norm_history: np.ndarray
    step_rule: str
    feasible_best_history: np.ndarray = None


# --- piecewise delay values and derivatives -------------------------------
# Shared notation: s = t * R, W = V_d, V = V_c, P = W V (1+b) + s (W + V).
# Piece 1 (s >= sqrt(b W V)):  D1 = L (s+V)(s+bW) / (s P)
# Piece 2 (s <  sqrt(b W V)):  D2 = L (s+bW) / (s (W+s))


def d1_value(L, W, R, beta, t, V):
    s = t * R
    return L * (s + V) * (s + beta * W) / (s * (W * V * (1 + beta) + s * (W + V)))


def d2_value(L, W, R, beta, t, V=None):
    s = t * R
    return L * (s + beta * W) / (s * (W + s))


def d1_partials(L, W, R, beta, t, V):
    """(dD1/dt, dD1/dV) by the quotient rule on N/M with N = L(s+V)(s+bW),
    M = s P."""
    s = t * R
    P = W * V * (1 + beta) + s * (W + V)
    N = L * (s + V) * (s + beta * W)
    M = s * P
    dN_ds = L * (2 * s + V + beta * W)
    dM_ds = P + s * (W + V)
    d_dt = R * (dN_ds * M - N * dM_ds) / (M * M)
    # N_V = L (s+bW); M_V = s (W(1+b) + s)
    d_dv = (L * (s + beta * W) * M - N * s * (W * (1 + beta) + s)) / (M * M)
    return d_dt, d_dv


def d2_partials(L, W, R, beta, t, V=None):
    """(dD2/dt, 0); the channel-limited piece does not involve V_c."""
    s = t * R
    num = s * (s + W) - s * (s + beta * W) - (s + W) * (s + beta * W)
    d_dt = R * L * num / (s * s * (s + W) ** 2)
    return d_dt, np.zeros_like(np.asarray(d_dt, dtype=float))


def d1_hessian(L, W, R, beta, t, V):
    """(H_tt, H_tV, H_VV) of the compute-limited piece; all positive
    except H_tV, whose sign follows -(V - beta W)."""
    s = t * R
    P = W * V * (1 + beta) + s * (W + V)
    wv = W * V
    h_tt = 2 * L * R * R * (
        beta * (1 + beta) * wv * wv * ((1 + beta) * wv + 3 * s * (W + V))
        + s * s * (W + V) * (3 * beta * wv * (W + V) + s * (beta * W * W + V * V))
    ) / (s ** 3 * P ** 3)
    h_tv = -2 * L * R * W * (V - beta * W) * (s + beta * W) / P ** 3
    h_vv = 2 * L * (s + beta * W) ** 2 * (s + W * (1 + beta)) / P ** 3
    return h_tt, h_tv, h_vv


def d1_hessian_det(L, W, R, beta, t, V):
    """Closed-form determinant H_tt H_VV - H_tV^2 of the piece-1 Hessian."""
    s = t * R
    P = W * V * (1 + beta) + s * (W + V)
    return 4 * L * L * R * R * (s + beta * W) ** 2 * (
        beta * (1 + beta) * W * W * V * ((1 + beta) * W * V + s * (2 * W + 3 * V))
        + s * s * (s * (beta * W * W + V * V)
                   + beta * W * (W * W + 4 * W * V + 3 * V * V))
    ) / (s ** 3 * P ** 5)


def d2_dtt(L, W, R, beta, t, V=None):
    """Second t-derivative of the channel-limited piece (positive)."""
    s = t * R
    return 2 * L * R * R * (s ** 3 + 3 * beta * W * s * s
                            + 3 * beta * W * W * s + beta * W ** 3) / (
        s ** 3 * (s + W) ** 3)


class _Workspace:
    """Vectorized scenario arrays for the solver hot loop."""

    def __init__(self, scenario: Scenario):
        devs = scenario.devices
        self.alpha = np.array([d.weight for d in devs])
        self.L = np.array([d.data_size_bits for d in devs])
        self.W = np.array([d.local_capacity_bps for d in devs])
        self.R = np.array([d.rate for d in devs])
        self.beta = scenario.params.compression_ratio
        self.v_total = scenario.params.cloud_capacity_bps
        self.n = len(devs)

    def branch_mask(self, t, V):
        return t * self.R >= np.sqrt(self.beta * self.W * V)

    def dhat(self, t, V):
        m1 = self.branch_mask(t, V)
        d1 = d1_value(self.L, self.W, self.R, self.beta, t, V)
        d2 = d2_value(self.L, self.W, self.R, self.beta, t)
        return np.where(m1, d1, d2)

    def objective(self, t, V):
        return float(np.sum(self.alpha * self.dhat(t, V)))

    def weighted_subgradient(self, t, V):
        """(g_t, g_V) of sum_k alpha_k Dhat_k; piece 1 chosen at ties."""
        m1 = self.branch_mask(t, V)
        g1t, g1v = d1_partials(self.L, self.W, self.R, self.beta, t, V)
        g2t, _ = d2_partials(self.L, self.W, self.R, self.beta, t)
        g_t = self.alpha * np.where(m1, g1t, g2t)
        g_v = self.alpha * np.where(m1, g1v, 0.0)
        return g_t, g_v


def _split(scenario: Scenario, x) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    n = scenario.n_devices
    if x.shape != (2 * n,):
        raise ValidationError(f"x must have length {2 * n}, got shape {x.shape}")
    t, v = x[:n].copy(), x[n:].copy()
    floor_v = POSITIVITY_FLOOR * scenario.params.cloud_capacity_bps
    if np.any(t < POSITIVITY_FLOOR):
        raise ValidationError("a t entry lies below the positivity floor")
    if np.any(v < floor_v):
        raise ValidationError("a V_c entry lies below the positivity floor")
    return t, v


def objective(scenario: Scenario, x) -> float:
    """Weighted-sum optimal-split delay F at x = [t..., V_c...] (SI units)."""
    t, v = _split(scenario, x)
    beta = scenario.params.compression_ratio
    total = 0.0
    for k, dev in enumerate(scenario.devices):
        d_hat, _, _ = delay.optimal_partial_delay(dev, beta, float(t[k]), float(v[k]))
        total += dev.weight * d_hat
    return total


def subgradient(scenario: Scenario, x) -> np.ndarray:
    """Sub-gradient of F at x, or the violated constraint's obstacle
    direction: (1...1, 0...0) when sum(t) > 1, processed first, else
    (0...0, 1...1) when sum(V_c) exceeds the budget."""
    t, v = _split(scenario, x)
    n = scenario.n_devices
    if float(t.sum()) > 1.0:
        return np.concatenate([np.ones(n), np.zeros(n)])
    if float(v.sum()) > scenario.params.cloud_capacity_bps:
        return np.concatenate([np.zeros(n), np.ones(n)])
    ws = _Workspace(scenario)
    g_t, g_v = ws.weighted_subgradient(t, v)
    return np.concatenate([g_t, g_v])


def solve(scenario: Scenario, config: SolverConfig | None = None,
          x0=None) -> tuple[delay.Allocation, SolverReport]:
    """Run the sub-gradient iteration and return the best feasible iterate.

    x0 may be an Allocation or a length-2K vector in SI units; it must be
    feasible. The default start is the strictly interior point
    t_k = 1/(K+1), V_k = V_total/(K+1). The returned allocation is
    projected onto the constraint set and carries the optimal split
    fractions for its (t, V).
    """
    config = config or SolverConfig()
    ws = _Workspace(scenario)
    n, v_total = ws.n, ws.v_total
    if x0 is None:
        t = np.full(n, 1.0 / (n + 1))
        y = np.full(n, 1.0 / (n + 1))
    else:
        if isinstance(x0, delay.Allocation):
            t, y = x0.t.copy(), x0.v_c / v_total
        else:
            x0 = np.asarray(x0, dtype=float)
            t, y = x0[:n].copy(), x0[n:] / v_total
        if t.sum() > 1.0 + 1e-9 or y.sum() > 1.0 + 1e-9:
            raise ValidationError("x0 must be feasible")
    floor = config.positivity_floor
    t = np.maximum(t, floor)
    y = np.maximum(y, floor)

    f0 = ws.objective(t, y * v_total)
    if config.step_rule == "polyak":
        b_scale = config.step_scale if config.step_scale is not None else f0
        a_scale = 0.0
    else:
        if config.step_scale is not None:
            a_scale = config.step_scale
        else:
            g_t0, g_v0 = ws.weighted_subgradient(t, y * v_total)
            g_y0 = g_v0 * v_total
            a_scale = 8.0 * f0 / float(g_t0 @ g_t0 + g_y0 @ g_y0)
        b_scale = 0.0

    hist = []
    fb_hist = []
    norms = []
    f_prev = None
    small_in_a_row = 0
    f_best = math.inf
    best_t, best_y = t.copy(), y.copy()
    marker = math.inf
    marker_iter = 0
    termination = "max_iters"
    iterations = config.max_iters

    for it in range(config.max_iters):
        v = y * v_total
        f = ws.objective(t, v)
        if not math.isfinite(f):
            raise SolverError(f"non-finite objective at iteration {it}")
        hist.append(f)
        sum_t = float(t.sum())
        sum_y = float(y.sum())
        if sum_t <= 1.0 + 1e-9 and sum_y <= 1.0 + 1e-9 and f < f_best:
            f_best = f
            best_t, best_y = t.copy(), y.copy()
            if f < marker - config.tol:
                marker = f
                marker_iter = it
        fb_hist.append(f_best)
        if f_prev is not None:
            small_in_a_row = small_in_a_row + 1 if abs(f - f_prev) <= config.tol else 0
            if small_in_a_row >= config.tol_debounce:
                termination = "tolerance"
                iterations = it
                break
        if it - marker_iter >= config.stagnation_window:
            termination = "stagnation"
            iterations = it
            break
        f_prev = f

        if sum_t > 1.0:
            g_t = np.ones(n)
            g_y = np.zeros(n)
            norm2 = float(n)
            phi = ((sum_t - 1.0) / n if config.step_rule == "polyak"
                   else a_scale / (it + 1))
        elif sum_y > 1.0:
            g_t = np.zeros(n)
            g_y = np.ones(n)
            norm2 = float(n)
            phi = ((sum_y - 1.0) / n if config.step_rule == "polyak"
                   else a_scale / (it + 1))
        else:
            g_t, g_v = ws.weighted_subgradient(t, v)
            g_y = g_v * v_total
            norm2 = float(g_t @ g_t + g_y @ g_y)
            if config.step_rule == "polyak":
                gamma = b_scale / (it + 1)
                phi = (f - f_best + gamma) / norm2
            else:
                phi = a_scale / (it + 1)
        norms.append(math.sqrt(norm2))
        move = phi * math.sqrt(norm2)
        if move > config.move_cap:
            phi *= config.move_cap / move
        t = np.maximum(t - phi * g_t, floor)
        y = np.maximum(y - phi * g_y, floor)

    # Project the best iterate onto the constraint set and attach splits.
    if best_t.sum() > 1.0:
        best_t = best_t / best_t.sum()
    if best_y.sum() > 1.0:
        best_y = best_y / best_y.sum()
    best_v = best_y * v_total
    beta = scenario.params.compression_ratio
    lam = np.array([
        delay.optimal_lambda(dev, beta, float(best_t[k]), float(best_v[k]))
        for k, dev in enumerate(scenario.devices)])
    alloc = delay.Allocation.checked(best_t, best_v, v_total, lam)
    f_final = ws.objective(best_t, best_v)
    report = SolverReport(
        objective_history=np.asarray(hist),
        best_objective=f_final,
        best_x=np.concatenate([best_t, best_v]),
        iterations=iterations,
        termination=termination,
        subgradient_norm_history=np.asarray(norms),
        step_rule=config.step_rule,
        feasible_best_history=np.asarray(fb_hist),
    )
    return alloc, report


@dataclass
class ConvexityReport:
    """Numerical audit of the piecewise-convexity claims for one device."""

    samples: int
    violations: list = field(default_factory=list)
    boundary_max_rel_gap: float = 0.0
    hessian_max_rel_err: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations


def convexity_diagnostics(device: DeviceProfile, beta: float, samples: int,
                          seed: int = 0) -> ConvexityReport:
    """Check, at random positive (t, V_c) points: both leading principal
    minors of the piece-1 Hessian are positive, the piece-2 second
    t-derivative is positive, the sign of D1 - D2 tracks the sign of
    t R - sqrt(beta W V), continuity holds on the boundary, and the
    analytic piece-1 Hessian matches finite differences.
    """
    if samples < 1:
        raise ValidationError(f"samples must be >= 1, got {samples}")
    g = stream("diagnostics", seed)
    L, W, R = device.data_size_bits, device.local_capacity_bps, device.rate
    t = 10.0 ** g.uniform(-3.0, 0.0, samples)
    V = 10.0 ** g.uniform(5.0, 9.0, samples)
    report = ConvexityReport(samples=samples)

    h_tt, h_tv, h_vv = d1_hessian(L, W, R, beta, t, V)
    det = d1_hessian_det(L, W, R, beta, t, V)
    dtt2 = d2_dtt(L, W, R, beta, t)
    for name, vals in (("delta1", h_tt), ("delta2", det), ("d2_dtt", dtt2)):
        bad = np.nonzero(~(vals > 0.0))[0]
        for i in bad:
            report.violations.append(
                {"check": name, "t": float(t[i]), "v_c": float(V[i]),
                 "value": float(vals[i])})
    # Consistency of the two determinant routes (closed form vs minors).
    det_from_minors = h_tt * h_vv - h_tv * h_tv
    rel = np.abs(det_from_minors - det) / det
    for i in np.nonzero(rel > 1e-9)[0]:
        report.violations.append(
            {"check": "det-consistency", "t": float(t[i]), "v_c": float(V[i]),
             "value": float(rel[i])})

    d1 = d1_value(L, W, R, beta, t, V)
    d2 = d2_value(L, W, R, beta, t)
    s = t * R
    bound = np.sqrt(beta * W * V)
    diff = d1 - d2
    scale = np.maximum(np.abs(d1), np.abs(d2))
    tied = np.abs(diff) <= 1e-12 * scale
    agree = tied | (np.sign(diff) == np.sign(s - bound))
    for i in np.nonzero(~agree)[0]:
        report.violations.append(
            {"check": "sign-agreement", "t": float(t[i]), "v_c": float(V[i]),
             "value": float(diff[i])})

    # Boundary continuity: put t exactly on t R = sqrt(beta W V).
    vb = 10.0 ** g.uniform(5.0, 9.0, 100)
    tb = np.sqrt(beta * W * vb) / R
    gap = np.abs(d1_value(L, W, R, beta, tb, vb) - d2_value(L, W, R, beta, tb))
    rel_gap = gap / d2_value(L, W, R, beta, tb)
    report.boundary_max_rel_gap = float(rel_gap.max())
    for i in np.nonzero(rel_gap > 1e-9)[0]:
        report.violations.append(
            {"check": "boundary-continuity", "t": float(tb[i]),
             "v_c": float(vb[i]), "value": float(rel_gap[i])})

    # Analytic Hessian vs central finite differences on a subsample.
    m = min(samples, 200)
    for i in range(m):
        fd = _fd_hessian(L, W, R, beta, float(t[i]), float(V[i]))
        ana = np.array(d1_hessian(L, W, R, beta, float(t[i]), float(V[i])))
        denom = np.maximum(np.abs(fd), 1e-8 * np.max(np.abs(fd)))
        err = float(np.max(np.abs(ana - fd) / denom))
        report.hessian_max_rel_err = max(report.hessian_max_rel_err, err)
        if err > 1e-4:
            report.violations.append(
                {"check": "hessian-fd", "t": float(t[i]), "v_c": float(V[i]),
                 "value": err})
    return report


def _fd_hessian(L, W, R, beta, t, V):
    f = lambda tt, vv: d1_value(L, W, R, beta, tt, vv)
    ht, hv = 1e-4 * t, 1e-4 * V
    h_tt = (f(t + ht, V) - 2 * f(t, V) + f(t - ht, V)) / ht ** 2
    h_vv = (f(t, V + hv) - 2 * f(t, V) + f(t, V - hv)) / hv ** 2
    h_tv = (f(t + ht, V + hv) - f(t + ht, V - hv)
            - f(t - ht, V + hv) + f(t - ht, V - hv)) / (4 * ht * hv)
    return np.array([h_tt, h_tv, h_vv])
