import math

import numpy as np
import pytest

from mecolat import (DeviceProfile, SolverConfig, SystemParams, ValidationError,
                     convexity_diagnostics, objective, optimal_partial_delay,
                     sample_scenario, solve, validate_scenario)
from mecolat.scenario import MBIT, MBPS
from mecolat.subgradient import (d1_hessian, d1_hessian_det, d1_partials,
                                 d1_value, d2_dtt, d2_partials, d2_value,
                                 subgradient)

BETA = 0.01


def _scen(sizes, caps=None, rates=None, v_cloud=40.0):
    n = len(sizes)
    caps = caps or [1.0] * n
    rates = rates or [100.0] * n
    devices = [DeviceProfile(weight=1.0, data_size_bits=sizes[k] * MBIT,
                             local_capacity_bps=caps[k] * MBPS,
                             avg_rate_bps=rates[k] * MBPS)
               for k in range(n)]
    return validate_scenario(devices, SystemParams(cloud_capacity_bps=v_cloud * MBPS))


def _interior_points(rng, n, branch):
    """Random (t, v) pairs strictly inside one branch for the test device."""
    pts = []
    w, r = 1e6, 1e8
    while len(pts) < n:
        v = 10.0 ** rng.uniform(5.5, 8.5)
        bound_t = math.sqrt(BETA * w * v) / r
        factor = rng.uniform(1.5, 40.0) if branch == 1 else rng.uniform(0.05, 0.6)
        t = bound_t * factor
        if 1e-6 < t < 1.0:
            pts.append((t, v))
    return pts


def test_objective_single_device():
    scen = _scen([50.0])
    x = np.array([1.0, 40e6])
    d_hat, _, _ = optimal_partial_delay(scen.devices[0], BETA, 1.0, 40e6)
    assert objective(scen, x) == pytest.approx(d_hat, rel=1e-15)


def test_objective_invariant_to_weight_scaling():
    devices = [DeviceProfile(weight=2.0, data_size_bits=5e7,
                             local_capacity_bps=1e6, avg_rate_bps=1e8),
               DeviceProfile(weight=2.0, data_size_bits=3e7,
                             local_capacity_bps=1.5e6, avg_rate_bps=8e7)]
    a = validate_scenario(devices)
    b = validate_scenario([DeviceProfile(weight=0.5, data_size_bits=5e7,
                                         local_capacity_bps=1e6, avg_rate_bps=1e8),
                           DeviceProfile(weight=0.5, data_size_bits=3e7,
                                         local_capacity_bps=1.5e6, avg_rate_bps=8e7)])
    x = np.array([0.4, 0.3, 1.5e7, 2.0e7])
    assert objective(a, x) == pytest.approx(objective(b, x), rel=1e-15)


def test_objective_matches_reimplementation():
    # Independent re-evaluation of the optimized piecewise delay.
    rng = np.random.default_rng(3)
    scen = _scen([20.0, 60.0, 90.0], caps=[0.7, 1.2, 1.9])
    x = np.concatenate([rng.uniform(0.05, 0.3, 3), rng.uniform(1e6, 1e7, 3)])
    total = 0.0
    for k, dev in enumerate(scen.devices):
        payload, w, r = dev.data_size_bits, dev.local_capacity_bps, dev.avg_rate_bps
        s = x[k] * r
        v = x[3 + k]
        d1 = payload * (s + v) * (s + BETA * w) / (s * (w * v * (1 + BETA) + s * (w + v)))
        d2 = payload * (s + BETA * w) / (s * (w + s))
        total += dev.weight * max(d1, d2)
    assert objective(scen, x) == pytest.approx(total, rel=1e-12)


def test_objective_rejects_floored_entries():
    scen = _scen([50.0])
    with pytest.raises(ValidationError, match="positivity floor"):
        objective(scen, np.array([0.0, 40e6]))


def test_subgradient_matches_finite_differences():
    rng = np.random.default_rng(11)
    w, r, payload = 1e6, 1e8, 5e7
    for branch in (1, 2):
        for t, v in _interior_points(rng, 50, branch):
            if branch == 1:
                val = lambda tt, vv: d1_value(payload, w, r, BETA, tt, vv)
                gt, gv = d1_partials(payload, w, r, BETA, t, v)
            else:
                val = lambda tt, vv: d2_value(payload, w, r, BETA, tt)
                gt, gv = d2_partials(payload, w, r, BETA, t)
                gv = float(gv)
            ht, hv = 1e-6 * t, 1e-6 * v
            fd_t = (val(t + ht, v) - val(t - ht, v)) / (2 * ht)
            fd_v = (val(t, v + hv) - val(t, v - hv)) / (2 * hv)
            assert abs(gt - fd_t) / abs(fd_t) <= 1e-5
            if fd_v != 0.0:
                assert abs(gv - fd_v) / abs(fd_v) <= 1e-5
            else:
                assert gv == 0.0


def test_subgradient_obstacle_directions():
    scen = _scen([50.0, 50.0])
    over_t = np.array([0.7, 0.6, 1e6, 1e6])
    assert np.array_equal(subgradient(scen, over_t), [1, 1, 0, 0])
    over_v = np.array([0.3, 0.3, 30e6, 20e6])
    assert np.array_equal(subgradient(scen, over_v), [0, 0, 1, 1])
    # time constraint processed first when both are violated
    both = np.array([0.7, 0.6, 30e6, 20e6])
    assert np.array_equal(subgradient(scen, both), [1, 1, 0, 0])


def test_subgradient_separable_across_devices():
    scen_a = _scen([50.0, 20.0], caps=[1.0, 1.5])
    scen_b = _scen([50.0, 80.0], caps=[1.0, 0.6])
    x = np.array([0.2, 0.3, 1.2e7, 0.8e7])
    g_a = subgradient(scen_a, x)
    g_b = subgradient(scen_b, x)
    # device 1's entries do not depend on device 2's parameters
    assert g_a[0] == pytest.approx(g_b[0], rel=1e-15)
    assert g_a[2] == pytest.approx(g_b[2], rel=1e-15)


def test_solve_single_device_uses_full_resources():
    scen = _scen([50.0], rates=[50.0])
    alloc, report = solve(scen)
    ref, _, _ = optimal_partial_delay(scen.devices[0], BETA, 1.0, 40e6)
    assert report.best_objective == pytest.approx(ref, rel=1e-4)
    assert alloc.t[0] >= 0.999
    assert alloc.v_c[0] >= 0.999 * 40e6


def test_solve_identical_devices_symmetric():
    scen = _scen([60.0] * 4)
    alloc, _ = solve(scen)
    assert np.max(np.abs(alloc.t - alloc.t.mean())) <= 1e-3
    assert np.max(np.abs(alloc.v_c - alloc.v_c.mean())) <= 1e-3 * 40e6


def test_solve_reports_monotone_best_and_feasible_result():
    scen = sample_scenario(3, seed=13)
    alloc, report = solve(scen)
    assert report.termination in ("tolerance", "stagnation", "max_iters")
    assert float(alloc.t.sum()) <= 1.0 + 1e-9
    assert float(alloc.v_c.sum()) <= 40e6 * (1 + 1e-9)
    fb = report.feasible_best_history
    assert np.all(np.diff(fb) <= 0)  # running best never worsens
    assert report.best_objective <= fb[-1] * (1 + 1e-8)
    assert alloc.lam is not None and np.all((alloc.lam > 0) & (alloc.lam < 1))


def test_solve_rejects_infeasible_start():
    scen = _scen([50.0, 50.0])
    with pytest.raises(ValidationError, match="feasible"):
        solve(scen, x0=np.array([0.9, 0.9, 1e6, 1e6]))


def test_solve_polyak_faster_than_diminishing():
    # Median iterations to reach the worse of the two final objectives.
    rng = np.random.default_rng(17)
    wins = {"polyak": [], "diminishing": []}
    for i in range(10):
        scen = sample_scenario(2, seed=100 + i)
        results = {}
        for rule in ("polyak", "diminishing"):
            cfg = SolverConfig(step_rule=rule, max_iters=30_000,
                               stagnation_window=30_000, tol=1e-9,
                               tol_debounce=10 ** 9)
            _, rep = solve(scen, cfg)
            results[rule] = rep
        target = max(results["polyak"].best_objective,
                     results["diminishing"].best_objective) * (1 + 1e-9)
        for rule, rep in results.items():
            hist = rep.objective_history
            reached = np.nonzero(hist <= target)[0]
            wins[rule].append(int(reached[0]) if len(reached) else len(hist))
    assert np.median(wins["polyak"]) < np.median(wins["diminishing"])


def test_convexity_diagnostics_clean():
    dev = DeviceProfile(weight=1.0, data_size_bits=5e7, local_capacity_bps=1e6,
                        avg_rate_bps=1.2e8)
    report = convexity_diagnostics(dev, BETA, samples=10_000, seed=2)
    assert report.ok, report.violations[:3]
    assert report.boundary_max_rel_gap <= 1e-9
    assert report.hessian_max_rel_err <= 1e-4


def test_hessian_closed_forms_are_consistent():
    rng = np.random.default_rng(23)
    payload, w, r = 5e7, 1e6, 1.2e8
    t = 10.0 ** rng.uniform(-3, 0, 500)
    v = 10.0 ** rng.uniform(5, 9, 500)
    h_tt, h_tv, h_vv = d1_hessian(payload, w, r, BETA, t, v)
    det = d1_hessian_det(payload, w, r, BETA, t, v)
    assert np.allclose(h_tt * h_vv - h_tv ** 2, det, rtol=1e-9)
    assert np.all(h_tt > 0) and np.all(det > 0)
    assert np.all(d2_dtt(payload, w, r, BETA, t) > 0)
