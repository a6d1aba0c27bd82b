"""Experiment harness and command-line interface.

Subcommands:
  solve   run one or all solvers on a scenario file, print and export
          the allocation with per-device delay breakdowns.
  sweep   reproduce the benchmark sweeps (device count, mean device
          capacity, device-1 payload, device-1 capacity) and write a CSV
          with columns: experiment, K, model, point_value, mean_delay_s,
          seed, scenario_hash. Figures are rendered next to the CSV
          unless --no-plot is given.
  verify  run the oracle/KKT/finite-difference/convexity check suite.
  sample  emit a random scenario file (optionally the exact scenario of
          a given sweep point and trial).

Exit codes: 0 success, 1 usage, 2 validation, 3 solver failure (and
failed verification).
"""

import argparse
import csv
import hashlib
import math
import os
import sys
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import channel, closed_form, delay, oracle, subgradient
from .errors import SolverError, ValidationError
from .rng import child_seed, stream
from .scenario import (MBIT, MBPS, Scenario, load_scenario, sample_scenario,
                       save_scenario, scenario_hash, table2_scenario,
                       validate_scenario)

MODELS = ("local", "edge", "partial", "partial-special")
SWEEP_KINDS = ("K", "Vd", "L1", "Vd1")
CSV_COLUMNS = ("experiment", "K", "model", "point_value", "mean_delay_s",
               "seed", "scenario_hash")
ALLOC_COLUMNS = ("experiment", "point_value", "model", "device", "t",
                 "v_c_bps", "lambda")

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_SOLVER = 0, 1, 2, 3

_BASE_VD_MEAN_MBPS = 1.25  # mean of the Uniform[0.5, 2] Mbps population


@dataclass
class ExperimentSpec:
    """One sweep experiment."""

    kind: str
    points: list = field(default_factory=list)
    trials: int = 50
    seed: int = 0
    solvers: tuple = MODELS
    out: str | None = None
    step_rule: str = "polyak"
    tol: float = 1e-6
    workers: int = 1
    plot: bool = True

    def __post_init__(self):
        if self.kind not in SWEEP_KINDS:
            raise ValidationError(f"unknown sweep kind {self.kind!r}")
        if not self.points:
            self.points = default_points(self.kind)
        if not self.points:
            raise ValidationError("sweep points must be non-empty")
        if self.trials < 1:
            raise ValidationError(f"trials must be >= 1, got {self.trials}")
        if self.kind in ("L1", "Vd1"):
            self.trials = 1  # deterministic benchmark scenario
            if self.solvers == MODELS:
                self.solvers = ("partial",)


def default_points(kind: str) -> list:
    if kind == "K":
        return list(range(5, 51, 5))
    if kind == "Vd":
        return [0.75, 1.0, 1.25, 1.5, 1.75, 2.0]
    if kind == "L1":
        return [float(v) for v in range(10, 101, 10)]
    if kind == "Vd1":
        return [0.5 + 0.25 * i for i in range(7)]
    raise ValidationError(f"unknown sweep kind {kind!r}")


def _point_key(point) -> int:
    return int(round(float(point) * 1e6))


def scenario_for(kind: str, point, seed: int, trial: int = 0) -> Scenario:
    """Build the exact scenario of one sweep (point, trial).

    Randomized sweeps derive a child stream from (seed, kind, point,
    trial), so every CSV row is reproducible from the CLI alone.
    """
    tag = zlib.crc32(kind.encode())
    child = child_seed(seed, tag, _point_key(point), trial)
    if kind == "K":
        return sample_scenario(int(point), child)
    if kind == "Vd":
        base = sample_scenario(20, child)
        scale = float(point) / _BASE_VD_MEAN_MBPS
        devices = [replace(d, local_capacity_bps=d.local_capacity_bps * scale)
                   for d in base.devices]
        return validate_scenario(devices, base.params)
    if kind == "L1":
        return table2_scenario(float(point) * MBIT, 1.1 * MBPS)
    if kind == "Vd1":
        return table2_scenario(100.0 * MBIT, float(point) * MBPS)
    raise ValidationError(f"unknown sweep kind {kind!r}")


def solve_model(scenario: Scenario, model: str, step_rule: str = "polyak",
                tol: float = 1e-6, x0=None):
    """Run one solver; returns (allocation, d_sys, report_or_none)."""
    if model == "local":
        alloc, d_sys = closed_form.solve_local(scenario)
        return alloc, d_sys, None
    if model == "edge":
        alloc, d_sys = closed_form.solve_edge(scenario)
        return alloc, d_sys, None
    if model == "partial-special":
        alloc, _, report = closed_form.solve_partial_special(
            scenario, tol=min(tol, 1e-6))
        return alloc, report.best_objective, report
    if model == "partial":
        config = subgradient.SolverConfig(step_rule=step_rule, tol=tol)
        alloc, report = subgradient.solve(scenario, config, x0=x0)
        return alloc, report.best_objective, report
    raise ValidationError(f"unknown solver {model!r}")


def _warm_start(scenario: Scenario, alloc: delay.Allocation | None = None):
    """Theorem-5 point as a feasible sub-gradient start, if usable.

    A clipping dual solution starves devices that the full pipeline model
    must serve, which would strand the sub-gradient iteration at the
    positivity floor; fall back to the default interior start then.
    """
    if alloc is None:
        try:
            alloc, _, _ = closed_form.solve_partial_special(scenario, tol=1e-6)
        except SolverError:
            return None
    v_total = scenario.params.cloud_capacity_bps
    if float(alloc.t.min()) < 1e-6 or float(alloc.v_c.min()) < 1e-6 * v_total:
        return None
    t = alloc.t / max(1.0, float(alloc.t.sum()))
    v = alloc.v_c / max(1.0, float(alloc.v_c.sum()) / v_total)
    return np.concatenate([t, v])


def _solve_models(scenario, solvers, step_rule, tol, warm_partial=True):
    results = {}
    if "partial-special" in solvers:
        results["partial-special"] = solve_model(scenario, "partial-special",
                                                 step_rule, tol)
    warm = None
    if warm_partial and "partial" in solvers:
        special = results.get("partial-special")
        warm = _warm_start(scenario, special[0] if special else None)
    for model in solvers:
        if model in results:
            continue
        x0 = warm if model == "partial" else None
        results[model] = solve_model(scenario, model, step_rule, tol, x0=x0)
    return results


def _breakdowns(scenario: Scenario, model: str, alloc: delay.Allocation):
    beta = scenario.params.compression_ratio
    rows = []
    for k, dev in enumerate(scenario.devices):
        if model == "local":
            lam = 1.0
        elif model == "edge":
            lam = 0.0
        else:
            lam = float(alloc.lam[k])
        bd = delay.partial_delay(dev, beta, float(alloc.t[k]),
                                 float(alloc.v_c[k]), lam)
        rows.append((k, lam, bd))
    return rows


def run_single(scenario: Scenario, solver: str = "all",
               step_rule: str = "polyak", tol: float = 1e-6,
               out: str | None = None, quiet: bool = False):
    """Solve one scenario, print the allocation and write it as CSV."""
    solvers = MODELS if solver == "all" else (solver,)
    results = _solve_models(scenario, solvers, step_rule, tol)
    records = []
    lines = []
    for model in solvers:
        alloc, d_sys, report = results[model]
        breakdowns = _breakdowns(scenario, model, alloc)
        records.append({"model": model, "allocation": alloc, "d_sys": d_sys,
                        "report": report, "breakdowns": breakdowns})
        lines.append(f"model={model}  D_sys={d_sys:.6f} s"
                     + (f"  iterations={report.iterations}"
                        f" termination={report.termination}" if report else ""))
        lines.append(f"  {'dev':>3} {'t':>10} {'V_c (Mbps)':>12} "
                     f"{'lambda':>8} {'delay (s)':>10}  branch")
        for k, lam, bd in breakdowns:
            lines.append(f"  {k + 1:>3} {alloc.t[k]:>10.6f} "
                         f"{alloc.v_c[k] / MBPS:>12.4f} {lam:>8.4f} "
                         f"{bd.total:>10.4f}  {bd.branch}")
    if not quiet:
        print("\n".join(lines))
    if out:
        with open(out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(("model", "device", "weight", "t", "v_c_bps",
                             "lambda", "comp_d_s", "tran_d_s", "tran_c_s",
                             "comp_c_s", "delay_s", "branch", "d_sys_s"))
            for rec in records:
                alloc = rec["allocation"]
                for k, lam, bd in rec["breakdowns"]:
                    writer.writerow((rec["model"], k + 1,
                                     repr(scenario.devices[k].weight),
                                     repr(float(alloc.t[k])),
                                     repr(float(alloc.v_c[k])), repr(lam),
                                     repr(bd.comp_d), repr(bd.tran_d),
                                     repr(bd.tran_c), repr(bd.comp_c),
                                     repr(bd.total), bd.branch,
                                     repr(rec["d_sys"])))
    return records


def _run_point(args):
    """Worker: all trials and models for one sweep point."""
    (kind, point, trials, seed, solvers, step_rule, tol) = args
    sums = {model: 0.0 for model in solvers}
    hashes = []
    alloc_rows = []
    n_devices = None
    for trial in range(trials):
        scen = scenario_for(kind, point, seed, trial)
        n_devices = scen.n_devices
        hashes.append(scenario_hash(scen))
        results = _solve_models(scen, solvers, step_rule, tol)
        for model in solvers:
            alloc, d_sys, _ = results[model]
            sums[model] += d_sys
            if kind in ("L1", "Vd1"):
                for k in range(scen.n_devices):
                    lam = (1.0 if model == "local" else 0.0 if model == "edge"
                           else float(alloc.lam[k]))
                    alloc_rows.append({
                        "experiment": f"sweep_{kind}", "point_value": point,
                        "model": model, "device": k, "t": float(alloc.t[k]),
                        "v_c_bps": float(alloc.v_c[k]), "lambda": lam})
    combined = (hashes[0] if len(hashes) == 1 else
                hashlib.sha256("|".join(hashes).encode()).hexdigest()[:12])
    rows = [{"experiment": f"sweep_{kind}", "K": n_devices, "model": model,
             "point_value": point, "mean_delay_s": sums[model] / trials,
             "seed": seed, "scenario_hash": combined} for model in solvers]
    return rows, alloc_rows


def run_sweep(spec: ExperimentSpec):
    """Run a sweep; returns (rows, alloc_rows) and writes CSV/figures.

    All solvers see identical scenarios at each (point, trial) — common
    random numbers — and rows are emitted in deterministic order
    regardless of worker completion order.
    """
    jobs = [(spec.kind, point, spec.trials, spec.seed, tuple(spec.solvers),
             spec.step_rule, spec.tol) for point in spec.points]
    if spec.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            outcomes = list(pool.map(_run_point, jobs))
    else:
        outcomes = [_run_point(job) for job in jobs]
    rows = [row for point_rows, _ in outcomes for row in point_rows]
    alloc_rows = [row for _, point_allocs in outcomes for row in point_allocs]

    if spec.out:
        _write_sweep_csv(spec.out, rows)
        if alloc_rows:
            _write_alloc_csv(_alloc_path(spec.out), alloc_rows)
        if spec.plot:
            from . import plots
            base, _ = os.path.splitext(spec.out)
            plots.render_delay_figure(rows, spec.kind, base + ".png")
            if alloc_rows:
                plots.render_allocation_figure(alloc_rows, spec.kind,
                                               base + ".alloc.png")
    return rows, alloc_rows


def _alloc_path(out: str) -> str:
    base, _ = os.path.splitext(out)
    return base + ".alloc.csv"


def _write_sweep_csv(path, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow((row["experiment"], row["K"], row["model"],
                             repr(float(row["point_value"])),
                             repr(float(row["mean_delay_s"])), row["seed"],
                             row["scenario_hash"]))


def _write_alloc_csv(path, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ALLOC_COLUMNS)
        for row in rows:
            writer.writerow((row["experiment"], repr(float(row["point_value"])),
                             row["model"], row["device"] + 1, repr(row["t"]),
                             repr(row["v_c_bps"]), repr(row["lambda"])))


# --- verification suite ----------------------------------------------------


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float
    threshold: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"  {self.detail}" if self.detail else ""
        return (f"{status:4} {self.name:32} residual={self.residual:.3e} "
                f"(tol {self.threshold:.1e}){extra}")


@dataclass
class VerifyReport:
    level: str
    checks: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name, residual, threshold, detail=""):
        self.checks.append(CheckResult(name, residual <= threshold,
                                       float(residual), threshold, detail))


def verify(seed: int = 1, scenario: Scenario | None = None,
           level: str = "fast", inject_gradient_bug: bool = False) -> VerifyReport:
    """Run the invariant suite and report each check's measured residual.

    ``inject_gradient_bug`` flips the sign of one analytic derivative in
    the finite-difference check; a healthy suite must then fail it
    (negative control, test-only).
    """
    if level not in ("fast", "full"):
        raise ValidationError(f"level must be 'fast' or 'full', got {level!r}")
    report = VerifyReport(level=level)
    g = stream("verify", seed)
    base = scenario if scenario is not None else sample_scenario(5, seed)
    beta = base.params.compression_ratio

    # Split-rule optimality against the dense lambda grid.
    worst_gap, worst_step = 0.0, 0.0
    grid = oracle.GridSpec(resolution=10_001)
    step = 1.0 / (grid.resolution - 1)
    for _ in range(25):
        dev = base.devices[int(g.integers(0, base.n_devices))]
        t = float(10.0 ** g.uniform(-3, 0))
        v = float(10.0 ** g.uniform(5, 8.5))
        lam_star = delay.optimal_lambda(dev, beta, t, v)
        lams, totals = oracle.lambda_delay_curve(dev, beta, t, v, grid)
        best = float(totals.min())
        at_star = delay.partial_delay(dev, beta, t, v, lam_star).total
        worst_gap = max(worst_gap, (at_star - best) / best)
        worst_step = max(worst_step, abs(lam_star - oracle.oracle_lambda(
            dev, beta, t, v, grid)) / step)
    report.add("lemma1-grid-optimality", worst_gap, 1e-9,
               f"max |lam*-argmin|={worst_step:.2f} grid steps")

    # Closed-form solvers: stationarity spread and both identities.
    worst_spread = 0.0
    worst_identity = 0.0
    for i in range(5):
        scen = sample_scenario(int(g.integers(2, 11)), child_seed(seed, 100 + i))
        alloc_l, d_l = closed_form.solve_local(scen)
        alloc_e, d_e = closed_form.solve_edge(scen)
        rep_l = oracle.kkt_residuals(scen, alloc_l, "local")
        rep_e = oracle.kkt_residuals(scen, alloc_e, "edge")
        worst_spread = max(worst_spread, rep_l.max_spread, rep_e.max_spread)
        direct_l = math.fsum(d.weight * delay.local_delay(d, beta, float(alloc_l.t[k]))
                             for k, d in enumerate(scen.devices))
        direct_e = math.fsum(
            d.weight * delay.edge_delay(d, float(alloc_e.t[k]), float(alloc_e.v_c[k]))
            for k, d in enumerate(scen.devices))
        worst_identity = max(worst_identity, abs(direct_l - d_l) / d_l,
                             abs(direct_e - d_e) / d_e)
    report.add("closed-form-kkt-spread", worst_spread, 1e-9)
    report.add("closed-form-delay-identity", worst_identity, 1e-12)

    # Analytic sub-gradients against central finite differences.
    worst_fd = 0.0
    for _ in range(40):
        dev = base.devices[int(g.integers(0, base.n_devices))]
        payload, w, r = dev.data_size_bits, dev.local_capacity_bps, dev.rate
        v = float(10.0 ** g.uniform(5, 8.5))
        bound_t = math.sqrt(beta * w * v) / r
        for direction in (2.0, 0.5):
            t = bound_t * direction
            if not (1e-6 < t < 1.0):
                continue
            worst_fd = max(worst_fd, _fd_gradient_error(
                payload, w, r, beta, t, v, inject_gradient_bug))
    report.add("gradient-finite-difference", worst_fd, 1e-5)

    # Convexity and boundary continuity.
    diag = subgradient.convexity_diagnostics(base.devices[0], beta,
                                             samples=2000, seed=seed)
    report.add("convexity-diagnostics", float(len(diag.violations)), 0.0,
               f"hessian_fd_err={diag.hessian_max_rel_err:.2e}")
    report.add("boundary-continuity", diag.boundary_max_rel_gap, 1e-9)

    # Simplified-split balance identity.
    worst_balance = 0.0
    for _ in range(100):
        dev = base.devices[int(g.integers(0, base.n_devices))]
        t = float(10.0 ** g.uniform(-3, 0))
        v = float(10.0 ** g.uniform(5, 8.5))
        lam_bar, _ = delay.special_case(dev, t, v)
        payload, w, r = dev.data_size_bits, dev.local_capacity_bps, dev.rate
        lhs = lam_bar * payload / w
        rhs = (1 - lam_bar) * payload / (t * r) + (1 - lam_bar) * payload / v
        worst_balance = max(worst_balance, abs(lhs - rhs) / lhs)
    report.add("special-case-balance", worst_balance, 1e-12)

    # Dual solver: active constraints and stationarity.
    scen5 = sample_scenario(5, child_seed(seed, 200))
    alloc5, dual5, _ = closed_form.solve_partial_special(scen5, tol=1e-9)
    kkt5 = oracle.kkt_residuals(scen5, alloc5, "partial-special")
    report.add("theorem5-active-constraints",
               max(abs(dual5.residual_t), abs(dual5.residual_v)), 1e-8)
    report.add("theorem5-kkt-spread", kkt5.max_spread, 1e-6)

    # Slot-level transmission identity (coarse at this level).
    dev = base.devices[0]
    gbar = 10.0 ** g.uniform(2.0, 5.0)
    stats = channel.ChannelStats(float(gbar), base.params.bandwidth_hz)
    rate = channel.expected_rate(stats)
    tfrac = 0.5
    slot = dev.data_size_bits / (tfrac * rate) / 400.0
    mean_elapsed = channel.simulate_transmission(
        dev.data_size_bits, tfrac, stats, slot, seed, trials=2000)
    ideal = dev.data_size_bits / (tfrac * rate)
    report.add("transmission-identity", abs(mean_elapsed - ideal) / ideal, 2e-2)

    if level == "full":
        worst = 0.0
        for i in range(2):
            scen = sample_scenario(2, child_seed(seed, 300 + i))
            _, f_oracle = oracle.oracle_allocation(scen, grid=201)
            _, rep = subgradient.solve(scen)
            worst = max(worst, (rep.best_objective - f_oracle) / f_oracle)
        report.add("subgradient-vs-grid-oracle", worst, 1e-3)
    return report


def _fd_gradient_error(payload, w, r, beta, t, v, inject_bug) -> float:
    s = t * r
    case_a = s >= math.sqrt(beta * w * v)
    if case_a:
        value = lambda tt, vv: subgradient.d1_value(payload, w, r, beta, tt, vv)
        gt, gv = subgradient.d1_partials(payload, w, r, beta, t, v)
    else:
        value = lambda tt, vv: subgradient.d2_value(payload, w, r, beta, tt)
        gt, gv = (subgradient.d2_partials(payload, w, r, beta, t)[0], 0.0)
    if inject_bug:
        gt = -gt
    ht, hv = 1e-6 * t, 1e-6 * v
    fd_t = (value(t + ht, v) - value(t - ht, v)) / (2 * ht)
    fd_v = (value(t, v + hv) - value(t, v - hv)) / (2 * hv)
    err = abs(gt - fd_t) / abs(fd_t)
    if fd_v != 0.0:
        err = max(err, abs(gv - fd_v) / abs(fd_v))
    return err


# --- CLI --------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _build_parser() -> _Parser:
    parser = _Parser(prog="mecolat",
                     description="Latency-minimal TDMA offloading solvers")
    sub = parser.add_subparsers(dest="command")

    p_solve = sub.add_parser("solve", help="solve one scenario file")
    p_solve.add_argument("--scenario", required=True)
    p_solve.add_argument("--solver", default="all", choices=MODELS + ("all",))
    p_solve.add_argument("--out", default=None)
    p_solve.add_argument("--step-rule", default="polyak",
                         choices=("diminishing", "polyak"))
    p_solve.add_argument("--tol", type=float, default=1e-6)

    p_sweep = sub.add_parser("sweep", help="run a benchmark sweep")
    p_sweep.add_argument("--kind", required=True, choices=SWEEP_KINDS)
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument("--trials", type=int, default=50)
    p_sweep.add_argument("--out", required=True)
    p_sweep.add_argument("--solver", default=None, choices=MODELS + ("all",))
    p_sweep.add_argument("--step-rule", default="polyak",
                         choices=("diminishing", "polyak"))
    p_sweep.add_argument("--tol", type=float, default=1e-6)
    p_sweep.add_argument("--workers", type=int,
                         default=max(1, min(4, os.cpu_count() or 1)))
    p_sweep.add_argument("--no-plot", action="store_true")

    p_verify = sub.add_parser("verify", help="run the verification suite")
    p_verify.add_argument("--scenario", default=None)
    p_verify.add_argument("--seed", type=int, default=1)
    p_verify.add_argument("--level", default="fast", choices=("fast", "full"))
    p_verify.add_argument("--inject-gradient-bug", action="store_true",
                          help=argparse.SUPPRESS)

    p_sample = sub.add_parser("sample", help="emit a random scenario file")
    p_sample.add_argument("--devices", type=int, default=5)
    p_sample.add_argument("--seed", type=int, default=0)
    p_sample.add_argument("--out", required=True)
    p_sample.add_argument("--kind", default=None, choices=SWEEP_KINDS,
                          help="reproduce a sweep scenario instead")
    p_sample.add_argument("--point", type=float, default=None)
    p_sample.add_argument("--trial", type=int, default=0)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "solve":
            scen = load_scenario(args.scenario)
            run_single(scen, solver=args.solver, step_rule=args.step_rule,
                       tol=args.tol, out=args.out)
            return EXIT_OK
        if args.command == "sweep":
            solver = args.solver
            solvers = (MODELS if solver in (None, "all") else (solver,))
            spec = ExperimentSpec(
                kind=args.kind, trials=args.trials, seed=args.seed,
                solvers=solvers if solver is not None else MODELS,
                out=args.out, step_rule=args.step_rule, tol=args.tol,
                workers=args.workers, plot=not args.no_plot)
            run_sweep(spec)
            print(f"wrote {args.out}")
            return EXIT_OK
        if args.command == "verify":
            scen = load_scenario(args.scenario) if args.scenario else None
            rep = verify(seed=args.seed, scenario=scen, level=args.level,
                         inject_gradient_bug=args.inject_gradient_bug)
            for check in rep.checks:
                print(check.line())
            n_fail = sum(not c.passed for c in rep.checks)
            print(f"{len(rep.checks) - n_fail}/{len(rep.checks)} checks passed")
            return EXIT_OK if rep.ok else EXIT_SOLVER
        if args.command == "sample":
            if args.kind is not None:
                if args.point is None:
                    parser.error("--kind requires --point")
                scen = scenario_for(args.kind, args.point, args.seed, args.trial)
            else:
                scen = sample_scenario(args.devices, args.seed)
            save_scenario(scen, args.out)
            print(f"wrote {args.out} (hash {scenario_hash(scen)})")
            return EXIT_OK
        parser.error(f"unknown command {args.command!r}")
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
