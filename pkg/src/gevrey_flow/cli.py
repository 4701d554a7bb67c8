"""Command-line runner.

Subcommands::

    params          derived parameters (zeta with bracket, lambda, |k0|,
                    barrier probability) plus the admissibility report
    omega-mc        bridge-corrected Monte Carlo estimate of the barrier
                    event probability, checked against the closed form
    simulate        one pathwise run; snapshots to CSV, optional binary
                    field dumps
    verify-decay    rejection-sample barrier-event paths, simulate each and
                    check the exponential-decay bound pointwise and by fit
    property-suite  embedding inequalities, convolution oracle agreement,
                    bilinear bound shape (reported), rescaling equivalence
    picard-compare  fixed-point oracle vs the exponential Heun stepper,
                    including an observed-order estimate

Exit codes: 0 all asserted checks pass, 1 a check failed, 2 configuration
error.  Failures name the violated invariant.
"""

import argparse
import math
import os
import sys

import numpy as np

from . import io as gio
from .brownian import omega_probability_mc, omega_verdict, sample_path, zero_path
from .config import load_config
from .diagnostics import (
    bilinear_shape_report,
    embedding_suite,
    fit_decay,
    monotonicity_check,
    rescale_equivalence_check,
    series_from_result,
)
from .dynamics import IntegratorConfig, bilinear_B, picard_solve, simulate
from .errors import BlowupAbort, ConfigError, TailBoundError
from .model import check_admissibility, derived_params, omega_probability_closed_form
from .spectral import convolve_product, gevrey_norm, random_hermitian_field


def _out_path(args, name: str) -> str:
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def _initial_field(rc, cfg, lattice, schedules):
    field = random_hermitian_field(lattice, rc.init_seed, decay=rc.init_decay)
    norm0 = gevrey_norm(field, schedules[0].spec(cfg, 0.0))
    if norm0 == 0:
        raise ConfigError("initial field has zero norm; adjust init_seed/init_decay")
    return field * (rc.init_norm / norm0)


def _collect_omega_paths(cfg, horizon, dt, seed, n_wanted, max_attempts):
    children = np.random.SeedSequence(seed).spawn(max_attempts)
    paths = []
    for child in children:
        path = sample_path(horizon, dt, child)
        if omega_verdict(path, cfg.alpha, cfg.beta, cfg.nu).member:
            paths.append(path)
            if len(paths) == n_wanted:
                return paths
    raise RuntimeError(
        f"found only {len(paths)}/{n_wanted} barrier-event paths in "
        f"{max_attempts} attempts"
    )


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------
def _cmd_params(rc, args) -> int:
    cfg = rc.model_config()
    try:
        dp = derived_params(cfg)
    except TailBoundError as exc:
        print(f"FAIL params: {exc}")
        return 1
    report = check_admissibility(cfg, rc.sigma, rc.r, rc.smallness_constant)
    doc = dp.to_dict()
    doc["conditions"] = [c.to_dict() for c in report.conditions]
    doc["admissible"] = report.passed
    doc["config_warnings"] = list(cfg.config_warnings)
    gio.write_json(_out_path(args, rc.json), doc)
    print(
        f"zeta = {dp.zeta.value:.12g} bracket width {dp.zeta.width:.3g} "
        f"(alt sign: {dp.zeta_alt.value:.12g})"
    )
    print(f"lambda = {dp.lam:.12g}, |k0| = {dp.k0:.12g}")
    if dp.omega_prob is not None:
        print(f"barrier probability = {dp.omega_prob:.8f}")
    print(f"admissible: {report.passed}")
    return 0


def _cmd_omega_mc(rc, args) -> int:
    res = omega_probability_mc(
        rc.alpha, rc.beta, rc.nu, rc.n_paths, rc.horizon, rc.mc_dt, rc.seed
    )
    closed = omega_probability_closed_form(rc.alpha, rc.beta, rc.nu)
    err = abs(res.estimate - closed)
    ok = err <= 3.0 * res.standard_error
    doc = res.to_dict()
    doc["closed_form"] = closed
    doc["abs_error"] = err
    doc["within_3se"] = ok
    gio.write_json(_out_path(args, rc.json), doc)
    print(
        f"estimate = {res.estimate:.6f} +- {res.standard_error:.6f} "
        f"(closed form {closed:.6f}, horizon {res.horizon:g})"
    )
    if not ok:
        print("FAIL omega-mc: estimate is more than 3 standard errors from the closed form")
        return 1
    print("PASS omega-mc")
    return 0


def _make_path(rc, cfg, horizon, dt):
    if cfg.nu == 0:
        return zero_path(horizon, dt)
    return sample_path(horizon, dt, rc.seed)


def _write_sim_artifacts(rc, args, result, extra=None):
    gio.write_snapshot_csv(_out_path(args, rc.csv), result)
    if rc.field_dump and rc.field_dump_stride >= 1:
        gio.write_field_dumps(_out_path(args, rc.field_dump), result, rc.field_dump_stride)
    doc = {
        "times": result.times,
        "norms": {k: v for k, v in result.norms.items()},
        "final_time": result.times[-1],
    }
    if extra:
        doc.update(extra)
    gio.write_json(_out_path(args, rc.json), doc)


def _cmd_simulate(rc, args) -> int:
    cfg = rc.model_config()
    lattice = rc.lattice()
    icfg = rc.integrator_config()
    schedules = rc.schedules()
    rho0 = _initial_field(rc, cfg, lattice, schedules)
    path = _make_path(rc, cfg, rc.T, icfg.dt)
    try:
        result = simulate(rho0, path, rc.T, icfg, cfg, schedules)
    except BlowupAbort as exc:
        if exc.result is not None:
            _write_sim_artifacts(
                rc, args, exc.result,
                extra={"aborted": True, "abort_time": exc.t, "abort_growth": exc.growth},
            )
        print(f"FAIL simulate (blowup abort): {exc}")
        return 1
    _write_sim_artifacts(rc, args, result, extra={"aborted": False})
    print(f"simulated to T = {result.times[-1]:g} with {len(result.states)} snapshots")
    return 0


def _cmd_verify_decay(rc, args) -> int:
    cfg = rc.model_config()
    lattice = rc.lattice()
    icfg = rc.integrator_config()
    schedules = rc.schedules()
    try:
        from .model import compute_zeta

        zeta = compute_zeta(cfg)
    except TailBoundError as exc:
        print(f"FAIL verify-decay: {exc}")
        return 1
    if not zeta.value > 0:
        print(f"FAIL verify-decay: zeta = {zeta.value} is not positive")
        return 1
    rho0 = _initial_field(rc, cfg, lattice, schedules)
    paths = _collect_omega_paths(
        cfg, rc.T, icfg.dt, rc.seed, rc.n_omega_paths, rc.max_path_attempts
    )
    label = schedules[0].label
    slack = rc.decay_pointwise_slack
    fit_cap = -0.5 * zeta.value + rc.decay_fit_slack * zeta.value
    verdicts = []
    all_ok = True
    for idx, path in enumerate(paths):
        result = simulate(rho0, path, rc.T, icfg, cfg, schedules)
        series = series_from_result(result)[0]
        bound = slack * series.values[0] * np.exp(-0.5 * zeta.value * series.times)
        pointwise_ok = bool((series.values <= bound).all())
        fit = fit_decay(series)
        fit_ok = fit.rate <= fit_cap
        mono = monotonicity_check(series)
        ok = pointwise_ok and fit_ok
        all_ok = all_ok and ok
        verdicts.append(
            {
                "path_index": idx,
                "pointwise_ok": pointwise_ok,
                "fit_rate": fit.rate,
                "fit_ok": fit_ok,
                "monotone": mono.monotone,
            }
        )
    doc = {
        "zeta": zeta.value,
        "zeta_bracket": [zeta.lower, zeta.upper],
        "norm_label": label,
        "required_rate": fit_cap,
        "n_paths": len(paths),
        "verdicts": verdicts,
        "passed": all_ok,
    }
    gio.write_json(_out_path(args, rc.json), doc)
    for v in verdicts:
        status = "ok" if (v["pointwise_ok"] and v["fit_ok"]) else "FAIL"
        print(
            f"path {v['path_index']}: pointwise={v['pointwise_ok']} "
            f"rate={v['fit_rate']:.4f} (cap {fit_cap:.4f}) [{status}]"
        )
    if not all_ok:
        print("FAIL verify-decay: exponential-decay bound violated")
        return 1
    print(f"PASS verify-decay on {len(paths)} barrier-event paths")
    return 0


def _cmd_property_suite(rc, args) -> int:
    cfg = rc.model_config()
    lattice = rc.lattice()
    failures = []

    emb = embedding_suite(n_fields=rc.property_fields, seed=rc.seed)
    if emb.violations:
        failures.append(f"embedding suite: {emb.violations} violations")

    rng = np.random.default_rng(rc.seed)
    conv_worst = 0.0
    for _ in range(20):
        f = random_hermitian_field(lattice, rng.integers(2**63))
        g = random_hermitian_field(lattice, rng.integers(2**63))
        direct = convolve_product(f, g, method="direct")
        fast = convolve_product(f, g, method="fft")
        scale = max(float(np.abs(direct.coeffs).max()), 1e-300)
        conv_worst = max(
            conv_worst, float(np.abs(fast.coeffs - direct.coeffs).max()) / scale
        )
    if conv_worst > 1e-12:
        failures.append(f"convolution oracle: fast-vs-direct rel diff {conv_worst:.3e}")

    shape = bilinear_shape_report(cfg, lattice, n_samples=200, seed=rc.seed)

    resc_icfg = IntegratorConfig(dt=rc.dt, scheme="exp_heun", snapshot_stride=10)
    rho0 = _initial_field(rc, cfg, lattice, rc.schedules())
    resc_T = max(rc.dt, math.floor(min(rc.T, 0.2) / rc.dt) * rc.dt)
    path = sample_path(resc_T, rc.dt, rc.seed)
    resc = rescale_equivalence_check(cfg, 4.0, path, rho0, resc_T, resc_icfg)
    if resc > 1e-8:
        failures.append(f"rescaling equivalence: discrepancy {resc:.3e} > 1e-8")

    doc = {
        "embedding": emb.to_dict(),
        "convolution_rel_diff": conv_worst,
        "bilinear_shape": shape.to_dict(),
        "rescale_discrepancy": resc,
        "failures": failures,
    }
    gio.write_json(_out_path(args, rc.json), doc)
    print(
        f"embeddings: {emb.violations} violations / {emb.n_fields} fields; "
        f"conv rel diff {conv_worst:.2e}; shape ratio {shape.max_ratio:.3f} "
        f"(reported); rescale {resc:.2e}"
    )
    if failures:
        for msg in failures:
            print(f"FAIL property-suite: {msg}")
        return 1
    print("PASS property-suite")
    return 0


def _cmd_picard_compare(rc, args) -> int:
    cfg = rc.model_config()
    lattice = rc.lattice()
    schedules = rc.schedules()
    refine = max(2, rc.picard_refine)
    fine_dt = rc.dt / refine
    path = _make_path(rc, cfg, rc.T, fine_dt)
    rho0 = _initial_field(rc, cfg, lattice, schedules)
    quad_points = int(round(rc.T / fine_dt))
    oracle = picard_solve(rho0, path, rc.T, rc.picard_n_iter, quad_points, cfg)

    def heun_terminal(dt):
        icfg = IntegratorConfig(dt=dt, scheme="exp_heun", snapshot_stride=10**9)
        return simulate(rho0, path, rc.T, icfg, cfg).final.rho

    diff_dt = float(
        np.abs(heun_terminal(rc.dt).coeffs - oracle.field.coeffs).max()
    )
    diff_half = float(
        np.abs(heun_terminal(rc.dt / 2.0).coeffs - oracle.field.coeffs).max()
    )
    order = math.log2(diff_dt / diff_half) if diff_half > 0 else math.inf
    ok = diff_dt <= rc.picard_tol and order >= 1.0
    doc = {
        "terminal_diff": diff_dt,
        "terminal_diff_half_step": diff_half,
        "observed_order": order,
        "tolerance": rc.picard_tol,
        "distances": list(oracle.distances),
        "passed": ok,
    }
    gio.write_json(_out_path(args, rc.json), doc)
    print(
        f"terminal diff {diff_dt:.3e} (tol {rc.picard_tol:g}), "
        f"half-step diff {diff_half:.3e}, observed order {order:.2f}"
    )
    if not ok:
        print("FAIL picard-compare: oracle agreement or convergence order violated")
        return 1
    print("PASS picard-compare")
    return 0


_HANDLERS = {
    "params": _cmd_params,
    "omega-mc": _cmd_omega_mc,
    "simulate": _cmd_simulate,
    "verify-decay": _cmd_verify_decay,
    "property-suite": _cmd_property_suite,
    "picard-compare": _cmd_picard_compare,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="gevrey-flow",
        description="Pseudospectral simulator and verification suite for the "
        "random-diffusion active scalar flow on the torus.",
    )
    parser.add_argument("command", choices=sorted(_HANDLERS))
    parser.add_argument("--config", required=True, help="path to the run config file")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--out", default=".", help="artifact output directory")
    args = parser.parse_args(argv)
    try:
        rc = load_config(args.config)
        if args.seed is not None:
            rc = rc.with_seed(args.seed)
        return _HANDLERS[args.command](rc, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
