"""Post-processing: decay verdicts, norm-inequality suites and coupled checks.

The embedding suite checks weighted-norm inequalities whose constants are
explicit on a finite mode box, so violations are implementation bugs by
definition and the gate is zero-tolerance (1e-12 relative).  Inequalities
whose sharp constants are only implicit are evaluated with rigorous
lattice-level constants (finite Hoelder sums, exact quadrature) and their
empirical tightness is reported, never asserted against an external value.
"""

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ._kernels import _pair_table
from .dynamics import (
    IntegratorConfig,
    NormSchedule,
    SimState,
    SimulationResult,
    bilinear_B,
    simulate,
)
from .model import ModelConfig, ZetaResult, compute_zeta, rescale_mass
from .spectral import (
    INF,
    GevreyNormSpec,
    Lattice,
    SpectralField,
    TWO_PI,
    _embed_padded,
    as_summability,
    fourier_lebesgue_norm,
    gevrey_norm,
    random_hermitian_field,
)


# ---------------------------------------------------------------------------
# norm series and decay fits
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class NormSeries:
    """Time series of one tracked norm along a simulation."""

    times: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.shape != v.shape or t.ndim != 1:
            raise ValueError("times and values must be equal-length 1-d arrays")
        if t.size >= 2 and not (np.diff(t) > 0).all():
            raise ValueError("times must be strictly increasing")
        if (v < 0).any():
            raise ValueError("norm values must be nonnegative")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)


def series_from_result(result: SimulationResult) -> list:
    return [
        NormSeries(times=result.times, values=vals, label=label)
        for label, vals in result.norms.items()
    ]


@dataclass(frozen=True)
class DecayFit:
    rate: float
    stderr: float
    ci: tuple
    window: tuple

    def to_dict(self):
        return {
            "rate": self.rate,
            "stderr": self.stderr,
            "ci": list(self.ci),
            "window": list(self.window),
        }


def fit_decay(series: NormSeries, window: Optional[tuple] = None) -> DecayFit:
    """Least-squares slope of log(norm) against time over the window."""
    t, v = series.times, series.values
    if window is not None:
        lo, hi = window
        keep = (t >= lo) & (t <= hi)
        t, v = t[keep], v[keep]
    if t.size < 10:
        raise ValueError(f"need at least 10 samples in the fit window, got {t.size}")
    if (v <= 0).any():
        raise ValueError("nonpositive norm in window")
    y = np.log(v)
    tm = t.mean()
    sxx = ((t - tm) ** 2).sum()
    slope = ((t - tm) * (y - y.mean())).sum() / sxx
    intercept = y.mean() - slope * tm
    resid = y - (intercept + slope * t)
    sigma2 = (resid**2).sum() / max(t.size - 2, 1)
    stderr = math.sqrt(sigma2 / sxx)
    return DecayFit(
        rate=float(slope),
        stderr=float(stderr),
        ci=(float(slope - 1.96 * stderr), float(slope + 1.96 * stderr)),
        window=(float(t[0]), float(t[-1])),
    )


@dataclass(frozen=True)
class MonotonicityVerdict:
    monotone: bool
    first_violation_index: Optional[int]
    first_violation_time: Optional[float]

    def to_dict(self):
        return {
            "monotone": self.monotone,
            "first_violation_index": self.first_violation_index,
            "first_violation_time": self.first_violation_time,
        }


def monotonicity_check(series: NormSeries, rel_tol: float = 1e-10) -> MonotonicityVerdict:
    """True iff the series is nonincreasing up to ``rel_tol`` relative."""
    v = series.values
    for i in range(v.size - 1):
        if v[i + 1] > v[i] * (1.0 + rel_tol) + 1e-300:
            return MonotonicityVerdict(False, i + 1, float(series.times[i + 1]))
    return MonotonicityVerdict(True, None, None)


def smallness_margin(
    state: SimState,
    spec: GevreyNormSpec,
    cfg: ModelConfig,
    smallness_constant: float = 1.0,
    zeta: Optional[ZetaResult] = None,
    zeta_tol: float = 1e-9,
) -> float:
    """zeta/(2 C |M|) minus the current weighted norm; positive = inside the regime."""
    if zeta is None:
        zeta = compute_zeta(cfg, tol=zeta_tol)
    if not zeta.value > 0:
        raise ValueError(f"no positive decay margin (zeta = {zeta.value})")
    threshold = zeta.value / (2.0 * smallness_constant * cfg.matrix.op_norm)
    return threshold - gevrey_norm(state.rho, spec)


# ---------------------------------------------------------------------------
# embedding suite
# ---------------------------------------------------------------------------
def _collocation_values(coeffs: np.ndarray, lattice: Lattice, n_grid: int) -> np.ndarray:
    """Field values on an n_grid^d collocation grid (inverse transform)."""
    padded = _embed_padded(coeffs, lattice, n_grid)
    return np.fft.ifftn(padded) * (n_grid**lattice.d / TWO_PI**lattice.d)


def _lq_norm(coeffs, lattice, sigma, q, n_grid):
    """L^q norm of |grad|^sigma f via collocation quadrature."""
    weights = lattice.mode_norms_pow(sigma).copy()
    weights[lattice.zero_index] = 0.0 if sigma != 0 else 1.0
    vals = np.abs(_collocation_values(coeffs * weights, lattice, n_grid))
    cell = (TWO_PI / n_grid) ** lattice.d
    if q == 1:
        return float(vals.sum() * cell)
    return float(((vals**q).sum() * cell) ** (1.0 / q))


def holder_embedding_constant(
    lattice: Lattice, p: float, r, eps: float = 0.01
) -> tuple:
    """Exact finite-box constant for the p < r Fourier-Lebesgue embedding.

    Returns (delta, C) with delta = d (1/p - 1/r) + eps such that
    ||f||_{sigma, p} <= C ||f||_{sigma + delta, r} for every field on the
    lattice, by Hoelder over the nonzero modes.
    """
    r_inv = 0.0 if r is INF else 1.0 / float(r)
    delta = lattice.d * (1.0 / p - r_inv) + eps
    kn = lattice.mode_norms
    kn = kn[kn > 0]
    if r is INF:
        c = float((kn ** (-delta * p)).sum() ** (1.0 / p))
    else:
        rr = float(r)
        expo = delta * p * rr / (rr - p)
        c = float((kn**-expo).sum() ** ((rr - p) / (rr * p)))
    return delta, c


@dataclass(frozen=True)
class EmbeddingReport:
    n_fields: int
    violations: int
    max_ratios: dict
    details: tuple

    def to_dict(self):
        return {
            "n_fields": self.n_fields,
            "violations": self.violations,
            "max_ratios": self.max_ratios,
            "details": list(self.details),
        }


_SUITE_LATTICES = (Lattice(1, 16), Lattice(1, 8), Lattice(2, 6))
_SUITE_RS = (1.0, 1.5, 2.0, 3.0, INF)


def embedding_suite(n_fields: int = 1000, seed: int = 0, tol: float = 1e-12) -> EmbeddingReport:
    """Run the weighted-norm inequality families on random zero-mean fields.

    Families: radius/regularity monotonicity, the factorial radius-smoothing
    trade, the p < r summability embedding (exact lattice Hoelder constant),
    and the physical-space comparisons at p = 2 (exact quadrature, constant
    (2 pi)^{d/2}) and p = infinity (constant 1).  A violation is an excess
    beyond ``tol`` relative; zero violations is the pass condition.
    """
    rng = np.random.default_rng(seed)
    ratios = {
        "radius_monotone": 0.0,
        "radius_smoothing_trade": 0.0,
        "summability_embedding": 0.0,
        "phys_l2": 0.0,
        "phys_linf": 0.0,
    }
    violations = 0
    details = []

    def check(name, lhs, rhs):
        nonlocal violations
        if rhs > 0:
            ratios[name] = max(ratios[name], lhs / rhs)
        if lhs > rhs * (1.0 + tol) + 1e-300:
            violations += 1
            details.append(f"{name}: lhs={lhs!r} rhs={rhs!r}")

    for i in range(n_fields):
        lattice = _SUITE_LATTICES[i % len(_SUITE_LATTICES)]
        f = random_hermitian_field(
            lattice, rng.integers(2**63), decay=rng.uniform(0.2, 1.0)
        )
        s = rng.uniform(0.6, 1.0)
        r = _SUITE_RS[int(rng.integers(len(_SUITE_RS)))]
        a = rng.uniform(0.0, 2.0)
        da = rng.uniform(0.01, 1.0)
        kappa = rng.uniform(-1.0, 2.0)
        dk = rng.uniform(0.0, 2.0)

        # radius/regularity monotonicity with constant e^{a - a'}
        lhs = gevrey_norm(f, GevreyNormSpec(a, kappa, r, s))
        rhs = math.exp(-da) * gevrey_norm(f, GevreyNormSpec(a + da, kappa + dk, r, s))
        check("radius_monotone", lhs, rhs)

        # trade radius for regularity with the factorial constant
        n_ceil = math.ceil(dk)
        const = math.factorial(n_ceil) / da**n_ceil
        lhs = gevrey_norm(f, GevreyNormSpec(a, kappa + dk, r, s))
        rhs = const * gevrey_norm(f, GevreyNormSpec(a + da, kappa, r, s))
        check("radius_smoothing_trade", lhs, rhs)

        # p < r summability embedding with the exact lattice constant
        sigma = rng.uniform(0.0, 1.5)
        p = float(rng.choice([1.0, 1.5, 2.0]))
        r_big = (INF, 2.0, 3.0)[int(rng.integers(3))]
        if r_big is not INF and float(r_big) <= p:
            r_big = INF
        delta, c_holder = holder_embedding_constant(lattice, p, r_big)
        lhs = fourier_lebesgue_norm(f, sigma, p)
        rhs = c_holder * fourier_lebesgue_norm(f, sigma + delta, r_big)
        check("summability_embedding", lhs, rhs)

        # physical-space comparisons (zero-mean field required)
        n_exact = 4 * lattice.K + 2
        lhs = fourier_lebesgue_norm(f, sigma, 2.0)
        rhs = TWO_PI ** (lattice.d / 2.0) * _lq_norm(f.coeffs, lattice, sigma, 2.0, n_exact)
        check("phys_l2", lhs, rhs)

        n_fine = 8 * (2 * lattice.K + 1)
        lhs = fourier_lebesgue_norm(f, sigma, INF)
        rhs = _lq_norm(f.coeffs, lattice, sigma, 1.0, n_fine)
        check("phys_linf", lhs, rhs)

    return EmbeddingReport(
        n_fields=n_fields,
        violations=violations,
        max_ratios=ratios,
        details=tuple(details[:20]),
    )


# ---------------------------------------------------------------------------
# bilinear bound shape (reported, never asserted against an external value)
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class BilinearShapeReport:
    max_ratio: float
    n_samples: int
    phi: float
    note: str = "empirical bound; reported only"

    def to_dict(self):
        return {
            "max_ratio": self.max_ratio,
            "n_samples": self.n_samples,
            "phi": self.phi,
            "note": self.note,
        }


def bilinear_shape_report(
    cfg: ModelConfig,
    lattice: Lattice,
    n_samples: int = 1000,
    seed: int = 0,
    phi: float = 0.3,
) -> BilinearShapeReport:
    """Ratio of the weighted bilinear output to its convolution-type majorant.

    Samples random field pairs and barrier-compatible multiplier arguments
    tau <= phi and records the largest observed ratio

        |e^{phi |k|^s} F(B(f,g))(k)|
        -----------------------------------------------------------
        |M| sum_{j != 0} |k| |j|^{1-gamma} e^{phi|k-j|^s} |fhat(k-j)|
                                           e^{phi |j|^s} |ghat(j)|
    """
    rng = np.random.default_rng(seed)
    idx, ok = _pair_table(lattice.d, lattice.K)
    kn = lattice.mode_norms
    ks = lattice.mode_norms_pow(cfg.s)
    wphi = np.exp(phi * ks)
    jpow = np.zeros_like(kn)
    np.power(kn, 1.0 - cfg.gamma, where=kn > 0, out=jpow)
    op_norm = cfg.matrix.op_norm
    max_ratio = 0.0
    fields_per_sample = max(1, n_samples // 50)
    done = 0
    while done < n_samples:
        f = random_hermitian_field(lattice, rng.integers(2**63), decay=rng.uniform(0.3, 1.0))
        g = random_hermitian_field(lattice, rng.integers(2**63), decay=rng.uniform(0.3, 1.0))
        fw = wphi * np.abs(f.coeffs)
        gw = wphi * np.abs(g.coeffs) * jpow
        denom = op_norm * kn * (np.where(ok, fw[idx] * gw[None, :], 0.0).sum(axis=1))
        for _ in range(fields_per_sample):
            if done >= n_samples:
                break
            tau = rng.uniform(-0.5, phi)
            b = bilinear_B(f, g, tau, cfg, method="direct")
            numer = wphi * np.abs(b.coeffs)
            keep = denom > 0
            if keep.any():
                max_ratio = max(max_ratio, float((numer[keep] / denom[keep]).max()))
            done += 1
    return BilinearShapeReport(max_ratio=max_ratio, n_samples=n_samples, phi=phi)


# ---------------------------------------------------------------------------
# per-mode dissipation residuals
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class DissipationReport:
    max_scaled_residual: float
    h: float
    n_pairs: int

    def to_dict(self):
        return {
            "max_scaled_residual": self.max_scaled_residual,
            "h": self.h,
            "n_pairs": self.n_pairs,
        }


def dissipation_check(result: SimulationResult, max_pairs: int = 50) -> DissipationReport:
    """Finite-difference check of the per-mode decay inequality on snapshots.

    For consecutive snapshots at distance h the quotient of
    y_k = |e^{phi |k|^s} rho_hat(k)| must not exceed
    -rate(k) y_k + |e^{phi |k|^s} F(B)(k)| beyond an O(h) discretisation
    allowance; the report returns the largest residual scaled by
    h (1 + |rate|)^2 (y + b).
    """
    cfg, icfg = result.cfg, result.icfg
    lat = result.states[0].rho.lattice
    ks = lat.mode_norms_pow(cfg.s)
    kn = lat.mode_norms
    ghat_re = np.real(cfg.kernel.ghat(lat.modes, kn))
    quad = cfg.matrix.quad_form(lat.modes)
    rate = 0.5 * cfg.nu**2 * kn ** (2 * cfg.s) - cfg.beta * ks - cfg.mass * ghat_re * quad

    states = result.states
    step = max(1, (len(states) - 1) // max_pairs)
    worst = 0.0
    n_pairs = 0
    for i in range(0, len(states) - 1, step):
        s0, s1 = states[i], states[i + 1]
        h = s1.t - s0.t
        w0 = np.exp(s0.phi * ks)
        w1 = np.exp(s1.phi * ks)
        y0 = w0 * np.abs(s0.rho.coeffs)
        y1 = w1 * np.abs(s1.rho.coeffs)
        b = bilinear_B(
            s0.rho, s0.rho, s0.w, cfg, method="direct", cap=icfg.overflow_cap,
            dealias=icfg.dealias,
        )
        bnl = w0 * np.abs(b.coeffs)
        residual = (y1 - y0) / h + rate * y0 - bnl
        scale = h * (1.0 + np.abs(rate)) ** 2 * (y0 + bnl) + 1e-300
        worst = max(worst, float((residual / scale).max()))
        n_pairs += 1
    return DissipationReport(max_scaled_residual=worst, h=float(states[1].t - states[0].t), n_pairs=n_pairs)


# ---------------------------------------------------------------------------
# mass-rescaling equivalence
# ---------------------------------------------------------------------------
def rescale_equivalence_check(
    cfg: ModelConfig,
    m: float,
    path,
    rho0: SpectralField,
    T: float,
    icfg: IntegratorConfig,
) -> float:
    """Max coefficient discrepancy between a run and its mass-m reduction.

    Simulates (cfg, path) over [0, T] and the transformed configuration over
    [0, m T] on the mapped path/step, then compares the rescaled deviation
    fields at shared snapshot times.  The two discrete flows are exactly
    conjugate, so the discrepancy measures implementation error only.
    """
    cfg_m, resc = rescale_mass(cfg, m)
    path_m = resc.transform_path(path)
    icfg_m = IntegratorConfig(
        dt=m * icfg.dt,
        scheme=icfg.scheme,
        dealias=icfg.dealias,
        overflow_cap=icfg.overflow_cap,
        blowup_factor=icfg.blowup_factor,
        snapshot_stride=icfg.snapshot_stride,
        bilinear_method=icfg.bilinear_method,
        suppress_bilinear=icfg.suppress_bilinear,
        enforce_zero_mode=icfg.enforce_zero_mode,
    )
    base = simulate(rho0, path, T, icfg, cfg)
    scaled = simulate(rho0 * (1.0 / m), path_m, m * T, icfg_m, cfg_m)
    if len(base.states) != len(scaled.states):
        raise RuntimeError("snapshot streams of the coupled runs do not align")
    worst = 0.0
    for s_base, s_scaled in zip(base.states, scaled.states):
        diff = np.abs(s_scaled.rho.coeffs - s_base.rho.coeffs / m).max()
        worst = max(worst, float(diff))
    return worst
