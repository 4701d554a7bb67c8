"""Time integration of the transformed evolution equation.

The unknown is the spectral deviation field rho = mu - mass (zero mean).  Its
pathwise dynamics combine a linear semigroup with symbol

    m(k) = nu^2 |k|^{2s} / 2 - mass (k . M k) ghat(k)

and the bilinear transport term

    F(B(f, g))(k) = -(2 pi)^{-d} e^{-tau |k|^s}
                    sum_j (k . M j) ghat(j)
                    e^{tau (|k-j|^s + |j|^s)} fhat(k-j) ghat_field(j),

where tau = nu W(t) is the Brownian multiplier argument.  The reference path
fuses the three exponentials per (k, j) term into
``exp(tau (|k-j|^s + |j|^s - |k|^s))``, whose exponent is sign-definite in
tau (subadditivity of |.|^s for s <= 1), so it never overflows for tau <= 0.
The fast path applies the three multipliers separately around a padded-FFT
product and therefore carries its own overflow guard.

Steppers discretise the Duhamel form: exponential Euler and an exponential
Heun (trapezoidal) corrector.  W is only ever evaluated at grid points of the
supplied path, so runs are pathwise reproducible.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ._backend import USE_NUMBA
from ._kernels import bilinear_direct
from .brownian import BrownianPath
from .errors import BlowupAbort, LatticeMismatchError, OffOmegaWarning, OverflowRiskError
from .errors import NonContractionWarning
from .model import ModelConfig, linear_symbols
from .spectral import (
    TWO_PI,
    GevreyNormSpec,
    INF,
    Lattice,
    RValue,
    SpectralField,
    _conv_fft,
    as_summability,
    dealias_truncate,
    gevrey_norm,
    hermitian_project,
)

DEFAULT_OVERFLOW_CAP = 200.0


@dataclass(frozen=True)
class IntegratorConfig:
    """Stepper parameters plus the test hooks used by the verification suite."""

    dt: float
    scheme: str = "exp_heun"
    dealias: bool = False
    overflow_cap: float = DEFAULT_OVERFLOW_CAP
    blowup_factor: float = 1e8
    snapshot_stride: int = 1
    bilinear_method: str = "auto"
    suppress_bilinear: bool = False
    enforce_zero_mode: bool = True

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"step size must be positive, got {self.dt}")
        if self.scheme not in ("exp_euler", "exp_heun"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.bilinear_method not in ("auto", "direct", "fast"):
            raise ValueError(f"unknown bilinear method {self.bilinear_method!r}")
        if self.snapshot_stride < 1:
            raise ValueError("snapshot stride must be >= 1")
        if not self.blowup_factor > 1:
            raise ValueError("blowup factor must exceed 1")


@dataclass(frozen=True)
class SimState:
    """One snapshot of the evolution.

    ``w`` caches nu * W(t) (the multiplier argument at this time) and
    ``phi`` the barrier value alpha + beta t.
    """

    t: float
    rho: SpectralField
    w: float
    phi: float


@dataclass(frozen=True)
class NormSchedule:
    """A Gevrey norm tracked along a run.

    mode "phi": radius a(t) = alpha + beta t + offset (the barrier schedule
    with margin ``offset``); mode "fixed": constant radius a(t) = offset.
    """

    kappa: float
    r: RValue
    mode: str = "phi"
    offset: float = 0.0

    def __post_init__(self):
        if self.mode not in ("phi", "fixed"):
            raise ValueError(f"unknown norm schedule mode {self.mode!r}")
        object.__setattr__(self, "r", as_summability(self.r))
        if self.mode == "fixed" and self.offset < 0:
            raise ValueError("fixed radius must be >= 0")

    def radius(self, cfg: ModelConfig, t: float) -> float:
        if self.mode == "phi":
            return cfg.alpha + cfg.beta * t + self.offset
        return self.offset

    def spec(self, cfg: ModelConfig, t: float) -> GevreyNormSpec:
        return GevreyNormSpec(a=self.radius(cfg, t), kappa=self.kappa, r=self.r, s=cfg.s)

    @property
    def label(self) -> str:
        r_str = "inf" if self.r is INF else f"{float(self.r):g}"
        if self.mode == "phi":
            return f"norm_phi{self.offset:+g}_k{self.kappa:g}_r{r_str}"
        return f"norm_a{self.offset:g}_k{self.kappa:g}_r{r_str}"


# ---------------------------------------------------------------------------
# multipliers and the bilinear operator
# ---------------------------------------------------------------------------
def gamma_apply(
    f: SpectralField, tau: float, s: float, cap: float = DEFAULT_OVERFLOW_CAP
) -> SpectralField:
    """Apply the diffusion multiplier: coeff(k) -> e^{-tau |k|^s} coeff(k)."""
    max_exp = abs(tau) * f.lattice.max_mode_norm**s
    if max_exp > cap:
        raise OverflowRiskError(
            f"overflow risk: |tau| * max|k|^s = {max_exp:.2f} exceeds cap {cap}"
        )
    weights = np.exp(-tau * f.lattice.mode_norms_pow(s))
    return f.with_coeffs(f.coeffs * weights)


def linear_propagate(f: SpectralField, dt: float, cfg: ModelConfig) -> SpectralField:
    """Exact semigroup step: coeff(k) -> e^{-dt m(k)} coeff(k)."""
    if dt < 0:
        raise ValueError(f"propagation time must be >= 0, got {dt}")
    symbols = linear_symbols(f.lattice.modes, cfg)
    return f.with_coeffs(f.coeffs * np.exp(-dt * symbols))


class _BilinearWork:
    """Per-(lattice, cfg) constants reused across bilinear evaluations."""

    def __init__(self, lattice: Lattice, cfg: ModelConfig):
        self.lattice = lattice
        self.cfg = cfg
        self.ks = lattice.mode_norms_pow(cfg.s)
        self.ghat = cfg.kernel.ghat(lattice.modes, lattice.mode_norms)
        self.max_s = lattice.max_mode_norm**cfg.s
        self.scale = TWO_PI**-lattice.d
        self.modes_f = lattice.modes.astype(float)
        self.m_cols = self.modes_f @ cfg.matrix.entries.T  # row j -> (M j)
        self.dealias_mask = lattice.dealias_mask()


def _bilinear_raw(
    fc: np.ndarray,
    gc: np.ndarray,
    tau: float,
    work: _BilinearWork,
    method: str,
    cap: float,
    dealias: bool,
    real: bool,
) -> np.ndarray:
    lat, cfg = work.lattice, work.cfg
    if dealias:
        fc = np.where(work.dealias_mask, fc, 0.0)
        gc = np.where(work.dealias_mask, gc, 0.0)
    # reference path: fused exponent <= 2 max(tau,0) max|k|^s
    can_direct = max(tau, 0.0) * 2.0 * work.max_s <= cap
    # fast path: split multipliers reach e^{|tau| max|k|^s}
    can_fast = abs(tau) * work.max_s <= cap
    if method == "auto":
        if USE_NUMBA and lat.d == 1 and can_direct:
            method = "direct"
        elif can_fast:
            method = "fast"
        elif can_direct:
            method = "direct"
        else:
            raise OverflowRiskError(
                f"overflow risk: tau = {tau} breaks both bilinear guards at cap {cap}"
            )
    if method == "direct":
        if not can_direct:
            raise OverflowRiskError(
                "overflow risk: tau * max(|k-j|^s + |j|^s - |k|^s) = "
                f"{max(tau, 0.0) * 2.0 * work.max_s:.2f} exceeds cap {cap}"
            )
        return bilinear_direct(
            fc, gc, lat.modes, work.ks, work.ghat, cfg.matrix.entries, tau,
            lat.K, work.scale,
        )
    if method == "fast":
        if not can_fast:
            raise OverflowRiskError(
                f"overflow risk: |tau| * max|k|^s = {abs(tau) * work.max_s:.2f} "
                f"exceeds cap {cap}"
            )
        e_plus = np.exp(tau * work.ks)
        u = fc * e_plus
        acc = np.zeros(lat.n_modes, dtype=np.complex128)
        for a in range(lat.d):
            v = 1j * work.m_cols[:, a] * work.ghat * e_plus * gc
            conv = _conv_fft(u, v, lat)
            acc += 1j * work.modes_f[:, a] * conv
        out = np.exp(-tau * work.ks) * acc
        if real:
            out = hermitian_project(out)
        return out
    raise ValueError(f"unknown bilinear method {method!r}")


def bilinear_B(
    f: SpectralField,
    g: SpectralField,
    tau: float,
    cfg: ModelConfig,
    method: str = "auto",
    cap: float = DEFAULT_OVERFLOW_CAP,
    dealias: bool = False,
) -> SpectralField:
    """The transport bilinear form at multiplier argument tau = nu W(t).

    ``method="direct"`` is the fused-exponential double loop (the reference);
    ``method="fast"`` applies the three multipliers around an exact padded-FFT
    product.  ``"auto"`` picks the cheapest path whose overflow guard holds.
    """
    if f.lattice != g.lattice:
        raise LatticeMismatchError("lattice mismatch")
    if f.lattice.d != cfg.d:
        raise ValueError(
            f"field dimension {f.lattice.d} does not match config d={cfg.d}"
        )
    work = _BilinearWork(f.lattice, cfg)
    real = f.real_valued and g.real_valued
    out = _bilinear_raw(f.coeffs, g.coeffs, tau, work, method, cap, dealias, real)
    return SpectralField(f.lattice, out, real)


# ---------------------------------------------------------------------------
# time stepping
# ---------------------------------------------------------------------------
class _StepWork:
    """Precomputed semigroup factor and bilinear constants for a fixed step."""

    def __init__(self, lattice: Lattice, cfg: ModelConfig, icfg: IntegratorConfig):
        self.bilinear = _BilinearWork(lattice, cfg)
        self.e_dt = np.exp(-icfg.dt * linear_symbols(lattice.modes, cfg))


def etd_step(
    state: SimState,
    path: BrownianPath,
    icfg: IntegratorConfig,
    cfg: ModelConfig,
    _work: Optional[_StepWork] = None,
) -> SimState:
    """One exponential-integrator step from state.t to state.t + dt.

    Both step endpoints must lie on the path grid; W is never interpolated.
    """
    dt = icfg.dt
    t1 = state.t + dt
    w1 = cfg.nu * path.value_at(t1)
    work = _work if _work is not None else _StepWork(state.rho.lattice, cfg, icfg)
    real = state.rho.real_valued
    c = state.rho.coeffs

    def bilin(coeffs, tau):
        return _bilinear_raw(
            coeffs, coeffs, tau, work.bilinear,
            icfg.bilinear_method, icfg.overflow_cap, icfg.dealias, real,
        )

    if icfg.suppress_bilinear:
        new = work.e_dt * c
    elif icfg.scheme == "exp_euler":
        b0 = bilin(c, state.w)
        new = work.e_dt * (c - dt * b0)
    else:  # exp_heun
        b0 = bilin(c, state.w)
        pred = work.e_dt * (c - dt * b0)
        b1 = bilin(pred, w1)
        new = work.e_dt * c - (0.5 * dt) * (work.e_dt * b0 + b1)
    zi = state.rho.lattice.zero_index
    if icfg.enforce_zero_mode and new[zi] != 0.0:
        new = new.copy()
        new[zi] = 0.0
    rho1 = SpectralField(state.rho.lattice, new, real)
    return SimState(t=t1, rho=rho1, w=w1, phi=cfg.alpha + cfg.beta * t1)


@dataclass(frozen=True)
class SimulationResult:
    """Snapshot stream of one run plus the tracked norm series."""

    states: tuple
    times: np.ndarray
    norms: dict
    schedules: tuple
    cfg: ModelConfig
    icfg: IntegratorConfig
    path: BrownianPath

    @property
    def final(self) -> SimState:
        return self.states[-1]


def _monitor_value(state: SimState, cfg, schedules) -> float:
    if schedules:
        return gevrey_norm(state.rho, schedules[0].spec(cfg, state.t))
    return float(np.sqrt((np.abs(state.rho.coeffs) ** 2).sum()))


def simulate(
    rho0: SpectralField,
    path: BrownianPath,
    T: float,
    icfg: IntegratorConfig,
    cfg: ModelConfig,
    schedules: Sequence[NormSchedule] = (),
) -> SimulationResult:
    """Integrate the deviation field over [0, T] along the supplied path.

    Snapshots (with phi(t) and nu W(t) attached) are stored every
    ``icfg.snapshot_stride`` steps.  The first tracked norm schedule (or the
    ell^2 coefficient norm when none is given) is monitored for blowup: growth
    beyond ``icfg.blowup_factor`` times its initial value aborts the run with
    a ``BlowupAbort`` carrying the partial result.
    """
    if rho0.mean_coeff != 0.0:
        raise ValueError("initial deviation field must have zero mean")
    path_dt = path.dt
    stride = int(round(icfg.dt / path_dt))
    if stride < 1 or abs(stride * path_dt - icfg.dt) > 1e-9 * icfg.dt:
        raise ValueError(
            f"integrator step {icfg.dt} is not a multiple of the path grid {path_dt}"
        )
    n_steps = int(round(T / icfg.dt))
    if abs(n_steps * icfg.dt - T) > 1e-9 * max(T, 1.0):
        raise ValueError(f"horizon {T} is not a multiple of the step {icfg.dt}")
    if T > path.horizon + 1e-9:
        raise ValueError(f"path horizon {path.horizon} does not cover T = {T}")

    schedules = tuple(schedules)
    work = _StepWork(rho0.lattice, cfg, icfg)
    state = SimState(t=0.0, rho=rho0, w=cfg.nu * path.values[0], phi=cfg.alpha)
    states = [state]
    times = [0.0]
    norm_values = {sched.label: [] for sched in schedules}

    def record(st: SimState):
        for sched in schedules:
            norm_values[sched.label].append(gevrey_norm(st.rho, sched.spec(cfg, st.t)))

    record(state)
    monitor0 = _monitor_value(state, cfg, schedules)
    warned_off_omega = False

    for n in range(1, n_steps + 1):
        try:
            state = etd_step(state, path, icfg, cfg, _work=work)
        except ValueError as exc:
            if "finite" in str(exc):
                raise BlowupAbort(
                    f"solution left the finite range at t = {state.t + icfg.dt:g}",
                    t=state.t + icfg.dt,
                    growth=math.inf,
                    result=_package(states, times, norm_values, schedules, cfg, icfg, path),
                ) from exc
            raise
        if not warned_off_omega and state.phi - state.w < 0:
            warnings.warn(
                f"path left the barrier event at t = {state.t:g} "
                f"(phi - nuW = {state.phi - state.w:.3e})",
                OffOmegaWarning,
                stacklevel=2,
            )
            warned_off_omega = True
        if n % icfg.snapshot_stride == 0 or n == n_steps:
            states.append(state)
            times.append(state.t)
            record(state)
            if schedules:
                value = norm_values[schedules[0].label][-1]
            else:
                value = _monitor_value(state, cfg, schedules)
            if monitor0 > 0 and (
                not math.isfinite(value) or value > icfg.blowup_factor * monitor0
            ):
                growth = value / monitor0
                raise BlowupAbort(
                    f"monitored norm grew by {growth:.3e}x at t = {state.t:g} "
                    f"(threshold {icfg.blowup_factor:g}x)",
                    t=state.t,
                    growth=growth,
                    result=_package(
                        states, times, norm_values, schedules, cfg, icfg, path
                    ),
                )
    return _package(states, times, norm_values, schedules, cfg, icfg, path)


def _package(states, times, norm_values, schedules, cfg, icfg, path):
    return SimulationResult(
        states=tuple(states),
        times=np.asarray(times),
        norms={k: np.asarray(v) for k, v in norm_values.items()},
        schedules=schedules,
        cfg=cfg,
        icfg=icfg,
        path=path,
    )


# ---------------------------------------------------------------------------
# Picard fixed-point oracle
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class PicardResult:
    field: SpectralField
    distances: tuple
    node_times: np.ndarray

    @property
    def contraction_ratios(self) -> tuple:
        return tuple(
            b / a for a, b in zip(self.distances, self.distances[1:]) if a > 0
        )


def picard_solve(
    rho0: SpectralField,
    path: BrownianPath,
    T: float,
    n_iter: int,
    quad_points: int,
    cfg: ModelConfig,
    method: str = "auto",
    cap: float = DEFAULT_OVERFLOW_CAP,
    dealias: bool = False,
) -> PicardResult:
    """Iterate the Duhamel map with trapezoidal quadrature on a fine grid.

    Starts from the zero-correction initializer (the bare semigroup flow) and
    returns the final iterate at T together with the successive-iterate
    distances (sup over quadrature nodes of the ell^2 coefficient distance).
    Warns when the distances fail to decrease.
    """
    if rho0.mean_coeff != 0.0:
        raise ValueError("initial deviation field must have zero mean")
    if n_iter < 1 or quad_points < 2:
        raise ValueError("need n_iter >= 1 and quad_points >= 2")
    h = T / quad_points
    node_times = np.arange(quad_points + 1) * h
    node_idx = [path.index_of(t) for t in node_times]
    taus = cfg.nu * path.values[node_idx]

    lat = rho0.lattice
    symbols = linear_symbols(lat.modes, cfg)
    e_h = np.exp(-h * symbols)
    n_nodes = quad_points + 1

    # semigroup applied to the initial datum at every node
    flow = np.empty((n_nodes, lat.n_modes), dtype=np.complex128)
    flow[0] = rho0.coeffs
    for j in range(1, n_nodes):
        flow[j] = e_h * flow[j - 1]

    iterate = flow.copy()
    distances = []
    for _ in range(n_iter):
        b_nodes = np.empty_like(iterate)
        for j in range(n_nodes):
            field_j = SpectralField(lat, iterate[j], rho0.real_valued)
            b_nodes[j] = bilinear_B(
                field_j, field_j, float(taus[j]), cfg, method=method, cap=cap,
                dealias=dealias,
            ).coeffs
        integral = np.zeros_like(iterate)
        for j in range(1, n_nodes):
            integral[j] = e_h * integral[j - 1] + (0.5 * h) * (
                e_h * b_nodes[j - 1] + b_nodes[j]
            )
        new = flow - integral
        node_dists = np.sqrt((np.abs(new - iterate) ** 2).sum(axis=1))
        distances.append(float(node_dists.max()))
        iterate = new
    ratios = [b / a for a, b in zip(distances, distances[1:]) if a > 0]
    if any(r >= 1.0 for r in ratios):
        warnings.warn(
            "non-contraction: successive iterate distances failed to decrease "
            f"(ratios {['%.3g' % r for r in ratios]})",
            NonContractionWarning,
            stacklevel=2,
        )
    return PicardResult(
        field=SpectralField(lat, iterate[-1], rho0.real_valued),
        distances=tuple(distances),
        node_times=node_times,
    )


# ---------------------------------------------------------------------------
# recovery of the physical unknowns
# ---------------------------------------------------------------------------
def recover_mu_theta(
    state: SimState,
    cfg: ModelConfig,
    cap: float = DEFAULT_OVERFLOW_CAP,
    require_theta: bool = True,
):
    """Recover mu = mass + rho and theta = Gamma^{-1} mu from a snapshot.

    theta requires undoing the diffusion multiplier, which grows like
    e^{+w |k|^s} when w = nu W(t) > 0; past the overflow cap the recovery is
    refused (``OverflowRiskError``), or ``(mu, None)`` is returned when
    ``require_theta`` is false.
    """
    lat = state.rho.lattice
    mu_c = state.rho.coeffs.copy()
    mu_c[lat.zero_index] += cfg.mass * TWO_PI**lat.d
    mu = SpectralField(lat, mu_c, state.rho.real_valued)
    max_exp = max(state.w, 0.0) * lat.max_mode_norm**cfg.s
    if max_exp > cap:
        if require_theta:
            raise OverflowRiskError(
                f"overflow risk: theta recovery needs e^{{{max_exp:.1f}}}, "
                f"cap is e^{{{cap}}}"
            )
        return mu, None
    theta = SpectralField(
        lat, mu_c * np.exp(state.w * lat.mode_norms_pow(cfg.s)), mu.real_valued
    )
    return mu, theta
