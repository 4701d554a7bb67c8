"""Interaction kernels, the coupling matrix and every derived scalar parameter.

The dissipation-consistent sign convention is fixed here once: the decay
margin of a nonzero mode k is

    expr(k) = nu^2/2 - beta |k|^{-s} - mass * Re(ghat(k)) (k . M k) |k|^{-2s}

and ``zeta`` is its infimum over k != 0.  The plus-sign variant of the kernel
term is computed alongside (``zeta_alt``) and surfaced in every report so the
two conventions can be compared; verdicts always use the minus form above.

Infima/suprema over the infinite mode lattice are reduced to finite
enumeration plus a certified tail bracket derived from the kernel decay bound
|ghat(k)| <= C_g |k|^{-gamma}.
"""

import dataclasses
import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import TailBoundError
from .spectral import INF, Lattice, as_summability

_SIGN_NOTE = (
    "zeta uses the minus-sign kernel term consistent with the per-mode "
    "dissipation rate; zeta_alt reports the plus-sign variant of the same "
    "infimum"
)


# ---------------------------------------------------------------------------
# interaction kernels
# ---------------------------------------------------------------------------
class PowerLawKernel:
    """ghat(k) = |k|^{-gamma} with ghat(0) = 0."""

    form = "power_law"

    def __init__(self, gamma: float):
        if not gamma > 0:
            raise ValueError(f"kernel decay exponent must be positive, got {gamma}")
        self.gamma = float(gamma)

    def ghat(self, modes: np.ndarray, kn: Optional[np.ndarray] = None) -> np.ndarray:
        if kn is None:
            kn = np.sqrt((np.asarray(modes, dtype=float) ** 2).sum(axis=-1))
        out = np.zeros(kn.shape, dtype=np.complex128)
        np.power(kn, -self.gamma, where=kn > 0, out=out.real)
        return out

    def bound_constant(self) -> float:
        """C_g in |ghat(k)| <= C_g |k|^{-gamma}; exact for the power law."""
        return 1.0

    def covers(self, k_star: int) -> bool:
        return True

    def __eq__(self, other):
        return isinstance(other, PowerLawKernel) and other.gamma == self.gamma

    def __repr__(self):
        return f"PowerLawKernel(gamma={self.gamma})"


class TabulatedKernel:
    """ghat given by an explicit mode table, with a declared decay exponent.

    The table must be Hermitian (real potential); the zero mode is forced to
    zero.  Tail certificates are only available up to the largest mode box the
    table fully covers.
    """

    form = "tabulated"

    def __init__(self, gamma: float, table):
        if not gamma > 0:
            raise ValueError(f"kernel decay exponent must be positive, got {gamma}")
        self.gamma = float(gamma)
        norm = {}
        for k, v in table.items():
            key = (int(k),) if np.ndim(k) == 0 else tuple(int(a) for a in k)
            v = complex(v)
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ValueError(f"kernel value at {key} is not finite")
            norm[key] = v
        d = len(next(iter(norm))) if norm else 1
        for key, v in norm.items():
            if len(key) != d:
                raise ValueError("kernel table mixes mode dimensions")
            neg = tuple(-a for a in key)
            w = norm.get(neg)
            if w is None or abs(w - v.conjugate()) > 1e-12 * max(abs(v), 1e-300):
                raise ValueError(
                    f"kernel table is not Hermitian at mode {key}"
                )
        norm[(0,) * d] = 0.0
        self.d = d
        self.table = norm
        self.coverage = self._coverage()

    def _coverage(self) -> int:
        cover = 0
        while True:
            box = cover + 1
            ax = range(-box, box + 1)
            if self.d == 1:
                needed = [(a,) for a in ax]
            else:
                needed = [(a, b) for a in ax for b in ax]
            if all(k in self.table for k in needed):
                cover = box
            else:
                return cover

    def ghat(self, modes: np.ndarray, kn: Optional[np.ndarray] = None) -> np.ndarray:
        modes = np.asarray(modes)
        out = np.empty(modes.shape[0], dtype=np.complex128)
        for i, k in enumerate(modes):
            key = tuple(int(a) for a in np.atleast_1d(k))
            try:
                out[i] = self.table[key]
            except KeyError:
                raise ValueError(
                    f"tabulated kernel does not cover mode {key}"
                ) from None
        return out

    def bound_constant(self) -> float:
        best = 0.0
        for key, v in self.table.items():
            kn = math.sqrt(sum(a * a for a in key))
            if kn > 0:
                best = max(best, abs(v) * kn**self.gamma)
        return best

    def covers(self, k_star: int) -> bool:
        return k_star <= self.coverage

    def __repr__(self):
        return f"TabulatedKernel(gamma={self.gamma}, coverage={self.coverage})"


# ---------------------------------------------------------------------------
# coupling matrix
# ---------------------------------------------------------------------------
class InteractionMatrix:
    """Constant real d x d coupling matrix with cached structure flags."""

    def __init__(self, entries):
        arr = np.atleast_2d(np.asarray(entries, dtype=float)).copy()
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"matrix must be square, got shape {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("matrix entries must be finite")
        arr.setflags(write=False)
        self.entries = arr
        self.d = arr.shape[0]
        self.is_symmetric = bool(np.array_equal(arr, arr.T))
        self.is_antisymmetric = bool(np.array_equal(arr, -arr.T))

    @staticmethod
    def scalar(value: float) -> "InteractionMatrix":
        return InteractionMatrix([[float(value)]])

    @staticmethod
    def rotation() -> "InteractionMatrix":
        """Rotation by pi/2 in d = 2 (the Hamiltonian/antisymmetric case)."""
        return InteractionMatrix([[0.0, -1.0], [1.0, 0.0]])

    @staticmethod
    def identity(d: int, sign: float = 1.0) -> "InteractionMatrix":
        return InteractionMatrix(sign * np.eye(d))

    @property
    def op_norm(self) -> float:
        return float(np.linalg.norm(self.entries, 2))

    @property
    def sym_part(self) -> np.ndarray:
        return 0.5 * (self.entries + self.entries.T)

    @property
    def sym_op_norm(self) -> float:
        return float(np.linalg.norm(self.sym_part, 2))

    def quad_form(self, modes: np.ndarray) -> np.ndarray:
        """k . (M k) per mode row (only the symmetric part contributes)."""
        m = np.asarray(modes, dtype=float)
        return np.einsum("ia,ab,ib->i", m, self.entries, m)

    def __neg__(self):
        return InteractionMatrix(-self.entries)

    def __eq__(self, other):
        return isinstance(other, InteractionMatrix) and np.array_equal(
            self.entries, other.entries
        )

    def __repr__(self):
        return f"InteractionMatrix({self.entries.tolist()})"


# ---------------------------------------------------------------------------
# model configuration
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class ModelConfig:
    """Every parameter of the transformed evolution equation.

    ``mass`` is the mean of the conserved unknown (1 after normalisation);
    it scales the kernel term of the linear symbol, which is what makes the
    mass-rescaling equivalence an exact identity.
    """

    d: int
    s: float
    nu: float
    alpha: float
    beta: float
    epsilon: float
    matrix: InteractionMatrix
    kernel: PowerLawKernel
    mass: float = 1.0

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ValueError(f"spatial dimension must be 1 or 2, got {self.d}")
        if not 0 < self.s <= 1:
            raise ValueError(f"fractional order must lie in (0, 1], got {self.s}")
        if not self.nu >= 0:
            raise ValueError(f"diffusivity must be >= 0, got {self.nu}")
        if not self.alpha >= 0 or not self.beta >= 0:
            raise ValueError("barrier parameters alpha, beta must be >= 0")
        if not self.epsilon >= 0:
            raise ValueError(f"radius margin must be >= 0, got {self.epsilon}")
        if not self.mass > 0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        if self.matrix.d != self.d:
            raise ValueError(
                f"matrix dimension {self.matrix.d} does not match d={self.d}"
            )

    @property
    def gamma(self) -> float:
        return self.kernel.gamma

    @property
    def s_window_ok(self) -> bool:
        lo = max(0.5, (2.0 - self.gamma) / 2.0)
        return lo < self.s <= 1.0

    @property
    def config_warnings(self):
        notes = []
        if not self.s_window_ok:
            lo = max(0.5, (2.0 - self.gamma) / 2.0)
            notes.append(
                f"s={self.s} outside the admissible window ({lo}, 1]; run is exploratory"
            )
        if self.nu == 0:
            notes.append("nu=0: no diffusion, exploratory run")
        if self.alpha == 0 or self.beta == 0:
            notes.append("alpha or beta is zero: barrier event is degenerate")
        return tuple(notes)

    def replace(self, **kwargs) -> "ModelConfig":
        return dataclasses.replace(self, **kwargs)


def linear_symbol(k, cfg: ModelConfig) -> complex:
    """Symbol of the linear operator: nu^2 |k|^{2s}/2 - mass (k.Mk) ghat(k)."""
    mode = np.atleast_1d(np.asarray(k, dtype=np.int64)).reshape(1, -1)
    if mode.shape[1] != cfg.d:
        raise ValueError(f"mode must have {cfg.d} components")
    return complex(linear_symbols(mode, cfg)[0])


def linear_symbols(modes: np.ndarray, cfg: ModelConfig) -> np.ndarray:
    """Vectorised linear symbol over mode rows."""
    kn = np.sqrt((np.asarray(modes, dtype=float) ** 2).sum(axis=-1))
    diff = 0.5 * cfg.nu**2 * kn ** (2 * cfg.s)
    ghat = cfg.kernel.ghat(modes, kn)
    return diff - cfg.mass * cfg.matrix.quad_form(modes) * ghat


# ---------------------------------------------------------------------------
# derived parameters with certified brackets
# ---------------------------------------------------------------------------
_BOX_CAP = {1: 1 << 22, 2: 8192}
_BLOCK_ENTRIES = 2_000_000


def _box_mode_blocks(d: int, k_star: int):
    ax = np.arange(-k_star, k_star + 1, dtype=np.int64)
    if d == 1:
        step = _BLOCK_ENTRIES
        for lo in range(0, ax.size, step):
            yield ax[lo : lo + step, None]
    else:
        rows = max(1, _BLOCK_ENTRIES // ax.size)
        for lo in range(0, ax.size, rows):
            g1, g2 = np.meshgrid(ax[lo : lo + rows], ax, indexing="ij")
            yield np.stack([g1, g2], axis=-1).reshape(-1, 2)


def _margin_expr(cfg: ModelConfig, modes: np.ndarray, kn: np.ndarray, sign: float):
    ghat_re = np.real(cfg.kernel.ghat(modes, kn))
    quad = cfg.matrix.quad_form(modes)
    return (
        0.5 * cfg.nu**2
        - cfg.beta * kn ** (-cfg.s)
        + sign * cfg.mass * ghat_re * quad * kn ** (-2.0 * cfg.s)
    )


def _box_min(cfg: ModelConfig, k_star: int, sign: float):
    best = math.inf
    best_mode = None
    for modes in _box_mode_blocks(cfg.d, k_star):
        kn = np.sqrt((modes.astype(float) ** 2).sum(axis=-1))
        keep = kn > 0
        if not keep.any():
            continue
        vals = _margin_expr(cfg, modes[keep], kn[keep], sign)
        i = int(np.argmin(vals))
        if vals[i] < best:
            best = float(vals[i])
            best_mode = tuple(int(a) for a in modes[keep][i])
    return best, best_mode


@dataclass(frozen=True)
class ZetaResult:
    """Certified infimum of the per-mode decay margin."""

    value: float
    lower: float
    upper: float
    k_star: int
    argmin_mode: Optional[tuple]
    attained: bool

    @property
    def bracket(self):
        return (self.lower, self.upper)

    @property
    def width(self) -> float:
        return self.upper - self.lower


def _tail_epsilon(cfg: ModelConfig, k_star: int) -> float:
    c_g = cfg.kernel.bound_constant()
    return cfg.beta * k_star ** (-cfg.s) + c_g * cfg.mass * cfg.matrix.sym_op_norm * k_star ** (
        -(2.0 * cfg.s - 2.0 + cfg.gamma)
    )


def compute_zeta(
    cfg: ModelConfig,
    tol: float = 1e-9,
    k_star: Optional[int] = None,
    _sign: float = -1.0,
) -> ZetaResult:
    """Infimum over k != 0 of the decay margin, with a certified bracket.

    Enumerates the box max|k| <= K*; beyond it the margin differs from
    nu^2/2 by at most beta K*^{-s} + C_g mass |M_sym| K*^{-(2s-2+gamma)},
    which certifies the bracket.  K* doubles until the bracket width meets
    ``tol`` (or is taken from ``k_star`` verbatim when given).
    """
    if not tol > 0:
        raise ValueError("bracket tolerance must be positive")
    if not 2.0 * cfg.s > 2.0 - cfg.gamma:
        raise TailBoundError(
            "tail not controllable: 2s <= 2 - gamma "
            f"(s={cfg.s}, gamma={cfg.gamma})"
        )
    half_nu2 = 0.5 * cfg.nu**2
    ks = int(k_star) if k_star is not None else 64
    while True:
        if not cfg.kernel.covers(ks):
            raise TailBoundError(
                f"tail not controllable: tabulated kernel covers only "
                f"max|k| <= {cfg.kernel.coverage}, need {ks}"
            )
        finite_min, argmin_mode = _box_min(cfg, ks, _sign)
        eps = _tail_epsilon(cfg, ks)
        lower = min(finite_min, half_nu2 - eps)
        upper = min(finite_min, half_nu2)
        width = upper - lower
        if width <= tol or k_star is not None:
            break
        if 2 * ks > _BOX_CAP[cfg.d]:
            raise TailBoundError(
                "tail not controllable: bracket width "
                f"{width:.3e} > tol {tol:.3e} at enumeration cap K*={ks}"
            )
        ks *= 2
    attained = finite_min <= half_nu2 - eps
    return ZetaResult(
        value=upper,
        lower=lower,
        upper=upper,
        k_star=ks,
        argmin_mode=argmin_mode if attained else None,
        attained=attained,
    )


@dataclass(frozen=True)
class LambdaK0Result:
    """Exact supremum of the growth margin and the largest nonnegative mode."""

    lam: float
    k0: float
    argmax_mode: Optional[tuple]
    k_star: int


def compute_lambda_k0(cfg: ModelConfig) -> LambdaK0Result:
    """Growth margin sup and |k_0|, exact over a certified finite region.

    The margin beta |k|^s + mass Re(ghat(k)) (k.Mk) - nu^2 |k|^{2s}/2 is
    certified negative for |k| > K* once nu^2 |k|^{2s}/4 dominates each of the
    two nonnegative terms separately; k = 0 contributes 0, so lam >= 0 and
    k0 >= 0 always.
    """
    if cfg.nu == 0:
        raise TailBoundError("tail not controllable: nu = 0 gives unbounded growth")
    if not 2.0 * cfg.s > 2.0 - cfg.gamma:
        raise TailBoundError(
            f"tail not controllable: 2s <= 2 - gamma (s={cfg.s}, gamma={cfg.gamma})"
        )
    nu2 = cfg.nu**2
    ks = 8.0
    if cfg.beta > 0:
        ks = max(ks, (4.0 * cfg.beta / nu2) ** (1.0 / cfg.s))
    c_kernel = cfg.kernel.bound_constant() * cfg.mass * cfg.matrix.sym_op_norm
    if c_kernel > 0:
        ks = max(ks, (4.0 * c_kernel / nu2) ** (1.0 / (2.0 * cfg.s - 2.0 + cfg.gamma)))
    k_star = int(math.ceil(ks))
    if k_star > _BOX_CAP[cfg.d]:
        raise TailBoundError(
            f"tail not controllable: certified region K*={k_star} exceeds the "
            f"enumeration cap {_BOX_CAP[cfg.d]}"
        )
    if not cfg.kernel.covers(k_star):
        raise TailBoundError(
            f"tail not controllable: tabulated kernel covers only "
            f"max|k| <= {cfg.kernel.coverage}, need {k_star}"
        )
    lam = 0.0
    argmax_mode = (0,) * cfg.d
    k0 = 0.0
    for modes in _box_mode_blocks(cfg.d, k_star):
        kn = np.sqrt((modes.astype(float) ** 2).sum(axis=-1))
        keep = kn > 0
        if not keep.any():
            continue
        m = modes[keep]
        kn_k = kn[keep]
        vals = (
            cfg.beta * kn_k**cfg.s
            + cfg.mass * np.real(cfg.kernel.ghat(m, kn_k)) * cfg.matrix.quad_form(m)
            - 0.5 * nu2 * kn_k ** (2.0 * cfg.s)
        )
        i = int(np.argmax(vals))
        if vals[i] > lam:
            lam = float(vals[i])
            argmax_mode = tuple(int(a) for a in m[i])
        nonneg = vals >= 0.0
        if nonneg.any():
            k0 = max(k0, float(kn_k[nonneg].max()))
    return LambdaK0Result(lam=lam, k0=k0, argmax_mode=argmax_mode, k_star=k_star)


# ---------------------------------------------------------------------------
# admissibility and closed forms
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class Condition:
    name: str
    ok: Optional[bool]
    detail: str

    def to_dict(self):
        return {"name": self.name, "ok": self.ok, "detail": self.detail}


@dataclass(frozen=True)
class AdmissibilityReport:
    conditions: tuple
    zeta: Optional[ZetaResult]
    sign_note: str = _SIGN_NOTE

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.conditions if c.ok is not None) and not any(
            c.ok is False for c in self.conditions
        )

    def condition(self, name: str) -> Condition:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self):
        return {
            "passed": self.passed,
            "conditions": [c.to_dict() for c in self.conditions],
            "zeta": None if self.zeta is None else self.zeta.value,
            "zeta_bracket": None if self.zeta is None else list(self.zeta.bracket),
            "sign_note": self.sign_note,
        }


def _r_inverse(r) -> float:
    return 0.0 if r is INF else 1.0 / float(r)


def check_admissibility(
    cfg: ModelConfig,
    sigma: float,
    r,
    smallness_constant: float = 1.0,
    rho0_norm: Optional[float] = None,
    zeta_tol: float = 1e-9,
) -> AdmissibilityReport:
    """Evaluate every testable hypothesis behind the decay guarantee.

    The smallness condition needs a norm of the initial deviation; it is
    reported as unevaluated when ``rho0_norm`` is not supplied.  The overall
    verdict never raises: each hypothesis is reported individually.
    """
    r = as_summability(r)
    s, d, gamma = cfg.s, cfg.d, cfg.gamma
    conds = []

    lo = max(0.5, (2.0 - gamma) / 2.0)
    conds.append(
        Condition(
            "s_window",
            lo < s <= 1.0,
            f"require max(1/2, (2-gamma)/2) = {lo} < s <= 1, s = {s}",
        )
    )

    sig_hi = (2.0 * s - 1.0) / s
    sigma_ok = (sig_hi > 0) and (sigma < sig_hi) and (1.0 - gamma <= sigma * s)
    conds.append(
        Condition(
            "sigma_window",
            bool(sigma_ok),
            f"require sigma < (2s-1)/s = {sig_hi} and 1-gamma <= sigma*s; "
            f"sigma = {sigma}, sigma*s = {sigma * s}, 1-gamma = {1.0 - gamma}",
        )
    )

    r_inv = _r_inverse(r)
    if r is not INF and float(r) == 1.0:
        lwp2_ok = 1.0 - gamma <= sigma * s
        branch = "r=1 branch"
    else:
        b = (d * (1.0 - r_inv) < sigma * s) and (1.0 - gamma <= sigma * s)
        c = 1.0 - gamma + d * (1.0 - r_inv) < sigma * s
        if r is INF:
            p_grid = np.geomspace(1.0 + 1e-6, 1e6, 1000)
        else:
            p_grid = np.linspace(1.0, float(r), 1002)[1:-1]
        dd = (d * (1.0 / p_grid - r_inv) < sigma * s) & (
            1.0 - gamma + d * (1.0 - 1.0 / p_grid) < sigma * s
        )
        lwp2_ok = bool(b or c or dd.any())
        branch = f"r>1 branches (p-grid hit: {bool(dd.any())})"
    conds.append(
        Condition(
            "lwp2_summability",
            bool(lwp2_ok),
            f"summability branch check for r = {'inf' if r is INF else r} ({branch})",
        )
    )

    lwp3_ok = (sigma * s + 1.0) / (2.0 * s) < 1.0
    conds.append(
        Condition(
            "lwp3_time_integrability",
            bool(lwp3_ok),
            f"require (sigma*s + 1)/(2s) < 1, got {(sigma * s + 1.0) / (2.0 * s)}",
        )
    )

    zeta = None
    if cfg.nu == 0:
        conds.append(Condition("zeta_positive", False, "nu = 0: no decay margin"))
    else:
        try:
            zeta = compute_zeta(cfg, tol=zeta_tol)
        except TailBoundError as exc:
            conds.append(Condition("zeta_positive", False, str(exc)))
        else:
            if zeta.lower > 0:
                ok = True
            elif zeta.upper <= 0:
                ok = False
            else:
                ok = None
            conds.append(
                Condition(
                    "zeta_positive",
                    ok,
                    f"zeta = {zeta.value} with bracket {zeta.bracket}",
                )
            )

    if rho0_norm is None:
        conds.append(
            Condition("smallness", None, "initial norm not supplied; not evaluated")
        )
    elif zeta is None or zeta.value <= 0:
        conds.append(
            Condition("smallness", False, "no positive decay margin to compare against")
        )
    else:
        thresh = zeta.value / (smallness_constant * cfg.matrix.op_norm)
        conds.append(
            Condition(
                "smallness",
                bool(rho0_norm < thresh),
                f"require ||rho0|| < zeta/(C |M|) = {thresh}, got {rho0_norm}",
            )
        )

    return AdmissibilityReport(conditions=tuple(conds), zeta=zeta)


def omega_probability_closed_form(alpha: float, beta: float, nu: float) -> float:
    """P(barrier event) = 1 - exp(-2 alpha beta / nu^2)."""
    if not (alpha > 0 and beta > 0 and nu > 0):
        raise ValueError(
            f"alpha, beta, nu must be positive, got ({alpha}, {beta}, {nu})"
        )
    return -math.expm1(-2.0 * alpha * beta / nu**2)


# ---------------------------------------------------------------------------
# mass rescaling
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class MassRescaling:
    """Descriptor of the time/amplitude maps linking a mass-m run to a unit run.

    The rescaled solution at time t corresponds to the original solution at
    time t/m with amplitude divided by m; the rescaled driving path is
    sqrt(m) W(t/m), again a standard Brownian motion.
    """

    m: float
    nu_m: float

    def map_time(self, t: float) -> float:
        """Original-run time corresponding to rescaled-run time t."""
        return t / self.m

    @property
    def amplitude_factor(self) -> float:
        return 1.0 / self.m

    def transform_path(self, path):
        from .brownian import BrownianPath

        return BrownianPath(
            times=self.m * path.times,
            values=math.sqrt(self.m) * path.values,
            seed=path.seed,
        )


def rescale_mass(cfg: ModelConfig, m: float):
    """Configuration and path/amplitude maps of the mass-m reduction."""
    if not m > 0:
        raise ValueError(f"mass factor must be positive, got {m}")
    nu_m = cfg.nu / math.sqrt(m)
    cfg_m = cfg.replace(nu=nu_m, mass=cfg.mass / m)
    return cfg_m, MassRescaling(m=m, nu_m=nu_m)


# ---------------------------------------------------------------------------
# assembled report
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class DerivedParams:
    """Every derived scalar of a configuration, with certified brackets."""

    zeta: ZetaResult
    zeta_alt: ZetaResult
    lam: float
    k0: float
    omega_prob: Optional[float]
    search_radius: int
    sign_note: str = _SIGN_NOTE

    def to_dict(self):
        return {
            "zeta": self.zeta.value,
            "zeta_bracket": [self.zeta.lower, self.zeta.upper],
            "zeta_attained_at": self.zeta.argmin_mode,
            "zeta_alt": self.zeta_alt.value,
            "zeta_alt_bracket": [self.zeta_alt.lower, self.zeta_alt.upper],
            "lambda": self.lam,
            "k0": self.k0,
            "omega_prob": self.omega_prob,
            "search_radius": self.search_radius,
            "sign_note": self.sign_note,
        }


def derived_params(cfg: ModelConfig, tol: float = 1e-9) -> DerivedParams:
    zeta = compute_zeta(cfg, tol=tol)
    zeta_alt = compute_zeta(cfg, tol=tol, _sign=+1.0)
    lk = compute_lambda_k0(cfg)
    omega = None
    if cfg.nu > 0 and cfg.alpha > 0 and cfg.beta > 0:
        omega = omega_probability_closed_form(cfg.alpha, cfg.beta, cfg.nu)
    return DerivedParams(
        zeta=zeta,
        zeta_alt=zeta_alt,
        lam=lk.lam,
        k0=lk.k0,
        omega_prob=omega,
        search_radius=max(zeta.k_star, lk.k_star),
    )
