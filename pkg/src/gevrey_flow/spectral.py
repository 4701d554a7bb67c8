"""Lattice geometry, spectral fields and weighted Fourier norms on the torus.

Transform conventions, fixed once here and inherited by every other module:

    fhat(k) = integral_{T^d} f(x) exp(-i k.x) dx
    f(x)    = (2 pi)^{-d} sum_k fhat(k) exp(i k.x)

so the coefficient array of a pointwise product is the truncated convolution

    F(f g)(k) = (2 pi)^{-d} sum_j fhat(k-j) ghat(j).

Mode weights ``|k|`` are Euclidean.  The ``|0|^sigma`` weight is defined as 0
for sigma > 0 and 1 for sigma = 0; a negative sigma on a field with nonzero
mean is rejected as a zero-mode singularity.
"""

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Union

import numpy as np

from ._backend import USE_NUMBA
from ._kernels import conv_direct
from .errors import LatticeMismatchError, OverflowRiskError, ZeroModeSingularityError

TWO_PI = 2.0 * math.pi

#: exponent of e beyond which double precision is not trusted
OVERFLOW_EXPONENT = 700.0

#: relative tolerance of the Hermitian-symmetry check at construction
HERMITIAN_RTOL = 1e-12


class Summability(enum.Enum):
    """Distinguished value for r = infinity in ell^r norms (not a float)."""

    INF = "inf"


INF = Summability.INF

RValue = Union[float, Summability]


def as_summability(r) -> RValue:
    """Normalise a user-facing summability exponent to float >= 1 or INF."""
    if r is INF:
        return INF
    if isinstance(r, str):
        if r.strip().lower() in ("inf", "infinity"):
            return INF
        r = float(r)
    r = float(r)
    if math.isinf(r):
        return INF
    if not r >= 1.0:
        raise ValueError(f"summability exponent must satisfy r >= 1, got {r}")
    return r


@dataclass(frozen=True)
class Lattice:
    """Mode box {k in Z^d : max|k_a| <= K} in row-major order."""

    d: int
    K: int

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ValueError(f"spatial dimension must be 1 or 2, got {self.d}")
        if self.K < 1:
            raise ValueError(f"frequency cutoff must be >= 1, got {self.K}")

    @property
    def width(self) -> int:
        return 2 * self.K + 1

    @property
    def n_modes(self) -> int:
        return self.width**self.d

    @property
    def zero_index(self) -> int:
        return (self.n_modes - 1) // 2

    @cached_property
    def modes(self) -> np.ndarray:
        ax = np.arange(-self.K, self.K + 1, dtype=np.int64)
        if self.d == 1:
            out = ax[:, None].copy()
        else:
            grids = np.meshgrid(*([ax] * self.d), indexing="ij")
            out = np.stack(grids, axis=-1).reshape(-1, self.d)
        out.setflags(write=False)
        return out

    @cached_property
    def mode_norms(self) -> np.ndarray:
        out = np.sqrt((self.modes.astype(float) ** 2).sum(axis=1))
        out.setflags(write=False)
        return out

    def mode_norms_pow(self, s: float) -> np.ndarray:
        kn = self.mode_norms
        out = np.zeros_like(kn)
        np.power(kn, s, where=kn > 0, out=out)
        if s == 0:
            out[self.zero_index] = 1.0
        return out

    @property
    def max_mode_norm(self) -> float:
        return self.K * math.sqrt(self.d)

    def flat_index(self, k) -> int:
        idx = 0
        for a in range(self.d):
            ka = int(k[a]) if self.d > 1 or np.ndim(k) else int(k)
            if abs(ka) > self.K:
                raise ValueError(f"mode {k} is outside the lattice (K={self.K})")
            idx = idx * self.width + (ka + self.K)
        return idx

    def dealias_mask(self) -> np.ndarray:
        """Modes kept by the 2/3 rule: max-norm <= floor(2K/3)."""
        cut = (2 * self.K) // 3
        return (np.abs(self.modes) <= cut).all(axis=1)


def _as_mode(k, d):
    arr = np.atleast_1d(np.asarray(k, dtype=np.int64))
    if arr.shape != (d,):
        raise ValueError(f"mode must have {d} components, got {k!r}")
    return arr


@dataclass(frozen=True)
class SpectralField:
    """Truncated Fourier coefficient array on a lattice.

    ``coeffs`` is flat complex128 in the lattice's row-major mode order.
    ``real_valued`` flags fields representing real functions; for those the
    Hermitian symmetry coeff(-k) = conj(coeff(k)) is checked at construction
    to ``HERMITIAN_RTOL`` relative.
    """

    lattice: Lattice
    coeffs: np.ndarray
    real_valued: bool = True

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128).reshape(-1).copy()
        if c.shape[0] != self.lattice.n_modes:
            raise ValueError(
                f"expected {self.lattice.n_modes} coefficients, got {c.shape[0]}"
            )
        if not np.isfinite(c.view(float)).all():
            raise ValueError("coefficients must be finite (no NaN/inf)")
        if self.real_valued:
            scale = float(np.abs(c).max())
            asym = float(np.abs(c[::-1].conj() - c).max())
            if asym > HERMITIAN_RTOL * max(scale, 1e-300):
                raise ValueError(
                    "field flagged real is not Hermitian-symmetric "
                    f"(max asymmetry {asym:.3e} vs scale {scale:.3e})"
                )
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    # -- constructors -----------------------------------------------------
    @staticmethod
    def zero(lattice: Lattice) -> "SpectralField":
        return SpectralField(lattice, np.zeros(lattice.n_modes, dtype=np.complex128))

    @staticmethod
    def constant(lattice: Lattice, value: float) -> "SpectralField":
        c = np.zeros(lattice.n_modes, dtype=np.complex128)
        c[lattice.zero_index] = value * TWO_PI**lattice.d
        return SpectralField(lattice, c)

    @staticmethod
    def from_modes(lattice: Lattice, entries, real_valued=True) -> "SpectralField":
        """Build a field from a {mode: coefficient} mapping."""
        c = np.zeros(lattice.n_modes, dtype=np.complex128)
        for k, v in entries.items():
            key = (k,) if np.ndim(k) == 0 else tuple(k)
            c[lattice.flat_index(key)] = v
        return SpectralField(lattice, c, real_valued=real_valued)

    # -- basic queries -----------------------------------------------------
    def coeff(self, k) -> complex:
        return complex(self.coeffs[self.lattice.flat_index(_as_mode(k, self.lattice.d))])

    @property
    def mean_coeff(self) -> complex:
        return complex(self.coeffs[self.lattice.zero_index])

    def with_coeffs(self, coeffs, real_valued=None) -> "SpectralField":
        return SpectralField(
            self.lattice,
            coeffs,
            self.real_valued if real_valued is None else real_valued,
        )

    def with_zero_mean(self) -> "SpectralField":
        c = self.coeffs.copy()
        c[self.lattice.zero_index] = 0.0
        return self.with_coeffs(c)

    # -- arithmetic ---------------------------------------------------------
    def _check_same_lattice(self, other):
        if self.lattice != other.lattice:
            raise LatticeMismatchError("lattice mismatch")

    def __add__(self, other):
        self._check_same_lattice(other)
        return SpectralField(
            self.lattice,
            self.coeffs + other.coeffs,
            self.real_valued and other.real_valued,
        )

    def __sub__(self, other):
        self._check_same_lattice(other)
        return SpectralField(
            self.lattice,
            self.coeffs - other.coeffs,
            self.real_valued and other.real_valued,
        )

    def __mul__(self, scalar):
        s = complex(scalar)
        return SpectralField(
            self.lattice,
            self.coeffs * s,
            self.real_valued and s.imag == 0.0,
        )

    __rmul__ = __mul__


@dataclass(frozen=True)
class GevreyNormSpec:
    """Parameters of a Gevrey norm: weight e^{a |k|^s}, index kappa, ell^r."""

    a: float
    kappa: float
    r: RValue
    s: float

    def __post_init__(self):
        if not self.a >= 0:
            raise ValueError(f"Gevrey radius must be >= 0, got {self.a}")
        object.__setattr__(self, "r", as_summability(self.r))
        if not 0 < self.s <= 1:
            raise ValueError(f"fractional order must lie in (0, 1], got {self.s}")


def _weighted_rnorm(values: np.ndarray, r: RValue) -> float:
    if r is INF:
        return float(values.max()) if values.size else 0.0
    if r == 1.0:
        return float(values.sum())
    if r == 2.0:
        return float(np.sqrt((values**2).sum()))
    return float((values**float(r)).sum() ** (1.0 / float(r)))


def fourier_lebesgue_norm(f: SpectralField, exponent: float, r) -> float:
    """|| |k|^exponent fhat ||_{ell^r} with the k=0 conventions of the module."""
    r = as_summability(r)
    mags = np.abs(f.coeffs)
    zi = f.lattice.zero_index
    if exponent == 0:
        return _weighted_rnorm(mags, r)
    if exponent < 0 and mags[zi] != 0.0:
        raise ZeroModeSingularityError(
            "zero-mode singularity: negative exponent with nonzero mean coefficient"
        )
    weights = f.lattice.mode_norms_pow(exponent)
    weights = weights.copy()
    weights[zi] = 0.0
    return _weighted_rnorm(weights * mags, r)


def gevrey_weights(lattice: Lattice, a: float, s: float) -> np.ndarray:
    """e^{a |k|^s} over the lattice, guarded against overflow."""
    if a * lattice.max_mode_norm**s > OVERFLOW_EXPONENT:
        raise OverflowRiskError(
            "overflow risk: a * max|k|^s = "
            f"{a * lattice.max_mode_norm ** s:.1f} exceeds {OVERFLOW_EXPONENT}"
        )
    return np.exp(a * lattice.mode_norms_pow(s))


def gevrey_norm(f: SpectralField, spec: GevreyNormSpec) -> float:
    """Fourier-Lebesgue norm with exponent kappa*s of the e^{a A^{1/2}}-weighted field."""
    if spec.a == 0.0:
        return fourier_lebesgue_norm(f, spec.kappa * spec.s, spec.r)
    weights = gevrey_weights(f.lattice, spec.a, spec.s)
    weighted = SpectralField(f.lattice, f.coeffs * weights, f.real_valued)
    return fourier_lebesgue_norm(weighted, spec.kappa * spec.s, spec.r)


def _is_hermitian_values(values: np.ndarray) -> bool:
    scale = float(np.abs(values).max()) if values.size else 0.0
    if scale == 0.0:
        return True
    return float(np.abs(values[::-1].conj() - values).max()) <= 1e-12 * scale


def apply_multiplier(
    f: SpectralField, m: Union[Callable, np.ndarray]
) -> SpectralField:
    """Apply a Fourier multiplier: coeff(k) -> m(k) coeff(k).

    ``m`` is either an array over the lattice modes or a callable
    ``k -> complex`` evaluated per mode.  Hermitian symmetry of the output is
    preserved exactly when the multiplier itself is Hermitian.
    """
    if callable(m):
        values = np.array(
            [m(k) for k in f.lattice.modes], dtype=np.complex128
        )
    else:
        values = np.asarray(m, dtype=np.complex128).reshape(-1)
        if values.shape[0] != f.lattice.n_modes:
            raise ValueError("multiplier array does not match the lattice")
    if not np.isfinite(values.view(float)).all():
        raise ValueError("multiplier must be finite on the lattice")
    out = f.coeffs * values
    return SpectralField(
        f.lattice, out, f.real_valued and _is_hermitian_values(values)
    )


def dealias_truncate(f: SpectralField) -> SpectralField:
    """Zero every mode with max-norm above floor(2K/3) (the 2/3 rule)."""
    mask = f.lattice.dealias_mask()
    return f.with_coeffs(np.where(mask, f.coeffs, 0.0))


def _embed_padded(c: np.ndarray, lattice: Lattice, n_pad: int) -> np.ndarray:
    K = lattice.K
    wrap = np.arange(-K, K + 1) % n_pad
    grid = c.reshape((lattice.width,) * lattice.d)
    padded = np.zeros((n_pad,) * lattice.d, dtype=np.complex128)
    if lattice.d == 1:
        padded[wrap] = grid
    else:
        padded[np.ix_(wrap, wrap)] = grid
    return padded


def _extract_padded(padded: np.ndarray, lattice: Lattice) -> np.ndarray:
    K = lattice.K
    n_pad = padded.shape[0]
    wrap = np.arange(-K, K + 1) % n_pad
    if lattice.d == 1:
        return padded[wrap].reshape(-1)
    return padded[np.ix_(wrap, wrap)].reshape(-1)


def hermitian_project(coeffs: np.ndarray) -> np.ndarray:
    """Project onto Hermitian-symmetric coefficients (removes FFT rounding skew)."""
    return 0.5 * (coeffs + coeffs[::-1].conj())


def _conv_fft(fc: np.ndarray, gc: np.ndarray, lattice: Lattice) -> np.ndarray:
    # pad so every product of box modes is represented without wrap-around,
    # making the transform path an exact truncated convolution
    n_pad = 4 * lattice.K + 2
    F = _embed_padded(fc, lattice, n_pad)
    G = _embed_padded(gc, lattice, n_pad)
    prod = np.fft.ifftn(F) * np.fft.ifftn(G)
    H = np.fft.fftn(prod)
    return _extract_padded(H, lattice) * (n_pad**lattice.d / TWO_PI**lattice.d)


def convolve_product(
    f: SpectralField,
    g: SpectralField,
    method: str = "auto",
    dealias: bool = False,
) -> SpectralField:
    """Coefficients of the pointwise product f*g, truncated to the lattice.

    ``method="direct"`` is the O(K^{2d}) reference double loop;
    ``method="fft"`` is the fast transform path (zero-padded, hence exact on
    the lattice).  With ``dealias=True`` both inputs are first truncated by
    the 2/3 rule.
    """
    if f.lattice != g.lattice:
        raise LatticeMismatchError("lattice mismatch")
    if dealias:
        f = dealias_truncate(f)
        g = dealias_truncate(g)
    if method == "auto":
        if USE_NUMBA and f.lattice.n_modes <= 160:
            method = "direct"
        else:
            method = "fft"
    scale = TWO_PI**-f.lattice.d
    if method == "direct":
        out = conv_direct(
            f.coeffs, g.coeffs, f.lattice.modes, f.lattice.K, scale
        )
    elif method == "fft":
        out = _conv_fft(f.coeffs, g.coeffs, f.lattice)
        if f.real_valued and g.real_valued:
            out = hermitian_project(out)
    else:
        raise ValueError(f"unknown convolution method {method!r}")
    return SpectralField(f.lattice, out, f.real_valued and g.real_valued)


def random_hermitian_field(
    lattice: Lattice,
    seed,
    decay: float = 0.5,
    amplitude: float = 1.0,
    zero_mean: bool = True,
) -> SpectralField:
    """Random real-valued trigonometric polynomial with e^{-decay |k|} spectrum."""
    rng = np.random.default_rng(seed)
    n = lattice.n_modes
    raw = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    envelope = np.exp(-decay * lattice.mode_norms)
    c = raw * envelope * amplitude
    c = 0.5 * (c + c[::-1].conj())
    if zero_mean:
        c[lattice.zero_index] = 0.0
    else:
        c[lattice.zero_index] = c[lattice.zero_index].real
    return SpectralField(lattice, c)
