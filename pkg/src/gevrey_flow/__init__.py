"""Pseudospectral simulator and verification suite for the random-diffusion
active scalar flow on the torus."""

from ._backend import BACKEND, USE_NUMBA
from .brownian import (
    BrownianPath,
    OmegaMCResult,
    OmegaVerdict,
    omega_probability_mc,
    omega_verdict,
    sample_path,
    zero_path,
)
from .diagnostics import (
    DecayFit,
    NormSeries,
    bilinear_shape_report,
    dissipation_check,
    embedding_suite,
    fit_decay,
    monotonicity_check,
    rescale_equivalence_check,
    series_from_result,
    smallness_margin,
)
from .dynamics import (
    IntegratorConfig,
    NormSchedule,
    PicardResult,
    SimState,
    SimulationResult,
    bilinear_B,
    etd_step,
    gamma_apply,
    linear_propagate,
    picard_solve,
    recover_mu_theta,
    simulate,
)
from .errors import (
    BlowupAbort,
    ConfigError,
    LatticeMismatchError,
    OverflowRiskError,
    TailBoundError,
    ZeroModeSingularityError,
)
from .model import (
    AdmissibilityReport,
    DerivedParams,
    InteractionMatrix,
    ModelConfig,
    PowerLawKernel,
    TabulatedKernel,
    ZetaResult,
    check_admissibility,
    compute_lambda_k0,
    compute_zeta,
    derived_params,
    linear_symbol,
    omega_probability_closed_form,
    rescale_mass,
)
from .spectral import (
    INF,
    GevreyNormSpec,
    Lattice,
    SpectralField,
    apply_multiplier,
    convolve_product,
    dealias_truncate,
    fourier_lebesgue_norm,
    gevrey_norm,
    random_hermitian_field,
)

__version__ = "0.1.0"
