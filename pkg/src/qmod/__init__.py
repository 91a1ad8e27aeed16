"""Numerics for the q-Pochhammer symbol (x; q)_inf and its modular transform."""

from .errors import (
    AccuracyError,
    BranchCutError,
    ConfigurationError,
    DivergenceError,
    DomainError,
    GeometryError,
    ModularRouteError,
    PoleError,
    QModError,
)
from .modular import (
    AsymptoticSeries,
    RayChoice,
    SectorPoint,
    asymptotic_b_series,
    b_integral,
    choose_ray,
    g_star,
    g_term,
    k_factor,
    m_stieltjes,
    p_contour_real,
    p_minus,
    p_plus,
    p_ray,
    stokes_sum,
    xqmain_rhs,
)
from .qseries import (
    ModularPoint,
    SeriesTruncation,
    dedekind_eta,
    euler_series,
    jacobi_theta,
    lambert_series,
    log_pochhammer_oracle,
    pochhammer_inf,
    pochhammer_n,
)
from .quad import DEFAULT_SETTINGS, PathSpec, QuadratureSettings
from .special import bernoulli, cot_kernel, li2, log_gamma, principal_log, stieltjes_b
from .verify import Identity, VerificationReport, sweep, verify

__version__ = "0.1.0"
