"""Numerical certification of the identities implemented in this package.

Each identity is evaluated as two independently computed sides; the report
records both values, the absolute and relative error and whether the
relative error is within the identity's tolerance.
"""

from __future__ import annotations

import cmath
import enum
import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import modular, qseries
from .errors import AccuracyError, ConfigurationError, DomainError
from .quad import DEFAULT_SETTINGS, QuadratureSettings, integrate_segment
from .qseries import ModularPoint
from .special import LOG_SQRT_2PI, PI, TWO_PI, li2, log_gamma, stieltjes_b


class Identity(str, enum.Enum):
    MAIN = "MAIN"
    MAINBIS = "MAINBIS"
    MAINTER = "MAINTER"
    MP = "MP"
    PP_SLICE = "PP_SLICE"
    STOKES = "STOKES"
    XQMAIN = "XQMAIN"
    G_PLUS = "G_PLUS"
    ODDNESS = "ODDNESS"
    LANDEN = "LANDEN"
    EULER = "EULER"
    ETA_MODULAR = "ETA_MODULAR"
    THETA_MODULAR = "THETA_MODULAR"
    LAMBERT_MODULAR = "LAMBERT_MODULAR"
    ASYMPTOTIC = "ASYMPTOTIC"


TOLERANCES = {
    Identity.EULER: 1e-11,
    Identity.LANDEN: 1e-11,
    Identity.G_PLUS: 1e-11,
    Identity.ODDNESS: 1e-11,
    Identity.MAIN: 1e-8,
    Identity.MAINTER: 1e-8,
    Identity.XQMAIN: 1e-8,
    Identity.PP_SLICE: 1e-8,
    Identity.STOKES: 1e-8,
    Identity.MP: 1e-7,
    Identity.MAINBIS: 1e-7,
    Identity.ETA_MODULAR: 1e-10,
    Identity.THETA_MODULAR: 1e-9,
    Identity.LAMBERT_MODULAR: 1e-7,
    Identity.ASYMPTOTIC: math.inf,  # judged by the truncation sandwich instead
}

# parameter names in declaration order; the values are the defaults
PARAMETERS = {
    Identity.MAIN: ("alpha", "nu"),
    Identity.MAINBIS: ("alpha", "nu"),
    Identity.MAINTER: ("q", "x"),
    Identity.MP: ("alpha", "nu"),
    Identity.PP_SLICE: ("alpha", "nu"),
    Identity.STOKES: ("tau", "xi"),
    Identity.XQMAIN: ("tau", "xi"),
    Identity.G_PLUS: ("tau", "xi"),
    Identity.ODDNESS: ("tau", "xi"),
    Identity.LANDEN: ("x",),
    Identity.EULER: ("q", "x"),
    Identity.ETA_MODULAR: ("tau",),
    Identity.THETA_MODULAR: ("tau", "xi"),
    Identity.LAMBERT_MODULAR: ("tau", "xi"),
    Identity.ASYMPTOTIC: ("q", "x"),
}
OPTIONAL_PARAMETERS = {
    Identity.PP_SLICE: ("r",),
    Identity.MP: ("r",),
    Identity.ASYMPTOTIC: ("k_max",),
}

LOG_FORM = {Identity.MAIN, Identity.MAINBIS, Identity.MAINTER, Identity.MP, Identity.G_PLUS}


@dataclass
class VerificationReport:
    identity_id: Identity
    params: dict
    lhs: complex = complex("nan")
    rhs: complex = complex("nan")
    abs_err: float = math.nan
    rel_err: float = math.nan
    offset_2pik: int = 0
    passed: bool | None = None
    skipped: bool = False
    elapsed: float = 0.0
    message: str = ""
    extras: dict = field(default_factory=dict)

    @property
    def inconclusive(self) -> bool:
        return not self.skipped and self.passed is None

    @property
    def status(self) -> str:
        if self.skipped:
            return "skipped"
        if self.passed is None:
            return "inconclusive"
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        d = {
            "identity": self.identity_id.value,
            "params": {k: _jsonable(v) for k, v in self.params.items()},
            "lhs": [self.lhs.real, self.lhs.imag],
            "rhs": [self.rhs.real, self.rhs.imag],
            "abs_err": self.abs_err,
            "rel_err": self.rel_err,
            "offset_2pik": self.offset_2pik,
            "pass": self.passed,
            "skipped": self.skipped,
        }
        if self.message:
            d["message"] = self.message
        if self.extras:
            d["extras"] = {k: _jsonable(v) for k, v in self.extras.items()}
        return d


def _jsonable(v):
    if isinstance(v, complex):
        return v.real if v.imag == 0 else [v.real, v.imag]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def relative_error(lhs: complex, rhs: complex) -> tuple[float, float]:
    abs_err = abs(lhs - rhs)
    return abs_err, abs_err / max(abs(lhs), abs(rhs), 1e-300)


# ---------------------------------------------------------------------------
# helpers


def _real(name, v) -> float:
    v = complex(v)
    if v.imag != 0:
        raise DomainError(f"{name} must be real, got {v}")
    return v.real


def _positive(name, v) -> float:
    v = _real(name, v)
    if not v > 0:
        raise DomainError(f"{name} must be positive, got {v}")
    return v


def _unit(name, v) -> float:
    v = _real(name, v)
    if not 0 < v < 1:
        raise DomainError(f"{name} must lie in (0, 1), got {v}")
    return v


def _upper(tau) -> complex:
    tau = complex(tau)
    if not tau.imag > 0:
        raise DomainError(f"Im tau must be positive, got {tau}")
    return tau


def _main_common(alpha: float, nu: float, settings):
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if not nu > -1:
        raise DomainError(f"nu must exceed -1, got {nu}")
    q = math.exp(-TWO_PI * alpha)
    x = math.exp(-TWO_PI * (1 + nu) * alpha)
    lhs, _ = qseries.log_pochhammer_oracle(x, q)
    return lhs


# ---------------------------------------------------------------------------
# the identities; each returns (lhs, rhs, extras)


def _main(p, s):
    alpha = _positive("alpha", p["alpha"])
    nu = _real("nu", p["nu"])
    lhs = _main_common(alpha, nu, s)
    if nu == 0:
        lg = math.log(TWO_PI * alpha)  # removable limit
        integral = 0.0
    else:
        lg = math.log(-math.expm1(-TWO_PI * nu * alpha) / nu)
        c = TWO_PI * alpha

        def f(t):
            y = c * t.real
            return y / np.expm1(y) - 1.0

        integral = integrate_segment(f, 0.0, nu, s)[0].real
    rhs = (
        -PI / (12 * alpha)
        + LOG_SQRT_2PI - log_gamma(nu + 1).real
        + PI * alpha / 12
        - (nu + 0.5) * lg
        + integral
        + modular.m_stieltjes(alpha, nu, s)
    )
    return lhs, complex(rhs), {}


def _mainbis(p, s):
    alpha = _positive("alpha", p["alpha"])
    nu = _real("nu", p["nu"])
    lhs = _main_common(alpha, nu, s)

    def f(t):
        tr = t.real
        return (tr - nu - 0.5) * stieltjes_b(alpha * tr)

    integral = 0.0 if nu == 0 else integrate_segment(f, 0.0, nu, s)[0].real
    rhs = (
        -PI / (12 * alpha)
        - (nu + 0.5) * math.log(TWO_PI * alpha)
        + LOG_SQRT_2PI - log_gamma(nu + 1).real
        + 0.5 * PI * (nu + 1) * nu * alpha
        + PI * alpha / 12
        + TWO_PI * alpha * integral
        + modular.m_stieltjes(alpha, nu, s)
    )
    return lhs, complex(rhs), {}


def _mainter(p, s):
    q = _unit("q", p["q"])
    x = _unit("x", p["x"])
    lhs, _ = qseries.log_pochhammer_oracle(x, q)
    lq = math.log(q)
    rhs = (
        li2(x).real / lq
        + 0.5 * math.log1p(-x)
        - lq / 24
        - modular.b_integral(q, x, s)
        + modular.m_stieltjes(-lq / TWO_PI, math.log(x) / lq, s)
    )
    return lhs, complex(rhs), {}


def _mp(p, s):
    alpha = _positive("alpha", p["alpha"])
    nu = _real("nu", p["nu"])
    r = _real("r", p.get("r", 0.5))
    lhs = modular.m_stieltjes(alpha, nu, s)
    qs = math.exp(-TWO_PI / alpha)
    log_prod, _ = qseries.log_pochhammer_oracle(cmath.exp(2j * PI * nu) * qs, qs)
    rhs = log_prod + modular.p_contour_real(alpha, nu, r, -1, s)
    return complex(lhs), rhs, {}


def _pp_slice(p, s):
    alpha = _positive("alpha", p["alpha"])
    nu = _real("nu", p["nu"])
    r = _real("r", p.get("r", 0.5))
    tau = 1j * alpha
    choice = modular.choose_ray(tau, nu * tau, "minus")
    lhs = modular.p_ray(tau, nu * tau, choice, s)
    rhs = modular.p_contour_real(alpha, nu, r, -1, s)
    return lhs, rhs, {"d": choice.d}


def _stokes(p, s):
    tau = _upper(p["tau"])
    xi = complex(p["xi"])
    rhs, trunc = modular.stokes_sum(tau, xi)
    lhs = modular.p_minus(tau, xi, s) - modular.p_plus(tau, xi, s)
    return lhs, rhs, {"tail_bound": trunc.tail_bound}


def _xqmain(p, s):
    point = ModularPoint(_upper(p["tau"]), complex(p["xi"]))
    rhs = modular.xqmain_rhs(point, s)
    lhs, _ = qseries.pochhammer_inf(point.x, point.q)
    return lhs, rhs, {}


def _g_plus(p, s):
    tau = complex(p["tau"])
    xi = complex(p["xi"])
    w = xi / tau if tau != 0 else 0j
    if w.imag == 0:
        raise DomainError("xi/tau must not be real for the pairing relation")
    lhs = modular.g_term(tau, xi) + modular.g_term(tau, -xi)
    sign = -1.0 if w.imag < 0 else 1.0
    rhs = cmath.log(1.0 - cmath.exp(sign * 2j * PI * w))
    return lhs, rhs, {}


def _oddness(p, s):
    tau = _upper(p["tau"])
    xi = complex(p["xi"])
    lhs = modular.g_star(tau, -xi) + modular.p_minus(tau, -xi, s)
    rhs = -(modular.g_star(tau, xi) + modular.p_minus(tau, xi, s))
    return lhs, rhs, {}


def _landen(p, s):
    x = _positive("x", p["x"])
    if x == 1:
        raise DomainError("x = 1 is excluded")
    lhs = li2(1.0 - x) + li2(1.0 - 1.0 / x)
    rhs = -0.5 * math.log(x) ** 2
    return lhs, complex(rhs), {}


def _euler(p, s):
    q = complex(p["q"])
    x = complex(p["x"])
    lhs, _ = qseries.pochhammer_inf(x, q)
    rhs = qseries.euler_series(x, q)
    return lhs, rhs, {}


def _eta(p, s):
    tau = _upper(p["tau"])
    lhs = qseries.dedekind_eta(-1.0 / tau)
    rhs = cmath.sqrt(-1j * tau) * qseries.dedekind_eta(tau)
    return lhs, rhs, {}


def _theta(p, s):
    tau = _upper(p["tau"])
    xi = complex(p["xi"])
    gauss = cmath.exp(1j * PI * (xi + 0.5) ** 2 / tau)
    lhs = qseries.jacobi_theta(xi, tau) * cmath.sqrt(-1j * tau) * gauss
    rhs = qseries.theta_modular_image(xi, tau)
    multiplier = qseries.theta_multiplier(xi, tau)
    return lhs, rhs, {"multiplier": multiplier, "multiplier_times_sqrt": multiplier * cmath.sqrt(-1j * tau)}


LAMBERT_NODES = 24


def _lambert(p, s):
    tau = _upper(p["tau"])
    xi = complex(p["xi"])
    point = ModularPoint(tau, xi)
    lhs = qseries.lambert_series(point.x, point.q)
    # d/dxi of log RHS by the trapezoid rule on a small circle; the
    # principal-branch pieces are continuous on the circle as long as it
    # stays clear of the cut lines and of xi/tau on the negative axis.
    rho = 0.01 * min(1.0, abs(xi), abs(xi / tau))
    if rho == 0:
        raise DomainError("xi = 0 is a branch point of the right-hand side")
    total = 0j
    base = None
    for j in range(LAMBERT_NODES):
        w = cmath.exp(2j * PI * j / LAMBERT_NODES)
        val = modular.xqmain_log_rhs(ModularPoint(tau, xi + rho * w), s)
        if base is None:
            base = val
        # remove 2 pi i ambiguities relative to the first node
        val -= 2j * PI * round((val - base).imag / TWO_PI)
        total += val / w
    deriv = total / (LAMBERT_NODES * rho)
    rhs = -deriv / (2j * PI)
    return lhs, rhs, {"radius": rho}


def _asymptotic(p, s):
    q = _unit("q", p["q"])
    x = _unit("x", p["x"])
    k_max = p.get("k_max")
    series = modular.asymptotic_b_series(q, x, None if k_max is None else int(_real("k_max", k_max)))
    lhs = modular.b_integral(q, x, s)
    rhs = series.optimal_sum
    return complex(lhs), complex(rhs), {
        "optimal_index": series.optimal_index,
        "optimal_error": series.optimal_error,
        "log10_optimal_error": series.log10_optimal_error,
        "actual_error": abs(lhs - rhs),
    }


_DISPATCH = {
    Identity.MAIN: _main,
    Identity.MAINBIS: _mainbis,
    Identity.MAINTER: _mainter,
    Identity.MP: _mp,
    Identity.PP_SLICE: _pp_slice,
    Identity.STOKES: _stokes,
    Identity.XQMAIN: _xqmain,
    Identity.G_PLUS: _g_plus,
    Identity.ODDNESS: _oddness,
    Identity.LANDEN: _landen,
    Identity.EULER: _euler,
    Identity.ETA_MODULAR: _eta,
    Identity.THETA_MODULAR: _theta,
    Identity.LAMBERT_MODULAR: _lambert,
    Identity.ASYMPTOTIC: _asymptotic,
}


def _coerce_identity(identity) -> Identity:
    if isinstance(identity, Identity):
        return identity
    try:
        return Identity(str(identity).upper())
    except ValueError:
        raise ConfigurationError(f"unknown identity {identity!r}") from None


def check_params(identity, params: dict) -> None:
    ident = _coerce_identity(identity)
    allowed = set(PARAMETERS[ident]) | set(OPTIONAL_PARAMETERS.get(ident, ()))
    unknown = set(params) - allowed
    if unknown:
        raise ConfigurationError(f"unknown parameter(s) for {ident.value}: {sorted(unknown)}")
    missing = [k for k in PARAMETERS[ident] if k not in params]
    if missing:
        raise ConfigurationError(f"missing parameter(s) for {ident.value}: {missing}")


def verify(identity, params: dict, settings: QuadratureSettings = DEFAULT_SETTINGS) -> VerificationReport:
    """Evaluate both sides of an identity at one parameter point.

    Domain violations give a skipped report, quadrature accuracy failures an
    inconclusive one (``passed is None``).
    """
    ident = _coerce_identity(identity)
    check_params(ident, params)
    report = VerificationReport(ident, dict(params))
    start = time.perf_counter()
    try:
        lhs, rhs, extras = _DISPATCH[ident](params, settings)
    except DomainError as exc:
        report.skipped = True
        report.message = str(exc)
    except AccuracyError as exc:
        report.message = f"inconclusive: {exc}"
    else:
        report.lhs = complex(lhs)
        report.rhs = complex(rhs)
        report.extras = extras
        report.abs_err, report.rel_err = relative_error(report.lhs, report.rhs)
        if ident in LOG_FORM:
            report.offset_2pik = int(round((report.lhs - report.rhs).imag / TWO_PI))
        if ident is Identity.ASYMPTOTIC:
            report.passed = bool(report.abs_err <= 2.0 * extras["optimal_error"])
        else:
            report.passed = bool(report.rel_err <= TOLERANCES[ident])
    report.elapsed = time.perf_counter() - start
    return report


# ---------------------------------------------------------------------------
# sweeps


@dataclass
class SweepSummary:
    n_points: int
    n_skipped: int
    n_inconclusive: int
    n_pass: int
    pass_rate: float
    max_rel_err: float
    nonzero_offsets: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def expand_grid(identity, grid: dict) -> list[dict]:
    """Cartesian product of the grid values in parameter declaration order."""
    ident = _coerce_identity(identity)
    names = list(PARAMETERS[ident]) + [k for k in OPTIONAL_PARAMETERS.get(ident, ()) if k in grid]
    unknown = set(grid) - set(names)
    if unknown:
        raise ConfigurationError(f"unknown grid parameter(s) for {ident.value}: {sorted(unknown)}")
    missing = [k for k in PARAMETERS[ident] if k not in grid]
    if missing:
        raise ConfigurationError(f"grid is missing parameter(s) {missing}")
    values = [list(grid[k]) for k in names]
    return [dict(zip(names, combo)) for combo in itertools.product(*values)]


def summarize(reports: list[VerificationReport]) -> SweepSummary:
    active = [r for r in reports if not r.skipped]
    decided = [r for r in active if r.passed is not None]
    n_pass = sum(1 for r in decided if r.passed)
    return SweepSummary(
        n_points=len(reports),
        n_skipped=len(reports) - len(active),
        n_inconclusive=len(active) - len(decided),
        n_pass=n_pass,
        pass_rate=n_pass / len(active) if active else math.nan,
        max_rel_err=max((r.rel_err for r in decided), default=math.nan),
        nonzero_offsets=sum(1 for r in decided if r.offset_2pik != 0),
    )


def _verify_star(args):
    return verify(*args)


def sweep(identity, grid: dict, settings: QuadratureSettings = DEFAULT_SETTINGS, workers: int = 1):
    """Verify an identity over a parameter grid.

    Returns ``(reports, summary)``; the report order follows the grid order.
    Raises ConfigurationError when no point of the grid is admissible.
    """
    ident = _coerce_identity(identity)
    points = expand_grid(ident, grid)
    if not points:
        raise ConfigurationError("empty grid")
    jobs = [(ident, pt, settings) for pt in points]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_verify_star, jobs))
    else:
        reports = [verify(*job) for job in jobs]
    if all(r.skipped for r in reports):
        raise ConfigurationError("no admissible point in the grid")
    return reports, summarize(reports)
