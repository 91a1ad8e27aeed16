"""Modular machinery for (x; q)_inf.

Conventions: q = e^{2 pi i tau}, x = e^{2 pi i xi}, q* = e^{-2 pi i/tau},
x* = e^{2 pi i xi/tau}.  ``log q`` is always the number 2 pi i tau, never the
principal logarithm of the computed q.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from itertools import count

import numpy as np
from scipy.special import zeta as hurwitz_zeta

from . import qseries
from .errors import DomainError
from .quad import DEFAULT_SETTINGS, QuadratureSettings, contour_ell, integrate_ray, integrate_segment, pv_integral_unit
from .qseries import EPS, ModularPoint, SeriesTruncation
from .special import (
    LOG_SQRT_2PI,
    PI,
    TWO_PI,
    _STIRLING_COEFFS,
    bernoulli_exact,
    cot_kernel,
    li2,
    log_gamma,
    stieltjes_b,
)

SIGMA_GRID = 256


@dataclass(frozen=True)
class SectorPoint:
    """A point of the log-Riemann surface given as modulus and unreduced argument."""

    modulus: float
    argument: float

    def __post_init__(self):
        if not self.modulus > 0:
            raise DomainError("SectorPoint modulus must be positive")

    @property
    def value(self) -> complex:
        return cmath.rect(self.modulus, self.argument)

    @classmethod
    def from_complex(cls, z: complex, *, sheet: int = 0) -> "SectorPoint":
        return cls(abs(z), cmath.phase(z) + TWO_PI * sheet)


@dataclass(frozen=True)
class RayChoice:
    d: float
    sigma: float
    margin: float


@dataclass
class AsymptoticSeries:
    """Terms of the small-log(q) expansion of the B-integral.

    ``coefficients[k-1]`` is the k-th term.  ``log10_magnitudes`` keeps the
    term sizes even where the floats underflow.
    """

    coefficients: list
    log10_magnitudes: list
    optimal_index: int
    optimal_error: float
    log10_optimal_error: float = field(default=-math.inf)

    def partial_sum(self, n: int) -> float:
        return math.fsum(self.coefficients[:n])

    @property
    def optimal_sum(self) -> float:
        return self.partial_sum(self.optimal_index)


def _as_sector_arg(tau: complex, branch: str) -> float:
    a = cmath.phase(tau)
    if branch == "plus" and a <= 0:
        a += TWO_PI
    return a


def _check_branch(branch: str) -> str:
    if branch in ("minus", "-"):
        return "minus"
    if branch in ("plus", "+"):
        return "plus"
    raise DomainError(f"branch must be 'minus' or 'plus', got {branch!r}")


# ---------------------------------------------------------------------------
# Stirling remainder


def _stirling_remainder(w: complex) -> complex:
    """R(w) with log Gamma(w) = (w - 1/2) log w - w + log sqrt(2 pi) + R(w)."""
    if abs(w) >= 12.0 and w.real >= 0:
        inv = 1.0 / w
        inv2 = inv * inv
        acc = 0j
        power = inv
        for c in _STIRLING_COEFFS:
            acc += c * power
            power *= inv2
        return acc
    return log_gamma(w) - (w - 0.5) * cmath.log(w) + w - LOG_SQRT_2PI


def _ratio(tau, xi) -> complex:
    tau = complex(tau)
    if tau == 0:
        raise DomainError("tau must be nonzero")
    return complex(xi) / tau


def g_term(tau, xi) -> complex:
    """G(tau, xi) = -log Gamma(w + 1) + (w + 1/2) log w - w + log sqrt(2 pi),
    w = xi / tau, principal branches; equals minus the Stirling remainder of
    log Gamma(w)."""
    w = _ratio(tau, xi)
    if w.imag == 0 and w.real <= 0:
        raise DomainError(f"xi/tau = {w.real!r} lies on (-inf, 0]")
    return -_stirling_remainder(w)


def g_star(tau, xi) -> complex:
    """Odd part (G(tau, xi) - G(tau, -xi)) / 2."""
    return 0.5 * (g_term(tau, xi) - g_term(tau, -complex(xi)))


# ---------------------------------------------------------------------------
# ray integrals P^d, P_-, P_+


def choose_ray(tau, xi, branch: str = "minus") -> RayChoice:
    """Pick an integration direction d for the ray integral P^d(tau, xi).

    sigma = arg tau - d runs over a fixed grid in (0, pi), restricted to
    d in (-pi, 0) for the minus branch and (0, pi) for the plus branch.
    The strip margin sin(sigma) - |Im(xi e^{-i sigma})| must be positive.
    Among admissible directions the one maximising
    min(margin, |sin d|) is returned, which keeps the ray away both from
    the edge of the strip and from the real poles at 2 pi k; ties go to the
    smaller sigma.
    """
    branch = _check_branch(branch)
    tau = complex(tau)
    xi = complex(xi)
    if tau == 0:
        raise DomainError("tau must be nonzero")
    arg_tau = _as_sector_arg(tau, branch)
    best = None
    best_score = 0.0
    for j in range(1, SIGMA_GRID):
        sigma = PI * j / SIGMA_GRID
        d = arg_tau - sigma
        if branch == "minus" and not -PI < d < 0:
            continue
        if branch == "plus" and not 0 < d < PI:
            continue
        margin = math.sin(sigma) - abs((xi * cmath.exp(-1j * sigma)).imag)
        if margin <= 0:
            continue
        score = min(margin, abs(math.sin(d)))
        if score > best_score:
            best_score = score
            best = RayChoice(d, sigma, margin)
    if best is None:
        raise DomainError(f"(tau={tau}, xi={xi}) lies outside Omega_{branch}: no admissible ray")
    return best


def _sin_over_expm1(w: complex, t: np.ndarray, z: np.ndarray) -> np.ndarray:
    # sin(w t) / (e^z - 1) for Re z > 0 without overflow
    a = np.exp(1j * w * t - z)
    b = np.exp(-1j * w * t - z)
    return (a - b) / (-2j * np.expm1(-z))


def _p_integrand(tau: complex, xi: complex):
    w = xi / tau

    def f(t):
        return _sin_over_expm1(w, t, 1j * t / tau) * cot_kernel(t)

    return f


def p_ray(tau, xi, choice: RayChoice, settings: QuadratureSettings = DEFAULT_SETTINGS) -> complex:
    """Integral of sin(xi t/tau)/(e^{i t/tau} - 1) (cot(t/2) - 2/t) dt/t over
    the ray arg t = choice.d."""
    tau = complex(tau)
    xi = complex(xi)
    if not choice.margin > 0:
        raise DomainError("ray choice has no positive strip margin")
    if xi == 0:
        return 0j
    value, _ = integrate_ray(_p_integrand(tau, xi), choice.d, settings)
    return value


def p_minus(tau, xi, settings: QuadratureSettings = DEFAULT_SETTINGS) -> complex:
    return p_ray(tau, xi, choose_ray(tau, xi, "minus"), settings)


def p_plus(tau, xi, settings: QuadratureSettings = DEFAULT_SETTINGS) -> complex:
    return p_ray(tau, xi, choose_ray(tau, xi, "plus"), settings)


def _real_slice_integrand(alpha: float, nu: float):
    def f(t):
        return _sin_over_expm1(nu, t, t / alpha) * cot_kernel(t)

    return f


def p_contour_real(alpha: float, nu: float, r: float = 0.5, side=-1,
                   settings: QuadratureSettings = DEFAULT_SETTINGS) -> complex:
    """P^{-/+}(alpha, nu) along the real half-line with semicircular detours
    of radius r around the integrand's poles t = 2 pi k."""
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    if not 0 < r < PI:
        raise DomainError(f"detour radius must lie in (0, pi), got {r}")
    if nu == 0:
        return 0j
    poles = (TWO_PI * k for k in count(1))
    value, _ = contour_ell(_real_slice_integrand(float(alpha), float(nu)), r, poles, side, settings)
    return value


def stokes_sum(tau, xi) -> tuple[complex, SeriesTruncation]:
    """2i sum_{n>=1} sin(2 n pi xi/tau) / (n (e^{2 n pi i/tau} - 1)).

    Requires |Im(xi/tau)| < -Im(1/tau).  Written in terms of q* and x*, the
    n-th term is (x*^n - x*^-n) q*^n / (n (1 - q*^n)).
    """
    tau = complex(tau)
    xi = complex(xi)
    if not tau.imag > 0:
        raise DomainError("Im tau must be positive")
    w = xi / tau
    if not abs(w.imag) < -(1.0 / tau).imag:
        raise DomainError("Stokes series diverges: need |Im(xi/tau)| < -Im(1/tau)")
    qs = cmath.exp(-2j * PI / tau)
    xs = cmath.exp(2j * PI * w)
    ratio = abs(qs) * math.exp(TWO_PI * abs(w.imag))
    a, b = xs * qs, qs / xs
    pa, pb, pq = a, b, qs
    total = 0j
    n = 1
    while True:
        total += (pa - pb) / (n * (1.0 - pq))
        # tail <= 2 ratio^{n+1} / ((n+1) (1-|q*|) (1-ratio))
        bound = 2.0 * ratio ** (n + 1) / ((n + 1) * (1.0 - abs(qs)) * (1.0 - ratio))
        if bound <= 0.25 * EPS * max(abs(total), 1e-300) or bound < 1e-300:
            return total, SeriesTruncation(n, bound)
        n += 1
        pa *= a
        pb *= b
        pq *= qs


# ---------------------------------------------------------------------------
# Stieltjes term M(alpha, nu)


def _pv_kernel(n: int, alpha: float, nu: float):
    a = TWO_PI * n * nu
    b = TWO_PI * n / alpha

    def g(t):
        z = b * t
        return np.sin(a * t) * np.exp(-z) / (-np.expm1(-z))

    return g


def _moment_kernel(k: int, alpha: float, nu: float):
    def g(s):
        z = TWO_PI * s / alpha
        return s ** (2 * k) * np.sin(TWO_PI * nu * s) * np.exp(-z) / (-np.expm1(-z))

    return g


def m_stieltjes_with_error(alpha: float, nu: float, settings: QuadratureSettings = DEFAULT_SETTINGS):
    """Returns (M(alpha, nu), error estimate).

    The principal-value part is summed term by term: I_n is computed by
    quadrature for n <= N, and the remaining n > N use
    I_n ~ sum_k J_2k / n^{2k+1}, which is accurate up to O(e^{-2 pi n/alpha})
    because 1/(1 - t^2) = sum_k t^{2k} wherever the n-th integrand lives.
    """
    alpha = float(alpha)
    nu = float(nu)
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    r = math.exp(-TWO_PI / alpha)
    # cosine series, ratio r
    cos_sum = 0.0
    rn = 1.0
    n = 0
    while True:
        n += 1
        rn *= r
        cos_sum -= math.cos(TWO_PI * n * nu) * rn / (n * (1.0 - rn))
        tail = rn * r / ((n + 1) * (1.0 - r) ** 2)
        if tail <= 1e-17 * max(abs(cos_sum), 1e-300) or tail < 1e-300:
            break
    errors = [tail]
    if nu == 0:
        return cos_sum, math.fsum(errors)

    n_direct = int(math.ceil(8.0 * alpha)) + 2
    pv_terms = []
    for n in range(1, n_direct + 1):
        val, err = pv_integral_unit(_pv_kernel(n, alpha, nu), settings)
        pv_terms.append(val.real / n)
        errors.append(err / n)

    # asymptotic tail over n > n_direct
    rho = alpha / (TWO_PI * n_direct)
    prev = math.inf
    for k in range(0, 60):
        # |J_2k| * hurwitz <= (2k)! zeta(2k+1) (alpha/2pi)^{2k+1} N^{-(2k+1)} / (2k+1)
        est = math.exp(math.lgamma(2 * k + 1) + (2 * k + 1) * math.log(rho)) * 1.21 / (2 * k + 1)
        if est > prev:  # asymptotic terms started to grow
            errors.append(prev)
            break
        moment, err = integrate_ray(_moment_kernel(k, alpha, nu), 0.0, settings)
        hz = float(hurwitz_zeta(2 * k + 2, n_direct + 1))
        pv_terms.append(moment.real * hz)
        errors.append(err * hz)
        prev = est
        if est < 1e-18:
            errors.append(est)
            break
    pv_part = math.fsum(pv_terms)
    value = cos_sum - (2.0 / PI) * pv_part
    return value, math.fsum(errors)


def m_stieltjes(alpha: float, nu: float, settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """M(alpha, nu): cosine series plus the Cauchy principal-value integral
    over (0, inf) with the pole at t = 1.  Real for real arguments."""
    return m_stieltjes_with_error(alpha, nu, settings)[0]


# ---------------------------------------------------------------------------
# B-integral and its divergent expansion


def _check_unit_interval(name, v):
    if not 0 < v < 1:
        raise DomainError(f"{name} must lie in (0, 1), got {v}")


def b_integral(q: float, x: float, settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """Integral over (0, inf) of B(eps t) x^t dt / t with eps = -log(q) / (2 pi)."""
    q = float(q)
    x = float(x)
    _check_unit_interval("q", q)
    _check_unit_interval("x", x)
    eps = -math.log(q) / TWO_PI
    lx = -math.log(x)

    def f(t):
        tr = t.real
        return stieltjes_b(eps * tr) * np.exp(-lx * tr) / tr

    value, _ = integrate_ray(f, 0.0, settings)
    return value.real


def _log_b2k_over_fact(k: int) -> tuple[float, int]:
    """(log |B_2k / (2k)!|, sign) for any k >= 1."""
    sign = 1 if k % 2 == 1 else -1
    if k <= 30:
        v = bernoulli_exact(2 * k) / math.factorial(2 * k)
        return math.log(abs(float(v))), sign
    # |B_2k|/(2k)! = 2 zeta(2k) / (2 pi)^{2k}
    zeta2k = 1.0 + 2.0 ** (-2 * k) + 3.0 ** (-2 * k)
    return math.log(2.0 * zeta2k) - 2 * k * math.log(TWO_PI), sign


def default_k_max(q: float, x: float) -> int:
    """Enough terms to pass the smallest one for this (q, x)."""
    eps = -math.log(q) / TWO_PI
    lx = -math.log(x)
    return int(min(200_000, math.ceil(lx / eps) + 20))


def asymptotic_b_series(q: float, x: float, k_max: int | None = None) -> AsymptoticSeries:
    """Terms B_2k (2 pi eps)^{2k-1} Gamma(2k-1) / ((2k)! (-log x)^{2k-1}).

    Term-by-term Laplace transform of the Taylor series of B.  The series
    diverges; the optimal index is where |term| is smallest, the partial sum
    up to and including it is the optimal truncation, and the next term
    is its error scale.  Bernoulli numbers past B_60 come from
    B_2k = (-1)^{k+1} 2 (2k)! zeta(2k) / (2 pi)^{2k}, with all sizes tracked
    in logarithms so that thousands of terms can be inspected.
    """
    q = float(q)
    x = float(x)
    _check_unit_interval("q", q)
    _check_unit_interval("x", x)
    if k_max is None:
        k_max = default_k_max(q, x)
    if not 1 <= int(k_max) <= 200_000:
        raise DomainError(f"k_max must lie in [1, 200000], got {k_max}")
    k_max = int(k_max)
    eps = -math.log(q) / TWO_PI
    lx = -math.log(x)
    log_ratio = math.log(TWO_PI * eps / lx)
    logs, signs = [], []
    for k in range(1, k_max + 2):
        lb, sign = _log_b2k_over_fact(k)
        logs.append(lb + (2 * k - 1) * log_ratio + math.lgamma(2 * k - 1) + math.log(TWO_PI * eps) * 0)
        signs.append(sign)
    # (2 pi eps)^{2k-1} / lx^{2k-1} is already in log_ratio
    coeffs = [s * math.exp(lg) if lg > -745 else 0.0 for s, lg in zip(signs, logs)]
    shown = logs[:k_max]
    opt = min(range(k_max), key=lambda i: (shown[i], i)) + 1
    omitted = logs[opt]  # term opt + 1
    ln10 = math.log(10.0)
    return AsymptoticSeries(
        coefficients=coeffs[:k_max],
        log10_magnitudes=[v / ln10 for v in shown],
        optimal_index=opt,
        optimal_error=abs(coeffs[opt]),
        log10_optimal_error=omitted / ln10,
    )


# ---------------------------------------------------------------------------
# modular factor and the right-hand side of the transformation


def _theorem_domain(p: ModularPoint) -> None:
    if not p.xi_off_real_rays:
        raise DomainError(f"xi = {p.xi} lies on (-inf, -1] or [1, inf)")
    if not p.ratio_off_negative_axis:
        raise DomainError(f"xi/tau = {p.ratio} lies on (-inf, 0]")


def _sheet_crossings(tau: complex, xi: complex) -> list[tuple[int, int]]:
    """Cut lines Re xi = k (Im xi < 0) of the principal dilogarithm that lie
    between xi and the real segment it is connected to inside the domain.

    Returns (k, direction) pairs, direction +1 for a crossing towards
    larger Re xi.  The domain excludes the ray xi in -tau (0, inf); points
    left of that ray connect to (-1, 0), points right of it to (0, 1).
    """
    if xi.imag >= 0:
        return []
    c = xi.imag * tau.real / tau.imag  # abscissa of the excluded ray at this depth
    a = xi.real
    out = []
    if a < c:
        if a > 0:
            out += [(k, 1) for k in range(0, math.floor(a) + 1)]
        elif a < -1:
            out += [(k, -1) for k in range(-1, math.floor(a), -1)]
    else:
        if a > 1:
            out += [(k, 1) for k in range(1, math.floor(a) + 1)]
        elif a < 0:
            out += [(k, -1) for k in range(0, math.floor(a), -1)]
    return out


def sheet_log_correction(tau, xi) -> complex:
    """Additive correction to the exponent making the principal-branch
    expression the analytic continuation in xi (zero unless Im xi < 0)."""
    tau = complex(tau)
    xi = complex(xi)
    total = 0j
    for k, direction in _sheet_crossings(tau, xi):
        # crossing Re xi = k flips sqrt(1 - x) and shifts li2 by 2 pi i log x
        total += 1j * PI - direction * 2j * PI * (xi - k) / tau
    return total


def _log_qproduct(x: complex, q: complex) -> complex:
    """log (x; q)_inf via peeled factors and the log-series oracle.

    Deliberately avoids qseries.pochhammer_inf so that identities comparing
    against the product keep disjoint code paths.
    """
    peeled = 0j
    term = x
    while abs(term) >= 0.5:
        peeled += cmath.log(1.0 - term)
        term *= q
    tail, _ = qseries.log_pochhammer_oracle(term, q)
    return peeled + tail


def _log_prefactor(p: ModularPoint, settings: QuadratureSettings) -> complex:
    # li2(x)/log q + P_-(tau, xi) + log q^{-1/24} + sheet correction
    log_q = 2j * PI * p.tau
    if p.xi.imag < 0 and p.xi.real == math.floor(p.xi.real):
        raise DomainError(f"x = e^(2 pi i xi) lies on the dilogarithm cut for xi = {p.xi}")
    return (
        li2(p.x) / log_q
        + p_minus(p.tau, p.xi, settings)
        - log_q / 24.0
        + sheet_log_correction(p.tau, p.xi)
    )


def xqmain_log_rhs(point: ModularPoint, settings: QuadratureSettings = DEFAULT_SETTINGS) -> complex:
    """Logarithm of the modular right-hand side (defined up to 2 pi i)."""
    p = point
    _theorem_domain(p)
    return (
        _log_prefactor(p, settings)
        + 0.5 * cmath.log(1.0 - p.x)
        + _log_qproduct(p.xstar * p.qstar, p.qstar)
        + g_term(p.tau, p.xi)
    )


def xqmain_rhs(point: ModularPoint, settings: QuadratureSettings = DEFAULT_SETTINGS) -> complex:
    """q^{-1/24} sqrt(1-x) (x* q*; q*)_inf exp(li2(x)/log q + G + P_-).

    Principal branches are used for li2 and the square root; below the
    real xi-axis, where these leave the analytic continuation from the real
    segment, the continuation factor is applied.
    """
    return cmath.exp(xqmain_log_rhs(point, settings))


def k_factor(point: ModularPoint, settings: QuadratureSettings = DEFAULT_SETTINGS) -> complex:
    """K(q, x) with (x; q)_inf = K(q, x) (x*; q*)_inf.

    Branch chosen by the sign of Im(xi/tau):
    upper: sqrt(1 - x) / sqrt(1 - x*);
    lower: sqrt(1 - x) sqrt(1 - 1/x*) / (1 - x*).
    """
    p = point
    _theorem_domain(p)
    side = p.ratio_side
    if side == 0:
        raise DomainError("k_factor needs Im(xi/tau) != 0 to select a branch")
    log_k = _log_prefactor(p, settings) + g_star(p.tau, p.xi) + 0.5 * cmath.log(1.0 - p.x)
    if side > 0:
        log_k -= 0.5 * cmath.log(1.0 - p.xstar)
    else:
        log_k += 0.5 * cmath.log(1.0 - 1.0 / p.xstar) - cmath.log(1.0 - p.xstar)
    return cmath.exp(log_k)
