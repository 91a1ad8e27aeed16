"""q-products and q-series: Pochhammer symbols, Euler's series, Lambert
series, Dedekind eta and the Jacobi triple product."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .errors import DomainError, ModularRouteError, PoleError
from .special import PI, TWO_PI

EPS = 2.220446049250313e-16
MAX_FACTORS = 10_000_000


@dataclass(frozen=True)
class SeriesTruncation:
    terms_used: int
    tail_bound: float


@dataclass(frozen=True)
class ModularPoint:
    """A point (tau, xi) together with q, x and their modular images.

    ``q = e^{2 pi i tau}``, ``x = e^{2 pi i xi}``, ``qstar = e^{-2 pi i/tau}``
    and ``xstar = e^{2 pi i xi/tau}``.
    """

    tau: complex
    xi: complex
    q: complex = field(init=False)
    x: complex = field(init=False)
    qstar: complex = field(init=False)
    xstar: complex = field(init=False)

    def __post_init__(self):
        tau = complex(self.tau)
        xi = complex(self.xi)
        if not tau.imag > 0:
            raise DomainError(f"Im tau must be positive, got tau={tau}")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "q", cmath.exp(2j * PI * tau))
        object.__setattr__(self, "x", cmath.exp(2j * PI * xi))
        object.__setattr__(self, "qstar", cmath.exp(-2j * PI / tau))
        object.__setattr__(self, "xstar", cmath.exp(2j * PI * xi / tau))

    @property
    def ratio(self) -> complex:
        """xi / tau."""
        return self.xi / self.tau

    @property
    def xi_off_real_rays(self) -> bool:
        """True unless xi lies on (-inf, -1] or [1, inf)."""
        return not (self.xi.imag == 0 and abs(self.xi.real) >= 1)

    @property
    def ratio_off_negative_axis(self) -> bool:
        """True unless xi/tau lies on (-inf, 0]."""
        w = self.ratio
        return not (w.imag == 0 and w.real <= 0)

    @property
    def ratio_side(self) -> int:
        """Sign of Im(xi/tau): +1 upper, -1 lower, 0 on the real axis."""
        im = self.ratio.imag
        return (im > 0) - (im < 0)


def _check_q(q: complex) -> None:
    if not abs(q) < 1:
        raise DomainError(f"|q| must be < 1, got |q|={abs(q)!r}")


def pochhammer_inf(x, q) -> tuple[complex, SeriesTruncation]:
    """(x; q)_inf = prod_{n>=0} (1 - x q^n) with a bound on the neglected tail.

    The product stops once the remaining factors can change the result by
    less than a quarter ulp relative.  Products that would need more than
    ten million factors raise ``ModularRouteError``.
    """
    x = complex(x)
    q = complex(q)
    _check_q(q)
    ax, aq = abs(x), abs(q)
    if ax == 0 or aq == 0:
        return 1.0 - x, SeriesTruncation(1, 0.0)
    # smallest n with |x||q|^n / (1 - |q|) < eps/4
    target = 0.25 * EPS * (1.0 - aq)
    if ax > target:
        needed = math.log(target / ax) / math.log(aq)
        if needed > MAX_FACTORS:
            raise ModularRouteError(
                f"(x;q)_inf with |q|={aq} needs ~{needed:.3g} factors; use the modular formula"
            )
    prod = 1.0 + 0j
    term = x
    n = 0
    while True:
        prod *= 1.0 - term
        n += 1
        term *= q
        at = abs(term)
        if at / (1.0 - aq) < 0.25 * EPS or at == 0:
            break
    # |prod_{k>=n}(1 - x q^k) - 1| <= exp(s) - 1,  s = sum_{k>=n} |x q^k|
    s = abs(term) / (1.0 - aq)
    return prod, SeriesTruncation(n, abs(prod) * math.expm1(s))


def pochhammer_n(x, q, n: int) -> complex:
    """Finite product prod_{k=0}^{n-1} (1 - x q^k)."""
    if n < 0:
        raise DomainError(f"n must be non-negative, got {n}")
    x = complex(x)
    q = complex(q)
    prod = 1.0 + 0j
    term = x
    for _ in range(n):
        prod *= 1.0 - term
        term *= q
    return prod


def euler_series(x, q) -> complex:
    """Euler's expansion sum_n q^{n(n-1)/2} (-x)^n / (q; q)_n.

    Summation ends after three consecutive terms below machine epsilon
    relative to the partial sum.
    """
    x = complex(x)
    q = complex(q)
    _check_q(q)
    total = 1.0 + 0j
    term = 1.0 + 0j
    qn = 1.0 + 0j  # q^n
    small = 0
    n = 0
    while small < 3:
        # t_{n+1} = t_n * (-x) q^n / (1 - q^{n+1})
        term *= -x * qn / (1.0 - qn * q)
        qn *= q
        n += 1
        total += term
        if abs(term) <= EPS * abs(total) or term == 0:
            small += 1
        else:
            small = 0
        if n > MAX_FACTORS:
            raise ModularRouteError("Euler series did not settle; use the modular formula")
    return total


def log_pochhammer_oracle(x, q) -> tuple[complex, SeriesTruncation]:
    """log (x; q)_inf from -sum_{m>=1} x^m / (m (1 - q^m)), for |x| < 1.

    Independent of the product code path; meant as a reference value.
    """
    x = complex(x)
    q = complex(q)
    _check_q(q)
    ax, aq = abs(x), abs(q)
    if not ax < 1:
        raise DomainError(f"log_pochhammer_oracle needs |x| < 1, got {ax!r}")
    if ax == 0:
        return 0j, SeriesTruncation(0, 0.0)
    total = 0j
    xm = 1.0 + 0j
    qm = 1.0 + 0j
    m = 0
    while True:
        m += 1
        xm *= x
        qm *= q
        total -= xm / (m * (1.0 - qm))
        # tail: sum_{k>m} |x|^k / (k (1-|q|)) <= |x|^{m+1} / ((m+1)(1-|q|)(1-|x|))
        bound = ax ** (m + 1) / ((m + 1) * (1.0 - aq) * (1.0 - ax))
        if bound <= 1e-17 * max(abs(total), 1e-300) or bound < 1e-300:
            return total, SeriesTruncation(m, bound)


def lambert_series(x, q) -> complex:
    """sum_{n>=0} x q^n / (1 - x q^n), which equals -x d/dx log (x; q)_inf."""
    x = complex(x)
    q = complex(q)
    _check_q(q)
    aq = abs(q)
    total = 0j
    term = x
    n = 0
    while True:
        if term == 1:
            raise PoleError(f"x q^{n} = 1 in lambert_series")
        total += term / (1.0 - term)
        n += 1
        term *= q
        at = abs(term)
        if at < 0.5:
            bound = 2.0 * at / (1.0 - aq)
            if bound <= 0.25 * EPS * max(abs(total), 1e-300) or at == 0:
                return total
        if n > MAX_FACTORS:
            raise ModularRouteError("Lambert series did not settle; use the modular formula")


def dedekind_eta(tau) -> complex:
    """eta(tau) = q^{1/24} (q; q)_inf with q^{1/24} = exp(2 pi i tau / 24)."""
    tau = complex(tau)
    if not tau.imag > 0:
        raise DomainError(f"Im tau must be positive, got {tau}")
    q = cmath.exp(2j * PI * tau)
    prod, _ = pochhammer_inf(q, q)
    return cmath.exp(2j * PI * tau / 24.0) * prod


def jacobi_theta(xi, tau) -> complex:
    """Triple product (q; q)(sqrt(q) x; q)(sqrt(q)/x; q), x = e^{2 pi i xi}.

    sqrt(q) is taken as e^{pi i tau}.  Symmetric under xi -> -xi.
    """
    tau = complex(tau)
    xi = complex(xi)
    if not tau.imag > 0:
        raise DomainError(f"Im tau must be positive, got {tau}")
    q = cmath.exp(2j * PI * tau)
    sq = cmath.exp(1j * PI * tau)
    x = cmath.exp(2j * PI * xi)
    a, _ = pochhammer_inf(q, q)
    b, _ = pochhammer_inf(sq * x, q)
    c, _ = pochhammer_inf(sq / x, q)
    return a * b * c


def theta_modular_image(xi, tau) -> complex:
    """(q*; q*)(-x*; q*)(-q*/x*; q*), the triple product after the
    substitution (q, x) -> (q*, x*)."""
    p = ModularPoint(tau, xi)
    qs, xs = p.qstar, p.xstar
    a, _ = pochhammer_inf(qs, qs)
    b, _ = pochhammer_inf(-xs, qs)
    c, _ = pochhammer_inf(-qs / xs, qs)
    return a * b * c


def theta_multiplier(xi, tau) -> complex:
    """Observed ratio theta(xi, tau) e^{pi i (xi + 1/2)^2 / tau} / image.

    The ratio depends on tau only; it is compared against 1/sqrt(-i tau).
    """
    tau = complex(tau)
    xi = complex(xi)
    gauss = cmath.exp(1j * PI * (xi + 0.5) ** 2 / tau)
    return jacobi_theta(xi, tau) * gauss / theta_modular_image(xi, tau)
