"""Branch-aware elementary and classical special functions.

Everything here works in IEEE double precision.  Scalar functions take and
return Python complex numbers; the two kernels ``stieltjes_b`` and
``cot_kernel`` also accept numpy arrays so that quadrature rules can
evaluate a whole panel of nodes in one call.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import BranchCutError, DomainError, PoleError

PI = math.pi
TWO_PI = 2.0 * math.pi
ZETA2 = PI * PI / 6.0
LOG_SQRT_2PI = 0.5 * math.log(TWO_PI)

_BERNOULLI_MAX = 60


@lru_cache(maxsize=None)
def _bernoulli_table() -> dict[int, Fraction]:
    # Akiyama-Tanigawa in exact rationals; fine for n <= 60.
    a = [Fraction(0)] * (_BERNOULLI_MAX + 1)
    table = {}
    for m in range(_BERNOULLI_MAX + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        table[m] = a[0]
    return table


def bernoulli(k: int) -> float:
    """Bernoulli number B_k for even k in [2, 60], rounded from an exact table."""
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)):
        raise DomainError(f"Bernoulli index must be an integer, got {k!r}")
    k = int(k)
    if k < 2 or k > _BERNOULLI_MAX or k % 2:
        raise DomainError(f"Bernoulli index must be even and in [2, {_BERNOULLI_MAX}], got {k}")
    return float(_bernoulli_table()[k])


def bernoulli_exact(k: int) -> Fraction:
    bernoulli(k)  # same validation
    return _bernoulli_table()[int(k)]


# B_{2k} / (2k)! for k = 1..30, used by both Taylor kernels.
_B2K_OVER_FACT = np.array(
    [float(_bernoulli_table()[2 * k] / math.factorial(2 * k)) for k in range(1, 31)]
)


def principal_log(z) -> complex:
    """Principal logarithm with imaginary part in (-pi, pi].

    >>> principal_log(-1)
    3.141592653589793j
    """
    z = complex(z)
    if z == 0:
        raise DomainError("logarithm of zero")
    w = cmath.log(z)
    # cmath honours a negative zero imaginary part and returns -i*pi there.
    if w.imag == -PI:
        w = complex(w.real, PI)
    return w


# ---------------------------------------------------------------------------
# dilogarithm


def _li2_series(z: complex) -> complex:
    # sum z^n / n^2, |z| <= 1/2
    total = 0j
    power = z
    n = 1
    while True:
        term = power / (n * n)
        total += term
        if abs(term) <= 1e-17 * abs(total) or abs(term) < 1e-300:
            break
        n += 1
        power *= z
    return total


def _li2_bernoulli(z: complex) -> complex:
    # Li2(z) = sum_n B_n u^{n+1}/(n+1)!, u = -log(1-z), |u| < 2 pi
    u = -cmath.log(1.0 - z)
    u2 = u * u
    total = u - 0.25 * u2
    power = u * u2  # u^3
    for k in range(1, 31):
        term = _B2K_OVER_FACT[k - 1] / (2 * k + 1) * power
        total += term
        if abs(term) <= 1e-17 * abs(total):
            break
        power *= u2
    return total


def li2(z) -> complex:
    """Principal branch of the dilogarithm, Li2(z) = sum_{n>=1} z^n / n^2.

    The cut is [1, inf); points on it (other than 1 itself) are rejected.
    Evaluation uses the defining series on |z| <= 1/2, the reflection
    z -> 1 - z near 1, the inversion z -> 1/z for |z| >= 2, and the
    Bernoulli series in -log(1 - z) on the remaining annulus.
    """
    z = complex(z)
    if z.imag == 0 and z.real > 1:
        raise BranchCutError(f"li2 argument {z.real!r} lies on the cut [1, inf)")
    if z == 0:
        return 0j
    if z == 1:
        return complex(ZETA2)
    if abs(z) <= 0.5:
        return _li2_series(z)
    if abs(1.0 - z) <= 0.5:
        w = 1.0 - z
        return ZETA2 - cmath.log(z) * cmath.log(w) - _li2_series(w)
    if abs(z) >= 2.0:
        lm = cmath.log(-z)
        return -ZETA2 - 0.5 * lm * lm - _li2_series(1.0 / z)
    return _li2_bernoulli(z)


# ---------------------------------------------------------------------------
# log Gamma

_STIRLING_COEFFS = [
    float(_bernoulli_table()[2 * k] / (2 * k * (2 * k - 1))) for k in range(1, 11)
]


def log_gamma(z) -> complex:
    """Analytic log Gamma on C minus (-inf, 0].

    The Stirling series is applied after shifting the argument with the
    recurrence until Re z >= 0 and |z| >= 10.  Summing principal logarithms
    of the shifted factors keeps the result on the branch that is real on
    the positive axis; on the negative axis the limit from above is
    returned.
    """
    z = complex(z)
    if z.imag == 0 and z.real <= 0 and z.real == math.floor(z.real):
        raise PoleError(f"log_gamma has a pole at {z.real!r}")
    correction = 0j
    w = z
    while w.real < 0 or abs(w) < 10.0:
        correction += cmath.log(w)
        w += 1.0
    inv = 1.0 / w
    inv2 = inv * inv
    series = 0j
    power = inv
    for c in _STIRLING_COEFFS:
        series += c * power
        power *= inv2
    return (w - 0.5) * cmath.log(w) - w + LOG_SQRT_2PI + series - correction


# ---------------------------------------------------------------------------
# kernels


def _as_array(t):
    arr = np.asarray(t)
    if arr.dtype.kind not in "fc":
        arr = arr.astype(float)
    return arr


def _is_scalar(t) -> bool:
    return np.ndim(t) == 0


def stieltjes_b(t):
    """B(t) = 1/(e^{2 pi t} - 1) - 1/(2 pi t) + 1/2.

    Odd, with a removable singularity at 0.  For |2 pi t| < 1/4 the odd
    Taylor series sum_k B_{2k} (2 pi t)^{2k-1} / (2k)! (15 terms) is used.
    Accepts scalars or arrays; real input gives real output.
    """
    arr = _as_array(t)
    if np.any((arr.real == 0) & (arr.imag != 0) & (arr.imag == np.round(arr.imag))):
        raise PoleError("stieltjes_b has poles at nonzero integer multiples of i")
    real_input = arr.dtype.kind == "f"
    if real_input:
        # evaluate at |t| so that B(-t) = -B(t) holds bit for bit
        sign = np.sign(arr)
        arr = np.abs(arr)
    y = TWO_PI * arr
    out = np.empty_like(y)
    small = np.abs(y) < 0.25
    if np.any(small):
        ys = y[small]
        y2 = ys * ys
        acc = np.zeros_like(ys)
        for c in _B2K_OVER_FACT[14::-1]:
            acc = acc * y2 + c
        out[small] = acc * ys
    big = ~small
    if np.any(big):
        yb = y[big]
        with np.errstate(over="ignore"):
            out[big] = 1.0 / np.expm1(yb) - 1.0 / yb + 0.5
    if real_input:
        out = sign * out
    if _is_scalar(t):
        return out.item()
    return out


_COT_COEFFS = np.array(
    [2.0 * (-1) ** n * float(_bernoulli_table()[2 * n] / math.factorial(2 * n)) for n in range(1, 13)]
)


def cot_kernel(t):
    """(cot(t/2) - 2/t) / t, even and analytic near 0 with value -1/6 there.

    Poles at t = 2 pi k, k != 0.  Accepts scalars or arrays.
    """
    arr = _as_array(t)
    on_axis = arr.imag == 0 if arr.dtype.kind == "c" else np.ones(arr.shape, bool)
    k = np.round(arr.real / TWO_PI)
    if np.any(on_axis & (k != 0) & np.isclose(arr.real, TWO_PI * k, rtol=4e-16, atol=0)):
        raise PoleError("cot_kernel has poles at nonzero multiples of 2 pi")
    out = np.empty_like(arr)
    small = np.abs(arr) < 0.5
    if np.any(small):
        ts = arr[small]
        t2 = ts * ts
        acc = np.zeros_like(ts)
        for c in _COT_COEFFS[::-1]:
            acc = acc * t2 + c
        out[small] = acc
    big = ~small
    if np.any(big):
        tb = arr[big]
        out[big] = (1.0 / np.tan(0.5 * tb) - 2.0 / tb) / tb
    if _is_scalar(t):
        return out.item()
    return out
