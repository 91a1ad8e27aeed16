"""Integration machinery: adaptive Gauss-Kronrod on complex segments, rays
to infinity, principal values across t = 1 and detoured half-lines.

Integrands are vectorised: they receive a 1-d complex numpy array of nodes
and must return an array of the same shape.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable

import numpy as np

from .errors import AccuracyError, ConfigurationError, DivergenceError, DomainError, GeometryError

Integrand = Callable[[np.ndarray], np.ndarray]

_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# 15 nodes on [-1, 1] in increasing order, with matching weights.
NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[[1, 3, 5]] = _WG[:3]
GAUSS_WEIGHTS[7] = _WG[3]
GAUSS_WEIGHTS[[9, 11, 13]] = _WG[2::-1]

_EPMACH = np.finfo(float).eps
_UFLOW = np.finfo(float).tiny
MAX_INTERVALS = 20_000
MAX_PANELS = 400


@dataclass(frozen=True)
class QuadratureSettings:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-12
    max_depth: int = 60
    ray_panel_growth: float = 2.0
    ray_cutoff_magnitude: float = 1e-18
    pv_window: float = 0.5

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ConfigurationError("tolerances must be positive")
        if self.max_depth < 10:
            raise ConfigurationError("max_depth must be at least 10")
        if not 0 < self.pv_window < 1:
            raise ConfigurationError("pv_window must lie in (0, 1)")
        if not self.ray_panel_growth >= 1:
            raise ConfigurationError("ray_panel_growth must be >= 1")
        if not self.ray_cutoff_magnitude > 0:
            raise ConfigurationError("ray_cutoff_magnitude must be positive")

    def with_(self, **changes) -> "QuadratureSettings":
        return replace(self, **changes)


DEFAULT_SETTINGS = QuadratureSettings()


@dataclass(frozen=True)
class PathSpec:
    """Description of an integration path.

    kind is one of ``"segment"`` (uses a, b), ``"ray"`` (uses direction,
    origin) or ``"detoured_half_line"`` (uses radius, side, poles).
    """

    kind: str
    a: complex = 0j
    b: complex = 0j
    direction: float = 0.0
    origin: complex = 0j
    radius: float = 0.0
    side: int = -1
    poles: tuple = ()

    def __post_init__(self):
        if self.kind == "segment":
            if not (np.isfinite(complex(self.a)) and np.isfinite(complex(self.b))):
                raise GeometryError("segment endpoints must be finite")
        elif self.kind == "ray":
            if not abs(self.direction) < math.pi:
                raise GeometryError("ray direction must satisfy |d| < pi")
        elif self.kind == "detoured_half_line":
            _check_detours(self.radius, list(self.poles))
        else:
            raise GeometryError(f"unknown path kind {self.kind!r}")


def integrate_path(f: Integrand, path: PathSpec, settings: QuadratureSettings = DEFAULT_SETTINGS):
    """Dispatch on a PathSpec; returns (value, error_estimate)."""
    if path.kind == "segment":
        return integrate_segment(f, path.a, path.b, settings)
    if path.kind == "ray":
        return integrate_ray(f, path.direction, settings, origin=path.origin)
    return contour_ell(f, path.radius, path.poles, path.side, settings)


# ---------------------------------------------------------------------------
# adaptive segment rule


def _gk_pair(f: Integrand, a: complex, b: complex):
    """Kronrod-15 estimate, error estimate and integral of |f| on [a, b]."""
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    y = np.asarray(f(c + h * NODES), dtype=complex)
    if not np.all(np.isfinite(y)):
        raise AccuracyError(f"integrand is not finite on [{a}, {b}]")
    return _gk_from_values(y, h)


def _gk_from_values(y: np.ndarray, h: complex):
    resk = np.dot(KRONROD_WEIGHTS, y)
    resg = np.dot(GAUSS_WEIGHTS, y)
    ah = abs(h)
    resabs = ah * np.dot(KRONROD_WEIGHTS, np.abs(y))
    mean = 0.5 * resk
    resasc = ah * np.dot(KRONROD_WEIGHTS, np.abs(y - mean))
    err = ah * abs(resk - resg)
    if resasc != 0 and err != 0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    if resabs > _UFLOW / (50.0 * _EPMACH):
        err = max(50.0 * _EPMACH * resabs, err)
    return h * resk, err, resabs


def _gk_halves(f: Integrand, a: complex, b: complex):
    m = 0.5 * (a + b)
    h = 0.25 * (b - a)
    nodes = np.concatenate([0.5 * (a + m) + h * NODES, 0.5 * (m + b) + h * NODES])
    y = np.asarray(f(nodes), dtype=complex)
    if not np.all(np.isfinite(y)):
        raise AccuracyError(f"integrand is not finite on [{a}, {b}]")
    return _gk_from_values(y[:15], h), _gk_from_values(y[15:], h), m


def _adaptive(f: Integrand, a: complex, b: complex, settings: QuadratureSettings):
    a = complex(a)
    b = complex(b)
    if a == b:
        return 0j, 0.0, 0.0
    val, err, resabs = _gk_pair(f, a, b)
    heap = [(-err, 0, a, b, val, err, resabs, 0)]
    done = []  # intervals that reached max_depth
    done_err = 0.0
    counter = 1
    total, total_err = val, err
    while True:
        tol = max(settings.abs_tol, settings.rel_tol * abs(total))
        if total_err <= tol:
            break
        if not heap:
            raise AccuracyError(
                f"quadrature on [{a}, {b}] hit max_depth={settings.max_depth}",
                estimate=total, error=total_err,
            )
        if counter > MAX_INTERVALS:
            raise AccuracyError(
                f"quadrature on [{a}, {b}] needed more than {MAX_INTERVALS} intervals",
                estimate=total, error=total_err,
            )
        item = heapq.heappop(heap)
        _, _, lo, hi, v, e, ra, depth = item
        if depth >= settings.max_depth:
            done.append(item)
            done_err += e
            if done_err > tol:
                # frozen intervals alone exceed the budget; refining others cannot help
                raise AccuracyError(
                    f"quadrature on [{a}, {b}] hit max_depth={settings.max_depth}",
                    estimate=total, error=total_err,
                )
            continue
        (v1, e1, r1), (v2, e2, r2), mid = _gk_halves(f, lo, hi)
        counter += 1
        heapq.heappush(heap, (-e1, counter, lo, mid, v1, e1, r1, depth + 1))
        counter += 1
        heapq.heappush(heap, (-e2, counter, mid, hi, v2, e2, r2, depth + 1))
        total += v1 + v2 - v
        total_err += e1 + e2 - e
    items = heap + done
    value = complex(math.fsum(it[4].real for it in items), math.fsum(it[4].imag for it in items))
    error = math.fsum(it[5] for it in items)
    resabs = math.fsum(it[6] for it in items)
    return value, error, resabs


def integrate_segment(f: Integrand, a, b, settings: QuadratureSettings = DEFAULT_SETTINGS):
    """Integrate f along the straight segment from a to b.

    Global adaptive bisection with the Gauss-Kronrod 7/15 pair.  Returns
    ``(value, error_estimate)``; raises AccuracyError (carrying the best
    estimate) if the tolerance cannot be met within ``max_depth`` levels.
    """
    value, error, _ = _adaptive(f, a, b, settings)
    return value, error


# ---------------------------------------------------------------------------
# rays


def _ray_panels(f: Integrand, origin: complex, direction: complex, settings: QuadratureSettings):
    """Yield (value, error, resabs, length) for successive geometric panels."""
    start = 0.0
    length = 1.0
    for _ in range(MAX_PANELS):
        a = origin + start * direction
        b = origin + (start + length) * direction
        val, err, resabs = _adaptive(f, a, b, settings)
        yield val, err, resabs, length
        start += length
        length *= settings.ray_panel_growth
    raise DivergenceError(f"ray integral did not decay within {MAX_PANELS} panels")


def _integrate_to_infinity(f, origin, direction, settings):
    vals, errs = [], []
    prev_mean = math.inf
    stalled = 0
    for val, err, resabs, length in _ray_panels(f, origin, direction, settings):
        vals.append(val)
        errs.append(err)
        if resabs < settings.ray_cutoff_magnitude:
            # geometric decay: remaining panels are bounded by this one
            errs.append(resabs)
            break
        mean = resabs / length
        if mean >= prev_mean:
            stalled += 1
            if stalled >= 3:
                raise DivergenceError(
                    "integrand does not decay along the ray",
                    estimate=complex(sum(vals)), error=math.inf,
                )
        else:
            stalled = 0
        prev_mean = mean
    value = complex(math.fsum(v.real for v in vals), math.fsum(v.imag for v in vals))
    return value, math.fsum(errs)


def integrate_ray(f: Integrand, d: float, settings: QuadratureSettings = DEFAULT_SETTINGS, origin=0j):
    """Integrate f from ``origin`` to infinity along the direction e^{i d}.

    Panels [0, 1], [1, 1 + g], [1 + g, 1 + g + g^2], ... (g =
    ``ray_panel_growth``) are added until one has integral of |f| below
    ``ray_cutoff_magnitude``.  Three panels in a row whose mean |f| does
    not shrink raise DivergenceError.  Returns ``(value, error_estimate)``.
    """
    if not abs(d) < math.pi:
        raise GeometryError(f"ray direction must satisfy |d| < pi, got {d}")
    direction = complex(math.cos(d), math.sin(d))
    return _integrate_to_infinity(f, complex(origin), direction, settings)


# ---------------------------------------------------------------------------
# principal value at t = 1


def pv_integral_unit(f: Integrand, settings: QuadratureSettings = DEFAULT_SETTINGS):
    """PV integral over (0, inf) of f(t) / (1 - t^2), pole at t = 1.

    The window (1 - h, 1 + h), h = ``pv_window``, is folded onto (0, h) by
    pairing g(1 + u) with g(1 - u); the pair is bounded as u -> 0, so no
    singular part has to be subtracted.  Returns ``(value, error)``.
    """
    at_one = np.asarray(f(np.array([1.0 + 0j])), dtype=complex)
    if not np.all(np.isfinite(at_one)):
        raise DomainError("pv_integral_unit needs f to be finite at t = 1")
    h = settings.pv_window

    def g(t):
        return f(t) / (1.0 - t * t)

    def paired(u):
        return g(1.0 + u) + g(1.0 - u)

    left, e1 = integrate_segment(g, 0.0, 1.0 - h, settings)
    mid, e2 = integrate_segment(paired, 0.0, h, settings)
    tail, e3 = integrate_ray(g, 0.0, settings, origin=1.0 + h)
    return left + mid + tail, e1 + e2 + e3


# ---------------------------------------------------------------------------
# detoured half-line


def _side_sign(side) -> int:
    if side in (-1, "-", "minus", "lower"):
        return -1
    if side in (1, "+", "plus", "upper"):
        return 1
    raise GeometryError(f"unknown detour side {side!r}")


def _check_detours(r: float, poles: list) -> None:
    if not r > 0:
        raise GeometryError("detour radius must be positive")
    prev = 0.0
    for i, p in enumerate(poles):
        gap = p - prev
        limit = r if i == 0 else 2 * r
        if not gap > limit:
            raise GeometryError(
                f"pole spacing {gap} at {p} is not larger than {'r' if i == 0 else '2r'} = {limit}"
            )
        prev = p


def _arc_integrand(f: Integrand, centre: float, r: float):
    def arc(phi):
        e = np.exp(1j * phi)
        return f(centre + r * e) * (1j * r * e)
    return arc


def contour_ell(f: Integrand, r: float, poles: Iterable[float], side=-1,
                settings: QuadratureSettings = DEFAULT_SETTINGS):
    """Integrate along the positive real axis with semicircular detours.

    Each pole p is bypassed on the arc of radius r from p - r to p + r,
    through the lower half-plane for side -1 (passing the pole on its
    right when travelling outwards) and the upper half-plane for side +1.
    ``poles`` may be an infinite iterator: the walk stops once a whole
    segment-plus-arc block contributes less than ``ray_cutoff_magnitude``.
    A finite pole list is followed by a ray along the real axis.

    Returns ``(value, error_estimate)``.
    """
    sign = _side_sign(side)
    if not r > 0:
        raise GeometryError("detour radius must be positive")
    phi_end = 2 * math.pi if sign < 0 else 0.0
    vals, errs = [], []
    pos = 0.0
    prev = None
    finished = False
    for count, p in enumerate(poles):
        p = float(p)
        if prev is None:
            if not p > r:
                raise GeometryError(f"first pole {p} must exceed the detour radius {r}")
        elif not p - prev > 2 * r:
            raise GeometryError(f"pole spacing {p - prev} is not larger than 2r = {2 * r}")
        seg, e1, ra1 = _adaptive(f, pos, p - r, settings)
        arc, e2, ra2 = _adaptive(_arc_integrand(f, p, r), math.pi, phi_end, settings)
        vals += [seg, arc]
        errs += [e1, e2]
        pos = p + r
        prev = p
        if count > 0 and ra1 + ra2 < settings.ray_cutoff_magnitude:
            errs.append(ra1 + ra2)
            finished = True
            break
        if count > 100_000:
            raise DivergenceError("detoured integral did not decay")
    if not finished:
        tail, e3 = _integrate_to_infinity(f, complex(pos), 1.0 + 0j, settings)
        vals.append(tail)
        errs.append(e3)
    value = complex(math.fsum(v.real for v in vals), math.fsum(v.imag for v in vals))
    return value, math.fsum(errs)
