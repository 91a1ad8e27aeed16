"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (the lines appear in the
terminal summary) or ``python tests/test_acceptance.py``.
"""

import cmath
import math
import time

import pytest

from qmod import modular, qseries
from qmod.verify import Identity, verify

RESULTS = {}


def record(n, ok, detail):
    line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    return ok


def run_grid(identity, points):
    t0 = time.perf_counter()
    reports = [verify(identity, p) for p in points]
    return reports, time.perf_counter() - t0


EULER_Q = [0.5, -0.7, 0.3 + 0.6j, 0.9j, -0.45 - 0.45j]
EULER_X = [0.5, -2.0, 1.2 + 1.2j, -0.3j, 1.9]


def test_criterion_01_euler():
    pts = [dict(q=q, x=x) for q in EULER_Q for x in EULER_X]
    reports, dt = run_grid(Identity.EULER, pts)
    worst = max(r.rel_err for r in reports)
    ok = len(reports) == 25 and worst <= 1e-11 and dt < 1.0
    assert record(1, ok, f"EULER 25 points max rel_err={worst:.2e} (tol 1e-11) time={dt:.2f}s")


def test_criterion_02_main():
    pts = [dict(alpha=a, nu=n) for a in (0.5, 1.0, 2.0) for n in (-0.5, 0.5, 1.5)]
    pts.append(dict(alpha=1.0, nu=0.0))
    reports, dt = run_grid(Identity.MAIN, pts)
    bad = [(r.params["alpha"], r.params["nu"], f"{r.rel_err:.1e}", f"abs {r.abs_err:.1e}")
           for r in reports if not r.rel_err <= 1e-8]
    worst = max(r.rel_err for r in reports)
    ok = not bad and dt < 30
    assert record(2, ok, f"MAIN max rel_err={worst:.2e} (tol 1e-8) time={dt:.2f}s failing={bad}")


def test_criterion_03_mainter():
    pts = [dict(q=q, x=x) for q in (0.3, 0.6, 0.9) for x in (0.2, 0.5, 0.8)]
    reports, dt = run_grid(Identity.MAINTER, pts)
    worst = max(r.rel_err for r in reports)
    ok = worst <= 1e-8 and dt < 60
    assert record(3, ok, f"MAINTER max rel_err={worst:.2e} (tol 1e-8) time={dt:.2f}s")


ALPHA_NU = [(a, n) for a in (0.5, 1.0, 2.0) for n in (0.1, 0.3, 0.7)]


def test_criterion_04_mp():
    reports, dt = run_grid(Identity.MP, [dict(alpha=a, nu=n) for a, n in ALPHA_NU])
    worst = max(r.rel_err for r in reports)
    ok = worst <= 1e-7 and dt < 120
    assert record(4, ok, f"MP max rel_err={worst:.2e} (tol 1e-7) time={dt:.2f}s")


def test_criterion_05_slice_and_independence():
    reports, _ = run_grid(Identity.PP_SLICE, [dict(alpha=a, nu=n) for a, n in ALPHA_NU])
    slice_err = max(r.abs_err for r in reports)
    ray_err = 0.0
    for a, n in ALPHA_NU:
        tau, xi = 1j * a, n * 1j * a
        best = modular.p_minus(tau, xi)
        for d in (-0.3, -0.6, -1.0, -1.3):
            sigma = math.pi / 2 - d
            margin = math.sin(sigma) - abs((xi * cmath.exp(-1j * sigma)).imag)
            if margin > 0:
                alt = modular.p_ray(tau, xi, modular.RayChoice(d, sigma, margin))
                ray_err = max(ray_err, abs(alt - best))
    r_err = abs(modular.p_contour_real(1.0, 0.5, 0.3) - modular.p_contour_real(1.0, 0.5, 0.6))
    ok = slice_err <= 1e-9 and ray_err <= 1e-9 and r_err <= 1e-10
    assert record(5, ok, f"PP_SLICE max abs_err={slice_err:.2e}, ray spread={ray_err:.2e} (tol 1e-9), "
                         f"r=0.3 vs 0.6 diff={r_err:.2e} (tol 1e-10)")


STOKES_POINTS = [(tau, xi) for tau in (0.2 + 0.8j, 1j, -0.3 + 0.9j) for xi in (0.1, -0.2 + 0.05j, 0.15 - 0.03j)]


def test_criterion_06_stokes():
    reports, dt = run_grid(Identity.STOKES, [dict(tau=t, xi=x) for t, x in STOKES_POINTS])
    admissible = [r for r in reports if not r.skipped]
    worst = max(r.abs_err for r in admissible)
    ok = len(admissible) == 9 and worst <= 1e-9 and dt < 60
    assert record(6, ok, f"STOKES {len(admissible)} points max |P- - P+ - sum|={worst:.2e} (tol 1e-9) time={dt:.2f}s")


XQ_TAUS = (1j, 0.1 + 0.9j, 0.3 + 0.7j)


def test_criterion_07_xqmain():
    pts = []
    for tau in XQ_TAUS:
        for xi in (0.25, 0.2 + 0.05j, tau):  # last column is the eta slice
            pts.append(dict(tau=tau, xi=xi))
    reports, dt = run_grid(Identity.XQMAIN, pts)
    worst = max(r.rel_err for r in reports)
    offsets = [r.offset_2pik for r in reports]
    ok = worst <= 1e-8 and not any(offsets) and dt < 120
    assert record(7, ok, f"XQMAIN 3x3 max rel_err={worst:.2e} (tol 1e-8) offsets={set(offsets)} time={dt:.2f}s")


def test_criterion_08_eta_theta():
    eta = [verify(Identity.ETA_MODULAR, dict(tau=t)) for t in (1j, 0.3 + 0.7j, 2j)]
    eta_err = max(r.rel_err for r in eta)
    spread = 0.0
    for tau in (1j, 0.3 + 0.7j, 2j):
        values = [qseries.theta_multiplier(xi, tau) * cmath.sqrt(-1j * tau)
                  for xi in (0.2, 0.1 + 0.05j, -0.3, 0.45 - 0.1j)]
        spread = max(spread, max(abs(v - values[0]) for v in values))
    ok = eta_err <= 1e-10 and spread <= 1e-9
    assert record(8, ok, f"ETA max rel_err={eta_err:.2e} (tol 1e-10); theta multiplier spread={spread:.2e} (tol 1e-9)")


def test_criterion_09_asymptotic():
    series = modular.asymptotic_b_series(0.999, 0.5)
    mags = series.log10_magnitudes
    k = series.optimal_index
    down_then_up = k > 1 and k < len(mags) and mags[0] > mags[k - 1] < mags[-1]
    value = modular.b_integral(0.999, 0.5)
    actual = abs(value - series.optimal_sum)
    sandwich = actual <= 2 * series.optimal_error
    indices = [modular.asymptotic_b_series(q, 0.5).optimal_index for q in (0.9, 0.99, 0.999)]
    monotone = indices[0] < indices[1] < indices[2]
    ok = down_then_up and sandwich and monotone
    assert record(9, ok, f"ASYMPTOTIC divergence shown={down_then_up}; |b - S_opt|={actual:.2e} vs "
                         f"2*first omitted=2*10^{series.log10_optimal_error:.1f} sandwich={sandwich}; "
                         f"optimal indices={indices} monotone={monotone}")


def test_criterion_10_mutation(monkeypatch):
    original = qseries.pochhammer_inf

    def perturbed(x, q):
        value, trunc = original(x, q)
        return value * (1 + 1e-6), trunc

    monkeypatch.setattr(qseries, "pochhammer_inf", perturbed)
    euler = verify(Identity.EULER, dict(q=0.5, x=0.3 + 0.2j))
    xq = verify(Identity.XQMAIN, dict(tau=1j, xi=0.25))
    gp = verify(Identity.G_PLUS, dict(tau=1j, xi=0.25))
    landen = verify(Identity.LANDEN, dict(x=3.0))
    ok = euler.passed is False and xq.passed is False and gp.passed and landen.passed
    assert record(10, ok, f"mutation: EULER {euler.status}, XQMAIN {xq.status}, "
                          f"G_PLUS {gp.status}, LANDEN {landen.status}")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
