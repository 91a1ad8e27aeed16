"""qmod command line: eval, verify, sweep, asymptotic."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import modular, qseries, special
from .errors import AccuracyError, ConfigurationError, DomainError, QModError
from .qseries import ModularPoint, SeriesTruncation
from .quad import DEFAULT_SETTINGS, QuadratureSettings
from .verify import PARAMETERS, Identity, check_params, expand_grid, sweep, verify

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DOMAIN = 2
EXIT_ACCURACY = 3
EXIT_FAILED = 4

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX_RE = re.compile(
    rf"^\s*(?P<re>[+-]?{_NUM})?\s*(?:(?P<sign>[+-])?\s*(?P<im>{_NUM})?i)?\s*$"
)


def parse_complex(text: str) -> complex:
    """Parse "a+bi", "a", "bi", "i", "-i", "a-i"."""
    s = text.strip().replace(" ", "")
    m = _COMPLEX_RE.match(s)
    if not s or not m or (m.group("re") is None and not s.endswith("i")):
        raise ConfigurationError(f"cannot parse complex number {text!r}")
    re_part = m.group("re")
    has_imag = s.endswith("i")
    if has_imag and m.group("sign") is None and m.group("im") is None and re_part is not None:
        # "2i" is matched as re="2" followed by "i"
        return complex(0, float(re_part))
    real = float(re_part) if re_part is not None else 0.0
    imag = 0.0
    if has_imag:
        mag = float(m.group("im")) if m.group("im") is not None else 1.0
        imag = -mag if m.group("sign") == "-" else mag
    return complex(real, imag)


def format_complex(z: complex, digits: int | None = None) -> str:
    """Inverse of parse_complex; shortest round-trip repr unless digits is set."""
    z = complex(z)
    fmt = repr if digits is None else (lambda v: f"{v:.{digits}g}")
    if z.imag == 0:
        return fmt(z.real)
    sign = "-" if math.copysign(1.0, z.imag) < 0 else "+"
    return f"{fmt(z.real)}{sign}{fmt(abs(z.imag))}i"


# ---------------------------------------------------------------------------
# configuration


@dataclass
class RunConfig:
    command: str
    target: str | None = None
    params: dict = field(default_factory=dict)
    settings: QuadratureSettings = DEFAULT_SETTINGS
    output: str | None = None
    fmt: str = "text"


_SETTING_KEYS = {
    "abs_tol": float,
    "rel_tol": float,
    "max_depth": int,
    "ray_panel_growth": float,
    "ray_cutoff_magnitude": float,
    "pv_window": float,
}


def read_config_file(path: str) -> dict:
    """key=value lines; '#' starts a comment."""
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected key=value")
        key, value = (p.strip() for p in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _SETTING_KEYS:
            raise ConfigurationError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def build_settings(args) -> QuadratureSettings:
    changes = {}
    env_tol = os.environ.get("QMOD_DEFAULT_TOL")
    if env_tol:
        try:
            tol = float(env_tol)
        except ValueError:
            raise ConfigurationError(f"QMOD_DEFAULT_TOL is not a number: {env_tol!r}") from None
        changes.update(abs_tol=tol, rel_tol=tol)
    if getattr(args, "config", None):
        for k, v in read_config_file(args.config).items():
            try:
                changes[k] = _SETTING_KEYS[k](v)
            except ValueError:
                raise ConfigurationError(f"bad value for {k}: {v!r}") from None
    for k in _SETTING_KEYS:
        v = getattr(args, k, None)
        if v is not None:
            changes[k] = v
    return DEFAULT_SETTINGS.with_(**changes) if changes else DEFAULT_SETTINGS


def parse_params(pairs: list[str]) -> dict:
    """['--tau', 'i', '--xi', '0.25'] -> {'tau': i, 'xi': 0.25}."""
    out = {}
    it = iter(pairs)
    for token in it:
        if not token.startswith("--"):
            raise ConfigurationError(f"unexpected argument {token!r}")
        key = token[2:].replace("-", "_")
        if "=" in key:
            key, value = key.split("=", 1)
        else:
            try:
                value = next(it)
            except StopIteration:
                raise ConfigurationError(f"missing value for --{key}") from None
        if key in out:
            raise ConfigurationError(f"parameter {key} given twice")
        out[key] = parse_complex(value)
    return out


def parse_grid(text: str) -> dict:
    """"tau=i,0.5+0.5i;xi=0.1,0.2" -> {'tau': [...], 'xi': [...]}."""
    grid = {}
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ConfigurationError(f"grid entry {part!r} lacks '='")
        key, values = part.split("=", 1)
        key = key.strip()
        items = [v for v in (s.strip() for s in values.split(",")) if v]
        grid[key] = [parse_complex(v) for v in items]
    return grid


# ---------------------------------------------------------------------------
# eval


def _real_arg(v):
    v = complex(v)
    if v.imag != 0:
        raise DomainError(f"expected a real value, got {format_complex(v)}")
    return v.real


def _int_arg(v):
    r = _real_arg(v)
    if r != int(r):
        raise DomainError(f"expected an integer, got {r}")
    return int(r)


def _point(p):
    return ModularPoint(p["tau"], p["xi"])


# name -> (required params, optional params, callable(params, settings))
OPERATIONS = {
    "principal_log": (("z",), (), lambda p, s: special.principal_log(p["z"])),
    "li2": (("z",), (), lambda p, s: special.li2(p["z"])),
    "log_gamma": (("z",), (), lambda p, s: special.log_gamma(p["z"])),
    "bernoulli": (("k",), (), lambda p, s: special.bernoulli(_int_arg(p["k"]))),
    "stieltjes_b": (("t",), (), lambda p, s: special.stieltjes_b(p["t"])),
    "cot_kernel": (("t",), (), lambda p, s: special.cot_kernel(p["t"])),
    "pochhammer_inf": (("x", "q"), (), lambda p, s: qseries.pochhammer_inf(p["x"], p["q"])),
    "pochhammer_n": (("x", "q", "n"), (), lambda p, s: qseries.pochhammer_n(p["x"], p["q"], _int_arg(p["n"]))),
    "euler_series": (("x", "q"), (), lambda p, s: qseries.euler_series(p["x"], p["q"])),
    "log_pochhammer_oracle": (("x", "q"), (), lambda p, s: qseries.log_pochhammer_oracle(p["x"], p["q"])),
    "lambert_series": (("x", "q"), (), lambda p, s: qseries.lambert_series(p["x"], p["q"])),
    "dedekind_eta": (("tau",), (), lambda p, s: qseries.dedekind_eta(p["tau"])),
    "jacobi_theta": (("xi", "tau"), (), lambda p, s: qseries.jacobi_theta(p["xi"], p["tau"])),
    "theta_multiplier": (("xi", "tau"), (), lambda p, s: qseries.theta_multiplier(p["xi"], p["tau"])),
    "g_term": (("tau", "xi"), (), lambda p, s: modular.g_term(p["tau"], p["xi"])),
    "g_star": (("tau", "xi"), (), lambda p, s: modular.g_star(p["tau"], p["xi"])),
    "p_minus": (("tau", "xi"), (), lambda p, s: modular.p_minus(p["tau"], p["xi"], s)),
    "p_plus": (("tau", "xi"), (), lambda p, s: modular.p_plus(p["tau"], p["xi"], s)),
    "p_contour_real": (
        ("alpha", "nu"), ("r", "side"),
        lambda p, s: modular.p_contour_real(
            _real_arg(p["alpha"]), _real_arg(p["nu"]), _real_arg(p.get("r", 0.5)),
            int(_real_arg(p.get("side", -1))), s),
    ),
    "m_stieltjes": (("alpha", "nu"), (), lambda p, s: modular.m_stieltjes_with_error(_real_arg(p["alpha"]), _real_arg(p["nu"]), s)),
    "b_integral": (("q", "x"), (), lambda p, s: modular.b_integral(_real_arg(p["q"]), _real_arg(p["x"]), s)),
    "stokes_sum": (("tau", "xi"), (), lambda p, s: modular.stokes_sum(p["tau"], p["xi"])),
    "k_factor": (("tau", "xi"), (), lambda p, s: modular.k_factor(_point(p), s)),
    "xqmain_rhs": (("tau", "xi"), (), lambda p, s: modular.xqmain_rhs(_point(p), s)),
}


def _describe(result) -> tuple[complex, str]:
    if isinstance(result, tuple):
        value, meta = result
        if isinstance(meta, SeriesTruncation):
            return value, f"terms_used={meta.terms_used} tail_bound={meta.tail_bound:.3e}"
        return value, f"error_estimate={meta:.3e}"
    return result, ""


def run_eval(cfg: RunConfig, out) -> int:
    if cfg.target not in OPERATIONS:
        raise ConfigurationError(f"unknown operation {cfg.target!r}; choose from {sorted(OPERATIONS)}")
    required, optional, fn = OPERATIONS[cfg.target]
    unknown = set(cfg.params) - set(required) - set(optional)
    if unknown:
        raise ConfigurationError(f"unknown parameter(s) {sorted(unknown)} for {cfg.target}")
    missing = [k for k in required if k not in cfg.params]
    if missing:
        raise ConfigurationError(f"missing parameter(s) {missing} for {cfg.target}")
    value, meta = _describe(fn(cfg.params, cfg.settings))
    if cfg.fmt == "json":
        value = complex(value)
        json.dump({"operation": cfg.target, "value": [value.real, value.imag], "meta": meta}, out)
        out.write("\n")
    else:
        print(f"{cfg.target} = {format_complex(value, 15)}", file=out)
        if meta:
            print(meta, file=out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify / sweep


def run_verify(cfg: RunConfig, out) -> int:
    check_params(cfg.target, cfg.params)
    report = verify(cfg.target, cfg.params, cfg.settings)
    if cfg.fmt == "json":
        text = json.dumps(report.to_dict()) + "\n"
    else:
        text = (
            f"{report.identity_id.value} {report.status}"
            f" lhs={format_complex(report.lhs, 15)} rhs={format_complex(report.rhs, 15)}"
            f" abs_err={report.abs_err:.3e} rel_err={report.rel_err:.3e}"
            f" offset_2pik={report.offset_2pik} elapsed={report.elapsed:.3f}s"
        )
        if report.message:
            text += f"\n  {report.message}"
        text += "\n"
    _emit(text, cfg.output, out)
    if report.skipped:
        return EXIT_DOMAIN
    if report.passed is None:
        return EXIT_ACCURACY
    return EXIT_OK if report.passed else EXIT_FAILED


CSV_EXTRAS = {Identity.ASYMPTOTIC: ("optimal_index", "optimal_error", "actual_error")}


def sweep_csv(identity: Identity, names: list[str], reports, summary) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    extras = CSV_EXTRAS.get(identity, ())
    w.writerow(["identity", *names, "lhs_re", "lhs_im", "rhs_re", "rhs_im",
                "abs_err", "rel_err", "pass", "skipped", *extras])
    for r in reports:
        pass_cell = "" if r.passed is None else str(r.passed).lower()
        w.writerow([
            identity.value,
            *(format_complex(r.params[n]) for n in names),
            repr(r.lhs.real), repr(r.lhs.imag), repr(r.rhs.real), repr(r.rhs.imag),
            repr(r.abs_err), repr(r.rel_err), pass_cell, str(r.skipped).lower(),
            *(repr(r.extras.get(e, "")) if e in r.extras else "" for e in extras),
        ])
    s = summary
    buf.write(
        f"#summary,points={s.n_points},skipped={s.n_skipped},inconclusive={s.n_inconclusive},"
        f"pass={s.n_pass},pass_rate={s.pass_rate!r},max_rel_err={s.max_rel_err!r},"
        f"nonzero_offsets={s.nonzero_offsets}\n"
    )
    return buf.getvalue()


def run_sweep(cfg: RunConfig, grid_text: str, out, workers: int = 1) -> int:
    ident = Identity(cfg.target.upper()) if cfg.target.upper() in Identity.__members__ else None
    if ident is None:
        raise ConfigurationError(f"unknown identity {cfg.target!r}")
    grid = parse_grid(grid_text)
    points = expand_grid(ident, grid)
    if not points:
        raise ConfigurationError("empty grid")
    reports, summary = sweep(ident, grid, cfg.settings, workers=workers)
    names = list(points[0].keys())
    if cfg.fmt == "json":
        text = json.dumps({"reports": [r.to_dict() for r in reports], "summary": summary.to_dict()}, indent=1) + "\n"
    else:
        text = sweep_csv(ident, names, reports, summary)
    _emit(text, cfg.output, out)
    active = [r for r in reports if not r.skipped]
    if any(r.passed is None for r in active):
        return EXIT_ACCURACY
    return EXIT_OK if all(r.passed for r in active) else EXIT_FAILED


def run_asymptotic(cfg: RunConfig, out, k_max=None) -> int:
    q = _real_arg(cfg.params["q"])
    x = _real_arg(cfg.params["x"])
    series = modular.asymptotic_b_series(q, x, k_max)
    value = modular.b_integral(q, x, cfg.settings)
    info = {
        "q": q,
        "x": x,
        "k_max": len(series.coefficients),
        "optimal_index": series.optimal_index,
        "optimal_sum": series.optimal_sum,
        "optimal_error": series.optimal_error,
        "log10_optimal_error": series.log10_optimal_error,
        "b_integral": value,
        "actual_error": abs(value - series.optimal_sum),
    }
    if cfg.fmt == "json":
        text = json.dumps(info) + "\n"
    else:
        text = "".join(f"{k}: {v}\n" for k, v in info.items())
    _emit(text, cfg.output, out)
    return EXIT_OK


def _emit(text: str, path: str | None, out) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        out.write(text)


# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value file with quadrature settings")
    p.add_argument("--abs-tol", dest="abs_tol", type=float)
    p.add_argument("--rel-tol", dest="rel_tol", type=float)
    p.add_argument("--max-depth", dest="max_depth", type=int)
    p.add_argument("--pv-window", dest="pv_window", type=float)
    p.add_argument("--format", dest="fmt", choices=("text", "json", "csv"), default=None)
    p.add_argument("--output", "-o", help="write the result to this file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qmod", description="Evaluate and verify modular formulas for (x;q)_inf.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate one operation; parameters as --name value")
    p.add_argument("target", help="operation name")
    _add_common(p)

    p = sub.add_parser("verify", help="verify one identity at one point")
    p.add_argument("target", help="identity id, e.g. XQMAIN")
    _add_common(p)

    p = sub.add_parser("sweep", help="verify an identity over a grid and write CSV")
    p.add_argument("target", help="identity id")
    p.add_argument("--grid", required=True, help='e.g. "tau=i,0.5+0.5i;xi=0.1,0.2"')
    p.add_argument("--workers", type=int, default=1)
    _add_common(p)

    p = sub.add_parser("asymptotic", help="optimal truncation of the B-integral expansion")
    p.add_argument("--k-max", dest="k_max", type=int)
    _add_common(p)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args, rest = parser.parse_known_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        settings = build_settings(args)
        params = parse_params(rest)
        default_fmt = "csv" if args.command == "sweep" else "text"
        cfg = RunConfig(args.command, getattr(args, "target", None), params, settings,
                        args.output, args.fmt or default_fmt)
        if args.command == "eval":
            return run_eval(cfg, out)
        if args.command == "verify":
            return run_verify(cfg, out)
        if args.command == "sweep":
            if params:
                raise ConfigurationError(f"sweep takes parameters via --grid, got {sorted(params)}")
            return run_sweep(cfg, args.grid, out, args.workers)
        missing = [k for k in ("q", "x") if k not in params]
        extra = set(params) - {"q", "x"}
        if missing or extra:
            raise ConfigurationError("asymptotic needs exactly --q and --x")
        return run_asymptotic(cfg, out, args.k_max)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except AccuracyError as exc:
        print(f"accuracy error: {exc}", file=sys.stderr)
        return EXIT_ACCURACY
    except QModError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
