"""
Command-line front end: ``collapse-bounds {exclusion,curve,verify}``.

Configuration files are TOML restricted to flat, dotted keys, e.g.::

    alphas = [0.5, 1.0]
    grid.n = 120
    ligo.s_exp = 9.025e-27
    bounds = ["lower", "radiation"]

Every table is optional; built-in defaults reproduce the standard setup.

Exit codes: 0 success, 1 failed statistical verification, 2 usage or
configuration error, 3 domain error, 4 numerical failure, 5 I/O error.
"""

from __future__ import annotations

import argparse
import io
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import bounds as B
from .core import CONSTANTS, CollapseParams, DomainError, QuadratureError
from .montecarlo import NoiseGridConfig, momentum_variance

__all__ = ["ConfigError", "RunConfig", "GridSpec", "MonteCarloSpec",
           "load_config", "parse_config", "cmd_exclusion", "cmd_curve",
           "cmd_verify", "main"]

EXIT_OK, EXIT_VERIFY_FAILED, EXIT_USAGE, EXIT_DOMAIN, EXIT_NUMERIC, EXIT_IO = range(6)
EXCLUSION_HEADER = ("r_c_m,lambda_lower,lambda_radiation,lambda_ligo,lambda_lisa,"
                    "allowed_min,allowed_max,excluded,reliability_flag")
CURVE_HEADER = "r_c_m,lambda,regime,validity,reliability"


class ConfigError(ValueError):
    """Malformed configuration file or command line."""


@dataclass(frozen=True)
class GridSpec:
    r_min: float = 1e-9
    r_max: float = 1e-2
    n: int = 240
    log: bool = True

    def __post_init__(self):
        if not (0 < self.r_min < self.r_max) or not math.isfinite(self.r_max):
            raise ConfigError("grid: need 0 < r_min < r_max")
        if self.n < 2:
            raise ConfigError("grid: n must be >= 2")

    def values(self):
        if self.log:
            return B.default_grid(self.r_min, self.r_max, self.n)
        return np.linspace(self.r_min, self.r_max, self.n)


@dataclass(frozen=True)
class MonteCarloSpec:
    alphas: tuple = (1.0, 0.5)
    mass_over_m0: float = 1.0
    lam: float = 2.2e-17
    r_c: float = 1e-7
    n_trajectories: int = 1000
    spacing: float = 0.25
    half_width: float = 8.0
    dt: float = 1e-3
    n_steps: int = 1000
    seed: int = 42


@dataclass(frozen=True)
class RunConfig:
    """Everything a CLI run needs; defaults reproduce the standard exclusion plots."""

    alphas: tuple = (0.5, 1.0, 1.5, 2.0)
    grid: GridSpec = field(default_factory=GridSpec)
    bounds: tuple = B.BOUND_KINDS
    disk: B.DiskSpec = field(default_factory=B.DiskSpec)
    radiation: B.RadiationBoundSpec = B.GERMANIUM
    ligo: B.DetectorSpec = B.LIGO
    lisa: B.DetectorSpec = B.LISA
    montecarlo: MonteCarloSpec = field(default_factory=MonteCarloSpec)
    out: Optional[str] = None

    def __post_init__(self):
        if not self.alphas or any(not (a > 0) for a in self.alphas):
            raise ConfigError("alphas must be a non-empty list of positive numbers")
        if not self.bounds or set(self.bounds) - set(B.BOUND_KINDS):
            raise ConfigError(f"bounds must be a non-empty subset of {list(B.BOUND_KINDS)}")


# user-facing key -> dataclass field, per section
_DISK_KEYS = {"r_d": "r_d", "r_a": "r_a", "m_a_over_m0": "m_a", "n_a": "n_a",
              "tau": "tau", "displacement": "D"}
_RADIATION_KEYS = {"coefficient": "coefficient", "mu0": "mu0", "mass_kg": "mass",
                   "lattice": "lattice", "size": "D"}
_DETECTOR_KEYS = {"mass_kg": "mass", "a": "a", "length": "L", "radius": "R",
                  "cross_section": "A_P", "s_exp": "s_exp",
                  "spectrum_divisor": "spectrum_divisor"}
_GRID_KEYS = {"r_min", "r_max", "n", "log"}
_MC_KEYS = {f.name for f in fields(MonteCarloSpec)}


def _line_of(text, section, key):
    for no, line in enumerate(text.splitlines(), 1):
        s = line.split("#", 1)[0].replace(" ", "")
        if s.startswith(f"{section}.{key}=") or (section is None and s.startswith(f"{key}=")):
            return no
    current = None
    for no, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if s.startswith("["):
            current = s.strip("[] ")
        elif current == section and s.replace(" ", "").startswith(f"{key}="):
            return no
    return None


def _err(text, section, key, msg):
    name = f"{section}.{key}" if section else key
    line = _line_of(text, section, key)
    where = f"line {line}: " if line else ""
    return ConfigError(f"{where}field '{name}': {msg}")


def _number(text, section, key, value, kind=float):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _err(text, section, key, f"expected a number, got {value!r}")
    if kind is int:
        if float(value) != int(value):
            raise _err(text, section, key, f"expected an integer, got {value!r}")
        return int(value)
    return float(value)


def _section(text, data, name, allowed):
    sec = data.get(name, {})
    if not isinstance(sec, dict):
        raise _err(text, None, name, "expected a table of dotted keys")
    for k in sec:
        if k not in allowed:
            raise _err(text, name, k, "unknown field")
    return sec


def parse_config(text: str) -> RunConfig:
    """Build a :class:`RunConfig` from configuration text."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"parse error: {exc}") from None
    top = {"alphas", "bounds", "out", "grid", "disk", "radiation", "ligo", "lisa",
           "montecarlo"}
    for k in data:
        if k not in top:
            raise _err(text, None, k, "unknown field")
    kw = {}
    if "alphas" in data:
        if not isinstance(data["alphas"], list):
            raise _err(text, None, "alphas", "expected a list")
        kw["alphas"] = tuple(_number(text, None, "alphas", a) for a in data["alphas"])
    if "bounds" in data:
        b = data["bounds"]
        if not isinstance(b, list) or any(x not in B.BOUND_KINDS for x in b) or not b:
            raise _err(text, None, "bounds",
                       f"expected a non-empty list drawn from {list(B.BOUND_KINDS)}")
        kw["bounds"] = tuple(b)
    if "out" in data:
        if not isinstance(data["out"], str):
            raise _err(text, None, "out", "expected a string")
        kw["out"] = data["out"]

    g = _section(text, data, "grid", _GRID_KEYS)
    gkw = {}
    for k, v in g.items():
        if k == "log":
            if not isinstance(v, bool):
                raise _err(text, "grid", k, "expected true or false")
            gkw[k] = v
        else:
            gkw[k] = _number(text, "grid", k, v, int if k == "n" else float)
    kw["grid"] = GridSpec(**gkw)

    try:
        d = _section(text, data, "disk", _DISK_KEYS)
        dkw = {_DISK_KEYS[k]: _number(text, "disk", k, v) for k, v in d.items()}
        if "m_a" in dkw:
            dkw["m_a"] *= CONSTANTS.m0
        kw["disk"] = B.DiskSpec(**dkw)
        r = _section(text, data, "radiation", _RADIATION_KEYS)
        kw["radiation"] = replace(B.GERMANIUM, **{
            _RADIATION_KEYS[k]: _number(text, "radiation", k, v) for k, v in r.items()})
        if "mass_kg" in r or "mu0" in r:
            if "size" not in r:
                kw["radiation"] = replace(kw["radiation"], D=None)
        for name, base in (("ligo", B.LIGO), ("lisa", B.LISA)):
            s = _section(text, data, name, _DETECTOR_KEYS)
            skw = {_DETECTOR_KEYS[k]: _number(text, name, k, v,
                                              int if k == "spectrum_divisor" else float)
                   for k, v in s.items()}
            if ("L" in skw or "R" in skw) and "A_P" not in skw:
                skw["A_P"] = None
            kw[name] = replace(base, **skw)
    except DomainError as exc:
        raise ConfigError(str(exc)) from None

    m = _section(text, data, "montecarlo", _MC_KEYS)
    mkw = {}
    for k, v in m.items():
        if k == "alphas":
            if not isinstance(v, list) or not v:
                raise _err(text, "montecarlo", k, "expected a non-empty list")
            mkw[k] = tuple(_number(text, "montecarlo", k, a) for a in v)
        else:
            kind = int if k in ("n_trajectories", "n_steps", "seed") else float
            mkw[k] = _number(text, "montecarlo", k, v, kind)
    kw["montecarlo"] = MonteCarloSpec(**mkw)
    return RunConfig(**kw)


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc.strerror or exc}") from None
    return parse_config(text)


# -- output helpers ----------------------------------------------------------------

def _fmt(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.16e" % x


def _alpha_tag(alpha):
    return repr(float(alpha))


def exclusion_csv(rep: B.ExclusionReport) -> str:
    buf = io.StringIO()
    buf.write(EXCLUSION_HEADER + "\n")
    amin, amax, exc = rep.allowed_min, rep.allowed_max, rep.excluded
    for i in range(rep.r_c.size):
        row = [_fmt(rep.r_c[i]), _fmt(rep.lower[i]), _fmt(rep.radiation[i]),
               _fmt(rep.ligo[i]), _fmt(rep.lisa[i]), _fmt(amin[i]), _fmt(amax[i]),
               "true" if exc[i] else "false", rep.flags[i]]
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


def curve_csv(curve: B.BoundCurve) -> str:
    buf = io.StringIO()
    buf.write(CURVE_HEADER + "\n")
    for i in range(curve.r_c.size):
        buf.write(",".join([
            _fmt(curve.r_c[i]), _fmt(curve.lam[i]), curve.regime[i],
            "valid" if curve.valid[i] else "out_of_validity",
            "reliable" if curve.reliable[i] else "unreliable"]) + "\n")
    return buf.getvalue()


def _write(path: Path, text: str):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from None


def _threads():
    raw = os.environ.get("COLLAPSE_BOUNDS_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"COLLAPSE_BOUNDS_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError("COLLAPSE_BOUNDS_THREADS must be >= 1")
    return n


# -- commands ---------------------------------------------------------------------

def cmd_exclusion(config: RunConfig, out_dir=None):
    """Write one exclusion CSV per alpha; returns the written paths."""
    out = out_dir or config.out
    if out is None:
        raise ConfigError("no output directory given (use --out or 'out' in the config)")
    out = Path(out)
    grid = config.grid.values()

    def run(alpha):
        return B.assemble_exclusion(alpha, grid, config.disk, config.radiation,
                                    config.ligo, config.lisa, config.bounds)

    with ThreadPoolExecutor(max_workers=min(_threads(), len(config.alphas))) as ex:
        reports = list(ex.map(run, config.alphas))
    paths = []
    for rep in reports:
        path = out / f"exclusion_alpha_{_alpha_tag(rep.alpha)}.csv"
        _write(path, exclusion_csv(rep))
        paths.append(path)
    return paths


def cmd_curve(kind, alpha, config: RunConfig = RunConfig()) -> B.BoundCurve:
    grid = config.grid.values()
    if kind == "lower":
        return B.lower_curve(config.disk, alpha, grid)
    if kind == "radiation":
        return B.radiation_curve(config.radiation, alpha, grid)
    if kind == "ligo":
        return B.gw_curve(config.ligo, alpha, grid)
    if kind == "lisa":
        return B.gw_curve(config.lisa, alpha, grid)
    raise ConfigError(f"unknown curve kind {kind!r}")


@dataclass(frozen=True)
class VerifyRow:
    alpha: float
    mass_over_m0: float
    slope: float
    slope_se: float
    analytic: float

    @property
    def z(self):
        return (self.slope - self.analytic) / self.slope_se

    @property
    def passed(self):
        return abs(self.z) <= 3.0


def cmd_verify(mc: MonteCarloSpec):
    """Run the Monte Carlo slope checks; returns ``(rows, ratio_check)``.

    ``ratio_check`` is ``(ratio, se, expected, passed)`` comparing the first two
    alphas, or None when fewer than two were run.
    """
    grid = NoiseGridConfig(mc.half_width, mc.spacing, mc.dt, mc.n_steps,
                           mc.n_trajectories, mc.seed)
    m = mc.mass_over_m0 * CONSTANTS.m0
    rows = []
    for a in mc.alphas:
        params = CollapseParams(a, mc.r_c, mc.lam)
        st = momentum_variance(params, m, grid)
        rows.append(VerifyRow(a, mc.mass_over_m0, st.slope, st.slope_se,
                              st.analytic_slope))
    ratio = None
    if len(rows) >= 2:
        r0, r1 = rows[0], rows[1]
        val = r0.slope / r1.slope
        se = val * math.hypot(r0.slope_se / r0.slope, r1.slope_se / r1.slope)
        expected = r0.analytic / r1.analytic
        ratio = (val, se, expected, abs(val - expected) <= 3 * se)
    return rows, ratio


def _verify_report(rows, ratio, mc):
    lines = [f"seed={mc.seed} n_trajectories={mc.n_trajectories} "
             f"spacing={mc.spacing} half_width={mc.half_width}"]
    for r in rows:
        lines.append(
            f"alpha={r.alpha:g} m/m0={r.mass_over_m0:g}: slope={r.slope:.6e} "
            f"+- {r.slope_se:.2e}, analytic={r.analytic:.6e}, z={r.z:+.2f} "
            f"{'PASS' if r.passed else 'FAIL'}")
    if ratio:
        val, se, exp, ok = ratio
        lines.append(f"slope ratio alpha={rows[0].alpha:g}/alpha={rows[1].alpha:g}: "
                     f"{val:.4f} +- {se:.4f}, expected {exp:.4f} "
                     f"{'PASS' if ok else 'FAIL'}")
    return "\n".join(lines)


def _verify_csv(rows):
    buf = io.StringIO()
    buf.write("alpha,mass_over_m0,slope,slope_se,analytic,z,passed\n")
    for r in rows:
        buf.write(",".join([_fmt(r.alpha), _fmt(r.mass_over_m0), _fmt(r.slope),
                            _fmt(r.slope_se), _fmt(r.analytic), _fmt(r.z),
                            "true" if r.passed else "false"]) + "\n")
    return buf.getvalue()


# -- entry point ---------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _build_parser():
    p = _Parser(prog="collapse-bounds",
                description="Bounds and exclusion regions for mass-density-power "
                            "collapse models.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("exclusion", help="write one exclusion CSV per alpha")
    e.add_argument("--config", help="configuration file (TOML, dotted keys)")
    e.add_argument("--out", help="output directory")

    c = sub.add_parser("curve", help="export a single bound curve as CSV")
    c.add_argument("--kind", required=True, choices=B.BOUND_KINDS)
    c.add_argument("--alpha", required=True, type=float)
    c.add_argument("--config")
    c.add_argument("--r-min", type=float)
    c.add_argument("--r-max", type=float)
    c.add_argument("--n", type=int)
    c.add_argument("--linear", action="store_true", help="linear instead of log grid")
    c.add_argument("--out", help="output file (default: stdout)")

    v = sub.add_parser("verify", help="Monte Carlo check of the momentum diffusion")
    v.add_argument("--seed", type=int)
    v.add_argument("--config")
    v.add_argument("--n-trajectories", type=int)
    v.add_argument("--out", help="also write the results as CSV")
    return p


def _show_warning(message, category, filename, lineno, file=None, line=None):
    print(f"warning: {message}", file=sys.stderr)


def _run(args):
    cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    if args.command == "exclusion":
        for path in cmd_exclusion(cfg, args.out):
            print(path)
        return EXIT_OK
    if args.command == "curve":
        gkw = {k: v for k, v in (("r_min", args.r_min), ("r_max", args.r_max),
                                 ("n", args.n)) if v is not None}
        if args.linear:
            gkw["log"] = False
        cfg = replace(cfg, grid=replace(cfg.grid, **gkw))
        text = curve_csv(cmd_curve(args.kind, args.alpha, cfg))
        if args.out:
            _write(Path(args.out), text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    mc = cfg.montecarlo
    if args.seed is not None:
        mc = replace(mc, seed=args.seed)
    if args.n_trajectories is not None:
        mc = replace(mc, n_trajectories=args.n_trajectories)
    rows, ratio = cmd_verify(mc)
    print(_verify_report(rows, ratio, mc))
    if args.out:
        _write(Path(args.out), _verify_csv(rows))
    ok = all(r.passed for r in rows) and (ratio is None or ratio[3])
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def main(argv=None) -> int:
    parser = _build_parser()
    old = warnings.showwarning
    warnings.showwarning = _show_warning
    try:
        args = parser.parse_args(argv)
        return _run(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (QuadratureError, ArithmeticError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    finally:
        warnings.showwarning = old


if __name__ == "__main__":
    sys.exit(main())
