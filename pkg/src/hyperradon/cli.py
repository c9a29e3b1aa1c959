"""Command-line front end: ``hyperradon {params,transform,verify,sweep}``.

Settings come from an optional INI-style config (``--config``) with
sections [space], [probe], [grid], [quadrature], [verify], [sweep] and
[output]; command-line flags override the file.  Exit codes: 0 success,
1 numerical failure or failed check, 2 usage / incompatible suite.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import os
import sys
import tempfile
import warnings
from dataclasses import asdict, dataclass, fields
from dataclasses import field as dc_field
from importlib import metadata

import numpy as np

from . import suites, transforms
from .params import (SpaceParams, build_D, discrete_series, format_poly, k0_eps, noncuspidal, rho_1,
                     rho_q)
from .quadrature import NoConvergence, QuadratureSpec
from .testfuncs import make_probe

DEFAULT_SWEEP = "R,0,2; R,0,4; R,1,1; R,0,5; C,0,2"


def version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# configuration

@dataclass
class RunConfig:
    field: str = "R"
    p: int = 0
    q: int = 2
    variant: str = "projective"
    probe: str = "gaussian"
    probe_params: dict = dc_field(default_factory=dict)
    s_min: float = -4.0
    s_max: float = 9.0
    h: float = 0.05
    quadrature: dict = dc_field(default_factory=dict)
    suite: str | None = None
    n_max: int = 3
    tail_plus: float | None = None
    tail_minus: float | None = None
    method: str = "auto"
    output: str | None = None
    header: bool = False
    spaces: str = DEFAULT_SWEEP

    def space(self) -> SpaceParams:
        try:
            return SpaceParams.make(self.field, self.p, self.q, self.variant)
        except ValueError as exc:
            raise UsageError(str(exc)) from None

    def spec(self) -> QuadratureSpec:
        try:
            return QuadratureSpec(**self.quadrature)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"bad quadrature settings: {exc}") from None

    def make_probe(self, sp: SpaceParams):
        kw = dict(self.probe_params)
        if self.probe == "odd":
            kw["sp"] = sp
        try:
            f = make_probe(self.probe, **kw)
            f.check_space(sp)
        except (TypeError, ValueError) as exc:
            raise UsageError(str(exc)) from None
        return f

    def resolved(self) -> dict:
        d = asdict(self)
        d["quadrature"] = asdict(self.spec())
        return d


def _number(text):
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


_QUAD_KEYS = {f.name for f in fields(QuadratureSpec)}
_SIMPLE = {
    "space": {"field": str, "p": int, "q": int, "variant": str},
    "grid": {"s_min": float, "s_max": float, "h": float},
    "verify": {"suite": str, "n_max": int, "tail_plus": float, "tail_minus": float, "method": str},
    "output": {"output": str, "header": lambda v: v.strip().lower() in ("1", "true", "yes", "on")},
    "sweep": {"spaces": str},
}


def load_config(path) -> RunConfig:
    parser = configparser.ConfigParser()
    parser.optionxform = str  # probe parameters such as R are case sensitive
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    cfg = RunConfig()
    for section in parser.sections():
        items = dict(parser.items(section))
        if section == "probe":
            if "name" in items:
                cfg.probe = items.pop("name")
            cfg.probe_params.update({k: _number(v) for k, v in items.items()})
        elif section == "quadrature":
            for k, v in items.items():
                if k not in _QUAD_KEYS:
                    raise UsageError(f"unknown quadrature key {k!r}")
                cfg.quadrature[k] = _number(v)
        elif section in _SIMPLE:
            for k, v in items.items():
                conv = _SIMPLE[section].get(k)
                if conv is None:
                    raise UsageError(f"unknown key {k!r} in [{section}]")
                try:
                    setattr(cfg, k, conv(v))
                except ValueError:
                    raise UsageError(f"bad value {v!r} for {k}") from None
        else:
            raise UsageError(f"unknown config section [{section}]")
    return cfg


def _add_common(p: argparse.ArgumentParser, grid=True):
    p.add_argument("--config", help="INI-style config file; flags override it")
    p.add_argument("--field", help="R, C or H")
    p.add_argument("--p", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--variant", help="projective or nonprojective")
    if grid:
        p.add_argument("--probe", help="gaussian, bump, angular, odd or zero")
        p.add_argument("--probe-param", action="append", default=[], metavar="KEY=VALUE")
        p.add_argument("--s-min", type=float)
        p.add_argument("--s-max", type=float)
        p.add_argument("--h", type=float)
        p.add_argument("--nodes", type=int, dest="nodes_per_dim")
        p.add_argument("--truncation", type=float, dest="truncation_radius")
        p.add_argument("--tol", type=float, dest="target_rel_tol")
        p.add_argument("--rounds", type=int, dest="doubling_rounds")
        p.add_argument("--sphere-nodes", type=int)
        p.add_argument("--method", choices=["auto", "direct", "reduced"])
        p.add_argument("-o", "--output")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hyperradon", description="Radon/Abel transforms on hyperbolic spaces")
    ap.add_argument("--version", action="version", version=version())
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("params", help="print rho-factors, k0, non-cuspidal parameters and L")
    _add_common(p, grid=False)
    p = sub.add_parser("transform", help="write s,Rf,Af,ADf,err as CSV")
    _add_common(p)
    p.add_argument("--header", action="store_true", default=None, help="gnuplot-style '#' header")
    p = sub.add_parser("verify", help="run a verification suite and write a JSON report")
    _add_common(p)
    p.add_argument("suite", nargs="?", choices=sorted(suites.SUITES))
    p.add_argument("--n-max", type=int)
    p.add_argument("--tail-plus", type=float)
    p.add_argument("--tail-minus", type=float)
    p = sub.add_parser("sweep", help="run suites over several spaces")
    _add_common(p)
    p.add_argument("--spaces", help="'F,p,q[,variant]; ...'")
    p.add_argument("--suites", default=None, help="comma-separated suite names (default: all that apply)")
    p.add_argument("--outdir", default=None)
    return ap


def resolve(args) -> RunConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    for key in ("field", "p", "q", "variant", "probe", "s_min", "s_max", "h", "method", "output",
                "suite", "n_max", "tail_plus", "tail_minus", "spaces", "header"):
        val = getattr(args, key, None)
        if val is not None:
            setattr(cfg, key, val)
    for key in ("nodes_per_dim", "truncation_radius", "target_rel_tol", "doubling_rounds", "sphere_nodes"):
        val = getattr(args, key, None)
        if val is not None:
            cfg.quadrature[key] = val
    for item in getattr(args, "probe_param", []) or []:
        if "=" not in item:
            raise UsageError(f"--probe-param expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        cfg.probe_params[k.strip()] = _number(v.strip())
    return cfg


# ---------------------------------------------------------------------------
# output helpers

def atomic_write(path, text: str):
    """Write text to path via a temporary file in the same directory and a rename."""
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        atomic_write(path, text)


def _fmt(x) -> str:
    # shortest round-trip decimal
    return "" if x is None or not np.isfinite(x) else repr(float(x))


def grid_csv(grid: transforms.TransformGrid, header=False) -> str:
    buf = io.StringIO()
    cols = ["s", "Rf", "Af", "ADf", "err"]
    if header:
        buf.write("# " + " ".join(cols) + "\n")
        sep = " "
    else:
        buf.write(",".join(cols) + "\n")
        sep = ","
    adf = grid.adf if grid.adf is not None else np.full(len(grid.s_values), np.nan)
    for row in zip(grid.s_values, grid.rf, grid.af, adf, grid.point_err):
        cells = [_fmt(v) for v in row]
        if header:
            # gnuplot reads "NaN" as missing data
            cells = [c if c else "NaN" for c in cells]
        buf.write(sep.join(cells) + "\n")
    return buf.getvalue()


def _report(cfg: RunConfig, suite: str, checks, extra=None) -> dict:
    rep = {"config": cfg.resolved(), "suite": suite, "checks": [c.as_dict() for c in checks],
           "version": version()}
    if extra:
        rep.update(extra)
    return rep


# ---------------------------------------------------------------------------
# commands

def cmd_params(cfg: RunConfig) -> int:
    sp = cfg.space()
    lines = [f"space   {sp.label()}",
             f"d       {sp.d}",
             f"rho_q   {rho_q(sp)}",
             f"rho_1   {rho_1(sp)}"]
    if sp.p >= sp.q:
        lines.append("no expansion regime (p ≥ q); support theorem applies")
    else:
        k0, eps = k0_eps(sp)
        lines += [f"k0      {k0}", f"eps     {eps}"]
        lam = noncuspidal(sp)
        lines.append("lambda  {" + ", ".join(str(x) for x in lam) + "}")
        if sp.codim > 1:
            lines.append(f"L(xi)   {format_poly(build_D(sp).image_poly)}")
        else:
            lines.append("L(xi)   none (d(q-p) = 1: A f is already rapidly decreasing)")
        ds = discrete_series(sp, lambda_max=10)
        lines.append("series  " + ", ".join(
            f"{x.lam}{'' if x.cuspidal else '*'}" for x in ds) + "   (* non-cuspidal, lambda <= 10)")
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


def cmd_transform(cfg: RunConfig) -> int:
    sp = cfg.space()
    f = cfg.make_probe(sp)
    spec = cfg.spec()
    s = transforms.s_grid(cfg.s_min, cfg.s_max, cfg.h)
    try:
        grid = transforms.compute_grid(f, sp, s, spec, method=cfg.method)
    except NoConvergence as exc:
        sys.stderr.write(f"hyperradon: no convergence at s = {getattr(exc, 's', float('nan'))!r}: {exc}\n")
        return 1
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if sp.codim > 1 and sp.p < sp.q:
        transforms.apply_L(grid, build_D(sp))
    _emit(grid_csv(grid, cfg.header), cfg.output)
    return 0


def _suite_input(cfg: RunConfig, sp: SpaceParams):
    return suites.SuiteInput(sp, cfg.make_probe(sp), cfg.spec(), cfg.s_min, cfg.s_max, cfg.h,
                             cfg.n_max, cfg.tail_plus, cfg.tail_minus)


def run_suite(cfg: RunConfig, name: str, sp: SpaceParams):
    if name not in suites.SUITES:
        raise UsageError(f"unknown suite {name!r}")
    return suites.SUITES[name](_suite_input(cfg, sp))


def cmd_verify(cfg: RunConfig) -> int:
    if not cfg.suite:
        raise UsageError("verify needs a suite name")
    sp = cfg.space()
    try:
        checks = run_suite(cfg, cfg.suite, sp)
    except suites.IncompatibleSuite as exc:
        sys.stderr.write(f"hyperradon: suite {cfg.suite} does not apply to {sp.label()}: {exc}\n")
        return 2
    except NoConvergence as exc:
        rep = _report(cfg, cfg.suite, [], {"error": str(exc)})
        _emit(json.dumps(rep, indent=2) + "\n", cfg.output)
        return 1
    rep = _report(cfg, cfg.suite, checks)
    _emit(json.dumps(rep, indent=2) + "\n", cfg.output)
    for c in checks:
        sys.stderr.write(f"{'PASS' if c.passed else 'FAIL'}  {c.name}: {c.measured:.3e} vs {c.threshold:.3e}\n")
    return 0 if all(c.passed for c in checks) else 1


def parse_spaces(text: str):
    """'R,0,2; C,0,4,projective' -> list of SpaceParams with duplicates removed."""
    out, seen = [], set()
    for chunk in text.replace("\n", ";").split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = [x.strip() for x in chunk.split(",")]
        if len(parts) not in (3, 4):
            raise UsageError(f"bad space {chunk!r}; expected F,p,q[,variant]")
        try:
            sp = SpaceParams.make(*parts)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if sp in seen:
            warnings.warn(f"duplicate space {sp.label()} ignored")
            continue
        seen.add(sp)
        out.append(sp)
    return out


def cmd_sweep(cfg: RunConfig, suite_names=None, outdir=None) -> int:
    spaces = parse_spaces(cfg.spaces)
    names = suite_names or sorted(suites.SUITES)
    for n in names:
        if n not in suites.SUITES:
            raise UsageError(f"unknown suite {n!r}")
    rows = []
    failed = False
    for sp in spaces:
        results = {}
        for name in names:
            try:
                checks = run_suite(cfg, name, sp)
            except (suites.IncompatibleSuite, UsageError):
                results[name] = "n/a"
                continue
            except NoConvergence as exc:
                results[name] = "error"
                failed = True
                checks = []
                rep = _report(cfg, name, checks, {"error": str(exc), "space": sp.label()})
            else:
                ok = all(c.passed for c in checks)
                results[name] = "pass" if ok else "fail"
                failed |= not ok
                rep = _report(cfg, name, checks, {"space": sp.label()})
            if outdir:
                tag = sp.label().strip("()").replace(",", "_")
                atomic_write(os.path.join(outdir, f"{tag}_{name}.json"), json.dumps(rep, indent=2) + "\n")
        rows.append((sp.label(), results))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["space"] + names)
    for label, res in rows:
        w.writerow([label] + [res[n] for n in names])
    text = buf.getvalue()
    if outdir:
        atomic_write(os.path.join(outdir, "summary.csv"), text)
    else:
        _emit(text, cfg.output)
    return 1 if failed else 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        if args.command == "params":
            return cmd_params(cfg)
        if args.command == "transform":
            return cmd_transform(cfg)
        if args.command == "verify":
            return cmd_verify(cfg)
        if args.command == "sweep":
            names = [x.strip() for x in args.suites.split(",")] if args.suites else None
            return cmd_sweep(cfg, names, args.outdir)
    except UsageError as exc:
        sys.stderr.write(f"hyperradon: {exc}\n")
        return 2
    parser.error("unknown command")
    return 2


if __name__ == "__main__":
    sys.exit(main())
