"""Command-line interface: method inspection, radius tables, coefficient
optimization, and the 1D experiment harness.

Experiments write CSV artifacts with a header row and a trailing comment
block of ``# key=value`` metadata; files are written atomically (temp file
plus rename) so partial runs never leave truncated output.  The
``SSPINT_THREADS`` environment variable sets the worker-pool size for
independent (method, a, lambda) jobs.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Sequence

import numpy as np

from . import analysis, methods, spatial
from .errors import ConfigError, NonFinite, NotFound, SspError, UnknownMethod
from .integrators import integrate
from .optimizer import OptimizationSpec, optimize, verify_certificate
from .ssp_radius import observed_l2_cfl, ssp_radius
from .tableau import order_residuals

try:
    from importlib.metadata import version as _pkg_version

    VERSION = _pkg_version("sspint")
except Exception:  # pragma: no cover - not installed
    VERSION = "0.0.0"

EXPERIMENTS = ("ex1", "ex3", "ex4", "table6", "table7", "table8-partial", "fig1")

#: config keys accepted by each experiment (all values are strings).
_EXPERIMENT_KEYS = {
    "ex1": {"methods", "splittings", "dts", "out"},
    "ex3": {"methods", "a", "n", "steps", "threshold", "out"},
    "table6": {"methods", "a", "n", "steps", "threshold", "out"},
    "table7": {"a", "n", "steps", "threshold", "out"},
    "table8-partial": {"n", "steps", "with_opt", "out"},
    "ex4": {"methods", "a", "n", "steps", "lambdas", "out"},
    "fig1": {"a", "n", "steps", "lambdas", "out"},
}

_TABLE6_METHODS = (
    "eSSPRK+(2,2)",
    "eSSPRK+(9,2)",
    "eSSPRK+(3,3)",
    "eSSPRK+(4,3)",
    "eSSPRK+(9,3)",
    "eSSPRK+(5,4)",
    "eSSPRK+(6,4)",
)

_PROBLEMS = {
    "advection-step": spatial.LINEAR_ADVECTION_STEP,
    "burgers-step": spatial.ADVECTION_BURGERS_STEP,
    "burgers-smooth": spatial.ADVECTION_BURGERS_SMOOTH,
}


# --- small utilities -------------------------------------------------------


def thread_count() -> int:
    raw = os.environ.get("SSPINT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"SSPINT_THREADS must be an integer, got {raw!r}")


def _pmap(fn, jobs: Sequence):
    """Map preserving input order, optionally over a thread pool."""
    workers = thread_count()
    if workers == 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, jobs))


def atomic_write_text(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    text = str(x)
    if "," in text:  # method names like eSSPRK+(5,4)
        return f'"{text}"'
    return text


def write_csv(path: str, header: Sequence[str], rows: Sequence[Sequence], meta: Dict):
    lines = [",".join(header)]
    lines += [",".join(_fmt(x) for x in row) for row in rows]
    lines += [f"# {k}={v}" for k, v in sorted(meta.items())]
    atomic_write_text(path, "\n".join(lines) + "\n")


def config_hash(cfg: Dict[str, str]) -> str:
    blob = "\n".join(f"{k}={cfg[k]}" for k in sorted(cfg))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def parse_config_file(path: str) -> Dict[str, str]:
    """Flat ``key=value`` file; blank lines and '#' comments ignored."""
    cfg: Dict[str, str] = {}
    try:
        with open(path) as fh:
            for ln, line in enumerate(fh, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{ln}: expected key=value, got {line!r}")
                key, _, value = line.partition("=")
                cfg[key.strip()] = value.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}")
    return cfg


def _merged_config(args, experiment: str) -> Dict[str, str]:
    cfg: Dict[str, str] = {}
    if args.config:
        cfg.update(parse_config_file(args.config))
    for key in ("methods", "a", "n", "steps", "threshold", "lambdas",
                "splittings", "dts", "with_opt", "out"):
        val = getattr(args, key.replace("-", "_"), None)
        if val is not None:
            cfg[key] = str(val)
    allowed = _EXPERIMENT_KEYS[experiment]
    unknown = sorted(set(cfg) - allowed)
    if unknown:
        raise ConfigError(
            f"unknown config keys for {experiment}: {', '.join(unknown)} "
            f"(allowed: {', '.join(sorted(allowed))})"
        )
    return cfg


def split_method_names(text: str) -> List[str]:
    """Split a comma-separated method list, ignoring commas inside the
    parentheses of names like ``eSSPRK+(5,4)``."""
    names, cur, depth = [], [], 0
    for ch in text:
        if ch == "," and depth == 0:
            names.append("".join(cur).strip())
            cur = []
            continue
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        cur.append(ch)
    names.append("".join(cur).strip())
    return [n for n in names if n]


def _floats(csv: str) -> List[float]:
    try:
        return [float(x) for x in csv.split(",") if x.strip() != ""]
    except ValueError:
        raise ConfigError(f"expected comma-separated numbers, got {csv!r}")


def parse_lambda_grid(text: str) -> List[float]:
    """Either ``lo:hi:count`` or an explicit comma-separated list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"lambda grid must be lo:hi:count, got {text!r}")
        try:
            lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise ConfigError(f"bad lambda grid {text!r}")
        if count < 1 or hi < lo:
            raise ConfigError(f"bad lambda grid {text!r}")
        return list(np.linspace(lo, hi, count))
    return _floats(text)


def _safe_name(name: str) -> str:
    return (
        name.replace("+", "p")
        .replace("(", "_")
        .replace(")", "")
        .replace(",", "_")
    )


def _meta(cfg: Dict[str, str], **extra) -> Dict:
    meta = {"config_hash": config_hash(cfg), "version": VERSION}
    meta.update(extra)
    return meta


# --- experiments -----------------------------------------------------------


def _tvd_lambda_hi(claimed_C: float) -> float:
    # sweep well past the predicted coefficient; some methods' observed
    # value exceeds C (stage step-size effects), so leave generous room
    return 1.5 * claimed_C + 0.75


def run_table6(cfg: Dict[str, str], outdir: str) -> List[str]:
    names = split_method_names(cfg.get("methods", ",".join(_TABLE6_METHODS)))
    a_vals = _floats(cfg.get("a", "0,1,10,20"))
    n = int(cfg.get("n", "1000"))
    steps = int(cfg.get("steps", "10"))
    threshold = float(cfg.get("threshold", str(analysis.DEFAULT_THRESHOLD)))

    jobs = [(name.strip(), a) for name in names for a in a_vals]

    def job(item):
        name, a = item
        rec = methods.get(name)
        sys_, u0 = spatial.make_problem(spatial.LINEAR_ADVECTION_STEP, a=a, n=n)
        obs = analysis.observed_tvd_lambda(
            analysis.ifrk_builder(rec), sys_, u0,
            _tvd_lambda_hi(rec.claimed_C), steps, threshold=threshold,
        )
        return (name, a, obs.lambda_obs)

    rows = _pmap(job, jobs)
    path = os.path.join(outdir, "table6.csv")
    write_csv(path, ("method", "a", "lambda_obs"), rows,
              _meta(cfg, experiment="table6", threshold=threshold))
    return [path]


def run_table7(cfg: Dict[str, str], outdir: str) -> List[str]:
    a_vals = _floats(cfg.get("a", "0,1,2,10,20"))
    n = int(cfg.get("n", "1000"))
    steps = int(cfg.get("steps", "10"))
    threshold = float(cfg.get("threshold", str(analysis.DEFAULT_THRESHOLD)))
    rec = methods.get("eSSPRK(4,3)")

    def job(a):
        sys_, u0 = spatial.make_problem(spatial.LINEAR_ADVECTION_STEP, a=a, n=n)
        obs = analysis.observed_tvd_lambda(
            analysis.rk_builder(rec), sys_, u0, 2.5, steps, threshold=threshold
        )
        return (rec.name, a, obs.lambda_obs)

    rows = _pmap(job, a_vals)
    path = os.path.join(outdir, "table7.csv")
    write_csv(path, ("method", "a", "lambda_obs"), rows,
              _meta(cfg, experiment="table7", threshold=threshold))
    return [path]


def run_table8(cfg: Dict[str, str], outdir: str) -> List[str]:
    n = int(cfg.get("n", "1000"))
    steps = int(cfg.get("steps", "500"))
    with_opt = cfg.get("with_opt", "false").lower() in ("1", "true", "yes")
    grid = spatial.Grid1D(n)
    M = spatial.upwind_matrix(grid, 11.0) * grid.dx  # unit-grid-spacing scaling

    rows = []
    t33 = methods.get("eSSPRK(3,3)").tableau
    rows.append(("l2_cfl", "eSSPRK(3,3)", observed_l2_cfl(t33, M, 0.2, steps)))

    if with_opt:
        rec = optimize(OptimizationSpec(stages=5, order=3))
        rows.append(("opt_radius", rec.name, rec.claimed_C))
        rows.append(("l2_cfl", rec.name, observed_l2_cfl(rec.tableau, M, 0.4, steps)))

    # long-step stability probe of the integrating-factor methods
    def job(name):
        rec = methods.get(name)
        sys_, u0 = spatial.make_problem(spatial.LINEAR_ADVECTION_STEP, a=10.0, n=n)
        build = analysis.ifrk_builder(rec)
        try:
            u = integrate(build(sys_, 27.0 * sys_.dx), u0, 10)
            return ("ifrk_norm_at_lambda27", name, float(np.linalg.norm(u)))
        except NonFinite:
            return ("ifrk_norm_at_lambda27", name, float("inf"))

    rows += _pmap(job, list(_TABLE6_METHODS))
    path = os.path.join(outdir, "table8_partial.csv")
    write_csv(path, ("quantity", "method", "value"), rows,
              _meta(cfg, experiment="table8-partial"))
    return [path]


def run_sweep_experiment(cfg: Dict[str, str], outdir: str, experiment: str) -> List[str]:
    a = _floats(cfg.get("a", "10"))[0]
    n = int(cfg.get("n", "400"))
    steps = int(cfg.get("steps", "25"))
    if experiment == "fig1":
        lambdas = parse_lambda_grid(cfg.get("lambdas", "0.05:1.2:24"))
        builders = [
            ("decreasing-abscissa-IF", analysis.ifrk_general_builder(
                methods.get("eSSPRK(3,3)"))),
            ("eSSPRK+(3,3)", analysis.ifrk_builder(methods.get("eSSPRK+(3,3)"))),
        ]
    else:
        lambdas = parse_lambda_grid(cfg.get("lambdas", "0.05:2.0:40"))
        names = split_method_names(
            cfg.get("methods", "eSSPRK+(5,4),eSSPRK+(6,4),eSSPRK(10,4)")
        )
        builders = []
        for name in names:
            rec = methods.get(name)
            if rec.nondecreasing:
                builders.append((name, analysis.ifrk_builder(rec)))
            else:
                builders.append((name, analysis.rk_builder(rec)))

    sys_, u0 = spatial.make_problem(spatial.ADVECTION_BURGERS_STEP, a=a, n=n)
    paths = []
    for label, build in builders:
        recs = _pmap(
            lambda lam: analysis.lambda_sweep(build, sys_, u0, [lam], steps)[0],
            lambdas,
        )
        path = os.path.join(outdir, f"{experiment}_{_safe_name(label)}.csv")
        write_csv(
            path,
            ("lambda", "max_rise", "log10_rise"),
            [(r.lam, r.max_rise, r.log10_rise) for r in recs],
            _meta(cfg, experiment=experiment, method=label, a=a, n=n, steps=steps),
        )
        paths.append(path)
    return paths


def van_der_pol_reference(dt: float = 1e-5, T: float = 0.5) -> np.ndarray:
    """High-resolution plain Runge-Kutta reference solution at time T."""
    from .integrators import rk_step

    rec = methods.get("eSSPRK(10,4)")
    u = np.array([2.0, 0.0])
    for _ in range(round(T / dt)):
        u = rk_step(rec, spatial.van_der_pol_full, u, dt)
    return u


def van_der_pol_errors(rec, splitting: str, dts, uref, T: float = 0.5):
    """(dt, max-norm error) pairs; dt is adjusted so an integer number of
    steps lands exactly on T."""
    sys_, u0 = spatial.make_problem(spatial.VAN_DER_POL, splitting=splitting)
    build = analysis.ifrk_general_builder(rec)
    out = []
    for dt in dts:
        n = round(T / dt)
        dta = T / n
        u = integrate(build(sys_, dta), u0, n)
        out.append((dta, float(np.abs(u - uref).max())))
    return out


def run_ex1(cfg: Dict[str, str], outdir: str) -> List[str]:
    names = split_method_names(cfg.get("methods", ",".join(methods.method_names())))
    splittings = [s.strip() for s in cfg.get("splittings", "a,b").split(",")]
    dts = _floats(cfg.get("dts", "0.02,0.04,0.06,0.08,0.10"))
    uref = van_der_pol_reference()

    err_rows, slope_rows = [], []
    for name in names:
        rec = methods.get(name.strip())
        for split in splittings:
            errs = van_der_pol_errors(rec, split, dts, uref)
            for dt, err in errs:
                err_rows.append((rec.name, split, dt, err))
            slope_rows.append(
                (rec.name, split, rec.order, analysis.convergence_slope(errs))
            )

    p_err = os.path.join(outdir, "ex1_errors.csv")
    p_slope = os.path.join(outdir, "ex1_slopes.csv")
    write_csv(p_err, ("method", "splitting", "dt", "error"), err_rows,
              _meta(cfg, experiment="ex1"))
    write_csv(p_slope, ("method", "splitting", "order", "slope"), slope_rows,
              _meta(cfg, experiment="ex1"))
    return [p_err, p_slope]


_RUNNERS = {
    "ex1": run_ex1,
    "ex3": run_table6,
    "table6": run_table6,
    "table7": run_table7,
    "table8-partial": run_table8,
    "ex4": lambda cfg, outdir: run_sweep_experiment(cfg, outdir, "ex4"),
    "fig1": lambda cfg, outdir: run_sweep_experiment(cfg, outdir, "fig1"),
}


# --- subcommand handlers ---------------------------------------------------


def cmd_methods(args) -> int:
    if args.action == "list":
        print(f"{'name':<16} {'s':>2} {'p':>2} {'C':>8} {'C_eff':>7}  family")
        for rec in methods.list_methods():
            print(
                f"{rec.name:<16} {rec.stages:>2} {rec.order:>2} "
                f"{rec.claimed_C:>8.4f} {rec.claimed_C / rec.stages:>7.4f}  "
                f"{rec.family}"
            )
        return 0
    if args.name is None:
        raise ConfigError(f"methods {args.action} requires a method name")
    if args.action == "verify":
        rec = methods.get(args.name)
        rr = ssp_radius(rec.tableau)
        rep = order_residuals(rec.tableau)
        print(f"name:          {rec.name}")
        print(f"stages:        {rec.stages}")
        print(f"order:         {rec.order} (achieved {rep.achieved_order})")
        print(f"C (computed):  {rr.radius:.6f} (claimed {rec.claimed_C:.6f})")
        print(f"C_eff:         {rr.radius / rec.stages:.6f}")
        print(f"nondecreasing: {rec.nondecreasing}")
        print("order-condition residuals:")
        for tag, val in rep.residuals.items():
            print(f"  {tag:<6} {val: .3e}")
        ok = (
            rr.radius >= rec.claimed_C - 1e-4
            and rep.achieved_order >= rec.order
            and (rec.family != methods.FAMILY_PLUS or rec.nondecreasing)
        )
        print("status:        " + ("ok" if ok else "INVARIANT VIOLATED"))
        return 0 if ok else 1
    if args.action == "export":
        if not args.out:
            raise ConfigError("methods export requires --out")
        rec = methods.get(args.name)
        data = rec.tableau.to_json_dict()
        data["claimed_C"] = rec.claimed_C
        data["family"] = rec.family
        atomic_write_text(args.out, json.dumps(data, indent=2) + "\n")
        print(f"wrote {args.out}")
        return 0
    raise ConfigError(f"unknown methods action {args.action!r}")


def cmd_radius(args) -> int:
    names = (
        split_method_names(args.methods) if args.methods else methods.method_names()
    )
    rows = []
    for name in names:
        rec = methods.get(name.strip())
        r = ssp_radius(rec.tableau).radius
        rows.append((rec.name, r, r / rec.stages))
    if args.out:
        write_csv(args.out, ("name", "C", "C_eff"), rows,
                  {"version": VERSION})
        print(f"wrote {args.out}")
    else:
        print(f"{'name':<16} {'C':>10} {'C_eff':>10}")
        for name, r, reff in rows:
            print(f"{name:<16} {r:>10.4f} {reff:>10.4f}")
    return 0


def cmd_optimize(args) -> int:
    spec = OptimizationSpec(
        stages=args.stages,
        order=args.order,
        require_nondecreasing=args.nondecreasing,
        restarts=args.restarts,
        seed=args.seed,
    )
    rec = optimize(spec)
    report = verify_certificate(rec)
    print(f"{rec.name}: C = {rec.claimed_C:.6f}")
    for name, ok, detail in report.checks:
        print(f"  {name}: {'ok' if ok else 'FAILED'} ({detail})")
    if args.out:
        data = rec.tableau.to_json_dict()
        data["claimed_C"] = rec.claimed_C
        data["family"] = rec.family
        data["seed"] = spec.seed
        data["restarts"] = spec.restarts
        atomic_write_text(args.out, json.dumps(data, indent=2) + "\n")
        print(f"wrote {args.out}")
    return 0 if report.ok else 1


def cmd_sweep(args) -> int:
    rec = methods.get(args.method)
    if args.problem not in _PROBLEMS:
        raise ConfigError(
            f"unknown problem {args.problem!r}; choose from "
            + ", ".join(sorted(_PROBLEMS))
        )
    sys_, u0 = spatial.make_problem(_PROBLEMS[args.problem], a=args.a, n=args.n)
    if args.stepper == "rk":
        build = analysis.rk_builder(rec)
    elif args.stepper == "ifrk-general":
        build = analysis.ifrk_general_builder(rec)
    else:
        build = analysis.ifrk_builder(rec)
    lambdas = parse_lambda_grid(args.lambdas)
    recs = _pmap(
        lambda lam: analysis.lambda_sweep(build, sys_, u0, [lam], args.steps)[0],
        lambdas,
    )
    meta = {
        "version": VERSION,
        "method": rec.name,
        "problem": args.problem,
        "a": args.a,
        "n": args.n,
        "steps": args.steps,
        "stepper": args.stepper,
    }
    write_csv(
        args.out,
        ("lambda", "max_rise", "log10_rise"),
        [(r.lam, r.max_rise, r.log10_rise) for r in recs],
        meta,
    )
    print(f"wrote {args.out}")
    return 0


def cmd_run(args) -> int:
    cfg = _merged_config(args, args.experiment)
    outdir = cfg.pop("out", args.out or ".")
    paths = _RUNNERS[args.experiment](cfg, outdir)
    for p in paths:
        print(f"wrote {p}")
    return 0


# --- parser ----------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """Usage errors surface as ConfigError so they exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="sspint",
        description="SSP Runge-Kutta and integrating-factor time-integration "
        "toolkit (SSPINT_THREADS controls the worker-pool size).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("methods", help="inspect the built-in method registry")
    p.add_argument("action", choices=("list", "verify", "export"))
    p.add_argument("name", nargs="?", help="method name for verify/export")
    p.add_argument("--out", help="output path for export")
    p.set_defaults(func=cmd_methods)

    p = sub.add_parser("radius", help="SSP coefficients (table or CSV)")
    p.add_argument("--methods", help="comma-separated method names (default: all)")
    p.add_argument("--out", help="write CSV instead of printing")
    p.set_defaults(func=cmd_radius)

    p = sub.add_parser("optimize", help="search for optimal SSP coefficients")
    p.add_argument("--stages", type=int, required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--nondecreasing", action="store_true")
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the certified tableau as JSON")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser(
        "sweep",
        help="TV-rise sweep; CSV columns: lambda,max_rise,log10_rise",
    )
    p.add_argument("--method", required=True)
    p.add_argument("--problem", default="burgers-step",
                   help="advection-step | burgers-step | burgers-smooth")
    p.add_argument("--a", type=float, default=10.0)
    p.add_argument("--n", type=int, default=400)
    p.add_argument("--steps", type=int, default=25)
    p.add_argument("--lambdas", default="0.05:2.0:40",
                   help="lo:hi:count or comma-separated list")
    p.add_argument("--stepper", choices=("ifrk", "rk", "ifrk-general"),
                   default="ifrk")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser(
        "run",
        help="run a named experiment: " + " | ".join(EXPERIMENTS) + ". "
        "ex1: van der Pol convergence (CSV: method,splitting,dt,error and "
        "fitted slopes). ex3/table6: observed TVD coefficients on the linear "
        "advection step (CSV: method,a,lambda_obs). table7: plain-RK "
        "wavespeed degradation (same columns). table8-partial: L2 CFL probes "
        "(CSV: quantity,method,value). ex4/fig1: TV-rise sweeps on "
        "advection-Burgers (CSV: lambda,max_rise,log10_rise).",
    )
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--out", help="output directory (default: .)")
    p.add_argument("--methods", help="comma-separated method names")
    p.add_argument("--a", help="comma-separated wavespeed values")
    p.add_argument("--n", type=int, help="grid size")
    p.add_argument("--steps", type=int, help="number of time steps")
    p.add_argument("--threshold", type=float, help="TV-rise detection threshold")
    p.add_argument("--lambdas", help="lambda grid: lo:hi:count or list")
    p.add_argument("--splittings", help="ex1 splittings, e.g. a,b")
    p.add_argument("--dts", help="ex1 step sizes, comma-separated")
    p.add_argument("--with-opt", dest="with_opt", help="table8: true/false")
    p.set_defaults(func=cmd_run)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except NonFinite as exc:
        print(f"error: non-finite state: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, UnknownMethod, NotFound) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SspError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
