"""Command-line entry point.

Subcommands ``weights``, ``solve``, ``analytic``, ``stability`` and
``table`` each write CSV output with a JSON sidecar holding the flat run
configuration; ``replay SIDECAR`` re-runs a configuration and rewrites the
same files byte for byte.

Exit status: 0 on success, 2 for invalid arguments or parameters, 1 when
the computation itself fails.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from rfaded import __version__
from rfaded.errors import ConvergenceError, DomainError, SingularMatrixError, SolverError
from rfaded.io import read_sidecar, write_csv, write_sidecar

__all__ = ["RunConfig", "build_parser", "config_from_args", "validate", "execute", "main", "run"]

SUBCOMMANDS = ("weights", "solve", "analytic", "stability", "table")
MATRICES = ("A", "B", "D", "lhs", "rhs")


class UsageError(Exception):
    """Bad arguments; reported with exit status 2."""


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one invocation (flat, JSON friendly)."""

    subcommand: str
    out: Optional[str] = None
    out_dir: Optional[str] = None
    # weights
    kind: Optional[str] = None
    order: Optional[float] = None
    count: Optional[int] = None
    # problem
    example: Optional[str] = None
    gamma: Optional[float] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None
    K_alpha: float = 1.0
    K_beta: float = 1.0
    tau: float = 1.0
    L: float = 1.0
    T: float = 1.0
    M: Optional[int] = None
    N: Optional[int] = None
    grids: Optional[Tuple[int, ...]] = None
    t0_offset: Optional[float] = 1e-3
    dump_matrix: Optional[str] = None
    dump_matrix_path: Optional[str] = None
    workers: Optional[int] = None
    # analytic
    x: Optional[Tuple[float, ...]] = None
    t: Optional[Tuple[float, ...]] = None
    n_max: int = 50
    k_max: int = 60
    convention: str = "linear"
    # stability
    alphas: Optional[Tuple[float, ...]] = None
    locus_n: int = 500
    n_theta: int = 4096

    def to_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in dataclasses.asdict(self).items()}

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names - {"version"}
        if unknown:
            raise UsageError(f"unknown sidecar keys: {', '.join(sorted(unknown))}")
        kw = {k: tuple(v) if isinstance(v, list) else v for k, v in data.items() if k in names}
        return cls(**kw)


# ----------------------------------------------------------------- parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _csv_list(conv):
    def parse(text):
        try:
            return tuple(conv(s) for s in text.split(",") if s.strip())
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected a comma-separated list, got {text!r}") from None

    return parse


def _problem_args(p, need_grid=True):
    p.add_argument("--example", choices=("1", "2", "sine"), required=True)
    p.add_argument("--gamma", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--K-alpha", dest="K_alpha", type=float, default=1.0)
    p.add_argument("--K-beta", dest="K_beta", type=float, default=1.0)
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--L", dest="L", type=float, default=1.0)
    p.add_argument("--T", dest="T", type=float, default=1.0)


def _t0_args(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--t0-offset", type=float, default=1e-3, help="fraction of kappa added to t_0 in the first step")
    g.add_argument("--no-t0-offset", dest="t0_offset", action="store_const", const=None)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="rfaded", description="Delayed Riesz space-fractional solver")
    ap.add_argument("--version", action="version", version=f"rfaded {__version__}")
    sub = ap.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("weights", help="emit a weight sequence as k,value")
    p.add_argument("--kind", choices=("grunwald", "fbdf2", "wsgd", "start"), required=True)
    p.add_argument("--order", type=float, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--out", default="weights.csv")

    p = sub.add_parser("solve", help="march one problem and emit t,x,value")
    _problem_args(p)
    p.add_argument("--M", dest="M", type=int, required=True)
    p.add_argument("--N", dest="N", type=int)
    _t0_args(p)
    p.add_argument("--dump-matrix", nargs=2, metavar=("NAME", "PATH"), help=f"NAME in {', '.join(MATRICES)}")
    p.add_argument("--out", default="solution.csv")

    p = sub.add_parser("analytic", help="evaluate the series solution as x,t,value")
    _problem_args(p)
    p.add_argument("--x", type=_csv_list(float), default=(0.25, 0.5, 0.75))
    p.add_argument("--t", type=_csv_list(float), default=(0.25, 0.5))
    p.add_argument("--n-max", dest="n_max", type=int, default=50)
    p.add_argument("--k-max", dest="k_max", type=int, default=60)
    p.add_argument("--convention", choices=("linear", "squared"), default="linear")
    p.add_argument("--out", default="analytic.csv")

    p = sub.add_parser("stability", help="emit boundary loci as theta,re,im")
    p.add_argument("--alpha", dest="alphas", type=float, action="append", required=True)
    p.add_argument("--n", dest="locus_n", type=int, default=500)
    p.add_argument("--n-theta", dest="n_theta", type=int, default=4096)
    p.add_argument("--out-dir", default="stability")

    p = sub.add_parser("table", help="error/order table as h,error,order")
    _problem_args(p)
    p.add_argument("--grids", type=_csv_list(int), default=(16, 32, 64, 128))
    p.add_argument("--workers", type=int)
    _t0_args(p)
    p.add_argument("--out", default="table.csv")

    p = sub.add_parser("replay", help="re-run the configuration stored in a sidecar")
    p.add_argument("sidecar")
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    d = {k: v for k, v in vars(ns).items() if v is not None or k == "t0_offset"}
    dump = d.pop("dump_matrix", None)
    if dump is not None:
        d["dump_matrix"], d["dump_matrix_path"] = dump
    names = {f.name for f in dataclasses.fields(RunConfig)}
    return RunConfig(**{k: v for k, v in d.items() if k in names})


# -------------------------------------------------------------- validation


def _need(cfg, *names):
    missing = [n for n in names if getattr(cfg, n) is None]
    if missing:
        raise UsageError(f"{cfg.subcommand}: missing --{', --'.join(missing)}")


def _spec(cfg: RunConfig):
    from rfaded.experiments import example_problem, sine_test_spec

    if cfg.example == "sine":
        if cfg.L != 1.0:
            raise DomainError("the sine problem lives on L = 1")
        return sine_test_spec(
            0.5 if cfg.gamma is None else cfg.gamma,
            0.5 if cfg.alpha is None else cfg.alpha,
            1.5 if cfg.beta is None else cfg.beta,
            cfg.K_alpha,
            cfg.K_beta,
            cfg.tau,
            cfg.T,
        )
    _need(cfg, "gamma", "alpha", "beta")
    if (cfg.tau, cfg.L, cfg.T) != (1.0, 1.0, 1.0):
        raise DomainError(f"example {cfg.example} is posed with tau = L = T = 1")
    return example_problem(int(cfg.example)).spec(cfg.gamma, cfg.alpha, cfg.beta, cfg.K_alpha, cfg.K_beta)


# (low, high, high included) for the order of each weight family
_ORDER_RANGE = {"grunwald": (0.0, 2.0, True), "fbdf2": (0.0, 1.0, True), "wsgd": (1.0, 2.0, True), "start": (0.0, 1.0, True)}


def validate(cfg: RunConfig):
    """Check every range before any heavy work; returns prepared objects."""
    if cfg.subcommand not in SUBCOMMANDS:
        raise UsageError(f"unknown subcommand {cfg.subcommand!r}")
    if cfg.subcommand == "weights":
        _need(cfg, "kind", "order", "count")
        if cfg.count < 1:
            raise DomainError("--count must be >= 1")
        if cfg.kind not in _ORDER_RANGE:
            raise UsageError(f"--kind must be one of {', '.join(_ORDER_RANGE)}")
        lo, hi, closed = _ORDER_RANGE[cfg.kind]
        if not (lo < cfg.order < hi or (closed and cfg.order == hi)):
            raise DomainError(f"{cfg.kind} order must lie in ({lo:g}, {hi:g}{']' if closed else ')'}, got {cfg.order}")
        return None
    if cfg.subcommand == "stability":
        if not cfg.alphas:
            raise UsageError("stability: give at least one --alpha")
        for a in cfg.alphas:
            if not 0.0 < a <= 1.0:
                raise DomainError(f"alpha must lie in (0, 1], got {a}")
        if cfg.locus_n < 4 or cfg.n_theta < 64:
            raise DomainError("need --n >= 4 and --n-theta >= 64")
        return None
    spec = _spec(cfg)
    if cfg.subcommand == "solve":
        _need(cfg, "M")
        mesh = spec.mesh(cfg.M, cfg.N if cfg.N is not None else cfg.M)
        if cfg.dump_matrix is not None and cfg.dump_matrix not in MATRICES:
            raise UsageError(f"--dump-matrix NAME must be one of {', '.join(MATRICES)}")
        if cfg.t0_offset is not None and not 0.0 <= cfg.t0_offset < 1.0:
            raise DomainError("--t0-offset must lie in [0, 1)")
        return spec, mesh
    if cfg.subcommand == "table":
        from rfaded.experiments import _check_grids

        _check_grids(cfg.grids or ())
        if min(cfg.grids) < 3:
            raise DomainError("grids need M >= 3")
        if cfg.workers is not None and cfg.workers < 1:
            raise DomainError("--workers must be >= 1")
        return spec, None
    # analytic
    if not cfg.x or not cfg.t:
        raise UsageError("analytic: give at least one --x and one --t value")
    if any(not 0.0 <= v <= spec.L for v in cfg.x):
        raise DomainError(f"x values must lie in [0, {spec.L}]")
    if any(not 0.0 <= v <= spec.T for v in cfg.t):
        raise DomainError(f"t values must lie in [0, {spec.T}]")
    if cfg.n_max < 1 or cfg.k_max < 1:
        raise DomainError("--n-max and --k-max must be >= 1")
    return spec, None


# --------------------------------------------------------------- execution


def _weights(cfg):
    from rfaded import weights as W

    k0 = 0
    if cfg.kind == "grunwald":
        vals = W.grunwald_weights(cfg.order, cfg.count).coeffs
    elif cfg.kind == "fbdf2":
        vals = W.fbdf2_weights(cfg.order, cfg.count).coeffs
    elif cfg.kind == "wsgd":
        vals = W.wsgd_weights(cfg.order, max(cfg.count, 3)).coeffs[: cfg.count]
    else:
        vals, k0 = W.start_correction(cfg.order, cfg.count).values, 1
    n = write_csv(cfg.out, ["k", "value"], ((k0 + k, float(v)) for k, v in enumerate(vals)))
    write_sidecar(cfg.out, cfg.to_dict())
    return f"wrote {n} {cfg.kind} weights to {cfg.out}"


def _dump(sys_, name, path):
    mat = {
        "A": sys_.A,
        "B": sys_.B,
        "D": sys_.D,
        "lhs": np.eye(sys_.size) + sys_.D,
        "rhs": np.eye(sys_.size) - sys_.D,
    }[name]
    rows = ((i, j, float(mat[i, j])) for i in range(mat.shape[0]) for j in range(mat.shape[1]))
    write_csv(path, ["i", "j", "value"], rows)


def _solve(cfg, spec, mesh):
    from rfaded.discretization import assemble
    from rfaded.experiments import example_problem
    from rfaded.solver import SolverOptions, solve

    field = solve(spec, mesh, SolverOptions(t0_offset=cfg.t0_offset))
    if cfg.dump_matrix is not None:
        _dump(assemble(spec, mesh), cfg.dump_matrix, cfg.dump_matrix_path)
    V, x, t = field.values, mesh.x, mesh.t
    rows = ((t[j], x[i], V[j, i]) for j in range(mesh.N + 1) for i in range(mesh.M + 1))
    n = write_csv(cfg.out, ["t", "x", "value"], rows)
    meta = cfg.to_dict()
    meta.update({f"run_{k}": v for k, v in field.metadata.items()})
    write_sidecar(cfg.out, meta)
    if cfg.example in ("1", "2"):
        prob = example_problem(int(cfg.example))
        err = field.max_error(lambda xx, tt: prob.exact(xx, tt, spec.gamma))
        return f"max error {err:.6e} at T={mesh.T:g} (M={mesh.M}, N={mesh.N}); {n} points to {cfg.out}"
    return f"wrote {n} points to {cfg.out}; max |u(T)| = {np.max(np.abs(field.final)):.6e}"


def _analytic(cfg, spec):
    from rfaded.analytic import SeriesTruncation, analytic_solution

    trunc = SeriesTruncation(n_max=cfg.n_max, k_max=cfg.k_max)
    x = np.asarray(cfg.x, dtype=float)
    rows = []
    for tt in cfg.t:
        vals = np.atleast_1d(analytic_solution(spec, trunc, x, tt, cfg.convention))
        rows.extend((xx, tt, v) for xx, v in zip(x, vals))
    n = write_csv(cfg.out, ["x", "t", "value"], rows)
    write_sidecar(cfg.out, cfg.to_dict())
    return f"wrote {n} points to {cfg.out}"


def locus_filename(alpha: float) -> str:
    return f"locus_alpha{alpha:g}.csv"


def _stability(cfg):
    from rfaded.stability import boundary_locus, stability_region_area

    out_dir = Path(cfg.out_dir)
    total, areas = 0, []
    for a in cfg.alphas:
        loc = boundary_locus(a, cfg.locus_n, cfg.n_theta)
        path = out_dir / locus_filename(a)
        total += write_csv(path, ["theta", "re", "im"], loc.points)
        write_sidecar(path, cfg.to_dict())
        areas.append(f"{a:g}:{stability_region_area(loc):.4f}")
    return f"wrote {total} points in {len(cfg.alphas)} files to {out_dir}; region areas {' '.join(areas)}"


def _table(cfg, spec):
    from rfaded.experiments import convergence_table, example_problem, observed_orders
    from rfaded.solver import SolverOptions

    opts = SolverOptions(t0_offset=cfg.t0_offset)
    if cfg.example == "sine":
        from rfaded.solver import solve

        # no closed form: measure against the finest grid in the list
        finest = solve(spec, spec.mesh(cfg.grids[-1], cfg.grids[-1]), opts)
        errs = []
        for m in cfg.grids[:-1]:
            f = solve(spec, spec.mesh(m, m), opts)
            r = cfg.grids[-1] // m
            errs.append(float(np.max(np.abs(f.final[1:-1] - finest.final[r:-r:r]))))
        rows = observed_orders([spec.L / m for m in cfg.grids[:-1]], errs)
    else:
        rows = convergence_table(
            example_problem(int(cfg.example)),
            spec.gamma,
            spec.alpha,
            spec.beta,
            cfg.grids,
            K_alpha=cfg.K_alpha,
            K_beta=cfg.K_beta,
            options=opts,
            workers=cfg.workers,
        )
    write_csv(cfg.out, ["h", "error", "order"], ((r.h, r.max_abs_error, r.observed_order) for r in rows))
    meta = cfg.to_dict()
    meta.pop("workers")  # does not affect the output
    write_sidecar(cfg.out, meta)
    last = rows[-1]
    order = "n/a" if last.observed_order is None else f"{last.observed_order:.3f}"
    return f"final error {last.max_abs_error:.6e} at h={last.h:g}, order {order}; table in {cfg.out}"


def execute(cfg: RunConfig, prepared) -> str:
    if cfg.subcommand == "weights":
        return _weights(cfg)
    if cfg.subcommand == "stability":
        return _stability(cfg)
    spec, mesh = prepared
    if cfg.subcommand == "solve":
        return _solve(cfg, spec, mesh)
    if cfg.subcommand == "table":
        return _table(cfg, spec)
    return _analytic(cfg, spec)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        ns = build_parser().parse_args(argv)
        if ns.subcommand == "replay":
            cfg = RunConfig.from_dict(read_sidecar(ns.sidecar))
        else:
            cfg = config_from_args(ns)
        prepared = validate(cfg)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except (UsageError, DomainError, TypeError, OSError, ValueError) as exc:
        print(f"rfaded: error: {exc}", file=sys.stderr)
        return 2
    try:
        print(execute(cfg, prepared))
    except (ConvergenceError, SolverError, SingularMatrixError, DomainError, ArithmeticError, OSError) as exc:
        print(f"rfaded: {cfg.subcommand} failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


run = main
