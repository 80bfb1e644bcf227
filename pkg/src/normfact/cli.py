"""Command-line front end: ``normfact {norm,decompose,mds,gsvd} INPUT ...``.

Exit codes: 0 success, 2 malformed input, 3 solver failure, 4 bad
configuration.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import errors
from .factorization import decompose, wedderburn_diagnostics
from .gsvd import MetricPair, eigen_residuals, gsvd_decompose
from .induced import DEFAULT_CAP, FactorStep, exact_route, induced_norm
from .io import dumps_json, read_matrix, write_long_csv
from .mds import mds_embed, validate_dissimilarity
from .norms import Exponent

EXIT_OK, EXIT_PARSE, EXIT_SOLVER, EXIT_CONFIG = 0, 2, 3, 4


class ConfigError(errors.NormFactError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    input: Path
    r: Exponent = field(default_factory=lambda: Exponent(2.0))
    p: Exponent = field(default_factory=lambda: Exponent(2.0))
    max_steps: int | None = None
    tol: float = 1e-12
    rank_tol: float = 1e-10
    exact: bool = True
    heuristic: bool = False
    cap: int = DEFAULT_CAP
    max_iter: int = 500
    format: str = "json"
    output: Path | None = None
    m_metric: Path | None = None
    n_metric: Path | None = None
    k: int | None = None
    strict: bool = True

    def validate(self):
        if self.tol <= 0 or self.rank_tol <= 0:
            raise ConfigError("tolerances must be positive")
        if self.cap < 1:
            raise ConfigError("enumeration cap must be at least 1")
        if self.max_steps is not None and self.max_steps < 1:
            raise ConfigError("--max-steps must be at least 1")
        if self.k is not None and self.k < 0:
            raise ConfigError("--k must be nonnegative")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: ConfigError: {message}\n")


def _exponent(text):
    try:
        return Exponent.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="normfact", description="Matrix factorizations based on induced l_r -> l_p norms.")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("input", type=Path, help="CSV file of numeric rows (no header, '#' comments)")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("-o", "--output", type=Path, help="write the report here instead of stdout")
        sp.add_argument("--tol", type=float, default=1e-12)
        sp.add_argument("--cap", type=int, default=DEFAULT_CAP, help="sign-enumeration cap on the dimension")

    def exponents(sp):
        sp.add_argument("--r", type=_exponent, default=Exponent(2.0), help="domain norm order (1..inf)")
        sp.add_argument("--p", type=_exponent, default=Exponent(2.0), help="target norm order (1..inf)")
        sp.add_argument("--max-iter", type=int, default=500)
        mode = sp.add_mutually_exclusive_group()
        mode.add_argument("--exact", action="store_true", help="require a certified solver (default)")
        mode.add_argument("--heuristic", action="store_true", help="accept power-method lower bounds")

    sp = sub.add_parser("norm", help="induced norm and its maximizing quintuple")
    common(sp)
    exponents(sp)

    sp = sub.add_parser("decompose", help="stepwise rank-one decomposition")
    common(sp)
    exponents(sp)
    sp.add_argument("--max-steps", type=int)
    sp.add_argument("--rank-tol", type=float, default=1e-10)

    sp = sub.add_parser("mds", help="Euclidean MDS from a dissimilarity matrix")
    common(sp)
    sp.add_argument("--r", type=_exponent, default=Exponent(2.0), help="1 dominant, 2 classical, inf centroid")
    sp.add_argument("--k", type=int, help="number of dimensions (default n)")
    sp.add_argument("--clamp", action="store_true", help="embed non-Euclidean input instead of failing")

    sp = sub.add_parser("gsvd", help="generalized SVD under metrics M and N")
    common(sp)
    sp.add_argument("--M", dest="m_metric", type=Path, help="row metric CSV (default identity)")
    sp.add_argument("--N", dest="n_metric", type=Path, help="column metric CSV (default identity)")
    sp.add_argument("--max-steps", type=int)
    sp.add_argument("--rank-tol", type=float, default=1e-10)
    return parser


def config_from_args(ns) -> RunConfig:
    cfg = RunConfig(subcommand=ns.subcommand, input=ns.input, format=ns.format, output=ns.output,
                    tol=ns.tol, cap=ns.cap)
    for name in ("r", "p", "max_steps", "rank_tol", "max_iter", "k", "m_metric", "n_metric"):
        if hasattr(ns, name):
            setattr(cfg, name, getattr(ns, name))
    cfg.heuristic = getattr(ns, "heuristic", False)
    cfg.exact = not cfg.heuristic
    cfg.strict = not getattr(ns, "clamp", False)
    cfg.validate()
    return cfg


def _step_dict(s: FactorStep) -> dict:
    return {"lambda": s.lam, "a": s.a, "b": s.b, "u": s.u, "v": s.v}


def _step_records(k, s: FactorStep):
    yield (k, "lambda", None, s.lam)
    for name in ("a", "b", "u", "v"):
        for i, x in enumerate(getattr(s, name)):
            yield (k, name, i, x)


def _needs_exact(cfg: RunConfig, shape):
    route = exact_route(shape, cfg.r, cfg.p, cfg.cap)
    if route in (None, "too-large") and not cfg.heuristic:
        why = "exceeds the enumeration cap" if route == "too-large" else "has no certified solver"
        raise ConfigError(f"(r, p) = ({cfg.r}, {cfg.p}) {why} for shape {shape}; pass --heuristic")
    return route not in (None, "too-large")


def run_norm(cfg: RunConfig):
    A = read_matrix(cfg.input)
    _needs_exact(cfg, A.shape)
    rep = induced_norm(A, cfg.r, cfg.p, cap=cfg.cap, tol=cfg.tol, max_iter=cfg.max_iter,
                       heuristic=cfg.heuristic)
    report = {
        "method": {"r": str(cfg.r), "p": str(cfg.p), "solver": rep.solver},
        "shape": list(A.shape),
        "lambda": rep.step.lam,
        "certified": rep.certified,
        "converged": rep.converged,
        "iterations": rep.iterations,
        "starts_tried": rep.starts_tried,
        "step": _step_dict(rep.step),
    }
    records = list(_step_records(1, rep.step)) + [(None, "certified", None, rep.certified)]
    return report, records


def run_decompose(cfg: RunConfig):
    X = read_matrix(cfg.input)
    exact = _needs_exact(cfg, X.shape)
    d = decompose(X, cfg.r, cfg.p, max_steps=cfg.max_steps, rank_tol=cfg.rank_tol, exact=exact,
                  cap=cfg.cap, tol=cfg.tol, max_iter=cfg.max_iter)
    diag = wedderburn_diagnostics(X, d)
    report = {
        "method": d.method,
        "shape": list(X.shape),
        "steps": [_step_dict(s) for s in d.steps],
        "residual_norm": d.residual_norm,
        "certified": d.certified,
        "diagnostics": diag,
    }
    records = [rec for k, s in enumerate(d.steps, 1) for rec in _step_records(k, s)]
    records += [(None, "residual_norm", None, d.residual_norm), (None, "certified", None, d.certified),
                (None, "eq8_max", None, diag["eq8_max"]), (None, "eq9_max", None, diag["eq9_max"])]
    return report, records


def run_mds(cfg: RunConfig):
    delta = validate_dissimilarity(read_matrix(cfg.input))
    if cfg.k is not None and cfg.k > delta.shape[0]:
        raise ConfigError(f"--k={cfg.k} exceeds the number of objects n={delta.shape[0]}")
    emb = mds_embed(delta, cfg.r, k=cfg.k, tol=cfg.tol, strict=cfg.strict, cap=cfg.cap)
    report = {
        "method": {"r": str(cfg.r), "k": emb.k, "tol": cfg.tol, "strict": cfg.strict},
        "n": delta.shape[0],
        "values": emb.values,
        "coordinates": [list(row) for row in emb.coordinates],
        "axes": [list(u) for u in emb.axes],
        "certified": emb.certified,
    }
    records = []
    for j in range(emb.k):
        records.append((j + 1, "value", None, emb.values[j]))
        records += [(j + 1, "coordinate", i, x) for i, x in enumerate(emb.coordinates[:, j])]
        records += [(j + 1, "axis", i, x) for i, x in enumerate(emb.axes[j])]
    return report, records


def run_gsvd(cfg: RunConfig):
    A = read_matrix(cfg.input)
    m, n = A.shape
    M = read_matrix(cfg.m_metric) if cfg.m_metric else np.eye(m)
    N = read_matrix(cfg.n_metric) if cfg.n_metric else np.eye(n)
    metrics = MetricPair(M, N)
    metrics.check_shape(A)
    d = gsvd_decompose(A, metrics, max_steps=cfg.max_steps, rank_tol=cfg.rank_tol, tol=cfg.tol)
    R = A.copy()
    eig = []
    for s in d.steps:
        eig.append(eigen_residuals(R, metrics, s))
        R = R - np.outer(s.a, s.b) / s.lam
    diag = wedderburn_diagnostics(A, d)
    diag["eigen_residuals"] = eig
    report = {
        "method": d.method,
        "shape": [m, n],
        "steps": [_step_dict(s) for s in d.steps],
        "residual_norm": d.residual_norm,
        "certified": True,
        "diagnostics": diag,
    }
    records = [rec for k, s in enumerate(d.steps, 1) for rec in _step_records(k, s)]
    for k, e in enumerate(eig, 1):
        records += [(k, f"eigen_residual_{key}", None, val) for key, val in e.items()]
    records.append((None, "residual_norm", None, d.residual_norm))
    return report, records


_RUNNERS = {"norm": run_norm, "decompose": run_decompose, "mds": run_mds, "gsvd": run_gsvd}


def run(cfg: RunConfig) -> str:
    """Execute ``cfg`` and return the rendered report text."""
    report, records = _RUNNERS[cfg.subcommand](cfg)
    return dumps_json(report) if cfg.format == "json" else write_long_csv(records)


def _exit_code(exc) -> int:
    if isinstance(exc, (errors.ParseError, errors.InvalidDissimilarity)):
        return EXIT_PARSE
    if isinstance(exc, (ConfigError, errors.TooLarge, errors.NoExactSolver, errors.DimensionMismatch)):
        return EXIT_CONFIG
    return EXIT_SOLVER


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        cfg = config_from_args(ns)
        text = run(cfg)
    except errors.NormFactError as exc:
        print(f"normfact: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return _exit_code(exc)
    if cfg.output:
        cfg.output.write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
