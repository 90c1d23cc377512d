"""``nmc`` command-line interface.

Subcommands: solve-r, spectrum, branch, nmc-eval, set-eval, verify. Flags
override values read from ``--config`` (a flat key=value file). Output is
CSV (header row, 17 significant digits, ``#`` metadata lines) or JSON with
top-level ``meta`` and ``data`` keys. Exit codes: 0 success, 1 usage or
configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__
from .errors import DomainError, NMCError

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2
COMMANDS = ("solve-r", "spectrum", "branch", "nmc-eval", "set-eval", "verify")
SUITE_NAMES = ("kernels", "quad", "graph", "spectrum", "branch", "setgeom", "all")
BRANCH_RESIDUAL_LIMIT = 1e-9


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    """Effective settings of one run (defaults, then config file, then flags)."""

    alpha: float = 0.5
    kmax: int = 16
    a_max: float = 0.03
    steps: int = 3
    modes: int = 32
    tol: float = 1e-10
    trunc_T: float = 50.0
    periodization_M: int = 32
    out: str = ""
    format: str = "csv"
    suite: str = "all"
    seed: int = 0
    points: int = 8
    coeffs: str = ""
    shape: str = "ellipse"
    axes: str = "1.5,1"

    def validate(self) -> "RunConfig":
        if not (0.0 < self.alpha < 1.0):
            raise UsageError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.kmax < 0 or self.kmax > 4096:
            raise UsageError("kmax must lie in [0, 4096]")
        if self.steps < 1:
            raise UsageError("steps must be a positive integer")
        if not (0.0 < self.a_max < 0.1):
            raise UsageError("a-max must lie in (0, 0.1)")
        if self.modes < 2:
            raise UsageError("modes must be at least 2")
        if not self.tol > 0.0:
            raise UsageError("tol must be positive")
        if self.format not in ("csv", "json"):
            raise UsageError("format must be csv or json")
        if self.suite not in SUITE_NAMES:
            raise UsageError(f"unknown suite {self.suite!r}; valid suites: {', '.join(SUITE_NAMES)}")
        if self.points < 1:
            raise UsageError("points must be positive")
        if self.shape not in ("disc", "ellipse", "straight_band", "graph_band"):
            raise UsageError("shape must be disc, ellipse, straight_band or graph_band")
        return self

    def quad_config(self):
        from .quad import QuadratureConfig

        try:
            return QuadratureConfig(abs_tol=self.tol, trunc_T=self.trunc_T, periodization_M=self.periodization_M)
        except DomainError as exc:
            raise UsageError(str(exc)) from exc


_TYPES = {f.name: f.type for f in fields(RunConfig)}
_CASTS = {"float": float, "int": int, "str": str}


def _cast(key: str, value: str):
    kind = _TYPES[key]
    try:
        return _CASTS[kind](value)
    except ValueError as exc:
        raise UsageError(f"bad value for {key}: {value!r}") from exc


def read_config_file(path: str) -> dict:
    """Parse a flat key=value file; blank lines and '#' comments are ignored."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from exc
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        key, value = (p.strip() for p in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _TYPES:
            raise UsageError(f"{path}:{n}: unknown key {key!r}")
        out[key] = _cast(key, value)
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit code 1 instead of argparse's 2
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nmc", description="Nonlocal mean curvature of bands and planar sets.")
    p.add_argument("--version", action="version", version=f"nmc {__version__}")
    sub = p.add_subparsers(dest="command", metavar="{" + ",".join(COMMANDS) + "}")
    sub.required = True
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--alpha", type=float)
        s.add_argument("--kmax", type=int)
        s.add_argument("--a-max", dest="a_max", type=float)
        s.add_argument("--steps", type=int)
        s.add_argument("--modes", type=int)
        s.add_argument("--tol", type=float)
        s.add_argument("--out")
        s.add_argument("--format", choices=("csv", "json"))
        s.add_argument("--suite")
        s.add_argument("--seed", type=int)
        s.add_argument("--config")
    return p


def resolve_config(ns: argparse.Namespace) -> RunConfig:
    values = {}
    if ns.config:
        values.update(read_config_file(ns.config))
    for key in _TYPES:
        v = getattr(ns, key, None)
        if v is not None:
            values[key] = v
    return RunConfig(**values).validate()


# ---------------------------------------------------------------- output


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def render(command: str, cfg: RunConfig, extra_meta: dict, columns: list[str], rows: list[list]) -> str:
    meta = {"command": command, "version": __version__, "config": asdict(cfg), **extra_meta}
    if cfg.format == "json":
        data = [dict(zip(columns, r)) for r in rows]
        return json.dumps(_jsonable({"meta": meta, "data": data}), indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    buf.write(f"# nmc {__version__} {command}\n")
    for k, v in asdict(cfg).items():
        buf.write(f"# {k}={_fmt(v)}\n")
    for k, v in extra_meta.items():
        buf.write(f"# {k}={_fmt(v)}\n")
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(columns)
    out.writerows([_fmt(v) for v in r] for r in rows)
    return buf.getvalue()


def emit(text: str, cfg: RunConfig) -> None:
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- commands


def cmd_solve_r(cfg: RunConfig) -> int:
    from .spectrum import solve_R_detailed

    res = solve_R_detailed(cfg.alpha, cfg.quad_config())
    ok = abs(res.lambda1_residual) <= 1e-10
    cols = ["alpha", "R_star", "lambda1_residual", "iterations"]
    rows = [[cfg.alpha, res.R_star, res.lambda1_residual, len(res.history)]]
    meta = {"history": [[s, r, f] for s, r, f in res.history]} if cfg.format == "json" else {}
    if cfg.format == "json":
        text = json.dumps(_jsonable({"meta": {"command": "solve-r", "version": __version__,
                                              "config": asdict(cfg), **meta},
                                     "data": dict(zip(cols, rows[0]))}), indent=2) + "\n"
    else:
        text = render("solve-r", cfg, {}, cols, rows)
    emit(text, cfg)
    return EXIT_OK if ok else EXIT_NUMERIC


def cmd_spectrum(cfg: RunConfig) -> int:
    from .kernels import KernelContext
    from .spectrum import compute_spectrum, solve_R

    qc = cfg.quad_config()
    ctx = KernelContext(cfg.alpha, solve_R(cfg.alpha, qc))
    sp = compute_spectrum(ctx, cfg.kmax, qc)
    ratios = sp.ratios()
    rows = [[k, sp.lambdas[k], ratios[k] * sp.mu_inf if k else float("nan"), sp.mu_inf]
            for k in range(sp.K + 1)]
    meta = {"R_star": ctx.R, "mu_inf": sp.mu_inf, "gamma": sp.gamma}
    emit(render("spectrum", cfg, meta, ["k", "lambda_k", "lambda_k_over_k_pow", "mu_inf"], rows), cfg)
    ordered = sp.K < 1 or bool(np.all(np.diff(sp.lambdas) > 0)) and sp.lambdas[0] < 0
    return EXIT_OK if ordered else EXIT_NUMERIC


def cmd_branch(cfg: RunConfig) -> int:
    from .branch import continue_branch
    from .spectrum import critical_context

    qc = cfg.quad_config()
    ctx = critical_context(cfg.alpha, qc)
    pts = continue_branch(ctx, cfg.a_max, cfg.steps, qc, K=cfg.modes)
    cols = ["a", "lambda", "period", "v_norm", "residual"] + [f"v_{k}" for k in range(cfg.modes + 1)]
    rows = [[p.a, p.lam, p.period, p.v.l2(), p.residual_norm, *p.v.padded(cfg.modes).coeffs] for p in pts]
    emit(render("branch", cfg, {"R_star": ctx.R}, cols, rows), cfg)
    return EXIT_OK if all(p.residual_norm <= BRANCH_RESIDUAL_LIMIT for p in pts) else EXIT_NUMERIC


def _parse_floats(text: str, what: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"bad {what}: {text!r}") from exc


def cmd_nmc_eval(cfg: RunConfig) -> int:
    from .graph_nmc import nmc_of_graph
    from .kernels import KernelContext
    from .series import CosineSeries
    from .spectrum import solve_R

    qc = cfg.quad_config()
    if cfg.coeffs:
        coeffs = _parse_floats(cfg.coeffs, "coeffs")
    else:
        coeffs = [solve_R(cfg.alpha, qc), 0.05]
    u = CosineSeries(np.array(coeffs))
    if not u.is_positive():
        raise UsageError("profile coefficients must satisfy c_0 > sum |c_k|")
    ctx = KernelContext(cfg.alpha, coeffs[0])
    s = np.linspace(0.0, math.pi, cfg.points)
    h = np.atleast_1d(nmc_of_graph(ctx, u, s, qc))
    emit(render("nmc-eval", cfg, {"profile": ",".join(_fmt(c) for c in coeffs)}, ["s", "u", "H"],
                [[si, u(si), hi] for si, hi in zip(s, h)]), cfg)
    return EXIT_OK


def cmd_set_eval(cfg: RunConfig) -> int:
    from .graph_nmc import nmc_of_graph
    from .kernels import KernelContext
    from .series import CosineSeries
    from .setgeom import PlanarSet, nmc_boundary_form, nmc_of_set

    qc = cfg.quad_config()
    ctx = KernelContext(cfg.alpha, 1.0)
    axes = _parse_floats(cfg.axes, "axes")
    u = None
    try:
        if cfg.shape == "disc":
            E = PlanarSet.disc(axes[0])
        elif cfg.shape == "ellipse":
            E = PlanarSet.ellipse(axes[0], axes[1])
        elif cfg.shape == "straight_band":
            E = PlanarSet.straight_band(axes[0])
        else:
            coeffs = _parse_floats(cfg.coeffs, "coeffs") if cfg.coeffs else [0.6, 0.05]
            u = CosineSeries(np.array(coeffs))
            E = PlanarSet.graph_band(u)
    except (IndexError, DomainError) as exc:
        raise UsageError(f"bad shape parameters: {exc}") from exc
    rows = []
    upper = 2.0 * math.pi if E.bounded else math.pi
    for th in np.linspace(0.0, upper, cfg.points, endpoint=not E.bounded):
        x, _ = E.boundary_param(th)
        h = nmc_of_set(ctx, E, x, qc)
        if E.bounded:
            alt = nmc_boundary_form(ctx, E, x, qc)
        elif u is not None:
            alt = nmc_of_graph(ctx, u, th, qc)
        else:
            from .graph_nmc import straight_band_h

            alt = straight_band_h(ctx.with_R(axes[0]), qc)
        rows.append([th, x[0], x[1], h, alt])
    second = "H_boundary_form" if E.bounded else "H_graph"
    emit(render("set-eval", cfg, {}, ["param", "x1", "x2", "H_set", second], rows), cfg)
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    from .verify import run_suite

    checks = run_suite(cfg.suite, cfg.alpha, cfg.quad_config(), cfg.seed)
    rows = [[c.suite, c.name, c.passed, c.value, c.tolerance] for c in checks]
    emit(render("verify", cfg, {}, ["suite", "check", "passed", "value", "tolerance"], rows), cfg)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_NUMERIC


_COMMANDS = {
    "solve-r": cmd_solve_r,
    "spectrum": cmd_spectrum,
    "branch": cmd_branch,
    "nmc-eval": cmd_nmc_eval,
    "set-eval": cmd_set_eval,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        cfg = resolve_config(ns)
        return _COMMANDS[ns.command](cfg)
    except UsageError as exc:
        sys.stderr.write(f"nmc: usage error: {exc}\n")
        return EXIT_USAGE
    except NMCError as exc:
        sys.stderr.write(f"nmc: numerical failure: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
