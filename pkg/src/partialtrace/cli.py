"""Command-line entry point.

Every run resolves its flags into a :class:`RunConfig`, writes that config as a
JSON manifest, and writes its primary artifact atomically. ``partialtrace
replay MANIFEST`` re-runs a manifest and reproduces the artifact byte for byte.

Exit codes: 0 success, 1 invalid input, 2 numerical failure (divergence,
non-convergence, inconclusive sampling).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import __version__
from . import barrier as bar
from . import counterexample as cex
from . import regularity as reg
from . import solver as sol
from .errors import InvalidInputError, NumericalError
from .expr import Expression
from .operators import HamiltonianSpec, WeightVector

__all__ = ["RunConfig", "run", "main", "build_parser"]

SUBCOMMANDS = ("beta", "constants", "barrier", "solve", "holder", "counterexample", "proofcheck")


class UsageError(InvalidInputError):
    pass


@dataclass(frozen=True)
class Param:
    name: str
    type: Callable = float
    default: Any = None
    required: bool = False
    help: str = ""
    flag: str | None = None
    choices: tuple | None = None
    switch: bool = False
    positional: bool = False

    @property
    def option(self) -> str:
        return self.flag or "--" + self.name.replace("_", "-")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from exc


DEFAULT_ALPHAS = ",".join(f"{0.05 * k:.2f}" for k in range(1, 21))

PARAMS: dict[str, list[Param]] = {
    "beta": [
        Param("a1", required=True, help="weight of the smallest eigenvalue"),
        Param("aN", required=True, flag="--aN", help="weight of the largest eigenvalue"),
    ],
    "constants": [
        Param("a", str, required=True, help="comma-separated weights a_1,...,a_N"),
        Param("c_h", default=0.0, help="growth constant of H"),
        Param("u_sup", default=1.0, help="sup-norm of u on the larger subdomain"),
        Param("f_sup", default=0.0, help="sup-norm of f on the larger subdomain"),
        Param("delta", default=1.0, help="localization radius"),
    ],
    "barrier": [
        Param("action", str, default="report", choices=("report", "export"), positional=True,
              help="'report' prints K (and checks with --verify); 'export' writes a CSV table"),
        Param("A", required=True, flag="--A", help="coefficient of 1/r, in (0, 1)"),
        Param("B", default=0.0, flag="--B", help="constant drift coefficient"),
        Param("C", required=True, flag="--C", help="right-hand side, > 0"),
        Param("D", default=0.0, flag="--D", help="required height at delta"),
        Param("delta", required=True, help="radius"),
        Param("verify", bool, default=False, switch=True, help="check the four barrier properties"),
        Param("nodes", int, default=200, help="number of log-spaced nodes"),
    ],
    "solve": [
        Param("a1", default=1.0, help="weight of lambda_1"),
        Param("a2", default=1.0, help="weight of lambda_2"),
        Param("nx", int, default=33, help="nodes along x"),
        Param("ny", int, default=33, help="nodes along y"),
        Param("h", default=None, help="grid spacing (default 1/(nx-1))"),
        Param("stencil_width", int, default=1, help="wide-stencil width"),
        Param("tau", default=None, help="pseudo-time step (default h^2/(4|a|_1 w^2))"),
        Param("tol", default=1e-8, help="residual tolerance"),
        Param("max_iter", int, default=200_000, help="iteration cap"),
        Param("f", str, default="0", help="right-hand side: expression in x, y or CSV file x,y,value"),
        Param("g", str, default="0", help="boundary data: expression in x, y or CSV file x,y,value"),
        Param("H", str, default="zero", flag="--H", help="'zero' or 'power:A,B,tau'"),
    ],
    "holder": [
        Param("input", str, required=True, help="CSV file with columns x,y,u on a uniform grid"),
        Param("beta", required=True, help="Hölder exponent for the seminorm"),
        Param("region", str, default=None, help="index box i0,i1,j0,j1 (half-open)"),
    ],
    "counterexample": [
        Param("blowup", bool, default=False, switch=True, help="emit the blow-up ratio table as CSV"),
        Param("alphas", str, default=DEFAULT_ALPHAS, help="comma-separated exponents"),
        Param("kmax", int, default=12, help="largest k, with t_k = 10^-k"),
        Param("samples", int, default=1000, help="concavity sample count"),
        Param("spotcheck", bool, default=False, switch=True,
              help="also run the supersolution spot-check and the touching-from-above search"),
        Param("trials", int, default=200, help="spot-check trials"),
        Param("N", int, default=3, flag="--N", help="dimension for the spot-check"),
    ],
    "proofcheck": [
        Param("a", str, required=True, help="comma-separated weights a_1,...,a_N"),
        Param("c_h", default=0.0, help="growth constant of H"),
        Param("u_sup", default=1.0, help="sup-norm of u"),
        Param("f_sup", default=0.0, help="sup-norm of f"),
        Param("delta", default=1.0, help="localization radius"),
        Param("r", default=None, help="distance |x - y| for Theta (default delta/2)"),
        Param("eps", default=None, help="regularization parameter (default: half the ordering threshold)"),
        Param("trials", int, default=500, help="random admissible pairs"),
    ],
}


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    parameters: dict = field(default_factory=dict)
    seed: int = 0
    output_path: str | None = None
    format: str = "json"

    KEYS = ("subcommand", "parameters", "seed", "output_path", "format", "version")

    @classmethod
    def build(cls, subcommand: str, parameters: dict, seed: int = 0, output_path: str | None = None):
        if subcommand not in PARAMS:
            raise UsageError(f"unknown subcommand {subcommand!r}")
        spec = {p.name: p for p in PARAMS[subcommand]}
        unknown = set(parameters) - set(spec)
        if unknown:
            raise UsageError(f"unknown parameters for {subcommand}: {sorted(unknown)}")
        resolved = {}
        for name, p in spec.items():
            value = parameters.get(name, p.default)
            if value is None and p.required:
                raise UsageError(f"{subcommand}: missing required parameter {p.option}")
            if value is not None:
                try:
                    value = p.type(value)
                except (TypeError, ValueError) as exc:
                    raise UsageError(f"{p.option}: cannot parse {value!r}") from exc
                if p.choices and value not in p.choices:
                    raise UsageError(f"{p.option} must be one of {p.choices}")
            resolved[name] = value
        fmt = _format_of(subcommand, resolved)
        return cls(subcommand, resolved, int(seed), output_path, fmt)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        unknown = set(data) - set(cls.KEYS)
        if unknown:
            raise UsageError(f"unknown manifest keys: {sorted(unknown)}")
        cfg = cls.build(data["subcommand"], data.get("parameters", {}), data.get("seed", 0),
                        data.get("output_path"))
        if "format" in data and data["format"] != cfg.format:
            raise UsageError(f"manifest format {data['format']!r} does not match {cfg.format!r}")
        return cfg

    def as_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "parameters": self.parameters,
            "seed": self.seed,
            "output_path": self.output_path,
            "format": self.format,
            "version": __version__,
        }


def _format_of(subcommand: str, params: dict) -> str:
    if subcommand == "solve":
        return "csv"
    if subcommand == "barrier" and params["action"] == "export":
        return "csv"
    if subcommand == "counterexample" and params["blowup"]:
        return "csv"
    return "json"


def _dumps(obj) -> str:
    return json.dumps(_finite(obj), indent=2, sort_keys=True, default=_jsonable,
                      allow_nan=False) + "\n"


def _finite(obj):
    # strict JSON has no inf/nan; spell them as strings
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    if isinstance(obj, (float, np.floating)) and not np.isfinite(obj):
        return str(float(obj))
    return obj


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


@dataclass
class Outcome:
    text: str
    summary: dict | None = None
    status: int = 0


# --- subcommands -----------------------------------------------------------

def _weights(text) -> WeightVector:
    return WeightVector(tuple(_floats(text)))


def _problem(p) -> reg.ProblemData:
    return reg.ProblemData(_weights(p["a"]), p["c_h"], p["u_sup"], p["f_sup"], p["delta"])


def _run_beta(p, seed):
    return Outcome(_dumps({"beta": reg.beta(p["a1"], p["aN"])}))


def _run_constants(p, seed):
    data = _problem(p)
    k = reg.theorem_constants(data)
    b = bar.build(reg.barrier_params_for(data))
    out = {
        "beta": reg.beta(data.a1, data.aN),
        "L": k.L, "D": k.D, "C": k.C, "B": k.B,
        "A": b.params.A,
        "K": b.K,
        "holder_constant_surrogate": b.seminorm_bound(),
        "note": "holder_constant_surrogate is K/(1-A), the barrier growth bound; "
                "the estimate's constant itself has no closed form",
    }
    return Outcome(_dumps(out))


def _run_barrier(p, seed):
    params = bar.BarrierParams(p["A"], p["B"], p["C"], p["D"], p["delta"])
    b = bar.build(params)
    if p["action"] == "export":
        return Outcome(bar.to_csv(b, bar.verification_nodes(params.delta, p["nodes"])))
    out = {"K": b.K, "params": {k: getattr(params, k) for k in ("A", "B", "C", "D", "delta")},
           "seminorm_bound": b.seminorm_bound()}
    status = 0
    if p["verify"]:
        report = bar.verify_properties(b, p["nodes"])
        out["report"] = report.as_dict()
        status = 0 if report.passed else 2
    return Outcome(_dumps(out), status=status)


def _field(spec: str, grid: sol.Grid):
    if os.path.isfile(spec):
        return _read_grid_csv(spec, grid)
    return Expression(spec)


def _read_grid_csv(path: str, grid: sol.Grid | None = None):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2 or len(rows[0]) < 3:
        raise UsageError(f"{path}: expected a header and columns x,y,value")
    data = np.array([[float(v) for v in r[:3]] for r in rows[1:] if r], dtype=float)
    x, y, v = data.T
    if grid is None:
        xs, ys = np.unique(x), np.unique(y)
        if len(xs) < 3 or len(ys) < 3:
            raise UsageError(f"{path}: need at least 3 distinct x and y values")
        h = float(xs[1] - xs[0])
        grid = sol.Grid(len(xs), len(ys), h, (float(xs[0]), float(ys[0])))
    i = np.rint((x - grid.origin[0]) / grid.h).astype(int)
    j = np.rint((y - grid.origin[1]) / grid.h).astype(int)
    if i.min() < 0 or j.min() < 0 or i.max() >= grid.nx or j.max() >= grid.ny:
        raise UsageError(f"{path}: points fall outside the grid")
    values = np.full(grid.shape, np.nan)
    values[i, j] = v
    if np.isnan(values).any():
        raise UsageError(f"{path}: file does not cover every grid node")
    return values


def _hamiltonian(text: str) -> HamiltonianSpec:
    if text == "zero":
        return HamiltonianSpec.zero()
    if text.startswith("power:"):
        vals = _floats(text[len("power:"):])
        if len(vals) != 3:
            raise UsageError("--H power:A,B,tau needs three numbers")
        return HamiltonianSpec.power_law(*vals)
    raise UsageError(f"--H must be 'zero' or 'power:A,B,tau', got {text!r}")


def _grid_csv(u: sol.GridFunction, name: str = "u") -> str:
    buf = io.StringIO()
    buf.write(f"x,y,{name}\n")
    X, Y = u.grid.mesh()
    for x, y, v in zip(X.ravel(), Y.ravel(), u.values.ravel()):
        buf.write(f"{float(x)!r},{float(y)!r},{float(v)!r}\n")
    return buf.getvalue()


def _run_solve(p, seed):
    h = p["h"] if p["h"] is not None else 1.0 / (p["nx"] - 1)
    grid = sol.Grid(p["nx"], p["ny"], h)
    g = _field(p["g"], grid)
    grid = sol.Grid(p["nx"], p["ny"], h, (0.0, 0.0), g)
    f = _field(p["f"], grid)
    a = WeightVector((p["a1"], p["a2"]))
    config = sol.SolverConfig(p["tau"], p["max_iter"], p["tol"], p["stencil_width"])
    result = sol.solve(grid, a, _hamiltonian(p["H"]), f, config)
    b = reg.beta(p["a1"], p["a2"])
    region = sol.default_region(grid)
    summary = {
        "iterations": result.iterations,
        "residual": result.residual,
        "converged": result.diagnostics["converged"],
        "tau": result.diagnostics["tau"],
        "beta": b,
        "region": list(region),
        "seminorm": sol.holder_seminorm(result.u, b, region),
    }
    try:
        summary["alpha_hat"], summary["fit_r2"] = sol.estimate_exponent(result.u, region)
    except InvalidInputError as exc:
        summary["alpha_hat"], summary["fit_r2"] = None, None
        summary["exponent_error"] = str(exc)
    return Outcome(_grid_csv(result.u), summary, status=0 if summary["converged"] else 2)


def _run_holder(p, seed):
    values = _read_grid_csv(p["input"])
    with open(p["input"], newline="") as fh:
        rows = list(csv.reader(fh))
    data = np.array([[float(v) for v in r[:2]] for r in rows[1:] if r])
    xs, ys = np.unique(data[:, 0]), np.unique(data[:, 1])
    grid = sol.Grid(len(xs), len(ys), float(xs[1] - xs[0]), (float(xs[0]), float(ys[0])))
    u = sol.GridFunction(grid, values)
    region = sol.default_region(grid) if p["region"] is None else \
        sol.Region(*(int(v) for v in _floats(p["region"])))
    alpha, r2 = sol.estimate_exponent(u, region)
    out = {"beta": p["beta"], "region": list(region),
           "seminorm": sol.holder_seminorm(u, p["beta"], region),
           "alpha_hat": alpha, "fit_r2": r2}
    return Outcome(_dumps(out))


def _run_counterexample(p, seed):
    if p["blowup"]:
        return Outcome(cex.holder_blowup(_floats(p["alphas"]), p["kmax"]).to_csv())
    N = max(p["N"], 3)
    middle = (0.0,) + (1.0,) * (N - 2) + (0.0,)
    out = {
        "f_at_0": cex.f_value(0.0),
        "concavity": cex.concavity_check(p["samples"]).as_dict(),
        "off_plane": cex.viscosity_residual_away_from_plane(middle, seed=seed),
    }
    status = 0
    if p["spotcheck"]:
        spot = cex.supersolution_spotcheck(p["trials"], seed=seed, N=p["N"])
        out["spotcheck"] = spot.as_dict()
        out["touching_from_above_found"] = cex.subsolution_search(p["trials"], seed=seed, N=p["N"])
        if spot.inconclusive:
            status = 2
    return Outcome(_dumps(out), status=status)


def _run_proofcheck(p, seed):
    out = reg.proofcheck(_problem(p), r=p["r"], eps=p["eps"], trials=p["trials"], seed=seed)
    return Outcome(_dumps(out))


_RUNNERS = {
    "beta": _run_beta,
    "constants": _run_constants,
    "barrier": _run_barrier,
    "solve": _run_solve,
    "holder": _run_holder,
    "counterexample": _run_counterexample,
    "proofcheck": _run_proofcheck,
}


def run(config: RunConfig) -> Outcome:
    """Execute `config` and return its primary artifact without writing anything."""
    return _RUNNERS[config.subcommand](config.parameters, config.seed)


# --- argument parsing ------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="partialtrace", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name, help=f"{name} subcommand")
        for p in PARAMS[name]:
            if p.positional:
                sp.add_argument(p.name, nargs="?", default=p.default, choices=p.choices,
                                metavar=p.name, help=p.help + f" (one of {', '.join(p.choices)})")
            elif p.switch:
                sp.add_argument(p.option, dest=p.name, action="store_true", help=p.help)
            else:
                default = f" (default {p.default})" if p.default is not None else ""
                sp.add_argument(p.option, dest=p.name, default=None, metavar=p.name.upper(),
                                help=p.help + default)
        _common(sp)
    rp = sub.add_parser("replay", help="re-run a manifest")
    rp.add_argument("manifest", help="manifest JSON written by an earlier run")
    rp.add_argument("--out", default=None, help="override the artifact path")
    return parser


def _common(sp):
    sp.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    sp.add_argument("--out", default=None, help="artifact path (default: standard output)")
    sp.add_argument("--manifest", default=None,
                    help="manifest path (default: OUT.manifest.json, or SUBCOMMAND.manifest.json)")


def _config_from_args(ns) -> RunConfig:
    params = {}
    for p in PARAMS[ns.command]:
        value = getattr(ns, p.name)
        if p.switch:
            params[p.name] = bool(value)
        elif value is not None:
            params[p.name] = value
    return RunConfig.build(ns.command, params, ns.seed, ns.out)


def _emit(config: RunConfig, outcome: Outcome) -> None:
    if config.output_path:
        _atomic_write(config.output_path, outcome.text)
        if outcome.summary is not None:
            _atomic_write(config.output_path + ".summary.json", _dumps(outcome.summary))
            sys.stdout.write(_dumps(outcome.summary))
    else:
        sys.stdout.write(outcome.text)
        if outcome.summary is not None:
            sys.stderr.write(_dumps(outcome.summary))


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        if ns.command == "replay":
            with open(ns.manifest) as fh:
                data = json.load(fh)
            if ns.out is not None:
                data["output_path"] = ns.out
            config = RunConfig.from_dict(data)
        else:
            config = _config_from_args(ns)
            manifest = ns.manifest or (
                config.output_path + ".manifest.json" if config.output_path
                else f"{config.subcommand}.manifest.json")
            _atomic_write(manifest, _dumps(config.as_dict()))
        outcome = run(config)
        _emit(config, outcome)
        return outcome.status
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
