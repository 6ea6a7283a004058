"""Command-line front end: ``prolate <task> [--config FILE] [flags] --out DIR``.

Every task can be driven by a JSON config (see :data:`CONFIG_SCHEMA`);
command-line flags override config fields. Exit codes: 0 success, 2 usage
or schema error, 3 numeric failure or tolerance violation, 4 I/O error.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass

import jsonschema
import numpy as np

from . import approx, fastapply, spectral
from .exceptions import NumericError, ParseError, ProlateError
from .groups import GroupKind, spec_from_dict
from .io import (
    _load_json,
    format_float,
    load_operator,
    persist_decomposition,
    read_vector_csv,
    save_operator,
    write_csv,
)
from .operators import (
    SymbolGrid,
    periodic_prolate_operator,
    prolate_operator,
    prolate_operator_2d,
    toeplitz_from_impulse,
    toeplitz_from_symbol,
)

log = logging.getLogger("prolate")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

TASKS = ("build", "eigs", "szego", "dof", "approx", "solve", "multitaper", "estimate", "study")
METRICS = ("trace", "sum_squares", "szego", "szego_cdf", "dof", "estimator_sampling", "estimator_circulant")

_SYMBOL_SCHEMA = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["trig", "indicator", "triangle", "samples"]},
        "coefficients": {"type": "object", "additionalProperties": {"type": "number"}},
        "W": {"type": "number", "exclusiveMinimum": 0, "maximum": 0.5},
        "values": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        "grid": {"type": "integer", "minimum": 8},
    },
}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["task"],
    "properties": {
        "task": {"enum": list(TASKS)},
        "operator": {"type": "object"},
        "operator_file": {"type": "string"},
        "symbol": _SYMBOL_SCHEMA,
        "pulse": _SYMBOL_SCHEMA,
        "impulse": {"type": "array", "items": {"type": "number"}},
        "n": {"type": "integer", "minimum": 1},
        "sizes": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "thetas": {"type": "array", "items": {"enum": sorted(spectral.THETAS)}},
        "eps": {"type": "number", "exclusiveMinimum": 0},
        "metric": {"enum": list(METRICS)},
        "theorem": {"enum": ["2", "3", "4"]},
        "params": {"type": "object"},
        "rhs_file": {"type": "string"},
        "rank": {"type": "integer", "minimum": 1},
        "signal_file": {"type": "string"},
        "nw": {"type": "number", "exclusiveMinimum": 0},
        "tapers": {"type": "integer", "minimum": 1},
        "grid": {"type": "integer", "minimum": 1},
        "weighted": {"type": "boolean"},
        "save_decomposition": {"type": "boolean"},
        "tolerances": {
            "type": "object",
            "properties": {
                "abs_gap": {"type": "number", "exclusiveMinimum": 0},
                "abs_gap_per_n": {"type": "number", "exclusiveMinimum": 0},
            },
            "additionalProperties": False,
        },
        "seed": {"type": "integer", "minimum": 0},
        "out": {"type": "string"},
    },
    "additionalProperties": False,
}


class UsageError(ProlateError, ValueError):
    pass


@dataclass
class StudyRow:
    N: int
    metric: str
    lhs: float
    rhs: float

    @property
    def abs_gap(self):
        return abs(self.lhs - self.rhs)


def validate_config(config):
    try:
        jsonschema.validate(config, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise UsageError(f"config field {path}: {exc.message}") from exc
    sizes = config.get("sizes")
    if sizes is not None and any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise UsageError("config field sizes: must be strictly increasing")
    return config


# -- builders -------------------------------------------------------------------

def _default_grid(n):
    return max(1 << 14, 1 << math.ceil(math.log2(8 * n)))


def symbol_from_config(spec, n):
    grid = spec.get("grid", _default_grid(n))
    kind = spec["kind"]
    if kind == "trig":
        if "coefficients" not in spec:
            raise UsageError("config field symbol/coefficients: required for a trig symbol")
        coeffs = {int(k): v for k, v in spec["coefficients"].items()}
        return SymbolGrid.from_coefficients(coeffs, grid)
    if kind == "indicator":
        if "W" not in spec:
            raise UsageError("config field symbol/W: required for an indicator symbol")
        return SymbolGrid.indicator(spec["W"], grid)
    if kind == "triangle":
        return SymbolGrid.from_function(lambda f: 1.0 - 2.0 * np.abs(f), grid, tag="triangle")
    if "values" not in spec:
        raise UsageError("config field symbol/values: required for a sampled symbol")
    return SymbolGrid.from_samples(np.asarray(spec["values"], dtype=float))


def operator_from_spec(spec, n=None):
    """Band-limiting operator from a group/window/band description.

    ``n`` overrides the window size (used by size sweeps).
    """
    spec = dict(spec)
    if n is not None:
        window = dict(spec["window"])
        window["sizes"] = [n] * len(window["sizes"])
        spec["window"] = window
        if spec.get("group") == GroupKind.CYCLIC.value and spec.get("N", 0) < n:
            spec["N"] = n
    group, window, band = spec_from_dict(spec)
    if group.kind is GroupKind.INT_LINE:
        return prolate_operator(window.sizes[0], band.widths[0])
    if group.kind is GroupKind.CYCLIC:
        return periodic_prolate_operator(group.modulus, window.sizes[0], band.count)
    return prolate_operator_2d(*window.sizes, *band.widths)


def operator_from_config(config, n=None):
    if "operator_file" in config:
        return load_operator(config["operator_file"])
    if "operator" in config:
        return operator_from_spec(config["operator"], n)
    n = n if n is not None else config.get("n")
    if "symbol" in config:
        if n is None:
            raise UsageError("config field n: required with a symbol")
        return toeplitz_from_symbol(symbol_from_config(config["symbol"], n), n)
    if "impulse" in config:
        if n is None:
            raise UsageError("config field n: required with an impulse response")
        return toeplitz_from_impulse(np.asarray(config["impulse"], dtype=float), n)
    raise UsageError("config needs one of operator, operator_file, symbol or impulse")


# -- tasks ----------------------------------------------------------------------

def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _eig_rows(vals):
    return [(i, float(v)) for i, v in enumerate(vals)]


def task_build(config, out):
    op = operator_from_config(config)
    save_operator(op, os.path.join(out, "operator.json"))
    return EXIT_OK


def task_eigs(config, out):
    op = operator_from_config(config)
    dec = spectral.eig_hermitian(op)
    write_csv(os.path.join(out, "eigs.csv"), ["index", "eigenvalue"], _eig_rows(dec.eigenvalues))
    if config.get("save_decomposition"):
        persist_decomposition(dec, os.path.join(out, "decomposition.json"))
    return EXIT_OK


def task_szego(config, out):
    if "symbol" not in config or "n" not in config:
        raise UsageError("szego needs symbol and n")
    n = config["n"]
    symbol = symbol_from_config(config["symbol"], n)
    dec = spectral.eig_hermitian(toeplitz_from_symbol(symbol, n))
    report = spectral.szego_report(dec, symbol, config.get("thetas", ["identity", "square"]))
    _write_json(
        os.path.join(out, "szego.json"),
        {"n": n, "rows": [r.to_dict() for r in report.szego_rows], "cdf_distance": report.cdf_distance},
    )
    return _check_rows(config, [StudyRow(n, r.theta, r.matrix_mean, r.symbol_integral) for r in report.szego_rows])


def task_dof(config, out):
    op = operator_from_config(config)
    d = approx.n_widths(spectral.eig_hermitian(op))
    write_csv(os.path.join(out, "dof.csv"), ["n", "d_n"], [(i, float(v)) for i, v in enumerate(d)])
    return EXIT_OK


def task_approx(config, out):
    theorem = config.get("theorem")
    if theorem is None:
        raise UsageError("approx needs theorem")
    p = dict(config.get("params", {}))
    try:
        N, W = int(p["N"]), float(p["W"])
    except KeyError as exc:
        raise UsageError(f"config field params/{exc.args[0]}: required") from exc
    tol = config.get("tolerances", {}).get("abs_gap")
    if theorem in ("2", "3"):
        n = int(p.get("n", math.ceil(2 * N * W)))
        op = prolate_operator(N, W)
        dec = spectral.eig_hermitian(op) if theorem == "2" else spectral.dpss_basis(N, W, method="tridiagonal")
        rhs = approx.random_residual(dec, n, N, op.band.measure)
        if theorem == "2":
            basis = approx.SlepianBasis.from_decomposition(dec, n, op)
            lhs = approx.character_approx_mse(basis, op.band)
            ok = abs(lhs - rhs) <= (tol if tol is not None else 1e-6)
        else:
            seed = config.get("seed", approx.DEFAULT_SEED)
            lhs, stderr, _ = approx.random_residual_mc(dec, n, op.band, int(p.get("draws", 100_000)), seed)
            p.update(seed=seed, stderr=stderr)
            ok = abs(lhs - rhs) <= (tol if tol is not None else 3 * stderr)
        p["n"] = n
        result = {"theorem": theorem, "params": p, "lhs": lhs, "rhs": rhs, "gap": abs(lhs - rhs)}
    else:
        eps = float(p.get("eps", config.get("eps", 0.01)))
        res = approx.uniform_sinusoid_K(N, W, eps)
        bound = 2 * N * W + 3 * math.log(N) * math.log(1 / eps**2)
        lower = math.ceil(round(2 * N * W, 9))
        p.update(eps=eps, lower=lower, max_residual=res.max_residual, saturated=res.saturated)
        result = {"theorem": "4", "params": p, "lhs": res.K, "rhs": bound, "gap": bound - res.K}
        ok = lower <= res.K <= bound
    _write_json(os.path.join(out, "approx.json"), result)
    if not ok:
        log.error("approximation check failed: %s", result)
        return EXIT_NUMERIC
    return EXIT_OK


def task_solve(config, out):
    if "rhs_file" not in config:
        raise UsageError("solve needs --rhs")
    op = operator_from_config(config)
    y = read_vector_csv(config["rhs_file"])
    dec = spectral.eig_hermitian(op)
    report = fastapply.truncated_pinv_solve(dec, y, config.get("rank"), op=op)
    _write_json(os.path.join(out, "solve.json"), report.to_dict())
    return EXIT_OK


def task_multitaper(config, out):
    for key in ("signal_file", "nw", "tapers"):
        if key not in config:
            raise UsageError(f"multitaper needs {key}")
    x = read_vector_csv(config["signal_file"])
    N = x.size
    W = config["nw"] / N
    grid = config.get("grid", N)
    psd = fastapply.multitaper_psd(x, W, config["tapers"], grid, weighted=config.get("weighted", False))
    write_csv(
        os.path.join(out, "multitaper.csv"), ["f", "psd"], [(m / grid, float(v)) for m, v in enumerate(psd)]
    )
    return EXIT_OK


def task_estimate(config, out):
    if "symbol" not in config or "n" not in config:
        raise UsageError("estimate needs symbol and n")
    n = config["n"]
    symbol = symbol_from_config(config["symbol"], n)
    op = toeplitz_from_symbol(symbol, n)
    lam = spectral.eig_hermitian(op).eigenvalues
    samp = spectral.estimate_eigs_symbol_sampling(symbol, n)
    circ = spectral.estimate_eigs_circulant(op)
    write_csv(
        os.path.join(out, "estimate.csv"),
        ["index", "eigenvalue", "symbol_sampling", "circulant"],
        [(i, float(a), float(b), float(c)) for i, (a, b, c) in enumerate(zip(lam, samp, circ))],
    )
    _write_json(
        os.path.join(out, "estimate.json"),
        {
            "n": n,
            "max_error_symbol_sampling": float(np.max(np.abs(lam - samp))),
            "max_error_circulant": float(np.max(np.abs(lam - circ))),
            "max_diff_estimators": float(np.max(np.abs(samp - circ))),
        },
    )
    return EXIT_OK


def study_rows(config):
    metric = config.get("metric")
    sizes = config.get("sizes")
    if metric is None or sizes is None:
        raise UsageError("study needs metric and sizes")
    rows = []
    for N in sizes:
        if metric in ("trace", "sum_squares"):
            op = operator_from_config(config, N)
            lam = spectral.eig_hermitian(op).eigenvalues
            area = op.n * op.band.measure if op.band is not None else op.trace()
            lhs = float(np.sum(lam)) if metric == "trace" else float(np.sum(lam**2))
            rows.append(StudyRow(N, metric, lhs, area))
        elif metric in ("szego", "szego_cdf"):
            symbol = symbol_from_config(config["symbol"], max(sizes))
            dec = spectral.eig_hermitian(toeplitz_from_symbol(symbol, N))
            thetas = config.get("thetas", ["identity"])
            rep = spectral.szego_report(dec, symbol, thetas)
            if metric == "szego_cdf":
                rows.append(StudyRow(N, "cdf_distance", rep.cdf_distance, 0.0))
            else:
                rows.extend(StudyRow(N, r.theta, r.matrix_mean, r.symbol_integral) for r in rep.szego_rows)
        elif metric == "dof":
            if "pulse" not in config or "eps" not in config:
                raise UsageError("dof study needs pulse and eps")
            pulse = symbol_from_config(config["pulse"], max(sizes))
            st = approx.dof_convergence_study(pulse, config["eps"], [N])
            rows.append(StudyRow(N, "dof_ratio", st.rows[0][2], st.limit))
        else:
            symbol = symbol_from_config(config["symbol"], max(sizes))
            op = toeplitz_from_symbol(symbol, N)
            lam = spectral.eig_hermitian(op).eigenvalues
            if metric == "estimator_sampling":
                est = spectral.estimate_eigs_symbol_sampling(symbol, N)
            else:
                est = spectral.estimate_eigs_circulant(op)
            rows.append(StudyRow(N, metric, float(np.max(np.abs(lam - est))), 0.0))
    return rows


def _check_rows(config, rows):
    tol = config.get("tolerances", {})
    bad = []
    for r in rows:
        limit = None
        if "abs_gap" in tol:
            limit = tol["abs_gap"]
        if "abs_gap_per_n" in tol:
            limit = tol["abs_gap_per_n"] * r.N
        if limit is not None and not r.abs_gap <= limit:
            bad.append((r, limit))
    for r, limit in bad:
        log.error("tolerance violated: N=%d %s abs_gap=%s > %s", r.N, r.metric, format_float(r.abs_gap), format_float(limit))
    return EXIT_NUMERIC if bad else EXIT_OK


def task_study(config, out):
    rows = study_rows(config)
    write_csv(
        os.path.join(out, "study.csv"),
        ["N", "metric", "lhs", "rhs", "abs_gap"],
        [(r.N, r.metric, r.lhs, r.rhs, r.abs_gap) for r in rows],
    )
    return _check_rows(config, rows)


_TASKS = {
    "build": task_build,
    "eigs": task_eigs,
    "szego": task_szego,
    "dof": task_dof,
    "approx": task_approx,
    "solve": task_solve,
    "multitaper": task_multitaper,
    "estimate": task_estimate,
    "study": task_study,
}


def run_config(config, out=None):
    """Validate ``config``, run its task and write artifacts to ``out``.

    Returns the process exit code.
    """
    try:
        validate_config(config)
        out = out or config.get("out", ".")
        os.makedirs(out, exist_ok=True)
        return _TASKS[config["task"]](config, out)
    except ParseError as exc:
        log.error("%s", exc)
        return EXIT_IO
    except NumericError as exc:
        log.error("%s", exc)
        return EXIT_NUMERIC
    except ProlateError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_IO


# -- argument parsing -------------------------------------------------------------

def _coeffs(text):
    out = {}
    for item in text.split(","):
        k, _, v = item.partition(":")
        out[str(int(k))] = float(v)
    return out


def _sizes(text):
    return [int(s) for s in text.split(",")]


def build_parser():
    parser = argparse.ArgumentParser(prog="prolate", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="task", required=True)
    for task in TASKS:
        p = sub.add_parser(task)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", help="output directory")
        p.add_argument("--operator", dest="operator_file", help="operator JSON file")
        p.add_argument("--N", type=int, help="window length (prolate) or modulus (periodic)")
        p.add_argument("--W", type=float, help="half-bandwidth of a symmetric band")
        p.add_argument("--M", type=int, help="window length for a periodic operator")
        p.add_argument("--K", type=int, help="DFT band size for a periodic operator")
        p.add_argument("--n", type=int, help="matrix size for symbol-generated operators")
        p.add_argument("--symbol-coeffs", help="trigonometric symbol as lag:value,... e.g. 0:2,1:0.5,-1:0.5")
        p.add_argument("--symbol-indicator", type=float, metavar="W", help="indicator symbol of [-W, W]")
        p.add_argument("--seed", type=int)
        if task == "eigs":
            p.add_argument("--save-decomposition", action="store_true", default=None)
        if task == "szego":
            p.add_argument("--thetas", type=lambda s: s.split(","))
        if task == "approx":
            p.add_argument("--theorem", choices=["2", "3", "4"])
            p.add_argument("--rank-n", dest="approx_n", type=int, help="subspace dimension n")
            p.add_argument("--eps", type=float)
            p.add_argument("--draws", type=int)
        if task == "solve":
            p.add_argument("--rhs", dest="rhs_file")
            p.add_argument("--rank", type=int)
        if task == "multitaper":
            p.add_argument("--signal", dest="signal_file")
            p.add_argument("--nw", type=float)
            p.add_argument("--tapers", type=int)
            p.add_argument("--grid", type=int)
            p.add_argument("--weighted", action="store_true", default=None)
        if task == "study":
            p.add_argument("--metric", choices=METRICS)
            p.add_argument("--sizes", type=_sizes)
            p.add_argument("--eps", type=float)
    return parser


def config_from_args(args):
    config = {}
    if args.config:
        config = _load_json(args.config)
        if not isinstance(config, dict):
            raise UsageError(f"{args.config}: config must be a JSON object")
    config["task"] = args.task
    simple = (
        "out", "operator_file", "seed", "save_decomposition", "thetas", "theorem", "rhs_file",
        "rank", "signal_file", "nw", "tapers", "grid", "weighted", "metric", "sizes", "n",
    )
    for key in simple:
        value = getattr(args, key, None)
        if value is not None:
            config[key] = value
    if args.N is not None:
        if args.M is not None or args.K is not None:
            M = args.M if args.M is not None else args.N
            config["operator"] = {
                "group": "CyclicN", "N": args.N,
                "window": {"kind": "IndexBlock", "sizes": [M]},
                "band": {"kind": "IndexBlock", "K": args.K if args.K is not None else args.N},
            }
        elif args.W is not None and args.task != "approx":
            config["operator"] = {
                "group": "IntLine",
                "window": {"kind": "IndexBlock", "sizes": [args.N]},
                "band": {"kind": "SymmetricBand", "W": [args.W]},
            }
    if args.symbol_coeffs:
        config["symbol"] = {"kind": "trig", "coefficients": _coeffs(args.symbol_coeffs)}
    if args.symbol_indicator is not None:
        config["symbol"] = {"kind": "indicator", "W": args.symbol_indicator}
    if args.task == "approx":
        params = dict(config.get("params", {}))
        for key, value in (("N", args.N), ("W", args.W), ("n", args.approx_n), ("eps", args.eps), ("draws", args.draws)):
            if value is not None:
                params[key] = value
        config["params"] = params
    elif args.task == "study" and args.eps is not None:
        config["eps"] = args.eps
    if args.task == "study" and args.W is not None and "operator" not in config and args.N is None:
        config["operator"] = {
            "group": "IntLine",
            "window": {"kind": "IndexBlock", "sizes": [1]},
            "band": {"kind": "SymmetricBand", "W": [args.W]},
        }
    return config


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="prolate: %(message)s")
    try:
        config = config_from_args(args)
    except ParseError as exc:
        log.error("%s", exc)
        return EXIT_IO
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_IO
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    return run_config(config)


if __name__ == "__main__":
    sys.exit(main())
