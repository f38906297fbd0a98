"""Command line front end.

    roughspline study run CONFIG [--csv P] [--json P] [--svg P] [--check] [--seed N] [--no-timing]
    roughspline study predict --d D --m M [--mu MU] --k K
    roughspline nodes analyze POINTS_CSV [--lower ... --upper ... | --center ... --radius R]
    roughspline interp eval INTERP_JSON POINTS_CSV
    roughspline surrogate demo CONFIG [--csv P]

Exit codes: 0 success, 2 configuration/input error, 3 numerical failure
(every level failed), 4 ``--check`` failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import report as rpt
from .errors import AllLevelsFailed, RoughSplineError
from .interpolator import Interpolant
from .kernels import make_kernel, predicted_rate
from .pointsets import (Domain, PointSet, fill_distance, is_unisolvent,
                        separation_radius)
from .study import RATE_SLACK, config_from_dict, fit_rate, run_study
from .surrogate import seminorm_scaling_probe
from .targets import target_from_dict

SCHEMA_VERSION = 1
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_CHECK = 0, 2, 3, 4
DEFAULT_RESOLUTION = 257

_NUM = {"type": "number"}
_VEC = {"type": "array", "items": _NUM, "minItems": 1}
_DOMAIN = {
    "type": "object",
    "properties": {"kind": {"enum": ["box", "ball"]}, "lower": _VEC, "upper": _VEC,
                   "center": _VEC, "radius": {"type": "number", "exclusiveMinimum": 0}},
    "required": ["kind"],
    "additionalProperties": False,
}
_TARGET = {"type": "object", "properties": {"family": {"type": "string"}}, "required": ["family"]}
_OUTPUTS = {
    "type": "object",
    "properties": {"csv": {"type": "string"}, "json": {"type": "string"}, "svg": {"type": "string"}},
    "additionalProperties": False,
}

STUDY_SCHEMA = {
    "type": "object",
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "kernel": {
            "type": "object",
            "properties": {"d": {"type": "integer", "minimum": 1}, "m": {"type": "integer", "minimum": 1},
                           "mu": _NUM, "poly_degree": {"type": ["integer", "null"], "minimum": 0}},
            "required": ["d", "m"],
            "additionalProperties": False,
        },
        "target": _TARGET,
        "rough_order": {"type": "integer", "minimum": 1},
        "domain": _DOMAIN,
        "levels": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "generator": {
            "type": "object",
            "properties": {"kind": {"enum": ["jittered_grid", "halton"]},
                           "jitter": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
                           "seed": {"type": "integer"}},
            "additionalProperties": False,
        },
        "mesh_ratio_bound": {"type": "number", "minimum": 1},
        "quad_panels": {"type": ["integer", "null"], "minimum": 1},
        "fit_window": {"type": ["array", "null"], "items": {"type": "integer", "minimum": 0},
                       "minItems": 2, "maxItems": 2},
        "condition_cap": {"type": "number", "exclusiveMinimum": 0},
        "fill_resolution": {"type": ["integer", "null"], "minimum": 2},
        "outputs": _OUTPUTS,
        "mode": {
            "type": "object",
            "properties": {"check": {"type": "boolean"}, "timing": {"type": "boolean"}},
            "additionalProperties": False,
        },
    },
    "required": ["schema_version", "kernel", "target", "rough_order", "domain", "levels"],
    "additionalProperties": False,
}

SURROGATE_SCHEMA = {
    "type": "object",
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "d": {"type": "integer", "minimum": 1},
        "target": _TARGET,
        "k": {"type": "integer", "minimum": 1},
        "m": {"type": "integer", "minimum": 1},
        "q_list": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1},
        "panels": {"type": ["integer", "null"], "minimum": 1},
        "outputs": _OUTPUTS,
    },
    "required": ["schema_version", "target", "k", "m", "q_list"],
    "additionalProperties": False,
}


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_CONFIG):
        super().__init__(message)
        self.code = code


def _load_config(path: str, schema: dict) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise CliError(f"config {path} is not valid JSON: {exc}") from None
    validator = jsonschema.Draft7Validator(schema)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        lines = []
        for err in errors:
            where = "/".join(str(p) for p in err.absolute_path) or "<root>"
            if err.validator == "const" and err.absolute_path and err.absolute_path[-1] == "schema_version":
                lines.append(f"schema_version: expected {SCHEMA_VERSION}, got {err.instance!r}")
            else:
                lines.append(f"{where}: {err.message}")
        raise CliError("invalid config:\n  " + "\n  ".join(lines))
    return data


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text)


def cmd_study_run(args) -> int:
    data = _load_config(args.config, STUDY_SCHEMA)
    outputs = dict(data.pop("outputs", {}))
    mode = dict(data.pop("mode", {}))
    data.pop("schema_version")
    if args.seed is not None:
        data.setdefault("generator", {"kind": "jittered_grid"})
        data["generator"]["seed"] = args.seed
    check = args.check or mode.get("check", False)
    timing = mode.get("timing", True) and not args.no_timing
    try:
        config = config_from_dict(data)
    except RoughSplineError as exc:
        raise CliError(f"invalid config: {exc}") from None
    try:
        report = run_study(config, record_timing=timing)
    except AllLevelsFailed as exc:
        raise CliError(f"all levels failed: {exc}", EXIT_NUMERIC) from None

    csv_path = args.csv or outputs.get("csv")
    json_path = args.json or outputs.get("json")
    svg_path = args.svg or outputs.get("svg")
    csv_text = rpt.study_csv(report)
    _write(csv_path, csv_text)
    _write(json_path, rpt.study_json(report))
    _write(svg_path, rpt.study_svg(report))
    if not csv_path:
        sys.stdout.write(csv_text)
    slope = "n/a" if report.fitted_slope is None else f"{report.fitted_slope:.4f}"
    print(f"fitted slope {slope}, predicted rate {report.predicted_rate:.4f}", file=sys.stderr)
    if check and not report.passed:
        print(f"check failed: fitted slope {slope} < predicted {report.predicted_rate:.4f} - {RATE_SLACK}",
              file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


def cmd_study_predict(args) -> int:
    try:
        kernel = make_kernel(args.d, args.m, args.mu)
        rate = predicted_rate(kernel, args.k)
    except RoughSplineError as exc:
        raise CliError(str(exc)) from None
    print(json.dumps({"d": kernel.d, "m": kernel.m, "mu": kernel.mu, "k": args.k, "beta": kernel.beta,
                      "log_branch": kernel.log_branch, "lambda": kernel.lam,
                      "poly_degree": kernel.poly_degree, "predicted_rate": rate}))
    return EXIT_OK


def _domain_from_flags(args, dim: int) -> Domain | None:
    try:
        if args.center is not None or args.radius is not None:
            if args.center is None or args.radius is None:
                raise CliError("--center and --radius must be given together")
            return Domain.ball(args.center, args.radius)
        if args.lower is not None or args.upper is not None:
            if args.lower is None or args.upper is None:
                raise CliError("--lower and --upper must be given together")
            return Domain.box(args.lower, args.upper)
    except RoughSplineError as exc:
        raise CliError(f"bad domain: {exc}") from None
    return None


def _read_points(path: str, domain_args=None) -> PointSet:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from None
    try:
        header = next(csv.reader(io.StringIO(text)), [])
        domain = _domain_from_flags(domain_args, len(header)) if domain_args is not None else None
        return PointSet.from_csv(text, domain)
    except RoughSplineError as exc:
        raise CliError(f"malformed points CSV {path}: {exc}") from None


def analyze_points(ps: PointSet, resolution: int = DEFAULT_RESOLUTION) -> dict:
    h = fill_distance(ps, resolution)
    out = {"n": len(ps), "d": ps.dim, "h": h, "q": None, "mesh_ratio": None}
    if len(ps) >= 2:
        q = separation_radius(ps)
        out["q"], out["mesh_ratio"] = q, h / q
    out["unisolvent"] = {str(deg): is_unisolvent(ps, deg) for deg in range(4)}
    return out


def cmd_nodes_analyze(args) -> int:
    ps = _read_points(args.points, args)
    if len(ps) == 0:
        raise CliError("points CSV has no rows")
    result = analyze_points(ps, args.resolution)
    if result["q"] is None:
        print("warning: separation is undefined for a single point; q reported as null", file=sys.stderr)
    print(json.dumps(result))
    return EXIT_OK


def cmd_interp_eval(args) -> int:
    try:
        interp = Interpolant.from_json(Path(args.interpolant).read_text())
    except (OSError, ValueError, KeyError, RoughSplineError) as exc:
        raise CliError(f"cannot load interpolant {args.interpolant}: {exc}") from None
    text = Path(args.points).read_text() if args.points != "-" else sys.stdin.read()
    rows = list(csv.reader(io.StringIO(text)))
    try:
        pts = np.array([[float(v) for v in r] for r in rows[1:] if r], dtype=float).reshape(-1, interp.kernel.d)
    except ValueError as exc:
        raise CliError(f"malformed points CSV: {exc}") from None
    vals = interp.evaluate(pts) if len(pts) else np.empty(0)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow([f"x{i + 1}" for i in range(interp.kernel.d)] + ["value"])
    for p, v in zip(pts, np.atleast_1d(vals)):
        writer.writerow([rpt.fmt(x) for x in p] + [rpt.fmt(v)])
    return EXIT_OK


def cmd_surrogate_demo(args) -> int:
    data = _load_config(args.config, SURROGATE_SCHEMA)
    try:
        f = target_from_dict(data["target"])
    except RoughSplineError as exc:
        raise CliError(f"invalid target: {exc}") from None
    if data.get("d", f.d) != 1 or f.d != 1:
        raise CliError("surrogate demo is d=1 only")
    k, m = data["k"], data["m"]
    try:
        pairs = seminorm_scaling_probe(f, k, m, data["q_list"], panels=data.get("panels"))
    except RoughSplineError as exc:
        raise CliError(f"invalid probe parameters: {exc}") from None
    qs = [q for q, _ in pairs]
    vals = [v for _, v in pairs]
    slope = None
    if len(pairs) >= 2:
        try:
            slope = fit_rate(qs, vals).slope
        except RoughSplineError:
            slope = None
    ref_scale = vals[0] / qs[0] ** (k - m) if vals[0] > 0 else 1.0
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["q", "seminorm_m", "reference", "fitted_slope", "reference_slope"])
    for q, v in pairs:
        writer.writerow([rpt.fmt(q), rpt.fmt(v), rpt.fmt(ref_scale * q ** (k - m)),
                         "" if slope is None else rpt.fmt(slope), rpt.fmt(float(k - m))])
    csv_path = args.csv or data.get("outputs", {}).get("csv")
    _write(csv_path, buf.getvalue())
    if not csv_path:
        sys.stdout.write(buf.getvalue())
    print(json.dumps({"fitted_slope": slope, "reference_slope": k - m,
                      "max_seminorm": max(vals)}), file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="roughspline", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="group", required=True)

    study = sub.add_parser("study").add_subparsers(dest="command", required=True)
    run = study.add_parser("run", help="run a refinement study from a JSON config")
    run.add_argument("config")
    run.add_argument("--csv")
    run.add_argument("--json")
    run.add_argument("--svg")
    run.add_argument("--check", action="store_true", help="exit 4 if the fitted slope misses the prediction")
    run.add_argument("--seed", type=int)
    run.add_argument("--no-timing", action="store_true", help="write wall_ms as 0 for reproducible output")
    run.set_defaults(func=cmd_study_run)

    pred = study.add_parser("predict", help="print the predicted L2 rate for a kernel and rough order")
    pred.add_argument("--d", type=int, required=True)
    pred.add_argument("--m", type=int, required=True)
    pred.add_argument("--mu", type=float, default=0.0)
    pred.add_argument("--k", type=int, required=True)
    pred.add_argument("--seed", type=int)
    pred.set_defaults(func=cmd_study_predict)

    nodes = sub.add_parser("nodes").add_subparsers(dest="command", required=True)
    an = nodes.add_parser("analyze", help="fill distance, separation, mesh ratio, unisolvency")
    an.add_argument("points")
    an.add_argument("--lower", type=float, nargs="+")
    an.add_argument("--upper", type=float, nargs="+")
    an.add_argument("--center", type=float, nargs="+")
    an.add_argument("--radius", type=float)
    an.add_argument("--resolution", type=int, default=DEFAULT_RESOLUTION)
    an.add_argument("--seed", type=int)
    an.set_defaults(func=cmd_nodes_analyze)

    interp = sub.add_parser("interp").add_subparsers(dest="command", required=True)
    ev = interp.add_parser("eval", help="evaluate a serialized interpolant at CSV points")
    ev.add_argument("interpolant")
    ev.add_argument("points")
    ev.add_argument("--seed", type=int)
    ev.set_defaults(func=cmd_interp_eval)

    sur = sub.add_parser("surrogate").add_subparsers(dest="command", required=True)
    demo = sur.add_parser("demo", help="seminorm growth of the node-preserving surrogate")
    demo.add_argument("config")
    demo.add_argument("--csv")
    demo.add_argument("--seed", type=int)
    demo.set_defaults(func=cmd_surrogate_demo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except RoughSplineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
