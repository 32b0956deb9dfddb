"""Command-line harness: job configs, grid sweeps, machine-readable reports.

A job is a JSON document selecting an algebra, a coordinate model, a
chart (catalog entry or raw component expressions), a box domain with a
grid resolution, the Laplacian methods to evaluate and the checks to
run.  Reports echo the config, carry one row per grid point and method,
and end with a summary block whose check verdicts drive the exit code:
0 when every requested check passes, 1 on a check failure, 2 on a
configuration or parse error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

import numpy as np

from .algebra import (
    NilpotentAlgebra,
    algebra_from_json,
    heisenberg,
    is_heisenberg_type,
    validate,
)
from .expressions import ParseError
from .fd import FDParams
from .laplacian import (
    CLOSED_FORMS,
    central_h_variation,
    gauss_codazzi_residuals,
    harmonicity_cmc_residuals,
    jacobi_residuals,
    laplacian_numeric,
)
from .models import CoordinateModel, exp_model, nil_polarized_model
from .surfaces import (
    SurfaceChart,
    adapted_frame,
    cylinder_chart,
    expression_chart,
    foliation_leaf_chart,
    gauss_map,
    graph_chart,
    mean_curvature_derivatives,
    random_graph_chart,
    shape_data,
    vertical_plane_chart,
)

METHOD_NAMES = ("general", "h_type", "heisenberg", "numeric_oracle")
CHECK_NAMES = ("harmonicity", "prop3", "corollary1", "jacobi", "gauss_codazzi")

DEFAULT_TOLERANCES = {
    "harmonicity": 1e-3,
    "prop3": 1e-6,
    "corollary1": 5e-4,
    "jacobi": 5e-4,
    "gauss_codazzi": 5e-4,
    "oracle_gap": 5e-4,
    "cmc": 1e-6,
}


class ConfigError(ValueError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass
class JobConfig:
    algebra: NilpotentAlgebra
    model: CoordinateModel
    chart: SurfaceChart
    grid: list[int]
    methods: list[str]
    checks: list[str]
    tolerances: dict[str, float]
    fd: FDParams
    seed: int
    point: list[float] | None
    jacobi_direction: list[float] | None
    raw: dict


def _build_algebra(spec, problems) -> NilpotentAlgebra | None:
    if spec is None:
        problems.append("missing algebra specification")
        return None
    if isinstance(spec, dict) and "builtin" in spec:
        if spec["builtin"] != "heisenberg":
            problems.append(f"unknown builtin algebra {spec['builtin']!r}")
            return None
        try:
            return heisenberg(int(spec.get("m", 1)))
        except (ValueError, TypeError) as exc:
            problems.append(f"bad heisenberg parameter: {exc}")
            return None
    if isinstance(spec, dict):
        try:
            return algebra_from_json(spec)
        except ValueError as exc:
            problems.append(str(exc))
            return None
    problems.append("algebra must be an object")
    return None


def _build_model(name, alg, problems) -> CoordinateModel | None:
    if name == "exp":
        return exp_model(alg) if alg is not None else None
    if name == "nil_polarized":
        model = nil_polarized_model()
        if alg is not None and (
            alg.dim_total != 3 or np.abs(alg.bracket_tensor - model.algebra.bracket_tensor).max() > 0
        ):
            problems.append("nil_polarized model requires the 3-dimensional Heisenberg algebra")
            return None
        return model
    problems.append(f"unknown model {name!r} (expected 'exp' or 'nil_polarized')")
    return None


def _build_chart(spec, model, orientation, domain, seed, problems) -> SurfaceChart | None:
    if model is None or spec is None:
        if spec is None:
            problems.append("missing chart specification")
        return None
    try:
        if "components" in spec:
            if domain is None:
                problems.append("expression charts need a domain")
                return None
            return expression_chart(model, spec["components"], domain, orientation)
        name = spec.get("catalog")
        params = spec.get("params", {})
        if name == "nil_foliation_leaf":
            kwargs = {}
            if "z0" in params:
                kwargs["z_level"] = float(params["z0"])
            if domain is not None:
                kwargs["x_range"], kwargs["y_range"] = domain
            return foliation_leaf_chart(**kwargs)
        if name == "nil_vertical_plane":
            if domain is not None:
                return vertical_plane_chart(*domain)
            return vertical_plane_chart()
        if name == "nil_cylinder":
            kwargs = {"f1": params["f1"], "f2": params["f2"]}
            if domain is not None:
                kwargs["s_range"], kwargs["t_range"] = domain
            kwargs["orientation"] = orientation
            return cylinder_chart(**kwargs)
        if name == "graph":
            if domain is None:
                problems.append("graph charts need a domain")
                return None
            return graph_chart(model, params["expr"], domain, orientation)
        if name == "random_graph":
            rng = np.random.default_rng(int(seed) + int(params.get("index", 0)))
            return random_graph_chart(model, rng, terms=int(params.get("terms", 3)))
        problems.append(f"unknown chart catalog entry {name!r}")
        return None
    except (KeyError, ValueError, ParseError) as exc:
        problems.append(f"bad chart specification: {exc}")
        return None


def load_config(doc: dict) -> JobConfig:
    """Validate a config document, collecting every problem before failing."""
    problems: list[str] = []
    if not isinstance(doc, dict):
        raise ConfigError(["config must be a JSON object"])

    alg = _build_algebra(doc.get("algebra"), problems)
    model = _build_model(doc.get("model", "exp"), alg, problems)
    orientation = int(doc.get("orientation", 1))
    if orientation not in (1, -1):
        problems.append("orientation must be +1 or -1")
        orientation = 1
    domain = doc.get("domain")
    chart = _build_chart(doc.get("chart"), model, orientation, domain, doc.get("seed", 0), problems)

    methods = list(doc.get("methods", []))
    if not methods:
        problems.append("no methods requested")
    for mth in methods:
        if mth not in METHOD_NAMES:
            problems.append(f"unknown method {mth!r}")
    checks = list(doc.get("checks", []))
    for chk in checks:
        if chk not in CHECK_NAMES:
            problems.append(f"unknown check {chk!r}")

    grid = [int(g) for g in doc.get("grid", [])]
    if chart is not None:
        if not grid:
            grid = [3] * chart.param_dim
        if len(grid) != chart.param_dim:
            problems.append(f"grid needs {chart.param_dim} axis resolutions")
        elif any(g < 2 for g in grid):
            problems.append("grid resolution must be at least 2 per axis")

    tolerances = dict(DEFAULT_TOLERANCES)
    for key, val in doc.get("tolerances", {}).items():
        tolerances[key] = float(val)

    fd_doc = doc.get("fd", {})
    fdp = FDParams(step=float(fd_doc.get("step", 1e-4)), levels=int(fd_doc.get("levels", 2)))

    point = doc.get("point")
    if point is not None:
        point = [float(x) for x in point]

    direction = doc.get("jacobi_direction")
    if direction is not None:
        direction = [float(x) for x in direction]

    if alg is not None and chart is not None:
        is_heis = (
            alg.dim_center == 1 and alg.dim_v % 2 == 0 and is_heisenberg_type(alg, 1e-9)
        )
        if "heisenberg" in methods and not is_heis:
            problems.append("method 'heisenberg' requires a Heisenberg algebra")
        if "h_type" in methods and not is_heisenberg_type(alg, 1e-9):
            problems.append("method 'h_type' requires a Heisenberg-type algebra")
        if "prop3" in checks and not is_heis:
            problems.append("check 'prop3' requires a Heisenberg algebra")
        if "gauss_codazzi" in checks and alg.dim_total != 3:
            problems.append("check 'gauss_codazzi' requires a 3-dimensional model")
        report = validate(alg)
        if not report.ok:
            problems.append("algebra axioms violated: " + ", ".join(report.names()))

    if problems:
        raise ConfigError(problems)
    return JobConfig(
        algebra=alg,
        model=model,
        chart=chart,
        grid=grid,
        methods=methods,
        checks=checks,
        tolerances=tolerances,
        fd=fdp,
        seed=int(doc.get("seed", 0)),
        point=point,
        jacobi_direction=direction,
        raw=doc,
    )


def grid_points(chart: SurfaceChart, grid, fd: FDParams, point=None) -> list[np.ndarray]:
    if point is not None:
        return [np.asarray(point, dtype=float)]
    margin = 4.0 * fd.step
    axes = [
        np.linspace(lo + margin, hi - margin, res)
        for (lo, hi), res in zip(chart.domain, grid)
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    return [np.array(pt) for pt in zip(*(m.ravel() for m in mesh))]


def run(config: JobConfig) -> dict:
    """Evaluate all requested methods and checks; deterministic output."""
    chart = config.chart
    alg = config.algebra
    fdp = config.fd
    tols = config.tolerances
    points = grid_points(chart, config.grid, fdp, config.point)

    rows = []
    closed_methods = [m for m in config.methods if m != "numeric_oracle"]
    preferred = closed_methods[0] if closed_methods else None
    defects = []
    gaps = []
    per_point = []
    for u in points:
        frame = adapted_frame(alg, gauss_map(chart, u))
        shape = shape_data(chart, u, frame)
        dh = mean_curvature_derivatives(chart, u, frame, fdp)
        reports = {}
        for mth in config.methods:
            if mth == "numeric_oracle":
                rep = laplacian_numeric(chart, u, fdp, frame=frame)
            else:
                rep = CLOSED_FORMS[mth](alg, frame, shape, dh)
            reports[mth] = rep
            rows.append(
                {
                    "point": [float(x) for x in u],
                    "method": mth,
                    "coeffs": [float(c) for c in rep.coeffs],
                    "tangential_norm": rep.tangential_norm,
                    "normal_coeff": rep.normal_coeff,
                    "h": shape.h,
                    "norm_b2": shape.norm_b2,
                }
            )
        per_point.append((u, frame, shape, reports))
        if preferred:
            defects.append(reports[preferred].tangential_norm)
        if preferred and "numeric_oracle" in reports:
            gaps.append(
                float(
                    np.abs(
                        reports[preferred].coeffs - reports["numeric_oracle"].coeffs
                    ).max()
                )
            )

    checks: dict[str, dict] = {}
    if "harmonicity" in config.checks:
        source = preferred or config.methods[0]
        worst = max(
            (reports[source].tangential_norm for _, _, _, reports in per_point),
            default=0.0,
        )
        verdict = worst < tols["harmonicity"]
        checks["harmonicity"] = {
            "pass": bool(verdict),
            "max_defect": worst,
            "tol": tols["harmonicity"],
        }
    if "prop3" in config.checks:
        worst = 0.0
        for _, frame, shape, _ in per_point:
            worst = max(worst, max(harmonicity_cmc_residuals(shape, frame)))
        checks["prop3"] = {
            "pass": bool(worst < tols["prop3"]),
            "max_residual": worst,
            "tol": tols["prop3"],
        }
    if "corollary1" in config.checks:
        rep = central_h_variation(chart, points, fdp, tol=tols["harmonicity"])
        checks["corollary1"] = {
            "pass": bool(rep.skipped or rep.max_variation < tols["corollary1"]),
            "skipped": rep.skipped,
            "max_variation": rep.max_variation,
            "tol": tols["corollary1"],
        }
    if "jacobi" in config.checks:
        direction = config.jacobi_direction
        if direction is None:
            mean_g = np.mean([gauss_map(chart, u) for u in points], axis=0)
            direction = mean_g / np.linalg.norm(mean_g)
        rep = jacobi_residuals(chart, points, direction, fdp, tol=tols["harmonicity"])
        checks["jacobi"] = {
            "pass": bool(rep.max_residual < tols["jacobi"]),
            "max_residual": rep.max_residual,
            "min_w": rep.min_w,
            "direction": [float(x) for x in np.asarray(direction, dtype=float)],
            "tol": tols["jacobi"],
        }
    if "gauss_codazzi" in config.checks:
        worst = 0.0
        identity_worst = 0.0
        evaluated = 0
        for u in points:
            res = gauss_codazzi_residuals(chart, u, fdp)
            if res.skipped:
                continue
            evaluated += 1
            worst = max(worst, res.codazzi_residual, res.gauss_residual)
            identity_worst = max(
                identity_worst, abs(res.curvature_term - res.ab_product)
            )
        checks["gauss_codazzi"] = {
            "pass": bool(evaluated == 0 or worst < tols["gauss_codazzi"]),
            "max_residual": worst,
            "identity_residual": identity_worst,
            "points_evaluated": evaluated,
            "tol": tols["gauss_codazzi"],
        }

    summary = {
        "points": len(points),
        "max_defect": max(defects) if defects else None,
        "max_oracle_gap": max(gaps) if gaps else None,
        "checks": checks,
    }
    return {"config_echo": config.raw, "rows": rows, "summary": summary}


def document_to_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def document_to_csv(doc: dict) -> str:
    """One row per grid point: coordinates, H, |B|^2, defect, normal coeffs."""
    rows = doc["rows"]
    by_point: dict[tuple, dict] = {}
    methods: list[str] = []
    for row in rows:
        key = tuple(row["point"])
        rec = by_point.setdefault(
            key, {"h": row["h"], "norm_b2": row["norm_b2"], "normals": {}, "defect": None}
        )
        rec["normals"][row["method"]] = row["normal_coeff"]
        if row["method"] != "numeric_oracle" and rec["defect"] is None:
            rec["defect"] = row["tangential_norm"]
        if row["method"] not in methods:
            methods.append(row["method"])
    n = len(rows[0]["point"]) if rows else 0
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(
        [f"u{i}" for i in range(1, n + 1)]
        + ["h", "norm_b2", "defect"]
        + [f"normal_{m}" for m in methods]
    )
    for key in by_point:
        rec = by_point[key]
        writer.writerow(
            [repr(x) for x in key]
            + [repr(rec["h"]), repr(rec["norm_b2"]), repr(rec["defect"])]
            + [repr(rec["normals"].get(m)) for m in methods]
        )
    return out.getvalue()


# ---------------------------------------------------------------------------
# built-in example jobs

EXAMPLE_JOBS: dict[str, tuple[str, dict]] = {
    "nil_foliation_example": (
        "horizontal leaf of the polarized model: minimal but not harmonic",
        {
            "algebra": {"builtin": "heisenberg", "m": 1},
            "model": "nil_polarized",
            "chart": {"catalog": "nil_foliation_leaf", "params": {"z0": 0.0}},
            "domain": [[-2.0, 2.0], [-0.5, 0.5]],
            "grid": [9, 3],
            "methods": ["general", "heisenberg", "numeric_oracle"],
            "checks": ["gauss_codazzi"],
            "seed": 0,
        },
    ),
    "nil_vertical_plane": (
        "vertical plane with constant Gauss map; minimal, Jacobi-stable",
        {
            "algebra": {"builtin": "heisenberg", "m": 1},
            "model": "nil_polarized",
            "chart": {"catalog": "nil_vertical_plane"},
            "domain": [[-1.0, 1.0], [-1.0, 1.0]],
            "grid": [3, 3],
            "methods": ["general", "heisenberg", "numeric_oracle"],
            "checks": ["harmonicity", "prop3", "jacobi"],
            "jacobi_direction": [0.0, 1.0, 0.0],
            "seed": 0,
        },
    ),
    "nil_cylinder_circle": (
        "circular-arc profile cylinder: CMC with harmonic Gauss map",
        {
            "algebra": {"builtin": "heisenberg", "m": 1},
            "model": "nil_polarized",
            "chart": {
                "catalog": "nil_cylinder",
                "params": {"f1": "cos(u1)", "f2": "sin(u1)"},
            },
            "domain": [[-0.6, 0.6], [-1.0, 1.0]],
            "grid": [5, 3],
            "methods": ["general", "heisenberg", "numeric_oracle"],
            "checks": ["harmonicity", "prop3", "corollary1", "jacobi"],
            "seed": 0,
        },
    ),
}


# ---------------------------------------------------------------------------
# entry points


def _emit(doc: dict, args) -> None:
    text = document_to_csv(doc) if args.format == "csv" else document_to_json(doc)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for name, result in doc["summary"]["checks"].items():
        status = "PASS" if result["pass"] else "FAIL"
        print(f"check {name}: {status}", file=sys.stderr)


def _exit_code(doc: dict) -> int:
    checks = doc["summary"]["checks"]
    return 1 if any(not res["pass"] for res in checks.values()) else 0


def _load_config_file(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _apply_overrides(doc: dict, args) -> dict:
    doc = dict(doc)
    if args.tol is not None:
        tols = dict(doc.get("tolerances", {}))
        for key in CHECK_NAMES + ("oracle_gap",):
            tols[key] = args.tol
        doc["tolerances"] = tols
    if args.seed is not None:
        doc["seed"] = args.seed
    return doc


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="nilgauss",
        description="Gauss map Laplacians on hypersurfaces of 2-step nilpotent groups",
    )
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in ("validate", "report", "sweep", "compare"):
        p = sub.add_parser(verb)
        p.add_argument("--config", required=True)
        p.add_argument("--out")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--tol", type=float)
        p.add_argument("--seed", type=int)
        if verb == "report":
            p.add_argument("--point", help="comma-separated chart parameters")
    pex = sub.add_parser("examples")
    pex.add_argument("name", nargs="?")
    pex.add_argument("--out")
    pex.add_argument("--format", choices=("json", "csv"), default="json")
    pex.add_argument("--tol", type=float)
    pex.add_argument("--seed", type=int)
    args = parser.parse_args(argv)

    try:
        if args.verb == "examples":
            if args.name is None:
                for name, (desc, _) in EXAMPLE_JOBS.items():
                    print(f"{name}: {desc}")
                return 0
            if args.name not in EXAMPLE_JOBS:
                print(f"unknown example {args.name!r}", file=sys.stderr)
                return 2
            doc = _apply_overrides(EXAMPLE_JOBS[args.name][1], args)
            config = load_config(doc)
            result = run(config)
            _emit(result, args)
            return _exit_code(result)

        doc = _apply_overrides(_load_config_file(args.config), args)
        if args.verb == "validate":
            problems: list[str] = []
            alg = _build_algebra(doc.get("algebra"), problems)
            if problems or alg is None:
                raise ConfigError(problems)
            report = validate(alg)
            out = {
                "valid": report.ok,
                "violations": [
                    {"name": v.name, "magnitude": v.magnitude} for v in report.violations
                ],
            }
            sys.stdout.write(document_to_json(out))
            if not report.ok:
                return 1
            load_config(doc)  # axioms hold; now surface any config problems
            return 0
        if args.verb == "report":
            if getattr(args, "point", None):
                doc["point"] = [float(x) for x in args.point.split(",")]
            config = load_config(doc)
            if config.point is None:
                centers = [0.5 * (lo + hi) for lo, hi in config.chart.domain]
                config.point = centers
            result = run(config)
            _emit(result, args)
            return _exit_code(result)
        if args.verb == "sweep":
            config = load_config(doc)
            result = run(config)
            _emit(result, args)
            return _exit_code(result)
        if args.verb == "compare":
            if "numeric_oracle" not in doc.get("methods", []):
                doc["methods"] = list(doc.get("methods", [])) + ["numeric_oracle"]
            config = load_config(doc)
            if not [m for m in config.methods if m != "numeric_oracle"]:
                raise ConfigError(["compare needs at least one closed-form method"])
            result = run(config)
            gap = result["summary"]["max_oracle_gap"]
            tol = config.tolerances["oracle_gap"]
            result["summary"]["checks"]["oracle_gap"] = {
                "pass": bool(gap is not None and gap < tol),
                "max_oracle_gap": gap,
                "tol": tol,
            }
            _emit(result, args)
            return _exit_code(result)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 2
    except (ParseError, json.JSONDecodeError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable verb")


def entry() -> None:
    sys.exit(main())
