"""Batch analysis pipeline: configuration, full run, and report emission.

A configuration is a single JSON map (schema ``version: 1``) that names one
operator from the catalog (or a custom basis/functional combination) plus
grid, tolerance, iteration, seed, and output settings. ``run_analyze``
executes the whole pipeline deterministically for a fixed seed: construct
the operator, verify the lemma properties, assemble the collocation matrix,
solve and classify the spectrum, and search for the limit of matrix powers.
Reports serialize to JSON (17 significant digits, stable key order), to a
flat eigenvalue CSV, and to a static SVG of the disks and eigenvalues.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from .bases import check_partition_of_unity, make_bernstein_basis, make_bspline_basis, \
    make_hat_basis
from .checks import CheckResult
from .errors import ConfigError, EigensolverError
from .functionals import (DiracFunctional, IntervalAverageFunctional,
                          WeightedQuadratureFunctional)
from .operators import (OperatorSpec, bernstein_operator, hat_dirac_operator,
                        kantorovich_operator, kernel_witness_report,
                        schoenberg_operator, verify_constant_reproduction,
                        verify_norm_bound, verify_positivity)
from .spectra import (CollocationMatrix, IterateResult, SpectrumReport,
                      build_collocation_matrix, classify_spectrum, eigenvalues,
                      gershgorin_disks, iterate_limit, sort_eigenvalues)

SCHEMA_VERSION = 1

OPERATOR_KINDS = ("bernstein", "kantorovich", "schoenberg", "hat-dirac", "custom")


@dataclass(frozen=True)
class Tolerances:
    pou: float = 1e-10
    stochastic: float = 1e-10
    peripheral: float = 1e-8
    norm: float = 1e-10


@dataclass(frozen=True)
class IterateSettings:
    m_max: int = 65536
    tol: float = 1e-10


@dataclass(frozen=True)
class OutputFlags:
    json: bool = False
    csv: bool = False
    svg: bool = False


@dataclass(frozen=True)
class AnalysisConfig:
    operator: str
    params: dict
    grid_points: int = 1001
    tolerances: Tolerances = field(default_factory=Tolerances)
    iterate: IterateSettings = field(default_factory=IterateSettings)
    seed: int = 42
    outputs: OutputFlags = field(default_factory=OutputFlags)
    version: int = SCHEMA_VERSION

    def with_seed(self, seed: int) -> "AnalysisConfig":
        return replace(self, seed=seed)

    def echo(self) -> dict:
        """Canonical plain mapping; parsing it back yields an equal config."""
        out: dict[str, Any] = {"version": self.version, "operator": self.operator}
        out.update(self.params)
        out["grid_points"] = self.grid_points
        out["tolerances"] = {
            "pou": self.tolerances.pou,
            "stochastic": self.tolerances.stochastic,
            "peripheral": self.tolerances.peripheral,
            "norm": self.tolerances.norm,
        }
        out["iterate"] = {"m_max": self.iterate.m_max, "tol": self.iterate.tol}
        out["seed"] = self.seed
        out["outputs"] = {"json": self.outputs.json, "csv": self.outputs.csv,
                          "svg": self.outputs.svg}
        return out


# --------------------------------------------------------------------------
# Configuration parsing
# --------------------------------------------------------------------------

def _require(data: dict, key: str, types, context: str):
    if key not in data:
        raise ConfigError(f"{context}: missing required field '{key}'")
    value = data[key]
    if not isinstance(value, types):
        raise ConfigError(f"{context}: field '{key}' has invalid type "
                          f"{type(value).__name__}")
    return value


def _positive_int(data: dict, key: str, context: str, minimum: int = 1) -> int:
    value = _require(data, key, (int,), context)
    if isinstance(value, bool) or value < minimum:
        raise ConfigError(f"{context}: '{key}' must be an integer >= {minimum}")
    return value


def _float_list(data: dict, key: str, context: str) -> list[float]:
    value = _require(data, key, (list,), context)
    try:
        return [float(v) for v in value]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{context}: '{key}' must be a list of numbers") from exc


def _parse_operator_params(kind: str, data: dict) -> dict:
    if kind in ("bernstein", "kantorovich"):
        return {"n": _positive_int(data, "n", f"operator '{kind}'")}
    if kind == "schoenberg":
        degree = _positive_int(data, "degree", "operator 'schoenberg'")
        return {"knots": _float_list(data, "knots", "operator 'schoenberg'"),
                "degree": degree}
    if kind == "hat-dirac":
        return {"nodes": _float_list(data, "nodes", "operator 'hat-dirac'")}
    if kind == "custom":
        basis = _require(data, "basis", (dict,), "operator 'custom'")
        functionals = _require(data, "functionals", (list,), "operator 'custom'")
        return {"basis": _parse_basis_spec(basis),
                "functionals": [_parse_functional_spec(s, i)
                                for i, s in enumerate(functionals)]}
    raise ConfigError(f"unknown operator kind '{kind}' "
                      f"(expected one of {', '.join(OPERATOR_KINDS)})")


def _parse_basis_spec(spec: dict) -> dict:
    kind = _require(spec, "kind", (str,), "custom basis")
    if kind == "bernstein":
        return {"kind": "bernstein", "n": _positive_int(spec, "n", "custom basis")}
    if kind == "bspline":
        return {"kind": "bspline",
                "knots": _float_list(spec, "knots", "custom basis"),
                "degree": _positive_int(spec, "degree", "custom basis", minimum=0)}
    if kind == "hat":
        return {"kind": "hat", "nodes": _float_list(spec, "nodes", "custom basis")}
    raise ConfigError(f"custom basis: unknown kind '{kind}'")


def _parse_functional_spec(spec: Any, index: int) -> dict:
    context = f"functional[{index}]"
    if not isinstance(spec, dict):
        raise ConfigError(f"{context}: must be a map")
    kind = _require(spec, "kind", (str,), context)
    if kind == "dirac":
        return {"kind": "dirac", "x": float(_require(spec, "x", (int, float), context))}
    if kind == "interval-average":
        a = float(_require(spec, "a", (int, float), context))
        b = float(_require(spec, "b", (int, float), context))
        if a >= b:
            raise ConfigError(f"{context}: requires a < b")
        return {"kind": "interval-average", "a": a, "b": b}
    if kind == "weighted-quadrature":
        return {"kind": "weighted-quadrature",
                "nodes": _float_list(spec, "nodes", context),
                "weights": _float_list(spec, "weights", context)}
    raise ConfigError(f"{context}: unknown kind '{kind}'")


def config_from_mapping(data: dict) -> AnalysisConfig:
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a single top-level map")
    version = data.get("version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported config version {version!r} "
                          f"(this build reads version {SCHEMA_VERSION})")
    kind = _require(data, "operator", (str,), "config")
    params = _parse_operator_params(kind, data)

    grid_points = data.get("grid_points", 1001)
    if not isinstance(grid_points, int) or isinstance(grid_points, bool) or grid_points < 11:
        raise ConfigError("config: 'grid_points' must be an integer >= 11")

    tol_data = data.get("tolerances", {})
    if not isinstance(tol_data, dict):
        raise ConfigError("config: 'tolerances' must be a map")
    defaults = Tolerances()
    tol_kwargs = {}
    for name in ("pou", "stochastic", "peripheral", "norm"):
        value = tol_data.get(name, getattr(defaults, name))
        if not isinstance(value, (int, float)) or value <= 0:
            raise ConfigError(f"config: tolerance '{name}' must be a positive number")
        tol_kwargs[name] = float(value)

    it_data = data.get("iterate", {})
    if not isinstance(it_data, dict):
        raise ConfigError("config: 'iterate' must be a map")
    it_defaults = IterateSettings()
    m_max = it_data.get("m_max", it_defaults.m_max)
    if not isinstance(m_max, int) or isinstance(m_max, bool) or m_max < 2:
        raise ConfigError("config: iterate 'm_max' must be an integer >= 2")
    it_tol = it_data.get("tol", it_defaults.tol)
    if not isinstance(it_tol, (int, float)) or it_tol <= 0:
        raise ConfigError("config: iterate 'tol' must be a positive number")

    seed = data.get("seed", 42)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError("config: 'seed' must be an integer")

    out_data = data.get("outputs", {})
    if not isinstance(out_data, dict):
        raise ConfigError("config: 'outputs' must be a map")
    flags = {}
    for name in ("json", "csv", "svg"):
        value = out_data.get(name, False)
        if not isinstance(value, bool):
            raise ConfigError(f"config: output flag '{name}' must be a boolean")
        flags[name] = value

    return AnalysisConfig(
        operator=kind,
        params=params,
        grid_points=grid_points,
        tolerances=Tolerances(**tol_kwargs),
        iterate=IterateSettings(m_max=m_max, tol=float(it_tol)),
        seed=seed,
        outputs=OutputFlags(**flags),
        version=SCHEMA_VERSION,
    )


def parse_config(text: str) -> AnalysisConfig:
    """Parse and validate a JSON configuration document."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"configuration is not valid JSON: {exc}") from exc
    return config_from_mapping(data)


# --------------------------------------------------------------------------
# Operator construction from a config
# --------------------------------------------------------------------------

def _build_custom_basis(spec: dict):
    if spec["kind"] == "bernstein":
        return make_bernstein_basis(spec["n"])
    if spec["kind"] == "bspline":
        return make_bspline_basis(spec["knots"], spec["degree"])
    return make_hat_basis(spec["nodes"])


def _build_custom_functional(spec: dict):
    if spec["kind"] == "dirac":
        return DiracFunctional(spec["x"])
    if spec["kind"] == "interval-average":
        return IntervalAverageFunctional(spec["a"], spec["b"])
    return WeightedQuadratureFunctional(spec["nodes"], spec["weights"])


def build_operator(config: AnalysisConfig) -> OperatorSpec:
    kind = config.operator
    params = config.params
    if kind == "bernstein":
        return bernstein_operator(params["n"])
    if kind == "kantorovich":
        return kantorovich_operator(params["n"])
    if kind == "schoenberg":
        return schoenberg_operator(params["knots"], params["degree"])
    if kind == "hat-dirac":
        return hat_dirac_operator(params["nodes"])
    basis = _build_custom_basis(params["basis"])
    funcs = tuple(_build_custom_functional(s) for s in params["functionals"])
    return OperatorSpec(basis, funcs, name="custom")


# --------------------------------------------------------------------------
# Pipeline
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class AnalysisReport:
    config: AnalysisConfig
    operator_name: str
    checks: dict[str, CheckResult]
    matrix: CollocationMatrix
    row_sum_max_dev: float
    diag_min: float
    spectrum: SpectrumReport
    iterates: IterateResult
    timings: dict[str, float]

    @property
    def all_checks_passed(self) -> bool:
        return all(c.passed for c in self.checks.values())


def run_analyze(config: AnalysisConfig) -> AnalysisReport:
    """Execute the full pipeline for one configured operator.

    The run is deterministic for a fixed config (seed included). Module
    errors in individual stages are folded into the report diagnostics
    rather than aborting the run.
    """
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    op = build_operator(config)
    grid = op.basis.domain.grid(config.grid_points)
    timings["build"] = time.perf_counter() - t0

    tol = config.tolerances
    t0 = time.perf_counter()
    checks: dict[str, CheckResult] = {}
    checks["partition_of_unity"] = check_partition_of_unity(op.basis, grid, tol.pou)
    checks["positivity"] = verify_positivity(op, trials=100, tol=tol.norm,
                                             seed=config.seed,
                                             grid_points=config.grid_points)
    checks["constant_reproduction"] = verify_constant_reproduction(op, grid, tol.norm)
    checks["norm_estimate"] = verify_norm_bound(op, trials=200, seed=config.seed + 1,
                                                tol=tol.norm,
                                                grid_points=config.grid_points)
    checks["kernel_residual"] = kernel_witness_report(op, grid_points=config.grid_points)
    timings["checks"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    matrix = build_collocation_matrix(op)
    row_sum_max_dev = float(np.max(np.abs(matrix.row_sums() - 1.0)))
    diag_min = matrix.diagonal_min()
    timings["matrix"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    disks = gershgorin_disks(matrix)
    extra_diag = ""
    try:
        eigs = eigenvalues(matrix)
    except EigensolverError as exc:
        eigs = sort_eigenvalues(exc.partial)
        extra_diag = f"; eigensolver failure, partial results only: {exc}"
    spectrum = classify_spectrum(eigs, disks, tol.peripheral)
    if extra_diag:
        spectrum = SpectrumReport(
            eigenvalues=spectrum.eigenvalues, disks=spectrum.disks,
            peripheral=spectrum.peripheral, classification=spectrum.classification,
            diagnostics=spectrum.diagnostics + extra_diag,
            containment_residual=spectrum.containment_residual)
    timings["spectrum"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    iterates = iterate_limit(matrix, tol=config.iterate.tol, m_max=config.iterate.m_max)
    timings["iterates"] = time.perf_counter() - t0

    return AnalysisReport(
        config=config,
        operator_name=op.name,
        checks=checks,
        matrix=matrix,
        row_sum_max_dev=row_sum_max_dev,
        diag_min=diag_min,
        spectrum=spectrum,
        iterates=iterates,
        timings=timings,
    )


def exit_code_for(report: AnalysisReport) -> int:
    """0 when every check passed and the spectrum conforms, else 1."""
    ok = report.all_checks_passed and report.spectrum.classification == "conforms"
    return 0 if ok else 1


# --------------------------------------------------------------------------
# Serialization
# --------------------------------------------------------------------------

def _format_number(x: float) -> str:
    if x != x or x in (float("inf"), float("-inf")):
        raise ValueError(f"cannot serialize non-finite number {x!r}")
    return format(x, ".17g")


def _json_fragment(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * level)
    inner = " " * (indent * (level + 1))
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_number(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{inner}{_json_fragment(v, indent, level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_json_fragment(v, indent, level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_json(obj: Any, indent: int = 2) -> str:
    """Deterministic JSON with floats at 17 significant digits."""
    return _json_fragment(obj, indent, 0) + "\n"


def report_to_mapping(report: AnalysisReport) -> dict:
    """Plain mapping mirror of a report with the documented key paths."""
    spectrum = report.spectrum
    eig_rows = []
    for lam in spectrum.eigenvalues:
        outside = min(d.distance_outside(lam) for d in spectrum.disks)
        eig_rows.append({
            "re": float(lam.real),
            "im": float(lam.imag),
            "modulus": float(abs(lam)),
            "in_disk_union": bool(outside <= 1e-9),
        })
    return {
        "config": report.config.echo(),
        "operator": report.operator_name,
        "checks": {name: check.as_dict() for name, check in report.checks.items()},
        "matrix": {
            "entries": [list(map(float, row)) for row in report.matrix.entries],
            "row_sum_max_dev": report.row_sum_max_dev,
            "diag_min": report.diag_min,
        },
        "spectrum": {
            "eigenvalues": eig_rows,
            "disks": [{"center": d.center, "radius": d.radius} for d in spectrum.disks],
            "classification": spectrum.classification,
            "diagnostics": spectrum.diagnostics,
        },
        "iterates": {
            "converged": report.iterates.converged,
            "rate": report.iterates.rate,
            "m_used": report.iterates.m_used,
            "message": report.iterates.message,
        },
        "timings": dict(report.timings),
    }


def emit_report(report: AnalysisReport, format: str = "json") -> str:
    """Serialize a report: nested JSON, or the flat eigenvalue CSV with
    columns (index, re, im, modulus, in_disk_union)."""
    if report.spectrum.eigenvalues.size == 0:
        raise ValueError("report has an empty eigenvalue list; the matrix "
                         "dimension is at least one, so this is a bug upstream")
    if format == "json":
        return dumps_json(report_to_mapping(report))
    if format == "csv":
        lines = ["index,re,im,modulus,in_disk_union"]
        for i, lam in enumerate(report.spectrum.eigenvalues, start=1):
            outside = min(d.distance_outside(lam) for d in report.spectrum.disks)
            inside = "true" if outside <= 1e-9 else "false"
            lines.append(f"{i},{float(lam.real)!r},{float(lam.imag)!r},"
                         f"{float(abs(lam))!r},{inside}")
        return "\n".join(lines) + "\n"
    raise ConfigError(f"unknown report format '{format}' (expected json or csv)")


# --------------------------------------------------------------------------
# SVG plot
# --------------------------------------------------------------------------

SVG_SIZE = 800
SVG_SPAN = 1.2  # plot window is [-SPAN, SPAN]^2


def _svg_x(re: float) -> float:
    return (re + SVG_SPAN) * SVG_SIZE / (2 * SVG_SPAN)


def _svg_y(im: float) -> float:
    return (SVG_SPAN - im) * SVG_SIZE / (2 * SVG_SPAN)


def _svg_r(r: float) -> float:
    return r * SVG_SIZE / (2 * SVG_SPAN)


def emit_svg(report: AnalysisReport) -> str:
    """Static plot: unit circle, one circle per Gershgorin disk (centers on
    the real axis), one cross marker per eigenvalue."""
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_SIZE}" '
        f'height="{SVG_SIZE}" viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">',
        f'  <rect width="{SVG_SIZE}" height="{SVG_SIZE}" fill="#ffffff"/>',
        f'  <line x1="0" y1="{_svg_y(0):.2f}" x2="{SVG_SIZE}" y2="{_svg_y(0):.2f}" '
        'stroke="#cccccc" stroke-width="1"/>',
        f'  <line x1="{_svg_x(0):.2f}" y1="0" x2="{_svg_x(0):.2f}" y2="{SVG_SIZE}" '
        'stroke="#cccccc" stroke-width="1"/>',
        f'  <circle cx="{_svg_x(0):.2f}" cy="{_svg_y(0):.2f}" r="{_svg_r(1.0):.2f}" '
        'fill="none" stroke="#444444" stroke-width="1.5" stroke-dasharray="6,4"/>',
    ]
    for disk in report.spectrum.disks:
        parts.append(
            f'  <circle cx="{_svg_x(disk.center):.2f}" cy="{_svg_y(0):.2f}" '
            f'r="{max(_svg_r(disk.radius), 1.0):.2f}" fill="#1f77b4" '
            'fill-opacity="0.08" stroke="#1f77b4" stroke-width="1"/>')
    arm = 6.0
    for lam in report.spectrum.eigenvalues:
        cx, cy = _svg_x(lam.real), _svg_y(lam.imag)
        parts.append(
            f'  <path d="M {cx - arm:.2f} {cy - arm:.2f} L {cx + arm:.2f} {cy + arm:.2f} '
            f'M {cx - arm:.2f} {cy + arm:.2f} L {cx + arm:.2f} {cy - arm:.2f}" '
            'stroke="#d62728" stroke-width="2" fill="none"/>')
    parts.append(
        f'  <text x="16" y="28" font-family="monospace" font-size="16" fill="#222222">'
        f'{report.operator_name}: {report.spectrum.classification}</text>')
    parts.append('</svg>')
    return "\n".join(parts) + "\n"
