"""Command-line front end.

Subcommands:

* ``analyze``: full pipeline for one configured operator, with optional
  JSON / CSV / SVG outputs.
* ``catalog``: list the built-in operator kinds and their parameters.
* ``verify``: lemma and stochasticity checks only, no spectrum.
* ``oracle``: cross-check the QR eigensolver against the
  characteristic-polynomial oracle (matrix dimension at most 5).

Exit codes: 0 when everything conforms, 1 when a check fails or the
spectrum violates the peripheral statement, 2 for configuration or I/O
errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bases import check_partition_of_unity
from .errors import ConfigError, UnsupportedSizeError
from .operators import (kernel_witness_report, verify_constant_reproduction,
                        verify_norm_bound, verify_positivity)
from .report import (AnalysisConfig, build_operator, emit_report, emit_svg,
                     exit_code_for, parse_config, run_analyze)
from .spectra import (build_collocation_matrix, char_poly_eigen_oracle,
                      check_row_stochastic, eigenvalues, pair_eigenvalues)

ORACLE_MATCH_TOL = 1e-7

CATALOG_TEXT = """\
Built-in operator kinds (configuration field "operator"):

  bernstein     point evaluation at the nodes k/n against the Bernstein
                basis of degree n. Parameters: n >= 1.
  kantorovich   normalized cell averages over the n+1 equal subintervals
                against the Bernstein basis. Parameters: n >= 1.
  schoenberg    point evaluation at the Greville abscissae against a
                clamped B-spline basis. Parameters: knots (full clamped
                vector), degree >= 1.
  hat-dirac     nodal interpolation: hat basis over a partition with point
                evaluation at the same nodes. Parameters: nodes (strictly
                increasing, spanning [0, 1]).
  custom        any combination of a basis spec ({"kind": "bernstein"|
                "bspline"|"hat", ...}) with one functional spec per basis
                function ({"kind": "dirac"|"interval-average"|
                "weighted-quadrature", ...}).
"""


def _read_config(path: str) -> AnalysisConfig:
    text = Path(path).read_text(encoding="utf-8")
    return parse_config(text)


def _cmd_analyze(args: argparse.Namespace) -> int:
    config = _read_config(args.config)
    if args.seed is not None:
        config = config.with_seed(args.seed)
    report = run_analyze(config)

    json_path = args.json or ("report.json" if config.outputs.json else None)
    csv_path = args.csv or ("report.csv" if config.outputs.csv else None)
    svg_path = args.svg or ("report.svg" if config.outputs.svg else None)
    if json_path:
        Path(json_path).write_text(emit_report(report, "json"), encoding="utf-8")
    if csv_path:
        Path(csv_path).write_text(emit_report(report, "csv"), encoding="utf-8")
    if svg_path:
        Path(svg_path).write_text(emit_svg(report), encoding="utf-8")

    print(f"operator: {report.operator_name}")
    for check in report.checks.values():
        print(f"  {check}")
    print(f"  matrix: n={report.matrix.n}, row sum max dev = "
          f"{report.row_sum_max_dev:.3e}, diag min = {report.diag_min:.6g}")
    eigs = ", ".join(f"{lam:.6g}" for lam in report.spectrum.eigenvalues[:8])
    suffix = ", ..." if report.spectrum.eigenvalues.size > 8 else ""
    print(f"  eigenvalues: {eigs}{suffix}")
    print(f"  classification: {report.spectrum.classification}")
    print(f"  diagnostics: {report.spectrum.diagnostics}")
    print(f"  iterates: {report.iterates.message}" +
          (f" (rate {report.iterates.rate:.6g})" if report.iterates.rate is not None else ""))
    return exit_code_for(report)


def _cmd_catalog(_args: argparse.Namespace) -> int:
    print(CATALOG_TEXT, end="")
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    config = _read_config(args.config)
    if args.seed is not None:
        config = config.with_seed(args.seed)
    op = build_operator(config)
    grid = op.basis.domain.grid(config.grid_points)
    tol = config.tolerances
    results = [
        check_partition_of_unity(op.basis, grid, tol.pou),
        verify_positivity(op, trials=100, tol=tol.norm, seed=config.seed,
                          grid_points=config.grid_points),
        verify_constant_reproduction(op, grid, tol.norm),
        verify_norm_bound(op, trials=200, seed=config.seed + 1, tol=tol.norm,
                          grid_points=config.grid_points),
        kernel_witness_report(op, grid_points=config.grid_points),
        check_row_stochastic(build_collocation_matrix(op), tol.stochastic),
    ]
    print(f"operator: {op.name}")
    for check in results:
        print(f"  {check}")
    return 0 if all(c.passed for c in results) else 1


def _cmd_oracle(args: argparse.Namespace) -> int:
    config = _read_config(args.config)
    op = build_operator(config)
    matrix = build_collocation_matrix(op)
    if matrix.n > 5:
        raise UnsupportedSizeError(
            f"oracle cross-check supports matrices up to 5x5, got {matrix.n}x{matrix.n}")
    qr_eigs = eigenvalues(matrix)
    oracle_eigs = char_poly_eigen_oracle(matrix)
    distance = pair_eigenvalues(qr_eigs, oracle_eigs)
    print(f"operator: {op.name} (n = {matrix.n})")
    print(f"  qr eigenvalues:     {', '.join(f'{v:.12g}' for v in qr_eigs)}")
    print(f"  oracle eigenvalues: {', '.join(f'{v:.12g}' for v in oracle_eigs)}")
    print(f"  max matched distance: {distance:.3e} (tolerance {ORACLE_MATCH_TOL:.1e})")
    return 0 if distance <= ORACLE_MATCH_TOL else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pouspec",
        description="Spectral analysis of positive finite-rank operators "
                    "with the partition-of-unity property.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="run the full analysis pipeline")
    analyze.add_argument("--config", required=True, help="path to a JSON config")
    analyze.add_argument("--json", help="write the JSON report to this path")
    analyze.add_argument("--csv", help="write the eigenvalue CSV to this path")
    analyze.add_argument("--svg", help="write the spectrum plot to this path")
    analyze.add_argument("--seed", type=int, help="override the config seed")
    analyze.set_defaults(handler=_cmd_analyze)

    catalog = sub.add_parser("catalog", help="list built-in operators")
    catalog.set_defaults(handler=_cmd_catalog)

    verify = sub.add_parser("verify", help="run checks only, no spectrum")
    verify.add_argument("--config", required=True, help="path to a JSON config")
    verify.add_argument("--seed", type=int, help="override the config seed")
    verify.set_defaults(handler=_cmd_verify)

    oracle = sub.add_parser("oracle",
                            help="QR vs characteristic-polynomial cross-check (n <= 5)")
    oracle.add_argument("--config", required=True, help="path to a JSON config")
    oracle.set_defaults(handler=_cmd_oracle)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ConfigError, UnsupportedSizeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
