"""Configuration parsing, the analysis pipeline, emitters, and the CLI."""

from __future__ import annotations

import dataclasses
import json

import numpy as np
import numpy.testing as nptest
import pytest

from pouspec.cli import main
from pouspec.errors import ConfigError
from pouspec.report import (config_from_mapping, dumps_json, emit_report, emit_svg,
                            exit_code_for, parse_config, report_to_mapping,
                            run_analyze)
from pouspec.spectra import SpectrumReport

KANT1_CONFIG = '{"version": 1, "operator": "kantorovich", "n": 1, "seed": 42}'

SWAP_CONFIG = json.dumps({
    "version": 1,
    "operator": "custom",
    "basis": {"kind": "hat", "nodes": [0.0, 1.0]},
    "functionals": [{"kind": "dirac", "x": 1.0}, {"kind": "dirac", "x": 0.0}],
    "seed": 42,
})


class TestParseConfig:
    def test_defaults_filled(self):
        config = parse_config('{"operator": "bernstein", "n": 8}')
        assert config.grid_points == 1001
        assert config.seed == 42
        assert config.tolerances.pou == 1e-10
        assert config.iterate.m_max == 65536
        assert not config.outputs.json

    def test_rejects_nonpositive_n(self):
        with pytest.raises(ConfigError, match="'n' must be an integer >= 1"):
            parse_config('{"operator": "kantorovich", "n": 0}')

    def test_hat_dirac_nodes(self):
        config = parse_config('{"operator": "hat-dirac", "nodes": [0, 0.5, 1]}')
        assert config.params["nodes"] == [0.0, 0.5, 1.0]

    def test_unknown_operator_named(self):
        with pytest.raises(ConfigError, match="unknown operator kind 'fourier'"):
            parse_config('{"operator": "fourier"}')

    def test_missing_field_named(self):
        with pytest.raises(ConfigError, match="missing required field 'n'"):
            parse_config('{"operator": "bernstein"}')

    def test_nonpositive_tolerance_rejected(self):
        with pytest.raises(ConfigError, match="tolerance 'pou'"):
            parse_config('{"operator": "bernstein", "n": 2, '
                         '"tolerances": {"pou": 0}}')

    def test_rejects_bad_json(self):
        with pytest.raises(ConfigError, match="not valid JSON"):
            parse_config("{operator: bernstein}")

    def test_rejects_wrong_version(self):
        with pytest.raises(ConfigError, match="version"):
            parse_config('{"version": 2, "operator": "bernstein", "n": 2}')

    def test_rejects_small_grid(self):
        with pytest.raises(ConfigError, match="grid_points"):
            parse_config('{"operator": "bernstein", "n": 2, "grid_points": 5}')

    def test_round_trip_through_echo(self):
        config = parse_config(SWAP_CONFIG)
        again = config_from_mapping(json.loads(dumps_json(config.echo())))
        assert again == config

    def test_round_trip_schoenberg(self):
        text = ('{"operator": "schoenberg", "degree": 2, '
                '"knots": [0, 0, 0, 0.5, 1, 1, 1], "seed": 7}')
        config = parse_config(text)
        again = config_from_mapping(json.loads(dumps_json(config.echo())))
        assert again == config


class TestRunAnalyze:
    def test_bernstein2_report(self):
        report = run_analyze(parse_config('{"operator": "bernstein", "n": 2}'))
        nptest.assert_allclose(np.sort_complex(report.spectrum.eigenvalues),
                               [0.5, 1.0, 1.0], atol=1e-12)
        assert report.spectrum.classification == "conforms"
        assert report.all_checks_passed
        assert exit_code_for(report) == 0

    def test_swap_report(self):
        report = run_analyze(parse_config(SWAP_CONFIG))
        assert report.spectrum.classification == "violates-theorem"
        assert "zero diagonal" in report.spectrum.diagnostics
        assert any(abs(lam + 1.0) <= 1e-12 for lam in report.spectrum.eigenvalues)
        assert not report.iterates.converged
        assert exit_code_for(report) == 1

    def test_kantorovich1_report_values(self):
        report = run_analyze(parse_config(KANT1_CONFIG))
        nptest.assert_allclose(report.matrix.entries,
                               [[0.75, 0.25], [0.25, 0.75]], atol=1e-13)
        assert report.iterates.converged
        nptest.assert_allclose(report.iterates.limit, 0.5 * np.ones((2, 2)),
                               atol=1e-10)
        assert report.iterates.rate == pytest.approx(0.5, abs=1e-3)

    def test_mapping_key_paths(self):
        report = run_analyze(parse_config(KANT1_CONFIG))
        data = report_to_mapping(report)
        for name in ("partition_of_unity", "positivity", "constant_reproduction",
                     "norm_estimate", "kernel_residual"):
            assert "passed" in data["checks"][name]
        assert data["matrix"]["row_sum_max_dev"] <= 1e-12
        assert data["matrix"]["diag_min"] == pytest.approx(0.75)
        assert data["spectrum"]["classification"] == "conforms"
        assert {"re", "im", "modulus", "in_disk_union"} <= set(
            data["spectrum"]["eigenvalues"][0])
        assert data["iterates"]["converged"] is True
        assert "timings" in data


@pytest.fixture(scope="module")
def kant1_report():
    return run_analyze(parse_config(KANT1_CONFIG))


class TestEmit:
    def test_json_contains_classification_path(self, kant1_report):
        text = emit_report(kant1_report, "json")
        data = json.loads(text)
        assert data["spectrum"]["classification"] == "conforms"

    def test_json_floats_survive_round_trip(self, kant1_report):
        # 17 significant digits reproduce the binary doubles exactly.
        data = json.loads(emit_report(kant1_report, "json"))
        assert data["matrix"]["entries"] == [list(row) for row in
                                             kant1_report.matrix.entries]
        assert data["matrix"]["entries"][0][0] == pytest.approx(0.75, abs=1e-13)

    def test_csv_leading_row_is_eigenvalue_one(self, kant1_report):
        lines = emit_report(kant1_report, "csv").splitlines()
        assert lines[0] == "index,re,im,modulus,in_disk_union"
        first = lines[1].split(",")
        assert first[0] == "1"
        assert float(first[1]) == pytest.approx(1.0, abs=1e-10)
        assert float(first[2]) == 0.0
        assert float(first[3]) == pytest.approx(1.0, abs=1e-10)
        assert first[4] == "true"

    def test_unknown_format_rejected(self, kant1_report):
        with pytest.raises(ConfigError):
            emit_report(kant1_report, "yaml")

    def test_empty_eigenvalue_list_rejected(self, kant1_report):
        empty_spectrum = SpectrumReport(
            eigenvalues=np.empty(0, dtype=complex),
            disks=kant1_report.spectrum.disks,
            peripheral=np.empty(0, dtype=complex),
            classification="conforms", diagnostics="", containment_residual=0.0)
        broken = dataclasses.replace(kant1_report, spectrum=empty_spectrum)
        with pytest.raises(ValueError, match="empty eigenvalue list"):
            emit_report(broken, "json")

    def test_svg_structure(self, kant1_report):
        svg = emit_svg(kant1_report)
        assert svg.startswith("<svg")
        assert 'viewBox="0 0 800 800"' in svg
        assert svg.count("<circle") == 3  # unit circle + two disks
        assert svg.count("<path") == 2    # two eigenvalue markers

    def test_svg_swap_marker_at_minus_one(self):
        svg = emit_svg(run_analyze(parse_config(SWAP_CONFIG)))
        # Real axis maps [-1.2, 1.2] to [0, 800]; -1 lands at x = 66.67.
        assert "M 60.67" in svg

    def test_dumps_json_17_digits(self):
        text = dumps_json({"x": 1.0 / 3.0})
        assert "0.33333333333333331" in text


class TestDeterminism:
    def test_identical_runs_identical_json(self):
        config = parse_config(KANT1_CONFIG)
        first = report_to_mapping(run_analyze(config))
        second = report_to_mapping(run_analyze(config))
        first.pop("timings")
        second.pop("timings")
        assert dumps_json(first) == dumps_json(second)

    def test_seed_changes_norm_samples_not_conclusions(self):
        base = parse_config(KANT1_CONFIG)
        report_a = run_analyze(base)
        report_b = run_analyze(base.with_seed(7))
        assert report_a.spectrum.classification == report_b.spectrum.classification
        nptest.assert_allclose(report_a.matrix.entries, report_b.matrix.entries)


class TestCli:
    def test_analyze_writes_outputs(self, tmp_path, capsys):
        config = tmp_path / "config.json"
        config.write_text(KANT1_CONFIG, encoding="utf-8")
        out_json = tmp_path / "out.json"
        out_csv = tmp_path / "out.csv"
        out_svg = tmp_path / "out.svg"
        code = main(["analyze", "--config", str(config), "--json", str(out_json),
                     "--csv", str(out_csv), "--svg", str(out_svg)])
        assert code == 0
        assert json.loads(out_json.read_text())["spectrum"]["classification"] == "conforms"
        assert out_csv.read_text().startswith("index,")
        assert out_svg.read_text().startswith("<svg")
        assert "classification: conforms" in capsys.readouterr().out

    def test_swap_exits_one(self, tmp_path):
        config = tmp_path / "swap.json"
        config.write_text(SWAP_CONFIG, encoding="utf-8")
        assert main(["analyze", "--config", str(config)]) == 1

    def test_missing_file_exits_two(self):
        assert main(["analyze", "--config", "/nonexistent/config.json"]) == 2

    def test_bad_config_exits_two(self, tmp_path, capsys):
        config = tmp_path / "bad.json"
        config.write_text('{"operator": "kantorovich", "n": 0}', encoding="utf-8")
        assert main(["analyze", "--config", str(config)]) == 2
        assert "n" in capsys.readouterr().err

    def test_catalog_lists_kinds(self, capsys):
        assert main(["catalog"]) == 0
        out = capsys.readouterr().out
        for kind in ("bernstein", "kantorovich", "schoenberg", "hat-dirac", "custom"):
            assert kind in out

    def test_verify_checks_only(self, tmp_path, capsys):
        config = tmp_path / "config.json"
        config.write_text(KANT1_CONFIG, encoding="utf-8")
        assert main(["verify", "--config", str(config)]) == 0
        out = capsys.readouterr().out
        assert "row_stochastic" in out
        assert "eigenvalue" not in out

    def test_oracle_cross_check(self, tmp_path, capsys):
        config = tmp_path / "config.json"
        config.write_text(KANT1_CONFIG, encoding="utf-8")
        assert main(["oracle", "--config", str(config)]) == 0
        assert "max matched distance" in capsys.readouterr().out

    def test_oracle_oversize_exits_two(self, tmp_path):
        config = tmp_path / "config.json"
        config.write_text('{"operator": "bernstein", "n": 8}', encoding="utf-8")
        assert main(["oracle", "--config", str(config)]) == 2

    def test_seed_override(self, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(KANT1_CONFIG, encoding="utf-8")
        out_a = tmp_path / "a.json"
        out_b = tmp_path / "b.json"
        assert main(["analyze", "--config", str(config), "--json", str(out_a),
                     "--seed", "99"]) == 0
        assert main(["analyze", "--config", str(config), "--json", str(out_b),
                     "--seed", "99"]) == 0
        a = json.loads(out_a.read_text())
        b = json.loads(out_b.read_text())
        assert a["config"]["seed"] == 99
        a.pop("timings"); b.pop("timings")
        assert a == b
