"""Tests for config parsing, scenario execution, and output determinism."""

import json
import math
import pathlib

import numpy as np
import pytest

from twinbeam import ConfigError, MeasurementUndefinedError
from twinbeam.assets import bundled_mask_path
from twinbeam.errors import IntegrityError
from twinbeam.pgm import write_pgm
from twinbeam.scenarios import (
    ResultSummary,
    emit_summary,
    parse_config,
    run_scenario,
)

REPO_CONFIGS = pathlib.Path(__file__).resolve().parent.parent / "configs"


def write_config(tmp_path, text, name="scenario.yaml"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def read_csv(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# ")
    assert lines[1] == "abscissa,value_db" or lines[1].startswith("abscissa,")
    rows = [line.split(",") for line in lines[2:]]
    return np.array([[float(a), float(b)] for a, b in rows])


class TestParseConfig:
    def test_minimal_gain_sweep_fills_defaults(self, tmp_path):
        cfg = parse_config(
            write_config(tmp_path, "kind: GainSweep\ngain: {start: 1.0, stop: 4.0, steps: 31}\n")
        )
        assert cfg.kind == "GainSweep"
        assert cfg.seed_power == 1.0e4
        assert cfg.gain_sweep == (1.0, 4.0, 31)
        assert cfg.echo["seed_power"] == 1.0e4
        assert cfg.echo["technical_noise"] == {
            "electronic_floor_db": None,
            "pump_scatter_db": None,
        }

    def test_unknown_key_rejected_with_path(self, tmp_path):
        path = write_config(tmp_path, "kind: GainSweep\ngain: {start: 1.0, stop: 2.0, steps: 3, stepz: 4}\n")
        with pytest.raises(ConfigError) as err:
            parse_config(path)
        assert "gain.stepz" in str(err.value)

    def test_unknown_key_tolerated_in_lenient_mode(self, tmp_path):
        path = write_config(tmp_path, "kind: GainSweep\nbogus: 1\n")
        cfg = parse_config(path, strict=False)
        assert cfg.kind == "GainSweep"

    def test_efficiency_out_of_range_rejected(self, tmp_path):
        path = write_config(tmp_path, "kind: HomodyneScan\nefficiency: 1.2\n")
        with pytest.raises(ConfigError) as err:
            parse_config(path)
        assert "efficiency" in str(err.value)

    def test_missing_mask_rejected_naming_path(self, tmp_path):
        path = write_config(tmp_path, "kind: ImageSubregion\nmask: nowhere.pgm\n")
        with pytest.raises(ConfigError) as err:
            parse_config(path)
        assert "nowhere.pgm" in str(err.value)

    def test_unknown_kind_rejected(self, tmp_path):
        path = write_config(tmp_path, "kind: FluxCapacitor\n")
        with pytest.raises(ConfigError):
            parse_config(path)

    def test_mask_path_relative_to_config_file(self, tmp_path):
        write_pgm(tmp_path / "m.pgm", np.full((2, 2), 255), maxval=255)
        nested = tmp_path / "sub"
        nested.mkdir()
        path = write_config(nested, "kind: ShapedLoEntanglement\nlo_mask: ../m.pgm\n")
        cfg = parse_config(path)
        assert pathlib.Path(cfg.lo_mask_path).is_file()

    def test_numbers_must_be_numbers(self, tmp_path):
        # classic YAML pitfall: 1.0e4 without an exponent sign is a string
        path = write_config(tmp_path, "kind: GainSweep\nseed_power: 1.0e4\n")
        with pytest.raises(ConfigError) as err:
            parse_config(path)
        assert "seed_power" in str(err.value)

    def test_shipped_example_configs_parse(self):
        for name in REPO_CONFIGS.glob("*.yaml"):
            cfg = parse_config(name)
            assert cfg.kind in (
                "GainSweep",
                "AngleSweep",
                "HomodyneScan",
                "ImageSubregion",
                "ShapedLoEntanglement",
            )


class TestGainSweepScenario:
    def test_matches_closed_form(self, tmp_path):
        path = write_config(
            tmp_path,
            "kind: GainSweep\ngain: {start: 1.0, stop: 4.0, steps: 7}\nseed_power: 10000.0\n",
        )
        summary = run_scenario(parse_config(path), out_dir=tmp_path / "out")
        data = read_csv(tmp_path / "out" / "intensity_difference.csv")
        for gain, value in data:
            assert value == pytest.approx(-10.0 * math.log10(2.0 * gain - 1.0), abs=0.05)
        assert summary.headline["min_db"] == pytest.approx(
            -10.0 * math.log10(7.0), abs=0.05
        )
        assert summary.headline["gain_at_min"] == 4.0

    def test_cell_sweep_matches_direct_library_calls(self, tmp_path):
        import math as m

        from twinbeam import (
            CONJUGATE,
            PROBE,
            CellModel,
            distributed_cell_output,
            intensity_difference_db,
        )

        lossy = write_config(
            tmp_path,
            "kind: GainSweep\ngain: {start: 2.0, stop: 4.0, steps: 3}\n"
            "cell: {n_slices: 16, probe_transmission: 0.8}\n",
        )
        run_scenario(parse_config(lossy), out_dir=tmp_path / "b")
        data = read_csv(tmp_path / "b" / "intensity_difference.csv")
        for gain, value in data:
            cell = CellModel(
                n_slices=16,
                total_gain=gain,
                probe_transmission=0.8,
                conjugate_transmission=1.0,
            )
            state = distributed_cell_output(cell, m.sqrt(2.0e4), 0.0)
            direct = intensity_difference_db(state, [PROBE], [CONJUGATE])
            assert value == pytest.approx(direct, abs=1e-7)


class TestAngleSweepScenario:
    def test_outputs_and_mode_count(self, tmp_path):
        path = write_config(
            tmp_path,
            "kind: AngleSweep\n"
            "angular: {peak_gain: 5.0, center_mrad: 7.0, fwhm_mrad: 8.0, spot_mrad: 1.0}\n"
            "theta: {start: 1.0, stop: 13.0, steps: 25}\n",
        )
        summary = run_scenario(parse_config(path), out_dir=tmp_path / "out")
        assert summary.headline["mode_count"] == 96
        squeezing = read_csv(tmp_path / "out" / "squeezing_vs_angle.csv")
        gain = read_csv(tmp_path / "out" / "gain_vs_angle.csv")
        peak_row = np.argmax(gain[:, 1])
        assert gain[peak_row, 0] == pytest.approx(7.0, abs=1e-9)
        assert gain[peak_row, 1] == pytest.approx(5.0, abs=1e-9)
        # squeezing is deepest where gain peaks
        assert squeezing[np.argmin(squeezing[:, 1]), 0] == pytest.approx(7.0, abs=1e-9)
        assert summary.headline["theta_at_min_mrad"] == pytest.approx(7.0, abs=1e-9)


class TestHomodyneScanScenario:
    def test_efficiency_point_from_example(self, tmp_path):
        path = write_config(
            tmp_path,
            "kind: HomodyneScan\ngain: 2.0\nefficiency: 0.9\nphase_steps: 256\n",
        )
        summary = run_scenario(parse_config(path), out_dir=tmp_path / "out")
        expected_min = 10.0 * math.log10(0.9 * (math.sqrt(2.0) - 1.0) ** 2 + 0.1)
        assert summary.headline["min_diff_db"] == pytest.approx(expected_min, abs=5e-4)
        assert summary.headline["min_diff_db"] == pytest.approx(-5.9446, abs=1e-4)
        assert summary.headline["inseparability"] == pytest.approx(0.5088, abs=1e-4)
        report = json.loads((tmp_path / "out" / "entanglement.json").read_text())
        assert report["entangled"] is True
        assert summary.headline["inseparability"] == pytest.approx(
            round(report["inseparability"], 4), abs=1e-12
        )

    def test_noise_floor_produces_second_trace_pair(self, tmp_path):
        path = write_config(
            tmp_path,
            "kind: HomodyneScan\ngain: 2.0\nphase_steps: 64\n"
            "technical_noise: {electronic_floor_db: -15.0}\n",
        )
        summary = run_scenario(parse_config(path), out_dir=tmp_path / "out")
        assert "homodyne_diff_noisy.csv" in summary.files
        raw = read_csv(tmp_path / "out" / "homodyne_diff.csv")
        noisy = read_csv(tmp_path / "out" / "homodyne_diff_noisy.csv")
        assert np.all(noisy[:, 1] > raw[:, 1])


class TestImageSubregionScenario:
    def test_bundled_nt_measurements(self, tmp_path):
        config = (
            "kind: ImageSubregion\n"
            f"mask: {bundled_mask_path('nt_32x32')}\n"
            "regions:\n"
            f"  n: {bundled_mask_path('region_n_32x32')}\n"
            f"  t: {bundled_mask_path('region_t_32x32')}\n"
            "gain: 2.0\n"
            "seed_power: 100000000.0\n"
        )
        summary = run_scenario(parse_config(write_config(tmp_path, config)), out_dir=tmp_path / "out")
        m = summary.headline["measurements"]
        expected = -10.0 * math.log10(3.0)
        for key in ("whole_image_db", "n_db", "t_db"):
            assert m[key] == pytest.approx(expected, abs=1e-3)
        assert m["mismatched_n_vs_t_db"] == pytest.approx(-expected, abs=1e-3)
        assert (tmp_path / "out" / "probe.pgm").is_file()
        assert (tmp_path / "out" / "conjugate.pgm").is_file()

    def test_all_dark_mask_is_runtime_error(self, tmp_path):
        write_pgm(tmp_path / "black.pgm", np.zeros((4, 4), dtype=int), maxval=255)
        config = f"kind: ImageSubregion\nmask: black.pgm\ngain: 1.0\n"
        cfg = parse_config(write_config(tmp_path, config))
        with pytest.raises(MeasurementUndefinedError):
            run_scenario(cfg, out_dir=tmp_path / "out")


class TestShapedLoScenario:
    def test_t_mask_matches_single_pair_value(self, tmp_path):
        config = (
            "kind: ShapedLoEntanglement\n"
            f"lo_mask: {bundled_mask_path('t_lo_9x9')}\n"
            "gain: 2.0\n"
        )
        summary = run_scenario(parse_config(write_config(tmp_path, config)), out_dir=tmp_path / "out")
        expected = 2.0 * (math.sqrt(2.0) - math.sqrt(1.0)) ** 2
        assert summary.headline["inseparability"] == pytest.approx(expected, abs=1e-4)
        assert summary.headline["entangled"] is True
        report = json.loads((tmp_path / "out" / "entanglement.json").read_text())
        assert set(report) == {
            "var_x_minus",
            "var_p_plus",
            "inseparability",
            "squeezing_db_x",
            "squeezing_db_p",
            "entangled",
        }


class TestDeterminism:
    @pytest.mark.parametrize(
        "config",
        [
            "kind: GainSweep\ngain: {start: 1.0, stop: 4.0, steps: 9}\n",
            "kind: HomodyneScan\ngain: 2.0\nefficiency: 0.9\nphase_steps: 64\n"
            "technical_noise: {electronic_floor_db: -15.0}\n",
        ],
    )
    def test_reruns_are_byte_identical(self, tmp_path, config):
        cfg = parse_config(write_config(tmp_path, config))
        run_scenario(cfg, out_dir=tmp_path / "one")
        run_scenario(cfg, out_dir=tmp_path / "two")
        ones = sorted((tmp_path / "one").iterdir())
        twos = sorted((tmp_path / "two").iterdir())
        assert [p.name for p in ones] == [p.name for p in twos]
        for a, b in zip(ones, twos):
            assert a.read_bytes() == b.read_bytes()

    def test_threads_do_not_change_outputs(self, tmp_path):
        cfg = parse_config(
            write_config(tmp_path, "kind: GainSweep\ngain: {start: 1.0, stop: 4.0, steps: 16}\n")
        )
        run_scenario(cfg, out_dir=tmp_path / "serial", threads=1)
        run_scenario(cfg, out_dir=tmp_path / "parallel", threads=4)
        for name in ("intensity_difference.csv", "summary.json"):
            assert (tmp_path / "serial" / name).read_bytes() == (
                tmp_path / "parallel" / name
            ).read_bytes()

    def test_rerun_overwrites_in_place(self, tmp_path):
        cfg = parse_config(
            write_config(tmp_path, "kind: GainSweep\ngain: {start: 1.0, stop: 2.0, steps: 4}\n")
        )
        run_scenario(cfg, out_dir=tmp_path / "out")
        first = (tmp_path / "out" / "summary.json").read_bytes()
        run_scenario(cfg, out_dir=tmp_path / "out")
        assert (tmp_path / "out" / "summary.json").read_bytes() == first


class TestEmitSummary:
    def test_empty_manifest_is_valid(self, tmp_path):
        summary = ResultSummary(
            kind="GainSweep",
            label="x",
            headline={},
            files=[],
            engine_version="0",
            config={},
        )
        emit_summary(summary, tmp_path / "summary.json")
        payload = json.loads((tmp_path / "summary.json").read_text())
        assert payload["files"] == []

    def test_missing_manifest_entry_is_integrity_error(self, tmp_path):
        summary = ResultSummary(
            kind="GainSweep",
            label="x",
            headline={},
            files=["ghost.csv"],
            engine_version="0",
            config={},
        )
        with pytest.raises(IntegrityError):
            emit_summary(summary, tmp_path / "summary.json")

    def test_empty_manifest_file_is_integrity_error(self, tmp_path):
        (tmp_path / "empty.csv").write_text("")
        summary = ResultSummary(
            kind="GainSweep",
            label="x",
            headline={},
            files=["empty.csv"],
            engine_version="0",
            config={},
        )
        with pytest.raises(IntegrityError):
            emit_summary(summary, tmp_path / "summary.json")

    def test_summary_lists_written_files(self, tmp_path):
        cfg = parse_config(
            write_config(tmp_path, "kind: GainSweep\ngain: {start: 1.0, stop: 2.0, steps: 4}\n")
        )
        summary = run_scenario(cfg, out_dir=tmp_path / "out")
        payload = json.loads((tmp_path / "out" / "summary.json").read_text())
        assert payload["files"] == summary.files
        for name in payload["files"]:
            assert (tmp_path / "out" / name).stat().st_size > 0
        assert payload["engine_version"]
        assert payload["config"]["kind"] == "GainSweep"
