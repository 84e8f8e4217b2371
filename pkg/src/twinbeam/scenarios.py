"""Scenario runner: parse YAML configs, execute named experiments, emit files.

Five scenario kinds reproduce the headline experiments at desk scale:

* ``GainSweep`` — intensity-difference squeezing vs amplifier gain;
* ``AngleSweep`` — gain and squeezing vs pump-probe angle, with mode count;
* ``HomodyneScan`` — dual-homodyne LO phase scan and inseparability;
* ``ImageSubregion`` — masked-image amplification with razor-blade subregion
  intensity-difference measurements;
* ``ShapedLoEntanglement`` — entanglement of an image mode selected by a
  shaped local oscillator.

Configs are strict: unknown keys are rejected with their key path.  Runs are
deterministic; re-running an identical config produces byte-identical files.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .amplifier import (
    AngularGainModel,
    CellModel,
    angular_gain,
    distributed_cell_output,
    estimate_mode_count,
    seeded_amplifier_output,
)
from .core import CONJUGATE, PROBE, Beam
from .detection import (
    HomodyneSpec,
    NoiseTrace,
    TechnicalNoiseSpec,
    apply_technical_noise,
    format_sig9,
    intensity_difference_db,
    joint_phase_scan,
)
from .entanglement import inseparability
from .errors import ConfigError, IntegrityError, TwinbeamError, ValidationError
from .imaging import (
    BeamImage,
    RegionSelector,
    amplify_image,
    load_mask,
    load_region,
    lo_profile_from_mask,
    masked_seed,
    subregion_intensity_difference_db,
    write_intensity_pgm,
)

#: environment variable consulted for the default output directory
OUTPUT_DIR_ENV = "TWINBEAM_OUT"

SCENARIO_KINDS = (
    "GainSweep",
    "AngleSweep",
    "HomodyneScan",
    "ImageSubregion",
    "ShapedLoEntanglement",
)


@dataclass
class ScenarioConfig:
    """A fully validated scenario with every default materialized.

    ``echo`` is the canonical nested form of the resolved configuration and
    is reproduced verbatim in the run summary.
    """

    kind: str
    label: str
    output_dir: str | None
    random_seed: int
    technical_noise: TechnicalNoiseSpec
    echo: dict
    seed_power: float | None = None
    efficiency: float | None = None
    gain: float | None = None
    gain_sweep: tuple[float, float, int] | None = None
    theta_sweep: tuple[float, float, int] | None = None
    mode_count_range: tuple[float, float] | None = None
    cell: CellModel | None = None
    angular: AngularGainModel | None = None
    phase_steps: int | None = None
    angular_pitch_mrad: float | None = None
    mask_path: str | None = None
    region_paths: dict[str, str] = field(default_factory=dict)
    lo_mask_path: str | None = None

    @property
    def has_noise_floors(self) -> bool:
        return (
            self.technical_noise.electronic_floor_db != -math.inf
            or self.technical_noise.pump_scatter_db != -math.inf
        )


@dataclass
class ResultSummary:
    """What a run produced: headline numbers, file manifest, config echo."""

    kind: str
    label: str
    headline: dict
    files: list[str]
    engine_version: str
    config: dict

    def to_json(self) -> str:
        payload = {
            "kind": self.kind,
            "label": self.label,
            "headline": self.headline,
            "files": self.files,
            "engine_version": self.engine_version,
            "config": self.config,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------

_MISSING = object()


class _Section:
    """A mapping view that tracks its key path and rejects leftovers."""

    def __init__(self, data: dict, path: str, strict: bool):
        self.data = dict(data)
        self.path = path
        self.strict = strict

    def _child_path(self, key: str) -> str:
        return f"{self.path}.{key}" if self.path else key

    def take(self, key: str, default=_MISSING):
        if key in self.data:
            return self.data.pop(key)
        if default is _MISSING:
            raise ConfigError("required key missing", self._child_path(key))
        return default

    def take_number(self, key, default=_MISSING, *, lo=None, hi=None, lo_open=False):
        raw = self.take(key, default)
        if default is not _MISSING and raw is default:
            return default
        path = self._child_path(key)
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            raise ConfigError(f"expected a number, got {raw!r}", path)
        value = float(raw)
        if lo is not None and (value <= lo if lo_open else value < lo):
            op = ">" if lo_open else ">="
            raise ConfigError(f"must be {op} {lo}, got {value}", path)
        if hi is not None and value > hi:
            raise ConfigError(f"must be <= {hi}, got {value}", path)
        return value

    def take_int(self, key, default=_MISSING, *, lo=None):
        raw = self.take(key, default)
        path = self._child_path(key)
        if isinstance(raw, bool) or not isinstance(raw, int):
            raise ConfigError(f"expected an integer, got {raw!r}", path)
        if lo is not None and raw < lo:
            raise ConfigError(f"must be >= {lo}, got {raw}", path)
        return raw

    def take_str(self, key, default=_MISSING):
        raw = self.take(key, default)
        if raw is not default and not isinstance(raw, str):
            raise ConfigError(f"expected a string, got {raw!r}", self._child_path(key))
        return raw

    def subsection(self, key: str, default=_MISSING) -> "_Section | None":
        raw = self.take(key, default)
        if raw is default and default is not _MISSING:
            return None
        if not isinstance(raw, dict):
            raise ConfigError(f"expected a mapping, got {raw!r}", self._child_path(key))
        return _Section(raw, self._child_path(key), self.strict)

    def finish(self):
        if self.strict and self.data:
            key = sorted(self.data)[0]
            raise ConfigError("unknown key", self._child_path(key))


def _resolve_file(path_str: str, base: Path, key_path: str) -> str:
    path = Path(path_str)
    if not path.is_absolute():
        path = base / path
    if not path.is_file():
        raise ConfigError(f"referenced file does not exist: {path}", key_path)
    return str(path)


def _parse_noise(section: _Section | None) -> tuple[TechnicalNoiseSpec, dict]:
    if section is None:
        spec = TechnicalNoiseSpec()
    else:
        floor = section.take_number("electronic_floor_db", None)
        scatter = section.take_number("pump_scatter_db", None)
        section.finish()
        spec = TechnicalNoiseSpec(
            electronic_floor_db=-math.inf if floor is None else floor,
            pump_scatter_db=-math.inf if scatter is None else scatter,
        )
    echo = {
        "electronic_floor_db": None
        if spec.electronic_floor_db == -math.inf
        else spec.electronic_floor_db,
        "pump_scatter_db": None
        if spec.pump_scatter_db == -math.inf
        else spec.pump_scatter_db,
    }
    return spec, echo


def _parse_sweep(section: _Section, *, lo, default_start, default_stop, default_steps):
    start = section.take_number("start", default_start, lo=lo)
    stop = section.take_number("stop", default_stop, lo=lo)
    steps = section.take_int("steps", default_steps, lo=1)
    if steps > 1 and not stop > start:
        raise ConfigError(f"stop must exceed start, got [{start}, {stop}]", section.path)
    section.finish()
    return start, stop, steps


def parse_config(path, *, strict: bool = True) -> ScenarioConfig:
    """Load and validate a scenario config; all defaults are materialized.

    Raises :class:`ConfigError` (with the offending key path) on unknown
    keys in strict mode, out-of-range values, or missing referenced files.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError(f"cannot read config file: {err}") from err
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as err:
        raise ConfigError(f"invalid YAML: {err}") from err
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping of keys to values")
    base = path.resolve().parent

    top = _Section(raw, "", strict)
    kind = top.take_str("kind")
    if kind not in SCENARIO_KINDS:
        raise ConfigError(
            f"unknown scenario kind {kind!r}; expected one of {', '.join(SCENARIO_KINDS)}",
            "kind",
        )
    label = top.take_str("label", kind)
    output_dir = top.take_str("output_dir", None)
    random_seed = top.take_int("random_seed", 0)
    noise, noise_echo = _parse_noise(top.subsection("technical_noise", None))

    cfg = ScenarioConfig(
        kind=kind,
        label=label,
        output_dir=output_dir,
        random_seed=random_seed,
        technical_noise=noise,
        echo={},
    )
    echo = {
        "kind": kind,
        "label": label,
        "output_dir": output_dir,
        "random_seed": random_seed,
        "technical_noise": noise_echo,
    }

    try:
        if kind == "GainSweep":
            sweep = top.subsection("gain", None)
            if sweep is None:
                sweep = _Section({}, "gain", strict)
            cfg.gain_sweep = _parse_sweep(
                sweep, lo=1.0, default_start=1.0, default_stop=4.0, default_steps=31
            )
            cfg.seed_power = top.take_number("seed_power", 1.0e4, lo=0.0, lo_open=True)
            cell = top.subsection("cell", None)
            if cell is not None:
                cfg.cell = CellModel(
                    n_slices=cell.take_int("n_slices", 64, lo=1),
                    total_gain=max(cfg.gain_sweep[0], 1.0),
                    probe_transmission=cell.take_number(
                        "probe_transmission", 0.8, lo=0.0, lo_open=True, hi=1.0
                    ),
                    conjugate_transmission=cell.take_number(
                        "conjugate_transmission", 1.0, lo=0.0, lo_open=True, hi=1.0
                    ),
                )
                cell.finish()
            echo.update(
                {
                    "gain": {
                        "start": cfg.gain_sweep[0],
                        "stop": cfg.gain_sweep[1],
                        "steps": cfg.gain_sweep[2],
                    },
                    "seed_power": cfg.seed_power,
                    "cell": None
                    if cfg.cell is None
                    else {
                        "n_slices": cfg.cell.n_slices,
                        "probe_transmission": cfg.cell.probe_transmission,
                        "conjugate_transmission": cfg.cell.conjugate_transmission,
                    },
                }
            )

        elif kind == "AngleSweep":
            ang = top.subsection("angular", None)
            if ang is None:
                ang = _Section({}, "angular", strict)
            cfg.angular = AngularGainModel(
                peak_gain=ang.take_number("peak_gain", 5.0, lo=1.0),
                center_mrad=ang.take_number("center_mrad", 7.0, lo=0.0),
                fwhm_mrad=ang.take_number("fwhm_mrad", 8.0, lo=0.0, lo_open=True),
                spot_mrad=ang.take_number("spot_mrad", 1.0, lo=0.0, lo_open=True),
            )
            ang.finish()
            sweep = top.subsection("theta", None)
            if sweep is None:
                sweep = _Section({}, "theta", strict)
            cfg.theta_sweep = _parse_sweep(
                sweep, lo=0.0, default_start=0.0, default_stop=20.0, default_steps=81
            )
            counting = top.subsection("mode_count", None)
            if counting is None:
                counting = _Section({}, "mode_count", strict)
            theta_min = counting.take_number("theta_min", 2.0, lo=0.0)
            theta_max = counting.take_number("theta_max", 10.0, lo=0.0)
            counting.finish()
            if not theta_max > theta_min:
                raise ConfigError(
                    f"theta_max must exceed theta_min, got [{theta_min}, {theta_max}]",
                    "mode_count",
                )
            cfg.mode_count_range = (theta_min, theta_max)
            cfg.seed_power = top.take_number("seed_power", 1.0e4, lo=0.0, lo_open=True)
            echo.update(
                {
                    "angular": {
                        "peak_gain": cfg.angular.peak_gain,
                        "center_mrad": cfg.angular.center_mrad,
                        "fwhm_mrad": cfg.angular.fwhm_mrad,
                        "spot_mrad": cfg.angular.spot_mrad,
                    },
                    "theta": {
                        "start": cfg.theta_sweep[0],
                        "stop": cfg.theta_sweep[1],
                        "steps": cfg.theta_sweep[2],
                    },
                    "mode_count": {"theta_min": theta_min, "theta_max": theta_max},
                    "seed_power": cfg.seed_power,
                }
            )

        elif kind == "HomodyneScan":
            cfg.gain = top.take_number("gain", 2.0, lo=1.0)
            cfg.efficiency = top.take_number("efficiency", 1.0, lo=0.0, hi=1.0)
            cfg.phase_steps = top.take_int("phase_steps", 256, lo=4)
            echo.update(
                {
                    "gain": cfg.gain,
                    "efficiency": cfg.efficiency,
                    "phase_steps": cfg.phase_steps,
                }
            )

        elif kind == "ImageSubregion":
            mask_raw = top.take_str("mask")
            cfg.mask_path = _resolve_file(mask_raw, base, "mask")
            regions = top.subsection("regions", None)
            if regions is not None:
                for name in sorted(regions.data):
                    raw_path = regions.take_str(name)
                    cfg.region_paths[name] = _resolve_file(
                        raw_path, base, f"regions.{name}"
                    )
                regions.finish()
            cfg.gain = top.take_number("gain", 2.0, lo=1.0)
            cfg.seed_power = top.take_number("seed_power", 1.0e8, lo=0.0, lo_open=True)
            cfg.angular_pitch_mrad = top.take_number(
                "angular_pitch_mrad", 0.25, lo=0.0, lo_open=True
            )
            echo.update(
                {
                    "mask": cfg.mask_path,
                    "regions": dict(sorted(cfg.region_paths.items())),
                    "gain": cfg.gain,
                    "seed_power": cfg.seed_power,
                    "angular_pitch_mrad": cfg.angular_pitch_mrad,
                }
            )

        elif kind == "ShapedLoEntanglement":
            lo_raw = top.take_str("lo_mask")
            cfg.lo_mask_path = _resolve_file(lo_raw, base, "lo_mask")
            cfg.gain = top.take_number("gain", 2.0, lo=1.0)
            cfg.efficiency = top.take_number("efficiency", 1.0, lo=0.0, hi=1.0)
            echo.update(
                {
                    "lo_mask": cfg.lo_mask_path,
                    "gain": cfg.gain,
                    "efficiency": cfg.efficiency,
                }
            )
    except ValidationError as err:
        raise ConfigError(str(err)) from err

    top.finish()
    cfg.echo = echo
    return cfg


# ---------------------------------------------------------------------------
# scenario execution
# ---------------------------------------------------------------------------


def _map_points(fn, items, threads: int) -> list:
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _round_db(value: float) -> float:
    return round(value, 4)


def _write_trace_files(cfg, out: Path, name: str, trace: NoiseTrace) -> list[str]:
    files = [f"{name}.csv"]
    trace.write_csv(out / files[0])
    if cfg.has_noise_floors:
        noisy = apply_technical_noise(trace, cfg.technical_noise)
        noisy = NoiseTrace(noisy.abscissa, noisy.values_db, label=f"{trace.label} with noise floors")
        files.append(f"{name}_noisy.csv")
        noisy.write_csv(out / files[1])
    return files


def _run_gain_sweep(cfg: ScenarioConfig, out: Path, threads: int):
    start, stop, steps = cfg.gain_sweep
    gains = np.linspace(start, stop, steps)
    seed_x = math.sqrt(2.0 * cfg.seed_power)

    def point(gain):
        if cfg.cell is not None:
            cell = CellModel(
                n_slices=cfg.cell.n_slices,
                total_gain=gain,
                probe_transmission=cfg.cell.probe_transmission,
                conjugate_transmission=cfg.cell.conjugate_transmission,
            )
            state = distributed_cell_output(cell, seed_x, 0.0)
        else:
            state = seeded_amplifier_output(gain, seed_x, 0.0)
        return intensity_difference_db(state, [PROBE], [CONJUGATE])

    values = _map_points(point, gains, threads)
    trace = NoiseTrace(gains, values, label="intensity difference vs gain")
    files = _write_trace_files(cfg, out, "intensity_difference", trace)
    best = int(np.argmin(trace.values_db))
    headline = {
        "min_db": _round_db(float(trace.values_db[best])),
        "gain_at_min": _round_db(float(gains[best])),
    }
    return headline, files


def _run_angle_sweep(cfg: ScenarioConfig, out: Path, threads: int):
    start, stop, steps = cfg.theta_sweep
    thetas = np.linspace(start, stop, steps)
    gains = angular_gain(cfg.angular, thetas)
    seed_x = math.sqrt(2.0 * cfg.seed_power)

    def point(gain):
        state = seeded_amplifier_output(float(gain), seed_x, 0.0)
        return intensity_difference_db(state, [PROBE], [CONJUGATE])

    values = _map_points(point, gains, threads)
    trace = NoiseTrace(thetas, values, label="intensity difference vs angle")
    files = _write_trace_files(cfg, out, "squeezing_vs_angle", trace)

    gain_lines = ["# gain vs angle", "abscissa,gain"]
    gain_lines += [f"{format_sig9(t)},{format_sig9(g)}" for t, g in zip(thetas, gains)]
    (out / "gain_vs_angle.csv").write_text("\n".join(gain_lines) + "\n", encoding="ascii")
    files.append("gain_vs_angle.csv")

    count = estimate_mode_count(cfg.angular, *cfg.mode_count_range)
    best = int(np.argmin(trace.values_db))
    headline = {
        "min_db": _round_db(float(trace.values_db[best])),
        "theta_at_min_mrad": _round_db(float(thetas[best])),
        "mode_count": count,
    }
    return headline, files


def _run_homodyne_scan(cfg: ScenarioConfig, out: Path, threads: int):
    state = seeded_amplifier_output(cfg.gain, 0.0, 0.0)  # two-mode squeezed vacuum
    spec = HomodyneSpec(np.array([1.0]), efficiency=cfg.efficiency)
    phases = np.linspace(0.0, 2.0 * math.pi, cfg.phase_steps, endpoint=False)
    diff, total = joint_phase_scan(state, spec, spec, phases)
    files = _write_trace_files(cfg, out, "homodyne_diff", diff)
    files += _write_trace_files(cfg, out, "homodyne_sum", total)

    report = inseparability(state, spec, spec)
    (out / "entanglement.json").write_text(report.to_json(), encoding="ascii")
    files.append("entanglement.json")
    headline = {
        "min_diff_db": _round_db(float(diff.values_db.min())),
        "min_sum_db": _round_db(float(total.values_db.min())),
        "inseparability": _round_db(report.inseparability),
        "entangled": report.entangled,
    }
    return headline, files


def _run_image_subregion(cfg: ScenarioConfig, out: Path, threads: int):
    mask = load_mask(cfg.mask_path, angular_pitch_mrad=cfg.angular_pitch_mrad)
    seed = masked_seed(mask.grid, mask, math.sqrt(cfg.seed_power))
    state = amplify_image(seed, cfg.gain)

    regions = {
        name: load_region(path, mask.grid) for name, path in cfg.region_paths.items()
    }
    full = RegionSelector.full(mask.grid)

    measurements = {
        "whole_image_db": _round_db(subregion_intensity_difference_db(state, full, full))
    }
    for name, region in sorted(regions.items()):
        measurements[f"{name}_db"] = _round_db(
            subregion_intensity_difference_db(state, region, region)
        )
    for a_name, a_region in sorted(regions.items()):
        for b_name, b_region in sorted(regions.items()):
            if a_name >= b_name:
                continue
            if np.any(a_region.included & b_region.included):
                continue  # mismatched detection needs disjoint regions
            measurements[f"mismatched_{a_name}_vs_{b_name}_db"] = _round_db(
                subregion_intensity_difference_db(state, a_region, b_region)
            )

    write_intensity_pgm(out / "probe.pgm", state.intensity_image(Beam.PROBE))
    write_intensity_pgm(out / "conjugate.pgm", state.intensity_image(Beam.CONJUGATE))
    files = ["probe.pgm", "conjugate.pgm"]
    headline = {"measurements": measurements, "n_pixels": mask.grid.n_pixels}
    return headline, files


def _run_shaped_lo(cfg: ScenarioConfig, out: Path, threads: int):
    lo_mask = load_mask(cfg.lo_mask_path)
    state = amplify_image(BeamImage.dark(lo_mask.grid), cfg.gain)  # unseeded
    spec = lo_profile_from_mask(lo_mask, efficiency=cfg.efficiency)
    report = inseparability(state, spec, spec)
    (out / "entanglement.json").write_text(report.to_json(), encoding="ascii")
    lo_intensity = (spec.weights**2).reshape(lo_mask.grid.height, lo_mask.grid.width)
    write_intensity_pgm(out / "lo_intensity.pgm", lo_intensity)
    files = ["entanglement.json", "lo_intensity.pgm"]
    headline = {
        "inseparability": _round_db(report.inseparability),
        "squeezing_db_x": _round_db(report.squeezing_db_x),
        "squeezing_db_p": _round_db(report.squeezing_db_p),
        "entangled": report.entangled,
    }
    return headline, files


_RUNNERS = {
    "GainSweep": _run_gain_sweep,
    "AngleSweep": _run_angle_sweep,
    "HomodyneScan": _run_homodyne_scan,
    "ImageSubregion": _run_image_subregion,
    "ShapedLoEntanglement": _run_shaped_lo,
}


def resolve_output_dir(cfg: ScenarioConfig, override: str | None = None) -> Path:
    """--out flag > config's output_dir > $TWINBEAM_OUT > current directory."""
    for candidate in (override, cfg.output_dir, os.environ.get(OUTPUT_DIR_ENV)):
        if candidate:
            return Path(candidate)
    return Path(".")


def run_scenario(
    cfg: ScenarioConfig, out_dir=None, threads: int = 1
) -> ResultSummary:
    """Execute a scenario and write its outputs plus ``summary.json``.

    Deterministic: identical configs produce byte-identical files.  Scenario
    headline numbers come from direct library calls; the runner adds no
    arithmetic of its own beyond rounding for display.
    """
    from twinbeam import __version__

    out = resolve_output_dir(cfg, None if out_dir is None else str(out_dir))
    out.mkdir(parents=True, exist_ok=True)
    headline, files = _RUNNERS[cfg.kind](cfg, out, threads)
    summary = ResultSummary(
        kind=cfg.kind,
        label=cfg.label,
        headline=headline,
        files=files,
        engine_version=__version__,
        config=cfg.echo,
    )
    emit_summary(summary, out / "summary.json")
    return summary


def emit_summary(summary: ResultSummary, path) -> None:
    """Verify the manifest against disk, then write the summary JSON."""
    path = Path(path)
    for name in summary.files:
        target = path.parent / name
        if not target.is_file():
            raise IntegrityError(f"manifest entry missing on disk: {target}")
        if target.stat().st_size == 0:
            raise IntegrityError(f"manifest entry is empty: {target}")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(summary.to_json())
