"""Direct and homodyne detection with standard-quantum-limit referencing.

Normalization conventions:

* intensity-difference measurements are referenced to the output SQL, the
  total mean photon number of the detected beams (shot noise of coherent
  beams of the same power);
* joint homodyne variables are referenced to the two-mode vacuum, whose
  difference/sum variance is exactly 1, so dB values are 10·log₁₀(V).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .core import Beam, GaussianState, ModeLabel, photon_stats
from .errors import MeasurementUndefinedError, ValidationError

#: allowed deviation of an LO profile from unit L2 norm
_NORM_TOL = 1e-12


@dataclass(frozen=True)
class HomodyneSpec:
    """One homodyne detector: LO spatial profile, LO phase, efficiency.

    ``weights`` is the LO amplitude profile over the pixels of one beam and
    must be L2-normalized: the LO defines a single measured mode.
    """

    weights: np.ndarray
    lo_phase: float = 0.0
    efficiency: float = 1.0

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if w.size == 0:
            raise ValidationError("LO profile must have at least one pixel")
        norm = np.linalg.norm(w)
        if abs(norm - 1.0) > _NORM_TOL:
            raise ValidationError(f"LO profile must be L2-normalized, got |w| = {norm!r}")
        if not 0.0 <= self.efficiency <= 1.0:
            raise ValidationError(f"efficiency must be in [0, 1], got {self.efficiency}")
        object.__setattr__(self, "weights", w)
        w.flags.writeable = False


@dataclass(frozen=True)
class NoiseTrace:
    """A scan result: abscissa (phase, angle, or gain) vs noise power in dB."""

    abscissa: np.ndarray
    values_db: np.ndarray
    label: str = ""

    def __post_init__(self):
        a = np.asarray(self.abscissa, dtype=float).reshape(-1)
        v = np.asarray(self.values_db, dtype=float).reshape(-1)
        if a.size == 0:
            raise ValidationError("trace must contain at least one point")
        if a.size != v.size:
            raise ValidationError("abscissa and values must have equal length")
        if np.any(np.diff(a) <= 0.0):
            raise ValidationError("abscissa must be strictly increasing")
        if not np.all(np.isfinite(v)) or not np.all(np.isfinite(a)):
            raise ValidationError("trace values must be finite")
        object.__setattr__(self, "abscissa", a)
        object.__setattr__(self, "values_db", v)
        a.flags.writeable = False
        v.flags.writeable = False

    def to_csv_text(self) -> str:
        lines = [f"# {self.label}", "abscissa,value_db"]
        for x, y in zip(self.abscissa, self.values_db):
            lines.append(f"{format_sig9(x)},{format_sig9(y)}")
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(self.to_csv_text())


@dataclass(frozen=True)
class TechnicalNoiseSpec:
    """Constant additive noise floors in dB relative to the SQL.

    ``-inf`` disables a floor.  These model background traces (electronic
    noise, scattered pump light) added in linear power after the quantum
    calculation, not propagated through states.
    """

    electronic_floor_db: float = -math.inf
    pump_scatter_db: float = -math.inf

    def __post_init__(self):
        for name in ("electronic_floor_db", "pump_scatter_db"):
            v = getattr(self, name)
            if math.isnan(v) or v == math.inf:
                raise ValidationError(f"{name} must be finite or -inf, got {v}")


def format_sig9(x: float) -> str:
    """Fixed 9-significant-digit formatting used for all CSV output."""
    return f"{x:.9g}"


def db(ratio: float) -> float:
    return 10.0 * math.log10(ratio)


# ---------------------------------------------------------------------------
# intensity (direct) detection
# ---------------------------------------------------------------------------


def _intensity_moments(state, probe_set, conj_set):
    """Mean photon numbers and Var(N_probe − N_conj) for two mode sets."""
    from .imaging import PairBlockState  # local import to avoid a cycle

    if isinstance(state, PairBlockState):
        return state.region_intensity_moments(probe_set, conj_set)
    probe_set = tuple(probe_set)
    conj_set = tuple(conj_set)
    if not probe_set or not conj_set:
        raise ValidationError("probe and conjugate detection sets must be nonempty")
    if set(probe_set) & set(conj_set):
        raise ValidationError("probe and conjugate detection sets must be disjoint")
    modes = probe_set + conj_set
    means, ncov = photon_stats(state, modes)
    signs = np.concatenate([np.ones(len(probe_set)), -np.ones(len(conj_set))])
    variance = float(signs @ ncov @ signs)
    mean_probe = float(means[: len(probe_set)].sum())
    mean_conj = float(means[len(probe_set) :].sum())
    return mean_probe, mean_conj, variance


def sql_intensity_difference(
    state, probe_set: Sequence[ModeLabel], conj_set: Sequence[ModeLabel]
) -> float:
    """Output SQL for intensity-difference detection: ⟨N_p⟩ + ⟨N_c⟩."""
    mean_probe, mean_conj, _ = _intensity_moments(state, probe_set, conj_set)
    return mean_probe + mean_conj


def intensity_difference_db(
    state, probe_set: Sequence[ModeLabel], conj_set: Sequence[ModeLabel]
) -> float:
    """Intensity-difference noise relative to the output SQL, in dB.

    Raises :class:`MeasurementUndefinedError` when the SQL reference is zero
    (unseeded vacuum signal): homodyne, not direct detection, is the right
    tool there.
    """
    mean_probe, mean_conj, variance = _intensity_moments(state, probe_set, conj_set)
    sql = mean_probe + mean_conj
    if sql <= 0.0:
        raise MeasurementUndefinedError(
            "bright-beam measurement undefined: the SQL reference is zero "
            "(unseeded vacuum signal)"
        )
    return db(variance / sql)


# ---------------------------------------------------------------------------
# homodyne detection
# ---------------------------------------------------------------------------


def _beam_pixel_indices(state: GaussianState, beam: Beam) -> list[int]:
    """Mode positions of one beam's pixels, in pixel order."""
    found = sorted(
        (label.pixel, k) for k, label in enumerate(state.modes) if label.beam is beam
    )
    return [k for _, k in found]


def _dense_joint_variance(state, wp, wc, theta_p, theta_c):
    """Var of the joint homodyne variable for a dense state (no efficiency)."""
    idx_p = _beam_pixel_indices(state, Beam.PROBE)
    idx_c = _beam_pixel_indices(state, Beam.CONJUGATE)
    if len(wp) != len(idx_p):
        raise ValidationError(
            f"probe LO profile has {len(wp)} pixels, state has {len(idx_p)}"
        )
    if len(wc) != len(idx_c):
        raise ValidationError(
            f"conjugate LO profile has {len(wc)} pixels, state has {len(idx_c)}"
        )
    c = np.zeros(2 * state.n_modes)
    for w, k in zip(wp, idx_p):
        c[2 * k] += w * math.cos(theta_p)
        c[2 * k + 1] += w * math.sin(theta_p)
    for w, k in zip(wc, idx_c):
        c[2 * k] += w * math.cos(theta_c)
        c[2 * k + 1] += w * math.sin(theta_c)
    return float(c @ state.cov @ c)


def _joint_variance(state, probe_spec, conj_spec, phase, sign):
    """Measured Var(A_p ± A_c) in vacuum-=1 units, efficiencies included."""
    from .imaging import PairBlockState

    theta_p = phase + probe_spec.lo_phase
    theta_c = phase + conj_spec.lo_phase
    ep, ec = probe_spec.efficiency, conj_spec.efficiency
    wp = math.sqrt(ep) * probe_spec.weights
    wc = sign * math.sqrt(ec) * conj_spec.weights
    if isinstance(state, PairBlockState):
        if probe_spec.weights.shape[0] != state.n_pixels:
            raise ValidationError(
                f"probe LO profile has {probe_spec.weights.shape[0]} pixels, "
                f"state has {state.n_pixels}"
            )
        if conj_spec.weights.shape[0] != state.n_pixels:
            raise ValidationError(
                f"conjugate LO profile has {conj_spec.weights.shape[0]} pixels, "
                f"state has {state.n_pixels}"
            )
        v = _kernels.joint_quadrature_variance_blocks(
            state.covs,
            np.ascontiguousarray(wp),
            np.ascontiguousarray(wc),
            math.cos(theta_p),
            math.sin(theta_p),
            math.cos(theta_c),
            math.sin(theta_c),
        )
    else:
        v = _dense_joint_variance(state, wp, wc, theta_p, theta_c)
    return v + 0.5 * (1.0 - ep) + 0.5 * (1.0 - ec)


def homodyne_variance(state, spec: HomodyneSpec, beam: Beam) -> float:
    """Variance of A_θ = X cosθ + P sinθ for the LO-defined mode of one beam.

    Detection efficiency mixes in vacuum: η·V + (1−η)·(1/2); the vacuum reads
    1/2 at any phase and efficiency.
    """
    from .imaging import PairBlockState

    theta = spec.lo_phase
    if isinstance(state, PairBlockState):
        if spec.weights.shape[0] != state.n_pixels:
            raise ValidationError(
                f"LO profile has {spec.weights.shape[0]} pixels, state has {state.n_pixels}"
            )
        zeros = np.zeros(state.n_pixels)
        wp = spec.weights if beam is Beam.PROBE else zeros
        wc = spec.weights if beam is Beam.CONJUGATE else zeros
        v = _kernels.joint_quadrature_variance_blocks(
            np.ascontiguousarray(state.covs),
            np.ascontiguousarray(wp),
            np.ascontiguousarray(wc),
            math.cos(theta),
            math.sin(theta),
            math.cos(theta),
            math.sin(theta),
        )
    else:
        idx = _beam_pixel_indices(state, beam)
        if len(spec.weights) != len(idx):
            raise ValidationError(
                f"LO profile has {len(spec.weights)} pixels, beam has {len(idx)}"
            )
        c = np.zeros(2 * state.n_modes)
        for w, k in zip(spec.weights, idx):
            c[2 * k] = w * math.cos(theta)
            c[2 * k + 1] = w * math.sin(theta)
        v = float(c @ state.cov @ c)
    return spec.efficiency * v + (1.0 - spec.efficiency) * 0.5


def joint_phase_scan(
    state, probe_spec: HomodyneSpec, conj_spec: HomodyneSpec, phases
) -> tuple[NoiseTrace, NoiseTrace]:
    """Scan the global LO phase; return (difference, sum) traces in dB.

    Both LO phases are scanned in unison (any per-spec ``lo_phase`` acts as a
    fixed offset).  The two-mode vacuum reads 0 dB at every phase; for a
    squeezed pair the minima of the two traces alternate every π/2.
    """
    phases = np.asarray(phases, dtype=float).reshape(-1)
    if phases.size == 0:
        raise ValidationError("phase list must be nonempty")
    diff_db = np.empty(phases.size)
    sum_db = np.empty(phases.size)
    for i, phase in enumerate(phases):
        diff_db[i] = db(_joint_variance(state, probe_spec, conj_spec, phase, -1.0))
        sum_db[i] = db(_joint_variance(state, probe_spec, conj_spec, phase, +1.0))
    return (
        NoiseTrace(phases, diff_db, label="difference"),
        NoiseTrace(phases, sum_db, label="sum"),
    )


def apply_technical_noise(trace: NoiseTrace, spec: TechnicalNoiseSpec) -> NoiseTrace:
    """Add constant noise floors to a trace in linear power."""
    floor = 10.0 ** (spec.electronic_floor_db / 10.0)
    scatter = 10.0 ** (spec.pump_scatter_db / 10.0)
    linear = 10.0 ** (trace.values_db / 10.0) + floor + scatter
    return NoiseTrace(trace.abscissa, 10.0 * np.log10(linear), label=trace.label)
