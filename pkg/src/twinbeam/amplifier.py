"""Four-wave-mixing amplifier building blocks.

The amplifier is a phase-insensitive two-mode squeezer acting on a
probe/conjugate pair: a_p → √G a_p + √(G−1) a_c†, with √G = cosh(κt).
In this sign convention the joint quadratures X₋ = X_p − X_c and
P₊ = P_p + P_c are the squeezed ones, each scaling by e^{−r} with
r = κt = arccosh(√G).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    CONJUGATE,
    PROBE,
    GaussianState,
    ModeLabel,
    SymplecticOp,
    apply_channel,
    apply_symplectic,
    displace,
    loss_channel,
    vacuum_state,
)
from .errors import ValidationError

#: exact FWHM-to-sigma conversion for a Gaussian profile
_FWHM_TO_SIGMA = 2.0 * math.sqrt(2.0 * math.log(2.0))

#: default slice count for the distributed gain/loss cell
DEFAULT_N_SLICES = 64


def squeeze_parameter(gain: float) -> float:
    """Squeeze parameter r = arccosh(√G) of a gain-G two-mode squeezer."""
    if gain < 1.0:
        raise ValidationError(f"gain must be >= 1, got {gain}")
    return math.acosh(math.sqrt(gain))


@dataclass(frozen=True)
class TwoModeSqueezerSpec:
    """Gain and target pair of a single two-mode squeezer."""

    gain: float
    pair: tuple[ModeLabel, ModeLabel] = (PROBE, CONJUGATE)

    def __post_init__(self):
        if self.gain < 1.0:
            raise ValidationError(f"gain must be >= 1, got {self.gain}")
        if self.pair[0] == self.pair[1]:
            raise ValidationError("probe and conjugate labels must differ")


def tms_matrix(gain: float) -> np.ndarray:
    """4×4 symplectic matrix of the two-mode squeezer, basis (x_p,p_p,x_c,p_c)."""
    if gain < 1.0:
        raise ValidationError(f"gain must be >= 1, got {gain}")
    c = math.sqrt(gain)
    s = math.sqrt(gain - 1.0)
    return np.array(
        [
            [c, 0.0, s, 0.0],
            [0.0, c, 0.0, -s],
            [s, 0.0, c, 0.0],
            [0.0, -s, 0.0, c],
        ]
    )


def tms_symplectic(spec: TwoModeSqueezerSpec) -> SymplecticOp:
    """Symplectic operator for the two-mode squeezer described by ``spec``."""
    return SymplecticOp(tms_matrix(spec.gain), spec.pair)


def evolve_fwm(
    state: GaussianState, kappa: float, t: float, pair: tuple[ModeLabel, ModeLabel] = (PROBE, CONJUGATE)
) -> GaussianState:
    """Continuous gain evolution for an interaction κt, i.e. G = cosh²(κt).

    Var(X₋) and Var(P₊) each scale by exactly e^{−2κt}.
    """
    kt = kappa * t
    if kt < 0.0:
        raise ValidationError(f"interaction kappa*t must be >= 0, got {kt}")
    gain = math.cosh(kt) ** 2
    return apply_symplectic(state, tms_symplectic(TwoModeSqueezerSpec(gain, pair)))


def seeded_amplifier_output(gain: float, seed_x: float, seed_p: float) -> GaussianState:
    """Amplify a coherent probe seed; the conjugate port is fed with vacuum.

    Returns the two-mode output state on (PROBE, CONJUGATE).  For a seed of
    mean photon number α² = (x̄²+p̄²)/2 the output photon means are G·α² + (G−1)
    on the probe and (G−1)·α² + (G−1) on the conjugate.
    """
    state = vacuum_state([PROBE, CONJUGATE])
    state = displace(state, PROBE, seed_x, seed_p)
    return apply_symplectic(state, tms_symplectic(TwoModeSqueezerSpec(gain)))


@dataclass(frozen=True)
class CellModel:
    """Distributed gain/loss model of the vapor cell.

    The cell is split into ``n_slices`` identical segments.  Each slice
    carries an equal share r/n of the total squeeze parameter
    r = arccosh(√total_gain) followed by per-beam attenuation equal to the
    n-th root of the full-cell power transmissions (equal dB per slice).
    """

    n_slices: int = DEFAULT_N_SLICES
    total_gain: float = 2.0
    probe_transmission: float = 0.8
    conjugate_transmission: float = 1.0

    def __post_init__(self):
        if self.n_slices < 1:
            raise ValidationError(f"n_slices must be >= 1, got {self.n_slices}")
        if self.total_gain < 1.0:
            raise ValidationError(f"total_gain must be >= 1, got {self.total_gain}")
        for name in ("probe_transmission", "conjugate_transmission"):
            t = getattr(self, name)
            if not 0.0 < t <= 1.0:
                raise ValidationError(f"{name} must be in (0, 1], got {t}")

    @property
    def slice_gain(self) -> float:
        return math.cosh(squeeze_parameter(self.total_gain) / self.n_slices) ** 2

    @property
    def slice_transmissions(self) -> tuple[float, float]:
        n = self.n_slices
        return self.probe_transmission ** (1.0 / n), self.conjugate_transmission ** (1.0 / n)


def distributed_cell_output(cell: CellModel, seed_x: float, seed_p: float) -> GaussianState:
    """Propagate a probe seed through the sliced gain/loss cell.

    With unit transmissions this reduces exactly to
    :func:`seeded_amplifier_output` at the cell's total gain.
    """
    state = vacuum_state([PROBE, CONJUGATE])
    state = displace(state, PROBE, seed_x, seed_p)
    slice_op = tms_symplectic(TwoModeSqueezerSpec(cell.slice_gain))
    t_probe, t_conj = cell.slice_transmissions
    probe_loss = loss_channel(t_probe, [PROBE]) if t_probe < 1.0 else None
    conj_loss = loss_channel(t_conj, [CONJUGATE]) if t_conj < 1.0 else None
    for _ in range(cell.n_slices):
        state = apply_symplectic(state, slice_op)
        if probe_loss is not None:
            state = apply_channel(state, probe_loss)
        if conj_loss is not None:
            state = apply_channel(state, conj_loss)
    return state


@dataclass(frozen=True)
class AngularGainModel:
    """Gain versus pump-probe angle: Gaussian profile riding on G = 1.

    Angles are in milliradians.  ``spot_mrad`` is the far-field diameter of
    one correlated mode, used only for mode counting.
    """

    peak_gain: float = 5.0
    center_mrad: float = 7.0
    fwhm_mrad: float = 8.0
    spot_mrad: float = 1.0

    def __post_init__(self):
        if self.peak_gain < 1.0:
            raise ValidationError(f"peak_gain must be >= 1, got {self.peak_gain}")
        if self.fwhm_mrad <= 0.0 or self.spot_mrad <= 0.0:
            raise ValidationError("fwhm_mrad and spot_mrad must be positive")

    @property
    def sigma_mrad(self) -> float:
        return self.fwhm_mrad / _FWHM_TO_SIGMA


def angular_gain(model: AngularGainModel, theta_mrad):
    """Gain at angle θ: G(θ) = 1 + (G₀−1)·exp(−(θ−θ₀)²/2σ²).

    Accepts a scalar or an array of angles; G(θ₀) = G₀ and the half-maximum
    points sit exactly at θ₀ ± FWHM/2.
    """
    theta = np.asarray(theta_mrad, dtype=float)
    arg = (theta - model.center_mrad) / model.sigma_mrad
    g = 1.0 + (model.peak_gain - 1.0) * np.exp(-0.5 * arg * arg)
    return float(g) if np.isscalar(theta_mrad) else g


def estimate_mode_count(model: AngularGainModel, theta_min: float, theta_max: float) -> int:
    """Number of spot-sized modes tiling the acceptance cone [θ_min, θ_max].

    Area-ratio estimate with square packing: floor[(θ_max² − θ_min²)/spot²].
    An order-of-magnitude figure, not a physical prediction.
    """
    if not 0.0 <= theta_min < theta_max:
        raise ValidationError(
            f"need 0 <= theta_min < theta_max, got ({theta_min}, {theta_max})"
        )
    return int((theta_max**2 - theta_min**2) / model.spot_mrad**2)


def gain_for_quadrature_db(target_db: float, efficiency: float = 1.0) -> float:
    """Gain at which each measured joint quadrature reads ``target_db``.

    Inverts V_meas = η·e^{−2r} + (1−η) for a lossless squeezer observed with
    detection efficiency η.  ``target_db`` must be negative enough to be
    reachable: 10^(dB/10) must exceed the squeezing floor 1−η.
    """
    if not 0.0 < efficiency <= 1.0:
        raise ValidationError(f"efficiency must be in (0, 1], got {efficiency}")
    v_meas = 10.0 ** (target_db / 10.0)
    v_pure = (v_meas - (1.0 - efficiency)) / efficiency
    if not 0.0 < v_pure <= 1.0:
        raise ValidationError(
            f"target {target_db} dB is unreachable at efficiency {efficiency}"
        )
    r = -0.5 * math.log(v_pure)
    return math.cosh(r) ** 2
