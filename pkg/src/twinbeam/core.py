"""Multimode Gaussian states and their symplectic / channel transformations.

Conventions used everywhere in this package:

* quadratures X = (a + a†)/√2, P = i(a† − a)/√2, so the vacuum variance is
  1/2 per quadrature and joint variables like X₁−X₂ have vacuum variance 1;
* the mean vector and covariance matrix are stored in the interleaved order
  (x₁, p₁, x₂, p₂, …) — every matrix in the package is built against this
  single ordering constant.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import ModeLookupError, PhysicalityError, ValidationError

#: vacuum variance of a single quadrature
VACUUM_VAR = 0.5

#: tolerance for symmetry / symplectic identities
MATRIX_TOL = 1e-10

#: tolerance on symplectic eigenvalues when checking physicality
PHYSICALITY_TOL = 1e-9


class Beam(Enum):
    """Which of the two amplifier outputs a mode belongs to."""

    PROBE = "probe"
    CONJUGATE = "conjugate"


@dataclass(frozen=True, order=True)
class ModeLabel:
    """Identifies one bosonic mode: beam side, pixel index, free-text note.

    The ``note`` is ignored for identity so a relabelled mode still matches.
    """

    beam: Beam
    pixel: int = 0
    note: str = field(default="", compare=False)

    def __post_init__(self):
        if self.pixel < 0:
            raise ValidationError(f"pixel index must be >= 0, got {self.pixel}")

    def __str__(self):
        return f"{self.beam.value}[{self.pixel}]"


#: convenient single-pair labels for two-mode work
PROBE = ModeLabel(Beam.PROBE, 0)
CONJUGATE = ModeLabel(Beam.CONJUGATE, 0)


def symplectic_form(n_modes: int) -> np.ndarray:
    """Symplectic form Ω for ``n_modes`` modes in interleaved ordering."""
    omega = np.zeros((2 * n_modes, 2 * n_modes))
    for k in range(n_modes):
        omega[2 * k, 2 * k + 1] = 1.0
        omega[2 * k + 1, 2 * k] = -1.0
    return omega


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Symplectic spectrum of a covariance matrix, sorted ascending.

    The eigenvalues of ΩV come in pairs ±iν; the returned ν are each listed
    once.  A physical state has every ν ≥ 1/2.
    """
    n = cov.shape[0] // 2
    ev = np.linalg.eigvals(symplectic_form(n) @ cov)
    nus = np.sort(np.abs(ev.imag))
    return nus[::2]  # each ν appears twice in the sorted |Im| list


class GaussianState:
    """Mean vector + covariance matrix over an ordered list of labelled modes.

    Instances are immutable values: every operation returns a new state, so
    states are safe to share between threads.

    Args:
        modes: unique mode labels, in storage order.
        mean: length-2M array, interleaved (x₁, p₁, …).
        cov: 2M×2M symmetric covariance matrix.
        validate: run symmetry and physicality checks (on by default).
    """

    def __init__(self, modes: Sequence[ModeLabel], mean, cov, *, validate: bool = True):
        modes = tuple(modes)
        if len(set(modes)) != len(modes):
            raise ValidationError("duplicate mode labels in state")
        mean = np.asarray(mean, dtype=float).reshape(-1)
        cov = np.asarray(cov, dtype=float)
        m = len(modes)
        if mean.shape != (2 * m,):
            raise ValidationError(f"mean must have length {2 * m}, got {mean.shape}")
        if cov.shape != (2 * m, 2 * m):
            raise ValidationError(f"cov must be {2 * m}x{2 * m}, got {cov.shape}")
        if validate and m > 0:
            asym = np.max(np.abs(cov - cov.T))
            if asym > MATRIX_TOL:
                raise ValidationError(f"covariance not symmetric (max asymmetry {asym:.3e})")
            nu_min = symplectic_eigenvalues(cov).min()
            if nu_min < VACUUM_VAR - PHYSICALITY_TOL:
                raise PhysicalityError(
                    f"state violates the uncertainty bound: min symplectic eigenvalue "
                    f"{nu_min!r} < 1/2"
                )
        self._modes = modes
        self._index = {label: k for k, label in enumerate(modes)}
        self._mean = mean
        self._mean.flags.writeable = False
        self._cov = cov
        self._cov.flags.writeable = False

    @property
    def modes(self) -> tuple[ModeLabel, ...]:
        return self._modes

    @property
    def n_modes(self) -> int:
        return len(self._modes)

    @property
    def mean(self) -> np.ndarray:
        return self._mean

    @property
    def cov(self) -> np.ndarray:
        return self._cov

    def index(self, mode: ModeLabel) -> int:
        """Position of ``mode`` in storage order."""
        try:
            return self._index[mode]
        except KeyError:
            raise ModeLookupError(f"mode {mode} not in state") from None

    def indices(self, modes: Iterable[ModeLabel]) -> list[int]:
        return [self.index(m) for m in modes]

    def quadrature_slice(self, mode: ModeLabel) -> slice:
        k = self.index(mode)
        return slice(2 * k, 2 * k + 2)

    def to_dict(self) -> dict:
        """Debug dump of (modes, mean, cov), suitable for golden tests."""
        return {
            "modes": [
                {"beam": m.beam.value, "pixel": m.pixel, "note": m.note} for m in self._modes
            ],
            "mean": self._mean.tolist(),
            "cov": self._cov.tolist(),
        }

    def to_debug_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def __repr__(self):
        return f"GaussianState(n_modes={self.n_modes})"


@dataclass(frozen=True)
class SymplecticOp:
    """A symplectic matrix acting on a subset of modes.

    Validated on construction: SᵀΩS = Ω within :data:`MATRIX_TOL`.
    """

    matrix: np.ndarray
    target_modes: tuple[ModeLabel, ...]

    def __init__(self, matrix, target_modes: Sequence[ModeLabel]):
        matrix = np.asarray(matrix, dtype=float)
        target_modes = tuple(target_modes)
        k = len(target_modes)
        if matrix.shape != (2 * k, 2 * k):
            raise ValidationError(f"matrix must be {2 * k}x{2 * k} for {k} target modes")
        if len(set(target_modes)) != k:
            raise ValidationError("duplicate target modes")
        omega = symplectic_form(k)
        defect = np.max(np.abs(matrix.T @ omega @ matrix - omega))
        if defect > MATRIX_TOL:
            raise ValidationError(f"matrix is not symplectic (defect {defect:.3e})")
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "target_modes", target_modes)


@dataclass(frozen=True)
class GaussianChannel:
    """A Gaussian CP map V → XVXᵀ + Y on a subset of modes.

    Complete positivity (Y + (i/2)(Ω − XΩXᵀ) ⪰ 0) is checked on construction.
    """

    X: np.ndarray
    Y: np.ndarray
    target_modes: tuple[ModeLabel, ...]

    def __init__(self, X, Y, target_modes: Sequence[ModeLabel]):
        X = np.asarray(X, dtype=float)
        Y = np.asarray(Y, dtype=float)
        target_modes = tuple(target_modes)
        k = len(target_modes)
        if X.shape != (2 * k, 2 * k) or Y.shape != (2 * k, 2 * k):
            raise ValidationError(f"X and Y must be {2 * k}x{2 * k} for {k} target modes")
        if len(set(target_modes)) != k:
            raise ValidationError("duplicate target modes")
        if np.max(np.abs(Y - Y.T)) > MATRIX_TOL:
            raise ValidationError("Y must be symmetric")
        omega = symplectic_form(k)
        cp = Y + 0.5j * (omega - X @ omega @ X.T)
        lo = np.linalg.eigvalsh(cp).min()
        if lo < -PHYSICALITY_TOL:
            raise PhysicalityError(f"channel not completely positive (min eigenvalue {lo:.3e})")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)
        object.__setattr__(self, "target_modes", target_modes)


# ---------------------------------------------------------------------------
# state constructors and transformations
# ---------------------------------------------------------------------------


def vacuum_state(mode_labels: Sequence[ModeLabel]) -> GaussianState:
    """Vacuum on the given modes: zero mean, cov = (1/2)·I."""
    labels = tuple(mode_labels)
    if len(set(labels)) != len(labels):
        raise ValidationError("duplicate mode labels")
    m = len(labels)
    return GaussianState(labels, np.zeros(2 * m), VACUUM_VAR * np.eye(2 * m), validate=False)


def displace(state: GaussianState, mode: ModeLabel, dx: float, dp: float) -> GaussianState:
    """Shift the mean of one mode by (dx, dp); covariance is unchanged."""
    sl = state.quadrature_slice(mode)
    mean = state.mean.copy()
    mean[sl] += (dx, dp)
    return GaussianState(state.modes, mean, state.cov, validate=False)


def _embed_indices(state: GaussianState, targets: Sequence[ModeLabel]) -> np.ndarray:
    idx = []
    for m in targets:
        k = state.index(m)
        idx.extend((2 * k, 2 * k + 1))
    return np.asarray(idx, dtype=int)


def apply_symplectic(state: GaussianState, op: SymplecticOp) -> GaussianState:
    """Apply S to the targeted block: mean → S·mean, cov → S·cov·Sᵀ.

    Correlations between targeted and untargeted modes transform consistently;
    untargeted blocks are untouched.
    """
    idx = _embed_indices(state, op.target_modes)
    s_full = np.eye(2 * state.n_modes)
    s_full[np.ix_(idx, idx)] = op.matrix
    mean = s_full @ state.mean
    cov = s_full @ state.cov @ s_full.T
    return GaussianState(state.modes, mean, cov, validate=False)


def apply_channel(state: GaussianState, ch: GaussianChannel) -> GaussianState:
    """Apply a Gaussian channel: mean → X·mean, cov → X·cov·Xᵀ + Y."""
    idx = _embed_indices(state, ch.target_modes)
    x_full = np.eye(2 * state.n_modes)
    x_full[np.ix_(idx, idx)] = ch.X
    y_full = np.zeros((2 * state.n_modes, 2 * state.n_modes))
    y_full[np.ix_(idx, idx)] = ch.Y
    mean = x_full @ state.mean
    cov = x_full @ state.cov @ x_full.T + y_full
    return GaussianState(state.modes, mean, cov, validate=False)


def loss_channel(eta: float, modes: Sequence[ModeLabel]) -> GaussianChannel:
    """Pure attenuation with power transmission ``eta`` on each given mode.

    X = √η·I and Y = (1−η)·(1/2)·I, which mixes in vacuum so that η = 0
    returns a mode to vacuum and η = 1 is the identity.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValidationError(f"transmission must be in [0, 1], got {eta}")
    k = len(tuple(modes))
    return GaussianChannel(
        np.sqrt(eta) * np.eye(2 * k), (1.0 - eta) * VACUUM_VAR * np.eye(2 * k), modes
    )


def phase_rotation(theta: float, mode: ModeLabel) -> SymplecticOp:
    """Phase-space rotation a → e^{iθ}a on one mode."""
    c, s = np.cos(theta), np.sin(theta)
    return SymplecticOp(np.array([[c, -s], [s, c]]), (mode,))


def beamsplitter(transmittance: float, modes: Sequence[ModeLabel]) -> SymplecticOp:
    """Two-mode beamsplitter with power transmittance ``transmittance``."""
    if not 0.0 <= transmittance <= 1.0:
        raise ValidationError(f"transmittance must be in [0, 1], got {transmittance}")
    t = np.sqrt(transmittance)
    r = np.sqrt(1.0 - transmittance)
    i2 = np.eye(2)
    s = np.block([[t * i2, r * i2], [-r * i2, t * i2]])
    return SymplecticOp(s, modes)


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------


def quadrature_variance(state: GaussianState, coeffs) -> float:
    """Variance of the linear combination cᵀ·r of quadratures.

    Mean-independent; the coefficient vector is in the same interleaved
    ordering as the state.
    """
    c = np.asarray(coeffs, dtype=float).reshape(-1)
    if c.shape != state.mean.shape:
        raise ValidationError(
            f"coefficient vector must have length {state.mean.shape[0]}, got {c.shape[0]}"
        )
    return float(c @ state.cov @ c)


def photon_stats(
    state: GaussianState, subset: Sequence[ModeLabel]
) -> tuple[np.ndarray, np.ndarray]:
    """Exact photon-number means and covariance matrix for a mode subset.

    Uses the Gaussian quadratic-form identity for n̂ᵢ = (xᵢ² + pᵢ² − 1)/2 with
    the operator-ordering correction −1/4 on the diagonal, so a coherent state
    is exactly Poissonian and twin-beam Var(n₁−n₂) is exactly zero.

    Returns:
        (means, ncov): length-K vector of ⟨nᵢ⟩ and the K×K photon-number
        covariance matrix, ordered as ``subset``.
    """
    subset = tuple(subset)
    if len(subset) == 0:
        raise ValidationError("photon_stats needs at least one mode")
    idx = state.indices(subset)
    k = len(subset)
    means = np.empty(k)
    ncov = np.empty((k, k))
    cov, mean = state.cov, state.mean
    blocks = [slice(2 * i, 2 * i + 2) for i in idx]
    for a in range(k):
        va = cov[blocks[a], blocks[a]]
        ma = mean[blocks[a]]
        means[a] = 0.5 * (np.trace(va) + ma @ ma - 1.0)
        for b in range(a, k):
            vab = cov[blocks[a], blocks[b]]
            mb = mean[blocks[b]]
            c = 0.5 * np.sum(vab * vab) + ma @ vab @ mb
            if a == b:
                c -= 0.25
            ncov[a, b] = ncov[b, a] = c
    return means, ncov
