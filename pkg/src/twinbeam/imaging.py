"""Pixel-basis multimode machinery: masks, image seeds, parallel amplification.

The amplifier is modelled as many independent single-mode amplifiers working
in parallel: each pixel carries one probe/conjugate pair, and the joint
covariance is exactly block-diagonal in 4×4 pixel-pair blocks.  States are
therefore stored as stacked blocks rather than one dense matrix, and all
reductions run through the block kernels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels, pgm
from .amplifier import AngularGainModel, angular_gain, tms_matrix
from .core import (
    VACUUM_VAR,
    Beam,
    GaussianState,
    ModeLabel,
    PHYSICALITY_TOL,
)
from .detection import HomodyneSpec, intensity_difference_db
from .errors import (
    MeasurementUndefinedError,
    PhysicalityError,
    ResourceBudgetError,
    ValidationError,
)

#: default cap on pixels per image (the state carries 2 modes per pixel)
DEFAULT_MODE_BUDGET = 4096


@dataclass(frozen=True)
class PixelGrid:
    """Far-field pixel raster; ``angular_pitch_mrad`` maps pixels to angles."""

    width: int
    height: int
    angular_pitch_mrad: float = 0.25
    mode_budget: int = DEFAULT_MODE_BUDGET

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValidationError("grid dimensions must be >= 1")
        if self.angular_pitch_mrad <= 0.0:
            raise ValidationError("angular_pitch_mrad must be positive")
        if self.width * self.height > self.mode_budget:
            raise ResourceBudgetError(
                f"grid has {self.width * self.height} pixels, budget is {self.mode_budget}"
            )

    @property
    def n_pixels(self) -> int:
        return self.width * self.height

    def pixel_angles(self) -> np.ndarray:
        """Radial angle from the grid center per pixel (flattened, mrad)."""
        rows = np.arange(self.height) - 0.5 * (self.height - 1)
        cols = np.arange(self.width) - 0.5 * (self.width - 1)
        rr, cc = np.meshgrid(rows, cols, indexing="ij")
        return (self.angular_pitch_mrad * np.hypot(rr, cc)).reshape(-1)


def _check_grid(grid: PixelGrid, array: np.ndarray, what: str) -> np.ndarray:
    arr = np.asarray(array, dtype=float)
    if arr.shape != (grid.height, grid.width):
        raise ValidationError(
            f"{what} shape {arr.shape} does not match grid "
            f"({grid.height}, {grid.width})"
        )
    return arr


@dataclass(frozen=True)
class Mask:
    """Per-pixel power transmission in [0, 1]."""

    grid: PixelGrid
    transmission: np.ndarray

    def __post_init__(self):
        t = _check_grid(self.grid, self.transmission, "mask")
        if np.any(t < 0.0) or np.any(t > 1.0):
            raise ValidationError("mask transmission must lie in [0, 1]")
        object.__setattr__(self, "transmission", t)

    @classmethod
    def uniform(cls, grid: PixelGrid, transmission: float = 1.0) -> "Mask":
        return cls(grid, np.full((grid.height, grid.width), transmission))


@dataclass(frozen=True)
class BeamImage:
    """Per-pixel mean quadrature amplitudes (x̄, p̄) of a seed beam."""

    grid: PixelGrid
    amp_x: np.ndarray
    amp_p: np.ndarray

    def __post_init__(self):
        ax = _check_grid(self.grid, self.amp_x, "amp_x")
        ap = _check_grid(self.grid, self.amp_p, "amp_p")
        if not (np.all(np.isfinite(ax)) and np.all(np.isfinite(ap))):
            raise ValidationError("beam image amplitudes must be finite")
        object.__setattr__(self, "amp_x", ax)
        object.__setattr__(self, "amp_p", ap)

    @classmethod
    def dark(cls, grid: PixelGrid) -> "BeamImage":
        z = np.zeros((grid.height, grid.width))
        return cls(grid, z, z)


@dataclass(frozen=True)
class RegionSelector:
    """Boolean pixel selection used for razor-blade style subregion detection."""

    grid: PixelGrid
    included: np.ndarray

    def __post_init__(self):
        inc = np.asarray(self.included)
        if inc.shape != (self.grid.height, self.grid.width):
            raise ValidationError(
                f"region shape {inc.shape} does not match grid "
                f"({self.grid.height}, {self.grid.width})"
            )
        object.__setattr__(self, "included", inc.astype(bool))

    @property
    def count(self) -> int:
        return int(self.included.sum())

    @classmethod
    def full(cls, grid: PixelGrid) -> "RegionSelector":
        return cls(grid, np.ones((grid.height, grid.width), dtype=bool))


# ---------------------------------------------------------------------------
# file loading
# ---------------------------------------------------------------------------


def load_mask(
    path,
    *,
    threshold: float | None = None,
    angular_pitch_mrad: float = 0.25,
    mode_budget: int = DEFAULT_MODE_BUDGET,
) -> Mask:
    """Load a plain PGM (P2) as a transmission mask.

    Gray values are rescaled to [0, 1]; with ``threshold`` set the mask is
    binarized instead (gray ≥ threshold → 1).
    """
    gray = pgm.read_pgm(path)
    if threshold is not None:
        gray = (gray >= threshold).astype(float)
    grid = PixelGrid(gray.shape[1], gray.shape[0], angular_pitch_mrad, mode_budget)
    return Mask(grid, gray)


def load_region(path, grid: PixelGrid, *, threshold: float = 0.5) -> RegionSelector:
    """Load a plain PGM as a boolean region on an existing grid."""
    gray = pgm.read_pgm(path)
    if gray.shape != (grid.height, grid.width):
        raise ValidationError(
            f"region file shape {gray.shape} does not match grid "
            f"({grid.height}, {grid.width})"
        )
    return RegionSelector(grid, gray >= threshold)


# ---------------------------------------------------------------------------
# seeds and amplification
# ---------------------------------------------------------------------------


def masked_seed(grid: PixelGrid, mask: Mask, alpha: float) -> BeamImage:
    """Uniform coherent seed of amplitude α sent through an intensity mask.

    Phase-flat: x̄ = √2·α·√T per pixel, p̄ = 0, so pixel intensity scales
    linearly with the mask transmission.
    """
    if mask.grid != grid:
        raise ValidationError("mask grid does not match seed grid")
    amp_x = math.sqrt(2.0) * alpha * np.sqrt(mask.transmission)
    return BeamImage(grid, amp_x, np.zeros_like(amp_x))


class PairBlockState:
    """Multimode Gaussian state stored as independent pixel-pair blocks.

    Block k carries (probe_k, conjugate_k) with quadrature basis
    (x_p, p_p, x_c, p_c); means have shape (N, 4) and covariances (N, 4, 4).
    Instances are immutable values; operations return new states.
    """

    def __init__(self, grid: PixelGrid, means, covs, *, validate: bool = True):
        means = np.ascontiguousarray(means, dtype=float)
        covs = np.ascontiguousarray(covs, dtype=float)
        n = grid.n_pixels
        if means.shape != (n, 4) or covs.shape != (n, 4, 4):
            raise ValidationError(
                f"means must be ({n}, 4) and covs ({n}, 4, 4); "
                f"got {means.shape} and {covs.shape}"
            )
        if validate:
            if np.max(np.abs(covs - covs.transpose(0, 2, 1))) > 1e-10:
                raise ValidationError("covariance blocks must be symmetric")
            nu_min = _kernels.min_symplectic_eigenvalue_blocks(covs)
            if nu_min < VACUUM_VAR - PHYSICALITY_TOL:
                raise PhysicalityError(
                    f"block state violates the uncertainty bound "
                    f"(min symplectic eigenvalue {nu_min!r})"
                )
        self.grid = grid
        self._means = means
        self._covs = covs
        self._moments = None
        means.flags.writeable = False
        covs.flags.writeable = False

    @property
    def n_pixels(self) -> int:
        return self.grid.n_pixels

    @property
    def means(self) -> np.ndarray:
        return self._means

    @property
    def covs(self) -> np.ndarray:
        return self._covs

    @classmethod
    def vacuum(cls, grid: PixelGrid) -> "PairBlockState":
        n = grid.n_pixels
        covs = np.broadcast_to(VACUUM_VAR * np.eye(4), (n, 4, 4)).copy()
        return cls(grid, np.zeros((n, 4)), covs, validate=False)

    def displace_probe(self, image: BeamImage) -> "PairBlockState":
        if image.grid != self.grid:
            raise ValidationError("image grid does not match state grid")
        means = self._means.copy()
        means[:, 0] += image.amp_x.reshape(-1)
        means[:, 1] += image.amp_p.reshape(-1)
        return PairBlockState(self.grid, means, self._covs, validate=False)

    def apply_pair_gains(self, gains) -> "PairBlockState":
        gains = np.broadcast_to(np.asarray(gains, dtype=float), (self.n_pixels,))
        if np.any(gains < 1.0):
            raise ValidationError("pair gains must be >= 1")
        means = self._means.copy()
        covs = self._covs.copy()
        if np.ptp(gains) == 0.0:
            _kernels.apply_symplectic_blocks(covs, means, tms_matrix(float(gains[0])))
        else:
            _kernels.apply_symplectic_blocks(covs, means, _kernels.tms_blocks(gains))
        return PairBlockState(self.grid, means, covs, validate=False)

    def apply_loss(self, eta_probe: float, eta_conj: float) -> "PairBlockState":
        for eta in (eta_probe, eta_conj):
            if not 0.0 <= eta <= 1.0:
                raise ValidationError(f"transmission must be in [0, 1], got {eta}")
        means = self._means.copy()
        covs = self._covs.copy()
        _kernels.apply_loss_blocks(covs, means, eta_probe, eta_conj)
        return PairBlockState(self.grid, means, covs, validate=False)

    def photon_moments(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(nmean (N,2), nvar (N,2), ncross (N,)) per pixel pair; cached."""
        if self._moments is None:
            self._moments = _kernels.photon_moments_blocks(self._covs, self._means)
        return self._moments

    def region_intensity_moments(self, probe_pixels, conj_pixels):
        """⟨N_p⟩, ⟨N_c⟩ and Var(N_p − N_c) over flat pixel-index sets."""
        probe_pixels = np.asarray(probe_pixels, dtype=int).reshape(-1)
        conj_pixels = np.asarray(conj_pixels, dtype=int).reshape(-1)
        if probe_pixels.size == 0 or conj_pixels.size == 0:
            raise ValidationError("probe and conjugate detection sets must be nonempty")
        nmean, nvar, ncross = self.photon_moments()
        mean_probe = float(nmean[probe_pixels, 0].sum())
        mean_conj = float(nmean[conj_pixels, 1].sum())
        both = np.intersect1d(probe_pixels, conj_pixels)
        variance = float(
            nvar[probe_pixels, 0].sum()
            + nvar[conj_pixels, 1].sum()
            - 2.0 * ncross[both].sum()
        )
        return mean_probe, mean_conj, variance

    def intensity_image(self, beam: Beam) -> np.ndarray:
        """Mean photon number per pixel of one beam, shape (H, W)."""
        nmean, _, _ = self.photon_moments()
        col = 0 if beam is Beam.PROBE else 1
        return nmean[:, col].reshape(self.grid.height, self.grid.width)

    def min_symplectic_eigenvalue(self) -> float:
        return _kernels.min_symplectic_eigenvalue_blocks(self._covs)

    def to_gaussian_state(self) -> GaussianState:
        """Expand to a dense :class:`GaussianState` (small grids only)."""
        n = self.n_pixels
        modes = []
        for k in range(n):
            modes.append(ModeLabel(Beam.PROBE, k))
            modes.append(ModeLabel(Beam.CONJUGATE, k))
        mean = self._means.reshape(-1)
        cov = np.zeros((4 * n, 4 * n))
        for k in range(n):
            cov[4 * k : 4 * k + 4, 4 * k : 4 * k + 4] = self._covs[k]
        return GaussianState(modes, mean, cov, validate=False)

    def __repr__(self):
        return f"PairBlockState(grid={self.grid.width}x{self.grid.height})"


def amplify_image(seed: BeamImage, gain) -> PairBlockState:
    """Amplify a seed image: one independent two-mode squeezer per pixel.

    ``gain`` is a scalar, a per-pixel (H, W) array, or an
    :class:`AngularGainModel` evaluated at each pixel's radial angle.  The
    probe of pixel k is displaced by the seed amplitude and the pair
    (probe_k, conjugate_k) squeezed with G_k; covariance stays block-diagonal
    across pixel pairs.
    """
    grid = seed.grid
    if isinstance(gain, AngularGainModel):
        gains = angular_gain(gain, grid.pixel_angles())
    elif np.isscalar(gain):
        gains = np.full(grid.n_pixels, float(gain))
    else:
        gains = _check_grid(grid, gain, "gain map").reshape(-1)
    state = PairBlockState.vacuum(grid).displace_probe(seed)
    return state.apply_pair_gains(gains)


# ---------------------------------------------------------------------------
# subregion measurements and shaped LOs
# ---------------------------------------------------------------------------


def region_weights(selector: RegionSelector) -> np.ndarray:
    """Flat pixel indices of a region: the photon-number summation set.

    Excluded pixels are discarded (a razor blade blocks them), not detected.
    """
    if selector.count == 0:
        raise ValidationError("region selects no pixels")
    return np.flatnonzero(selector.included.reshape(-1))


def subregion_intensity_difference_db(
    state: PairBlockState, probe_region: RegionSelector, conj_region: RegionSelector
) -> float:
    """Intensity-difference noise (dB vs SQL) restricted to two pixel regions."""
    for region in (probe_region, conj_region):
        if region.grid.width != state.grid.width or region.grid.height != state.grid.height:
            raise ValidationError("region grid does not match state grid")
    return intensity_difference_db(
        state, region_weights(probe_region), region_weights(conj_region)
    )


def lo_profile_from_mask(
    mask: Mask, lo_phase: float = 0.0, efficiency: float = 1.0
) -> HomodyneSpec:
    """Shaped local oscillator: weights ∝ √T per pixel, L2-normalized.

    The LO profile defines which image mode the homodyne detector measures.
    """
    w = np.sqrt(mask.transmission.reshape(-1))
    norm = np.linalg.norm(w)
    if norm == 0.0:
        raise ValidationError("LO mask is entirely opaque")
    return HomodyneSpec(w / norm, lo_phase=lo_phase, efficiency=efficiency)


def write_intensity_pgm(path, intensity: np.ndarray) -> None:
    """Write a mean-intensity map as P2 PGM, gray = round(65535·I/I_max)."""
    intensity = np.asarray(intensity, dtype=float)
    peak = intensity.max() if intensity.size else 0.0
    if peak <= 0.0:
        gray = np.zeros_like(intensity, dtype=int)
    else:
        gray = np.rint(65535.0 * intensity / peak).astype(int)
    pgm.write_pgm(path, gray, maxval=65535)
