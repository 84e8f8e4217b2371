"""Vectorized numpy implementation of the pixel-pair block kernels.

A multimode image state is stored as N independent probe/conjugate pairs,
one 4-vector mean and one 4×4 covariance block per pixel, basis
(x_p, p_p, x_c, p_c).  These kernels are the hot loops of the engine; the
compiled backend in ``_cy_kernels`` implements the same signatures.

All ``apply_*`` kernels mutate ``covs``/``means`` in place; callers own the
copy semantics.
"""

from __future__ import annotations

import numpy as np


def tms_blocks(gains: np.ndarray) -> np.ndarray:
    """Per-pair two-mode-squeezer matrices for an array of gains, (N,4,4)."""
    g = np.asarray(gains, dtype=float)
    c = np.sqrt(g)
    s = np.sqrt(g - 1.0)
    out = np.zeros((g.shape[0], 4, 4))
    out[:, 0, 0] = c
    out[:, 1, 1] = c
    out[:, 2, 2] = c
    out[:, 3, 3] = c
    out[:, 0, 2] = s
    out[:, 2, 0] = s
    out[:, 1, 3] = -s
    out[:, 3, 1] = -s
    return out


def apply_symplectic_blocks(covs: np.ndarray, means: np.ndarray, s: np.ndarray) -> None:
    """cov → S·cov·Sᵀ and mean → S·mean per block; ``s`` is (4,4) or (N,4,4)."""
    if s.ndim == 2:
        covs[:] = np.einsum("ab,nbc,dc->nad", s, covs, s, optimize=True)
        means[:] = means @ s.T
    else:
        covs[:] = np.einsum("nab,nbc,ndc->nad", s, covs, s, optimize=True)
        means[:] = np.einsum("nab,nb->na", s, means)


def apply_loss_blocks(
    covs: np.ndarray, means: np.ndarray, eta_probe: float, eta_conj: float
) -> None:
    """Per-beam attenuation on every block: V → DVD + (1−η)/2 per quadrature."""
    d = np.array([eta_probe, eta_probe, eta_conj, eta_conj]) ** 0.5
    covs *= d[:, None] * d[None, :]
    covs[:, 0, 0] += 0.5 * (1.0 - eta_probe)
    covs[:, 1, 1] += 0.5 * (1.0 - eta_probe)
    covs[:, 2, 2] += 0.5 * (1.0 - eta_conj)
    covs[:, 3, 3] += 0.5 * (1.0 - eta_conj)
    means *= d


def photon_moments_blocks(
    covs: np.ndarray, means: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Photon-number statistics per block.

    Returns:
        (nmean, nvar, ncross): per-pixel ⟨n⟩ and Var(n) for probe and
        conjugate, shapes (N,2), plus the per-pixel Cov(n_p, n_c), shape (N,).
        Cross-pixel photon covariances are exactly zero by block-diagonality.
    """
    v = covs
    m = means
    nmean = np.empty((v.shape[0], 2))
    nmean[:, 0] = 0.5 * (v[:, 0, 0] + v[:, 1, 1] + m[:, 0] ** 2 + m[:, 1] ** 2 - 1.0)
    nmean[:, 1] = 0.5 * (v[:, 2, 2] + v[:, 3, 3] + m[:, 2] ** 2 + m[:, 3] ** 2 - 1.0)

    nvar = np.empty((v.shape[0], 2))
    nvar[:, 0] = (
        0.5 * (v[:, 0, 0] ** 2 + 2.0 * v[:, 0, 1] ** 2 + v[:, 1, 1] ** 2)
        - 0.25
        + v[:, 0, 0] * m[:, 0] ** 2
        + 2.0 * v[:, 0, 1] * m[:, 0] * m[:, 1]
        + v[:, 1, 1] * m[:, 1] ** 2
    )
    nvar[:, 1] = (
        0.5 * (v[:, 2, 2] ** 2 + 2.0 * v[:, 2, 3] ** 2 + v[:, 3, 3] ** 2)
        - 0.25
        + v[:, 2, 2] * m[:, 2] ** 2
        + 2.0 * v[:, 2, 3] * m[:, 2] * m[:, 3]
        + v[:, 3, 3] * m[:, 3] ** 2
    )

    ncross = (
        0.5
        * (v[:, 0, 2] ** 2 + v[:, 0, 3] ** 2 + v[:, 1, 2] ** 2 + v[:, 1, 3] ** 2)
        + m[:, 0] * (v[:, 0, 2] * m[:, 2] + v[:, 0, 3] * m[:, 3])
        + m[:, 1] * (v[:, 1, 2] * m[:, 2] + v[:, 1, 3] * m[:, 3])
    )
    return nmean, nvar, ncross


def joint_quadrature_variance_blocks(
    covs: np.ndarray,
    weights_probe: np.ndarray,
    weights_conj: np.ndarray,
    cos_p: float,
    sin_p: float,
    cos_c: float,
    sin_c: float,
) -> float:
    """Var of Σ_k w_p,k·A_probe(θ_p, k) + Σ_k w_c,k·A_conj(θ_c, k).

    A_θ = X cosθ + P sinθ; signs and efficiencies are folded into the weight
    vectors by the caller.  Cross-block terms vanish, so the variance is a sum
    of per-block quadratic forms cᵀVc.
    """
    n = covs.shape[0]
    c = np.empty((n, 4))
    c[:, 0] = weights_probe * cos_p
    c[:, 1] = weights_probe * sin_p
    c[:, 2] = weights_conj * cos_c
    c[:, 3] = weights_conj * sin_c
    return float(np.einsum("na,nab,nb->", c, covs, c, optimize=True))


_OMEGA4 = np.array(
    [
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0, 0.0],
    ]
)


def min_symplectic_eigenvalue_blocks(covs: np.ndarray) -> float:
    """Smallest symplectic eigenvalue across all blocks.

    Per block, Cholesky V = LLᵀ and A = LᵀΩL reduce the problem to the
    singular values of an antisymmetric 4×4 matrix, which split over
    so(4) ≅ su(2)⊕su(2) as ν = ‖P‖ ± ‖Q‖ (norms of the self-dual and
    anti-self-dual parts).  Unlike the characteristic-polynomial closed
    form, this stays fully accurate when the spectrum is degenerate
    (pure squeezed states), where root extraction loses half the digits.
    """
    try:
        chol = np.linalg.cholesky(covs)
    except np.linalg.LinAlgError:
        return 0.0  # not positive definite: grossly unphysical
    amat = np.einsum("nji,jk,nkl->nil", chol, _OMEGA4, chol, optimize=True)
    a, b, c = amat[:, 0, 1], amat[:, 0, 2], amat[:, 0, 3]
    d, e, f = amat[:, 1, 2], amat[:, 1, 3], amat[:, 2, 3]
    p = 0.5 * np.sqrt((a + f) ** 2 + (b - e) ** 2 + (c + d) ** 2)
    q = 0.5 * np.sqrt((a - f) ** 2 + (b + e) ** 2 + (c - d) ** 2)
    return float(np.abs(p - q).min())
