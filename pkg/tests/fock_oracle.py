"""Independent truncated Fock-space oracle for two-mode Gaussian operations.

Deliberately built from first principles (ladder operators + matrix
exponentials) with no use of the covariance machinery under test.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm


def destroy(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim)), k=1)


class TwoModeFock:
    """Pure two-mode state in a Fock space truncated at ``dim`` per mode."""

    def __init__(self, dim: int = 30):
        self.dim = dim
        a = destroy(dim)
        eye = np.eye(dim)
        self.a1 = np.kron(a, eye)
        self.a2 = np.kron(eye, a)
        self.x1 = (self.a1 + self.a1.T) / np.sqrt(2.0)
        self.p1 = 1j * (self.a1.T - self.a1) / np.sqrt(2.0)
        self.x2 = (self.a2 + self.a2.T) / np.sqrt(2.0)
        self.p2 = 1j * (self.a2.T - self.a2) / np.sqrt(2.0)
        self.n1 = self.a1.T @ self.a1
        self.n2 = self.a2.T @ self.a2
        psi = np.zeros(dim * dim)
        psi[0] = 1.0
        self.psi = psi.astype(complex)

    def displace(self, mode: int, alpha: complex) -> "TwoModeFock":
        a = self.a1 if mode == 1 else self.a2
        u = expm(alpha * a.T - np.conj(alpha) * a)
        self.psi = u @ self.psi
        return self

    def squeeze(self, r: float) -> "TwoModeFock":
        """Two-mode squeezer with a_1 → cosh(r)·a_1 + sinh(r)·a_2†."""
        gen = r * (self.a1.T @ self.a2.T - self.a1 @ self.a2)
        self.psi = expm(gen) @ self.psi
        return self

    def expect(self, op: np.ndarray) -> float:
        return float(np.real(np.conj(self.psi) @ op @ self.psi))

    def mean_vector(self) -> np.ndarray:
        """(⟨x₁⟩, ⟨p₁⟩, ⟨x₂⟩, ⟨p₂⟩)."""
        return np.array([self.expect(op) for op in (self.x1, self.p1, self.x2, self.p2)])

    def covariance(self) -> np.ndarray:
        """Symmetrized 4×4 quadrature covariance, interleaved ordering."""
        ops = (self.x1, self.p1, self.x2, self.p2)
        mean = self.mean_vector()
        cov = np.empty((4, 4))
        for i in range(4):
            for j in range(4):
                sym = 0.5 * (ops[i] @ ops[j] + ops[j] @ ops[i])
                cov[i, j] = self.expect(sym) - mean[i] * mean[j]
        return cov

    def photon_stats(self) -> tuple[np.ndarray, np.ndarray]:
        """Photon-number means and 2×2 covariance matrix (exact operators)."""
        means = np.array([self.expect(self.n1), self.expect(self.n2)])
        ncov = np.empty((2, 2))
        ncov[0, 0] = self.expect(self.n1 @ self.n1) - means[0] ** 2
        ncov[1, 1] = self.expect(self.n2 @ self.n2) - means[1] ** 2
        ncov[0, 1] = ncov[1, 0] = self.expect(self.n1 @ self.n2) - means[0] * means[1]
        return means, ncov
