"""Symplectic diagonalisation of the k = 0 block.

Conventions: ``Psi = (a, b, a+, b+) = T (alpha, beta, alpha+, beta+)`` with
``T = [[U, V], [V, U]]`` (real at k = 0), ``T^T H0 T = diag(ea, eb, ea, eb)``.

For identical layers the symmetric mode ``s = (a + b)/sqrt2`` and the
antisymmetric mode ``d = (b - a)/sqrt2`` decouple:

    s:  energy E + mu1,  pairing xi + mu2/2  ->  eps_alpha
    d:  energy E - mu1,  pairing xi - mu2/2  ->  eps_beta

Each is a single-mode squeeze, ``s = u_s alpha + v_s alpha+`` with
``u_s = sqrt((E_s + eps)/(2 eps))`` and ``v_s = -sgn(xi_s) sqrt((E_s - eps)/(2 eps))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import GaplessError, InstabilityError, NotPositiveDefinite
from .spinwave import BdgBlock

__all__ = [
    "BogoliubovDecomposition",
    "eigenenergies",
    "analytic_bogoliubov",
    "numeric_paraunitary",
    "symplectic_form",
    "TOL_GAP",
]

TOL_GAP = 1e-9
_NEG_TOL = 1e-14


def symplectic_form(n_modes: int = 2) -> np.ndarray:
    """``sigma_3 = diag(1, .., 1, -1, .., -1)`` for the bosonic commutators."""
    return np.diag(np.r_[np.ones(n_modes), -np.ones(n_modes)])


@dataclass(frozen=True)
class BogoliubovDecomposition:
    u: np.ndarray
    v: np.ndarray
    eps_alpha: float
    eps_beta: float

    @property
    def matrix(self) -> np.ndarray:
        """Full 4x4 Bogoliubov matrix ``[[U, V], [V*, U*]]``."""
        return np.block([[self.u, self.v], [self.v.conj(), self.u.conj()]])

    @property
    def energies(self) -> np.ndarray:
        return np.array([self.eps_alpha, self.eps_beta, self.eps_alpha, self.eps_beta])

    def elements(self) -> dict[str, float]:
        """``u1..u4, v1..v4`` in row-major order."""
        out = {f"u{k + 1}": float(x) for k, x in enumerate(np.real(self.u).ravel())}
        out.update({f"v{k + 1}": float(x) for k, x in enumerate(np.real(self.v).ravel())})
        return out

    def constraint_residuals(self) -> tuple[float, float]:
        """``max|U U+ - V V+ - 1|`` and ``max|U V^T - V U^T|``."""
        u, v = self.u, self.v
        r1 = np.abs(u @ u.conj().T - v @ v.conj().T - np.eye(2)).max()
        r2 = np.abs(u @ v.T - v @ u.T).max()
        return float(r1), float(r2)

    def diagonalization_residual(self, block: BdgBlock) -> float:
        T = self.matrix
        return float(np.abs(T.conj().T @ block.matrix() @ T - np.diag(self.energies)).max())


def _mode_energy(e, x, label):
    arg = e * e - x * x
    if arg < -_NEG_TOL:
        raise InstabilityError(f"eps_{label}^2 = {arg:.3e} < 0: magnon softening")
    return math.sqrt(max(arg, 0.0))


def eigenenergies(block: BdgBlock) -> tuple[float, float]:
    """``eps_alpha/beta = sqrt((E +- mu1)^2 - (mu2 +- 2 xi)^2)``."""
    e, m1, m2, xi = block.as_tuple()
    return (
        _mode_energy(e + m1, m2 + 2 * xi, "alpha"),
        _mode_energy(e - m1, m2 - 2 * xi, "beta"),
    )


def _single_mode(e: float, pair: float, eps: float) -> tuple[float, float]:
    u = math.sqrt((e + eps) / (2 * eps))
    # e - eps = (2 pair)^2 / (e + eps) without the cancellation for weak pairing
    gap = (2 * pair) ** 2 / (e + eps)
    v = -math.copysign(1.0, pair) * math.sqrt(gap / (2 * eps)) if pair else 0.0
    return u, v


def analytic_bogoliubov(block: BdgBlock, tol_gap: float = TOL_GAP) -> BogoliubovDecomposition:
    """Closed-form Bogoliubov matrix for identical layers.

    ``u1 = sqrt((E + mu1 + ea)/(4 ea))`` and ``u2 = -sqrt((E - mu1 + eb)/(4 eb))``.
    """
    ea, eb = eigenenergies(block)
    if ea <= tol_gap or eb <= tol_gap:
        raise GaplessError(f"gap below {tol_gap:g}: eps_alpha={ea:.3e}, eps_beta={eb:.3e}")
    e, m1, m2, xi = block.as_tuple()
    us, vs = _single_mode(e + m1, xi + m2 / 2, ea)
    ud, vd = _single_mode(e - m1, xi - m2 / 2, eb)
    r = 1 / math.sqrt(2)
    # a = (s - d)/sqrt2, b = (s + d)/sqrt2
    u = r * np.array([[us, -ud], [us, ud]])
    v = r * np.array([[vs, -vd], [vs, vd]])
    return BogoliubovDecomposition(u=u, v=v, eps_alpha=ea, eps_beta=eb)


def numeric_paraunitary(block: BdgBlock | np.ndarray, degeneracy_tol: float = 1e-9) -> BogoliubovDecomposition:
    """Cholesky-based (Colpa) diagonalisation of a positive-definite ``H0``.

    Columns are ordered by decreasing energy and signed so that the diagonal of
    ``U`` is positive.  Inside a degenerate pair the columns are rotated so
    that ``U`` becomes lower triangular, which makes the result unique.
    """
    H = block.matrix() if isinstance(block, BdgBlock) else np.asarray(block, dtype=float)
    n = H.shape[0] // 2
    try:
        K = linalg.cholesky(H, lower=False)  # H = K^T K
    except linalg.LinAlgError:
        raise NotPositiveDefinite("H0 is not positive definite") from None
    g = symplectic_form(n)
    L = K @ g @ K.T
    w, X = linalg.eigh(L)
    # eigh returns ascending order: positive branch is the top n, reversed
    order = np.r_[np.arange(2 * n - 1, n - 1, -1), np.arange(0, n)]
    w, X = w[order], X[:, order]
    T = linalg.solve_triangular(K, X * np.sqrt(np.abs(w)), lower=False)
    eps = w[:n]
    # particle-hole partners: column n+j must be tau * column j
    tau = np.block([[np.zeros((n, n)), np.eye(n)], [np.eye(n), np.zeros((n, n))]])
    T = np.hstack([T[:, :n], tau @ T[:, :n]])
    U, V = T[:n, :n], T[n:, :n]
    U, V = _fix_gauge(U, V, eps, degeneracy_tol)
    return BogoliubovDecomposition(u=U, v=V.copy(), eps_alpha=float(eps[0]), eps_beta=float(eps[1]))


def _fix_gauge(U, V, eps, tol):
    U, V = U.copy(), V.copy()
    n = U.shape[0]
    j = 0
    while j < n:
        k = j + 1
        while k < n and abs(eps[k] - eps[j]) <= tol * max(1.0, abs(eps[j])):
            k += 1
        if k - j > 1:
            # orthogonal rotation inside the degenerate block: U_blk Q lower-triangular
            Q, R = linalg.qr(U[j:k, j:k].T)
            U[:, j:k] = U[:, j:k] @ Q
            V[:, j:k] = V[:, j:k] @ Q
        j = k
    signs = np.where(np.diag(U) < 0, -1.0, 1.0)
    return U * signs, V * signs
