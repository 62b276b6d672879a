"""Logarithmic negativity of the two k = 0 magnon modes.

Two routes are provided: the closed form in the squeezing parameters and the
partial-transpose spectrum of the covariance matrix built from the
Bogoliubov matrix.  Quadratures are ordered ``(q_A, q_B, p_A, p_B)`` with
``q = (c + c+)/sqrt2`` and ``p = -i (c - c+)/sqrt2``; the vacuum has
``V = 1/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .bogoliubov import BogoliubovDecomposition
from .errors import DomainError, NumericalError
from .squeezing import SqueezingParams, sinc_theta

__all__ = [
    "CovarianceMatrix",
    "phase_space_map",
    "covariance_from_bogoliubov",
    "symplectic_eigenvalues",
    "eta_minus_numeric",
    "eta_minus_analytic",
    "entanglement_amplitude",
    "log_negativity",
]

OMEGA = np.block([[np.zeros((2, 2)), np.eye(2)], [-np.eye(2), np.zeros((2, 2))]])


def phase_space_map() -> np.ndarray:
    """``R = M Psi`` for ``Psi = (a, b, a+, b+)``."""
    I = np.eye(2)
    return np.block([[I, I], [-1j * I, 1j * I]]) / math.sqrt(2)


@dataclass(frozen=True)
class CovarianceMatrix:
    v: np.ndarray

    def uncertainty_margin(self) -> float:
        """Smallest symplectic eigenvalue minus 1/2 (>= 0 for physical states)."""
        return float(symplectic_eigenvalues(self.v).min() - 0.5)


def covariance_from_bogoliubov(decomp: BogoliubovDecomposition | np.ndarray) -> CovarianceMatrix:
    """``V = Re[(M T)(M T)+] / 2`` in the squeezed-magnon vacuum."""
    T = decomp.matrix if isinstance(decomp, BogoliubovDecomposition) else np.asarray(decomp)
    X = phase_space_map() @ T
    v = 0.5 * np.real(X @ X.conj().T)
    return CovarianceMatrix(0.5 * (v + v.T))


def symplectic_eigenvalues(v: np.ndarray) -> np.ndarray:
    """Moduli of the eigenvalues of ``i Omega V``, one per mode (ascending)."""
    ev = linalg.eigvals(1j * OMEGA @ v)
    mod = np.sort(np.abs(ev))
    pairs = mod.reshape(-1, 2)
    if np.any(np.abs(pairs[:, 0] - pairs[:, 1]) > 1e-8 * max(1.0, mod.max())):
        raise NumericalError(f"symplectic spectrum does not pair: {mod}")
    return pairs.mean(axis=1)


def eta_minus_numeric(cov: CovarianceMatrix, transpose: str = "B") -> float:
    """Smallest symplectic eigenvalue after partial transposition of ``transpose``."""
    flip = np.ones(4)
    flip[{"A": 2, "B": 3}[transpose]] = -1.0
    vt = cov.v * np.outer(flip, flip)
    return float(symplectic_eigenvalues(vt).min())


def entanglement_amplitude(params: SqueezingParams) -> float:
    """``X = t4 sin(2t)/(2t) - t3 t1 sin(t)^2 / t^2``."""
    q = params.theta_sq
    return params.theta4 * sinc_theta(4 * q) - params.theta3 * params.theta1 * sinc_theta(q) ** 2


def eta_minus_analytic(params: SqueezingParams) -> float:
    """``eta- = (sqrt(1 + 4X^2) - 2|X|) / 2``, written in a cancellation-free form."""
    x = abs(entanglement_amplitude(params))
    return 0.5 / (math.sqrt(1 + 4 * x * x) + 2 * x)


def log_negativity(eta: float) -> float:
    """``E_N = max(0, -ln(2 eta))``."""
    if not eta > 0:
        raise DomainError(f"symplectic eigenvalue must be > 0, got {eta}")
    return max(0.0, -math.log(2 * eta))
