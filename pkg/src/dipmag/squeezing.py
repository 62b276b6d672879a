"""Four-parameter squeezing representation of the k = 0 Bogoliubov matrix.

The generators act on ``Psi = (a, b, a+, b+)`` through the commutator,
``[P_i, Psi] = g_i Psi``, with

    P_1 = (a+a+ - aa - b+b+ + bb) / 2     one-mode squeeze, opposite in A and B
    P_2 = (a+a+ - aa + b+b+ - bb) / 2     one-mode squeeze, equal in A and B
    P_3 = a+b - ab+                        hybridisation (beam splitter)
    P_4 = a+b+ - ab                        two-mode squeeze

so that ``exp(sum theta_i g_i)`` is the inverse Bogoliubov matrix
(``alpha = T^{-1} Psi``).  With this normalisation the (1,1) and (1,2)
entries of ``T`` are

    u1 = cosh(t2) cos(t) + (t1/t) sin(t) sinh(t2)
    u2 = (t4/t) sin(t) sinh(t2) + (t3/t) sin(t) cosh(t2),   t^2 = t3^2 - t1^2 - t4^2

``g_2`` commutes with the other three, and ``M = t1 g1 + t3 g3 + t4 g4``
squares to ``-t^2``, so ``exp(M) = cos(t) + sin(t)/t M``.  All trigonometric
functions are evaluated from ``t^2`` directly (hyperbolic branch for
``t^2 < 0``) so nothing here ever becomes complex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .bogoliubov import BogoliubovDecomposition, symplectic_form
from .errors import LogBranchError, ProjectionError

__all__ = [
    "GeneratorSet",
    "SqueezingParams",
    "generator_matrices",
    "extract",
    "reconstruct",
    "closed_form",
    "cos_theta",
    "sinc_theta",
    "commutator_form",
    "PROJECTION_TOL",
]

PROJECTION_TOL = 1e-10
_SERIES_CUT = 1e-6

A, B, AD, BD = range(4)


@dataclass(frozen=True)
class GeneratorSet:
    g1: np.ndarray
    g2: np.ndarray
    g3: np.ndarray
    g4: np.ndarray

    def __iter__(self):
        return iter((self.g1, self.g2, self.g3, self.g4))

    def combine(self, thetas) -> np.ndarray:
        return sum(t * g for t, g in zip(thetas, self))


@dataclass(frozen=True)
class SqueezingParams:
    theta1: float
    theta2: float
    theta3: float
    theta4: float
    residual: float = 0.0

    @property
    def theta_sq(self) -> float:
        return self.theta3 ** 2 - self.theta1 ** 2 - self.theta4 ** 2

    @property
    def theta(self) -> float:
        """Signed magnitude of ``t``: ``+sqrt(t^2)`` or ``-sqrt(-t^2)`` (imaginary branch)."""
        q = self.theta_sq
        return math.sqrt(q) if q >= 0 else -math.sqrt(-q)

    @property
    def thetas(self) -> tuple[float, float, float, float]:
        return self.theta1, self.theta2, self.theta3, self.theta4


def _matrix(entries):
    g = np.zeros((4, 4))
    for (row, col), val in entries.items():
        g[row, col] = val
    return g


def generator_matrices() -> GeneratorSet:
    """Adjoint action of the four generators on ``(a, b, a+, b+)``."""
    g1 = _matrix({(A, AD): -1, (B, BD): 1, (AD, A): -1, (BD, B): 1})
    g2 = _matrix({(A, AD): -1, (B, BD): -1, (AD, A): -1, (BD, B): -1})
    g3 = _matrix({(A, B): -1, (B, A): 1, (AD, BD): -1, (BD, AD): 1})
    g4 = _matrix({(A, BD): -1, (B, AD): -1, (AD, B): -1, (BD, A): -1})
    return GeneratorSet(g1, g2, g3, g4)


def commutator_form() -> np.ndarray:
    """``J_ij = [Psi_i, Psi_j]`` for ``Psi = (a, b, a+, b+)``."""
    return np.block([[np.zeros((2, 2)), np.eye(2)], [-np.eye(2), np.zeros((2, 2))]])


_GENERATORS = generator_matrices()
_GRAM = np.array([[np.sum(gi * gj) for gj in _GENERATORS] for gi in _GENERATORS])


def cos_theta(q: float) -> float:
    """``cos(sqrt(q))`` continued to ``cosh(sqrt(-q))`` for ``q < 0``."""
    if abs(q) < _SERIES_CUT:
        return 1 - q / 2 + q * q / 24
    return math.cos(math.sqrt(q)) if q > 0 else math.cosh(math.sqrt(-q))


def sinc_theta(q: float) -> float:
    """``sin(sqrt(q))/sqrt(q)`` continued to ``sinh(sqrt(-q))/sqrt(-q)``."""
    if abs(q) < _SERIES_CUT:
        return 1 - q / 6 + q * q / 120
    if q > 0:
        r = math.sqrt(q)
        return math.sin(r) / r
    r = math.sqrt(-q)
    return math.sinh(r) / r


def reconstruct(params: SqueezingParams) -> np.ndarray:
    """``exp(sum theta_i g_i)``, the inverse Bogoliubov matrix."""
    return linalg.expm(_GENERATORS.combine(params.thetas))


def closed_form(params: SqueezingParams) -> np.ndarray:
    """Same matrix as :func:`reconstruct` from the trigonometric closed form."""
    g1, g2, g3, g4 = _GENERATORS
    t1, t2, t3, t4 = params.thetas
    q = params.theta_sq
    M = t1 * g1 + t3 * g3 + t4 * g4
    inner = cos_theta(q) * np.eye(4) + sinc_theta(q) * M
    outer = math.cosh(t2) * np.eye(4) + math.sinh(t2) * g2
    return outer @ inner


def _paraunitary_inverse(T: np.ndarray) -> np.ndarray:
    g = symplectic_form(2)
    return g @ T.conj().T @ g


def extract(decomp: BogoliubovDecomposition | np.ndarray, tol: float = PROJECTION_TOL) -> SqueezingParams:
    """Squeezing parameters of a real Bogoliubov matrix.

    ``L = log(T^{-1})`` (principal branch) is projected onto the generators
    in the Frobenius inner product.

    Raises
    ------
    LogBranchError
        If ``T^{-1}`` has an eigenvalue on the closed negative real axis.
    ProjectionError
        If ``L`` is not in the span of the generators to within ``tol``.
    """
    T = decomp.matrix if isinstance(decomp, BogoliubovDecomposition) else np.asarray(decomp)
    if np.abs(np.imag(T)).max() > 0:
        raise ProjectionError("Bogoliubov matrix must be real")
    T = np.real(T)
    Tinv = _paraunitary_inverse(T)
    ev = linalg.eigvals(Tinv)
    scale = max(1.0, np.abs(ev).max())
    if np.any((np.abs(ev.imag) <= 1e-12 * scale) & (ev.real <= 0)):
        raise LogBranchError(f"eigenvalue on the negative real axis: {ev}")
    L = linalg.logm(Tinv)
    L = np.real_if_close(L, tol=1e6)
    if np.iscomplexobj(L):
        raise LogBranchError("matrix logarithm is not real")
    rhs = np.array([np.sum(g * L) for g in _GENERATORS])
    theta = linalg.solve(_GRAM, rhs, assume_a="pos")
    residual = float(np.abs(L - _GENERATORS.combine(theta)).max())
    if residual > tol:
        raise ProjectionError(f"logarithm leaves the 4-generator subalgebra (residual {residual:.3e})")
    return SqueezingParams(*map(float, theta), residual=residual)
