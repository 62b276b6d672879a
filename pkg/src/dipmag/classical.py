"""Classical ground state of the two uniformly magnetised layers.

Spins are classical vectors ``S n`` with ``n = (sin t, 0, cos t)`` in the x-z
plane.  Pair sums over a layer run over ordered pairs, so each spin sees the
full lattice sum of its neighbours; the inter-layer sum counts each A-B pair
once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .core import ModelParams, Phase, validate
from .dipole import DipoleSums, SumKind, dipole_sums
from .errors import BoundaryError, NoBoundaryError

__all__ = [
    "ClassicalConfig",
    "classical_energy",
    "classical_energy_grid",
    "boundary_residual",
    "determine_phase",
    "phase_boundary_distance",
    "grid_phase",
]

BOUNDARY_TOL = 1e-12
L_BRACKET = (0.05, 10.0)

# exchange coordination on the square lattice (nearest neighbours only)
_Z_NN = 4


@dataclass(frozen=True)
class ClassicalConfig:
    theta_a: float
    theta_b: float

    def __post_init__(self):
        object.__setattr__(self, "theta_a", _wrap(self.theta_a))
        object.__setattr__(self, "theta_b", _wrap(self.theta_b))


def _wrap(t: float) -> float:
    # map into (-pi, pi]
    w = math.remainder(t, 2 * math.pi)
    return math.pi if w == -math.pi else w


def _energy(ta, tb, params: ModelParams, sums: DipoleSums):
    s2 = params.spin ** 2
    d = params.d
    intra, inter = sums.intra, sums.inter
    sa, ca, sb, cb = np.sin(ta), np.cos(ta), np.sin(tb), np.cos(tb)

    def single(s, c):
        ex = -params.j1 * _Z_NN
        an = -params.kz * c * c - params.kx * s * s
        # n . G . n with G = sum (1 - 3 e e^T) / r^3 over one layer
        dip = d * (
            intra[SumKind.ISO]
            - 3 * (intra[SumKind.DIR_X] * s * s + intra[SumKind.DIR_Z] * c * c + 2 * intra[SumKind.CROSS] * s * c)
        )
        return s2 * (ex + an + dip)

    coupling = d * s2 * (
        inter[SumKind.ISO] * (sa * sb + ca * cb)
        - 3
        * (
            inter[SumKind.DIR_X] * sa * sb
            + inter[SumKind.DIR_Z] * ca * cb
            + inter[SumKind.CROSS] * (sa * cb + ca * sb)
        )
    )
    return single(sa, ca) + single(sb, cb) + coupling


def classical_energy(config: ClassicalConfig, params: ModelParams, sums: DipoleSums | None = None,
                     rel_tol: float = 1e-10) -> float:
    """Energy per lattice site of one layer for uniform tilts ``config``."""
    params = validate(params)
    if sums is None:
        sums = dipole_sums(params.lattice, params.separation, rel_tol)
    return float(_energy(config.theta_a, config.theta_b, params, sums))


def classical_energy_grid(params: ModelParams, n_a: int = 181, n_b: int = 361, sums: DipoleSums | None = None,
                          rel_tol: float = 1e-10):
    """Energy on a tilt grid ``theta_a in [0, pi]`` x ``theta_b in [-pi, pi]``.

    The global flip ``(t_a, t_b) -> (-t_a, -t_b)`` leaves the energy unchanged,
    so half of the ``theta_a`` circle suffices.  Returns ``(ta, tb, E)`` with
    ``E`` of shape ``(n_a, n_b)``.
    """
    params = validate(params)
    if sums is None:
        sums = dipole_sums(params.lattice, params.separation, rel_tol)
    ta = np.linspace(0.0, math.pi, n_a)
    tb = np.linspace(-math.pi, math.pi, n_b)
    A, B = np.meshgrid(ta, tb, indexing="ij")
    return ta, tb, _energy(A, B, params, sums)


def grid_phase(params: ModelParams, n_a: int = 181, n_b: int = 361, sums: DipoleSums | None = None,
               rel_tol: float = 1e-10) -> Phase | None:
    """Classify the grid argmin of the classical energy.

    Returns ``None`` when the minimum is neither uniform phase (which would
    signal a canted ground state).
    """
    ta, tb, E = classical_energy_grid(params, n_a, n_b, sums, rel_tol)
    i, j = np.unravel_index(np.argmin(E), E.shape)
    a, b = ta[i], tb[j]
    eps = 1e-9
    # OOP FM and its global spin flip
    if (abs(a) < eps and abs(b) < eps) or (abs(a - math.pi) < eps and abs(abs(b) - math.pi) < eps):
        return Phase.OOP_FM
    if abs(a - math.pi / 2) < eps and abs(b + math.pi / 2) < eps:
        return Phase.IP_AFM
    return None


def boundary_residual(params: ModelParams, sums: DipoleSums | None = None, rel_tol: float = 1e-10) -> float:
    """``[Kz - (Kx + 3 D_x)] - [D0_int - 3/2 (Dx_int + Dz_int)]``.

    Each D-coefficient is ``d`` times the matching geometry sum.  Positive
    values select OOP FM.  The residual equals ``(E_IP - E_OOP) / (2 S^2)``.
    """
    params = validate(params)
    if sums is None:
        sums = dipole_sums(params.lattice, params.separation, rel_tol)
    d = params.d
    left = params.kz - (params.kx + 3 * d * sums.intra[SumKind.DIR_X])
    right = d * (sums.inter[SumKind.ISO] - 1.5 * (sums.inter[SumKind.DIR_X] + sums.inter[SumKind.DIR_Z]))
    return left - right


def determine_phase(params: ModelParams, sums: DipoleSums | None = None, rel_tol: float = 1e-10) -> Phase:
    res = boundary_residual(params, sums, rel_tol)
    if abs(res) <= BOUNDARY_TOL:
        raise BoundaryError(f"parameters lie on the phase boundary (residual {res:.3e})")
    return Phase.OOP_FM if res > 0 else Phase.IP_AFM


def phase_boundary_distance(params: ModelParams, bracket: tuple[float, float] = L_BRACKET,
                            rel_tol: float = 1e-10) -> float:
    """Critical separation ``l*``: root of the boundary residual inside ``bracket``.

    Uses Brent's bracketing method converged to machine precision in ``l``.
    ``params.separation`` is ignored.

    Raises
    ------
    NoBoundaryError
        If the residual has the same sign at both ends of ``bracket``.
    """
    params = validate(params)

    def f(l):
        return boundary_residual(params.with_separation(l), rel_tol=rel_tol)

    lo, hi = bracket
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise NoBoundaryError(f"no phase change for l in [{lo}, {hi}] (residuals {flo:.3e}, {fhi:.3e})")
    return float(optimize.brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200))
