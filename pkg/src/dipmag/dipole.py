"""Dipolar lattice sums for square-lattice layers.

Every sum is pure geometry (lattice constant a = 1); callers multiply by the
dipole strength ``d``.  For a displacement ``(x, y, z)`` with
``r = |(x, y, z)|`` the weights are

    ISO    1 / r^3
    DIR_X  x^2 / r^5      DIR_Y  y^2 / r^5      DIR_Z  z^2 / r^5
    CROSS  x z / r^5

Intra-layer sums run over all in-plane displacements except the origin
(z = 0).  Inter-layer sums use z = l and include the in-plane origin, i.e. the
spin directly across the gap.

Infinite planes are summed directly inside a smooth (erfc) window and the
remainder outside the window is replaced by its continuum integral.  Because
the tail function is smooth on the scale of the window width, the lattice sum
of the tail equals its integral up to terms that fall off like a Gaussian in
the window width, so a few thousand lattice points already give machine
precision.  The window radius is doubled until two successive results agree.

Finite ``n x n`` lattices use minimum-image displacements on the torus.  When
``n`` is even, the displacement ``n/2`` along an axis has two equally near
images; both are kept with weight 1/2 so that reflection symmetry (and hence
the vanishing of CROSS) is exact.  Open ``n x n`` flakes instead average the
sum over every site of the flake, which weights a displacement ``(x, y)`` by
``(n - |x|)(n - |y|) / n^2``.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from .core import LatticeSpec
from .errors import ConvergenceError, DomainError

__all__ = [
    "SumKind",
    "DipoleSums",
    "intra_sum",
    "inter_sum",
    "dipole_sums",
    "minimum_image_offsets",
    "open_boundary_offsets",
]

# hard cap on the window radius for infinite sums
_MAX_RADIUS = 4096.0
_START_RADIUS = 8.0


class SumKind(enum.Enum):
    ISO = "iso"
    DIR_X = "dir_x"
    DIR_Y = "dir_y"
    DIR_Z = "dir_z"
    CROSS = "cross"


def weight(kind: SumKind, x, y, z):
    """Pointwise weight of ``kind`` for displacement arrays ``x, y, z``."""
    r2 = x * x + y * y + z * z
    if kind is SumKind.ISO:
        return r2 ** -1.5
    inv5 = r2 ** -2.5
    if kind is SumKind.DIR_X:
        return x * x * inv5
    if kind is SumKind.DIR_Y:
        return y * y * inv5
    if kind is SumKind.DIR_Z:
        return z * z * inv5
    return x * z * inv5


def _radial_average(kind: SumKind, r, h):
    # angular average of the weight on a circle of in-plane radius r at height h
    s = r * r + h * h
    if kind is SumKind.ISO:
        return s ** -1.5
    if kind in (SumKind.DIR_X, SumKind.DIR_Y):
        return 0.5 * r * r * s ** -2.5
    if kind is SumKind.DIR_Z:
        return h * h * s ** -2.5
    return 0.0 * r


def _far_tail(kind: SumKind, r0: float, h: float) -> float:
    # closed form of  int_{r0}^inf 2 pi r <w>(r) dr
    s0 = r0 * r0 + h * h
    if kind is SumKind.ISO:
        return 2 * math.pi / math.sqrt(s0)
    if kind in (SumKind.DIR_X, SumKind.DIR_Y):
        return math.pi / math.sqrt(s0) - (math.pi / 3) * h * h * s0 ** -1.5
    if kind is SumKind.DIR_Z:
        return (2 * math.pi / 3) * h * h * s0 ** -1.5
    return 0.0


@functools.lru_cache(maxsize=64)
def _disk_points(radius: float) -> tuple[np.ndarray, np.ndarray]:
    m = int(math.ceil(radius))
    g = np.arange(-m, m + 1, dtype=float)
    x, y = np.meshgrid(g, g, indexing="ij")
    x = x.ravel()
    y = y.ravel()
    keep = x * x + y * y <= radius * radius
    return x[keep], y[keep]


def _windowed_sum(kind: SumKind, h: float, r0: float, include_origin: bool) -> float:
    sigma = r0 / 8.0
    x, y = _disk_points(r0 + 8.0 * sigma)
    if not include_origin:
        nz = (x != 0) | (y != 0)
        x, y = x[nz], y[nz]
    r = np.hypot(x, y)
    w = 0.5 * special.erfc((r - r0) / sigma)
    direct = float(np.sum(weight(kind, x, y, h) * w))

    def tail(rr):
        return 2 * math.pi * rr * _radial_average(kind, rr, h) * 0.5 * special.erfc((r0 - rr) / sigma)

    lo, hi = r0 - 7.0 * sigma, r0 + 8.0 * sigma
    near, _ = integrate.quad(tail, lo, hi, epsabs=0.0, epsrel=2e-14, limit=400)
    return direct + near + _far_tail(kind, hi, h)


def _infinite_sum(kind: SumKind, h: float, include_origin: bool, rel_tol: float) -> tuple[float, float]:
    r0 = _START_RADIUS
    prev = _windowed_sum(kind, h, r0, include_origin)
    prev_ref = _windowed_sum(SumKind.ISO, h, r0, include_origin) if kind is not SumKind.ISO else prev
    while True:
        r0 *= 2
        if r0 > _MAX_RADIUS:
            raise ConvergenceError(
                f"{kind.value} sum at h={h} did not reach rel_tol={rel_tol} within radius {_MAX_RADIUS}"
            )
        val = _windowed_sum(kind, h, r0, include_origin)
        ref = _windowed_sum(SumKind.ISO, h, r0, include_origin) if kind is not SumKind.ISO else val
        remainder = abs(val - prev)
        # tolerance is relative to the isotropic sum, which bounds every weight
        if remainder <= rel_tol * abs(ref) and abs(ref - prev_ref) <= rel_tol * abs(ref):
            return val, remainder
        prev, prev_ref = val, ref


def minimum_image_offsets(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Minimum-image displacements along one torus axis and their weights.

    For even ``n`` the half-way displacement appears twice (``+n/2`` and
    ``-n/2``) with weight 1/2 each.
    """
    offs, wts = [], []
    for d in range(n):
        m = d if d <= n // 2 else d - n
        if n % 2 == 0 and d == n // 2:
            offs += [n / 2, -n / 2]
            wts += [0.5, 0.5]
        else:
            offs.append(float(m))
            wts.append(1.0)
    return np.array(offs), np.array(wts)


def open_boundary_offsets(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Displacements along one axis of an open chain of ``n`` sites.

    The weight ``(n - |d|)/n`` is the number of site pairs at offset ``d``
    per site, so the 2D product averages the sum over the whole flake.
    """
    o = np.arange(-(n - 1), n, dtype=float)
    return o, (n - np.abs(o)) / n


def _finite_sum(kind: SumKind, lattice: LatticeSpec, h: float, include_origin: bool) -> float:
    offsets = minimum_image_offsets if lattice.boundary == "periodic" else open_boundary_offsets
    o, w = offsets(lattice.n)
    x, y = np.meshgrid(o, o, indexing="ij")
    wt = np.outer(w, w)
    x, y, wt = x.ravel(), y.ravel(), wt.ravel()
    if not include_origin:
        nz = (x != 0) | (y != 0)
        x, y, wt = x[nz], y[nz], wt[nz]
    return float(np.sum(weight(kind, x, y, h) * wt))


def _check_tol(rel_tol: float) -> None:
    if not (0 < rel_tol <= 1e-2):
        raise DomainError(f"rel_tol must lie in (0, 1e-2], got {rel_tol}")


def _check_separation(l: float) -> None:
    if not (l > 0 and math.isfinite(l)):
        raise DomainError(f"layer separation must be finite and > 0, got {l}")


@functools.lru_cache(maxsize=4096)
def _intra_cached(kind: SumKind, lattice: LatticeSpec, rel_tol: float) -> tuple[float, float]:
    if lattice.is_finite:
        return _finite_sum(kind, lattice, 0.0, include_origin=False), 0.0
    if kind in (SumKind.DIR_Z, SumKind.CROSS):
        # weights carry a factor z = 0; summed anyway to exercise the geometry
        return _infinite_sum(kind, 0.0, False, rel_tol)[0], 0.0
    return _infinite_sum(kind, 0.0, False, rel_tol)


@functools.lru_cache(maxsize=16384)
def _inter_cached(kind: SumKind, l: float, lattice: LatticeSpec, rel_tol: float) -> tuple[float, float]:
    if lattice.is_finite:
        return _finite_sum(kind, lattice, l, include_origin=True), 0.0
    return _infinite_sum(kind, l, True, rel_tol)


def intra_sum(kind: SumKind, lattice: LatticeSpec, rel_tol: float = 1e-10) -> float:
    """Sum of ``kind`` over one layer, excluding the self term."""
    _check_tol(rel_tol)
    return _intra_cached(kind, lattice, float(rel_tol))[0]


def inter_sum(kind: SumKind, l: float, lattice: LatticeSpec, rel_tol: float = 1e-10) -> float:
    """Sum of ``kind`` from one site to every site of a parallel layer at height ``l``."""
    _check_tol(rel_tol)
    _check_separation(l)
    return _inter_cached(kind, float(l), lattice, float(rel_tol))[0]


@dataclass(frozen=True)
class DipoleSums:
    """Converged geometry sums for one lattice and separation."""

    intra: dict = field(hash=False)
    inter: dict = field(hash=False)
    separation: float
    lattice: LatticeSpec
    remainder: float = 0.0

    @property
    def inter_anisotropy(self) -> float:
        """``DIR_Z - DIR_X`` of the inter-layer sums.

        This single combination carries every inter-layer coupling of the two
        uniform states; it vanishes for a continuous sheet and is exponentially
        small in ``l`` for an infinite lattice.
        """
        return self.inter[SumKind.DIR_Z] - self.inter[SumKind.DIR_X]


def dipole_sums(lattice: LatticeSpec, l: float, rel_tol: float = 1e-10) -> DipoleSums:
    """All intra- and inter-layer sums needed downstream."""
    _check_tol(rel_tol)
    _check_separation(l)
    intra, inter, rem = {}, {}, 0.0
    for kind in SumKind:
        v, r = _intra_cached(kind, lattice, float(rel_tol))
        intra[kind] = v
        rem = max(rem, r)
        v, r = _inter_cached(kind, float(l), lattice, float(rel_tol))
        inter[kind] = v
        rem = max(rem, r)
    return DipoleSums(intra=intra, inter=inter, separation=float(l), lattice=lattice, remainder=rem)
