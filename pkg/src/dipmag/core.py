"""Parameter and convention types.

Units: hbar = a = 1 and every energy is measured in units of |J1|.
The dipole strength ``d`` is the prefactor of ``a^3 D / |r|^3`` and is shared
by the intra-layer and inter-layer dipolar couplings.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional

from .errors import DomainError


BOUNDARIES = ("periodic", "open")


@dataclass(frozen=True)
class LatticeSpec:
    """Square lattice of one ferromagnet.

    ``n is None`` means an infinite plane.  Otherwise the layer has ``n x n``
    sites, either on a torus (``boundary="periodic"``, minimum-image
    distances) or as an open flake (``boundary="open"``), in which case the
    lattice sums are averaged over all sites of the flake.
    """

    n: Optional[int] = None
    boundary: str = "periodic"

    def __post_init__(self):
        if self.boundary not in BOUNDARIES:
            raise DomainError(f"boundary must be one of {BOUNDARIES}, got {self.boundary!r}")
        if self.n is None and self.boundary != "periodic":
            raise DomainError("an infinite lattice has no boundary")

    @classmethod
    def infinite(cls) -> "LatticeSpec":
        return cls(None)

    @classmethod
    def finite(cls, n: int, boundary: str = "periodic") -> "LatticeSpec":
        return cls(int(n), boundary)

    @classmethod
    def parse(cls, text: str) -> "LatticeSpec":
        """Parse ``"infinite"``, ``"100"``, ``"100x100"`` or ``"open:100"``."""
        s = str(text).strip().lower()
        if s in ("inf", "infinite"):
            return cls.infinite()
        boundary = "periodic"
        if ":" in s:
            boundary, s = (part.strip() for part in s.split(":", 1))
        if "x" in s:
            a, b = s.split("x", 1)
            if a != b:
                raise DomainError(f"only square lattices are supported, got {text!r}")
            s = a
        try:
            n = int(s)
        except ValueError:
            raise DomainError(f"cannot parse lattice {text!r}") from None
        return cls.finite(n, boundary)

    @property
    def is_finite(self) -> bool:
        return self.n is not None

    def __str__(self) -> str:
        if self.n is None:
            return "infinite"
        size = f"{self.n}x{self.n}"
        return size if self.boundary == "periodic" else f"{self.boundary}:{size}"


class Phase(enum.Enum):
    """Classical ordering of the two ferromagnets.

    Angles are tilts from the z axis inside the x-z plane.
    """

    OOP_FM = "oop_fm"
    IP_AFM = "ip_afm"

    @property
    def theta_a(self) -> float:
        return 0.0 if self is Phase.OOP_FM else math.pi / 2

    @property
    def theta_b(self) -> float:
        return 0.0 if self is Phase.OOP_FM else -math.pi / 2

    @property
    def angles(self) -> tuple[float, float]:
        return self.theta_a, self.theta_b


@dataclass(frozen=True)
class ModelParams:
    """Couplings of two identical dipole-coupled square-lattice ferromagnets."""

    j1: float = 1.0
    kz: float = 1e-4
    kx: float = 1e-6
    d: float = 0.5e-4
    spin: float = 1.0
    separation: float = 0.5
    lattice: LatticeSpec = field(default_factory=LatticeSpec.infinite)

    def with_separation(self, l: float) -> "ModelParams":
        return replace(self, separation=float(l))

    def with_lattice(self, lattice: LatticeSpec) -> "ModelParams":
        return replace(self, lattice=lattice)


def validate(params: ModelParams) -> ModelParams:
    """Return ``params`` unchanged if every invariant holds.

    Raises
    ------
    DomainError
        Naming the first violated invariant.
    """
    p = params
    values = (p.j1, p.kz, p.kx, p.d, p.spin, p.separation)
    if not all(math.isfinite(v) for v in values):
        raise DomainError(f"parameters must be finite (got {values})")
    checks = [
        (p.j1 > 0, f"j1 must be > 0 (got {p.j1})"),
        (p.kx > 0, f"kx must be > 0 (got {p.kx})"),
        (p.kz > p.kx, f"kz must exceed kx (got kz={p.kz}, kx={p.kx})"),
        (p.d >= 0, f"d must be >= 0 (got {p.d})"),
        (p.spin > 0, f"spin must be > 0 (got {p.spin})"),
        (p.separation > 0, f"separation must be > 0 (got {p.separation})"),
    ]
    for ok, msg in checks:
        if not ok:
            raise DomainError(msg)
    if p.lattice.is_finite and p.lattice.n < 2:
        raise DomainError(f"finite lattice needs n >= 2 (got {p.lattice.n})")
    return p
