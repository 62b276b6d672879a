"""Shared test utilities."""

import numpy as np

from dipmag import dipole
from dipmag.bogoliubov import eigenenergies
from dipmag.errors import InstabilityError
from dipmag.spinwave import BdgBlock

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(number, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'}  criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def cold_caches() -> None:
    """Drop memoised lattice sums so timings include the full computation."""
    for f in (dipole._intra_cached, dipole._inter_cached, dipole._disk_points):
        f.cache_clear()


def random_stable_blocks(n, seed=0, min_split=1e-6):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        e = rng.uniform(0.5, 2.0)
        mu1, mu2, xi = rng.uniform(-0.45, 0.45, 3) * e
        b = BdgBlock(e, mu1, mu2, xi)
        try:
            ea, eb = eigenenergies(b)
        except InstabilityError:
            continue
        if min(ea, eb) > 1e-3 and abs(ea - eb) > min_split:
            out.append(b)
    return out


def normalized(decomp):
    """U, V with columns ordered by decreasing energy and diag(U) > 0."""
    order = np.argsort(-decomp.energies[:2], kind="stable")
    u, v = decomp.u[:, order], decomp.v[:, order]
    s = np.where(np.diag(u) < 0, -1.0, 1.0)
    return u * s, v * s
