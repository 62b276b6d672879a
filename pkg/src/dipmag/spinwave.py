"""k = 0 magnon Hamiltonian of the coupled layers.

The quadratic Hamiltonian of the uniform modes ``a = a_0`` and ``b = b_0`` is

    H = E (a+a + b+b) + mu1 (a+b + b+a) + mu2 (ab + a+b+) + xi (aa + a+a+ + bb + b+b+)

which equals ``1/2 Psi+ H0 Psi`` (up to a constant) for
``Psi = (a, b, a+, b+)`` and the 4x4 matrix returned by
:meth:`BdgBlock.matrix`.  The positive eigenvalues of ``sigma_3 H0`` are the
magnon energies.

Every bilinear spin coupling ``S_i^T M S_j`` is rotated into the local frames
``F = [e1 e2 e3]`` of the two spins.  With ``C = F_i^T M F_j`` the quadratic
part of a pair term is

    (S/2) [(C11 - C22)(c_i c_j + h.c.) + (C11 + C22)(c_i c_j+ + c_i+ c_j)]
        - S C33 (n_i + n_j)

so, with ``G`` the per-site sum of intra-layer tensors (exchange, dipolar and
anisotropy) and ``W`` the per-site inter-layer tensor,

    E   = S (g11 + g22 - 2 g33) - S w33
    xi  = (S/2)(g11 - g22)
    mu1 = (S/2)(w11 + w22)
    mu2 = (S/2)(w11 - w22)

The single-site anisotropy ``S_i^T K S_i`` gives the same coefficients as a
pair term with ``C = F^T K F``, so it is simply added to ``G``.  See
``docs/spinwave_derivation.md`` for the full derivation and the closed forms
of the two phases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classical import BOUNDARY_TOL, boundary_residual
from .core import ModelParams, Phase, validate
from .dipole import DipoleSums, SumKind, dipole_sums, minimum_image_offsets
from .errors import DomainError, PhaseMismatchError, SizeError

__all__ = [
    "BdgBlock",
    "local_frame",
    "bdg_block",
    "brute_force_block",
    "real_space_bdg",
    "isolated_block",
    "MAX_ORACLE_N",
]

MAX_ORACLE_N = 64
# largest lattice for which the dense 4N x 4N matrix is materialised
_MAX_DENSE_N = 32

_LAMBDA = np.array([1.0, -1.0j])  # T_1 ~ a + a+,  T_2 ~ -i(a - a+)


@dataclass(frozen=True)
class BdgBlock:
    """Real k = 0 coefficients; both layers share ``e`` and ``xi``."""

    e: float
    mu1: float
    mu2: float
    xi: float
    phase: Phase | None = None

    def matrix(self) -> np.ndarray:
        e, m1, m2, x2 = self.e, self.mu1, self.mu2, 2 * self.xi
        return np.array(
            [
                [e, m1, x2, m2],
                [m1, e, m2, x2],
                [x2, m2, e, m1],
                [m2, x2, m1, e],
            ]
        )

    def as_tuple(self) -> tuple[float, float, float, float]:
        return self.e, self.mu1, self.mu2, self.xi


def local_frame(theta: float) -> np.ndarray:
    """Columns ``e1, e2, e3`` of the right-handed frame tilted by ``theta``."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def _intra_tensor(params: ModelParams, sums: DipoleSums) -> np.ndarray:
    # per-site sum of (ordered-pair) couplings inside one layer, plus anisotropy
    I = sums.intra
    dip = params.d * np.array(
        [
            [I[SumKind.ISO] - 3 * I[SumKind.DIR_X], 0.0, -3 * I[SumKind.CROSS]],
            [0.0, I[SumKind.ISO] - 3 * I[SumKind.DIR_Y], 0.0],
            [-3 * I[SumKind.CROSS], 0.0, I[SumKind.ISO] - 3 * I[SumKind.DIR_Z]],
        ]
    )
    exchange = -4 * params.j1 * np.eye(3)
    aniso = -np.diag([params.kx, 0.0, params.kz])
    return dip + exchange + aniso


def _inter_tensor(params: ModelParams, sums: DipoleSums) -> np.ndarray:
    X = sums.inter
    return params.d * np.array(
        [
            [X[SumKind.ISO] - 3 * X[SumKind.DIR_X], 0.0, -3 * X[SumKind.CROSS]],
            [0.0, X[SumKind.ISO] - 3 * X[SumKind.DIR_Y], 0.0],
            [-3 * X[SumKind.CROSS], 0.0, X[SumKind.ISO] - 3 * X[SumKind.DIR_Z]],
        ]
    )


def _coefficients(params: ModelParams, phase: Phase, G: np.ndarray, W: np.ndarray) -> BdgBlock:
    S = params.spin
    Fa, Fb = local_frame(phase.theta_a), local_frame(phase.theta_b)
    ga = Fa.T @ G @ Fa
    gb = Fb.T @ G @ Fb
    w = Fa.T @ W @ Fb
    e_a = S * (ga[0, 0] + ga[1, 1] - 2 * ga[2, 2]) - S * w[2, 2]
    e_b = S * (gb[0, 0] + gb[1, 1] - 2 * gb[2, 2]) - S * w[2, 2]
    xi_a = 0.5 * S * (ga[0, 0] - ga[1, 1])
    xi_b = 0.5 * S * (gb[0, 0] - gb[1, 1])
    # both phases are mirror images of each other under A <-> B
    assert abs(e_a - e_b) <= 1e-12 * max(1.0, abs(e_a)) and abs(xi_a - xi_b) <= 1e-12 * max(1.0, abs(xi_a))
    return BdgBlock(
        e=float(e_a),
        mu1=float(0.5 * S * (w[0, 0] + w[1, 1])),
        mu2=float(0.5 * S * (w[0, 0] - w[1, 1])),
        xi=float(xi_a),
        phase=phase,
    )


def bdg_block(params: ModelParams, phase: Phase, sums: DipoleSums | None = None,
              rel_tol: float = 1e-10) -> BdgBlock:
    """Analytic k = 0 block for ``phase``.

    Raises
    ------
    PhaseMismatchError
        If ``phase`` is not the classical ground state.  On the boundary
        itself (residual below the boundary tolerance) either phase is
        accepted.
    """
    params = validate(params)
    if sums is None:
        sums = dipole_sums(params.lattice, params.separation, rel_tol)
    res = boundary_residual(params, sums)
    if abs(res) > BOUNDARY_TOL:
        expected = Phase.OOP_FM if res > 0 else Phase.IP_AFM
        if phase is not expected:
            raise PhaseMismatchError(f"{phase.name} requested but ground state is {expected.name}")
    return _coefficients(params, phase, _intra_tensor(params, sums), _inter_tensor(params, sums))


def isolated_block(params: ModelParams, rel_tol: float = 1e-10) -> BdgBlock:
    """Block of two non-interacting layers in their own ground state.

    The isolated layer orders in-plane when the dipolar shape anisotropy
    ``3 d D_x`` beats ``kz - kx``; its in-plane axis is x, so the IP AFM frames
    apply (the sign of the tilt does not matter without coupling).
    """
    params = validate(params)
    sums = dipole_sums(params.lattice, params.separation, rel_tol)
    in_plane = params.kz - params.kx - 3 * params.d * sums.intra[SumKind.DIR_X] < 0
    phase = Phase.IP_AFM if in_plane else Phase.OOP_FM
    return _coefficients(params, phase, _intra_tensor(params, sums), np.zeros((3, 3)))


# --------------------------------------------------------------------------
# real-space oracle


def _pair_tensors(dx, dy, dz, d):
    """``d (1 - 3 e e^T) / r^3`` for displacement arrays, shape (P, 3, 3)."""
    r = np.stack([dx, dy, dz], axis=-1)
    r2 = np.sum(r * r, axis=-1)
    inv3 = r2 ** -1.5
    ee = r[:, :, None] * r[:, None, :] / r2[:, None, None]
    return d * inv3[:, None, None] * (np.eye(3)[None] - 3 * ee)


def _displacement_tensors(n: int, dz: float, d: float) -> np.ndarray:
    """Coupling tensor for every torus displacement ``(p, q)``, shape (n, n, 3, 3).

    Half-way displacements average their two (or four) nearest images.
    """
    o, w = minimum_image_offsets(n)
    idx = np.array([int(round(v)) % n for v in o])
    X, Y = np.meshgrid(o, o, indexing="ij")
    Wt = np.outer(w, w)
    IX, IY = np.meshgrid(idx, idx, indexing="ij")
    X, Y, Wt, IX, IY = X.ravel(), Y.ravel(), Wt.ravel(), IX.ravel(), IY.ravel()
    out = np.zeros((n, n, 3, 3))
    keep = (X != 0) | (Y != 0) | (dz != 0)
    T = _pair_tensors(X[keep], Y[keep], np.full(keep.sum(), dz), d) * Wt[keep][:, None, None]
    np.add.at(out, (IX[keep], IY[keep]), T)
    return out


class _Assembler:
    """Collects ``1/2 Phi+ H Phi`` from operator products.

    ``Phi = (c_0 .. c_{M-1}, c_0+ .. c_{M-1}+)``.  A product ``coef Phi_p Phi_q``
    adds ``coef`` to ``H[tau(p), q]`` and ``H[tau(q), p]`` where ``tau`` swaps
    the annihilation and creation halves.
    """

    def __init__(self, n_modes: int, dense: bool):
        self.m = n_modes
        self.block = np.zeros((4, 4), dtype=complex)
        self.linear = np.zeros(2 * n_modes, dtype=complex)
        self.dense = np.zeros((2 * n_modes, 2 * n_modes), dtype=complex) if dense else None
        self.n_per_layer = n_modes // 2

    def _tau(self, p):
        return np.where(p < self.m, p + self.m, p - self.m)

    def product(self, p, q, coef):
        p, q, coef = np.broadcast_arrays(p, q, coef)
        rows = np.concatenate([self._tau(p), self._tau(q)])
        cols = np.concatenate([q, p])
        vals = np.concatenate([coef, coef])
        if self.dense is not None:
            np.add.at(self.dense, (rows, cols), vals)
        # k = 0 projection: block index is (layer, creation/annihilation)
        N = self.n_per_layer
        np.add.at(self.block, (rows // N, cols // N), vals / N)

    def add_linear(self, p, coef):
        np.add.at(self.linear, p, coef)


def _add_transverse(asm: _Assembler, i, j, C, S):
    """Quadratic terms of ``sum_{m,n in (1,2)} C_mn T_im T_jn``."""
    m = asm.m
    amp = S / 2.0
    for pi, lam_i in ((i, _LAMBDA), (i + m, _LAMBDA.conj())):
        for qj, lam_j in ((j, _LAMBDA), (j + m, _LAMBDA.conj())):
            coef = amp * np.einsum("pmn,m,n->p", C[:, :2, :2], lam_i, lam_j)
            asm.product(pi, qj, coef)


def _add_number(asm: _Assembler, i, coef):
    # coef * c_i+ c_i
    asm.product(i + asm.m, i, coef)


def _add_linear_terms(asm: _Assembler, i, C_row, S):
    # coef_m * T_im, with T_im = sqrt(S/2)(lam_m c_i + lam_m* c_i+)
    amp = np.sqrt(S / 2.0)
    asm.add_linear(i, amp * (C_row @ _LAMBDA))
    asm.add_linear(i + asm.m, amp * (C_row @ _LAMBDA.conj()))


def _assemble(params: ModelParams, phase: Phase, dense: bool) -> _Assembler:
    n = params.lattice.n
    N = n * n
    S = params.spin
    asm = _Assembler(2 * N, dense)
    frames = [local_frame(phase.theta_a), local_frame(phase.theta_b)]
    ix, iy = np.divmod(np.arange(N), n)

    def pairs(layer_i, layer_j, tensors, skip_self):
        # every ordered pair (i, j) with i in layer_i, j in layer_j
        I, J = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
        I, J = I.ravel(), J.ravel()
        if skip_self:
            keep = I != J
            I, J = I[keep], J[keep]
        px = (ix[J] - ix[I]) % n
        py = (iy[J] - iy[I]) % n
        M = tensors[px, py]
        Fi, Fj = frames[layer_i], frames[layer_j]
        C = np.einsum("ai,pab,bj->pij", Fi, M, Fj)
        gi, gj = I + layer_i * N, J + layer_j * N
        _add_transverse(asm, gi, gj, C, S)
        _add_number(asm, gi, -S * C[:, 2, 2])
        _add_number(asm, gj, -S * C[:, 2, 2])
        _add_linear_terms(asm, gi, S * C[:, :2, 2], S)
        _add_linear_terms(asm, gj, S * C[:, 2, :2], S)

    intra = _displacement_tensors(n, 0.0, params.d)
    # nearest-neighbour exchange, -J1 S_i . S_j for each ordered neighbour pair
    for sx, sy in ((1, 0), (n - 1, 0), (0, 1), (0, n - 1)):
        intra[sx, sy] += -params.j1 * np.eye(3)
    inter = _displacement_tensors(n, params.separation, params.d)
    pairs(0, 0, intra, True)
    pairs(1, 1, intra, True)
    pairs(0, 1, inter, False)

    aniso = -np.diag([params.kx, 0.0, params.kz])
    for layer in (0, 1):
        F = frames[layer]
        K = F.T @ aniso @ F
        sites = np.arange(N) + layer * N
        C = np.broadcast_to(K, (N, 3, 3))
        _add_transverse(asm, sites, sites, C, S)
        _add_number(asm, sites, np.full(N, -2 * S * K[2, 2]))
        _add_linear_terms(asm, sites, np.broadcast_to(2 * S * K[:2, 2], (N, 2)), S)
    return asm


def _check_oracle_params(params: ModelParams) -> ModelParams:
    params = validate(params)
    if not params.lattice.is_finite:
        raise DomainError("the real-space oracle needs a finite lattice")
    if params.lattice.boundary != "periodic":
        raise DomainError("the real-space oracle is built on the torus (periodic boundary)")
    if params.lattice.n > MAX_ORACLE_N:
        raise SizeError(f"oracle is capped at n = {MAX_ORACLE_N} (got {params.lattice.n})")
    return params


def brute_force_block(params: ModelParams, phase: Phase) -> BdgBlock:
    """k = 0 block from the literal real-space expansion on the torus.

    Every ordered spin pair is expanded to quadratic order in the bosons, the
    resulting ``4N x 4N`` form is projected onto the uniform modes and the
    coefficients are read off the paper-layout entries.  No phase check is
    made; linear terms are returned via :func:`real_space_bdg` for callers
    that want to confirm stationarity.
    """
    params = _check_oracle_params(params)
    asm = _assemble(params, phase, dense=False)
    H0 = asm.block
    return BdgBlock(
        e=float(H0[0, 0].real),
        mu1=float(H0[1, 0].real),
        mu2=float(H0[3, 0].real),
        xi=float(H0[2, 0].real / 2),
        phase=phase,
    )


def real_space_bdg(params: ModelParams, phase: Phase) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Dense real-space BdG matrix, its k = 0 block and the linear-term vector.

    Only for ``n <= 32``.  The matrix acts on ``(c_A, c_B, c_A+, c_B+)`` with
    sites ordered row-major inside each layer.
    """
    params = _check_oracle_params(params)
    if params.lattice.n > _MAX_DENSE_N:
        raise SizeError(f"dense matrix is capped at n = {_MAX_DENSE_N}")
    asm = _assemble(params, phase, dense=True)
    return asm.dense, asm.block, asm.linear
