import math

import numpy as np
import pytest

from dipmag.bogoliubov import analytic_bogoliubov, eigenenergies
from dipmag.classical import phase_boundary_distance
from dipmag.core import LatticeSpec, ModelParams, Phase
from dipmag.dipole import SumKind, dipole_sums
from dipmag.errors import DomainError, PhaseMismatchError, SizeError
from dipmag.spinwave import (
    BdgBlock,
    bdg_block,
    brute_force_block,
    isolated_block,
    local_frame,
    real_space_bdg,
)


def closed_form(params, phase):
    s = dipole_sums(params.lattice, params.separation)
    iso = s.intra[SumKind.ISO]
    delta = s.inter_anisotropy
    S, d, kz, kx = params.spin, params.d, params.kz, params.kx
    if phase is Phase.OOP_FM:
        return S * (2 * kz - kx - 3 * d * iso + 2 * d * delta), S * d * delta, 0.0, -S * kx / 2
    return (
        S * (2 * kx - kz + 1.5 * d * iso + d * delta),
        1.5 * S * d * delta,
        0.5 * S * d * delta,
        S * (0.75 * d * iso - kz / 2),
    )


def test_local_frame_orthonormal():
    for t in (0.0, 0.4, math.pi / 2, -math.pi / 2):
        F = local_frame(t)
        assert np.allclose(F.T @ F, np.eye(3))
        assert np.linalg.det(F) == pytest.approx(1.0)
        assert np.allclose(F[:, 2], [math.sin(t), 0, math.cos(t)])


def test_block_matrix_layout():
    b = BdgBlock(e=1.0, mu1=0.2, mu2=0.3, xi=0.05)
    H = b.matrix()
    assert np.allclose(H, H.T)
    assert H[0, 2] == 0.1 and H[0, 3] == 0.3 and H[0, 1] == 0.2


@pytest.mark.parametrize("l, phase", [(0.2, Phase.OOP_FM), (0.3, Phase.OOP_FM), (1.0, Phase.IP_AFM), (3.0, Phase.IP_AFM)])
@pytest.mark.parametrize("lattice", [LatticeSpec.infinite(), LatticeSpec.finite(100)], ids=str)
def test_closed_forms(l, phase, lattice):
    p = ModelParams(separation=l, lattice=lattice)
    b = bdg_block(p, phase)
    assert np.allclose(b.as_tuple(), closed_form(p, phase), rtol=1e-12, atol=1e-14)  # exchange cancels at the 1e-16 |J1| level


@pytest.mark.parametrize("l, phase", [(0.2, Phase.OOP_FM), (1.0, Phase.IP_AFM)])
def test_brute_force_oracle_16(finite16, l, phase):
    p = finite16.with_separation(l)
    a = np.array(bdg_block(p, phase).as_tuple())
    b = np.array(brute_force_block(p, phase).as_tuple())
    assert np.abs(a - b).max() < 1e-10


@pytest.mark.parametrize("phase, l", [(Phase.OOP_FM, 0.25), (Phase.IP_AFM, 0.6)])
def test_real_space_form_is_hermitian_and_stationary(phase, l):
    p = ModelParams(separation=l, lattice=LatticeSpec.finite(6), d=2e-3, kz=2e-3, kx=1e-4)
    H, block, linear = real_space_bdg(p, phase)
    assert np.abs(H - H.conj().T).max() < 1e-14
    assert np.abs(linear).max() < 1e-15
    # the uniform modes of each layer span an invariant subspace (no k != 0 mixing)
    N = 36
    P = np.zeros((4 * N, 4))
    for k in range(4):
        P[k * N:(k + 1) * N, k] = 1 / math.sqrt(N)
    HP = H @ P
    assert np.abs(HP - P @ (P.T @ HP)).max() < 1e-14


def test_zero_dipole_limits():
    p = ModelParams(d=0.0, separation=0.8)
    b = bdg_block(p, Phase.OOP_FM)
    assert b.mu1 == 0.0 and b.mu2 == 0.0
    assert b.xi == pytest.approx(-p.spin * p.kx / 2)
    assert b.e == pytest.approx(p.spin * (2 * p.kz - p.kx))


@pytest.mark.parametrize("l, wrong", [(0.2, Phase.IP_AFM), (1.0, Phase.OOP_FM)])
def test_phase_mismatch(params, l, wrong):
    with pytest.raises(PhaseMismatchError):
        bdg_block(params.with_separation(l), wrong)


def test_both_phases_accepted_on_boundary(params):
    q = params.with_separation(phase_boundary_distance(params))
    for ph in Phase:
        eb = eigenenergies(bdg_block(q, ph))[1]
        assert eb / eigenenergies(isolated_block(q))[0] < 1e-3


def test_isolated_layer_energy(params):
    b = isolated_block(params)
    assert b.mu1 == 0 and b.mu2 == 0
    ea, eb = eigenenergies(b)
    assert ea == eb == pytest.approx(math.sqrt(b.e ** 2 - 4 * b.xi ** 2))


@pytest.mark.parametrize("l", [10.0, 30.0])
def test_large_separation_decouples(params, l):
    q = params.with_separation(l)
    b = bdg_block(q, Phase.IP_AFM)
    e0 = eigenenergies(isolated_block(q))[0]
    for e in eigenenergies(b):
        assert abs(e - e0) / e0 < 1e-3


def test_coefficients_continuous_within_phase(params):
    ls = np.linspace(0.36, 0.4, 9)
    vals = np.array([bdg_block(params.with_separation(l), Phase.IP_AFM).as_tuple() for l in ls])
    steps = np.abs(np.diff(vals, axis=0)).max(axis=0)
    assert np.all(steps < 0.1 * np.abs(vals).max(axis=0) + 1e-15)


def test_oracle_limits(params):
    with pytest.raises(DomainError):
        brute_force_block(params, Phase.OOP_FM)
    with pytest.raises(SizeError):
        brute_force_block(params.with_lattice(LatticeSpec.finite(65)), Phase.OOP_FM)
    with pytest.raises(SizeError):
        real_space_bdg(params.with_lattice(LatticeSpec.finite(40)), Phase.OOP_FM)
    with pytest.raises(DomainError):
        brute_force_block(params.with_lattice(LatticeSpec.finite(8, "open")), Phase.OOP_FM)


@pytest.mark.parametrize("l, phase", [(0.2, Phase.OOP_FM), (0.5, Phase.IP_AFM), (2.0, Phase.IP_AFM)])
def test_normalised_results_independent_of_spin(l, phase):
    ref = None
    for S in (0.5, 1.0, 2.5):
        q = ModelParams(spin=S, separation=l)
        b = bdg_block(q, phase)
        e0 = eigenenergies(isolated_block(q))[0]
        d = analytic_bogoliubov(b)
        out = np.r_[np.array(eigenenergies(b)) / e0, d.matrix.ravel()]
        if ref is None:
            ref = out
        assert np.allclose(out, ref, rtol=1e-12, atol=1e-13)
