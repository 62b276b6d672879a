import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import linalg
from scipy.sparse import linalg as splinalg

from dipmag.bogoliubov import analytic_bogoliubov
from dipmag.core import Phase
from dipmag.entanglement import (
    CovarianceMatrix,
    covariance_from_bogoliubov,
    entanglement_amplitude,
    eta_minus_analytic,
    eta_minus_numeric,
    log_negativity,
    phase_space_map,
    symplectic_eigenvalues,
)
from dipmag.errors import DomainError, NumericalError
from dipmag.spinwave import bdg_block
from dipmag.squeezing import SqueezingParams, extract, reconstruct

from fock import two_mode_ops


def cov_of(thetas):
    return covariance_from_bogoliubov(linalg.inv(reconstruct(SqueezingParams(*thetas))))


def test_vacuum():
    cov = covariance_from_bogoliubov(np.eye(4))
    assert np.allclose(cov.v, 0.5 * np.eye(4))
    assert eta_minus_numeric(cov) == pytest.approx(0.5)
    assert eta_minus_analytic(SqueezingParams(0, 0, 0, 0)) == 0.5


@pytest.mark.parametrize("t4", [0.1, -0.3, 0.8])
def test_two_mode_squeeze(t4):
    cov = cov_of((0, 0, 0, t4))
    assert abs(cov.v[0, 1]) == pytest.approx(math.sinh(2 * abs(t4)) / 2, rel=1e-12)
    assert abs(cov.v[2, 3]) == pytest.approx(math.sinh(2 * abs(t4)) / 2, rel=1e-12)
    assert cov.v[0, 0] == pytest.approx(math.cosh(2 * t4) / 2, rel=1e-12)
    assert eta_minus_numeric(cov) == pytest.approx(math.exp(-2 * abs(t4)) / 2, rel=1e-12)
    e_n = log_negativity(eta_minus_analytic(SqueezingParams(0, 0, 0, t4)))
    assert abs(e_n - 2 * abs(t4)) < 1e-12


@pytest.mark.parametrize("thetas", [(0, 0, 0.7, 0), (0.6, 0, 0, 0), (0.6, 0.4, 0, 0)])
def test_separable_cases(thetas):
    p = SqueezingParams(*thetas)
    assert entanglement_amplitude(p) == 0.0
    assert abs(log_negativity(eta_minus_analytic(p))) < 1e-12
    assert eta_minus_numeric(cov_of(thetas)) == pytest.approx(0.5, abs=1e-12)


def test_mixed_mechanism():
    p = SqueezingParams(0.3, 0.0, 0.5, 0.0)
    assert log_negativity(eta_minus_analytic(p)) > 0
    assert log_negativity(eta_minus_numeric(cov_of(p.thetas))) > 0


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-1.0, 1.0), min_size=4, max_size=4))
def test_theta2_invariance_bitwise(th):
    vals = {eta_minus_analytic(SqueezingParams(th[0], t2, th[2], th[3])) for t2 in (0.0, 0.5, 2.0)}
    assert len(vals) == 1


@settings(max_examples=300, deadline=None)
@given(st.lists(st.floats(-1.0, 1.0), min_size=4, max_size=4))
def test_routes_agree_random(th):
    p = SqueezingParams(*th)
    cov = cov_of(th)
    ea = eta_minus_analytic(p)
    assert ea <= 0.5
    assert (ea < 0.5) == (entanglement_amplitude(p) != 0) or abs(entanglement_amplitude(p)) < 1e-12
    assert abs(ea - eta_minus_numeric(cov)) < 1e-10
    assert eta_minus_numeric(cov, "A") == pytest.approx(eta_minus_numeric(cov, "B"), abs=1e-12)
    assert cov.uncertainty_margin() > -1e-12


def test_log_negativity():
    assert log_negativity(0.5) == 0.0
    assert log_negativity(math.exp(-0.6) / 2) == pytest.approx(0.6, rel=1e-14)
    assert log_negativity(0.7) == 0.0
    for bad in (0.0, -0.1, math.nan):
        with pytest.raises(DomainError):
            log_negativity(bad)


def test_unpaired_spectrum():
    omega = np.block([[np.zeros((2, 2)), np.eye(2)], [-np.eye(2), np.zeros((2, 2))]])
    v = -omega @ np.diag([1.0, 2.0, 3.0, 4.0])
    with pytest.raises(NumericalError):
        symplectic_eigenvalues(v)


def test_phase_space_map_is_canonical():
    M = phase_space_map()
    # [R_i, R_j] = i Omega_ij with [Psi_i, Psi_j] = J_ij
    J = np.block([[np.zeros((2, 2)), np.eye(2)], [-np.eye(2), np.zeros((2, 2))]])
    omega = np.block([[np.zeros((2, 2)), np.eye(2)], [-np.eye(2), np.zeros((2, 2))]])
    assert np.allclose(M @ J @ M.T, 1j * omega)


def test_covariance_matches_fock_ground_state(params):
    """Ground state of the k = 0 Hamiltonian in a truncated Fock space."""
    block = bdg_block(params.with_separation(0.5), Phase.IP_AFM)
    # squeezing is strong here (<n> ~ 2.5); the truncation error is ~1e-10 at n = 180
    n = 180
    a, b = two_mode_ops(n)
    ad, bd = a.T.tocsr(), b.T.tocsr()
    e, m1, m2, xi = (x / block.e for x in block.as_tuple())
    H = (
        e * (ad @ a + bd @ b)
        + m1 * (ad @ b + bd @ a)
        + m2 * (a @ b + ad @ bd)
        + xi * (a @ a + ad @ ad + b @ b + bd @ bd)
    )
    _, vec = splinalg.eigsh(H, k=1, which="SA", tol=1e-13)
    g = vec[:, 0]
    s2 = math.sqrt(2)
    R = [(a + ad) / s2, (b + bd) / s2, -1j * (a - ad) / s2, -1j * (b - bd) / s2]
    V = np.empty((4, 4))
    for i in range(4):
        for j in range(4):
            anti = R[i] @ R[j] + R[j] @ R[i]
            V[i, j] = 0.5 * np.real(np.vdot(g, anti @ g))
    cov = covariance_from_bogoliubov(analytic_bogoliubov(block))
    assert np.abs(V - cov.v).max() < 1e-8


def test_physical_point_routes(params):
    d = analytic_bogoliubov(bdg_block(params.with_separation(0.5), Phase.IP_AFM))
    ea = eta_minus_analytic(extract(d))
    en = eta_minus_numeric(covariance_from_bogoliubov(d))
    assert abs(ea - en) < 1e-12
    assert log_negativity(ea) > 1.0


def test_covariance_dataclass():
    cov = CovarianceMatrix(0.5 * np.eye(4))
    assert cov.uncertainty_margin() == pytest.approx(0.0, abs=1e-15)
