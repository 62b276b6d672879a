import math
from dataclasses import replace

import numpy as np
import pytest

from dipmag.classical import (
    ClassicalConfig,
    boundary_residual,
    classical_energy,
    classical_energy_grid,
    determine_phase,
    grid_phase,
    phase_boundary_distance,
)
from dipmag.core import LatticeSpec, ModelParams, Phase
from dipmag.errors import BoundaryError, NoBoundaryError

OOP = ClassicalConfig(0.0, 0.0)
IP = ClassicalConfig(math.pi / 2, -math.pi / 2)


def test_config_wraps_angles():
    c = ClassicalConfig(3 * math.pi, -math.pi)
    assert c.theta_a == pytest.approx(math.pi)
    assert c.theta_b == pytest.approx(math.pi)


def test_anisotropy_only_limit():
    p = ModelParams(d=0.0, separation=0.7)
    # energy is per pair of sites (one in each layer)
    diff = (classical_energy(OOP, p) - classical_energy(IP, p)) / 2
    assert diff == pytest.approx(-(p.kz - p.kx) * p.spin ** 2, rel=1e-12)


@pytest.mark.parametrize("l, lower", [(0.2, OOP), (1.0, IP)])
def test_small_and_large_separation(params, l, lower):
    q = params.with_separation(l)
    other = IP if lower is OOP else OOP
    assert classical_energy(lower, q) < classical_energy(other, q)


@pytest.mark.parametrize("l, phase", [(0.2, Phase.OOP_FM), (1.0, Phase.IP_AFM)])
def test_determine_phase(params, l, phase):
    assert determine_phase(params.with_separation(l)) is phase


@pytest.mark.parametrize("l", [0.05, 0.33, 2.0, 9.0])
def test_no_dipoles_is_always_oop(l):
    assert determine_phase(ModelParams(d=0.0, separation=l)) is Phase.OOP_FM


@pytest.mark.parametrize("l", [0.1, 0.3, 0.5, 2.0])
@pytest.mark.parametrize("lattice", [LatticeSpec.infinite(), LatticeSpec.finite(32)], ids=str)
def test_residual_is_energy_difference(l, lattice):
    p = ModelParams(separation=l, lattice=lattice)
    diff = classical_energy(IP, p) - classical_energy(OOP, p)
    assert boundary_residual(p) == pytest.approx(diff / (2 * p.spin ** 2), rel=1e-10, abs=1e-18)


def test_energy_symmetric_under_global_flip(params):
    for ta, tb in [(0.3, -1.2), (2.0, 0.4)]:
        e1 = classical_energy(ClassicalConfig(ta, tb), params)
        e2 = classical_energy(ClassicalConfig(-ta, -tb), params)
        assert e1 == pytest.approx(e2, rel=1e-14)


def test_critical_separation(params):
    ls = phase_boundary_distance(params)
    assert ls == pytest.approx(0.33, abs=0.02)
    assert abs(boundary_residual(params.with_separation(ls))) < 1e-15


def test_boundary_error_on_boundary(params):
    ls = phase_boundary_distance(params)
    with pytest.raises(BoundaryError):
        determine_phase(params.with_separation(ls))


@pytest.mark.parametrize("d", [0.0, 1e-9])
def test_no_boundary_for_weak_dipoles(d):
    with pytest.raises(NoBoundaryError):
        phase_boundary_distance(ModelParams(d=d))


def test_grid_shape_and_minimum(params):
    ta, tb, E = classical_energy_grid(params.with_separation(0.2))
    assert E.shape == (181, 361)
    assert ta[0] == 0 and tb[0] == -math.pi
    assert grid_phase(params.with_separation(0.2)) is Phase.OOP_FM


@pytest.mark.parametrize("ratio", [0.1, 0.25, 0.5, 1.0, 2.0])
def test_boundary_matches_grid_oracle(params, ratio):
    p = replace(params, d=ratio * params.kz)
    ls = phase_boundary_distance(p)
    assert grid_phase(p.with_separation(ls - 0.005)) is Phase.OOP_FM
    assert grid_phase(p.with_separation(ls + 0.005)) is Phase.IP_AFM


def test_boundary_monotonic_in_dipole_strength(params):
    ratios = np.linspace(0.1, 2.0, 12)
    ls = [phase_boundary_distance(replace(params, d=r * params.kz)) for r in ratios]
    assert np.all(np.diff(ls) < 0)


@pytest.mark.parametrize("n", [16, 64, 100, 500])
def test_finite_boundary_above_infinite(params, n):
    inf = phase_boundary_distance(params)
    fin = phase_boundary_distance(params.with_lattice(LatticeSpec.finite(n)))
    assert inf < fin < inf + 0.02
