"""k = 0 magnon squeezing and entanglement in two dipole-coupled ferromagnets."""

from .bogoliubov import BogoliubovDecomposition, analytic_bogoliubov, eigenenergies, numeric_paraunitary
from .classical import (
    ClassicalConfig,
    boundary_residual,
    classical_energy,
    determine_phase,
    grid_phase,
    phase_boundary_distance,
)
from .core import LatticeSpec, ModelParams, Phase, validate
from .dipole import DipoleSums, SumKind, dipole_sums, inter_sum, intra_sum
from .entanglement import (
    CovarianceMatrix,
    covariance_from_bogoliubov,
    eta_minus_analytic,
    eta_minus_numeric,
    log_negativity,
)
from .errors import *  # noqa: F401,F403
from .spinwave import BdgBlock, bdg_block, brute_force_block, isolated_block
from .squeezing import SqueezingParams, extract, reconstruct

__version__ = "0.1.0"
