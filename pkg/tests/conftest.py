import math

import numpy as np
import pytest

from usc_rabi.dressed import dressed_basis, jump_set
from usc_rabi.effective import flux_swept_hamiltonian, minimum_splitting
from usc_rabi.linops import SpaceLayout
from usc_rabi.model import rabi_hamiltonian

# Fig-3-style two-photon configuration (half-wave line at 4 GHz).
TWO_PHOTON = {
    "delta_ghz": 2.25,
    "omega1_ghz": 4.0,
    "ip2_na": 630.0,
    "g1": 0.15,
    "kappa": 1.8e-4,
    "gamma": 1.8e-4,
}
# Fig-5-style three-photon configuration (quarter-wave line).
THREE_PHOTON = {
    "delta_ghz": 4.25,
    "omega1_ghz": 4.0,
    "ip2_na": 630.0,
    "g1": 0.25,
    "kappa": 1.8e-4,
    "gamma": 1.8e-4,
}


@pytest.fixture(scope="session")
def two_photon_resonance():
    """Solved two-photon working point: (omega_q, theta, splitting, pair)."""
    delta = TWO_PHOTON["delta_ghz"] / TWO_PHOTON["omega1_ghz"]
    layout = SpaceLayout((2, 17))
    targets = (layout.basis_index(1, 0), layout.basis_index(0, 2))
    res = minimum_splitting(
        flux_swept_hamiltonian(delta, TWO_PHOTON["g1"], 16), (1.8, 2.18), targets
    )
    return {
        "omega_q": res.omega_q_star,
        "theta": math.acos(delta / res.omega_q_star),
        "splitting": res.gap,
        "pair": res.pair,
    }


@pytest.fixture(scope="session")
def two_photon_system(two_photon_resonance):
    """Hamiltonian, dressed basis and jump set at the two-photon resonance."""
    point = two_photon_resonance
    h = rabi_hamiltonian(point["omega_q"], TWO_PHOTON["g1"], point["theta"], 16)
    basis = dressed_basis(h)
    jumps = jump_set(basis, TWO_PHOTON["kappa"], TWO_PHOTON["gamma"])
    return {"h": h, "basis": basis, "jumps": jumps, **point}


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (m + m.conj().T)


def random_density_matrix(dim: int, rng: np.random.Generator) -> np.ndarray:
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = m @ m.conj().T
    return rho / np.trace(rho).real
