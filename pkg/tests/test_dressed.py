import math

import numpy as np
import pytest

from usc_rabi.dressed import dressed_basis, jump_set, plus_operator
from usc_rabi.linops import annihilation, embed, pauli
from usc_rabi.model import parity_operator, rabi_hamiltonian


@pytest.fixture(scope="module")
def uncoupled():
    h = rabi_hamiltonian(omega_q=0.73, g1=0.0, theta=0.0, n_max=5)
    return h, dressed_basis(h)


class TestUncoupledLimit:
    def test_x_plus_reduces_to_annihilation(self, uncoupled):
        h, basis = uncoupled
        a = embed(annihilation(5), 1, h.layout).data
        assert np.max(np.abs(basis.x_plus - a)) < 1e-12

    def test_c_plus_reduces_to_lowering(self, uncoupled):
        h, basis = uncoupled
        sm = embed(pauli("minus"), 0, h.layout).data
        assert np.max(np.abs(basis.c_plus - sm)) < 1e-12

    def test_fock_neighbor_rates(self, uncoupled):
        # Only |n> -> |n-1> cavity jumps, each at kappa * n.
        h, basis = uncoupled
        jumps = jump_set(basis, kappa=0.123, gamma=0.0)
        cavity = [j for j in jumps.jumps if j.channel == "cavity"]
        layout = h.layout
        values = basis.eig.values
        for jump in cavity:
            # Identify the bare states behind the dressed indices.
            ket_k = np.argmax(np.abs(basis.eig.vectors[:, jump.k]))
            ket_j = np.argmax(np.abs(basis.eig.vectors[:, jump.j]))
            qk, nk = divmod(int(ket_k), layout.factors[-1])
            qj, nj = divmod(int(ket_j), layout.factors[-1])
            assert qk == qj and nj == nk - 1
            assert jump.rate == pytest.approx(0.123 * nk, rel=1e-12)
            assert values[jump.k] > values[jump.j]


class TestDressedBasis:
    def test_x_plus_annihilates_ground(self, two_photon_system):
        basis = two_photon_system["basis"]
        assert np.linalg.norm(basis.x_plus @ basis.ground_state) <= 1e-12

    def test_c_plus_annihilates_ground(self, two_photon_system):
        basis = two_photon_system["basis"]
        assert np.linalg.norm(basis.c_plus @ basis.ground_state) <= 1e-12

    def test_dressed_representation_strictly_upper(self, two_photon_system):
        basis = two_photon_system["basis"]
        xpd = basis.x_plus_dressed
        assert np.max(np.abs(np.tril(xpd))) <= 1e-14

    def test_decomposition_completeness(self, two_photon_system):
        # X+ + X- + diagonal part rebuilds the bare quadrature.
        basis = two_photon_system["basis"]
        xd = basis.to_dressed(basis.x_bare)
        diag = basis.to_bare(np.diag(np.diag(xd)))
        rebuilt = basis.x_plus + basis.x_plus.conj().T + diag
        assert np.max(np.abs(rebuilt - basis.x_bare)) <= 1e-12

    def test_ascending_level_order(self, two_photon_system):
        values = two_photon_system["basis"].eig.values
        assert np.all(np.diff(values) >= 0)

    def test_plus_operator_of_sigma_x(self, two_photon_system):
        basis = two_photon_system["basis"]
        h = two_photon_system["h"]
        sx = embed(pauli("x"), 0, h.layout)
        got = plus_operator(basis, sx)
        assert np.max(np.abs(got.data - basis.c_plus)) < 1e-14

    def test_plus_operator_rejects_non_hermitian(self, two_photon_system):
        basis = two_photon_system["basis"]
        with pytest.raises(ValueError):
            plus_operator(
                basis,
                embed(annihilation(16), 1, two_photon_system["h"].layout),
            )


class TestJumpSet:
    def test_rates_nonnegative_and_downward(self, two_photon_system):
        jumps = two_photon_system["jumps"]
        for jump in jumps.jumps:
            assert jump.rate >= 0
            assert jump.k > jump.j

    def test_zero_kappa_means_no_cavity_jumps(self, two_photon_system):
        basis = two_photon_system["basis"]
        jumps = jump_set(basis, kappa=0.0, gamma=0.1)
        assert all(j.channel != "cavity" for j in jumps.jumps)

    def test_no_dephasing_without_rate(self, two_photon_system):
        jumps = two_photon_system["jumps"]
        assert not np.any(jumps.dephasing_diag)

    def test_dephasing_amplitudes(self, two_photon_system):
        basis = two_photon_system["basis"]
        gamma_phi = 0.054
        jumps = jump_set(basis, 0.0, 0.0, gamma_phi)
        want = math.sqrt(gamma_phi / 2.0) * basis.sigma_z_diagonal
        assert np.allclose(jumps.dephasing_diag, want)

    def test_split_pair_decays_through_qubit_channel(self, two_photon_system):
        # The hybridized |e,0>/|g,2> pair must relax to lower dressed states
        # via the qubit reservoir.
        jumps = two_photon_system["jumps"]
        lo, hi = two_photon_system["pair"]
        qubit_rates = [
            j.rate for j in jumps.jumps
            if j.channel == "qubit" and j.k in (lo, hi) and j.j < lo
        ]
        assert qubit_rates and max(qubit_rates) > 0

    def test_parity_selection_rule_at_theta_zero(self):
        h = rabi_hamiltonian(2.0, 0.2, 0.0, 10)
        basis = dressed_basis(h)
        jumps = jump_set(basis, kappa=1.0, gamma=1.0)
        parity = parity_operator(h.layout).data
        v = basis.eig.vectors
        signs = np.real(np.einsum("ij,ik,kj->j", v.conj(), parity, v))
        # X and sigma_x flip parity, so jumps connect opposite-parity states.
        for jump in jumps.jumps:
            assert signs[jump.j] * signs[jump.k] < 0

    def test_rate_floor_drops_negligible_jumps(self, two_photon_system):
        jumps = two_photon_system["jumps"]
        max_rate = max(j.rate for j in jumps.jumps)
        assert all(j.rate > 1e-14 * max_rate for j in jumps.jumps)

    def test_negative_rates_rejected(self, two_photon_system):
        with pytest.raises(ValueError):
            jump_set(two_photon_system["basis"], kappa=-0.1, gamma=0.0)

    def test_spectral_density_hook_declared(self, two_photon_system):
        with pytest.raises(NotImplementedError):
            jump_set(two_photon_system["basis"], 0.1, 0.1,
                     spectral_density=lambda w: 1.0)

    def test_rate_matrix_matches_jumps(self, two_photon_system):
        jumps = two_photon_system["jumps"]
        gamma = jumps.rate_matrix()
        assert np.max(np.abs(np.tril(gamma))) == 0
        total = sum(j.rate for j in jumps.jumps)
        assert gamma.sum() == pytest.approx(total)
