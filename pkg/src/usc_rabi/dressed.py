"""Dressed basis of the coupled system and the detection/jump operators built on it.

In the ultrastrong-coupling regime the bare photon operators stop being the
right detection observables: the bare ground state contains virtual photons
(``<0|a^dag a|0> != 0``) that no photon counter ever sees.  The fix is to
expand the field quadrature ``X = a + a^dag`` in the energy eigenbasis and
keep only the lowering part,

    X+ = sum_{j, k > j} <j|X|k> |j><k|,        X- = (X+)^dag,

which annihilates the true ground state by construction.  The emitted
photon flux is then ``kappa <X- X+>`` and the same construction applied to
``sigma_x`` gives the qubit emission operators ``C+-``.

Dissipation at zero temperature acts through downward jumps ``|j><k|``
between eigenstates, with rates set by the squared dressed matrix elements
of the bare system operators, plus a diagonal pure-dephasing operator
weighted by ``<j|sigma_z|j>``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linops import (
    EigenDecomposition,
    Operator,
    SpaceLayout,
    annihilation,
    embed,
    hermitian_eig,
    pauli,
)

__all__ = [
    "DressedBasis",
    "Jump",
    "JumpSet",
    "dressed_basis",
    "plus_operator",
    "plus_matrix",
    "transition_rate_matrix",
    "jump_set",
]

# Jump rates below this fraction of the largest rate are dropped; they are
# unobservable and only bloat the dissipator sum.
RATE_FLOOR = 1e-14


@dataclass(frozen=True)
class DressedBasis:
    """Eigenbasis of an undriven Hamiltonian plus derived detection operators.

    ``x_plus`` and ``c_plus`` are the positive-frequency (lowering) parts of
    the field quadrature and of sigma_x, stored in the bare-basis matrix
    representation.  Their dressed-basis representations are strictly upper
    triangular.
    """

    layout: SpaceLayout
    eig: EigenDecomposition
    x_bare: np.ndarray
    sigma_x_bare: np.ndarray
    sigma_z_bare: np.ndarray
    x_plus: np.ndarray
    c_plus: np.ndarray

    @property
    def dim(self) -> int:
        return self.eig.dim

    @property
    def ground_state(self) -> np.ndarray:
        return self.eig.vectors[:, 0]

    def to_dressed(self, bare_matrix: np.ndarray) -> np.ndarray:
        """Matrix elements <j|M|k> of a bare-basis matrix."""
        v = self.eig.vectors
        return v.conj().T @ bare_matrix @ v

    def to_bare(self, dressed_matrix: np.ndarray) -> np.ndarray:
        v = self.eig.vectors
        return v @ dressed_matrix @ v.conj().T

    @property
    def x_plus_dressed(self) -> np.ndarray:
        """Strictly upper-triangular X_jk = <j|X|k>, k > j."""
        return np.triu(self.to_dressed(self.x_bare), 1)

    @property
    def c_plus_dressed(self) -> np.ndarray:
        return np.triu(self.to_dressed(self.sigma_x_bare), 1)

    @property
    def sigma_z_diagonal(self) -> np.ndarray:
        """<j|sigma_z|j> for every dressed level."""
        v = self.eig.vectors
        return np.real(np.einsum("ij,ik,kj->j", v.conj(), self.sigma_z_bare, v))


def plus_matrix(eig: EigenDecomposition, bare_matrix: np.ndarray) -> np.ndarray:
    """Positive-frequency part of a Hermitian bare operator, bare representation."""
    v = eig.vectors
    upper = np.triu(v.conj().T @ bare_matrix @ v, 1)
    return v @ upper @ v.conj().T


def plus_operator(basis: DressedBasis, bare: Operator) -> Operator:
    """Positive-frequency part sum_{j, k>j} <j|bare|k> |j><k| of a Hermitian operator."""
    if not bare.is_hermitian():
        raise ValueError("positive-frequency decomposition expects a Hermitian operator")
    return Operator(basis.layout, plus_matrix(basis.eig, bare.data))


def dressed_basis(h: Operator, qubit_slot: int = 0) -> DressedBasis:
    """Diagonalize an undriven Hamiltonian on a qubits-then-Fock layout.

    ``qubit_slot`` selects which qubit the emission operators ``c_plus`` /
    ``sigma_z`` refer to (only relevant for multi-qubit layouts).
    """
    layout = h.layout
    fock_slot = len(layout.factors) - 1
    eig = hermitian_eig(h)
    a = embed(annihilation(layout.factors[-1] - 1), fock_slot, layout).data
    x = a + a.conj().T
    sx = embed(pauli("x"), qubit_slot, layout).data
    sz = embed(pauli("z"), qubit_slot, layout).data
    return DressedBasis(
        layout=layout,
        eig=eig,
        x_bare=x,
        sigma_x_bare=sx,
        sigma_z_bare=sz,
        x_plus=plus_matrix(eig, x),
        c_plus=plus_matrix(eig, sx),
    )


@dataclass(frozen=True)
class Jump:
    """Downward transition |j><k| (k > j) with its total rate."""

    j: int
    k: int
    rate: float
    channel: str  # "cavity" or "qubit"


@dataclass(frozen=True)
class JumpSet:
    """Dissipation channels of the master equation in the dressed basis.

    ``jumps`` lists the downward transitions; ``dephasing_diag`` holds the
    diagonal dephasing amplitudes Phi_j = sqrt(gamma_phi/2) <j|sigma_z|j>.
    """

    dim: int
    jumps: tuple[Jump, ...]
    dephasing_diag: np.ndarray
    kappa: float
    gamma: float
    gamma_phi: float

    def __post_init__(self):
        deph = np.array(self.dephasing_diag, dtype=float)
        deph.setflags(write=False)
        object.__setattr__(self, "dephasing_diag", deph)

    def rate_matrix(self) -> np.ndarray:
        """Gamma[j, k]: total rate of the |j><k| jump, all channels combined."""
        gamma = np.zeros((self.dim, self.dim))
        for jump in self.jumps:
            gamma[jump.j, jump.k] += jump.rate
        return gamma

    def total_decay(self) -> np.ndarray:
        """Per-level total outgoing rate D_k = sum_j Gamma[j, k]."""
        return self.rate_matrix().sum(axis=0)

    def dephasing_matrix(self) -> np.ndarray:
        """Diagonal dephasing operator in the dressed basis."""
        return np.diag(self.dephasing_diag.astype(np.complex128))


def transition_rate_matrix(eig: EigenDecomposition, bare_matrix: np.ndarray) -> np.ndarray:
    """|<j|M|k>|^2 for k > j, zero elsewhere (strictly upper triangular)."""
    v = eig.vectors
    elements = v.conj().T @ bare_matrix @ v
    return np.triu(np.abs(elements) ** 2, 1)


def jump_set(basis: DressedBasis, kappa: float, gamma: float,
             gamma_phi: float = 0.0, *, spectral_density=None) -> JumpSet:
    """Build the dissipation channels for spectrally flat reservoirs at T = 0.

    Rates: ``kappa |<j|X|k>|^2`` for the cavity channel and
    ``gamma |<j|sigma_x|k>|^2`` for the qubit channel, one jump per ordered
    pair k > j.  Rates below 1e-14 of the largest rate are dropped.

    ``spectral_density`` is a declared hook for frequency-dependent decay
    rates; it is not implemented.
    """
    if min(kappa, gamma, gamma_phi) < 0:
        raise ValueError("decay and dephasing rates must be nonnegative")
    if spectral_density is not None:
        raise NotImplementedError("frequency-dependent rates are not implemented")
    channels = (
        ("cavity", kappa * transition_rate_matrix(basis.eig, basis.x_bare)),
        ("qubit", gamma * transition_rate_matrix(basis.eig, basis.sigma_x_bare)),
    )
    floor = RATE_FLOOR * max(max(np.max(m) for _, m in channels), 0.0)
    jumps = []
    for name, rates in channels:
        js, ks = np.nonzero(rates > floor)
        jumps.extend(
            Jump(int(j), int(k), float(rates[j, k]), name) for j, k in zip(js, ks)
        )
    dephasing = np.sqrt(gamma_phi / 2.0) * basis.sigma_z_diagonal
    return JumpSet(
        dim=basis.dim,
        jumps=tuple(jumps),
        dephasing_diag=dephasing,
        kappa=kappa,
        gamma=gamma,
        gamma_phi=gamma_phi,
    )
