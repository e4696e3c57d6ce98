"""Physical parameters and Hamiltonians for a flux qubit coupled to one resonator mode.

Unit conventions
----------------
Inputs at the boundary are ordinary frequencies in GHz (the experimentally
quoted ``omega/2pi`` numbers).  Internally everything runs in natural units
with hbar = 1 and the fundamental resonator mode at angular frequency 1, so
a GHz quantity converts by dividing by ``omega1_ghz``.  One natural time
unit is ``1/omega_1``; a resonator period is ``2*pi``.

Only the fundamental mode enters the dynamics.  Higher modes exist solely
through :func:`mode_frequency` for configuration sanity checks: a qubit at
the voltage node of a mode does not couple to it, and the remaining modes
are far detuned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linops import Operator, SpaceLayout, annihilation, embed, pauli

__all__ = [
    "QubitParams",
    "ResonatorSpec",
    "CouplingSpec",
    "PulseSpec",
    "qubit_frequency",
    "mixing_angle",
    "flux_for_frequency",
    "mode_frequency",
    "rabi_hamiltonian",
    "build_rabi_hamiltonian",
    "excitation_number_operator",
    "parity_operator",
    "drive_envelope",
    "drive_hamiltonian",
]

# Flux-bias energy scale: (2 I_p) * dPhi * Phi_0 / h in GHz, for 2I_p in nA
# and dPhi a dimensionless fraction of the flux quantum.  Phi_0/h = 1/(2e).
BIAS_GHZ_PER_NA = 1e-18 / (2.0 * 1.602176634e-19)


@dataclass(frozen=True)
class QubitParams:
    """Flux qubit: gap and persistent-current bias.

    ``delta_ghz`` is the gap Delta/h in GHz, ``ip2_na`` the persistent-current
    parameter 2*I_p in nA, and ``flux_offset`` the external flux offset from
    the half-quantum sweet spot, in units of the flux quantum.
    """

    delta_ghz: float
    ip2_na: float
    flux_offset: float = 0.0

    def __post_init__(self):
        if self.delta_ghz <= 0:
            raise ValueError("qubit gap must be positive")
        if self.ip2_na < 0:
            raise ValueError("persistent current must be nonnegative")

    def with_flux(self, flux_offset: float) -> "QubitParams":
        return QubitParams(self.delta_ghz, self.ip2_na, flux_offset)


@dataclass(frozen=True)
class ResonatorSpec:
    """Transmission-line resonator: geometry, fundamental frequency, Fock cutoff."""

    geometry: str  # "half_wave" or "quarter_wave"
    omega1_ghz: float
    n_max: int = 16

    def __post_init__(self):
        if self.geometry not in ("half_wave", "quarter_wave"):
            raise ValueError(f"unknown geometry {self.geometry!r}")
        if self.omega1_ghz <= 0:
            raise ValueError("fundamental frequency must be positive")
        if self.n_max < 2:
            raise ValueError("n_max must be >= 2 to hold at least two photons")


@dataclass(frozen=True)
class CouplingSpec:
    """Qubit coupling to the fundamental mode; ``rwa`` drops counter-rotating terms."""

    g1_ghz: float
    rwa: bool = False

    def __post_init__(self):
        if self.g1_ghz < 0:
            raise ValueError("coupling rate must be nonnegative")

    @classmethod
    def from_ratio(cls, g1_over_omega1: float, resonator: ResonatorSpec,
                   rwa: bool = False) -> "CouplingSpec":
        return cls(g1_over_omega1 * resonator.omega1_ghz, rwa)


@dataclass(frozen=True)
class PulseSpec:
    """Gaussian drive pulse, in natural units.

    The drive term is ``E(t) cos(omega t) sigma_x`` with the normalized
    envelope ``E(t) = amplitude * exp(-(t-t0)^2/(2 tau^2)) / (tau sqrt(2 pi))``,
    so ``amplitude`` is the dimensionless pulse area: integrating E over the
    whole pulse gives exactly ``amplitude``.
    """

    amplitude: float
    center_freq: float
    t0: float
    tau: float

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("pulse width tau must be positive")
        if self.amplitude < 0:
            raise ValueError("pulse area must be nonnegative")


def qubit_frequency(q: QubitParams) -> float:
    """Qubit transition frequency omega_q/2pi in GHz.

    omega_q = sqrt((Delta/hbar)^2 + (2 I_p dPhi Phi_0/hbar)^2); monotonically
    increasing in |flux_offset| and equal to the gap at zero offset.
    """
    eps_ghz = q.ip2_na * q.flux_offset * BIAS_GHZ_PER_NA
    return math.hypot(q.delta_ghz, eps_ghz)


def mixing_angle(q: QubitParams) -> float:
    """Flux-dependent mixing angle theta in [0, pi/2), cos(theta) = Delta/omega_q."""
    return math.acos(q.delta_ghz / qubit_frequency(q))


def flux_for_frequency(q: QubitParams, freq_ghz: float) -> float:
    """Flux offset (>= 0) that tunes the qubit to ``freq_ghz``; inverse of
    :func:`qubit_frequency`."""
    if freq_ghz < q.delta_ghz:
        raise ValueError(
            f"target {freq_ghz} GHz is below the qubit gap {q.delta_ghz} GHz"
        )
    if q.ip2_na == 0:
        raise ValueError("qubit with zero persistent current is not tunable")
    eps_ghz = math.sqrt(freq_ghz**2 - q.delta_ghz**2)
    return eps_ghz / (q.ip2_na * BIAS_GHZ_PER_NA)


def mode_frequency(r: ResonatorSpec, m: int) -> float:
    """Resonance frequency of mode ``m`` in GHz.

    Half-wave line: m * omega_1.  Quarter-wave line: (2m - 1) * omega_1.
    """
    if m < 1:
        raise ValueError(f"mode index must be >= 1, got {m}")
    if r.geometry == "half_wave":
        return m * r.omega1_ghz
    return (2 * m - 1) * r.omega1_ghz


def rabi_hamiltonian(omega_q: float, g1: float, theta: float, n_max: int,
                     *, omega_r: float = 1.0, rwa: bool = False) -> Operator:
    """Extended Rabi Hamiltonian in natural units on the layout [2, n_max+1].

    H = (omega_q/2) sigma_z + omega_r a^dag a
        + g1 (a + a^dag)(cos(theta) sigma_x + sin(theta) sigma_z)

    With ``rwa=True`` the interaction is replaced by the Jaynes-Cummings
    form ``g1 cos(theta) (a sigma_+ + a^dag sigma_-)`` and the sigma_z
    coupling is dropped, which restores conservation of the excitation
    number.
    """
    layout = SpaceLayout((2, n_max + 1))
    a = embed(annihilation(n_max), 1, layout).data
    ad = a.conj().T
    sz = embed(pauli("z"), 0, layout).data
    h = 0.5 * omega_q * sz + omega_r * (ad @ a)
    if rwa:
        sp = embed(pauli("plus"), 0, layout).data
        sm = embed(pauli("minus"), 0, layout).data
        h = h + g1 * math.cos(theta) * (a @ sp + ad @ sm)
    else:
        sx = embed(pauli("x"), 0, layout).data
        h = h + g1 * ((a + ad) @ (math.cos(theta) * sx + math.sin(theta) * sz))
    return Operator(layout, h)


def build_rabi_hamiltonian(q: QubitParams, r: ResonatorSpec, c: CouplingSpec) -> Operator:
    """Rabi Hamiltonian for physical (GHz) parameters, in natural units."""
    return rabi_hamiltonian(
        qubit_frequency(q) / r.omega1_ghz,
        c.g1_ghz / r.omega1_ghz,
        mixing_angle(q),
        r.n_max,
        rwa=c.rwa,
    )


def _check_qubits_fock_layout(layout: SpaceLayout) -> None:
    if any(f != 2 for f in layout.factors[:-1]) or layout.factors[-1] < 3:
        raise ValueError(
            f"expected qubit factors followed by one Fock factor, got {layout.factors}"
        )


def excitation_number_operator(layout: SpaceLayout) -> Operator:
    """Total excitation number a^dag a + sum_q sigma_+ sigma_- on a
    qubits-then-Fock layout."""
    _check_qubits_fock_layout(layout)
    fock_slot = len(layout.factors) - 1
    a = embed(annihilation(layout.factors[-1] - 1), fock_slot, layout).data
    n = a.conj().T @ a
    excited = (pauli("plus") @ pauli("minus")).data
    for slot in range(fock_slot):
        n = n + embed(Operator(SpaceLayout((2,)), excited), slot, layout).data
    return Operator(layout, n)


def parity_operator(layout: SpaceLayout) -> Operator:
    """Excitation parity exp(i pi N_exc): diagonal +/-1 grading of the bare basis."""
    n_op = excitation_number_operator(layout)
    signs = np.where(np.rint(np.real(np.diag(n_op.data))) % 2 == 0, 1.0, -1.0)
    return Operator(layout, np.diag(signs.astype(np.complex128)))


def drive_envelope(p: PulseSpec, t) -> np.ndarray | float:
    """Normalized Gaussian envelope E(t); integrates to the pulse area."""
    norm = p.amplitude / (p.tau * math.sqrt(2.0 * math.pi))
    return norm * np.exp(-((t - p.t0) ** 2) / (2.0 * p.tau**2))


def drive_hamiltonian(p: PulseSpec, t: float, layout: SpaceLayout,
                      slot: int = 0) -> Operator:
    """Drive term E(t) cos(omega t) sigma_x acting on the qubit at ``slot``."""
    amp = float(drive_envelope(p, t)) * math.cos(p.center_freq * t)
    return amp * embed(pauli("x"), slot, layout)
