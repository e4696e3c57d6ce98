"""Multiphoton vacuum Rabi oscillations in ultrastrong-coupling cavity QED.

A flux qubit coupled ultrastrongly to one resonator mode can exchange two
or three photons with the field in a single coherent Rabi cycle.  This
package reproduces that physics end to end: dressed-level spectra and their
avoided crossings, the corrected photodetection observables built from the
positive-frequency dressed operators, driven-dissipative dynamics with
zero-delay photon correlations, the effective two-photon model obtained by
adiabatic elimination, and a GHZ-state generation protocol that rides the
two-photon oscillation.

Everything computes in natural units (fundamental mode frequency = 1,
hbar = 1); physical GHz parameters convert at the boundary.  See the
`demos/` scripts for narrative walkthroughs and `usc-rabi run` for the
config-driven scenario runner.
"""

from .dressed import DressedBasis, Jump, JumpSet, dressed_basis, jump_set, plus_operator
from .dynamics import (
    EvolutionProblem,
    IntegrationError,
    StepControl,
    TimeSeries,
    evolve,
    find_oscillation_peaks,
    lindblad_rhs,
    observable_channels,
    rabi_period_estimate,
)
from .effective import (
    ComparisonRow,
    EffectiveModel,
    ReducedModel,
    SplittingResult,
    effective_hamiltonian,
    fixed_mixing_hamiltonian,
    flux_swept_hamiltonian,
    minimum_splitting,
    reduced_hamiltonian,
    rotating_frame,
    splitting_comparison,
)
from .linops import (
    EigenDecomposition,
    Operator,
    SpaceLayout,
    annihilation,
    basis_vector,
    embed,
    expect,
    hermitian_eig,
    identity,
    kron,
    partial_trace,
    pauli,
)
from .model import (
    CouplingSpec,
    PulseSpec,
    QubitParams,
    ResonatorSpec,
    build_rabi_hamiltonian,
    drive_hamiltonian,
    excitation_number_operator,
    flux_for_frequency,
    mixing_angle,
    mode_frequency,
    parity_operator,
    qubit_frequency,
    rabi_hamiltonian,
)
from .protocols import (
    GhzQubit,
    MultiQubitConfig,
    ProtocolResult,
    Schedule,
    Segment,
    build_ghz_model,
    ghz_schedule,
    ghz_target,
    run_protocol,
)
from .sweeps import SpectrumSweep, jc_polariton_doublet, sweep_spectrum

__version__ = "0.1.0"
