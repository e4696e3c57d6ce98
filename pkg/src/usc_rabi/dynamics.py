"""Driven-dissipative time evolution and the detection observables.

The master equation propagated here is

    drho/dt = -i [H(t), rho]
              + sum_{j, k>j} Gamma_jk D[|j><k|] rho
              + D[sum_j Phi_j |j><j|] rho,

with ``D[O] rho = O rho O^dag - (O^dag O rho + rho O^dag O)/2``, the jumps
and dephasing amplitudes taken from a :class:`~usc_rabi.dressed.JumpSet`,
and ``H(t) = H_0 + E(t) cos(omega t) sigma_x`` when a drive pulse is present.

Integration strategy
--------------------
The state is propagated in the dressed basis, where ``H_0`` is diagonal and
the whole undriven generator acts elementwise on the density matrix plus a
diagonal population feed; only the drive term needs matrix products.  The
integrator is a fixed-step classical 4th-order Runge-Kutta with

    dt <= 2 pi / (steps_per_period * omega_span),

``omega_span`` being the largest retained dressed-frequency difference (or
the drive carrier, if faster).  Every ``richardson_interval`` steps a
step-doubling check estimates the local error and aborts the run if it
exceeds ``richardson_tol``.  Fixed stepping keeps trajectories bit-for-bit
reproducible; the systems are small enough that adaptivity buys nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dressed import DressedBasis, JumpSet, dressed_basis
from .linops import Operator, embed, pauli
from .model import PulseSpec, drive_envelope

__all__ = [
    "StepControl",
    "EvolutionProblem",
    "TimeSeries",
    "IntegrationError",
    "lindblad_rhs",
    "evolve",
    "observable_channels",
    "find_oscillation_peaks",
    "rabi_period_estimate",
]

CHANNEL_NAMES = (
    "photon_number",
    "qubit_excitation",
    "g2",
    "g3",
    "output_flux",
    "trace_error",
    "min_eigenvalue",
    "purity",
)


class IntegrationError(RuntimeError):
    """The integrator could not meet its accuracy contract."""


@dataclass(frozen=True)
class StepControl:
    """Integrator tolerances; defaults are safe for every bundled scenario.

    ``dt_cap`` forces a smaller step than the frequency-span rule would
    pick; convergence checks use it so two truncations share one step size.
    """

    steps_per_period: int = 50
    richardson_interval: int = 100
    richardson_tol: float = 1e-7
    dt_cap: float | None = None


@dataclass(frozen=True)
class EvolutionProblem:
    """Initial-value problem for the master equation.

    ``rho0`` is given in the bare basis.  ``drive_slot`` selects which qubit
    factor the drive's sigma_x acts on.
    """

    h0: Operator
    jumps: JumpSet
    rho0: np.ndarray
    t_grid: np.ndarray
    drive: PulseSpec | None = None
    drive_slot: int = 0
    step_control: StepControl = field(default_factory=StepControl)

    def __post_init__(self):
        rho0 = np.array(self.rho0, dtype=np.complex128)
        if rho0.shape != self.h0.data.shape:
            raise ValueError("rho0 shape does not match the Hamiltonian")
        if np.max(np.abs(rho0 - rho0.conj().T)) > 1e-10:
            raise ValueError("rho0 must be Hermitian")
        if abs(np.trace(rho0).real - 1.0) > 1e-12:
            raise ValueError("rho0 must have unit trace")
        if np.linalg.eigvalsh(rho0).min() < -1e-12:
            raise ValueError("rho0 must be positive semidefinite")
        rho0.setflags(write=False)
        object.__setattr__(self, "rho0", rho0)
        t = np.array(self.t_grid, dtype=float)
        if t.ndim != 1 or t.size < 2 or np.any(np.diff(t) <= 0):
            raise ValueError("t_grid must be strictly increasing with >= 2 points")
        t.setflags(write=False)
        object.__setattr__(self, "t_grid", t)


@dataclass
class TimeSeries:
    """Sampled observables over a time grid, with run metadata."""

    times: np.ndarray
    channels: dict[str, np.ndarray]
    metadata: dict

    def channel(self, name: str) -> np.ndarray:
        return self.channels[name]


def _dissipator(op: np.ndarray, rho: np.ndarray) -> np.ndarray:
    od_o = op.conj().T @ op
    return op @ rho @ op.conj().T - 0.5 * (od_o @ rho + rho @ od_o)


def lindblad_rhs(rho: np.ndarray, t: float, problem: EvolutionProblem,
                 basis: DressedBasis | None = None) -> np.ndarray:
    """Right-hand side of the master equation in the bare basis.

    Reference implementation: builds every jump projector explicitly.  The
    propagator in :func:`evolve` uses an algebraically identical dressed-frame
    form; the two are cross-checked in the test suite.
    """
    if basis is None:
        basis = dressed_basis(problem.h0)
    h = problem.h0.data
    if problem.drive is not None:
        p = problem.drive
        amp = float(drive_envelope(p, t)) * math.cos(p.center_freq * t)
        sx = embed(pauli("x"), problem.drive_slot, problem.h0.layout).data
        h = h + amp * sx
    out = -1j * (h @ rho - rho @ h)
    v = basis.eig.vectors
    for jump in problem.jumps.jumps:
        proj = np.outer(v[:, jump.j], v[:, jump.k].conj())
        out += jump.rate * _dissipator(proj, rho)
    if np.any(problem.jumps.dephasing_diag):
        deph = basis.to_bare(problem.jumps.dephasing_matrix())
        out += _dissipator(deph, rho)
    return out


class _DressedPropagator:
    """Master-equation generator in the dressed frame.

    The undriven part acts elementwise through the precomputed matrix ``a``
    plus a population feed ``gamma @ diag(rho)``; the drive adds a commutator
    with the dressed sigma_x.
    """

    def __init__(self, basis: DressedBasis, jumps: JumpSet,
                 drive: PulseSpec | None, drive_slot: int):
        w = basis.eig.values
        decay = jumps.total_decay()
        phi = jumps.dephasing_diag
        self.a = (
            -1j * (w[:, None] - w[None, :])
            - 0.5 * (decay[:, None] + decay[None, :])
            - 0.5 * (phi[:, None] - phi[None, :]) ** 2
        )
        self.gamma = jumps.rate_matrix()
        self.feeds = bool(np.any(self.gamma))
        self.drive = drive
        if drive is not None:
            sx = embed(pauli("x"), drive_slot, basis.layout).data
            self.c_drive = basis.to_dressed(sx)
            # Outside +-9 tau the Gaussian envelope is < 1e-17 of its peak.
            self.window = (drive.t0 - 9.0 * drive.tau, drive.t0 + 9.0 * drive.tau)
        self.omega_span = float(w[-1] - w[0])
        if drive is not None:
            self.omega_span = max(self.omega_span, abs(drive.center_freq))

    def rhs(self, rho: np.ndarray, t: float) -> np.ndarray:
        out = self.a * rho
        if self.feeds:
            out[np.diag_indices_from(out)] += self.gamma @ np.diagonal(rho)
        if self.drive is not None and self.window[0] <= t <= self.window[1]:
            p = self.drive
            amp = float(drive_envelope(p, t)) * math.cos(p.center_freq * t)
            c = self.c_drive
            out += (-1j * amp) * (c @ rho - rho @ c)
        return out

    def rk4_step(self, rho: np.ndarray, t: float, h: float) -> np.ndarray:
        k1 = self.rhs(rho, t)
        k2 = self.rhs(rho + (0.5 * h) * k1, t + 0.5 * h)
        k3 = self.rhs(rho + (0.5 * h) * k2, t + 0.5 * h)
        k4 = self.rhs(rho + h * k3, t + h)
        return rho + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)


def _observable_matrices(basis: DressedBasis) -> dict[str, np.ndarray]:
    xp = basis.x_plus_dressed
    cp = basis.c_plus_dressed
    xp2 = xp @ xp
    xp3 = xp2 @ xp
    return {
        "photon_number": xp.conj().T @ xp,
        "qubit_excitation": cp.conj().T @ cp,
        "g2": xp2.conj().T @ xp2,
        "g3": xp3.conj().T @ xp3,
    }


def observable_channels(rho: np.ndarray, basis: DressedBasis,
                        kappa: float = 0.0) -> dict[str, float]:
    """Detection observables of a bare-basis state.

    photon_number = <X- X+>, qubit_excitation = <C- C+>,
    g2 = <X- X- X+ X+>, g3 = <X- X- X- X+ X+ X+>,
    output_flux = kappa * photon_number.
    """
    rho_d = basis.to_dressed(np.asarray(rho, dtype=np.complex128))
    mats = _observable_matrices(basis)
    out = {name: float(np.sum(m.T * rho_d).real) for name, m in mats.items()}
    out["output_flux"] = kappa * out["photon_number"]
    return out


def evolve(problem: EvolutionProblem, basis: DressedBasis | None = None,
           metadata: dict | None = None) -> TimeSeries:
    """Propagate the master equation over ``problem.t_grid``.

    Returns a :class:`TimeSeries` with the detection observables plus the
    integrator health channels (trace error, smallest eigenvalue, purity).
    Invariant breaches beyond tolerance are flagged in the metadata; the run
    is still emitted so it can be inspected.
    """
    if basis is None:
        basis = dressed_basis(problem.h0)
    prop = _DressedPropagator(basis, problem.jumps, problem.drive, problem.drive_slot)
    ctrl = problem.step_control
    dt_max = 2.0 * math.pi / (ctrl.steps_per_period * max(prop.omega_span, 1e-12))
    if ctrl.dt_cap is not None:
        dt_max = min(dt_max, ctrl.dt_cap)

    v = basis.eig.vectors
    rho = v.conj().T @ problem.rho0 @ v
    mats = _observable_matrices(basis)
    kappa = problem.jumps.kappa

    t_grid = problem.t_grid
    n_samples = t_grid.size
    channels = {name: np.zeros(n_samples) for name in CHANNEL_NAMES}
    hermiticity_defect = 0.0

    def sample(i: int, rho_d: np.ndarray) -> None:
        nonlocal hermiticity_defect
        for name, m in mats.items():
            channels[name][i] = float(np.sum(m.T * rho_d).real)
        channels["output_flux"][i] = kappa * channels["photon_number"][i]
        channels["trace_error"][i] = abs(float(np.trace(rho_d).real) - 1.0)
        defect = rho_d - rho_d.conj().T
        hermiticity_defect = max(hermiticity_defect,
                                 float(np.max(np.abs(defect))))
        herm = rho_d - 0.5 * defect
        channels["min_eigenvalue"][i] = float(np.linalg.eigvalsh(herm)[0])
        channels["purity"][i] = float(np.vdot(rho_d, rho_d).real)

    sample(0, rho)
    steps_done = 0
    max_local_error = 0.0
    for i in range(1, n_samples):
        span = t_grid[i] - t_grid[i - 1]
        n_steps = max(1, int(math.ceil(span / dt_max)))
        h = span / n_steps
        t = t_grid[i - 1]
        for _ in range(n_steps):
            new = prop.rk4_step(rho, t, h)
            steps_done += 1
            if steps_done % ctrl.richardson_interval == 0:
                half = prop.rk4_step(prop.rk4_step(rho, t, 0.5 * h), t + 0.5 * h, 0.5 * h)
                est = float(np.max(np.abs(new - half))) / 15.0
                max_local_error = max(max_local_error, est)
                if est > ctrl.richardson_tol:
                    raise IntegrationError(
                        f"local error estimate {est:.3e} above "
                        f"{ctrl.richardson_tol:.1e} at t = {t:.6g} (dt = {h:.3e})"
                    )
            rho = new
            t += h
        sample(i, rho)

    breaches = []
    if hermiticity_defect > 1e-10:
        breaches.append("hermiticity defect above 1e-10")
    if np.min(channels["photon_number"]) < -1e-10:
        breaches.append("photon_number below -1e-10")
    if min(np.min(channels["g2"]), np.min(channels["g3"])) < -1e-9:
        breaches.append("correlation channel below -1e-9")
    if np.max(channels["trace_error"]) > 1e-8:
        breaches.append("trace error above 1e-8")
    if np.min(channels["min_eigenvalue"]) < -1e-8:
        breaches.append("negative eigenvalue below -1e-8")
    if np.max(channels["purity"]) > 1.0 + 1e-10:
        breaches.append("purity above 1 + 1e-10")

    meta = dict(metadata or {})
    meta.update(
        dt=dt_max,
        omega_span=prop.omega_span,
        steps=steps_done,
        max_local_error_estimate=max_local_error,
        max_hermiticity_defect=hermiticity_defect,
        invariant_breaches=breaches,
        kappa=problem.jumps.kappa,
        gamma=problem.jumps.gamma,
        gamma_phi=problem.jumps.gamma_phi,
    )
    return TimeSeries(times=np.array(t_grid), channels=channels, metadata=meta)


def find_oscillation_peaks(times: np.ndarray, values: np.ndarray,
                           min_prominence: float = 0.05) -> np.ndarray:
    """Times of the local maxima of a sampled signal, parabolically refined.

    Maxima separated by a valley shallower than ``min_prominence`` times the
    signal range are merged (the taller one survives), which suppresses
    sampling ripple without touching genuine oscillation peaks.
    """
    v = np.asarray(values, dtype=float)
    t = np.asarray(times, dtype=float)
    rng = float(np.max(v) - np.min(v))
    if rng <= 0:
        return np.empty(0)
    idx = [
        i for i in range(1, v.size - 1)
        if v[i] >= v[i - 1] and v[i] > v[i + 1]
    ]
    kept: list[int] = []
    for i in idx:
        if kept:
            valley = float(np.min(v[kept[-1]:i + 1]))
            if min(v[kept[-1]], v[i]) - valley < min_prominence * rng:
                if v[i] > v[kept[-1]]:
                    kept[-1] = i
                continue
        kept.append(i)
    peak_times = []
    for i in kept:
        # Parabola through the three samples around the maximum.
        y0, y1, y2 = v[i - 1], v[i], v[i + 1]
        denom = y0 - 2.0 * y1 + y2
        shift = 0.0 if denom == 0 else 0.5 * (y0 - y2) / denom
        shift = float(np.clip(shift, -1.0, 1.0))
        peak_times.append(t[i] + shift * (t[min(i + 1, t.size - 1)] - t[i]))
    return np.array(peak_times)


def rabi_period_estimate(series: TimeSeries, channel: str = "photon_number",
                         min_prominence: float = 0.05) -> float:
    """Dominant oscillation period of a channel: mean peak-to-peak spacing."""
    peaks = find_oscillation_peaks(series.times, series.channel(channel),
                                   min_prominence)
    if peaks.size < 2:
        raise ValueError(
            f"channel {channel!r} has {peaks.size} usable extrema; "
            "need at least two oscillation peaks"
        )
    return float(np.mean(np.diff(peaks)))
