import numpy as np
import pytest

from usc_rabi.linops import SpaceLayout
from usc_rabi.sweeps import jc_polariton_doublet, sweep_spectrum

DELTA = 2.25 / 4.0


@pytest.fixture(scope="module")
def full_sweep():
    return sweep_spectrum(DELTA, 0.15, 16, (0.7, 2.4), 5, n_grid=180)


@pytest.fixture(scope="module")
def jc_sweep():
    return sweep_spectrum(DELTA, 0.15, 16, (0.7, 2.4), 5, rwa=True, n_grid=180)


class TestSweepBasics:
    def test_grid_strictly_increasing(self, full_sweep):
        assert np.all(np.diff(full_sweep.omega_q_values) > 0)

    def test_levels_nonnegative_and_sorted(self, full_sweep):
        assert np.min(full_sweep.levels) >= 0
        assert np.all(np.diff(full_sweep.levels, axis=1) >= -1e-12)

    def test_model_tags(self, full_sweep, jc_sweep):
        assert full_sweep.model_tag == "full"
        assert jc_sweep.model_tag == "jc"

    def test_rejects_too_many_levels(self):
        with pytest.raises(ValueError):
            sweep_spectrum(DELTA, 0.1, 2, (0.7, 1.5), 10)

    def test_uncoupled_levels_are_bare_lines(self):
        sweep = sweep_spectrum(DELTA, 0.0, 6, (0.7, 1.6), 3, n_grid=40)
        for i, wq in enumerate(sweep.omega_q_values):
            # Transitions from the ground state |g,0>: the qubit line at
            # omega_q and photon lines at integers.
            want = np.sort([wq, 1.0, min(2.0, wq + 1.0)])
            assert np.allclose(sweep.levels[i], want[:3], atol=1e-10)

    def test_characters_label_bare_states(self, full_sweep):
        i = int(np.argmin(np.abs(full_sweep.omega_q_values - 0.8)))
        assert full_sweep.characters[i][0] in ("g1", "e0", "mixed")


class TestAnticrossingStructure:
    def test_two_photon_gap_only_in_full_model(self, full_sweep, jc_sweep):
        # Track the gap between levels 2 and 3 near omega_q = 2: the full
        # model anticrosses, the RWA model crosses.
        def min_gap(sweep):
            sel = np.abs(sweep.omega_q_values - 1.994) < 0.08
            gaps = sweep.levels[sel, 2] - sweep.levels[sel, 1]
            return float(np.min(gaps))

        assert min_gap(full_sweep) > 0.02
        assert min_gap(jc_sweep) < 5e-3

    def test_one_photon_anticrossing_in_both(self, full_sweep, jc_sweep):
        # Near omega_q = 1 both models show the vacuum Rabi splitting,
        # whose size is about 2 g cos(theta) ~ 0.17.
        for sweep in (full_sweep, jc_sweep):
            sel = np.abs(sweep.omega_q_values - 1.0) < 0.1
            gaps = sweep.levels[sel, 1] - sweep.levels[sel, 0]
            assert np.min(gaps) > 0.1

    def test_three_photon_config_shows_three_crossings(self):
        sweep = sweep_spectrum(4.25 / 4.0, 0.25, 16, (1.7, 3.15), 6,
                               n_grid=240)
        w = sweep.omega_q_values

        def pair_gap(level, center, width=0.1):
            sel = np.abs(w - center) < width
            return float(np.min(sweep.levels[sel, level + 1]
                                - sweep.levels[sel, level]))

        # Two-photon (|e,0> +- |g,2>) near 2, its second rung, and the
        # three-photon (|e,0> +- |g,3>) near 3: all anticross in the full model.
        assert pair_gap(1, 1.93) > 0.02
        assert pair_gap(2, 2.9, 0.15) > 0.01

    def test_hybridization_at_two_photon_minimum(self, two_photon_resonance):
        from usc_rabi.effective import flux_swept_hamiltonian
        from usc_rabi.linops import hermitian_eig

        eig = hermitian_eig(
            flux_swept_hamiltonian(DELTA, 0.15, 16)(two_photon_resonance["omega_q"])
        )
        layout = SpaceLayout((2, 17))
        for level in two_photon_resonance["pair"]:
            w_e0 = abs(eig.vectors[layout.basis_index(1, 0), level]) ** 2
            w_g2 = abs(eig.vectors[layout.basis_index(0, 2), level]) ** 2
            assert abs(w_e0 - 0.5) <= 0.1
            assert abs(w_g2 - 0.5) <= 0.1


class TestJcOracle:
    @pytest.mark.parametrize("omega_q", [0.8, 0.95, 1.0, 1.2])
    def test_lowest_doublet_matches_block_formula(self, omega_q):
        sweep = sweep_spectrum(DELTA, 0.15, 16,
                               (omega_q - 0.01, omega_q + 0.01), 2,
                               rwa=True, n_grid=3)
        i = 1  # middle grid point sits at omega_q
        lo, hi = jc_polariton_doublet(sweep.omega_q_values[i], DELTA, 0.15)
        assert sweep.levels[i, 0] == pytest.approx(lo, abs=1e-10)
        assert sweep.levels[i, 1] == pytest.approx(hi, abs=1e-10)


class TestTruncationStability:
    def test_levels_stable_at_larger_cutoff(self):
        window = (1.9, 2.1)
        a = sweep_spectrum(DELTA, 0.15, 16, window, 8, n_grid=25, densify=0)
        b = sweep_spectrum(DELTA, 0.15, 21, window, 8, n_grid=25, densify=0)
        assert np.max(np.abs(a.levels - b.levels)) <= 1e-6


class TestDensify:
    def test_densification_adds_points_near_crossing(self):
        coarse = sweep_spectrum(DELTA, 0.15, 16, (1.9, 2.1), 4, n_grid=40,
                                densify=0)
        fine = sweep_spectrum(DELTA, 0.15, 16, (1.9, 2.1), 4, n_grid=40,
                              densify=8)
        assert fine.omega_q_values.size > coarse.omega_q_values.size


class TestThreading:
    def test_parallel_sweep_matches_serial(self, monkeypatch):
        serial = sweep_spectrum(DELTA, 0.15, 12, (1.9, 2.1), 4, n_grid=30)
        monkeypatch.setenv("USC_RABI_THREADS", "4")
        parallel = sweep_spectrum(DELTA, 0.15, 12, (1.9, 2.1), 4, n_grid=30)
        assert np.array_equal(serial.omega_q_values, parallel.omega_q_values)
        assert np.array_equal(serial.levels, parallel.levels)
        assert serial.characters == parallel.characters
