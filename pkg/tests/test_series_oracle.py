import numpy as np
import pytest
from scipy.linalg import expm

from gravjc.blocks import block_spectrum, initial_blocked_density
from gravjc.dense_oracle import (
    blocked_to_dense,
    dense_hamiltonian,
    dense_hamiltonian_parts,
    dense_initial_density,
    dense_spectral_evolve,
    series_oracle_tables,
)
from gravjc.engines import EngineMode, evolve_blocked, evolve_series_literal
from gravjc.params import coherent_weights

rng = np.random.default_rng(11)


def _comm(a, b):
    return a @ b - b @ a


class TestDenseHamiltonian:
    def test_parts_commute(self):
        # H1 tracks the conserved excitation number, so [H1, H2] = 0
        h1, h2 = dense_hamiltonian_parts(1.0, 1.8, 3)
        assert np.abs(_comm(h1, h2)).max() < 1e-13

    def test_parts_sum_to_full(self):
        h1, h2 = dense_hamiltonian_parts(1.0, 1.8, 3)
        h = dense_hamiltonian(1.0, 1.8, 3)
        assert np.abs(h1 + h2 - h).max() < 1e-14

    def test_dimension(self):
        assert dense_hamiltonian(1.0, 1.8, 3).shape == (8, 8)

    def test_hermitian(self):
        h = dense_hamiltonian(0.7, -2.3, 3)
        assert np.abs(h - h.conj().T).max() < 1e-14

    def test_spectrum_matches_blocks(self):
        h = dense_hamiltonian(1.0, 1.8, 3)
        dense_eigs = np.sort(np.linalg.eigvalsh(h))
        spec = block_spectrum(1.0, 1.8, 3)
        # blocks n=0..2, the |g,0> singleton, and the truncated lone |e,3>
        lone_top = 1.0 * 3.5 + 1.8 / 4
        blocked = np.concatenate([spec.eig_plus, spec.eig_minus,
                                  [spec.ground_energy, lone_top]])
        assert np.abs(np.sort(blocked) - dense_eigs).max() < 1e-12

    def test_coupling_entries(self):
        h = dense_hamiltonian(0.0, 0.0, 3)
        # <e,m| H |g,m+1> = sqrt(m+1) on the interleaved basis
        for m in range(3):
            assert h[2 * m, 2 * (m + 1) + 1] == pytest.approx(np.sqrt(m + 1))


class TestOracleTables:
    def setup_method(self):
        self.tab = series_oracle_tables(1.0, 1.8, 3, 0.01, 0.1, 1.0)

    def test_unitary_factor(self):
        u = self.tab.exp_ih2
        assert np.abs(u @ u.conj().T - np.eye(8)).max() < 1e-10

    def test_a1_a2_commute(self):
        assert np.abs(_comm(self.tab.a1, self.tab.a2)).max() < 1e-10

    def test_a3_a4_commute(self):
        assert np.abs(_comm(self.tab.a3, self.tab.a4)).max() < 1e-10

    def test_quadratic_split(self):
        # A1 + A2 = (H1+H2)^2 = H^2 because the parts commute
        assert np.abs(self.tab.a1 + self.tab.a2 - self.tab.h_sq).max() < 1e-12

    def test_quartic_split(self):
        assert np.abs(self.tab.a3 + self.tab.a4 - self.tab.h_quart).max() < 1e-11

    def test_gaussian_factors_positive(self):
        for m in (self.tab.exp_ga2, self.tab.exp_gea4):
            eigs = np.linalg.eigvalsh(m)
            assert np.all(eigs > 0)

    def test_cutoff_bound(self):
        with pytest.raises(ValueError):
            series_oracle_tables(1.0, 1.8, 4, 0.01, 0.1, 1.0)


class TestDenseSpectralEvolve:
    def setup_method(self):
        self.h = dense_hamiltonian(1.0, 1.8, 3)
        self.rho0 = dense_initial_density(coherent_weights(2.0 + 0j, 3), 3)

    def test_exact_preserves_trace(self):
        out = dense_spectral_evolve(self.rho0, self.h, 7e-5, 5e-5, 50.0,
                                    kind="exact", eta_q=7e-5 * 5e-5)
        assert np.trace(out).real == pytest.approx(np.trace(self.rho0).real,
                                                   abs=1e-12)

    def test_paper_loses_trace(self):
        out = dense_spectral_evolve(self.rho0, self.h, 1e-3, 1e-2, 50.0,
                                    kind="paper")
        assert np.trace(out).real < np.trace(self.rho0).real - 1e-6

    def test_undamped_is_unitary(self):
        out = dense_spectral_evolve(self.rho0, self.h, 0.0, 0.0, 4.2,
                                    kind="exact", eta_q=0.0)
        u = expm(-1j * 4.2 * self.h)
        assert np.abs(out - u @ self.rho0 @ u.conj().T).max() < 1e-12


class TestBlockedDenseConsistency:
    """The blocked engines and the dense oracle are two views of one model."""

    def test_blocked_to_dense_round_trip(self):
        rho = initial_blocked_density(coherent_weights(2.0 + 0j, 3))
        dense = blocked_to_dense(rho.ground_pop, rho.blocks, 4)
        assert np.trace(dense).real == pytest.approx(rho.trace().real, abs=1e-14)
        # |e,n> populations land on even indices 2n
        for n in range(4):
            assert dense[2 * n, 2 * n].real == pytest.approx(
                rho.blocks[n, 0, 0].real, abs=1e-15)

    @pytest.mark.parametrize("kind,mode", [("exact", "exact_spectral"),
                                           ("paper", "paper_spectral")])
    def test_engines_match_dense_oracle(self, kind, mode):
        gamma, eta = 7e-5, 5e-5
        rho_b = initial_blocked_density(coherent_weights(2.0 + 0j, 3))
        spec = block_spectrum(1.0, 1.8, 4)
        h = dense_hamiltonian(1.0, 1.8, 4)
        dense0 = blocked_to_dense(rho_b.ground_pop, rho_b.blocks, 4)
        for tau in (0.0, 1.0, 10.0, 50.0):
            st, _ = evolve_blocked(rho_b, spec, EngineMode(mode=mode),
                                   gamma, eta, tau)
            got = blocked_to_dense(st.ground_pop, st.blocks, 4)
            kw = dict(kind=kind)
            if kind == "exact":
                kw["eta_q"] = gamma * eta
            ref = dense_spectral_evolve(dense0, h, gamma, eta, tau, **kw)
            assert np.abs(got - ref).max() < 1e-12

    def test_paper_series_blockwise_matches_dense_literal(self):
        gamma, eta = 7e-5, 5e-5
        rho_b = initial_blocked_density(coherent_weights(2.0 + 0j, 3))
        spec = block_spectrum(1.0, 1.8, 4)
        h = dense_hamiltonian(1.0, 1.8, 4)
        dense0 = blocked_to_dense(rho_b.ground_pop, rho_b.blocks, 4)
        for tau in (0.5, 5.0, 25.0, 50.0):
            st, _ = evolve_blocked(rho_b, spec, EngineMode(mode="paper_series"),
                                   gamma, eta, tau)
            got = blocked_to_dense(st.ground_pop, st.blocks, 4)
            ref, _ = evolve_series_literal(dense0, h, gamma, eta, tau)
            assert np.abs(got - ref).max() < 1e-12

    def test_paper_spectral_vs_dense_series(self):
        # closed-form kernels against the nested-sum oracle, full system
        gamma, eta = 7e-5, 5e-5
        rho_b = initial_blocked_density(coherent_weights(2.0 + 0j, 3))
        spec = block_spectrum(1.0, 1.8, 4)
        h = dense_hamiltonian(1.0, 1.8, 4)
        dense0 = blocked_to_dense(rho_b.ground_pop, rho_b.blocks, 4)
        worst = 0.0
        for tau in np.arange(0.0, 50.5, 2.5):
            st, _ = evolve_blocked(rho_b, spec, EngineMode(mode="paper_spectral"),
                                   gamma, eta, float(tau))
            got = blocked_to_dense(st.ground_pop, st.blocks, 4)
            ref, _ = evolve_series_literal(dense0, h, gamma, eta, float(tau))
            worst = max(worst, float(np.abs(got - ref).max()))
        assert worst < 1e-10
