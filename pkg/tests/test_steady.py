import numpy as np
import pytest

from conftest import random_state
from bundler import steady
from bundler.errors import (
    DimensionError,
    NonUniqueSteadyStateError,
    TruncationOverflowError,
)
from bundler.hilbert import QOperator, annihilation, identity
from bundler.liouville import (
    Channel,
    SystemParams,
    bare_channels,
    hamiltonian,
    liouvillian,
    system_operators,
)


def _full_na(params, N):
    L = liouvillian(hamiltonian(params, N), bare_channels(params, N))
    rho = steady.steady_state(L)
    ops = system_operators(N)
    return steady.expectation(rho, ops["ad"] @ ops["a"]).real, rho


class TestSteadyState:
    def test_pure_decay_gives_vacuum(self):
        a = annihilation(5)
        L = liouvillian(QOperator(np.zeros((5, 5)), (5,)), [Channel(a, 1.0)])
        rho = steady.steady_state(L)
        expected = np.zeros((5, 5))
        expected[0, 0] = 1.0
        np.testing.assert_allclose(rho.data, expected, atol=1e-12)

    @pytest.mark.parametrize("ratio", [0.1, 1.0, 10.0])
    def test_resonance_fluorescence_population(self, ratio):
        gs = 0.3
        Om = ratio * gs
        p = SystemParams(omega=Om, delta_a=1.0, gamma_a=0.8, gamma_sigma=gs, g=1e-11)
        L = liouvillian(hamiltonian(p, 4), bare_channels(p, 4))
        rho = steady.steady_state(L)
        ops = system_operators(4)
        n_sigma = steady.expectation(rho, ops["sigmad"] @ ops["sigma"]).real
        assert n_sigma == pytest.approx(4 * Om**2 / (gs**2 + 8 * Om**2), abs=1e-8)

    def test_invariants_on_production_liouvillian(self, fig1_params):
        _, rho = _full_na(fig1_params, 8)
        rho.validate()  # hermiticity, trace, positivity

    def test_degenerate_null_space_rejected(self):
        # two disconnected decay sinks -> two stationary states
        dims = (4,)
        op = np.zeros((4, 4), dtype=complex)
        op[0, 1] = 1.0  # |0><1| decay inside the first pair
        op2 = np.zeros((4, 4), dtype=complex)
        op2[2, 3] = 1.0  # |2><3| decay inside the second pair
        L = liouvillian(
            QOperator(np.zeros((4, 4)), dims),
            [Channel(QOperator(op, dims), 1.0), Channel(QOperator(op2, dims), 0.5)],
        )
        with pytest.raises(NonUniqueSteadyStateError):
            steady.steady_state(L)

    def test_evolution_converges_to_steady_state(self, rng, fig1_params):
        N = 5
        L = liouvillian(hamiltonian(fig1_params, N), bare_channels(fig1_params, N))
        target = steady.steady_state(L)
        rho0 = random_state(rng, 2 * (N + 1))
        evolved = steady.evolve(L, rho0, t=400.0, steps=12000)
        assert np.linalg.norm(evolved.data - target.data) < 1e-6


class TestExpectation:
    def test_identity_expectation(self, fig1_params):
        _, rho = _full_na(fig1_params, 6)
        assert steady.expectation(rho, identity(2).tensor(identity(7))).real == (
            pytest.approx(1.0, abs=1e-12)
        )

    def test_vacuum_photon_number(self):
        a = annihilation(3)
        L = liouvillian(QOperator(np.zeros((3, 3)), (3,)), [Channel(a, 1.0)])
        rho = steady.steady_state(L)
        assert abs(steady.expectation(rho, a.dag() @ a)) < 1e-14

    def test_dim_mismatch(self, fig1_params):
        _, rho = _full_na(fig1_params, 6)
        with pytest.raises(DimensionError):
            steady.expectation(rho, annihilation(5))


class TestChooseTruncation:
    def test_weak_driving_hits_floor(self):
        p = SystemParams(omega=0.01, delta_a=5.0, gamma_a=1.0, gamma_sigma=0.1)
        assert steady.choose_truncation(p) == p.n + 2

    def test_converged_top_population(self, fig1_params):
        N = steady.choose_truncation(fig1_params)
        _, rho = _full_na(fig1_params, N)
        pops = rho.fock_populations()
        n_a = float(np.arange(N + 1) @ pops)
        assert pops[-2:].sum() < 1e-8 * n_a

    def test_population_stability(self, fig1_params):
        tol = 1e-8
        N = steady.choose_truncation(fig1_params, tol=tol)
        na_N, _ = _full_na(fig1_params, N)
        na_N2, _ = _full_na(fig1_params, N + 2)
        na_N4, _ = _full_na(fig1_params, N + 4)
        assert abs(na_N2 - na_N) / na_N < tol * 10
        assert abs(na_N4 - na_N) / na_N < tol * 10

    def test_cap_overflow(self):
        p = SystemParams(omega=5.0, delta_a=5.0, gamma_a=1.3, gamma_sigma=0.01)
        with pytest.raises(TruncationOverflowError):
            steady.choose_truncation(p, cap=5)

    def test_tol_domain(self, fig1_params):
        with pytest.raises(ValueError):
            steady.choose_truncation(fig1_params, tol=0.5)
