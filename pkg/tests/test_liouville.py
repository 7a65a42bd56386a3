import numpy as np
import pytest

from conftest import random_hermitian
from bundler import steady
from bundler.errors import DimensionError, UnsupportedFrameError, ValidityWarning
from bundler.hilbert import annihilation, identity, tensor_embed
from bundler.liouville import (
    Channel,
    SystemParams,
    bare_channels,
    dressed_decay_channels,
    hamiltonian,
    liouvillian,
    phonon_channels,
    system_operators,
    unvec,
    vec,
    vec_identity,
)
from bundler.phonon import PhononEnvironment


class TestSystemParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            SystemParams(omega=1, delta_a=1, gamma_a=0.0, gamma_sigma=0.1)
        with pytest.raises(ValueError):
            SystemParams(omega=1, delta_a=1, gamma_a=0.1, gamma_sigma=-0.1)
        with pytest.raises(ValueError):
            SystemParams(omega=1, delta_a=1, gamma_a=0.1, gamma_sigma=0.1, n=1)

    def test_derived_quantities(self):
        p = SystemParams(omega=20.0, delta_a=20.0, gamma_a=1.3, gamma_sigma=0.01)
        assert p.cooperativity == pytest.approx(4 / (1.3 * 0.01))
        assert p.rabi == pytest.approx(20.0)
        assert p.bundle_resonance == pytest.approx(20.0)
        p3 = p.at(n=3, delta=2.0)
        assert p3.rabi == pytest.approx(np.hypot(20.0, 1.0))
        assert p3.bundle_resonance == pytest.approx(2 * p3.rabi / 3)


class TestHamiltonian:
    def test_uncoupled_is_diagonal(self):
        p = SystemParams(omega=0.0, delta_a=2.5, gamma_a=1, gamma_sigma=0.1,
                         delta=0.7, g=1e-30)
        H = hamiltonian(p, 4).data
        np.testing.assert_allclose(H, np.diag(np.diag(H)), atol=1e-25)
        ops = system_operators(4)
        expected = 2.5 * (ops["ad"] @ ops["a"]).data + 0.7 * (
            ops["sigmad"] @ ops["sigma"]
        ).data
        np.testing.assert_allclose(H, expected, atol=1e-25)

    def test_bare_and_dressed_share_spectrum(self, fig1_params):
        wb = np.sort(np.linalg.eigvalsh(hamiltonian(fig1_params, 8, "bare").data))
        wd = np.sort(np.linalg.eigvalsh(hamiltonian(fig1_params, 8, "dressed").data))
        np.testing.assert_allclose(wb, wd, atol=1e-10)

    def test_dressed_needs_resonant_drive(self, fig1_params):
        with pytest.raises(UnsupportedFrameError):
            hamiltonian(fig1_params.at(delta=1.0), 8, "dressed")

    def test_truncation_floor(self, fig1_params):
        with pytest.raises(DimensionError):
            hamiltonian(fig1_params, 3)

    def test_unknown_frame(self, fig1_params):
        with pytest.raises(UnsupportedFrameError):
            hamiltonian(fig1_params, 8, "rotating")

    def test_manifold_ladder_structure(self, fig1_params):
        # eigenvalues organize into dressed manifolds +-R + m delta_a
        H = hamiltonian(fig1_params, 9)
        evals = np.sort(np.linalg.eigvalsh(H.data))
        R, da = fig1_params.rabi, fig1_params.delta_a
        targets = sorted(s * R + m * da for s in (-1, 1) for m in range(4))
        low = [e for e in evals if e < targets[-1] + da / 2]
        for t in targets:
            assert np.min(np.abs(np.array(low) - t)) < 0.5  # units of g


class TestLiouvillian:
    def _elementwise_oracle(self, H, channels):
        """Apply the Lindblad map to every matrix unit and column-stack."""
        d = H.dim
        cols = []
        for j in range(d):
            for i in range(d):
                E = np.zeros((d, d), dtype=complex)
                E[i, j] = 1.0
                out = -1j * (H.data @ E - E @ H.data)
                for ch in channels:
                    O = ch.op.data
                    OdO = O.conj().T @ O
                    out += (ch.rate / 2) * (
                        2 * O @ E @ O.conj().T - OdO @ E - E @ OdO
                    )
                cols.append(vec(out))
        return np.array(cols).T

    def test_matches_elementwise_construction(self, rng):
        from bundler.hilbert import QOperator

        dims = (2, 3)
        a = tensor_embed(annihilation(3), 1, dims)
        s = tensor_embed(annihilation(2), 0, dims)
        H = QOperator(random_hermitian(rng, 6), dims)
        chans = [Channel(a, 0.9), Channel(s, 0.2), Channel(s.dag() @ s, 0.4)]
        L = liouvillian(H, chans)
        oracle = self._elementwise_oracle(H, chans)
        np.testing.assert_allclose(L.data, oracle, atol=1e-13)

    def test_trace_preservation(self, rng):
        dims = (2, 4)
        from bundler.hilbert import QOperator

        H = QOperator(random_hermitian(rng, 8), dims)
        ops = [
            QOperator(rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8)), dims)
            for _ in range(3)
        ]
        L = liouvillian(H, [Channel(o, r) for o, r in zip(ops, (0.3, 1.1, 0.02))])
        assert L.trace_defect() < 1e-14

    def test_damped_cavity_decay_mode(self):
        from bundler.hilbert import QOperator

        a = annihilation(4)
        H = QOperator(np.zeros((4, 4)), (4,))
        L = liouvillian(H, [Channel(a, 0.8)])
        rho = steady.steady_state(L)
        vac = np.zeros((4, 4))
        vac[0, 0] = 1.0
        np.testing.assert_allclose(rho.data, vac, atol=1e-12)
        evals = np.linalg.eigvals(L.data)
        assert np.min(np.abs(evals - (-0.4))) < 1e-10  # coherence sector

    def test_zero_rate_channel_is_identity_operation(self, fig1_params):
        N = 6
        H = hamiltonian(fig1_params, N)
        chans = bare_channels(fig1_params, N)
        L1 = liouvillian(H, chans)
        extra = Channel(system_operators(N)["a"], 0.0)
        L2 = liouvillian(H, chans + [extra])
        assert np.array_equal(L1.data, L2.data)

    def test_hermiticity_preservation(self, rng, fig1_params):
        N = 5
        L = liouvillian(hamiltonian(fig1_params, N), bare_channels(fig1_params, N))
        d = 2 * (N + 1)
        for _ in range(5):
            rho = random_hermitian(rng, d)
            out = unvec(L.data @ vec(rho), d)
            assert np.linalg.norm(out - out.conj().T) < 1e-10 * np.linalg.norm(out)

    def test_dim_mismatch(self, fig1_params):
        H = hamiltonian(fig1_params, 5)
        bad = Channel(system_operators(6)["a"], 0.1)
        with pytest.raises(DimensionError):
            liouvillian(H, [bad])

    def test_dressed_channels_rates(self):
        p = SystemParams(omega=20.0, delta_a=20.0, gamma_a=0.5, gamma_sigma=0.02)
        chans = dressed_decay_channels(p, 5)
        assert [c.rate for c in chans] == [0.005, 0.005, 0.02]

    def test_dressed_frame_population_agreement(self):
        # dressed-frame solve with secular channels vs exact bare solve
        p = SystemParams(omega=20.0, delta_a=20.0, gamma_a=0.5, gamma_sigma=0.02)
        N = 8
        ops = system_operators(N)
        num = ops["ad"] @ ops["a"]
        Lb = liouvillian(hamiltonian(p, N, "bare"), bare_channels(p, N))
        na_bare = steady.expectation(steady.steady_state(Lb), num).real
        chans = dressed_decay_channels(p, N) + [Channel(ops["a"], p.gamma_a)]
        Ld = liouvillian(hamiltonian(p, N, "dressed"), chans)
        na_dressed = steady.expectation(steady.steady_state(Ld), num).real
        assert na_dressed == pytest.approx(na_bare, rel=0.10)


class TestPhononChannels:
    def test_zero_coupling_environment(self):
        env = PhononEnvironment(temperature=0.0, alpha_p=0.0)
        p = SystemParams(omega=5, delta_a=5, gamma_a=1.3, gamma_sigma=0.01)
        chans = phonon_channels(env, p, 5)
        assert [c.rate for c in chans] == [0.0, 0.0, 0.0]

    def test_warm_preset_rates(self):
        env = PhononEnvironment(temperature=30.0, hbar_g_ueV=45.0)
        p = SystemParams(omega=5, delta_a=5, gamma_a=1.3, gamma_sigma=0.01)
        up, down, gphi = [c.rate for c in phonon_channels(env, p, 5)]
        assert up > 0 and down > 0 and up != down
        assert gphi == pytest.approx(30.0 / 45.0)

    def test_channels_preserve_trace(self):
        env = PhononEnvironment(temperature=30.0, hbar_g_ueV=45.0)
        p = SystemParams(omega=5, delta_a=5, gamma_a=1.3, gamma_sigma=0.01)
        N = 5
        L = liouvillian(
            hamiltonian(p, N),
            bare_channels(p, N) + phonon_channels(env, p, N),
        )
        assert L.trace_defect() < 1e-12
