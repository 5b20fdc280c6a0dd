"""Loss and phase-jitter channels against their independent oracles."""

import numpy as np
import pytest
from conftest import loss_via_ancilla, mc_phase_jitter_cov, random_physical_state

from cvghz import (
    ChannelSpec,
    GaussianState,
    apply,
    apply_channel,
    check_physicality,
    loss,
    phase_jitter,
    squeezer,
    vacuum,
    visibility_to_efficiency,
)


def squeezed_vacuum(r: float, n_modes: int = 1, mode: int = 0) -> GaussianState:
    return apply(vacuum(n_modes), squeezer(n_modes, mode, r))


class TestChannelSpec:
    def test_valid(self):
        spec = ChannelSpec(efficiency=(0.9, 1.0, 0.8), phase_sigma=(0.0, 0.1, 0.2))
        assert spec.n_modes == 3

    def test_lossless(self):
        spec = ChannelSpec.lossless(3)
        assert spec.efficiency == (1.0, 1.0, 1.0)
        assert spec.phase_sigma == (0.0, 0.0, 0.0)

    @pytest.mark.parametrize(
        "eff,sig",
        [((1.2, 1.0), (0.0, 0.0)), ((-0.1, 1.0), (0.0, 0.0)), ((1.0, 1.0), (-0.2, 0.0)), ((1.0,), (0.0, 0.0))],
    )
    def test_invalid(self, eff, sig):
        with pytest.raises(ValueError):
            ChannelSpec(efficiency=eff, phase_sigma=sig)


class TestLoss:
    def test_unit_efficiency_is_identity(self):
        rng = np.random.default_rng(1)
        state = random_physical_state(rng)
        out = loss(state, 1, 1.0)
        assert np.allclose(out.cov, state.cov, atol=1e-15)
        assert np.allclose(out.mean, state.mean, atol=1e-15)

    def test_zero_efficiency_resets_to_vacuum(self):
        rng = np.random.default_rng(2)
        state = random_physical_state(rng)
        out = loss(state, 0, 0.0)
        assert np.allclose(out.cov[0:2, 0:2], 0.25 * np.eye(2), atol=1e-15)
        assert np.allclose(out.cov[0:2, 2:], 0.0, atol=1e-15)
        assert np.allclose(out.mean[0:2], 0.0, atol=1e-15)

    def test_squeezed_variance_law_matches_ancilla_oracle(self):
        r, eta = 0.8, 0.65
        state = squeezed_vacuum(r)
        out = loss(state, 0, eta)
        oracle = loss_via_ancilla(state, 0, eta)
        assert np.max(np.abs(out.cov - oracle.cov)) <= 1e-12
        expected = eta * np.exp(-2 * r) / 4 + (1 - eta) / 4
        assert out.mode_variances(0)[0] == pytest.approx(expected, abs=1e-14)

    def test_matches_ancilla_oracle_on_random_states(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            state = random_physical_state(rng)
            mode = int(rng.integers(3))
            eta = float(rng.uniform(0, 1))
            out = loss(state, mode, eta)
            oracle = loss_via_ancilla(state, mode, eta)
            assert np.max(np.abs(out.cov - oracle.cov)) <= 1e-12
            assert np.max(np.abs(out.mean - oracle.mean)) <= 1e-12

    def test_composition_multiplies_efficiencies(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            state = random_physical_state(rng)
            eta1, eta2 = rng.uniform(0.2, 1.0, 2)
            twice = loss(loss(state, 1, eta1), 1, eta2)
            once = loss(state, 1, eta1 * eta2)
            assert np.max(np.abs(twice.cov - once.cov)) <= 1e-12

    def test_eta_out_of_range(self):
        with pytest.raises(ValueError):
            loss(vacuum(2), 0, 1.1)
        with pytest.raises(ValueError):
            loss(vacuum(2), 0, -0.01)


class TestPhaseJitter:
    def test_zero_sigma_is_identity(self):
        rng = np.random.default_rng(5)
        state = random_physical_state(rng)
        out = phase_jitter(state, 2, 0.0)
        assert np.allclose(out.cov, state.cov, atol=1e-15)

    def test_large_sigma_isotropizes_squeezed_vacuum(self):
        r = 0.9
        state = squeezed_vacuum(r)
        out = phase_jitter(state, 0, 10.0)
        expected = (np.exp(-2 * r) + np.exp(2 * r)) / 8.0
        vx, vp = out.mode_variances(0)
        assert vx == pytest.approx(expected, abs=1e-12)
        assert vp == pytest.approx(expected, abs=1e-12)
        mc_mean, mc_se = mc_phase_jitter_cov(state, 0, 10.0, draws=1_000_000, seed=10)
        assert np.all(np.abs(out.cov - mc_mean) <= 3.0 * mc_se + 1e-12)

    def test_cross_covariances_shrink_by_moment_factor(self):
        rng = np.random.default_rng(6)
        state = random_physical_state(rng, n_ops=8)
        sigma = 0.35
        out = phase_jitter(state, 1, sigma)
        factor = np.exp(-0.5 * sigma**2)
        assert np.allclose(out.cov[2:4, 0:2], factor * state.cov[2:4, 0:2], atol=1e-14)
        assert np.allclose(out.cov[2:4, 4:6], factor * state.cov[2:4, 4:6], atol=1e-14)
        mc_mean, mc_se = mc_phase_jitter_cov(state, 1, sigma, draws=1_000_000, seed=11)
        assert np.all(np.abs(out.cov - mc_mean) <= 3.0 * mc_se + 1e-12)

    def test_monotone_in_sigma_for_squeezed_quadrature(self):
        state = squeezed_vacuum(1.1)
        previous = -np.inf
        for sigma in np.arange(0.0, 1.0001, 0.05):
            vx = phase_jitter(state, 0, float(sigma)).mode_variances(0)[0]
            assert vx >= previous - 1e-15
            previous = vx

    def test_negative_sigma_rejected(self):
        with pytest.raises(ValueError):
            phase_jitter(vacuum(1), 0, -0.1)


class TestPhysicalityPreservation:
    def test_channels_keep_states_physical(self):
        rng = np.random.default_rng(8)
        for _ in range(200):
            state = random_physical_state(rng)
            if rng.integers(2):
                state = loss(state, int(rng.integers(3)), float(rng.uniform(0, 1)))
            else:
                state = phase_jitter(state, int(rng.integers(3)), float(rng.uniform(0, 1.5)))
            assert check_physicality(state).ok


class TestVisibility:
    def test_endpoints(self):
        assert visibility_to_efficiency(1.0) == 1.0
        assert visibility_to_efficiency(0.0) == 0.0

    def test_homodyne_visibility(self):
        assert visibility_to_efficiency(0.979) == pytest.approx(0.958441, abs=1e-12)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            visibility_to_efficiency(1.01)
        with pytest.raises(ValueError):
            visibility_to_efficiency(-0.2)


class TestApplyChannel:
    def test_matches_explicit_sequence(self):
        rng = np.random.default_rng(9)
        state = random_physical_state(rng)
        spec = ChannelSpec(efficiency=(0.9, 0.8, 1.0), phase_sigma=(0.1, 0.0, 0.25))
        out = apply_channel(state, spec)
        manual = state
        for mode, eta in enumerate(spec.efficiency):
            manual = loss(manual, mode, eta)
        for mode, sigma in enumerate(spec.phase_sigma):
            manual = phase_jitter(manual, mode, sigma)
        assert np.allclose(out.cov, manual.cov, atol=1e-15)

    def test_loss_and_jitter_commute_per_mode(self):
        rng = np.random.default_rng(10)
        state = random_physical_state(rng)
        a = phase_jitter(loss(state, 1, 0.7), 1, 0.3)
        b = loss(phase_jitter(state, 1, 0.3), 1, 0.7)
        assert np.max(np.abs(a.cov - b.cov)) <= 1e-14

    def test_mode_count_mismatch(self):
        with pytest.raises(ValueError):
            apply_channel(vacuum(2), ChannelSpec.lossless(3))
