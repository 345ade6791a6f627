import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tdsts import Displacement, OscillatorParams, Squeeze, StateSpec, ThermalSpec, temperature_for_angle
from tdsts.oracle import (
    FockConvergenceError,
    FockState,
    GaussianMode,
    IntegrationError,
    TruncationWarning,
    fock_expectations,
    fock_tfd_state,
    free_evolution,
    gaussian_photon_stats,
    gaussian_tfd_state,
    quad_integrate,
    reduce_physical,
    wavefunction_from_fock,
)
from tdsts.oracle.fock import default_cutoff
from tdsts.validation import Box, draw_cases

from .conftest import UNIT, spec_of, states, times


def angle_spec(alpha=0j, r=0.0, phi=0.0, theta1=0.0, theta2=0.0, osc=UNIT):
    thermal = ThermalSpec([temperature_for_angle(theta1, osc)], [temperature_for_angle(theta2, osc)])
    return StateSpec(osc, Displacement.from_complex(complex(alpha)), Squeeze(r, phi), thermal)


class TestGaussianOracle:
    def test_two_mode_vacuum(self):
        osc = OscillatorParams(2.0, 0.5, 1.5)
        g = gaussian_tfd_state(StateSpec(osc=osc), 0.8)
        mw = osc.m * osc.omega
        np.testing.assert_allclose(g.mean, 0, atol=1e-16)
        np.testing.assert_allclose(g.cov, 0.5 * osc.hbar * np.diag([1 / mw, mw, 1 / mw, mw]), rtol=1e-14, atol=1e-16)

    def test_thermal_mode(self):
        g = reduce_physical(gaussian_tfd_state(angle_spec(theta1=0.6), 0.0))
        assert g.cov[0, 0] == pytest.approx(0.5 * math.cosh(1.2), rel=1e-14)

    def test_reduce_vacuum(self):
        g = reduce_physical(gaussian_tfd_state(StateSpec(), 0.0))
        np.testing.assert_allclose(g.cov, 0.5 * np.eye(2), atol=1e-16)
        assert g.modes == 1

    def test_reduce_wrong_dimension(self):
        with pytest.raises(ValueError):
            reduce_physical(GaussianMode([0, 0], np.eye(2)))

    def test_full_parameter_set_is_physical(self, full_case):
        g = gaussian_tfd_state(full_case.spec, full_case.t)
        assert g.is_valid()
        # the thermofield state is pure: every symplectic eigenvalue is hbar/2
        np.testing.assert_allclose(g.symplectic_eigenvalues(), 0.5, rtol=1e-12)

    def test_invalid_covariance_flagged(self):
        assert not GaussianMode([0, 0], 0.1 * np.eye(2)).is_valid()
        assert not GaussianMode([0, 0], [[1.0, 0.2], [0.0, 1.0]]).is_valid()

    @given(states(), times)
    def test_every_state_is_physical(self, spec, t):
        g = gaussian_tfd_state(spec, t)
        assert g.is_valid()
        assert reduce_physical(g).is_valid()

    @given(states(), times, st.floats(-5, 5))
    def test_reduction_commutes_with_free_evolution(self, spec, t, dt):
        g = gaussian_tfd_state(spec, t)
        a = reduce_physical(free_evolution(g, spec.osc, dt))
        b = free_evolution(reduce_physical(g), spec.osc, dt)
        scale = np.abs(g.cov).max()
        assert np.abs(a.cov - b.cov).max() <= 1e-12 * scale
        assert np.abs(a.mean - b.mean).max() <= 1e-12 * (1 + np.abs(g.mean).max())

    @given(states(), times, st.floats(0, 5))
    def test_free_evolution_is_the_circuit_clock(self, spec, t, dt):
        a = gaussian_tfd_state(spec, t + dt)
        b = free_evolution(gaussian_tfd_state(spec, t), spec.osc, dt)
        assert np.abs(a.cov - b.cov).max() <= 1e-11 * np.abs(a.cov).max()


class TestWickPhotonStats:
    def test_vacuum(self):
        ps = gaussian_photon_stats(GaussianMode([0, 0], 0.5 * np.eye(2)), UNIT)
        assert ps.mean_n == 0 and ps.var_n == 0 and ps.g2 is None

    def test_coherent(self):
        g = reduce_physical(gaussian_tfd_state(spec_of(1.2 + 0.3j), 0.4))
        ps = gaussian_photon_stats(g, UNIT)
        assert ps.g2 == pytest.approx(1.0, rel=1e-13)
        assert ps.mean_n == pytest.approx(1.53, rel=1e-13)

    def test_needs_one_mode(self):
        with pytest.raises(ValueError):
            gaussian_photon_stats(gaussian_tfd_state(StateSpec(), 0.0), UNIT)


class TestFockOracle:
    def test_vacuum(self):
        s = fock_tfd_state(StateSpec(), 0.3, 10)
        ref = np.zeros((11, 11))
        ref[0, 0] = 1
        np.testing.assert_allclose(s.amplitudes, ref, atol=1e-15)
        assert s.converged

    def test_squeezed_vacuum_parity(self):
        s = fock_tfd_state(spec_of(0, 0.5, 0.7), 0.0, 30)
        assert np.abs(s.amplitudes[1::2, :]).max() < 1e-15
        assert np.abs(s.amplitudes[0::2, 0::2]).max() > 0.1

    @pytest.mark.slow
    @pytest.mark.xfail(strict=True, raises=FockConvergenceError, reason="cutoff 40 drops ~5e-6 of the weight")
    def test_cutoff_40_vs_60(self, full_case):
        a = fock_expectations(fock_tfd_state(full_case.spec, full_case.t, 40), UNIT).mean_n
        b = fock_expectations(fock_tfd_state(full_case.spec, full_case.t, 60), UNIT).mean_n
        assert abs(a - b) <= 1e-8

    @pytest.mark.slow
    def test_cutoff_convergence(self, full_case):
        a = fock_expectations(fock_tfd_state(full_case.spec, full_case.t, 80), UNIT).mean_n
        b = fock_expectations(fock_tfd_state(full_case.spec, full_case.t, 100), UNIT).mean_n
        assert abs(a - b) <= 1e-8

    @pytest.mark.slow
    def test_deficit_monotone_in_cutoff(self, full_case):
        deficits = [fock_tfd_state(full_case.spec, full_case.t, n).norm_deficit for n in (50, 60, 70, 80)]
        assert all(a > b for a, b in zip(deficits, deficits[1:]))

    def test_non_convergence_is_reported(self):
        with pytest.raises(FockConvergenceError, match="cutoff"):
            fock_tfd_state(spec_of(2.0, 1.0, 0, 2.0, 2.0), 0.0, 10)

    def test_cutoff_minimum(self):
        with pytest.raises(ValueError):
            fock_tfd_state(StateSpec(), 0.0, 7)

    def test_env_cutoff(self, monkeypatch):
        monkeypatch.setenv("TDSTS_FOCK_CUTOFF", "12")
        assert default_cutoff() == 12
        assert fock_tfd_state(StateSpec(), 0.0).cutoff == 12

    def test_vacuum_expectations(self):
        osc = OscillatorParams(2.0, 3.0, 0.5)
        e = fock_expectations(fock_tfd_state(StateSpec(osc=osc), 0.0, 8), osc)
        assert (e.mean_x, e.mean_p, e.mean_n, e.n2) == (0, 0, 0, 0)
        assert e.x2 == pytest.approx(osc.hbar / (2 * osc.m * osc.omega), rel=1e-15)
        assert e.p2 == pytest.approx(osc.m * osc.hbar * osc.omega / 2, rel=1e-15)

    def test_coherent_poisson_moments(self):
        e = fock_expectations(fock_tfd_state(spec_of(1.0), 0.0, 40), UNIT)
        assert e.mean_n == pytest.approx(1.0, abs=1e-12)
        assert e.n2 == pytest.approx(2.0, abs=1e-12)

    @pytest.mark.slow
    def test_full_parameter_set_matches_gaussian(self, full_case):
        spec, t = full_case.spec, full_case.t
        e = fock_expectations(fock_tfd_state(spec, t, 60), spec.osc)
        g = reduce_physical(gaussian_tfd_state(spec, t))
        got = [e.mean_x, e.mean_p, e.x2, e.p2]
        ref = [g.mean[0], g.mean[1], g.cov[0, 0] + g.mean[0] ** 2, g.cov[1, 1] + g.mean[1] ** 2]
        np.testing.assert_allclose(got, ref, atol=1e-6)

    @pytest.mark.slow
    def test_photon_stats_time_independent(self, full_case):
        spec = full_case.spec
        stats = [fock_expectations(fock_tfd_state(spec, t, 60), spec.osc) for t in np.linspace(0, 2 * math.pi, 8, endpoint=False)]
        for s in stats[1:]:
            assert (s.mean_n, s.n2) == pytest.approx((stats[0].mean_n, stats[0].n2), rel=1e-10)

    @pytest.mark.slow
    def test_cross_agreement_converged_box(self):
        # |alpha| <= 1, r <= 0.5, tau <= 0.5: cutoff 60 converges throughout
        for case in draw_cases(7, 6, Box(1.0, 0.5, 0.5), 0):
            e = fock_expectations(fock_tfd_state(case.spec, case.t, 60), case.spec.osc)
            g = reduce_physical(gaussian_tfd_state(case.spec, case.t))
            got = [e.mean_x, e.mean_p, e.x2 - e.mean_x**2, e.p2 - e.mean_p**2]
            np.testing.assert_allclose(got, [g.mean[0], g.mean[1], g.cov[0, 0], g.cov[1, 1]], atol=1e-6)

    @pytest.mark.slow
    @pytest.mark.xfail(strict=True, raises=FockConvergenceError, reason="tail weight beyond 60 photons exceeds 1e-6 in this box")
    def test_cross_agreement_documented_box(self):
        osc = UNIT
        rng = np.random.default_rng(3)
        for _ in range(6):
            a = rng.uniform(0, 1.5) * np.exp(2j * math.pi * rng.uniform())
            spec = angle_spec(a, rng.uniform(0, 1.0), rng.uniform(0, 2 * math.pi), *rng.uniform(0, 0.8, 2))
            e = fock_expectations(fock_tfd_state(spec, 0.5, 60), osc)
            g = reduce_physical(gaussian_tfd_state(spec, 0.5))
            assert abs(e.x2 - e.mean_x**2 - g.cov[0, 0]) <= 1e-6


class TestFockWavefunction:
    def test_vacuum_origin(self):
        osc = OscillatorParams(2.0, 1.5, 0.5)
        s = fock_tfd_state(StateSpec(osc=osc), 0.0, 8)
        val = wavefunction_from_fock(s, osc, 0.0, 0.0)
        assert val == pytest.approx(math.sqrt(osc.m * osc.omega / osc.hbar / math.pi), rel=1e-15)

    def test_first_excited_is_odd(self):
        amp = np.zeros((9, 9), complex)
        amp[1, 0] = 1
        s = FockState(8, amp, 0.0)
        assert wavefunction_from_fock(s, UNIT, 0.0, 0.7) == 0
        assert wavefunction_from_fock(s, UNIT, 0.5, 0.7) == pytest.approx(-wavefunction_from_fock(s, UNIT, -0.5, 0.7))

    def test_hermite_normalization(self):
        from tdsts.oracle.fock import hermite_table

        osc = OscillatorParams(0.7, 1.9, 1.3)
        xs = np.linspace(-12, 12, 4001) * osc.length_scale
        table = hermite_table(30, xs, osc)
        from scipy.integrate import simpson

        gram = simpson(table[:, None, :] * table[None, :, :], x=xs)
        np.testing.assert_allclose(gram, np.eye(31), atol=1e-10)

    def test_warns_beyond_turning_point(self):
        s = fock_tfd_state(StateSpec(), 0.0, 8)
        with pytest.warns(TruncationWarning):
            wavefunction_from_fock(s, UNIT, 4.1, 0.0)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            wavefunction_from_fock(s, UNIT, 3.9, -3.9)


class TestQuadrature:
    def test_unit_gaussian(self):
        f = lambda x: np.exp(-(x**2) / 2) / math.sqrt(2 * math.pi)  # noqa: E731
        assert quad_integrate(f, 0.0, 1.0, 10, 2001) == pytest.approx(1, abs=1e-12)
        assert quad_integrate(lambda x: x**2 * f(x), 0.0, 1.0, 10, 2001) == pytest.approx(1, abs=1e-10)
        h = quad_integrate(lambda x: -f(x) * np.log(f(x)), 0.0, 1.0, 10, 2001)
        assert h == pytest.approx(0.5 * math.log(2 * math.pi * math.e), abs=1e-8)
        assert h == pytest.approx(1.4189385, abs=1e-7)

    @pytest.mark.parametrize("kw", [{"points": 2000}, {"points": 99}, {"halfwidth_sigmas": 7.9}])
    def test_argument_contract(self, kw):
        with pytest.raises(ValueError):
            quad_integrate(np.exp, 0.0, 1.0, **kw)

    def test_non_finite(self):
        with pytest.raises(IntegrationError), np.errstate(divide="ignore"):
            quad_integrate(lambda x: 1 / x, 0.0, 1.0, 10, 101)
