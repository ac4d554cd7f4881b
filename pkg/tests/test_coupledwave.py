"""Nonlinear cascade oracle: conservation laws and model comparison."""

import numpy as np
import pytest

from adiashort import (
    REFERENCE_KAPPA0,
    CouplingSchedule,
    IntegratorSettings,
    PlainGaussianParams,
    RescalingParams,
    ValidationError,
    WaveParameters,
    WaveState,
    compare_models,
    envelope_transform,
    manley_rowe_invariants,
    matched_wave_parameters,
    photon_fluxes,
    propagate_waves,
    wave_rhs,
)

REF_BASE = PlainGaussianParams(kappa0=REFERENCE_KAPPA0)
REF_SCHED = CouplingSchedule.plain(REF_BASE)
FAST = IntegratorSettings(n_steps=4000, sample_stride=40)


def make_params(chi1_peak=1e-11, chi2_peak=1e-12, dk1=0.0, dk2=0.0, length=80.0):
    """Hand-built parameters with Gaussian gratings, no schedule matching."""
    omega_p = 2 * np.pi * 2.99792458e8 / 1.55e-6

    def chi1(z):
        return chi1_peak * np.exp(-((np.asarray(z, dtype=float) - 48.0) ** 2) / 178.0)

    def chi2(z):
        return chi2_peak * np.exp(-((np.asarray(z, dtype=float) - 32.0) ** 2) / 178.0)

    return WaveParameters.from_pump(
        omega_p, 0.05 * omega_p, chi1=chi1, chi2=chi2, dk1=dk1, dk2=dk2, length=length
    )


def flux_derivatives(z, state, p):
    """d(photon flux)/dz via the chain rule on wave_rhs."""
    d = wave_rhs(z, state, p).as_array()
    a = state.as_array()
    n = np.array([p.n_p, p.n_2, p.n_plus, p.n_minus])
    w = np.array([p.omega_p, p.omega_2, p.omega_plus, p.omega_minus])
    return 2.0 * n * (a.conjugate() * d).real / w


def test_rhs_zero_state_gives_zero():
    p = make_params()
    d = wave_rhs(10.0, WaveState(0.0, 0.0, 0.0, 0.0), p).as_array()
    np.testing.assert_array_equal(d, np.zeros(4))


def test_rhs_structure_without_harmonic():
    # every pump and sideband source term carries A_2
    p = make_params()
    d = wave_rhs(40.0, WaveState(1e7, 0.0, 3e5, 2e8), p)
    assert d.A_p == 0.0
    assert d.A_plus == 0.0
    assert d.A_minus == 0.0
    assert d.A_2 != 0.0


def test_manley_rowe_cancellation_in_rhs():
    rng = np.random.RandomState(3)
    p = make_params(dk1=0.2, dk2=-0.35)
    for _ in range(25):
        amps = rng.normal(size=4) * 1e7 + 1j * rng.normal(size=4) * 1e7
        state = WaveState(*amps)
        z = rng.uniform(0.0, 80.0)
        dn = flux_derivatives(z, state, p)
        scale = np.abs(dn).max() + 1e-30
        # two pump photons per harmonic photon; sidebands created in pairs
        assert abs(dn[0] + 2 * dn[1] + dn[2] + dn[3]) / scale < 1e-12
        assert abs(dn[2] - dn[3]) / scale < 1e-12
        w = np.array([p.omega_p, p.omega_2, p.omega_plus, p.omega_minus])
        assert abs(np.dot(w, dn)) / (np.abs(w * dn).max() + 1e-30) < 1e-12


def test_trajectory_conserves_invariants():
    params = matched_wave_parameters(REF_SCHED)
    initial = WaveState(1e7, 0.0, 0.0, 2e8)
    traj = propagate_waves(initial, params, FAST)
    assert traj.total_flux_drift <= 1e-8
    assert traj.flux_difference_drift <= 1e-8
    assert traj.energy_drift <= 1e-8
    start, diff, energy = manley_rowe_invariants(initial, params)
    end, diff_end, energy_end = manley_rowe_invariants(traj.final_state, params)
    assert end == pytest.approx(start, rel=1e-8)
    assert diff_end == pytest.approx(diff, abs=1e-8 * start)
    assert energy_end == pytest.approx(energy, rel=1e-8)


def test_zero_input_stays_zero():
    params = matched_wave_parameters(REF_SCHED)
    traj = propagate_waves(WaveState(0.0, 0.0, 0.0, 0.0), params, FAST)
    np.testing.assert_array_equal(traj.amplitudes, np.zeros_like(traj.amplitudes))


def test_shg_only_reduction():
    # with the second grating off and no sidebands, the sidebands stay
    # exactly zero and the pump/harmonic pair conserves N_p + 2 N_2
    p = make_params(chi1_peak=2e-11, chi2_peak=0.0)
    traj = propagate_waves(WaveState(1e7, 0.0, 0.0, 0.0), p, FAST)
    np.testing.assert_array_equal(traj.amplitudes[:, 2], np.zeros(len(traj.z_grid)))
    np.testing.assert_array_equal(traj.amplitudes[:, 3], np.zeros(len(traj.z_grid)))
    pair = traj.fluxes[:, 0] + 2.0 * traj.fluxes[:, 1]
    assert np.abs(pair - pair[0]).max() / pair[0] <= 1e-8
    # some actual conversion happened, so the check is not vacuous
    assert traj.fluxes[-1, 1] > 0.01 * traj.fluxes[0, 0]


def test_envelope_transform_gauge():
    p = make_params(dk1=0.31, dk2=-0.12)
    state = WaveState(1e7 + 2e6j, 3e6 - 1e6j, 4e5, 2e8 + 5e6j)
    for z in (0.0, 13.7, 80.0):
        out = envelope_transform(state, z, p)
        np.testing.assert_allclose(
            np.abs(out.as_array()), np.abs(state.as_array()), rtol=1e-12
        )
    assert envelope_transform(state, 0.0, p) == state
    matched = make_params(dk1=0.0, dk2=0.0)
    assert envelope_transform(state, 55.0, matched) == state


def test_wave_parameters_validation():
    with pytest.raises(ValidationError):
        WaveParameters(
            omega_p=1.0, omega_2=2.5, omega_plus=1.5, omega_minus=1.0,
            n_p=2.2, n_2=2.3, n_plus=2.2, n_minus=2.2,
            chi1=lambda z: 0.0, chi2=lambda z: 0.0,
        )
    with pytest.raises(ValidationError):
        WaveParameters(
            omega_p=1.0, omega_2=2.0, omega_plus=1.5, omega_minus=0.6,
            n_p=2.2, n_2=2.3, n_plus=2.2, n_minus=2.2,
            chi1=lambda z: 0.0, chi2=lambda z: 0.0,
        )
    with pytest.raises(ValidationError):
        WaveParameters(
            omega_p=-1.0, omega_2=-2.0, omega_plus=-0.5, omega_minus=-1.5,
            n_p=2.2, n_2=2.3, n_plus=2.2, n_minus=2.2,
            chi1=lambda z: 0.0, chi2=lambda z: 0.0,
        )


def test_photon_flux_values():
    p = make_params()
    state = WaveState(2.0, 0.0, 0.0, 0.0)
    flux = photon_fluxes(state, p)
    assert flux[0] == pytest.approx(p.n_p * 4.0 / p.omega_p, rel=1e-15)
    assert flux[1] == flux[2] == flux[3] == 0.0


def test_compare_models_reference_configuration():
    params = matched_wave_parameters(REF_SCHED)
    report = compare_models(REF_SCHED, params)
    assert report.model_conversion >= 0.99
    assert report.wave_conversion >= 0.99
    assert report.wave_trajectory.total_flux_drift <= 1e-8
    # fractions are a partition of unity on the aligned grid
    np.testing.assert_allclose(report.wave_fractions.sum(axis=1), 1.0, atol=1e-12)
    assert report.z_grid.shape[0] == report.wave_fractions.shape[0]


def test_compare_models_negative_control():
    weak = CouplingSchedule.plain(PlainGaussianParams(kappa0=REFERENCE_KAPPA0 / 100.0))
    params = matched_wave_parameters(weak)
    report = compare_models(weak, params)
    assert report.model_conversion < 0.5
    assert report.wave_conversion < 0.5
    assert np.isfinite(report.max_discrepancy)


def test_compare_models_zero_coupling():
    sched = CouplingSchedule.plain(PlainGaussianParams(kappa0=0.0))
    params = matched_wave_parameters(sched)
    report = compare_models(sched, params, FAST)
    assert report.max_discrepancy == 0.0
    assert report.model_conversion == 0.0
    assert report.wave_conversion == 0.0


def test_compare_models_regime_validation():
    params = matched_wave_parameters(REF_SCHED, 1e7, 5e7)
    with pytest.raises(ValidationError):
        compare_models(REF_SCHED, params, FAST, pump_amplitude=1e7, reference_amplitude=5e7)


def test_compare_models_domain_mismatch_rejected():
    short = CouplingSchedule.time_rescaled(REF_BASE, RescalingParams(a=2.0, L=80.0))
    params = matched_wave_parameters(REF_SCHED)
    with pytest.raises(ValidationError):
        compare_models(short, params, FAST)
