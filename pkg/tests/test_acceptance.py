"""Acceptance gate: one test per release criterion, tolerances pinned here.

Each test prints a single ``ACCEPTANCE n <name>: PASS/FAIL`` line; run
``pytest -s tests/test_acceptance.py`` to see them on a green suite.
"""

import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

from adiashort import (
    KET1,
    REFERENCE_KAPPA0,
    CouplingSchedule,
    IntegratorSettings,
    PlainGaussianParams,
    RescalingParams,
    SweepSpec,
    WaveState,
    compare_models,
    dark_state,
    hamiltonian_at,
    make_schedule,
    matched_wave_parameters,
    propagate,
    propagate_hamiltonian,
    propagate_waves,
    rescaling_map,
    rescaling_rate,
    sweep_contraction,
)
from adiashort.cli import main
from adiashort.profiles import GAUSSIAN_APPROX, TIME_RESCALED, coupling_pair
from adiashort.dynamics import _hamiltonian_samples

BASE = PlainGaussianParams()  # kappa0=1, d=8, s=80/6, L=80
GOLDEN_DIR = Path(__file__).parent / "golden"


@contextmanager
def criterion(number: int, name: str):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number} {name}: FAIL")
        raise
    print(f"ACCEPTANCE {number} {name}: PASS")


@pytest.fixture(scope="module")
def plain_run():
    return propagate(KET1, CouplingSchedule.plain(BASE))


def test_criterion_1_shortcut_equivalence():
    with criterion(1, "shortcut equivalence"):
        start = time.perf_counter()
        for a in (2.0, 5.0, 10.0):
            resc = RescalingParams(a=a, L=BASE.L)
            for delta in (0.0, BASE.kappa0):
                tr_sched = CouplingSchedule.time_rescaled(BASE, resc, delta0=delta)
                tr = propagate(KET1, tr_sched)
                # propagate the plain system on the image grid, so the
                # reference is sampled exactly at f(zeta_k)
                plain_sched = CouplingSchedule.plain(BASE, delta0=delta)
                settings = IntegratorSettings()
                zeta = np.linspace(0.0, resc.contracted_length, settings.n_steps + 1)
                mapped = np.asarray(rescaling_map(zeta, resc))
                mapped[0], mapped[-1] = 0.0, BASE.L
                _, plain_states = propagate_hamiltonian(
                    KET1,
                    lambda zs: _hamiltonian_samples(np.clip(zs, 0.0, BASE.L), plain_sched, 0.0),
                    mapped,
                    sample_stride=settings.sample_stride,
                )
                deviation = np.linalg.norm(tr.states - plain_states, axis=1).max()
                assert deviation <= 1e-6, f"a={a} delta={delta}: {deviation}"
        elapsed = time.perf_counter() - start
        assert elapsed < 5.0, f"equivalence block took {elapsed:.2f}s"


def test_criterion_2_gaussian_approx_fidelity_floor():
    with criterion(2, "simplified-profile fidelity floor"):
        start = time.perf_counter()
        spec = SweepSpec(
            a_values=tuple(float(a) for a in range(1, 11)),
            delta_values=(0.0, BASE.kappa0),
            schedule_kind=GAUSSIAN_APPROX,
            base=BASE,
        )
        result = sweep_contraction(spec)
        worst = min(row.fidelity for row in result.rows)
        assert worst > 0.995, f"minimum fidelity {worst}"
        elapsed = time.perf_counter() - start
        assert elapsed < 30.0, f"sweep took {elapsed:.2f}s"


def test_criterion_3_contracted_length():
    with criterion(3, "contracted length"):
        sched = make_schedule(TIME_RESCALED, BASE, a=10.0)
        assert sched.length == 8.0  # exactly L/a
        result = propagate(KET1, sched)
        assert result.z_grid[-1] == 8.0
        assert result.final_fidelity >= 0.99


def test_criterion_4_peak_amplification():
    with criterion(4, "peak amplification"):
        for a in (2.0, 5.0, 10.0):
            resc = RescalingParams(a=a, L=BASE.L)
            z = np.linspace(0.0, resc.contracted_length, 40001)
            rate = np.asarray(rescaling_rate(z, resc))
            assert abs(rate.max() - (2 * a - 1)) <= 1e-9
            assert abs(rescaling_rate(BASE.L / (2 * a), resc) - (2 * a - 1)) <= 1e-9
            k1, _ = coupling_pair(z, CouplingSchedule.time_rescaled(BASE, resc))
            peak = (2 * a - 1) * BASE.kappa0
            lower = peak * np.exp(-(BASE.d / BASE.s) ** 2) * 0.9
            assert lower <= k1.max() <= peak


def test_criterion_5_plain_transfer(plain_run):
    with criterion(5, "plain adiabatic transfer"):
        assert plain_run.final_fidelity >= 0.99
        assert plain_run.populations[:, 1].max() < 0.05
        idx_65 = np.searchsorted(plain_run.z_grid, 65.0)
        assert plain_run.populations[idx_65, 2] >= 0.95


def test_criterion_6_dark_state_identity():
    with criterion(6, "dark-state identity"):
        z_samples = np.linspace(0.0, BASE.L, 100)
        for delta in (0.0, BASE.kappa0):
            sched = CouplingSchedule.plain(BASE, delta0=delta)
            for z in z_samples:
                h = hamiltonian_at(float(z), sched, delta2=0.0)
                n0 = dark_state(float(z), sched).as_array()
                assert np.linalg.norm(h @ n0) < 1e-12


def test_criterion_7_numerical_integrity(plain_run):
    with criterion(7, "numerical integrity"):
        assert plain_run.max_norm_drift <= 1e-9
        for a in (2.0, 10.0):
            for kind in (TIME_RESCALED, GAUSSIAN_APPROX):
                run = propagate(KET1, make_schedule(kind, BASE, a=a, delta0=BASE.kappa0))
                assert run.max_norm_drift <= 1e-9

        k = BASE.kappa0 * np.exp(-(BASE.d / BASE.s) ** 2)
        h0 = np.array([[0.0, k, 0.0], [k, 0.3, k], [0.0, k, 0.1]])
        w, v = np.linalg.eigh(h0)
        exact = v @ (np.exp(-1j * w * 80.0) * (v.conj().T @ KET1.as_array()))

        def rk4_error(n):
            grid = np.linspace(0.0, 80.0, n + 1)
            _, states = propagate_hamiltonian(
                KET1, lambda zs: np.broadcast_to(h0, (len(zs), 3, 3)), grid, sample_stride=n
            )
            return np.abs(states[-1] - exact).max()

        assert rk4_error(20000) <= 1e-9
        ratio = rk4_error(400) / rk4_error(800)
        assert 8.0 <= ratio <= 32.0, f"step-halving error ratio {ratio}"


def test_criterion_8_coupled_wave_oracle():
    with criterion(8, "coupled-wave oracle"):
        reference = CouplingSchedule.plain(PlainGaussianParams(kappa0=REFERENCE_KAPPA0))
        params = matched_wave_parameters(reference)
        traj = propagate_waves(WaveState(1.0e7, 0.0, 0.0, 2.0e8), params)
        assert traj.total_flux_drift <= 1e-8
        assert traj.flux_difference_drift <= 1e-8
        assert traj.energy_drift <= 1e-8

        report = compare_models(reference, params)
        assert report.model_conversion >= 0.99
        assert report.wave_conversion >= 0.99

        weak = CouplingSchedule.plain(PlainGaussianParams(kappa0=REFERENCE_KAPPA0 / 100.0))
        control = compare_models(weak, matched_wave_parameters(weak))
        assert control.model_conversion < 0.5
        assert control.wave_conversion < 0.5
        assert np.isfinite(control.max_discrepancy)


def test_criterion_9_cli_determinism(tmp_path):
    with criterion(9, "cli determinism and exit codes"):
        # repeated default runs are byte-identical and match the golden files
        for command in ("propagate", "sweep"):
            first = tmp_path / f"{command}_one"
            second = tmp_path / f"{command}_two"
            assert main([command, "--out", str(first)]) == 0
            assert main([command, "--out", str(second)]) == 0
            blob = first.with_suffix(".csv").read_bytes()
            assert blob == second.with_suffix(".csv").read_bytes()
            assert blob == (GOLDEN_DIR / f"{command}.csv").read_bytes()
        # exit-code contract: 0 success, 1 runtime/IO failure, 2 usage error
        assert main(["propagate", "--a", "0.5"]) == 2
        assert main(["propagate", "--no-such-flag"]) == 2
        assert main(
            ["propagate", "--steps", "200", "--stride", "50",
             "--out", str(tmp_path / "nope" / "deep" / "x")]
        ) == 1
