"""Full nonlinear four-field cascade: the independent physical oracle.

Propagates the classical envelope equations for the pump, its second
harmonic and the generated sideband pair through the two Gaussian
gratings, without any linearization.  Used to cross-check the three-level
model: photon-flux (Manley-Rowe) conservation is exact physics here, and
in the undepleted-reference regime the normalized fluxes should track the
model populations.

Conventions
-----------
* z in mm, angular frequencies in rad/s, refractive indices
  dimensionless, susceptibility profiles chi(z) in m/V, amplitudes in
  V/m.  Rates chi * omega / (n * c) are converted to 1/mm internally.
* The second-harmonic source term of the pump pair carries a factor 1/2
  relative to the printed cascade equations.  Without it the equations
  conserve N_p + N_2 instead of the physical N_p + 2 N_2 (two pump
  photons per harmonic photon); the 1/2 is the standard choice for a
  degenerate pair interaction and is what makes the Manley-Rowe
  invariants below hold exactly.
* Photon fluxes are computed as N_j = n_j |A_j|^2 / omega_j, dropping the
  constant eps0*c/(2*hbar) factor common to all fields.

Model matching
--------------
:func:`matched_wave_parameters` builds gratings whose flux-normalized
coupling rates reproduce a given schedule:

* 2-3 leg:  gamma2(z) * u_minus(0) = kappa3(z), where
  gamma2 = (chi2/c) sqrt(omega_2 omega_+ omega_- / (n_2 n_+ n_-)) and
  u_j = sqrt(n_j/omega_j) A_j is the flux amplitude.
* 1-2 leg:  gamma1(z) * u_p(0) = sqrt(2) * kappa1(z), where
  gamma1 = (chi1/c) (omega_p/n_p) sqrt(omega_2/n_2).  The sqrt(2) makes
  the small-signal harmonic growth rate of the pump pair equal to the
  model's kappa1; it is the classical face of the bosonic pair factor.

With this matching, the documented reference configuration (plain
schedule with kappa0 = 12/mm, amplitude ratio 20) converts 99.2% of the
pump flux classically while the three-level model reaches 99.998%.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dynamics import KET1, DEFAULT_SETTINGS, IntegratorSettings, propagate
from .errors import NumericalFailureError, ValidationError
from .profiles import CouplingSchedule, coupling_pair

SPEED_OF_LIGHT = 299792458.0  # m/s

#: Documented placeholder material: telecom pump in a chi(2) crystal.
DEFAULT_PUMP_WAVELENGTH = 1.550e-6  # m
DEFAULT_SPLITTING_FRACTION = 0.05  # Omega / omega_p
DEFAULT_INDICES = (2.20, 2.30, 2.21, 2.19)  # n_p, n_2, n_plus, n_minus
DEFAULT_PUMP_AMPLITUDE = 1.0e7  # V/m
DEFAULT_REFERENCE_RATIO = 20.0

#: Reference comparison configuration: plain-schedule kappa0 at which both
#: simulators exceed 99% conversion (measured 0.9916 classical).
REFERENCE_KAPPA0 = 12.0


@dataclass(frozen=True)
class WaveParameters:
    """Frequencies, indices, grating profiles and mismatches of the cascade.

    ``chi1``/``chi2`` are vectorizable callables z (mm) -> chi (m/V) for
    the harmonic-generation and difference-frequency gratings.  Exact
    relations ``omega_2 == 2 omega_p`` and
    ``omega_plus + omega_minus == omega_2`` are enforced; use
    :meth:`from_pump` to construct values that satisfy them by definition.
    """

    omega_p: float
    omega_2: float
    omega_plus: float
    omega_minus: float
    n_p: float
    n_2: float
    n_plus: float
    n_minus: float
    chi1: Callable
    chi2: Callable
    dk1: float = 0.0
    dk2: float = 0.0
    length: float = 80.0

    def __post_init__(self):
        for name in ("omega_p", "omega_2", "omega_plus", "omega_minus",
                     "n_p", "n_2", "n_plus", "n_minus"):
            if not getattr(self, name) > 0.0:
                raise ValidationError(f"{name} must be positive")
        if self.omega_2 != 2.0 * self.omega_p:
            raise ValidationError("omega_2 must equal 2*omega_p exactly")
        if self.omega_plus + self.omega_minus != self.omega_2:
            raise ValidationError("omega_plus + omega_minus must equal omega_2 exactly")
        if not self.length > 0.0:
            raise ValidationError("length must be positive")

    @classmethod
    def from_pump(
        cls,
        omega_p: float,
        splitting: float,
        indices=DEFAULT_INDICES,
        chi1: Callable = lambda z: np.zeros_like(np.asarray(z, dtype=float)),
        chi2: Callable = lambda z: np.zeros_like(np.asarray(z, dtype=float)),
        dk1: float = 0.0,
        dk2: float = 0.0,
        length: float = 80.0,
    ) -> "WaveParameters":
        """Build parameters from the pump frequency and sideband splitting.

        ``omega_minus`` is defined as ``omega_2 - omega_plus`` so the sum
        rule holds exactly in floating point.
        """
        omega_2 = 2.0 * omega_p
        omega_plus = omega_p + splitting
        omega_minus = omega_2 - omega_plus
        n_p, n_2, n_plus, n_minus = indices
        return cls(
            omega_p, omega_2, omega_plus, omega_minus,
            n_p, n_2, n_plus, n_minus, chi1, chi2, dk1, dk2, length,
        )


@dataclass(frozen=True)
class WaveState:
    """Complex envelopes of the four fields (V/m)."""

    A_p: complex
    A_2: complex
    A_plus: complex
    A_minus: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.A_p, self.A_2, self.A_plus, self.A_minus], dtype=complex)

    @classmethod
    def from_array(cls, v) -> "WaveState":
        v = np.asarray(v, dtype=complex)
        return cls(complex(v[0]), complex(v[1]), complex(v[2]), complex(v[3]))


def _omegas(p: WaveParameters) -> np.ndarray:
    return np.array([p.omega_p, p.omega_2, p.omega_plus, p.omega_minus])


def _indices(p: WaveParameters) -> np.ndarray:
    return np.array([p.n_p, p.n_2, p.n_plus, p.n_minus])


def photon_fluxes(state: WaveState, p: WaveParameters) -> np.ndarray:
    """Photon fluxes (n_j |A_j|^2 / omega_j) for (pump, harmonic, +, -)."""
    return _indices(p) * np.abs(state.as_array()) ** 2 / _omegas(p)


def manley_rowe_invariants(state: WaveState, p: WaveParameters) -> tuple[float, float, float]:
    """The three conserved combinations (two independent given omega_2 = 2 omega_p).

    Returns ``(N_p + 2 N_2 + N_+ + N_-, N_+ - N_-, sum_j omega_j N_j)``.
    """
    n = photon_fluxes(state, p)
    total = n[0] + 2.0 * n[1] + n[2] + n[3]
    diff = n[2] - n[3]
    energy = float((_omegas(p) * n).sum())
    return float(total), float(diff), energy


def _rate_constants(p: WaveParameters) -> tuple[float, float, float, float, float]:
    """Per-field rate prefactors omega/(n c) in 1/mm per (m/V * V/m)."""
    to_mm = 1.0e-3 / SPEED_OF_LIGHT
    g_p = p.omega_p / p.n_p * to_mm
    g_2shg = p.omega_2 / (2.0 * p.n_2) * to_mm  # 1/2: degenerate-pair source
    g_2dfg = p.omega_2 / p.n_2 * to_mm
    g_plus = p.omega_plus / p.n_plus * to_mm
    g_minus = p.omega_minus / p.n_minus * to_mm
    return g_p, g_2shg, g_2dfg, g_plus, g_minus


def wave_rhs(z: float, state: WaveState, p: WaveParameters) -> WaveState:
    """dA/dz for all four envelopes at position ``z``."""
    g_p, g_2shg, g_2dfg, g_plus, g_minus = _rate_constants(p)
    x1 = float(p.chi1(z))
    x2 = float(p.chi2(z))
    e1 = np.exp(1j * p.dk1 * z)
    e2 = np.exp(1j * p.dk2 * z)
    ap, a2, apl, amn = state.A_p, state.A_2, state.A_plus, state.A_minus
    d_ap = -1j * g_p * x1 * a2 * np.conj(ap) * e1
    d_a2 = -1j * (g_2shg * x1 * ap * ap / e1 + g_2dfg * x2 * apl * amn / e2)
    d_apl = -1j * g_plus * x2 * a2 * np.conj(amn) * e2
    d_amn = -1j * g_minus * x2 * a2 * np.conj(apl) * e2
    return WaveState(d_ap, d_a2, d_apl, d_amn)


@dataclass(frozen=True)
class WaveTrajectory:
    """Sampled solution of the nonlinear cascade.

    ``fluxes`` holds photon fluxes per sample; the drift fields are the
    worst relative excursions of the three conserved combinations over
    the trajectory.
    """

    z_grid: np.ndarray
    amplitudes: np.ndarray
    fluxes: np.ndarray
    total_flux_drift: float
    flux_difference_drift: float
    energy_drift: float

    @property
    def final_state(self) -> WaveState:
        return WaveState.from_array(self.amplitudes[-1])


def _chi_samples(chi: Callable, z: np.ndarray) -> np.ndarray:
    vals = np.asarray(chi(z), dtype=float)
    if vals.shape != z.shape:
        vals = np.array([float(chi(zz)) for zz in z])
    return vals


def propagate_waves(
    initial: WaveState,
    p: WaveParameters,
    settings: IntegratorSettings = DEFAULT_SETTINGS,
) -> WaveTrajectory:
    """Fixed-step RK4 solution of the cascade on [0, p.length].

    The grating profiles and mismatch phases are precomputed on the step
    half-grid; the stepping itself runs on scalar complex arithmetic,
    which is the fast path for a four-component nonlinear system.
    """
    a0 = initial.as_array()
    if not np.all(np.isfinite(a0)):
        raise ValidationError("initial wave state contains non-finite amplitudes")

    n = settings.n_steps
    stride = settings.sample_stride
    half_grid = np.linspace(0.0, p.length, 2 * n + 1)
    x1 = _chi_samples(p.chi1, half_grid)
    x2 = _chi_samples(p.chi2, half_grid)
    g_p, g_2shg, g_2dfg, g_plus, g_minus = _rate_constants(p)
    # Plain-python complex scalars keep the sequential loop fast.
    c_p = (-1j * g_p * x1).tolist()
    c_2a = (-1j * g_2shg * x1).tolist()
    c_2b = (-1j * g_2dfg * x2).tolist()
    c_pl = (-1j * g_plus * x2).tolist()
    c_mn = (-1j * g_minus * x2).tolist()
    e1 = np.exp(1j * p.dk1 * half_grid).tolist()
    e2 = np.exp(1j * p.dk2 * half_grid).tolist()
    h = p.length / n

    def rhs(i, ap, a2, apl, amn):
        ph1 = e1[i]
        ph2 = e2[i]
        d_ap = c_p[i] * a2 * ap.conjugate() * ph1
        d_a2 = c_2a[i] * ap * ap / ph1 + c_2b[i] * apl * amn / ph2
        d_apl = c_pl[i] * a2 * amn.conjugate() * ph2
        d_amn = c_mn[i] * a2 * apl.conjugate() * ph2
        return d_ap, d_a2, d_apl, d_amn

    ap, a2, apl, amn = (complex(v) for v in a0)
    samples = [(ap, a2, apl, amn)]
    sample_steps = [0]
    h2 = h / 2.0
    h6 = h / 6.0
    for k in range(n):
        i0 = 2 * k
        im = i0 + 1
        i1 = i0 + 2
        k1 = rhs(i0, ap, a2, apl, amn)
        k2 = rhs(im, ap + h2 * k1[0], a2 + h2 * k1[1], apl + h2 * k1[2], amn + h2 * k1[3])
        k3 = rhs(im, ap + h2 * k2[0], a2 + h2 * k2[1], apl + h2 * k2[2], amn + h2 * k2[3])
        k4 = rhs(i1, ap + h * k3[0], a2 + h * k3[1], apl + h * k3[2], amn + h * k3[3])
        ap += h6 * (k1[0] + 2.0 * (k2[0] + k3[0]) + k4[0])
        a2 += h6 * (k1[1] + 2.0 * (k2[1] + k3[1]) + k4[1])
        apl += h6 * (k1[2] + 2.0 * (k2[2] + k3[2]) + k4[2])
        amn += h6 * (k1[3] + 2.0 * (k2[3] + k3[3]) + k4[3])
        if (k + 1) % stride == 0 or k + 1 == n:
            samples.append((ap, a2, apl, amn))
            sample_steps.append(k + 1)

    amps = np.asarray(samples, dtype=complex)
    bad = ~np.all(np.isfinite(amps), axis=1)
    if np.any(bad):
        first = int(sample_steps[int(np.argmax(bad))])
        raise NumericalFailureError(
            f"non-finite amplitude encountered by step {first}", step_index=first
        )

    fluxes = _indices(p)[None, :] * np.abs(amps) ** 2 / _omegas(p)[None, :]
    total = fluxes[:, 0] + 2.0 * fluxes[:, 1] + fluxes[:, 2] + fluxes[:, 3]
    diff = fluxes[:, 2] - fluxes[:, 3]
    energy = fluxes @ _omegas(p)
    scale = total[0] if total[0] > 0.0 else 1.0
    z_samples = np.asarray(sample_steps, dtype=float) * h
    z_samples[-1] = p.length
    return WaveTrajectory(
        z_grid=z_samples,
        amplitudes=amps,
        fluxes=fluxes,
        total_flux_drift=float(np.abs(total - total[0]).max() / scale),
        flux_difference_drift=float(np.abs(diff - diff[0]).max() / scale),
        energy_drift=float(np.abs(energy - energy[0]).max() / (energy[0] if energy[0] > 0 else 1.0)),
    )


def envelope_transform(state: WaveState, z: float, p: WaveParameters) -> WaveState:
    """Phase rotation into the detuning picture; magnitudes are unchanged.

    The harmonic picks up exp(i dk1 z) and the generated sidebands
    exp(i (dk1 - dk2) z / 2); the pump is untouched.  At z = 0, or with
    both mismatches zero, this is the identity.
    """
    ph2 = np.exp(1j * p.dk1 * z)
    phs = np.exp(1j * (p.dk1 - p.dk2) * z / 2.0)
    return WaveState(state.A_p, state.A_2 * ph2, state.A_plus * phs, state.A_minus * phs)


def _flux_amplitude(amplitude: float, n: float, omega: float) -> float:
    return float(np.sqrt(n / omega) * amplitude)


def matched_wave_parameters(
    sched: CouplingSchedule,
    pump_amplitude: float = DEFAULT_PUMP_AMPLITUDE,
    reference_amplitude: float | None = None,
    pump_wavelength: float = DEFAULT_PUMP_WAVELENGTH,
    splitting_fraction: float = DEFAULT_SPLITTING_FRACTION,
    indices=DEFAULT_INDICES,
    dk1: float = 0.0,
    dk2: float = 0.0,
) -> WaveParameters:
    """Grating profiles matched to a coupling schedule (see module docs).

    The mismatches default to zero, corresponding to a schedule with
    delta0 = 0; nonzero ``dk1``/`dk2`` reintroduce the explicit phases of
    the untransformed equations.
    """
    if reference_amplitude is None:
        reference_amplitude = DEFAULT_REFERENCE_RATIO * pump_amplitude
    omega_p = 2.0 * np.pi * SPEED_OF_LIGHT / pump_wavelength
    omega_2 = 2.0 * omega_p
    omega_plus = omega_p + splitting_fraction * omega_p
    omega_minus = omega_2 - omega_plus
    n_p, n_2, n_plus, n_minus = indices

    u_p0 = _flux_amplitude(pump_amplitude, n_p, omega_p)
    u_m0 = _flux_amplitude(reference_amplitude, n_minus, omega_minus)
    # 1/mm -> chi (m/V): invert the flux-normalized rate definitions.
    shg_scale = np.sqrt(2.0) * 1.0e3 * SPEED_OF_LIGHT * n_p / (
        omega_p * np.sqrt(omega_2 / n_2) * u_p0
    )
    dfg_scale = 1.0e3 * SPEED_OF_LIGHT / (
        np.sqrt(omega_2 * omega_plus * omega_minus / (n_2 * n_plus * n_minus)) * u_m0
    )

    def chi1(z):
        return coupling_pair(z, sched)[0] * shg_scale

    def chi2(z):
        return coupling_pair(z, sched)[1] * dfg_scale

    return WaveParameters.from_pump(
        omega_p,
        splitting_fraction * omega_p,
        indices=indices,
        chi1=chi1,
        chi2=chi2,
        dk1=dk1,
        dk2=dk2,
        length=sched.length,
    )


@dataclass(frozen=True)
class ModelComparison:
    """Aligned three-level vs coupled-wave run.

    ``wave_fractions`` are the pump-pair partitions
    (N_p, 2 N_2, 2 N_+) / (N_p + 2 N_2 + 2 N_+), which map the three
    basis states of the model exactly onto classical flux: all-pump gives
    (1,0,0), all-harmonic (0,1,0), fully converted (0,0,1).
    """

    z_grid: np.ndarray
    model_populations: np.ndarray
    wave_fractions: np.ndarray
    max_discrepancy: float
    model_conversion: float
    wave_conversion: float
    wave_trajectory: WaveTrajectory


def compare_models(
    sched: CouplingSchedule,
    p: WaveParameters,
    settings: IntegratorSettings = DEFAULT_SETTINGS,
    pump_amplitude: float = DEFAULT_PUMP_AMPLITUDE,
    reference_amplitude: float | None = None,
) -> ModelComparison:
    """Run both simulators on matched configurations and difference them.

    ``p`` should come from :func:`matched_wave_parameters` with the same
    amplitudes passed here.  Requires the undepleted-reference regime
    ``reference_amplitude >= 10 * pump_amplitude``.
    """
    if reference_amplitude is None:
        reference_amplitude = DEFAULT_REFERENCE_RATIO * pump_amplitude
    if not pump_amplitude > 0.0:
        raise ValidationError("pump amplitude must be positive")
    if reference_amplitude < 10.0 * pump_amplitude:
        raise ValidationError(
            "undepleted-reference regime requires reference amplitude >= 10x pump"
        )
    if p.length != sched.length:
        raise ValidationError("wave parameters and schedule cover different domains")

    model = propagate(KET1, sched, delta2=0.0, settings=settings)
    waves = propagate_waves(
        WaveState(pump_amplitude, 0.0, 0.0, reference_amplitude), p, settings
    )

    n = waves.fluxes
    pair_units = np.stack(
        [n[:, 0], 2.0 * n[:, 1], 2.0 * n[:, 2]], axis=1
    )
    fractions = pair_units / pair_units.sum(axis=1, keepdims=True)
    discrepancy = float(np.abs(model.populations - fractions).max())
    return ModelComparison(
        z_grid=model.z_grid,
        model_populations=model.populations,
        wave_fractions=fractions,
        max_discrepancy=discrepancy,
        model_conversion=model.final_fidelity,
        wave_conversion=float(fractions[-1, 2]),
        wave_trajectory=waves,
    )
