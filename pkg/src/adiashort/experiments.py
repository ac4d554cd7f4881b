"""Scripted runs: conversion traces, fidelity sweeps, adiabaticity reports.

These are the batch entry points behind the CLI.  Every function here is
deterministic: the same inputs produce bit-identical outputs, which the
CSV golden files rely on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dynamics import (
    DEFAULT_SETTINGS,
    KET1,
    IntegratorSettings,
    PropagationResult,
    _adiabaticity_samples,
    max_intermediate_population,
    propagate,
)
from .errors import ValidationError
from .profiles import (
    GAUSSIAN_APPROX,
    PLAIN,
    TIME_RESCALED,
    CouplingSchedule,
    PlainGaussianParams,
    RescalingParams,
    coupling_pair,
    detuning_at,
)

#: Contraction values covering the illustrated shortcut range.
DEFAULT_SWEEP_A = (1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0)


def make_schedule(
    kind: str,
    base: PlainGaussianParams,
    a: float = 1.0,
    delta0: float = 0.0,
    modulate_detuning: bool = True,
) -> CouplingSchedule:
    """Build any schedule variant from flat parameters."""
    if kind == PLAIN:
        return CouplingSchedule.plain(base, delta0)
    rescaling = RescalingParams(a=a, L=base.L)
    if kind == TIME_RESCALED:
        return CouplingSchedule.time_rescaled(base, rescaling, delta0, modulate_detuning)
    if kind == GAUSSIAN_APPROX:
        return CouplingSchedule.gaussian_approx(base, rescaling, delta0, modulate_detuning)
    raise ValidationError(f"unknown schedule kind {kind!r}")


@dataclass(frozen=True)
class TraceResult:
    """Propagation result with schedule samples on the same grid."""

    z_grid: np.ndarray
    kappa1: np.ndarray
    kappa3: np.ndarray
    delta_eff: np.ndarray
    result: PropagationResult

    def table(self) -> tuple[list[str], list[np.ndarray]]:
        """Column names and arrays in the trace CSV schema."""
        r = self.result
        return (
            ["z_mm", "kappa1", "kappa3", "delta_eff",
             "pop1", "pop2", "pop3", "adiabaticity_ratio"],
            [self.z_grid, self.kappa1, self.kappa3, self.delta_eff,
             r.populations[:, 0], r.populations[:, 1], r.populations[:, 2],
             r.adiabaticity_trace],
        )


def run_trace(
    sched: CouplingSchedule,
    settings: IntegratorSettings = DEFAULT_SETTINGS,
) -> TraceResult:
    """Propagate from |1> and align coupling samples with the state grid."""
    result = propagate(KET1, sched, delta2=0.0, settings=settings)
    k1, k3 = coupling_pair(result.z_grid, sched)
    de = detuning_at(result.z_grid, sched)
    return TraceResult(result.z_grid, k1, k3, np.asarray(de), result)


@dataclass(frozen=True)
class SweepSpec:
    """Grid of contraction parameters and mismatches for one schedule kind."""

    a_values: tuple
    delta_values: tuple
    schedule_kind: str = GAUSSIAN_APPROX
    base: PlainGaussianParams = PlainGaussianParams()
    settings: IntegratorSettings = DEFAULT_SETTINGS
    modulate_detuning: bool = True

    def __post_init__(self):
        if len(self.a_values) == 0 or len(self.delta_values) == 0:
            raise ValidationError("sweep requires non-empty a and delta lists")
        if any(a < 1.0 for a in self.a_values):
            raise ValidationError("all contraction parameters must be >= 1")
        if self.schedule_kind not in (PLAIN, TIME_RESCALED, GAUSSIAN_APPROX):
            raise ValidationError(f"unknown schedule kind {self.schedule_kind!r}")


@dataclass(frozen=True)
class SweepRow:
    a: float
    delta: float
    fidelity: float
    max_pop2: float
    length_mm: float


@dataclass(frozen=True)
class SweepResult:
    rows: tuple

    def table(self) -> tuple[list[str], list[np.ndarray]]:
        """Column names and arrays in the sweep CSV schema."""
        cols = ["a", "delta", "fidelity", "max_pop2", "length_mm"]
        arrays = [np.array([getattr(r, f) for r in self.rows])
                  for f in ("a", "delta", "fidelity", "max_pop2", "length_mm")]
        return cols, arrays


def sweep_contraction(spec: SweepSpec) -> SweepResult:
    """One propagation per (a, delta) pair; rows sorted by (delta, a)."""
    rows = []
    for delta in sorted(spec.delta_values):
        for a in sorted(spec.a_values):
            sched = make_schedule(
                spec.schedule_kind, spec.base, a, delta, spec.modulate_detuning
            )
            result = propagate(KET1, sched, delta2=0.0, settings=spec.settings)
            rows.append(
                SweepRow(
                    a=float(a),
                    delta=float(delta),
                    fidelity=result.final_fidelity,
                    max_pop2=max_intermediate_population(result),
                    length_mm=sched.length,
                )
            )
    return SweepResult(rows=tuple(rows))


#: Couplings below kappa0 * this fraction are excluded from the
#: adiabaticity maximum (the angle is meaningless in the vacuous tails).
ADIABATICITY_GUARD_FRACTION = 1e-3


@dataclass(frozen=True)
class AdiabaticityReport:
    """Profile of |d theta/dz| / kappa with its guarded maximum."""

    z_grid: np.ndarray
    ratio: np.ndarray
    max_ratio: float
    guard_level: float


def adiabaticity_report(
    sched: CouplingSchedule,
    settings: IntegratorSettings = DEFAULT_SETTINGS,
) -> AdiabaticityReport:
    """Evaluate the adiabaticity ratio on a dense grid.

    The maximum is taken only where the rms coupling exceeds
    ``kappa0 * ADIABATICITY_GUARD_FRACTION``; with a zero-amplitude
    schedule nothing qualifies and the maximum is NaN.
    """
    z = np.linspace(0.0, sched.length, settings.n_steps + 1)
    ratio = _adiabaticity_samples(z, sched)
    k1, k3 = coupling_pair(z, sched)
    guard = sched.base.kappa0 * ADIABATICITY_GUARD_FRACTION
    mask = np.hypot(k1, k3) > guard
    max_ratio = float(np.nanmax(ratio[mask])) if np.any(mask) else float("nan")
    return AdiabaticityReport(z_grid=z, ratio=ratio, max_ratio=max_ratio, guard_level=guard)
