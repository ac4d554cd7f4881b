"""Coupling-coefficient schedules and the position-rescaling map.

Three schedule variants drive the three-level conversion model:

* ``plain``     -- two offset Gaussians on ``[0, L]``; the late-peaking
  coupling links states 1-2, the early-peaking one links 2-3
  (counterintuitive ordering).
* ``rescaled``  -- the plain schedule composed with the sinusoidal
  contraction map ``f`` and multiplied by ``f'``, on ``[0, L/a]``.
  This is the exact shortcut: it reproduces the plain evolution on the
  contracted domain.
* ``approx``    -- Gaussians of amplitude ``kappa0*(2a-1)`` with centers
  compressed by ``a``, an experimentally simpler stand-in for the exact
  rescaled profile.

All functions are pure and accept scalars or numpy arrays for ``z``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, UndefinedMixingAngleError, ValidationError

#: Default medium length in mm.
DEFAULT_LENGTH = 80.0

PLAIN = "plain"
TIME_RESCALED = "rescaled"
GAUSSIAN_APPROX = "approx"

_KINDS = (PLAIN, TIME_RESCALED, GAUSSIAN_APPROX)


@dataclass(frozen=True)
class PlainGaussianParams:
    """Parameters of the two plain Gaussian couplings.

    ``kappa1`` peaks at ``L/2 + d`` and ``kappa3`` at ``L/2 - d``, so the
    2-3 coupling precedes the 1-2 coupling along propagation.

    Parameters
    ----------
    kappa0 : float
        Peak coupling amplitude (1/mm).  Zero is accepted to allow
        free-evolution diagnostics.
    d : float
        Peak offset from the midpoint (mm), ``0 <= d < L/2``.
    s : float
        Gaussian width (mm); direct denominator in ``exp(-(..)^2/s^2)``.
    L : float
        Medium length (mm).
    """

    kappa0: float = 1.0
    d: float = DEFAULT_LENGTH / 10.0
    s: float = DEFAULT_LENGTH / 6.0
    L: float = DEFAULT_LENGTH

    def __post_init__(self):
        if not self.kappa0 >= 0.0:
            raise ValidationError(f"kappa0 must be >= 0, got {self.kappa0}")
        if not self.s > 0.0:
            raise ValidationError(f"s must be > 0, got {self.s}")
        if not self.L > 0.0:
            raise ValidationError(f"L must be > 0, got {self.L}")
        if not 0.0 <= self.d < self.L / 2.0:
            raise ValidationError(
                f"d must satisfy 0 <= d < L/2, got d={self.d} with L={self.L}"
            )

    @classmethod
    def with_length(cls, L: float, kappa0: float = 1.0) -> "PlainGaussianParams":
        """Defaults scaled to a medium of length ``L``: d = L/10, s = L/6."""
        return cls(kappa0=kappa0, d=L / 10.0, s=L / 6.0, L=L)


@dataclass(frozen=True)
class RescalingParams:
    """Contraction parameter and original length for the rescaling map.

    ``a = 1`` reduces every rescaled quantity to its plain counterpart.
    """

    a: float
    L: float = DEFAULT_LENGTH

    def __post_init__(self):
        if not self.a >= 1.0:
            raise ValidationError(f"contraction parameter a must be >= 1, got {self.a}")
        if not self.L > 0.0:
            raise ValidationError(f"L must be > 0, got {self.L}")

    @property
    def contracted_length(self) -> float:
        return self.L / self.a


@dataclass(frozen=True)
class CouplingSchedule:
    """One of the three coupling schedules plus the base phase mismatch.

    The z-domain is ``[0, L]`` for the plain variant and ``[0, L/a]`` for
    the two shortcut variants.  ``modulate_detuning`` selects whether the
    shortcut variants scale the mismatch by the rescaling rate ``f'(z)``
    (the exact prescription) or hold it constant; it has no effect on the
    plain variant.
    """

    kind: str
    base: PlainGaussianParams
    rescaling: Optional[RescalingParams] = None
    delta0: float = 0.0
    modulate_detuning: bool = True

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValidationError(f"unknown schedule kind {self.kind!r}")
        if self.kind == PLAIN:
            if self.rescaling is not None:
                raise ValidationError("plain schedule takes no rescaling parameters")
        else:
            if self.rescaling is None:
                raise ValidationError(f"{self.kind} schedule requires rescaling parameters")
            if self.rescaling.L != self.base.L:
                raise ValidationError(
                    "rescaling length must match the base schedule length"
                )

    @classmethod
    def plain(cls, base: PlainGaussianParams, delta0: float = 0.0) -> "CouplingSchedule":
        return cls(PLAIN, base, None, delta0)

    @classmethod
    def time_rescaled(
        cls,
        base: PlainGaussianParams,
        rescaling: RescalingParams,
        delta0: float = 0.0,
        modulate_detuning: bool = True,
    ) -> "CouplingSchedule":
        return cls(TIME_RESCALED, base, rescaling, delta0, modulate_detuning)

    @classmethod
    def gaussian_approx(
        cls,
        base: PlainGaussianParams,
        rescaling: RescalingParams,
        delta0: float = 0.0,
        modulate_detuning: bool = True,
    ) -> "CouplingSchedule":
        return cls(GAUSSIAN_APPROX, base, rescaling, delta0, modulate_detuning)

    @property
    def length(self) -> float:
        """Length of the z-domain (mm)."""
        if self.kind == PLAIN:
            return self.base.L
        return self.rescaling.contracted_length


def _check_domain(z, length: float) -> None:
    z = np.asarray(z)
    tol = 1e-9 * max(length, 1.0)
    if np.any(z < -tol) or np.any(z > length + tol):
        raise DomainError(
            f"position out of schedule domain [0, {length}]: {np.min(z)}..{np.max(z)}"
        )


def rescaling_map(z, p: RescalingParams):
    """Contraction map f(z) = a*z - (L/(2 pi a))(a-1) sin(2 pi a z / L).

    Monotone non-decreasing on ``[0, L/a]`` with f(0) = 0 and f(L/a) = L.
    """
    _check_domain(z, p.contracted_length)
    return _rescaling_map_raw(z, p)


def _rescaling_map_raw(z, p: RescalingParams):
    w = 2.0 * np.pi * p.a / p.L
    return p.a * z - (p.L / (2.0 * np.pi * p.a)) * (p.a - 1.0) * np.sin(w * z)


def rescaling_rate(z, p: RescalingParams):
    """Derivative f'(z) = a - (a-1) cos(2 pi a z / L).

    Equals 1 at both ends of the domain and peaks at 2a-1 at z = L/(2a).
    """
    _check_domain(z, p.contracted_length)
    return _rescaling_rate_raw(z, p)


def _rescaling_rate_raw(z, p: RescalingParams):
    w = 2.0 * np.pi * p.a / p.L
    return p.a - (p.a - 1.0) * np.cos(w * z)


def _plain_pair(z, base: PlainGaussianParams):
    center = base.L / 2.0
    k1 = base.kappa0 * np.exp(-((z - center - base.d) ** 2) / base.s**2)
    k3 = base.kappa0 * np.exp(-((z - center + base.d) ** 2) / base.s**2)
    return k1, k3


def _coupling_pair_raw(z, sched: CouplingSchedule):
    # No domain check: the closed forms extend analytically, which the
    # finite-difference diagnostics rely on at the domain edges.
    z = np.asarray(z, dtype=float)
    if sched.kind == PLAIN:
        return _plain_pair(z, sched.base)
    if sched.kind == TIME_RESCALED:
        fz = _rescaling_map_raw(z, sched.rescaling)
        fp = _rescaling_rate_raw(z, sched.rescaling)
        k1, k3 = _plain_pair(fz, sched.base)
        return k1 * fp, k3 * fp
    base = sched.base
    a = sched.rescaling.a
    center = base.L / 2.0
    amp = base.kappa0 * (2.0 * a - 1.0)
    k1 = amp * np.exp(-((a * z - center - base.d) ** 2) / base.s**2)
    k3 = amp * np.exp(-((a * z - center + base.d) ** 2) / base.s**2)
    return k1, k3


def coupling_pair(z, sched: CouplingSchedule):
    """Evaluate (kappa1, kappa3) of the schedule at position ``z``."""
    _check_domain(z, sched.length)
    return _coupling_pair_raw(z, sched)


def _detuning_raw(z, sched: CouplingSchedule):
    z = np.asarray(z, dtype=float)
    if sched.kind == PLAIN or not sched.modulate_detuning:
        return np.full_like(z, sched.delta0) if z.ndim else float(sched.delta0)
    return sched.delta0 * _rescaling_rate_raw(z, sched.rescaling)


def detuning_at(z, sched: CouplingSchedule):
    """Effective mismatch at ``z``: delta0 for plain, delta0*f'(z) otherwise."""
    _check_domain(z, sched.length)
    return _detuning_raw(z, sched)


def mixing_angle(kappa1, kappa3):
    """Mixing angle arctan(kappa1/kappa3), in [0, pi/2] for non-negative inputs.

    Raises
    ------
    UndefinedMixingAngleError
        If both couplings are zero (elementwise for array inputs).
    """
    k1 = np.asarray(kappa1, dtype=float)
    k3 = np.asarray(kappa3, dtype=float)
    if np.any((k1 == 0.0) & (k3 == 0.0)):
        raise UndefinedMixingAngleError("mixing angle undefined where kappa1 = kappa3 = 0")
    out = np.arctan2(k1, k3)
    return float(out) if out.ndim == 0 else out


def rms_coupling(kappa1, kappa3):
    """Root-sum-square coupling sqrt(kappa1^2 + kappa3^2)."""
    out = np.hypot(kappa1, kappa3)
    return float(out) if np.ndim(out) == 0 else out
