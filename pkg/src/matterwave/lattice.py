"""Counter-propagating laser fields as complex scalars.

Every field function returns ``(exact, factored)``: the literal sum of the two
beams and the compact standing-wave form. ``dropped_term_bound`` gives the
analytic ceiling on their difference.

Set ``rotating=True`` to drop the common carrier ``exp(-i omega_ref t)`` from
both forms (``omega_ref`` is ``omega0`` for a plain pair, ``omega_plus`` for a
Raman pair). In SI units ``omega0 * t`` reaches 1e14 rad and its rounding
would swamp the tiny dropped terms; the rotating frame keeps the comparison
meaningful.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .kinematics import C_SI, HBAR_SI, MAX_BETA, ExperimentParams

EPS = np.finfo(float).eps


class RegimeError(ValueError):
    """Speed too close to c for the first-order Doppler forms."""


@dataclass(frozen=True)
class LaserPair:
    """Two counter-propagating beams of equal frequency; ``omega0 = c*k0``."""

    k0: float
    c: float = C_SI
    amplitude: float = 1.0

    def __post_init__(self):
        if not (self.k0 > 0 and self.c > 0):
            raise ValueError("k0 and c must be positive")

    @property
    def omega0(self) -> float:
        return self.c * self.k0

    @property
    def period(self) -> float:
        """Spacing of the standing-wave planes."""
        return math.pi / self.k0

    def as_raman(self) -> "RamanPair":
        return RamanPair(self.k0, self.k0, self.omega0, self.omega0, self.c, self.amplitude)


@dataclass(frozen=True)
class RamanPair:
    """Two counter-propagating beams of different frequency (two-photon transition)."""

    k1: float
    k2: float
    omega1: float
    omega2: float
    c: float = C_SI
    amplitude: float = 1.0

    def __post_init__(self):
        if self.k1 + self.k2 == 0:
            raise ValueError("k_plus = 0: no lattice")
        if self.c <= 0:
            raise ValueError("c must be positive")

    @classmethod
    def from_frequencies(cls, omega1: float, omega2: float, c: float = C_SI) -> "RamanPair":
        """Vacuum beams, ``k = omega/c``."""
        return cls(omega1 / c, omega2 / c, omega1, omega2, c)

    @property
    def k_plus(self) -> float:
        return 0.5 * (self.k1 + self.k2)

    @property
    def k_minus(self) -> float:
        return 0.5 * (self.k1 - self.k2)

    @property
    def omega_plus(self) -> float:
        return 0.5 * (self.omega1 + self.omega2)

    @property
    def omega_minus(self) -> float:
        return 0.5 * (self.omega1 - self.omega2)

    @property
    def drift_velocity(self) -> float:
        """Velocity ``omega_minus/k_plus`` of the envelope planes."""
        return self.omega_minus / self.k_plus

    @property
    def period(self) -> float:
        return math.pi / abs(self.k_plus)

    def momentum_transfer(self, hbar: float = HBAR_SI) -> float:
        return hbar * (abs(self.k1) + abs(self.k2))


@dataclass(frozen=True)
class LatticeSample:
    z: float
    t: float
    value: complex

    def __post_init__(self):
        if not (math.isfinite(self.z) and math.isfinite(self.t) and np.isfinite(self.value)):
            raise ValueError("lattice sample must be finite")


def samples(z, t, values) -> list:
    z, t, values = np.broadcast_arrays(np.asarray(z, float), np.asarray(t, float), np.asarray(values))
    return [LatticeSample(float(a), float(b), complex(v)) for a, b, v in zip(z.ravel(), t.ravel(), values.ravel())]


def _as_raman(pair) -> RamanPair:
    return pair.as_raman() if isinstance(pair, LaserPair) else pair


def _check_beta(v, c):
    beta = np.max(np.abs(v)) / c if np.size(v) else 0.0
    if beta > MAX_BETA:
        raise RegimeError(f"|v|/c = {beta:.3g} exceeds {MAX_BETA:g}")


def _two_beams(A, phase1, phase2, carrier_ref, t, rotating):
    shift = 0.0 if rotating else -carrier_ref * t
    return A * np.exp(1j * (phase1 + shift)) + A * np.exp(1j * (phase2 + shift))


def _factored(A, envelope, carrier, ref, t, rotating):
    carrier = carrier if rotating else carrier - ref * t
    return 2.0 * A * np.cos(envelope) * np.exp(1j * carrier)


def _beam_phases(rp: RamanPair, v, accel, z, t):
    """Beam phases relative to the rotating frame ``exp(-i omega_plus t)``.

    ``v`` applies the Doppler substitution; ``accel`` sweeps each beam
    linearly in retarded time (``v(t) = accel*t``). Either may be zero.
    """
    beta = v / rp.c
    # detunings from omega_plus formed without cancellation
    dw1 = rp.omega_minus - beta * rp.omega1
    dw2 = -rp.omega_minus + beta * rp.omega2
    phase1 = rp.k1 * (1.0 - beta) * z - dw1 * t
    phase2 = -rp.k2 * (1.0 + beta) * z - dw2 * t
    if np.any(accel):
        phase1 = phase1 + 0.5 * rp.k1 * accel * (t - z / rp.c) ** 2
        phase2 = phase2 - 0.5 * rp.k2 * accel * (t + z / rp.c) ** 2
    return phase1, phase2


def _evaluate(pair, v, accel, z, t, rotating):
    rp = _as_raman(pair)
    z = np.asarray(z, float)
    t = np.asarray(t, float)
    phase1, phase2 = _beam_phases(rp, v, accel, z, t)
    exact = _two_beams(rp.amplitude, phase1, phase2, rp.omega_plus, t, rotating)
    shift = z + v * t + 0.5 * accel * t**2
    envelope = rp.k_plus * shift - rp.omega_minus * t
    carrier = rp.k_minus * shift
    factored = _factored(rp.amplitude, envelope, carrier, rp.omega_plus, t, rotating)
    return exact, factored


def standing_wave(lp: LaserPair, z, t, rotating: bool = False):
    """``A e^{i(k0 z - w0 t)} + A e^{i(-k0 z - w0 t)}`` and ``2A e^{-i w0 t} cos k0 z``."""
    return _evaluate(lp, 0.0, 0.0, z, t, rotating)


def doppler_shifted(lp: LaserPair, v: float, z, t, rotating: bool = False):
    """Beams Doppler shifted for an observer at speed ``v``; factored form ``2A e^{-i w0 t} cos k0(z + v t)``.

    The factored form drops the phase ``w0 v z / c^2``; in fact here
    ``exact = factored * exp(-i w0 v z / c^2)`` with no further error.
    """
    _check_beta(v, lp.c)
    return _evaluate(lp, v, 0.0, z, t, rotating)


def raman_lattice(rp: RamanPair, z, t, rotating: bool = False):
    """Two-frequency lattice ``2 cos(k+ z - w- t) e^{i(k- z - w+ t)}`` (exact identity)."""
    return _evaluate(rp, 0.0, 0.0, z, t, rotating)


def raman_doppler(rp: RamanPair, v: float, z, t, rotating: bool = False):
    """Raman lattice seen at speed ``v``; factored ``2 cos(k+(z+vt) - w- t) e^{i(k-(z+vt) - w+ t)}``."""
    _check_beta(v, rp.c)
    return _evaluate(rp, v, 0.0, z, t, rotating)


def chirped_lattice(pair, accel: float, z, t, rotating: bool = False):
    """Linearly chirped lattice: ``v t`` replaced by ``accel t^2 / 2`` in the factored form.

    The exact form sweeps each beam's frequency linearly in its own retarded
    time, so beam 1 (travelling +z) is red-swept and beam 2 blue-swept.
    """
    rp = _as_raman(pair)
    _check_beta(accel * np.asarray(t, float), rp.c)
    return _evaluate(pair, 0.0, accel, z, t, rotating)


def dropped_terms(pair, z, t, v: float = 0.0, accel: float = 0.0):
    """First-order phases ``(carrier, envelope)`` the factored form omits.

    For vacuum beams (``omega = c k``) and constant ``v`` these are
    ``omega_plus v z / c^2`` and ``omega_minus v z / c^2``. The carrier term
    is the larger since ``omega_minus << omega_plus``. The chirp adds
    ``z^2`` retardation terms.
    """
    rp = _as_raman(pair)
    z = np.asarray(z, float)
    t = np.asarray(t, float)
    c = rp.c
    beta = v / c
    carrier = beta * (rp.k_plus * z - (rp.omega_minus - c * rp.k_minus) * t)
    envelope = beta * (rp.k_minus * z - (rp.omega_plus - c * rp.k_plus) * t)
    if accel:
        carrier = carrier + accel * (rp.k_plus * t * z / c - 0.5 * rp.k_minus * z**2 / c**2)
        envelope = envelope + accel * (rp.k_minus * t * z / c - 0.5 * rp.k_plus * z**2 / c**2)
    return carrier, envelope


def dropped_term_bound(pair, z, t, v: float = 0.0, accel: float = 0.0, rotating: bool = False):
    """Pointwise ceiling on ``|exact - factored|``.

    To first order the error is ``2A sqrt(dc^2 cos^2 + de^2 sin^2) <=
    2A max(|dc|, |de|)``; the squared term covers second order and the last
    term floating-point rounding of the phase arguments.
    """
    rp = _as_raman(pair)
    z = np.asarray(z, float)
    t = np.asarray(t, float)
    dc, de = dropped_terms(rp, z, t, v, accel)
    first = np.maximum(np.abs(dc), np.abs(de))
    second = (np.abs(dc) + np.abs(de)) ** 2
    kz = np.abs(rp.k_plus * z) + np.abs(rp.k_minus * z)
    wt = np.abs(rp.omega_minus * t) + abs(v) * abs(rp.k_plus) * np.abs(t)
    wt = wt + 0.5 * abs(accel) * abs(rp.k_plus) * t**2 + abs(rp.omega_plus * v / rp.c) * np.abs(t)
    if not rotating:
        wt = wt + np.abs(rp.omega_plus * t)
    rounding = 8.0 * EPS * (kz + wt + 1.0)
    return 2.0 * abs(rp.amplitude) * (first + second + rounding)


def envelope_phase(pair, z, t, v: float = 0.0, accel: float = 0.0, exact: bool = True):
    """Argument of the real envelope cos(...) of the field; ``exact`` uses the beam sum."""
    rp = _as_raman(pair)
    z = np.asarray(z, float)
    t = np.asarray(t, float)
    if exact:
        phase1, phase2 = _beam_phases(rp, v, accel, z, t)
        return 0.5 * (phase1 - phase2)
    return rp.k_plus * (z + v * t + 0.5 * accel * t**2) - rp.omega_minus * t


def plane_position(pair, t: float, z_guess: float, v: float = 0.0, accel: float = 0.0,
                   exact: bool = True, xtol_periods: float = 1e-12) -> float:
    """Node of the envelope nearest ``z_guess`` (within a quarter period) at time ``t``."""
    rp = _as_raman(pair)
    period = rp.period

    def f(z):
        return math.cos(float(envelope_phase(rp, z, t, v, accel, exact)))

    lo, hi = z_guess - 0.45 * period, z_guess + 0.45 * period
    return optimize.bisect(f, lo, hi, xtol=xtol_periods * period, maxiter=200)


def first_node(pair) -> float:
    """Position of a node at t = 0: envelope argument pi/2."""
    rp = _as_raman(pair)
    return 0.5 * math.pi / rp.k_plus


def instantaneous_frequencies(pair, accel: float, t):
    """Frequencies of the two beams making up the factored chirped form at z = 0."""
    rp = _as_raman(pair)
    t = np.asarray(t, float)
    return rp.omega1 - rp.k1 * accel * t, rp.omega2 + rp.k2 * accel * t


def frequency_sweep(pair, accel: float, T: float) -> float:
    """Per-beam frequency change over [0, T]: ``k accel T``."""
    w_up_0, _ = instantaneous_frequencies(pair, accel, 0.0)
    w_up_T, _ = instantaneous_frequencies(pair, accel, T)
    return float(w_up_0 - w_up_T)


def boost_wavevector(k: float, m: float, v: float, hbar: float = HBAR_SI) -> tuple[float, float]:
    """Matter wavevector seen from a frame moving at ``v``, and the wave reflected off a mirror moving at ``v``.

    Returns ``(k - m v/hbar, -(k - 2 m v/hbar))``; the second is expressed back
    in the original frame.
    """
    shift = m * v / hbar
    return k - shift, -(k - 2.0 * shift)


def doppler_kick_ratio(p: ExperimentParams | None, v0: float) -> float:
    """Fractional photon Doppler kick over fractional mirror kick: ``v0/c``."""
    if not v0 > 0:
        raise ValueError("v0 must be positive")
    c = p.c if p is not None else C_SI
    return v0 / c
