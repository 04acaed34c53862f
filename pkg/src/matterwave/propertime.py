"""Proper time elapsed along each interferometer arm.

Weak-field element ``dtau = (1 + U/c^2 - v^2/(2c^2)) dt`` with ``U = g*y`` in
the laboratory and ``U = 0`` in the free-fall frame. Two routes:

* :func:`proper_time_closed_form` - the first-order-in-g expressions, segment
  by segment.
* :func:`proper_time_oracle` - quadrature of the element along the exact
  piecewise trajectories from :mod:`matterwave.kinematics`.

The rest term ``2T`` is common to both arms and excluded unless
``include_rest=True``.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass

from . import quadrature
from .kinematics import Device, DeviceFrame, ExperimentParams, Frame, build_paths
from .quadrature import QuadratureSpec

# Envelope constant for |oracle - closed| <= K g^2 T^3 / c^2. The largest
# per-arm second-order coefficient over the four situations is 8/3 (atom lab).
ENVELOPE_K = 10.0

EPS = sys.float_info.epsilon


@dataclass(frozen=True)
class ProperTimeResult:
    tau_upper: float
    tau_lower: float
    delta_tau: float
    redshift_part: float
    velocity_part: float
    include_rest: bool = False

    def as_dict(self) -> dict:
        return {
            "tau_upper": self.tau_upper,
            "tau_lower": self.tau_lower,
            "delta_tau": self.delta_tau,
            "redshift_part": self.redshift_part,
            "velocity_part": self.velocity_part,
            "include_rest": self.include_rest,
        }


# First-order coefficients of g*v_y0*T^2 per (arm, half) as (redshift, velocity).
# The common -v0^2 T / 2 per half is added separately.
_FIRST_ORDER = {
    (Device.ATOM, Frame.LAB): {
        "upper": ((0.5, 0.5), (0.5, -1.5)),
        "lower": ((-0.5, -0.5), (-0.5, 1.5)),
    },
    (Device.ATOM, Frame.FREE_FALL): {
        "upper": ((0.0, 0.0), (0.0, 0.0)),
        "lower": ((0.0, 0.0), (0.0, 0.0)),
    },
    (Device.NEUTRON, Frame.LAB): {
        "upper": ((0.5, 0.5), (0.5, 0.5)),
        "lower": ((-0.5, -0.5), (-0.5, -0.5)),
    },
    (Device.NEUTRON, Frame.FREE_FALL): {
        "upper": ((0.0, 0.0), (0.0, 2.0)),
        "lower": ((0.0, 0.0), (0.0, -2.0)),
    },
}


def proper_time_closed_form(df: DeviceFrame, p: ExperimentParams, include_rest: bool = False) -> ProperTimeResult:
    """First-order-in-g proper times.

    Gives ``delta_tau = 0`` for the atom in both frames and
    ``delta_tau = 4 v_y0 g T^2 / c^2`` for the neutron in both frames.
    """
    table = _FIRST_ORDER[(df.device, df.frame)]
    unit = p.g * p.v_y0 * p.T**2 / p.c**2
    common = -0.5 * p.v0_squared * p.T / p.c**2
    rest = 2.0 * p.T if include_rest else 0.0

    def arm(name):
        red = sum(r for r, _ in table[name]) * unit
        vel = sum(v for _, v in table[name]) * unit
        return red, vel, rest + red + vel + 2.0 * common

    red_u, vel_u, tau_u = arm("upper")
    red_l, vel_l, tau_l = arm("lower")
    redshift = red_u - red_l
    velocity = vel_u - vel_l
    return ProperTimeResult(tau_u, tau_l, redshift + velocity, redshift, velocity, include_rest)


def _potential_strength(df: DeviceFrame, p: ExperimentParams) -> float:
    return p.g if df.frame is Frame.LAB else 0.0


def proper_time_oracle(
    df: DeviceFrame,
    p: ExperimentParams,
    q: QuadratureSpec | None = None,
    include_rest: bool = False,
    potential_offset: float = 0.0,
) -> ProperTimeResult:
    """Quadrature of the weak-field proper-time element on the exact arms.

    ``potential_offset`` adds a constant to U (per unit mass); it shifts both
    arms equally and must leave ``delta_tau`` unchanged.

    Raises
    ------
    QuadratureError
        if any segment integral misses the requested tolerance.
    """
    q = q or QuadratureSpec()
    upper, lower = build_paths(df, p)
    pot = _potential_strength(df, p)
    c2 = p.c**2

    def arm_total(path):
        red = vel = 0.0
        for seg in path.segments:
            r, v = quadrature.arm_parts(seg, pot, seg.t_start, seg.t_end, q, u0=potential_offset)
            red += r
            vel += v
        return red / c2, vel / c2

    red_u, vel_u = arm_total(upper)
    red_l, vel_l = arm_total(lower)

    redshift = velocity = 0.0
    for su, sl in zip(upper.segments, lower.segments):
        # both arms are redirected at T, so the halves line up
        r, v = quadrature.pair_parts(su, sl, pot, su.t_start, su.t_end, q, u0=potential_offset)
        redshift += r
        velocity += v
    redshift /= c2
    velocity /= c2

    rest = 2.0 * p.T if include_rest else 0.0
    return ProperTimeResult(
        rest + red_u + vel_u,
        rest + red_l + vel_l,
        redshift + velocity,
        redshift,
        velocity,
        include_rest,
    )


def o2_envelope(p: ExperimentParams, K: float = ENVELOPE_K) -> float:
    """Second-order bound K g^2 T^3 / c^2 (seconds) on oracle minus closed form."""
    return K * p.g**2 * p.T**3 / p.c**2


def rounding_bound(p: ExperimentParams) -> float:
    """Floating-point floor of the oracle (seconds).

    The arm differences cancel terms of size ``V^2`` and ``g Y`` (largest
    speed and height over the run), so rounding leaves about
    ``eps * 2T (V^2 + g Y) / c^2`` whatever the size of the difference.
    """
    speed = p.v_y0 + 2.0 * p.g * p.T + p.v_x0
    height = p.v_y0 * p.T + 2.0 * p.g * p.T**2
    return 64.0 * EPS * 2.0 * p.T * (speed**2 + p.g * height) / p.c**2


def oracle_tolerance(p: ExperimentParams, K: float = ENVELOPE_K) -> float:
    """Allowed |oracle - closed form|: the O(g^2) envelope plus the rounding floor."""
    return o2_envelope(p, K) + rounding_bound(p)


def frame_invariance_check(device: Device, p: ExperimentParams, q: QuadratureSpec | None = None):
    """Oracle proper times in both frames and the largest frame discrepancy.

    Returns ``(lab, freefall, max_discrepancy)`` where the discrepancy is
    taken over ``delta_tau`` (the frame-invariant quantity).
    """
    device = Device(device)
    lab = proper_time_oracle(DeviceFrame(device, Frame.LAB), p, q)
    ff = proper_time_oracle(DeviceFrame(device, Frame.FREE_FALL), p, q)
    return lab, ff, abs(lab.delta_tau - ff.delta_tau)
