"""Detected fringe phase, computed along several independent routes.

Routes (all give ``-kappa*g*T^2`` with the chirp off):

``proper_time_sliding``
    Half the arm phase difference ``-(m c^2/hbar) delta_tau`` (the fringe moves
    by half the relative phase of the two beams) plus the sliding of the beam
    recombination point against the analyzer, ``kappa*(y_beams - y_analyzer)/2``.
    Applies in every situation.
``golden_rule``
    ``-(1/hbar) int Delta U dt`` along the unperturbed (g = 0) arms. Only the
    laboratory frames carry a gravitational potential.
``energy_bookkeeping``
    Full per-arm phase with the laser momentum/energy terms for the atom, which
    cancel between the arms (laboratory, atom only).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import quadrature
from .kinematics import (
    Device,
    DeviceFrame,
    ExperimentParams,
    Frame,
    analyzer_height,
    build_paths,
    closure_height_closed_form,
    evaluate,
)
from .propertime import o2_envelope, oracle_tolerance, proper_time_closed_form, proper_time_oracle
from .quadrature import QuadratureSpec

# Closed-form routes must agree to this relative precision.
CLOSED_FORM_RTOL = 1e-12


class ChirpError(ValueError):
    """Chirping requested where it is not defined (the neutron device)."""


@dataclass(frozen=True)
class DetectionGeometry:
    """Two beams meeting at half-angle ``theta``; fringe period ``ell`` along the detection line."""

    theta: float
    wavelength: float
    ell: float

    def __post_init__(self):
        if not (0.0 < self.theta <= math.pi / 2):
            raise ValueError("theta must lie in (0, pi/2]")
        if not (self.wavelength > 0 and self.ell > 0):
            raise ValueError("wavelength and ell must be positive")
        expected = self.ell * math.sin(self.theta)
        if abs(self.wavelength - expected) > 1e-12 * expected:
            raise ValueError("wavelength must equal ell*sin(theta)")

    @classmethod
    def from_kappa(cls, kappa: float, theta: float = math.pi / 2) -> "DetectionGeometry":
        ell = 4.0 * math.pi / kappa
        return cls(theta, ell * math.sin(theta), ell)

    @property
    def k(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @property
    def kappa(self) -> float:
        return 4.0 * math.pi / self.ell


@dataclass(frozen=True)
class ChirpSetting:
    enabled: bool = False
    omega_dot: float = 0.0

    @classmethod
    def nulling(cls, p: ExperimentParams) -> "ChirpSetting":
        """The chirp rate 2*kappa*g that parks the fringe."""
        return cls(True, 2.0 * p.kappa * p.g)


@dataclass(frozen=True)
class PhaseBreakdown:
    total: float
    proper_time_phase: float
    sliding_phase: float
    laser_phase: float
    golden_rule_phase: float
    route_agreement: float
    routes: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "total": self.total,
            "proper_time_phase": self.proper_time_phase,
            "sliding_phase": self.sliding_phase,
            "laser_phase": self.laser_phase,
            "golden_rule_phase": self.golden_rule_phase,
            "route_agreement": self.route_agreement,
            "routes": dict(self.routes),
        }


def phase_from_displacement(geom: DetectionGeometry, delta_y: float) -> float:
    """Fringe phase for a vertical displacement of the recombination point: kappa*dy/2."""
    return 0.5 * geom.kappa * delta_y


def fringe_shift(alpha_1: float, alpha_2: float, samples: int = 2049) -> float:
    """Locate the fringe maximum of two crossing beams with phases alpha_1, alpha_2.

    Numerically maximises ``|exp(i(y + a1)) + exp(i(-y + a2))|^2`` (unit
    transverse wavenumber) near ``y = 0`` and returns the shift of the
    maximum in phase units, wrapped to (-pi/2, pi/2]. Independent check on
    the half-relative-phase rule.
    """
    a1 = math.remainder(alpha_1, 2.0 * math.pi)
    a2 = math.remainder(alpha_2, 2.0 * math.pi)

    def neg_intensity(y):
        return -abs(np.exp(1j * (y + a1)) + np.exp(1j * (-y + a2))) ** 2

    ys = np.linspace(-math.pi / 2, math.pi / 2, samples)
    i = int(np.argmin(neg_intensity(ys)))
    h = ys[1] - ys[0]
    res = optimize.minimize_scalar(
        neg_intensity, bounds=(ys[i] - h, ys[i] + h), method="bounded", options={"xatol": 1e-13}
    )
    shift = -res.x
    return math.remainder(shift, math.pi)


def _unperturbed(p: ExperimentParams) -> ExperimentParams:
    return p.replace(g=0.0)


def golden_rule_halves(df: DeviceFrame, p: ExperimentParams) -> tuple[float, float]:
    """``-(1/hbar) int m g Delta y dt`` over [0, T] and [T, 2T] on the g = 0 arms."""
    strength = p.g if df.frame is Frame.LAB else 0.0
    upper, lower = build_paths(df, _unperturbed(p))
    halves = []
    for su, sl in zip(upper.segments, lower.segments):
        area = su.integrate_position() - sl.integrate_position()
        halves.append(-p.m * strength * area / p.hbar)
    return halves[0], halves[1]


def golden_rule_phase(df: DeviceFrame, p: ExperimentParams) -> float:
    """Golden-rule phase; zero in the free-fall frame where there is no potential."""
    first, second = golden_rule_halves(df, p)
    return first + second


def golden_rule_phase_oracle(df: DeviceFrame, p: ExperimentParams, q: QuadratureSpec | None = None) -> float:
    """Same integral as :func:`golden_rule_phase`, by quadrature."""
    q = q or QuadratureSpec()
    strength = p.g if df.frame is Frame.LAB else 0.0
    upper, lower = build_paths(df, _unperturbed(p))
    total = 0.0
    for su, sl in zip(upper.segments, lower.segments):
        area, _ = quadrature.pair_parts(su, sl, 1.0, su.t_start, su.t_end, q)
        total += area
    return -p.m * strength * total / p.hbar


def trajectory_term_residual(df: DeviceFrame, p: ExperimentParams, q: QuadratureSpec | None = None) -> float:
    """Phase carried by the bending of the arms, counted in unperturbed wavelengths.

    For every segment the bent path is compared with the straight path
    between the same endpoints; the excess length times the unperturbed
    wavenumber ``m |v| / hbar`` is the trajectory term. It vanishes at first
    order in g. Returns the larger of the two per-arm sums.

    Needs ``v_x0 > 0``: with purely vertical motion there is no transverse
    path to bend.
    """
    if p.v_x0 <= 0.0:
        raise ValueError("trajectory term needs a horizontal speed v_x0 > 0")
    q = q or QuadratureSpec(order=24)
    k = p.m * math.sqrt(p.v0_squared) / p.hbar
    per_arm = []
    for path in build_paths(df, p):
        per_arm.append(sum(k * quadrature.bend_excess(seg, q) for seg in path.segments))
    return max(per_arm, key=abs)


def _laser_terms(k_first, s_first, omega_first, k_second, s_second, omega_second, T):
    return math.fsum([k_first * s_first, -omega_first * T, k_second * s_second, -omega_second * T])


def energy_bookkeeping_phase(
    p: ExperimentParams, omega_l: float = 0.0, omega: float = 0.0, k_l: float = 0.0
) -> PhaseBreakdown:
    """Atom phase difference with the absorbed photon momentum and energy kept.

    The upper arm carries ``(k_l + kappa, omega_l + omega)`` on [0, T] and
    ``(k_l, omega_l)`` on [T, 2T]; the lower arm the reverse. The k*s and
    omega*T terms of the two arms are the same multiset, summed exactly, so
    they cancel to the bit and only the potential term survives.
    """
    df = DeviceFrame(Device.ATOM, Frame.LAB)
    upper, lower = build_paths(df, _unperturbed(p))
    T = p.T
    k_u = k_l + p.kappa
    omega_u = omega_l + omega

    def length(seg):
        return math.hypot(seg.v_x * seg.duration, seg.position(seg.t_end) - seg.y0)

    s_u = length(upper.segments[0])
    s_l = length(lower.segments[0])
    laser_u = _laser_terms(k_u, s_u, omega_u, k_l, s_l, omega_l, T)
    laser_l = _laser_terms(k_l, s_l, omega_l, k_u, s_u, omega_u, T)

    scale = p.m * p.g / p.hbar
    pot_u = [scale * seg.integrate_position() for seg in upper.segments]
    pot_l = [scale * seg.integrate_position() for seg in lower.segments]
    potential = math.fsum([-pot_u[0], -pot_u[1], pot_l[0], pot_l[1]])

    laser = laser_u - laser_l
    delta = laser + potential
    golden = golden_rule_phase(df, p)
    return PhaseBreakdown(
        total=delta,
        proper_time_phase=0.0,
        sliding_phase=0.0,
        laser_phase=laser,
        golden_rule_phase=golden,
        route_agreement=abs(delta - golden),
        routes={"energy_bookkeeping": delta, "golden_rule": golden},
    )


def _proper_time_half_phase(p: ExperimentParams, delta_tau: float) -> float:
    return -0.5 * p.m * p.c**2 * delta_tau / p.hbar


def _sliding(df: DeviceFrame, p: ExperimentParams, y_upper: float, y_lower: float) -> float:
    geom = DetectionGeometry.from_kappa(p.kappa)
    y_beams = 0.5 * (y_upper + y_lower)
    return phase_from_displacement(geom, y_beams - analyzer_height(df, p, 2.0 * p.T))


def _primary_route(df: DeviceFrame) -> str:
    if df.device is Device.NEUTRON and df.frame is Frame.LAB:
        return "golden_rule"
    return "proper_time_sliding"


def route_values(df: DeviceFrame, p: ExperimentParams) -> dict:
    """Closed-form value of every route that applies to ``df`` (chirp off)."""
    tau = proper_time_closed_form(df, p)
    yu = yl = closure_height_closed_form(df, p)
    routes = {
        "proper_time_sliding": _proper_time_half_phase(p, tau.delta_tau) + _sliding(df, p, yu, yl),
    }
    if df.frame is Frame.LAB:
        routes["golden_rule"] = golden_rule_phase(df, p)
    if df.device is Device.ATOM and df.frame is Frame.LAB:
        routes["energy_bookkeeping"] = energy_bookkeeping_phase(p).total
    return routes


def _spread(values) -> float:
    values = list(values)
    return max(values) - min(values) if values else 0.0


def _check_chirp(df: DeviceFrame, chirp: ChirpSetting):
    if chirp.enabled and df.device is Device.NEUTRON:
        raise ChirpError("chirping is defined only for the laser (atom) interferometer")


def _assemble(df, p, chirp, routes, delta_tau, yu, yl, golden):
    _check_chirp(df, chirp)
    laser = 0.5 * chirp.omega_dot * p.T**2 if chirp.enabled else 0.0
    base = routes[_primary_route(df)]
    return PhaseBreakdown(
        total=base + laser,
        proper_time_phase=_proper_time_half_phase(p, delta_tau),
        sliding_phase=_sliding(df, p, yu, yl),
        laser_phase=laser,
        golden_rule_phase=golden,
        route_agreement=_spread(routes.values()),
        routes=routes,
    )


def detected_phase(df: DeviceFrame, p: ExperimentParams, chirp: ChirpSetting | None = None) -> PhaseBreakdown:
    """Detected fringe phase with its decomposition.

    With the chirp off every situation gives ``-kappa g T^2``. A chirp of rate
    ``omega_dot`` (atom only) adds ``omega_dot T^2 / 2`` to ``laser_phase``
    and to the total, so ``omega_dot = 2 kappa g`` parks the fringe at zero.
    """
    chirp = chirp or ChirpSetting()
    _check_chirp(df, chirp)
    routes = route_values(df, p)
    tau = proper_time_closed_form(df, p)
    yu = yl = closure_height_closed_form(df, p)
    return _assemble(df, p, chirp, routes, tau.delta_tau, yu, yl, golden_rule_phase(df, p))


def detected_phase_oracle(
    df: DeviceFrame, p: ExperimentParams, q: QuadratureSpec | None = None, chirp: ChirpSetting | None = None
) -> PhaseBreakdown:
    """:func:`detected_phase` with every ingredient taken from the numerical routes.

    Proper time from :func:`proper_time_oracle`, closure heights from
    trajectory evaluation and the golden-rule integral by quadrature.
    """
    chirp = chirp or ChirpSetting()
    _check_chirp(df, chirp)
    q = q or QuadratureSpec()
    tau = proper_time_oracle(df, p, q)
    upper, lower = build_paths(df, p)
    yu = evaluate(upper, 2.0 * p.T)[0]
    yl = evaluate(lower, 2.0 * p.T)[0]
    routes = {"proper_time_sliding": _proper_time_half_phase(p, tau.delta_tau) + _sliding(df, p, yu, yl)}
    golden = golden_rule_phase_oracle(df, p, q)
    if df.frame is Frame.LAB:
        routes["golden_rule"] = golden
    return _assemble(df, p, chirp, routes, tau.delta_tau, yu, yl, golden)


def phase_envelope(p: ExperimentParams) -> float:
    """The proper-time oracle tolerance expressed as detected phase."""
    return 0.5 * p.m * p.c**2 * oracle_tolerance(p) / p.hbar


def trajectory_envelope(p: ExperimentParams) -> float:
    """Bound ``K m g^2 T^3 / hbar`` on the trajectory term (about m g^2 T^3 / 12 hbar per arm)."""
    return p.m * p.c**2 * o2_envelope(p) / p.hbar


def mass_independence_check(
    p: ExperimentParams, masses, oracle: bool = False, q: QuadratureSpec | None = None
) -> float:
    """Spread of the atom-lab detected phase over ``masses`` (v_y0 follows each mass)."""
    df = DeviceFrame(Device.ATOM, Frame.LAB)
    totals = []
    for m in masses:
        pm = p.replace(m=m)
        result = detected_phase_oracle(df, pm, q) if oracle else detected_phase(df, pm)
        totals.append(result.total)
    return _spread(totals)


def neutron_phase_consistency(
    p: ExperimentParams, oracle: bool = False, q: QuadratureSpec | None = None
) -> tuple[float, float]:
    """``(relative_phase, detected)`` for the neutron.

    ``relative_phase = (m c^2/hbar) delta_tau`` (= 2 kappa g T^2) is the phase
    difference between the arms; the fringe moves by half of it.
    """
    df = DeviceFrame(Device.NEUTRON, Frame.LAB)
    tau = proper_time_oracle(df, p, q) if oracle else proper_time_closed_form(df, p)
    relative = p.m * p.c**2 * tau.delta_tau / p.hbar
    return relative, 0.5 * relative
