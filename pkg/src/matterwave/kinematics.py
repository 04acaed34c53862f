"""Classical beam trajectories for the atom-fountain and neutron interferometers.

Both devices are modelled in the symmetric idealised geometry: the arms leave
the first beam splitter at ``t = 0`` with vertical velocities ``+v_y0`` (upper)
and ``-v_y0`` (lower), are redirected at ``t = T`` and recombine at ``t = 2T``.
Between kicks every arm moves with uniform acceleration, ``-g`` in the
laboratory and ``0`` in the frame falling with the beams.

The two devices differ only in what happens at a kick:

* atom: a photon recoil adds a fixed velocity ``+-hbar*kappa/m``; the velocity
  picked up by falling passes through unchanged.
* neutron: an elastic bounce off the crystal planes reverses the whole
  vertical velocity and adds twice the mirror velocity.

y increases upward. Units are SI unless the caller overrides ``c``/``hbar``.
"""
from __future__ import annotations

import bisect
import enum
import math
from dataclasses import dataclass, field, replace
from typing import Union

C_SI = 2.99792458e8
HBAR_SI = 1.054571817e-34

# Slow-motion bound on v_y0/c.
MAX_BETA = 1e-3


class Device(str, enum.Enum):
    ATOM = "atom"
    NEUTRON = "neutron"


class Frame(str, enum.Enum):
    LAB = "lab"
    FREE_FALL = "freefall"


class Arm(str, enum.Enum):
    UPPER = "upper"
    LOWER = "lower"


@dataclass(frozen=True)
class DeviceFrame:
    device: Device
    frame: Frame

    def __post_init__(self):
        object.__setattr__(self, "device", Device(self.device))
        object.__setattr__(self, "frame", Frame(self.frame))

    @classmethod
    def all(cls) -> list["DeviceFrame"]:
        """The four situations: atom lab, atom free fall, neutron lab, neutron free fall."""
        return [cls(d, f) for d in Device for f in Frame]

    @property
    def label(self) -> str:
        return f"{self.device.value}-{self.frame.value}"


def _finite(name, value):
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class ExperimentParams:
    """Inputs shared by every calculation.

    Parameters
    ----------
    m : particle rest mass (kg)
    g : gravitational acceleration magnitude (m/s^2)
    T : time between pulses / ears (s)
    kappa : effective photon (lattice) wavenumber (1/m)
    v_x0 : horizontal speed (m/s)
    c, hbar : overridable so natural ``c = 1`` units can be used
    """

    m: float
    g: float
    T: float
    kappa: float
    v_x0: float = 0.0
    c: float = C_SI
    hbar: float = HBAR_SI

    def __post_init__(self):
        for name in ("m", "g", "T", "kappa", "v_x0", "c", "hbar"):
            value = float(getattr(self, name))
            _finite(name, value)
            object.__setattr__(self, name, value)
        for name in ("m", "T", "kappa", "c", "hbar"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
        if self.g < 0.0:
            raise ValueError(f"g must be non-negative, got {self.g!r}")
        if self.v_x0 < 0.0:
            raise ValueError(f"v_x0 must be non-negative, got {self.v_x0!r}")
        if self.v_y0 / self.c >= MAX_BETA:
            raise ValueError(
                f"v_y0/c = {self.v_y0 / self.c:.3g} is outside the slow-motion regime (< {MAX_BETA:g})"
            )

    @property
    def v_y0(self) -> float:
        """Vertical launch speed of each arm, hbar*kappa/(2m)."""
        return self.hbar * self.kappa / (2.0 * self.m)

    @property
    def d(self) -> float:
        """Free-fall drop in one interval, g*T^2/2."""
        return 0.5 * self.g * self.T**2

    @property
    def R(self) -> float:
        """Canonical fringe phase magnitude kappa*g*T^2."""
        return self.kappa * self.g * self.T**2

    @property
    def compton_frequency(self) -> float:
        """m*c^2/hbar. Reported only; it is common to both arms."""
        return self.m * self.c**2 / self.hbar

    @property
    def v0_squared(self) -> float:
        return self.v_y0**2 + self.v_x0**2

    def replace(self, **changes) -> "ExperimentParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class Segment:
    """Uniform-acceleration flight between two kicks."""

    t_start: float
    t_end: float
    y0: float
    v0: float
    a: float
    v_x: float = 0.0

    def __post_init__(self):
        if not self.t_end > self.t_start:
            raise ValueError(f"segment needs t_end > t_start, got [{self.t_start}, {self.t_end}]")

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start

    def position(self, t: float) -> float:
        s = t - self.t_start
        return self.y0 + self.v0 * s + 0.5 * self.a * s * s

    def velocity(self, t: float) -> float:
        return self.v0 + self.a * (t - self.t_start)

    def integrate_position(self) -> float:
        """Exact integral of y(t) over the segment."""
        s = self.duration
        return self.y0 * s + 0.5 * self.v0 * s**2 + self.a * s**3 / 6.0


@dataclass(frozen=True)
class PhotonRecoil:
    """Photon absorption/emission: a fixed velocity step."""

    dv: float

    def apply(self, v_before: float) -> float:
        return v_before + self.dv


@dataclass(frozen=True)
class ElasticMirror:
    """Elastic bounce off planes moving with vertical velocity ``v_mirror``."""

    v_mirror: float

    def apply(self, v_before: float) -> float:
        return -v_before + 2.0 * self.v_mirror


KickKind = Union[PhotonRecoil, ElasticMirror]


@dataclass(frozen=True)
class KickEvent:
    t: float
    kind: KickKind

    def apply(self, v_before: float) -> float:
        return self.kind.apply(v_before)


# Relative tolerance used when validating continuity at segment boundaries.
_JOIN_RTOL = 1e-12


@dataclass(frozen=True)
class BeamPath:
    """One interferometer arm: segments tiling [0, 2T] plus the kicks between them.

    ``v_incoming`` is the vertical velocity before a kick at ``t = 0`` (if any);
    without a kick at 0 it must equal the first segment's ``v0``.
    """

    segments: tuple
    kicks: tuple
    label: Arm
    v_incoming: float = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        object.__setattr__(self, "kicks", tuple(sorted(self.kicks, key=lambda k: k.t)))
        object.__setattr__(self, "label", Arm(self.label))
        if not self.segments:
            raise ValueError("a beam path needs at least one segment")
        if self.v_incoming is None:
            object.__setattr__(self, "v_incoming", self.segments[0].v0)
        self._validate()

    def _validate(self):
        segs = self.segments
        if segs[0].t_start != 0.0:
            raise ValueError("beam path must start at t = 0")
        kicks_at = {k.t: k for k in self.kicks}
        if len(kicks_at) != len(self.kicks):
            raise ValueError("at most one kick per instant")
        boundaries = [s.t_start for s in segs] + [segs[-1].t_end]
        for k in self.kicks:
            if k.t not in boundaries:
                raise ValueError(f"kick at t={k.t} does not sit on a segment boundary")
        first = kicks_at.get(0.0)
        v_start = first.apply(self.v_incoming) if first else self.v_incoming
        if not _close(v_start, segs[0].v0):
            raise ValueError("initial velocity inconsistent with the kick at t = 0")
        for prev, nxt in zip(segs, segs[1:]):
            if prev.t_end != nxt.t_start:
                raise ValueError(f"gap or overlap between segments at t={prev.t_end}")
            if not _close(prev.position(prev.t_end), nxt.y0):
                raise ValueError(f"position jumps at t={prev.t_end}")
            v_before = prev.velocity(prev.t_end)
            kick = kicks_at.get(prev.t_end)
            v_expected = kick.apply(v_before) if kick else v_before
            if not _close(v_expected, nxt.v0):
                raise ValueError(f"velocity change at t={prev.t_end} matches no kick rule")

    @property
    def t_end(self) -> float:
        return self.segments[-1].t_end

    def segment_at(self, t: float) -> Segment:
        starts = [s.t_start for s in self.segments]
        i = bisect.bisect_right(starts, t) - 1
        return self.segments[max(i, 0)]


def _close(a, b):
    return abs(a - b) <= _JOIN_RTOL * max(abs(a), abs(b), 1e-300) or a == b


def evaluate(path: BeamPath, t: float) -> tuple[float, float]:
    """Position and vertical velocity of an arm at time ``t``.

    At a kick instant the post-kick velocity is returned.
    """
    if not (0.0 <= t <= path.t_end):
        raise ValueError(f"t={t} outside [0, {path.t_end}]")
    seg = path.segment_at(t)
    y, v = seg.position(t), seg.velocity(t)
    if t == path.t_end:
        for k in path.kicks:
            if k.t == t:
                v = k.apply(v)
    return y, v


def _arm(sign, p: ExperimentParams, df: DeviceFrame) -> BeamPath:
    T = p.T
    v = sign * p.v_y0
    lab = df.frame is Frame.LAB
    a = -p.g if lab else 0.0
    kicks = []
    if df.device is Device.ATOM:
        dv = p.hbar * p.kappa / p.m
        if sign > 0:
            # upper: absorbs at 0, re-emits at T
            v_in = v - dv
            kicks = [KickEvent(0.0, PhotonRecoil(dv)), KickEvent(T, PhotonRecoil(-dv))]
        else:
            # lower: absorbs at T, re-emits at 2T
            v_in = v
            kicks = [KickEvent(T, PhotonRecoil(dv)), KickEvent(2 * T, PhotonRecoil(-dv))]
    else:
        v_in = v
        v_mirror = 0.0 if lab else p.g * T
        kicks = [KickEvent(T, ElasticMirror(v_mirror))]
    first = Segment(0.0, T, 0.0, v, a, p.v_x0)
    y1, v1 = first.position(T), first.velocity(T)
    mid = next(k for k in kicks if k.t == T)
    second = Segment(T, 2 * T, y1, mid.apply(v1), a, p.v_x0)
    return BeamPath((first, second), tuple(kicks), Arm.UPPER if sign > 0 else Arm.LOWER, v_in)


def build_paths(df: DeviceFrame, p: ExperimentParams) -> tuple[BeamPath, BeamPath]:
    """(upper, lower) arms of device ``df.device`` seen from ``df.frame``."""
    return _arm(+1, p, df), _arm(-1, p, df)


def closure_heights(df: DeviceFrame, p: ExperimentParams) -> tuple[float, float]:
    upper, lower = build_paths(df, p)
    return evaluate(upper, 2 * p.T)[0], evaluate(lower, 2 * p.T)[0]


# recombination height in units of g T^2
_CLOSURE = {
    (Device.ATOM, Frame.LAB): -2.0,
    (Device.ATOM, Frame.FREE_FALL): 0.0,
    (Device.NEUTRON, Frame.LAB): 0.0,
    (Device.NEUTRON, Frame.FREE_FALL): 2.0,
}


def closure_height_closed_form(df: DeviceFrame, p: ExperimentParams) -> float:
    """Where the arms meet at 2T: -2gT^2, 0, 0, +2gT^2 (= 4d) for the four situations."""
    return _CLOSURE[(df.device, df.frame)] * p.g * p.T**2


def closure_gap(df: DeviceFrame, p: ExperimentParams) -> float:
    """|y_upper(2T) - y_lower(2T)|; the arms must recombine."""
    yu, yl = closure_heights(df, p)
    return abs(yu - yl)


def analyzer_height(df: DeviceFrame, p: ExperimentParams, t: float) -> float:
    """Height of the analyzer/detectors, which are at rest in the laboratory.

    In the free-fall frame the laboratory accelerates upward, so the analyzer
    has risen by g*t^2/2 (``4d`` at ``t = 2T``).
    """
    if df.frame is Frame.LAB:
        return 0.0
    return 0.5 * p.g * t * t


def bragg_acceptance_estimate(v0: float, L: float, p: ExperimentParams) -> tuple[float, float]:
    """Gravitational drop and deflection of a neutron crossing one ear spacing.

    Returns ``(drop, deflection)`` with ``drop = g (L/v0)^2 / 2`` in metres and
    ``deflection = g (L/v0) / v0`` in radians.
    """
    if not (v0 > 0 and L > 0):
        raise ValueError("v0 and L must be positive")
    t = L / v0
    return 0.5 * p.g * t * t, p.g * t / v0
