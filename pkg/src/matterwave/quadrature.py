"""Quadrature along piecewise ballistic trajectories.

The integrands are evaluated by a compiled kernel (``_ckernels``) when it has
been built, otherwise by the pure-Python twin (``_pykernels``). ``BACKEND``
names the one in use; :func:`use_backend` switches explicitly.
"""
from __future__ import annotations

import enum
import functools
from dataclasses import dataclass

import numpy as np

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["compiled"] = _ckernels

BACKEND = "compiled" if _ckernels is not None else "python"
_kernels = _BACKENDS[BACKEND]

MAX_DEPTH = 48


def use_backend(name: str) -> None:
    """Select ``"compiled"`` or ``"python"`` kernels for subsequent calls."""
    global BACKEND, _kernels
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(_BACKENDS)}")
    BACKEND = name
    _kernels = _BACKENDS[name]


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


class QuadratureError(RuntimeError):
    """Quadrature did not reach the requested tolerance."""


class Method(str, enum.Enum):
    GAUSS = "gauss"
    SIMPSON = "simpson"


@dataclass(frozen=True)
class QuadratureSpec:
    method: Method = Method.GAUSS
    rel_tol: float = 1e-12
    abs_tol: float = 1e-300
    order: int = 12

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.order < 2:
            raise ValueError("Gauss order must be at least 2")


@functools.lru_cache(maxsize=16)
def _legendre(order):
    x, w = np.polynomial.legendre.leggauss(order)
    x2, w2 = np.polynomial.legendre.leggauss(2 * order)
    return x, w, x2, w2


def integrate(kind: int, params, t0: float, t1: float, q: QuadratureSpec) -> float:
    x, w, x2, w2 = _legendre(q.order)
    method = _pykernels.GAUSS if q.method is Method.GAUSS else _pykernels.SIMPSON
    value, err, ok = _kernels.integrate(
        kind, tuple(float(v) for v in params), float(t0), float(t1), method,
        x, w, x2, w2, q.rel_tol, q.abs_tol, MAX_DEPTH,
    )
    if not ok:
        raise QuadratureError(
            f"{q.method.value} quadrature of integrand {kind} on [{t0}, {t1}] "
            f"missed tolerance (error estimate {err:.3g})"
        )
    return value


def arm_parts(seg, pot: float, t0: float, t1: float, q: QuadratureSpec, u0: float = 0.0):
    """(int (pot*y + u0) dt, -1/2 int (v^2 + v_x^2) dt) over [t0, t1] on one segment."""
    params = (pot, u0, seg.v_x, seg.y0, seg.v0, seg.a, seg.t_start)
    return (
        integrate(_pykernels.ARM_REDSHIFT, params, t0, t1, q),
        integrate(_pykernels.ARM_VELOCITY, params, t0, t1, q),
    )


def pair_parts(upper, lower, pot: float, t0: float, t1: float, q: QuadratureSpec, u0: float = 0.0):
    """Upper-minus-lower redshift and velocity integrals over [t0, t1].

    Both arms must share the horizontal speed, which then cancels exactly.
    """
    if upper.v_x != lower.v_x:
        raise ValueError("arms with different horizontal speeds")
    params = (
        pot, u0,
        upper.y0, upper.v0, upper.a, upper.t_start,
        lower.y0, lower.v0, lower.a, lower.t_start,
    )
    return (
        integrate(_pykernels.PAIR_REDSHIFT, params, t0, t1, q),
        integrate(_pykernels.PAIR_VELOCITY, params, t0, t1, q),
    )


def bend_excess(seg, q: QuadratureSpec) -> float:
    """Arc length of the segment minus its chord, without cancellation."""
    params = (seg.v_x, seg.v0, seg.a, seg.duration)
    return integrate(_pykernels.BEND, params, 0.0, seg.duration, q)
