# cython: language_level=3
"""Compiled quadrature kernels; same interface as ``_pykernels``."""
from libc.float cimport DBL_EPSILON
from libc.math cimport fabs, hypot

ARM_REDSHIFT = 0
ARM_VELOCITY = 1
PAIR_REDSHIFT = 2
PAIR_VELOCITY = 3
BEND = 4

GAUSS = 0
SIMPSON = 1

ROUNDING_FLOOR = 32.0 * DBL_EPSILON

cdef enum:
    NPARAM = 10


cdef struct Integrand:
    int kind
    double p[NPARAM]
    double vbar
    double speed_bar


cdef inline double _eval(Integrand* g, double t) nogil:
    cdef double s, su, sl, yu, yl, v, vu, vl, vy
    cdef double* p = g.p
    if g.kind == 0:
        s = t - p[6]
        return p[0] * (p[3] + p[4] * s + 0.5 * p[5] * s * s) + p[1]
    elif g.kind == 1:
        v = p[4] + p[5] * (t - p[6])
        return -0.5 * (v * v + p[2] * p[2])
    elif g.kind == 2:
        su = t - p[5]
        sl = t - p[9]
        yu = p[2] + p[3] * su + 0.5 * p[4] * su * su
        yl = p[6] + p[7] * sl + 0.5 * p[8] * sl * sl
        return (p[0] * yu + p[1]) - (p[0] * yl + p[1])
    elif g.kind == 3:
        vu = p[3] + p[4] * (t - p[5])
        vl = p[7] + p[8] * (t - p[9])
        return -0.5 * (vu - vl) * (vu + vl)
    else:
        vy = p[1] + p[2] * t
        return p[2] * (t - 0.5 * p[3]) * (vy + g.vbar) / (hypot(p[0], vy) + g.speed_bar)


cdef inline double _mag(Integrand* g, double t) nogil:
    # size of the terms combined in the integrand (rounding floor)
    cdef double s, su, sl, yu, yl, vu, vl
    cdef double* p = g.p
    if g.kind == 0:
        s = t - p[6]
        return fabs(p[0] * (p[3] + p[4] * s + 0.5 * p[5] * s * s)) + fabs(p[1])
    elif g.kind == 2:
        su = t - p[5]
        sl = t - p[9]
        yu = p[2] + p[3] * su + 0.5 * p[4] * su * su
        yl = p[6] + p[7] * sl + 0.5 * p[8] * sl * sl
        return fabs(p[0] * yu) + fabs(p[0] * yl) + 2.0 * fabs(p[1])
    elif g.kind == 3:
        vu = p[3] + p[4] * (t - p[5])
        vl = p[7] + p[8] * (t - p[9])
        return 0.5 * (vu * vu + vl * vl)
    return fabs(_eval(g, t))


cdef void _gauss(Integrand* g, double t0, double t1, const double[:] x,
                 const double[:] w, double* total, double* scale, double* size) nogil:
    cdef double half = 0.5 * (t1 - t0)
    cdef double mid = 0.5 * (t1 + t0)
    cdef double acc = 0.0, acc_abs = 0.0, acc_mag = 0.0, fi, t
    cdef Py_ssize_t i
    for i in range(x.shape[0]):
        t = mid + half * x[i]
        fi = _eval(g, t)
        acc += w[i] * fi
        acc_abs += w[i] * fabs(fi)
        acc_mag += w[i] * _mag(g, t)
    total[0] = half * acc
    scale[0] = fabs(half) * acc_abs
    size[0] = fabs(half) * acc_mag


cdef double _simpson(Integrand* g, double a, double b, double fa, double fm,
                     double fb, double whole, double eps, int depth, int* ok) nogil:
    cdef double m = 0.5 * (a + b)
    cdef double lm = 0.5 * (a + m)
    cdef double rm = 0.5 * (m + b)
    cdef double flm = _eval(g, lm)
    cdef double frm = _eval(g, rm)
    cdef double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    cdef double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    cdef double delta = left + right - whole
    if fabs(delta) <= 15.0 * eps:
        return left + right + delta / 15.0
    if depth <= 0:
        ok[0] = 0
        return left + right + delta / 15.0
    return (_simpson(g, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1, ok)
            + _simpson(g, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1, ok))


def integrate(int kind, params, double t0, double t1, int method,
              const double[:] x, const double[:] w, const double[:] x2,
              const double[:] w2, double rel_tol, double abs_tol, int max_depth):
    """Integrate integrand ``kind`` over [t0, t1]; returns (value, error, converged)."""
    cdef Integrand g
    cdef Py_ssize_t i
    cdef double coarse, fine, scale, size, err, fa, fm, fb, whole, eps, value, h6
    cdef int ok = 1
    if kind < 0 or kind > 4:
        raise ValueError(f"unknown integrand kind {kind}")
    g.kind = kind
    for i in range(NPARAM):
        g.p[i] = 0.0
    for i in range(min(len(params), NPARAM)):
        g.p[i] = params[i]
    if kind == 4:
        g.vbar = g.p[1] + 0.5 * g.p[2] * g.p[3]
        g.speed_bar = hypot(g.p[0], g.vbar)
    if t1 == t0:
        return 0.0, 0.0, True
    if method == 0:
        _gauss(&g, t0, t1, x, w, &coarse, &scale, &size)
        _gauss(&g, t0, t1, x2, w2, &fine, &scale, &size)
        err = fabs(fine - coarse)
        return fine, err, err <= max(abs_tol, rel_tol * scale, ROUNDING_FLOOR * size)
    fa = _eval(&g, t0)
    fm = _eval(&g, 0.5 * (t0 + t1))
    fb = _eval(&g, t1)
    h6 = fabs(t1 - t0) / 6.0
    whole = (t1 - t0) / 6.0 * (fa + 4.0 * fm + fb)
    scale = h6 * (fabs(fa) + 4.0 * fabs(fm) + fabs(fb))
    size = h6 * (_mag(&g, t0) + 4.0 * _mag(&g, 0.5 * (t0 + t1)) + _mag(&g, t1))
    # tolerances below rounding level would only recurse to max_depth
    eps = max(abs_tol, rel_tol * scale, ROUNDING_FLOOR * size)
    with nogil:
        value = _simpson(&g, t0, t1, fa, fm, fb, whole, eps, max_depth, &ok)
    return value, fabs(value - whole), bool(ok)
