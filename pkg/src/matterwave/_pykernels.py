"""Pure-Python quadrature kernels (fallback for ``_ckernels``).

Both modules expose the same ``integrate`` function and integrand codes; keep
them in step.
"""
import math

ARM_REDSHIFT = 0
ARM_VELOCITY = 1
PAIR_REDSHIFT = 2
PAIR_VELOCITY = 3
BEND = 4

GAUSS = 0
SIMPSON = 1

# Error floor relative to the integrated size of the terms entering each
# integrand; the pair integrands are differences and can sit at rounding level.
ROUNDING_FLOOR = 32.0 * 2.220446049250313e-16


def _make_integrand(kind, p):
    if kind == ARM_REDSHIFT:
        pot, u0, _vx, y0, v0, a, ts = p[:7]

        def f(t):
            s = t - ts
            return pot * (y0 + v0 * s + 0.5 * a * s * s) + u0

    elif kind == ARM_VELOCITY:
        _pot, _u0, vx, _y0, v0, a, ts = p[:7]

        def f(t):
            v = v0 + a * (t - ts)
            return -0.5 * (v * v + vx * vx)

    elif kind == PAIR_REDSHIFT:
        pot, u0, yu0, vu0, au, tsu, yl0, vl0, al, tsl = p[:10]

        def f(t):
            su = t - tsu
            sl = t - tsl
            yu = yu0 + vu0 * su + 0.5 * au * su * su
            yl = yl0 + vl0 * sl + 0.5 * al * sl * sl
            return (pot * yu + u0) - (pot * yl + u0)

    elif kind == PAIR_VELOCITY:
        _pot, _u0, _yu0, vu0, au, tsu, _yl0, vl0, al, tsl = p[:10]

        def f(t):
            vu = vu0 + au * (t - tsu)
            vl = vl0 + al * (t - tsl)
            return -0.5 * (vu - vl) * (vu + vl)

    elif kind == BEND:
        vx, v0, a, dt = p[:4]
        vbar = v0 + 0.5 * a * dt
        speed_bar = math.hypot(vx, vbar)

        def f(s):
            vy = v0 + a * s
            return a * (s - 0.5 * dt) * (vy + vbar) / (math.hypot(vx, vy) + speed_bar)

    else:
        raise ValueError(f"unknown integrand kind {kind}")
    return f


def _make_magnitude(kind, p, f):
    """Size of the terms combined in the integrand (for the rounding floor)."""
    if kind == ARM_REDSHIFT:
        pot, u0, _vx, y0, v0, a, ts = p[:7]

        def mag(t):
            s = t - ts
            return abs(pot * (y0 + v0 * s + 0.5 * a * s * s)) + abs(u0)

    elif kind == PAIR_REDSHIFT:
        pot, u0, yu0, vu0, au, tsu, yl0, vl0, al, tsl = p[:10]

        def mag(t):
            su = t - tsu
            sl = t - tsl
            yu = yu0 + vu0 * su + 0.5 * au * su * su
            yl = yl0 + vl0 * sl + 0.5 * al * sl * sl
            return abs(pot * yu) + abs(pot * yl) + 2.0 * abs(u0)

    elif kind == PAIR_VELOCITY:
        _pot, _u0, _yu0, vu0, au, tsu, _yl0, vl0, al, tsl = p[:10]

        def mag(t):
            vu = vu0 + au * (t - tsu)
            vl = vl0 + al * (t - tsl)
            return 0.5 * (vu * vu + vl * vl)

    else:
        def mag(t):
            return abs(f(t))
    return mag


def _gauss(f, mag, t0, t1, x, w):
    half = 0.5 * (t1 - t0)
    mid = 0.5 * (t1 + t0)
    total = 0.0
    scale = 0.0
    size = 0.0
    for xi, wi in zip(x, w):
        t = mid + half * xi
        fi = f(t)
        total += wi * fi
        scale += wi * abs(fi)
        size += wi * mag(t)
    return half * total, abs(half) * scale, abs(half) * size


def _simpson(f, a, b, fa, fm, fb, whole, eps, depth):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if abs(delta) <= 15.0 * eps:
        return left + right + delta / 15.0, True
    if depth <= 0:
        return left + right + delta / 15.0, False
    lv, lok = _simpson(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)
    rv, rok = _simpson(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)
    return lv + rv, lok and rok


def integrate(kind, params, t0, t1, method, x, w, x2, w2, rel_tol, abs_tol, max_depth):
    """Integrate integrand ``kind`` over [t0, t1].

    Returns ``(value, error_estimate, converged)``. Gauss compares the rule
    given by (x, w) against the finer (x2, w2); Simpson is adaptive with
    recursion limit ``max_depth``. Both accept an error of
    ``max(abs_tol, rel_tol * int|f|, ROUNDING_FLOOR * int(term sizes))``.
    """
    f = _make_integrand(kind, params)
    mag = _make_magnitude(kind, params, f)
    if t1 == t0:
        return 0.0, 0.0, True
    if method == GAUSS:
        coarse, _, _ = _gauss(f, mag, t0, t1, x, w)
        fine, scale, size = _gauss(f, mag, t0, t1, x2, w2)
        err = abs(fine - coarse)
        return fine, err, err <= max(abs_tol, rel_tol * scale, ROUNDING_FLOOR * size)
    fa, fm, fb = f(t0), f(0.5 * (t0 + t1)), f(t1)
    h6 = abs(t1 - t0) / 6.0
    whole = (t1 - t0) / 6.0 * (fa + 4.0 * fm + fb)
    scale = h6 * (abs(fa) + 4.0 * abs(fm) + abs(fb))
    size = h6 * (mag(t0) + 4.0 * mag(0.5 * (t0 + t1)) + mag(t1))
    # tolerances below rounding level would only recurse to max_depth
    eps = max(abs_tol, rel_tol * scale, ROUNDING_FLOOR * size)
    value, ok = _simpson(f, t0, t1, fa, fm, fb, whole, eps, max_depth)
    return value, abs(value - whole), ok
