"""Bracketed scalar root finding (Brent's method) and bracket expansion."""

import math

from .errors import NonConvergenceError

_EPS = 2.220446049250313e-16


def brentq(f, a, b, xtol=1e-12, ftol=0.0, max_iter=200):
    """Root of f in [a, b] with f(a), f(b) of opposite sign.

    Classic Brent inverse-quadratic/secant/bisection hybrid.  Stops when the
    bracket is narrower than xtol (plus a relative floor) or |f| <= ftol.
    Raises NonConvergenceError carrying the best bracket after max_iter.
    """
    fa = f(a)
    fb = f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0) == (fb > 0):
        raise ValueError(f"root not bracketed: f({a})={fa}, f({b})={fb}")
    c, fc = a, fa
    e = d = b - a
    for _ in range(max_iter):
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol = 2.0 * _EPS * abs(b) + 0.5 * xtol
        m = 0.5 * (c - b)
        if abs(m) <= tol or fb == 0.0 or abs(fb) <= ftol:
            return b
        if abs(e) < tol or abs(fa) <= abs(fb):
            e = d = m
        else:
            s = fb / fa
            if a == c:
                p = 2.0 * m * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0:
                q = -q
            else:
                p = -p
            s_prev = e
            e = d
            if 2.0 * p < 3.0 * m * q - abs(tol * q) and p < abs(0.5 * s_prev * q):
                d = p / q
            else:
                e = d = m
        a, fa = b, fb
        if abs(d) > tol:
            b += d
        else:
            b += tol if m > 0 else -tol
        fb = f(b)
        if (fb > 0) == (fc > 0):
            c, fc = a, fa
            e = d = b - a
    raise NonConvergenceError(
        f"Brent did not converge in {max_iter} iterations; "
        f"bracket [{min(b, c)}, {max(b, c)}]", best=b, err_est=abs(m))


def bracket_monotone(f, x0, step, grow=2.0, max_iter=200):
    """Bracket a root of a nondecreasing f by geometric one-sided expansion.

    Returns (lo, hi) with f(lo) <= 0 <= f(hi).
    """
    f0 = f(x0)
    if f0 == 0.0:
        return x0, x0
    if f0 < 0:
        lo = x0
        hi = x0 + step
        for _ in range(max_iter):
            if f(hi) >= 0:
                return lo, hi
            lo = hi
            step *= grow
            hi += step
    else:
        hi = x0
        lo = x0 - step
        for _ in range(max_iter):
            if f(lo) <= 0:
                return lo, hi
            hi = lo
            step *= grow
            lo -= step
    raise NonConvergenceError("no sign change found while expanding bracket",
                              best=(math.nan, math.nan))
