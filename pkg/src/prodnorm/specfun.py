"""Special functions backing the distribution formulas.

Everything here is self-contained (backed by the kernel backend for Bessel
K) and certified only on the domains the distribution formulas use:

* ``bessel_k`` / ``bessel_k_scaled``: any real order, x > 0, |order| <= 60
  and 1e-8 <= x <= 700 at <= 1e-12 relative error;
* ``struve_l``: the modified Struve function L_nu for nu > -3/2, x >= 0,
  by the ascending power series (all terms positive, no cancellation);
* ``gauss_2f1``: 2F1(a, b; c; z) for z <= 0 (plus small positive z), via
  the Pfaff transformation w = z/(z-1) which maps z <= 0 into [0, 1);
* ``upper_inc_gamma``: Gamma(a, x), a > 0, by the lower series or the
  Lentz continued fraction depending on the branch;
* ``confluent_u_poly``: the polynomial case U(-m, b, x);
* ``bessel_ratio_bounds``: two-sided and sharp bounds on K_{nu-1}/K_nu.

Each evaluation returns an EvalResult with a heuristic absolute error
estimate alongside the value.
"""

import math
from dataclasses import dataclass

from . import _kernels
from .errors import DomainError, OverflowSignal, PrecisionLossError

_LOG_DBL_MAX = 709.78


@dataclass(frozen=True)
class EvalResult:
    """A special-function value with a heuristic absolute error estimate."""

    value: float
    abs_err_est: float

    def __float__(self):
        return self.value


def bessel_k_scaled(nu, x):
    """e^x K_nu(x); the overflow-safe workhorse behind the densities."""
    if not x > 0:
        raise DomainError(f"bessel_k requires x > 0, got {x}")
    v = _kernels.kv_scaled(nu, x)
    if not math.isfinite(v):
        raise OverflowSignal(
            f"e^x K_nu over/underflows double precision at nu={nu}, x={x}")
    # Temme/CF2 seeds are good to ~1e-15; recurrence adds O(steps) ulps
    steps = int(abs(nu) + 0.5)
    return EvalResult(v, abs(v) * 1e-15 * (2.0 + 0.25 * steps))


def bessel_k(nu, x):
    """K_nu(x) for real nu and x > 0 (K_{-nu} = K_nu).

    Raises OverflowSignal when the unscaled value leaves double range;
    ``bessel_k_scaled`` covers those regimes.
    """
    if not x > 0:
        raise DomainError(f"bessel_k requires x > 0, got {x}")
    if x > 705.0:
        raise OverflowSignal(
            f"e^-x underflows at x={x}; use bessel_k_scaled")
    scaled = bessel_k_scaled(nu, x)
    v = scaled.value * math.exp(-x)
    if v == 0.0 or not math.isfinite(v):
        raise OverflowSignal(
            f"K_nu(x) not representable at nu={nu}, x={x}; "
            f"use bessel_k_scaled")
    return EvalResult(v, scaled.abs_err_est * math.exp(-x) + abs(v) * 1e-16)


_STRUVE_MAXTERMS = 6000


def struve_l(nu, x):
    """Modified Struve function of the first kind, nu > -3/2, x >= 0.

    Ascending series sum_j (x/2)^(nu+2j+1) / (Gamma(j+3/2) Gamma(j+nu+3/2)).
    All terms are nonnegative so there is no cancellation; the error
    estimate is a geometric bound on the truncated tail.
    """
    if nu <= -1.5:
        raise DomainError(f"struve_l requires nu > -3/2, got {nu}")
    if x < 0:
        raise DomainError(f"struve_l requires x >= 0, got {x}")
    if x == 0.0:
        if nu > -1.0:
            return EvalResult(0.0, 0.0)
        if nu == -1.0:
            # the only needed order with a finite nonzero limit: 2/pi
            return EvalResult(1.0 / (math.gamma(1.5) * math.gamma(0.5)),
                              1e-16)
        raise DomainError(f"struve_l diverges at x=0 for nu={nu} < -1")
    half = 0.5 * x
    log_t0 = (nu + 1.0) * math.log(half) - math.lgamma(1.5) \
        - math.lgamma(nu + 1.5)
    if log_t0 > _LOG_DBL_MAX - 10:
        raise OverflowSignal(f"struve_l overflows at nu={nu}, x={x}")
    term = math.exp(log_t0)
    total = term
    h2 = half * half
    for j in range(_STRUVE_MAXTERMS):
        term *= h2 / ((j + 1.5) * (j + nu + 1.5))
        total += term
        if term < total * 1e-17 and j + 1 > half:
            ratio = h2 / ((j + 2.5) * (j + nu + 2.5))
            tail = term * ratio / (1.0 - ratio) if ratio < 1 else term
            return EvalResult(total, tail + total * 5e-16)
        if not math.isfinite(total):
            raise OverflowSignal(f"struve_l overflows at nu={nu}, x={x}")
    raise PrecisionLossError(
        f"struve_l series needed more than {_STRUVE_MAXTERMS} terms "
        f"(nu={nu}, x={x})")


_2F1_MAXTERMS = 20000


def gauss_2f1(a, b, c, z):
    """Gauss hypergeometric 2F1(a, b; c; z) for z <= 0 (and small z > 0).

    For z < 0 the Pfaff transformation
        2F1(a, b; c; z) = (1-z)^(-a) 2F1(a, c-b; c; z/(z-1))
    maps the argument into [0, 1).  On the argument sets the moment
    formulas need, a > 0 and c - b > 0, so the transformed series has
    nonnegative terms and converges without cancellation.
    """
    if c <= 0 and c == int(c):
        raise DomainError(f"2F1 pole: c must not be a nonpositive integer, c={c}")
    if z == 0.0:
        return EvalResult(1.0, 0.0)
    if z > 0.9:
        raise DomainError(
            f"gauss_2f1 is only certified for z <= 0.9, got z={z}")
    if z < 0.0:
        w = z / (z - 1.0)
        pref = (1.0 - z) ** (-a)
        aa, bb = a, c - b
    else:
        w = z
        pref = 1.0
        aa, bb = a, b
    term = 1.0
    total = 1.0
    for j in range(_2F1_MAXTERMS):
        term *= (aa + j) * (bb + j) / ((c + j) * (j + 1.0)) * w
        total += term
        if abs(term) < abs(total) * 1e-17:
            return EvalResult(pref * total,
                              abs(pref * total) * 1e-15 * (1 + 0.01 * j))
    raise PrecisionLossError(
        f"2F1 series did not converge in {_2F1_MAXTERMS} terms "
        f"(a={a}, b={b}, c={c}, z={z})")


def upper_inc_gamma(a, x):
    """Upper incomplete gamma Gamma(a, x), a > 0, x >= 0.

    Lower series for x < a + 1, Lentz continued fraction otherwise
    (the classic gammp/gammq split).
    """
    if a <= 0:
        raise DomainError(f"upper_inc_gamma requires a > 0, got a={a}")
    if x < 0:
        raise DomainError(f"upper_inc_gamma requires x >= 0, got x={x}")
    lg = math.lgamma(a)
    if x == 0.0:
        return EvalResult(math.exp(lg), math.exp(lg) * 2e-16)
    log_pre = a * math.log(x) - x
    if x < a + 1.0:
        # P(a,x) by series, then Gamma(a,x) = Gamma(a)(1 - P)
        term = 1.0 / a
        total = term
        ap = a
        for _ in range(10000):
            ap += 1.0
            term *= x / ap
            total += term
            if abs(term) < abs(total) * 1e-17:
                break
        p = total * math.exp(log_pre - lg)
        v = math.exp(lg) * (1.0 - p)
        return EvalResult(v, (abs(v) + math.exp(lg) * p) * 5e-16)
    # continued fraction for Q(a,x) (modified Lentz)
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    v = math.exp(log_pre) * h
    return EvalResult(v, abs(v) * 1e-15)


def pochhammer(a, j):
    """Rising factorial (a)_j with (a)_0 = 1."""
    out = 1.0
    for i in range(j):
        out *= a + i
    return out


def confluent_u_poly(m, b, x):
    """U(-m, b, x) for nonnegative integer m: the exact polynomial case.

    U(-m, b, x) = (-1)^m sum_{j=0}^m C(m, j) (b+j)_{m-j} (-x)^j.
    """
    if m < 0 or m != int(m):
        raise DomainError(f"confluent_u_poly requires integer m >= 0, got {m}")
    m = int(m)
    total = 0.0
    for j in range(m + 1):
        total += math.comb(m, j) * pochhammer(b + j, m - j) * (-x) ** j
    return (-1.0) ** m * total


def bessel_ratio_bounds(nu, x):
    """Bounds on the ratio K_{nu-1}(x)/K_nu(x).

    Returns (lower, upper, sharp):
      lower/upper : x/(nu-1/2+sqrt((nu-1/2)^2+x^2)) < ratio <
                    x/(nu-1+sqrt((nu-1)^2+x^2)), valid for nu > 1/2;
      sharp       : ratio <= x/(nu-1/2+sqrt((nu-3/2)^2+x^2)) for nu >= 3/2
                    (equality iff nu = 3/2); None when nu < 3/2.
    """
    if not x > 0:
        raise DomainError(f"bessel_ratio_bounds requires x > 0, got {x}")
    if nu <= 0.5:
        raise DomainError(f"ratio bounds need nu > 1/2, got nu={nu}")
    lower = x / (nu - 0.5 + math.hypot(nu - 0.5, x))
    upper = x / (nu - 1.0 + math.hypot(nu - 1.0, x))
    sharp = None
    if nu >= 1.5:
        sharp = x / (nu - 0.5 + math.hypot(nu - 1.5, x))
    return lower, upper, sharp
