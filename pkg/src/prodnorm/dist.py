"""Analytic distribution theory for the mean of n copies of a zero-mean
correlated normal product.

The density is a variance-gamma type Bessel-K density

    f(x) = 2^((1-n)/2) |x|^((n-1)/2)
           / (s_n^((n+1)/2) sqrt(pi (1-rho^2)) Gamma(n/2))
           * exp(rho x / (s_n (1-rho^2))) K_((n-1)/2)(|x| / (s_n (1-rho^2)))

with semi-heavy tails decaying at rates 1/(s_n(1+rho)) on the right and
1/(s_n(1-rho)) on the left.  All evaluations go through the exponentially
scaled Bessel kernel and a log-space exponent, so the usable range extends
to the deep tails without overflow.

The CDF dispatches between three routes: a Struve-function closed form at
rho = 0, upper-incomplete-gamma closed forms for even n, and adaptive
quadrature of the density otherwise (split at the origin kink and at the
mode).  Quantiles invert the CDF with a bracketed Brent solve seeded by a
normal approximation.
"""

import cmath
import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from . import _kernels
from ._roots import bracket_monotone, brentq
from .errors import DomainError, NonConvergenceError, PrecisionLossError, \
    SingularityError
from .moments import cumulants
from .params import DistParams, NonZeroMeanParams
from .quadrature import integrate, integrate_cumulative
from .specfun import struve_l, upper_inc_gamma

__all__ = [
    "DistParams", "NonZeroMeanParams", "pdf", "log_pdf", "pdf_elementary",
    "pdf_tail_asymptote", "cdf", "cdf_grid", "survival", "survival_asymptote",
    "survival_upper_bound", "quantile", "mgf", "cf", "cgf", "mode",
    "mode_brackets", "median", "median_conjecture_audit", "ConjectureAudit",
    "limit_checks", "LimitReport", "pdf_nonzero_mean",
]


def _nu(p):
    return 0.5 * (p.n - 1)


def _bessel_scale(p):
    # both the exponent and the Bessel argument carry 1/(s_n (1 - rho^2))
    return p.s_n * (1.0 - p.rho ** 2)


def _log_pdf_const(p):
    n = p.n
    return (0.5 * (1 - n) * math.log(2.0) - 0.5 * (n + 1) * math.log(p.s_n)
            - 0.5 * math.log(math.pi * (1.0 - p.rho ** 2))
            - math.lgamma(0.5 * n))


def _pdf_zero_limit(p):
    """Finite x -> 0 limit of the density for n >= 2."""
    n = p.n
    if n < 2:
        raise SingularityError("the n=1 density diverges logarithmically at 0")
    return ((1.0 - p.rho ** 2) ** (0.5 * n - 1.0) / (2.0 * math.sqrt(math.pi)
            * p.s_n) * math.exp(math.lgamma(0.5 * (n - 1))
                                - math.lgamma(0.5 * n)))


def log_pdf(p: DistParams, x):
    """Natural log of the density at scalar x."""
    if x == 0.0:
        if p.n == 1:
            raise SingularityError(
                "the n=1 density diverges logarithmically at x=0")
        return math.log(_pdf_zero_limit(p))
    c = _bessel_scale(p)
    y = abs(x) / c
    khat = _kernels.kv_scaled(_nu(p), y)
    if not math.isfinite(khat):
        raise PrecisionLossError(f"Bessel kernel overflow at x={x}")
    return (_log_pdf_const(p) + _nu(p) * math.log(abs(x))
            + (p.rho * x - abs(x)) / c + math.log(khat))


def pdf(p: DistParams, x):
    """Density at scalar x (0.0 in the deep tails where exp underflows)."""
    try:
        return math.exp(log_pdf(p, x))
    except SingularityError:
        raise
    except OverflowError:
        raise PrecisionLossError(f"density overflow at x={x}") from None


def _pdf_array(p: DistParams, xs):
    """Vectorized density; x = 0 entries get the n >= 2 limit (inf if n=1)."""
    xs = np.asarray(xs, dtype=float)
    out = np.empty_like(xs)
    zero = xs == 0.0
    if np.any(zero):
        out[zero] = _pdf_zero_limit(p) if p.n >= 2 else math.inf
    nz = ~zero
    if np.any(nz):
        x = xs[nz]
        c = _bessel_scale(p)
        y = np.abs(x) / c
        khat = _kernels.kv_scaled_many(_nu(p), y)
        logf = (_log_pdf_const(p) + _nu(p) * np.log(np.abs(x))
                + (p.rho * x - np.abs(x)) / c + np.log(khat))
        with np.errstate(under="ignore"):
            out[nz] = np.exp(logf)
    return out


def pdf_elementary(p: DistParams, x):
    """Elementary-function density for even n (finite Bessel sum).

    Agrees with ``pdf`` to ~1e-10 relative; n = 2 reduces to the asymmetric
    Laplace density.
    """
    if p.n % 2 != 0:
        raise DomainError(f"pdf_elementary needs even n, got n={p.n}")
    n, s_n = p.n, p.s_n
    m = n // 2
    c = _bessel_scale(p)
    expo = (p.rho * x - abs(x)) / c
    acc = 0.0
    for j in range(m):
        coef = (math.factorial(m - 1 + j)
                / (math.factorial(m - 1 - j) * math.factorial(j)))
        acc += coef * (0.5 * c) ** j * abs(x) ** (m - 1 - j)
    return math.exp(expo) / ((2.0 * s_n) ** m * math.gamma(m)) * acc


def pdf_tail_asymptote(p: DistParams, x):
    """One-term tail form of the density for the sign of x.

    Right tail ~ x^(n/2-1) exp(-x/(s_n(1+rho))), left tail mirrored with
    rate 1/(s_n(1-rho)); pdf/asymptote -> 1 as |x| -> infinity.
    """
    if x == 0.0:
        raise DomainError("tail asymptote needs x != 0")
    n, s_n = p.n, p.s_n
    pref = 1.0 / ((2.0 * s_n) ** (0.5 * n) * math.gamma(0.5 * n))
    if x > 0:
        return pref * x ** (0.5 * n - 1.0) * math.exp(-x / (s_n * (1 + p.rho)))
    return pref * (-x) ** (0.5 * n - 1.0) * math.exp(x / (s_n * (1 - p.rho)))


def survival_asymptote(p: DistParams, x):
    """Right-tail survival asymptote, valid as x -> +infinity."""
    if x <= 0:
        raise DomainError("the survival asymptote is a right-tail form")
    n, s_n = p.n, p.s_n
    return ((1.0 + p.rho) / (2.0 ** (0.5 * n) * s_n ** (0.5 * n - 1.0)
            * math.gamma(0.5 * n)) * x ** (0.5 * n - 1.0)
            * math.exp(-x / (s_n * (1 + p.rho))))


def survival_upper_bound(p: DistParams, x):
    """The n = 1 bound: P(Z > x) < s (1+rho) f(x) for x > 0, rho in [0, 1).

    Tight as x -> infinity.  Only established for a single copy.
    """
    if p.n != 1:
        raise DomainError("the survival bound applies to n = 1")
    if not 0.0 <= p.rho < 1.0:
        raise DomainError("the survival bound needs rho in [0, 1)")
    if x <= 0:
        raise DomainError("the survival bound needs x > 0")
    return p.s * (1.0 + p.rho) * pdf(p, x)


def _tail_cut(p: DistParams, side, eps):
    """|x| beyond which the chosen tail mass is provably below eps."""
    n, s_n = p.n, p.s_n
    a = s_n * (1.0 + p.rho) if side > 0 else s_n * (1.0 - p.rho)
    # solve x = a (L + (n/2-1) log x) by fixed point; generous margins
    log_pref = (math.log1p(p.rho if side > 0 else -p.rho)
                - 0.5 * n * math.log(2.0) - (0.5 * n - 1.0) * math.log(s_n)
                - math.lgamma(0.5 * n))
    big_l = log_pref - math.log(eps) + 3.0
    x = a * max(40.0, big_l)
    for _ in range(8):
        x = a * (big_l + max(0.0, 0.5 * n - 1.0) * math.log(max(x, 2.0)))
    return 1.2 * x + 10.0 * a


def _cdf_struve_rho0(p: DistParams, x):
    """Closed form at rho = 0 via modified Struve functions."""
    y = abs(x) / p.s_n
    if y == 0.0:
        return 0.5
    nu_hi = _nu(p)            # (n-1)/2
    nu_lo = nu_hi - 1.0       # (n-3)/2
    k_hi = _kernels.kv_scaled(nu_hi, y) * math.exp(-y)
    k_lo = _kernels.kv_scaled(nu_lo, y) * math.exp(-y)
    l_hi = struve_l(nu_hi, y).value
    l_lo = struve_l(nu_lo, y).value
    return 0.5 + (x / (2.0 * p.s_n)) * (k_hi * l_lo + l_hi * k_lo)


def _cdf_incgamma_even(p: DistParams, x):
    """Closed form for even n via upper incomplete gamma sums."""
    n, rho, s_n = p.n, p.rho, p.s_n
    m = n // 2
    if x <= 0:
        base, other, arg = 1.0 - rho, 1.0 + rho, -x / (s_n * (1.0 - rho))
    else:
        base, other, arg = 1.0 + rho, 1.0 - rho, x / (s_n * (1.0 + rho))
    acc = 0.0
    for j in range(m):
        coef = (math.factorial(m - 1 + j)
                / (math.factorial(m - 1 - j) * math.factorial(j)))
        acc += coef * (0.5 * other) ** j * upper_inc_gamma(m - j, arg).value
    tail = base ** m / (2.0 ** m * math.factorial(m - 1)) * acc
    return tail if x <= 0 else 1.0 - tail


def _cdf_quadrature(p: DistParams, x, abs_tol=1e-11):
    """Adaptive quadrature route, integrating the smaller tail."""
    f = lambda xs: _pdf_array(p, xs)
    splits = (0.0, mode(p))
    if x <= p.mean:
        lo = -_tail_cut(p, -1, 0.1 * abs_tol)
        if x <= lo:
            return 0.0
        res = integrate(f, lo, x, abs_tol=abs_tol, rel_tol=0.0,
                        split_points=splits)
        return min(max(res.value, 0.0), 1.0)
    hi = _tail_cut(p, +1, 0.1 * abs_tol)
    if x >= hi:
        return 1.0
    res = integrate(f, x, hi, abs_tol=abs_tol, rel_tol=0.0,
                    split_points=splits)
    return min(max(1.0 - res.value, 0.0), 1.0)


def cdf(p: DistParams, x, method="auto"):
    """P(mean of n products <= x), absolute error <= 1e-9.

    method: "auto" picks the closed form when one exists (Struve at rho=0,
    incomplete gamma for even n) and quadrature otherwise; "struve",
    "incgamma" and "quadrature" force a route.
    """
    if method == "auto":
        if p.rho == 0.0 and abs(x) / p.s_n <= 600.0:
            return _cdf_struve_rho0(p, x)
        if p.n % 2 == 0:
            return _cdf_incgamma_even(p, x)
        return _cdf_quadrature(p, x)
    if method == "struve":
        if p.rho != 0.0:
            raise DomainError("the Struve closed form requires rho = 0")
        return _cdf_struve_rho0(p, x)
    if method == "incgamma":
        if p.n % 2 != 0:
            raise DomainError("the incomplete-gamma closed form needs even n")
        return _cdf_incgamma_even(p, x)
    if method == "quadrature":
        return _cdf_quadrature(p, x)
    raise ValueError(f"unknown cdf method {method!r}")


def cdf_grid(p: DistParams, xs, abs_tol=1e-9):
    """CDF on a nondecreasing grid in one cumulative quadrature sweep."""
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 1 or len(xs) == 0:
        raise ValueError("xs must be a nonempty 1-d grid")
    if p.rho == 0.0 or p.n % 2 == 0:
        return np.array([cdf(p, float(x)) for x in xs])
    base = cdf(p, float(xs[0]))
    if len(xs) == 1:
        return np.array([base])
    inc = integrate_cumulative(lambda t: _pdf_array(p, t), xs,
                               abs_tol=abs_tol, split_points=(0.0, mode(p)))
    return np.clip(base + np.concatenate([[0.0], np.cumsum(inc)]), 0.0, 1.0)


def survival(p: DistParams, x):
    """P(mean of n products > x) with guarded precision in the right tail."""
    if x <= 0.0:
        return min(max(1.0 - cdf(p, x), 0.0), 1.0)
    if p.rho == 0.0 and abs(x) / p.s_n <= 600.0:
        return min(max(1.0 - _cdf_struve_rho0(p, x), 0.0), 1.0)
    if p.n % 2 == 0:
        # the x > 0 branch of the closed form computes the tail directly
        n, rho, s_n = p.n, p.rho, p.s_n
        m = n // 2
        arg = x / (s_n * (1.0 + rho))
        acc = 0.0
        for j in range(m):
            coef = (math.factorial(m - 1 + j)
                    / (math.factorial(m - 1 - j) * math.factorial(j)))
            acc += coef * (0.5 * (1.0 - rho)) ** j \
                * upper_inc_gamma(m - j, arg).value
        return (1.0 + rho) ** m / (2.0 ** m * math.factorial(m - 1)) * acc
    hi = _tail_cut(p, +1, 1e-12)
    if x >= hi:
        return 0.0
    res = integrate(lambda t: _pdf_array(p, t), x, hi, abs_tol=1e-11,
                    rel_tol=1e-9, split_points=(mode(p),))
    return max(res.value, 0.0)


def quantile(p: DistParams, q):
    """x with |cdf(x) - q| <= 1e-8, by bracketed Brent iteration."""
    if not 0.0 < q < 1.0:
        raise DomainError(f"quantile needs q in (0, 1), got {q}")
    if p.rho == 0.0 and q == 0.5:
        return 0.0
    target = lambda x: cdf(p, x) - q
    z = NormalDist().inv_cdf(q)
    sd = math.sqrt(p.variance)
    x0 = p.mean + sd * z
    lo, hi = bracket_monotone(target, x0, 0.5 * sd)
    if lo == hi:
        return lo
    return brentq(target, lo, hi, xtol=1e-13 * max(p.s, 1.0), ftol=1e-9,
                  max_iter=200)


def mgf(p: DistParams, t):
    """Moment generating function; exists for -1/(1-rho) < s_n t < 1/(1+rho)."""
    s_n, rho = p.s_n, p.rho
    u = s_n * t
    if not -1.0 / (1.0 - rho) < u < 1.0 / (1.0 + rho):
        raise DomainError(
            f"mgf undefined at t={t}: s_n*t={u} outside "
            f"(-1/(1-rho), 1/(1+rho))")
    return (1.0 - 2.0 * rho * u - (1.0 - rho ** 2) * u ** 2) ** (-0.5 * p.n)


def cgf(p: DistParams, t):
    """Cumulant generating function in the numerically stable split-log form."""
    s_n, rho = p.s_n, p.rho
    u = s_n * t
    if not -1.0 / (1.0 - rho) < u < 1.0 / (1.0 + rho):
        raise DomainError(f"cgf undefined at t={t}")
    return -0.5 * p.n * (math.log1p(-(rho + 1.0) * u)
                         + math.log1p(-(rho - 1.0) * u))


def cf(p: DistParams, t):
    """Characteristic function (principal branch; Re of the base stays > 0)."""
    u = p.s_n * t
    base = complex(1.0 + (1.0 - p.rho ** 2) * u * u, -2.0 * p.rho * u)
    return base ** (-0.5 * p.n)


def cf_array(p: DistParams, ts):
    ts = np.asarray(ts, dtype=float)
    u = p.s_n * ts
    base = 1.0 + (1.0 - p.rho ** 2) * u * u - 2j * p.rho * u
    return base ** (-0.5 * p.n)


def mode_brackets(p: DistParams):
    """(lower, upper, refined_lower) bounds for the mode, rho != 0, n >= 3.

    lower/upper: rho s (1 - 3/n) and rho s (1 - 2/n).  refined_lower is the
    sharper n >= 4 bound (equality at n = 4), None for n = 3.
    """
    if p.n < 3 or p.rho == 0.0:
        raise DomainError("mode brackets apply for n >= 3 and rho != 0")
    n = p.n
    r = abs(p.rho)
    rs = r * p.s
    lo = rs * (1.0 - 3.0 / n)
    hi = rs * (1.0 - 2.0 / n)
    refined = None
    if n >= 4:
        refined = 0.5 * rs * (1.0 - 2.0 / n + math.sqrt(
            r ** 2 * (1.0 - 2.0 / n) ** 2
            + (1.0 - r ** 2) * (1.0 - 4.0 / n) ** 2))
    sgn = math.copysign(1.0, p.rho)
    if sgn > 0:
        return lo, hi, refined
    return -hi, -lo, (-refined if refined is not None else None)


def mode(p: DistParams):
    """The unique mode.

    0 for n <= 2 or rho = 0; closed forms for n = 4 and n = 6; otherwise
    the positive root of K_((n-3)/2)(y) = |rho| K_((n-1)/2)(y) found by
    Brent inside the guaranteed bracket, to 1e-10 * s in x.
    """
    n, rho, s = p.n, p.rho, p.s
    if n <= 2 or rho == 0.0:
        return 0.0
    r = abs(rho)
    sgn = math.copysign(1.0, rho)
    if n == 4:
        return sgn * 0.25 * r * s * (1.0 + r)
    if n == 6:
        return sgn * (r * s / 12.0) * (1.0 + r) * (
            3.0 - 1.0 / r + math.sqrt(1.0 / r ** 2 + 6.0 / r - 3.0))
    c = _bessel_scale(p)
    nu_hi = _nu(p)

    def ratio_gap(y):
        k_lo, k_hi = _kernels.kv_scaled_pair_many(nu_hi - 1.0, np.array([y]))
        return float(k_lo[0] / k_hi[0]) - r

    y_lo = max(r * (n - 3) / (1.0 - rho ** 2) * (1.0 - 1e-9), 1e-12)
    y_hi = r * (n - 2) / (1.0 - rho ** 2) * (1.0 + 1e-9)
    if p.n >= 5:
        refined = mode_brackets(p)[2]
        if refined is not None:
            y_lo = max(y_lo, abs(refined) / c * (1.0 - 1e-9))
    y_tol = 1e-10 * s / c
    y_star = brentq(ratio_gap, y_lo, y_hi, xtol=y_tol, max_iter=200)
    return sgn * y_star * c


def median(p: DistParams):
    """The median: 0 at rho = 0, closed form at n = 2, else quantile(1/2)."""
    if p.rho == 0.0:
        return 0.0
    if p.n == 2:
        s, rho = p.s, p.rho
        if rho >= 0:
            return 0.5 * s * (1.0 + rho) * math.log1p(rho)
        return -0.5 * s * (1.0 - rho) * math.log1p(-rho)
    return quantile(p, 0.5)


@dataclass(frozen=True)
class ConjectureAudit:
    """Checks of the conjectured median bounds (reported, not theorems)."""

    median: float
    mode: float
    mean: float
    lower: float            # (1 - 1/n) rho s
    upper_exp: float        # rho s exp(-2/(3n))
    upper_quad: float       # (1 - 2/(3n) + 2/(9 n^2)) rho s
    upper_n2: float | None  # (1 - 2(1-log 2)/n) rho s, n >= 2 only
    lower_ok: bool
    upper_exp_ok: bool
    upper_chain_ok: bool    # upper_exp < upper_quad (algebraic)
    upper_n2_ok: bool | None
    ordering_ok: bool       # mode <= median <= mean


def median_conjecture_audit(p: DistParams) -> ConjectureAudit:
    """Evaluate the conjectured median bounds at p (requires rho > 0)."""
    if not p.rho > 0.0:
        raise DomainError("the conjectured bounds are stated for rho > 0")
    n = p.n
    rs = p.rho * p.s
    med = median(p)
    md = mode(p)
    lower = (1.0 - 1.0 / n) * rs
    upper_exp = rs * math.exp(-2.0 / (3.0 * n))
    upper_quad = (1.0 - 2.0 / (3.0 * n) + 2.0 / (9.0 * n * n)) * rs
    upper_n2 = (1.0 - 2.0 * (1.0 - math.log(2.0)) / n) * rs if n >= 2 else None
    return ConjectureAudit(
        median=med, mode=md, mean=rs,
        lower=lower, upper_exp=upper_exp, upper_quad=upper_quad,
        upper_n2=upper_n2,
        lower_ok=lower < med,
        upper_exp_ok=med < upper_exp,
        upper_chain_ok=upper_exp < upper_quad,
        upper_n2_ok=(med <= upper_n2) if upper_n2 is not None else None,
        ordering_ok=md <= med <= rs,
    )


@dataclass(frozen=True)
class LimitReport:
    """Numerical checks of the three limit regimes."""

    chi2_cf_supdiff: dict       # rho -> sup_t |cf - chi2 cf| on |t| <= T
    std_kappa3: float           # kappa_3 / kappa_2^(3/2) = O(n^-1/2)
    std_kappa4: float           # kappa_4 / kappa_2^2    = O(n^-1)
    vg_params: tuple            # (n, rho s_n, s_n sqrt(1-rho^2), 0)


def limit_checks(p: DistParams, t_max=5.0, n_t=201,
                 rho_grid=(0.9, 0.99, 0.999)) -> LimitReport:
    """Chi-square CF limit as rho -> 1, CLT cumulant decay, VG mapping."""
    ts = np.linspace(-t_max, t_max, n_t)
    sup = {}
    for r in rho_grid:
        pr = DistParams(p.n, r, p.sigma_x, p.sigma_y)
        chi2_cf = (1.0 - 2j * pr.s_n * ts) ** (-0.5 * p.n)
        sup[r] = float(np.max(np.abs(cf_array(pr, ts) - chi2_cf)))
    k = cumulants(p, 4)
    return LimitReport(
        chi2_cf_supdiff=sup,
        std_kappa3=k[2] / k[1] ** 1.5,
        std_kappa4=k[3] / k[1] ** 2,
        vg_params=(p.n, p.rho * p.s_n,
                   p.s_n * math.sqrt(1.0 - p.rho ** 2), 0.0),
    )


def _log_kv_scaled_ladder(y, jmax):
    """log(e^y K_j(y)) for j = 0..jmax via the all-positive log recurrence."""
    logs = [math.log(_kernels.kv_scaled(0.0, y)),
            math.log(_kernels.kv_scaled(1.0, y))]
    for j in range(1, jmax):
        logs.append(logs[-1] + math.log(
            2.0 * j / y + math.exp(logs[-2] - logs[-1])))
    return logs


def pdf_nonzero_mean(q: NonZeroMeanParams, x, max_shells=200, rtol=1e-9,
                     shells=None):
    """Density of a single product with nonzero means, by the double series.

    Sums shell by shell (outer index pairs with an inner binomial sum) in
    rounds of doubling length until the geometric tail estimate drops below
    rtol * value, or ``shells`` terms if given.  Returns (value, tail_est);
    tail_est also carries a cancellation floor from the summed magnitudes.
    """
    if x == 0.0:
        raise SingularityError("the product density diverges at x = 0")
    sx, sy, rho = q.sigma_x, q.sigma_y, q.rho
    omr2 = 1.0 - rho ** 2
    s = sx * sy
    y = abs(x) / (omr2 * s)
    e0 = -(q.mu_x ** 2 / sx ** 2 + q.mu_y ** 2 / sy ** 2
           - 2.0 * rho * (x + q.mu_x * q.mu_y) / s) / (2.0 * omr2)
    alpha = q.mu_x / sx ** 2 - rho * q.mu_y / s
    beta = q.mu_y / sy ** 2 - rho * q.mu_x / s
    shift = e0 - y  # applied inside each term; keeps sums at density scale
    sgn_x = math.copysign(1.0, x)

    fixed = shells is not None
    cap = int(shells) if fixed else int(max_shells)
    logk = _log_kv_scaled_ladder(y, max(cap, 2))
    log_ax = math.log(abs(x))
    log_abs_alpha = math.log(abs(alpha)) if alpha != 0.0 else -math.inf
    log_abs_beta = math.log(abs(beta)) if beta != 0.0 else -math.inf

    total = 0.0
    mag_total = 0.0
    shell_mags = []
    n_shell = 0
    round_len = 8

    def add_shell(nn):
        nonlocal total, mag_total
        smag = 0.0
        base = (nn * log_ax - math.log(math.pi)
                - math.lgamma(2 * nn + 1) - (2 * nn + 0.5) * math.log(omr2)
                + shift)
        for m in range(2 * nn + 1):
            if (m > 0 and alpha == 0.0) or (m < 2 * nn and beta == 0.0):
                continue
            lt = (base + (m - nn - 1) * math.log(sx)
                  - (m - nn + 1) * math.log(sy)
                  + math.log(math.comb(2 * nn, m))
                  + logk[abs(m - nn)])
            if m > 0:
                lt += m * log_abs_alpha
            if m < 2 * nn:
                lt += (2 * nn - m) * log_abs_beta
            sgn = (sgn_x ** (2 * nn - m)
                   * math.copysign(1.0, alpha) ** m
                   * math.copysign(1.0, beta) ** (2 * nn - m))
            t = sgn * math.exp(lt)
            total += t
            smag += abs(t)
        mag_total += smag
        shell_mags.append(smag)

    while n_shell < cap:
        stop = min(cap, n_shell + round_len)
        while n_shell < stop:
            add_shell(n_shell)
            n_shell += 1
        round_len *= 2
        if fixed:
            continue
        if len(shell_mags) >= 2 and shell_mags[-2] > 0:
            r = shell_mags[-1] / shell_mags[-2]
            if r < 1.0:
                tail = shell_mags[-1] * r / (1.0 - r)
                if tail <= rtol * abs(total) and total > 0:
                    return total, tail + mag_total * 1e-16
        elif shell_mags[-1] == 0.0 and total > 0:
            return total, mag_total * 1e-16

    if fixed:
        r = (shell_mags[-1] / shell_mags[-2]
             if len(shell_mags) >= 2 and shell_mags[-2] > 0 else 1.0)
        tail = (shell_mags[-1] * r / (1.0 - r) if r < 1.0
                else shell_mags[-1])
        return total, tail + mag_total * 1e-16
    raise NonConvergenceError(
        f"nonzero-mean series not converged after {cap} shells",
        best=total, err_est=shell_mags[-1] if shell_mags else math.nan)
