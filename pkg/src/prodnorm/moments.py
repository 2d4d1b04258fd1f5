"""Moments, cumulants and shape factors, by several independent routes.

Routes (all agree to ~1e-8 relative; the tests enforce this):

* recursion  -- Stein-identity recurrences in the raw and central moments,
* hypergeometric -- the 2F1 closed form (also gives absolute moments),
* kan        -- the n = 1 double-sum closed form,
* chisq_u    -- central moments via chi-square central moments expressed
                through the polynomial confluent U,
* rho0       -- the symmetric-case closed form,
* cgf        -- cumulants from the split-log cumulant generating function.

Cumulants have the closed form
    kappa_k = (n s_n^k / 2) (k-1)! [(1+rho)^k + (rho-1)^k].
"""

import math
from dataclasses import dataclass

from .params import DistParams
from .specfun import confluent_u_poly, gauss_2f1
from .errors import DomainError


@dataclass(frozen=True)
class MomentSet:
    """Raw moments, central moments and cumulants of orders 1..order."""

    order: int
    raw: tuple
    central: tuple
    cumulants: tuple
    route: str


def raw_moments_recursive(p: DistParams, order):
    """mu'_1..mu'_order via the raw-moment recurrence.

    mu'_{k+1} = (n+2k) rho s_n mu'_k + k(n+k-1) s_n^2 (1-rho^2) mu'_{k-1},
    seeded with mu'_0 = 1, mu'_1 = rho s.
    """
    n, rho, s_n = p.n, p.rho, p.s_n
    mus = [1.0, rho * p.s]
    for k in range(1, order):
        mus.append((n + 2 * k) * rho * s_n * mus[k]
                   + k * (n + k - 1) * s_n ** 2 * (1 - rho ** 2) * mus[k - 1])
    return mus[1:order + 1]


def central_moments_recursive(p: DistParams, order):
    """mu_1..mu_order via the central-moment recurrence.

    mu_{k+1} = 2k rho s_n mu_k
               + k s_n^2 (n+k-1+(n-k+1) rho^2) mu_{k-1}
               + k(k-1) n s_n^3 rho (1-rho^2) mu_{k-2},
    seeded with mu_0 = 1, mu_1 = 0, mu_2 = n s_n^2 (1+rho^2).
    """
    n, rho, s_n = p.n, p.rho, p.s_n
    mus = [1.0, 0.0, n * s_n ** 2 * (1 + rho ** 2)]
    for k in range(2, order):
        mus.append(2 * k * rho * s_n * mus[k]
                   + k * s_n ** 2 * (n + k - 1 + (n - k + 1) * rho ** 2) * mus[k - 1]
                   + k * (k - 1) * n * s_n ** 3 * rho * (1 - rho ** 2) * mus[k - 2])
    return mus[1:order + 1]


def cumulants(p: DistParams, order):
    """kappa_1..kappa_order from the closed form."""
    n, rho, s_n = p.n, p.rho, p.s_n
    out = []
    for k in range(1, order + 1):
        out.append(0.5 * n * s_n ** k * math.factorial(k - 1)
                   * ((1 + rho) ** k + (rho - 1) ** k))
    return out


def cumulants_from_cgf(p: DistParams, order):
    """Cumulants by Taylor-expanding the split-log CGF.

    -(n/2) log(1 - c t) contributes (n/2) c^k (k-1)! to kappa_k, applied to
    c = s_n (rho+1) and c = s_n (rho-1).
    """
    n, rho, s_n = p.n, p.rho, p.s_n
    cp = s_n * (rho + 1.0)
    cm = s_n * (rho - 1.0)
    return [0.5 * n * math.factorial(k - 1) * (cp ** k + cm ** k)
            for k in range(1, order + 1)]


def raw_from_cumulants(kappas):
    """mu'_1..mu'_K from kappa_1..kappa_K via the standard recursion."""
    order = len(kappas)
    raw = [1.0]  # mu'_0
    for k in range(1, order + 1):
        acc = 0.0
        for j in range(1, k + 1):
            acc += math.comb(k - 1, j - 1) * kappas[j - 1] * raw[k - j]
        raw.append(acc)
    return raw[1:]


def cumulants_from_raw(raw):
    """kappa_1..kappa_K from mu'_1..mu'_K."""
    order = len(raw)
    full = [1.0] + list(raw)
    kap = []
    for k in range(1, order + 1):
        acc = full[k]
        for j in range(1, k):
            acc -= math.comb(k - 1, j - 1) * kap[j - 1] * full[k - j]
        kap.append(acc)
    return kap


def central_from_raw(raw):
    """mu_1..mu_K about the mean, from raw moments."""
    order = len(raw)
    full = [1.0] + list(raw)
    m = raw[0]
    out = []
    for k in range(1, order + 1):
        acc = 0.0
        for j in range(0, k + 1):
            acc += math.comb(k, j) * full[j] * (-m) ** (k - j)
        out.append(acc)
    return out


def raw_from_central(central, mean):
    """mu'_1..mu'_K from central moments and the mean."""
    order = len(central)
    full = [1.0] + list(central)
    out = []
    for k in range(1, order + 1):
        acc = 0.0
        for j in range(0, k + 1):
            acc += math.comb(k, j) * full[j] * mean ** (k - j)
        out.append(acc)
    return out


def moments_recursive(p: DistParams, order) -> MomentSet:
    """MomentSet with raw/central from the recurrences, cumulants converted."""
    if order < 1:
        raise DomainError("order must be >= 1")
    raw = raw_moments_recursive(p, order)
    central = central_moments_recursive(p, order)
    return MomentSet(order, tuple(raw), tuple(central),
                     tuple(cumulants_from_raw(raw)), "recursion")


def moments_hypergeometric(p: DistParams, k):
    """(raw moment, absolute moment) of order k via the 2F1 closed form."""
    if k < 1:
        raise DomainError("k must be >= 1")
    n, rho, s_n = p.n, p.rho, p.s_n
    a = n + k
    b = 0.5 * n
    c = 0.5 * n + k + 1
    pref = (s_n ** k * math.gamma(n + k) * math.factorial(k)
            / ((1 - rho ** 2) ** (0.5 * n) * math.gamma(c) * math.gamma(b)))
    f_minus = gauss_2f1(a, b, c, -(1 - rho) / (1 + rho)).value
    f_plus = gauss_2f1(a, b, c, -(1 + rho) / (1 - rho)).value
    t_minus = (1 - rho) ** (n + k) * f_minus
    t_plus = (1 + rho) ** (n + k) * f_plus
    raw = pref * ((-1.0) ** k * t_minus + t_plus)
    absm = pref * (t_minus + t_plus)
    return raw, absm


def moments_kan_n1(p: DistParams, k):
    """Raw moment of order k for n = 1 via the double-factorial sum."""
    if p.n != 1:
        raise DomainError(f"the n=1 closed form needs n=1, got n={p.n}")
    if k < 1:
        raise DomainError("k must be >= 1")
    s, rho = p.s, p.rho
    pref = s ** k * math.factorial(k) ** 2 / 2.0 ** k
    acc = 0.0
    if k % 2 == 0:
        for j in range(k // 2 + 1):
            acc += ((2 * rho) ** (2 * j)
                    / (math.factorial(k // 2 - j) ** 2 * math.factorial(2 * j)))
    else:
        for j in range((k - 1) // 2 + 1):
            acc += ((2 * rho) ** (2 * j + 1)
                    / (math.factorial((k - 1) // 2 - j) ** 2
                       * math.factorial(2 * j + 1)))
    return pref * acc


def central_moments_chisq_route(p: DistParams, order):
    """mu_1..mu_order via chi-square central moments and the U polynomial.

    The k-th central moment of chi-square(n) is 2^k U(-k, 1-k-n/2, -n/2);
    the gamma-difference representation then gives a binomial convolution.
    """
    if order < 1:
        raise DomainError("order must be >= 1")
    n, rho, s_n = p.n, p.rho, p.s_n
    half_n = 0.5 * n
    u = [confluent_u_poly(j, 1 - j - half_n, -half_n) for j in range(order + 1)]
    out = []
    for k in range(1, order + 1):
        acc = 0.0
        for j in range(k + 1):
            acc += (math.comb(k, j) * u[j] * u[k - j]
                    * (1 + rho) ** j * (rho - 1) ** (k - j))
        out.append(s_n ** k * acc)
    return out


def raw_moment_rho0(p: DistParams, k):
    """Raw moment of order k in the symmetric case rho = 0.

    From the factorization into independent sqrt(chi-square(n)) and normal
    parts: E[S^a] = 2^a Gamma(n/2+a)/Gamma(n/2) for S ~ chi-square(n) and
    E[T^k] = 2^(k/2) Gamma((k+1)/2)/sqrt(pi) for even k, giving an overall
    2^k prefactor.
    """
    if p.rho != 0.0:
        raise DomainError("the rho=0 closed form needs rho=0")
    if k % 2 == 1:
        return 0.0
    n, s_n = p.n, p.s_n
    return (2.0 ** k * s_n ** k / math.sqrt(math.pi)
            * math.gamma(0.5 * (n + k)) * math.gamma(0.5 * (k + 1))
            / math.gamma(0.5 * n))


def shape(p: DistParams):
    """(skewness, kurtosis, excess kurtosis) closed forms."""
    n, rho = p.n, p.rho
    r2 = rho * rho
    gamma1 = 2 * rho * (3 + r2) / (math.sqrt(n) * (1 + r2) ** 1.5)
    beta2 = (3 * (n + 2) + 6 * (n + 6) * r2 + 3 * (n + 2) * r2 * r2) \
        / (n * (1 + r2) ** 2)
    return gamma1, beta2, beta2 - 3.0
