"""Pure NumPy/Python kernels: the fallback backend.

Implements the same surface as the compiled extension ``_corex``:

* exponentially scaled modified Bessel K (Temme series for x < 2, the
  Thompson-Barnett continued fraction for x >= 2, upward recurrence in the
  order), vectorized over the argument;
* the xoshiro256++ generator with Box-Muller normals and Marsaglia-Tsang
  gamma variates, plus the four distributional-representation samplers and
  the quadratic-form sampler;
* symmetric eigenvalues (LAPACK via ``numpy.linalg.eigvalsh`` here; the
  compiled backend carries a dependency-free cyclic Jacobi).

The sampler code paths consume random numbers in exactly the same order as
the compiled twin, so a given (seed, rep, params, count) produces the same
stream on either backend.
"""

import math

import numpy as np

BACKEND = "pure"

# coefficients a_k of 1/Gamma(1+z) = sum_k a_k z^k  (Abramowitz & Stegun 6.1.34)
_INV_GAMMA1P = np.array([
    1.0000000000000000e0, 0.5772156649015329e0, -0.6558780715202538e0,
    -0.0420026350340952e0, 0.1665386113822915e0, -0.0421977345555443e0,
    -0.0096219715278770e0, 0.0072189432466630e0, -0.0011651675918591e0,
    -0.0002152416741149e0, 0.0001280502823882e0, -0.0000201348547807e0,
    -0.0000012504934821e0, 0.0000011330272320e0, -0.0000002056338417e0,
    0.0000000061160950e0, 0.0000000050020075e0, -0.0000000011812746e0,
    0.0000000001043427e0, 0.0000000000077823e0, -0.0000000000036968e0,
    0.0000000000005100e0, -0.0000000000000206e0, -0.0000000000000054e0,
    0.0000000000000014e0, 0.0000000000000001e0,
])

_TEMME_MAXIT = 80
_CF2_MAXIT = 20000


def _inv_gamma1p(z):
    """1/Gamma(1+z) for |z| <= 0.5."""
    acc = 0.0
    for c in _INV_GAMMA1P[::-1]:
        acc = acc * z + c
    return acc


def _temme_coeffs(mu):
    """Seeds for the Temme series at order |mu| <= 1/2.

    Returns (gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu)) with
    gam1 = [1/Gamma(1-mu) - 1/Gamma(1+mu)]/(2 mu) continued through mu = 0.
    """
    gp = _inv_gamma1p(mu)
    gm = _inv_gamma1p(-mu)
    gam2 = 0.5 * (gm + gp)
    if abs(mu) < 0.1:
        # odd-coefficient Taylor series; the direct quotient cancels near 0
        acc = 0.0
        p = 1.0
        mu2 = mu * mu
        for j in range(13):
            idx = 2 * j + 1
            if idx >= len(_INV_GAMMA1P):
                break
            acc += _INV_GAMMA1P[idx] * p
            p *= mu2
        gam1 = -acc
    else:
        gam1 = (gm - gp) / (2.0 * mu)
    return gam1, gam2, gp, gm


def _kv_temme_pair(mu, x):
    """Scaled pair (e^x K_mu, e^x K_{mu+1}) for array x in (0, 2), |mu| <= 1/2."""
    x = np.asarray(x, dtype=float)
    pimu = math.pi * mu
    fact = pimu / math.sin(pimu) if mu != 0.0 else 1.0
    gam1, gam2, gp, gm = _temme_coeffs(mu)

    d = -np.log(0.5 * x)
    e = mu * d
    if mu != 0.0:
        fact2 = np.sinh(e) / e
    else:
        fact2 = np.ones_like(x)
    ff = fact * (gam1 * np.cosh(e) + gam2 * fact2 * d)
    ssum = ff.copy()
    e = np.exp(e)
    p = 0.5 * e / gp
    q = 0.5 / (e * gm)
    c = np.ones_like(x)
    d2 = 0.25 * x * x
    ssum1 = p.copy()
    mu2 = mu * mu
    for i in range(1, _TEMME_MAXIT + 1):
        ff = (i * ff + p + q) / (i * i - mu2)
        c *= d2 / i
        p = p / (i - mu)
        q = q / (i + mu)
        dl = c * ff
        ssum += dl
        ssum1 += c * (p - i * ff)
        if np.all(np.abs(dl) < np.abs(ssum) * 1e-17):
            break
    scale = np.exp(x)
    return ssum * scale, ssum1 * (2.0 / x) * scale


def _kv_cf2_pair(mu, x):
    """Scaled pair (e^x K_mu, e^x K_{mu+1}) for array x >= 2, |mu| <= 1/2."""
    x = np.asarray(x, dtype=float)
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = d.copy()
    dh = d.copy()
    q1 = np.zeros_like(x)
    q2 = np.ones_like(x)
    a1 = 0.25 - mu * mu
    q = np.full_like(x, a1)
    c = a1
    a = -a1
    s = 1.0 + q * dh
    for i in range(2, _CF2_MAXIT + 1):
        a -= 2.0 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q = q + c * qnew
        b = b + 2.0
        d = 1.0 / (b + a * d)
        dh = (b * d - 1.0) * dh
        h = h + dh
        ds = q * dh
        s = s + ds
        if np.all(np.abs(ds) < np.abs(s) * 1e-17):
            break
    h = a1 * h
    kmu = np.sqrt(np.pi / (2.0 * x)) / s
    kmu1 = kmu * (mu + x + 0.5 - h) / x
    return kmu, kmu1


def kv_scaled_many(nu, x):
    """e^x K_nu(x) elementwise over an array x > 0 (fixed order nu).

    Uses K_{-nu} = K_nu, the two series branches at x = 2 and stable upward
    recurrence in the order.  Entries that overflow double precision come
    back as +inf.
    """
    nu = abs(float(nu))
    x = np.asarray(x, dtype=float)
    m = int(nu + 0.5)
    mu = nu - m  # in [-0.5, 0.5)
    out0 = np.empty_like(x)
    out1 = np.empty_like(x)
    small = x < 2.0
    if np.any(small):
        k0, k1 = _kv_temme_pair(mu, x[small])
        out0[small] = k0
        out1[small] = k1
    if np.any(~small):
        k0, k1 = _kv_cf2_pair(mu, x[~small])
        out0[~small] = k0
        out1[~small] = k1
    with np.errstate(over="ignore", invalid="ignore"):
        for j in range(m):
            out0, out1 = out1, out0 + (2.0 * (mu + j + 1) / x) * out1
    return out0


def kv_scaled(nu, x):
    """Scalar e^x K_nu(x)."""
    return float(kv_scaled_many(nu, np.array([float(x)]))[0])


def kv_scaled_pair_many(nu, x):
    """(e^x K_nu(x), e^x K_{nu+1}(x)) elementwise, nu >= 0."""
    nu = float(nu)
    if nu < 0:
        raise ValueError("kv_scaled_pair_many requires nu >= 0")
    x = np.asarray(x, dtype=float)
    m = int(nu + 0.5)
    mu = nu - m
    out0 = np.empty_like(x)
    out1 = np.empty_like(x)
    small = x < 2.0
    if np.any(small):
        k0, k1 = _kv_temme_pair(mu, x[small])
        out0[small] = k0
        out1[small] = k1
    if np.any(~small):
        k0, k1 = _kv_cf2_pair(mu, x[~small])
        out0[~small] = k0
        out1[~small] = k1
    with np.errstate(over="ignore", invalid="ignore"):
        for j in range(m):
            out0, out1 = out1, out0 + (2.0 * (mu + j + 1) / x) * out1
    return out0, out1


# ---------------------------------------------------------------------------
# xoshiro256++ and derived variates
# ---------------------------------------------------------------------------

_MASK64 = (1 << 64) - 1
_TWO_PI = 2.0 * math.pi


def _splitmix64_stream(seed):
    """Infinite SplitMix64 sequence used for state seeding."""
    z = seed & _MASK64
    while True:
        z = (z + 0x9E3779B97F4A7C15) & _MASK64
        t = z
        t = ((t ^ (t >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        t = ((t ^ (t >> 27)) * 0x94D049BB133111EB) & _MASK64
        yield (t ^ (t >> 31)) & _MASK64


def stream_seed(seed, stream_id):
    """Derive an independent 64-bit stream seed from (seed, stream_id)."""
    gen = _splitmix64_stream((seed ^ ((stream_id + 1) * 0x9E3779B97F4A7C15)) & _MASK64)
    return next(gen)


class Xoshiro256pp:
    """xoshiro256++ (Blackman & Vigna 2019), seeded through SplitMix64.

    Uniforms take the top 53 bits offset by half an ulp so they lie strictly
    inside (0, 1); normals are the trigonometric Box-Muller pair with the
    second value cached.  This exact consumption order is what makes batches
    reproducible across backends.
    """

    def __init__(self, seed):
        gen = _splitmix64_stream(int(seed))
        self.s0 = next(gen)
        self.s1 = next(gen)
        self.s2 = next(gen)
        self.s3 = next(gen)
        if self.s0 == self.s1 == self.s2 == self.s3 == 0:
            self.s0 = 1
        self._cached_normal = None

    def next64(self):
        s0, s1, s2, s3 = self.s0, self.s1, self.s2, self.s3
        tmp = (s0 + s3) & _MASK64
        result = (((tmp << 23) | (tmp >> 41)) + s0) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & _MASK64
        self.s0, self.s1, self.s2, self.s3 = s0, s1, s2, s3
        return result

    def uniform(self):
        return ((self.next64() >> 11) + 0.5) * 1.1102230246251565e-16  # 2^-53

    def normal(self):
        z = self._cached_normal
        if z is not None:
            self._cached_normal = None
            return z
        u1 = self.uniform()
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        a = _TWO_PI * u2
        self._cached_normal = r * math.sin(a)
        return r * math.cos(a)

    def gamma(self, shape):
        """Gamma(shape, scale=1) variate, shape >= 1/2.

        shape >= 1: Marsaglia-Tsang squeeze rejection.  shape == 1/2 exactly:
        half a squared normal.  Other shapes in (1/2, 1): boosted from
        shape+1 by a uniform power.
        """
        a = float(shape)
        if a < 0.5:
            raise ValueError("gamma sampling requires shape >= 1/2")
        if a == 0.5:
            z = self.normal()
            return 0.5 * z * z
        if a < 1.0:
            g = self.gamma(a + 1.0)
            u = self.uniform()
            return g * u ** (1.0 / a)
        d = a - 1.0 / 3.0
        c = 1.0 / math.sqrt(9.0 * d)
        while True:
            while True:
                z = self.normal()
                v = 1.0 + c * z
                if v > 0.0:
                    break
            v = v * v * v
            u = self.uniform()
            z2 = z * z
            if u < 1.0 - 0.0331 * z2 * z2:
                return d * v
            if math.log(u) < 0.5 * z2 + d * (1.0 - v + math.log(v)):
                return d * v

    def chisq(self, dof):
        return 2.0 * self.gamma(0.5 * dof)


def _sample_r1(n, rho, s_n, seed, count):
    rng = Xoshiro256pp(seed)
    root = math.sqrt(1.0 - rho * rho)
    out = np.empty(count)
    for i in range(count):
        acc = 0.0
        for _ in range(n):
            xj = rng.normal()
            wj = rng.normal()
            acc += root * xj * wj + rho * xj * xj
        out[i] = s_n * acc
    return out


def _sample_r2(n, rho, s_n, seed, count):
    rng = Xoshiro256pp(seed)
    root = math.sqrt(1.0 - rho * rho)
    out = np.empty(count)
    for i in range(count):
        s = rng.chisq(n)
        t = rng.normal()
        out[i] = rho * s_n * s + s_n * root * math.sqrt(s) * t
    return out


def _sample_r4(n, rho, s_n, seed, count):
    rng = Xoshiro256pp(seed)
    cp = 0.5 * s_n * (1.0 + rho)
    cm = 0.5 * s_n * (1.0 - rho)
    out = np.empty(count)
    for i in range(count):
        v = rng.chisq(n)
        vp = rng.chisq(n)
        out[i] = cp * v - cm * vp
    return out


def _sample_r5(n, rho, s_n, seed, count):
    # chi-square(n) for even n is -2 * sum of n/2 log-uniforms
    if n % 2 != 0:
        raise ValueError("the log-uniform representation needs even n")
    rng = Xoshiro256pp(seed)
    half = n // 2
    cp = s_n * (1.0 + rho)
    cm = s_n * (1.0 - rho)
    out = np.empty(count)
    for i in range(count):
        acc1 = 0.0
        for _ in range(half):
            acc1 += math.log(rng.uniform())
        acc2 = 0.0
        for _ in range(half):
            acc2 += math.log(rng.uniform())
        out[i] = -cp * acc1 + cm * acc2
    return out


_REP_FUNCS = {"R1": _sample_r1, "R2": _sample_r2, "R4": _sample_r4, "R5": _sample_r5}


def sample_rep(rep, n, rho, s_n, seed, count):
    """Draws of the n-copy product mean via representation rep."""
    try:
        fn = _REP_FUNCS[rep]
    except KeyError:
        raise ValueError(f"unknown representation {rep!r}") from None
    return fn(int(n), float(rho), float(s_n), int(seed), int(count))


def sample_quadform(lambdas, shift, seed, count):
    """Draws of shift + sum_j lambda_j (N_j^2 - 1)."""
    lam = [float(v) for v in np.asarray(lambdas, dtype=float)]
    rng = Xoshiro256pp(seed)
    out = np.empty(count)
    for i in range(count):
        acc = 0.0
        for lj in lam:
            z = rng.normal()
            acc += lj * (z * z - 1.0)
        out[i] = shift + acc
    return out


def uniforms(seed, count):
    """Raw uniform stream, mostly for backend-equivalence tests."""
    rng = Xoshiro256pp(seed)
    return np.array([rng.uniform() for _ in range(count)])


def normals(seed, count):
    rng = Xoshiro256pp(seed)
    return np.array([rng.normal() for _ in range(count)])


def gammas(shape, seed, count):
    rng = Xoshiro256pp(seed)
    return np.array([rng.gamma(shape) for _ in range(count)])


# ---------------------------------------------------------------------------
# symmetric eigenvalues
# ---------------------------------------------------------------------------

def sym_eigvals(a):
    """Eigenvalues of a symmetric matrix, ascending.

    The pure backend defers to LAPACK through NumPy; the compiled backend
    ships a cyclic Jacobi solver with the same contract.
    """
    return np.linalg.eigvalsh(np.asarray(a, dtype=float))
