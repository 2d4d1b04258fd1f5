# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, cpow=True
"""Compiled kernels: the hot inner loops behind the pure-Python fallback.

Mirrors ``_pure`` exactly: scaled Bessel K (Temme series / CF2 /
recurrence), the xoshiro256++ variate stack, the representation samplers
and a cyclic Jacobi symmetric eigensolver.  Algorithms and evaluation
order are kept identical so both backends produce the same streams
(the build disables FMA contraction for this reason).
"""

from libc.math cimport cosh, exp, fabs, log, sin, sinh, sqrt, M_PI

# The trig pair goes through noinline helpers: otherwise GCC fuses the
# sin/cos of one argument into glibc sincos, whose last bit can differ
# from separate sin and cos calls, breaking bit-equality with the pure
# backend.
cdef extern from *:
    """
    #include <math.h>
    __attribute__((noinline)) static double prodnorm_cos(double x)
    { return cos(x); }
    __attribute__((noinline)) static double prodnorm_sin(double x)
    { return sin(x); }
    """
    double prodnorm_cos(double) noexcept nogil
    double prodnorm_sin(double) noexcept nogil

import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"

cdef double[26] _INV_GAMMA1P
_INV_GAMMA1P[0] = 1.0000000000000000e0
_INV_GAMMA1P[1] = 0.5772156649015329e0
_INV_GAMMA1P[2] = -0.6558780715202538e0
_INV_GAMMA1P[3] = -0.0420026350340952e0
_INV_GAMMA1P[4] = 0.1665386113822915e0
_INV_GAMMA1P[5] = -0.0421977345555443e0
_INV_GAMMA1P[6] = -0.0096219715278770e0
_INV_GAMMA1P[7] = 0.0072189432466630e0
_INV_GAMMA1P[8] = -0.0011651675918591e0
_INV_GAMMA1P[9] = -0.0002152416741149e0
_INV_GAMMA1P[10] = 0.0001280502823882e0
_INV_GAMMA1P[11] = -0.0000201348547807e0
_INV_GAMMA1P[12] = -0.0000012504934821e0
_INV_GAMMA1P[13] = 0.0000011330272320e0
_INV_GAMMA1P[14] = -0.0000002056338417e0
_INV_GAMMA1P[15] = 0.0000000061160950e0
_INV_GAMMA1P[16] = 0.0000000050020075e0
_INV_GAMMA1P[17] = -0.0000000011812746e0
_INV_GAMMA1P[18] = 0.0000000001043427e0
_INV_GAMMA1P[19] = 0.0000000000077823e0
_INV_GAMMA1P[20] = -0.0000000000036968e0
_INV_GAMMA1P[21] = 0.0000000000005100e0
_INV_GAMMA1P[22] = -0.0000000000000206e0
_INV_GAMMA1P[23] = -0.0000000000000054e0
_INV_GAMMA1P[24] = 0.0000000000000014e0
_INV_GAMMA1P[25] = 0.0000000000000001e0


cdef double _inv_gamma1p(double z) noexcept nogil:
    cdef double acc = 0.0
    cdef int k
    for k in range(25, -1, -1):
        acc = acc * z + _INV_GAMMA1P[k]
    return acc


cdef void _temme_coeffs(double mu, double* gam1, double* gam2,
                        double* gp, double* gm) noexcept nogil:
    cdef double acc, p, mu2
    cdef int j, idx
    gp[0] = _inv_gamma1p(mu)
    gm[0] = _inv_gamma1p(-mu)
    gam2[0] = 0.5 * (gm[0] + gp[0])
    if fabs(mu) < 0.1:
        acc = 0.0
        p = 1.0
        mu2 = mu * mu
        for j in range(13):
            idx = 2 * j + 1
            if idx >= 26:
                break
            acc += _INV_GAMMA1P[idx] * p
            p *= mu2
        gam1[0] = -acc
    else:
        gam1[0] = (gm[0] - gp[0]) / (2.0 * mu)


cdef int _kv_pair_scaled(double mu, double x, double* k0, double* k1) noexcept nogil:
    """(e^x K_mu, e^x K_{mu+1}) for |mu| <= 1/2, x > 0.  Returns 0 on success."""
    cdef double pimu, fact, d, e, fact2, gam1, gam2, gp, gm
    cdef double ff, ssum, p, q, c, d2, ssum1, mu2, dl, scale
    cdef double b, dd, h, dh, q1, q2, a1, qq, cc, a, s, qnew, ds
    cdef int i
    if x < 2.0:
        pimu = M_PI * mu
        fact = pimu / sin(pimu) if mu != 0.0 else 1.0
        d = -log(0.5 * x)
        e = mu * d
        fact2 = sinh(e) / e if mu != 0.0 else 1.0
        _temme_coeffs(mu, &gam1, &gam2, &gp, &gm)
        ff = fact * (gam1 * cosh(e) + gam2 * fact2 * d)
        ssum = ff
        e = exp(e)
        p = 0.5 * e / gp
        q = 0.5 / (e * gm)
        c = 1.0
        d2 = 0.25 * x * x
        ssum1 = p
        mu2 = mu * mu
        for i in range(1, 81):
            ff = (i * ff + p + q) / (i * i - mu2)
            c *= d2 / i
            p = p / (i - mu)
            q = q / (i + mu)
            dl = c * ff
            ssum += dl
            ssum1 += c * (p - i * ff)
            if fabs(dl) < fabs(ssum) * 1e-17:
                break
        scale = exp(x)
        k0[0] = ssum * scale
        k1[0] = ssum1 * (2.0 / x) * scale
        return 0
    b = 2.0 * (1.0 + x)
    dd = 1.0 / b
    h = dd
    dh = dd
    q1 = 0.0
    q2 = 1.0
    a1 = 0.25 - mu * mu
    qq = a1
    cc = a1
    a = -a1
    s = 1.0 + qq * dh
    for i in range(2, 20001):
        a -= 2.0 * (i - 1)
        cc = -a * cc / i
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        qq += cc * qnew
        b += 2.0
        dd = 1.0 / (b + a * dd)
        dh = (b * dd - 1.0) * dh
        h += dh
        ds = qq * dh
        s += ds
        if fabs(ds) < fabs(s) * 1e-17:
            break
    h = a1 * h
    k0[0] = sqrt(M_PI / (2.0 * x)) / s
    k1[0] = k0[0] * (mu + x + 0.5 - h) / x
    return 0


cdef double _kv_scaled(double nu, double x) noexcept nogil:
    """e^x K_nu(x) via upward recurrence from |mu| <= 1/2."""
    cdef double mu, k0, k1, tmp
    cdef int m, j
    nu = fabs(nu)
    m = <int>(nu + 0.5)
    mu = nu - m
    _kv_pair_scaled(mu, x, &k0, &k1)
    for j in range(m):
        tmp = k0 + (2.0 * (mu + j + 1) / x) * k1
        k0 = k1
        k1 = tmp
    return k0


def kv_scaled(nu, x):
    """Scalar e^x K_nu(x)."""
    return _kv_scaled(float(nu), float(x))


def kv_scaled_many(nu, x):
    """e^x K_nu(x) elementwise over an array (fixed order)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xs = \
        np.ascontiguousarray(x, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty_like(xs)
    cdef double dnu = float(nu)
    cdef Py_ssize_t i, n = xs.shape[0]
    with nogil:
        for i in range(n):
            out[i] = _kv_scaled(dnu, xs[i])
    return out.reshape(np.shape(x))


def kv_scaled_pair_many(nu, x):
    """(e^x K_nu(x), e^x K_{nu+1}(x)) elementwise, nu >= 0."""
    cdef double dnu = float(nu)
    if dnu < 0:
        raise ValueError("kv_scaled_pair_many requires nu >= 0")
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xs = \
        np.ascontiguousarray(x, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out0 = np.empty_like(xs)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out1 = np.empty_like(xs)
    cdef int m = <int>(dnu + 0.5)
    cdef double mu = dnu - m
    cdef double k0, k1, tmp
    cdef Py_ssize_t i, n = xs.shape[0]
    cdef int j
    with nogil:
        for i in range(n):
            _kv_pair_scaled(mu, xs[i], &k0, &k1)
            for j in range(m):
                tmp = k0 + (2.0 * (mu + j + 1) / xs[i]) * k1
                k0 = k1
                k1 = tmp
            out0[i] = k0
            out1[i] = k1
    return out0.reshape(np.shape(x)), out1.reshape(np.shape(x))


# ---------------------------------------------------------------------------
# xoshiro256++ and derived variates
# ---------------------------------------------------------------------------

ctypedef unsigned long long u64

cdef u64 _SPLITMIX_GAMMA = 0x9E3779B97F4A7C15ULL


cdef inline u64 _rotl(u64 v, int k) noexcept nogil:
    return (v << k) | (v >> (64 - k))


cdef struct RngState:
    u64 s0, s1, s2, s3
    double cached_normal
    int has_cached


cdef u64 _splitmix_next(u64* z) noexcept nogil:
    z[0] = z[0] + _SPLITMIX_GAMMA
    cdef u64 t = z[0]
    t = (t ^ (t >> 30)) * 0xBF58476D1CE4E5B9ULL
    t = (t ^ (t >> 27)) * 0x94D049BB133111EBULL
    return t ^ (t >> 31)


cdef void _rng_init(RngState* st, u64 seed) noexcept nogil:
    cdef u64 z = seed
    st.s0 = _splitmix_next(&z)
    st.s1 = _splitmix_next(&z)
    st.s2 = _splitmix_next(&z)
    st.s3 = _splitmix_next(&z)
    if st.s0 == 0 and st.s1 == 0 and st.s2 == 0 and st.s3 == 0:
        st.s0 = 1
    st.cached_normal = 0.0
    st.has_cached = 0


cdef inline u64 _rng_next64(RngState* st) noexcept nogil:
    cdef u64 result = _rotl(st.s0 + st.s3, 23) + st.s0
    cdef u64 t = st.s1 << 17
    st.s2 ^= st.s0
    st.s3 ^= st.s1
    st.s1 ^= st.s2
    st.s0 ^= st.s3
    st.s2 ^= t
    st.s3 = _rotl(st.s3, 45)
    return result


cdef inline double _rng_uniform(RngState* st) noexcept nogil:
    return ((_rng_next64(st) >> 11) + 0.5) * 1.1102230246251565e-16


cdef double _rng_normal(RngState* st) noexcept nogil:
    cdef double u1, u2, r, a
    if st.has_cached:
        st.has_cached = 0
        return st.cached_normal
    u1 = _rng_uniform(st)
    u2 = _rng_uniform(st)
    r = sqrt(-2.0 * log(u1))
    a = 2.0 * M_PI * u2
    st.cached_normal = r * prodnorm_sin(a)
    st.has_cached = 1
    return r * prodnorm_cos(a)


cdef double _rng_gamma(RngState* st, double shape) noexcept nogil:
    cdef double a = shape, g, u, d, c, z, v, z2
    if a == 0.5:
        z = _rng_normal(st)
        return 0.5 * z * z
    if a < 1.0:
        g = _rng_gamma(st, a + 1.0)
        u = _rng_uniform(st)
        return g * u ** (1.0 / a)
    d = a - 1.0 / 3.0
    c = 1.0 / sqrt(9.0 * d)
    while True:
        while True:
            z = _rng_normal(st)
            v = 1.0 + c * z
            if v > 0.0:
                break
        v = v * v * v
        u = _rng_uniform(st)
        z2 = z * z
        if u < 1.0 - 0.0331 * z2 * z2:
            return d * v
        if log(u) < 0.5 * z2 + d * (1.0 - v + log(v)):
            return d * v


cdef inline double _rng_chisq(RngState* st, double dof) noexcept nogil:
    return 2.0 * _rng_gamma(st, 0.5 * dof)


def sample_rep(rep, n, rho, s_n, seed, count):
    """Draws of the n-copy product mean via representation rep."""
    cdef int cn = int(n)
    cdef double crho = float(rho)
    cdef double cs_n = float(s_n)
    cdef Py_ssize_t m = int(count)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(m)
    cdef RngState st
    _rng_init(&st, <u64>(int(seed) & 0xFFFFFFFFFFFFFFFF))
    cdef double root = sqrt(1.0 - crho * crho)
    cdef double cp, cm, acc, acc2, xj, wj, s, t, v, vp
    cdef Py_ssize_t i
    cdef int j, half
    srep = str(rep)
    if srep == "R1":
        with nogil:
            for i in range(m):
                acc = 0.0
                for j in range(cn):
                    xj = _rng_normal(&st)
                    wj = _rng_normal(&st)
                    acc += root * xj * wj + crho * xj * xj
                out[i] = cs_n * acc
    elif srep == "R2":
        with nogil:
            for i in range(m):
                s = _rng_chisq(&st, cn)
                t = _rng_normal(&st)
                out[i] = crho * cs_n * s + cs_n * root * sqrt(s) * t
    elif srep == "R4":
        cp = 0.5 * cs_n * (1.0 + crho)
        cm = 0.5 * cs_n * (1.0 - crho)
        with nogil:
            for i in range(m):
                v = _rng_chisq(&st, cn)
                vp = _rng_chisq(&st, cn)
                out[i] = cp * v - cm * vp
    elif srep == "R5":
        if cn % 2 != 0:
            raise ValueError("the log-uniform representation needs even n")
        half = cn // 2
        cp = cs_n * (1.0 + crho)
        cm = cs_n * (1.0 - crho)
        with nogil:
            for i in range(m):
                acc = 0.0
                for j in range(half):
                    acc += log(_rng_uniform(&st))
                acc2 = 0.0
                for j in range(half):
                    acc2 += log(_rng_uniform(&st))
                out[i] = -cp * acc + cm * acc2
    else:
        raise ValueError(f"unknown representation {rep!r}")
    return out


def sample_quadform(lambdas, shift, seed, count):
    """Draws of shift + sum_j lambda_j (N_j^2 - 1)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lam = \
        np.ascontiguousarray(lambdas, dtype=np.float64)
    cdef Py_ssize_t m = int(count), nl = lam.shape[0]
    cdef double cshift = float(shift)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(m)
    cdef RngState st
    _rng_init(&st, <u64>(int(seed) & 0xFFFFFFFFFFFFFFFF))
    cdef double acc, z
    cdef Py_ssize_t i, j
    with nogil:
        for i in range(m):
            acc = 0.0
            for j in range(nl):
                z = _rng_normal(&st)
                acc += lam[j] * (z * z - 1.0)
            out[i] = cshift + acc
    return out


def uniforms(seed, count):
    cdef Py_ssize_t m = int(count)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(m)
    cdef RngState st
    _rng_init(&st, <u64>(int(seed) & 0xFFFFFFFFFFFFFFFF))
    cdef Py_ssize_t i
    with nogil:
        for i in range(m):
            out[i] = _rng_uniform(&st)
    return out


def normals(seed, count):
    cdef Py_ssize_t m = int(count)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(m)
    cdef RngState st
    _rng_init(&st, <u64>(int(seed) & 0xFFFFFFFFFFFFFFFF))
    cdef Py_ssize_t i
    with nogil:
        for i in range(m):
            out[i] = _rng_normal(&st)
    return out


def gammas(shape, seed, count):
    cdef double a = float(shape)
    if a < 0.5:
        raise ValueError("gamma sampling requires shape >= 1/2")
    cdef Py_ssize_t m = int(count)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(m)
    cdef RngState st
    _rng_init(&st, <u64>(int(seed) & 0xFFFFFFFFFFFFFFFF))
    cdef Py_ssize_t i
    with nogil:
        for i in range(m):
            out[i] = _rng_gamma(&st, a)
    return out


# ---------------------------------------------------------------------------
# cyclic Jacobi eigenvalues
# ---------------------------------------------------------------------------

def sym_eigvals(a):
    """Eigenvalues of a symmetric matrix by cyclic Jacobi sweeps, ascending."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] m = \
        np.array(a, dtype=np.float64, copy=True, order="C")
    if m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    cdef Py_ssize_t n = m.shape[0]
    cdef Py_ssize_t p, q, k
    cdef int sweep
    cdef double off, thresh, app, aqq, apq, theta, t, c, s, akp, akq, diagmax
    with nogil:
        for sweep in range(60):
            off = 0.0
            diagmax = 0.0
            for p in range(n):
                if fabs(m[p, p]) > diagmax:
                    diagmax = fabs(m[p, p])
                for q in range(p + 1, n):
                    if fabs(m[p, q]) > off:
                        off = fabs(m[p, q])
            if off <= 1e-15 * (diagmax if diagmax > 0 else 1.0):
                break
            thresh = 0.0 if sweep > 3 else 0.1 * off
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = m[p, q]
                    if fabs(apq) <= thresh or apq == 0.0:
                        continue
                    app = m[p, p]
                    aqq = m[q, q]
                    theta = 0.5 * (aqq - app) / apq
                    t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                    c = 1.0 / sqrt(t * t + 1.0)
                    s = t * c
                    for k in range(n):
                        akp = m[k, p]
                        akq = m[k, q]
                        m[k, p] = c * akp - s * akq
                        m[k, q] = s * akp + c * akq
                    for k in range(n):
                        akp = m[p, k]
                        akq = m[q, k]
                        m[p, k] = c * akp - s * akq
                        m[q, k] = s * akp + c * akq
    out = np.empty(n)
    for p in range(n):
        out[p] = m[p, p]
    return np.sort(out)
