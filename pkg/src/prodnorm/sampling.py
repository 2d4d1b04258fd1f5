"""Exact samplers for the product-mean law, with a reproducible RNG contract.

Four distributional representations are exposed:

  R1  s_n sum_j (sqrt(1-rho^2) X_j W_j + rho X_j^2), X, W iid standard normal
  R2  rho s_n S + s_n sqrt(1-rho^2) sqrt(S) T, S chi-square(n), T normal
  R4  (s_n/2)(1+rho) V - (s_n/2)(1-rho) V', V, V' iid chi-square(n)
  R5  -s_n(1+rho) sum log U - (-(s_n)(1-rho) sum log U'), even n only

plus the second-chaos quadratic form shift + sum lambda_j (N_j^2 - 1).

All variates come from a pinned stack: xoshiro256++ -> 53-bit uniforms in
(0,1) -> trigonometric Box-Muller normals (pair cached) -> Marsaglia-Tsang
gamma (half a squared normal at shape 1/2, uniform-power boost below 1).
Identical (params, rep, seed, count) reproduce identical values
bit-for-bit on a given backend; the compiled and pure backends implement
the same stream.

Note the published log-uniform form of R5 omits the factor -2 that turns a
sum of log-uniforms into a chi-square; the sampler uses the corrected
coefficients (KS-checked against the other representations and the CDF).
"""

import math
import struct
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels
from .dist import cdf, cdf_grid
from .errors import DomainError
from .moments import cumulants
from .params import DistParams


class Rep(str, Enum):
    R1_BILINEAR = "R1"
    R2_CHISQ_NORMAL = "R2"
    R4_GAMMA_DIFFERENCE = "R4"
    R5_UNIFORM_LOGS = "R5"
    CHAOS_QUADFORM = "chaos"  # used by the chaos module's sampler


@dataclass(frozen=True)
class SampleBatch:
    """A seeded batch of draws tagged with its generating representation."""

    params: DistParams
    rep: Rep
    seed: int
    values: np.ndarray

    @property
    def count(self):
        return len(self.values)


def sample(params: DistParams, rep, seed, count) -> SampleBatch:
    """Draw count iid copies of the product mean via the given representation."""
    rep = Rep(rep)
    if count < 1:
        raise DomainError("count must be >= 1")
    if rep is Rep.R5_UNIFORM_LOGS and params.n % 2 != 0:
        raise DomainError("the log-uniform representation needs even n")
    if rep is Rep.CHAOS_QUADFORM:
        raise DomainError("use sample_quadform for general quadratic forms")
    values = _kernels.sample_rep(rep.value, params.n, params.rho,
                                 params.s_n, seed, count)
    return SampleBatch(params, rep, int(seed), values)


def sample_quadform(lambdas, shift, seed, count, params=None) -> SampleBatch:
    """Draws of shift + sum_j lambda_j (N_j^2 - 1)."""
    values = _kernels.sample_quadform(np.asarray(lambdas, float),
                                      float(shift), seed, count)
    return SampleBatch(params, Rep.CHAOS_QUADFORM, int(seed), values)


def second_chaos_form(params: DistParams):
    """(mean shift, eigenvalues) of the second-chaos form of the law.

    The 2n eigenvalues are s_n(1+rho)/2 (n times) and s_n(rho-1)/2
    (n times); the law equals rho s + sum lambda_j (N_j^2 - 1).  They
    satisfy 2 sum lambda^2 = Var.
    """
    n, rho, s_n = params.n, params.rho, params.s_n
    lam = np.concatenate([
        np.full(n, 0.5 * s_n * (1.0 + rho)),
        np.full(n, 0.5 * s_n * (rho - 1.0)),
    ])
    return params.mean, lam


def stream_seed(seed, stream_id):
    """Derive an independent stream seed; for parallel batch generation."""
    return _kernels.stream_seed(int(seed), int(stream_id))


# ---------------------------------------------------------------------------
# sample statistics
# ---------------------------------------------------------------------------

def k_statistics(values):
    """Unbiased cumulant estimators k_1..k_4 of a sample."""
    x = np.asarray(values, dtype=float)
    n = len(x)
    if n < 4:
        raise DomainError("k-statistics up to order 4 need at least 4 values")
    mean = x.mean()
    d = x - mean
    m2 = np.mean(d ** 2)
    m3 = np.mean(d ** 3)
    m4 = np.mean(d ** 4)
    k1 = mean
    k2 = n / (n - 1.0) * m2
    k3 = n * n * m3 / ((n - 1.0) * (n - 2.0))
    k4 = (n * n * ((n + 1.0) * m4 - 3.0 * (n - 1.0) * m2 * m2)
          / ((n - 1.0) * (n - 2.0) * (n - 3.0)))
    return np.array([k1, k2, k3, k4])


def k_statistic_stderrs(params: DistParams, count):
    """Exact sampling standard errors of k_1..k_4 under the target law.

    Standard variance formulas for k-statistics in terms of the population
    cumulants (which are available in closed form up to any order).
    """
    n = float(count)
    k = cumulants(params, 8)
    k2, k3, k4, k5, k6, k8 = k[1], k[2], k[3], k[4], k[5], k[7]
    var1 = k2 / n
    var2 = k4 / n + 2.0 * k2 ** 2 / (n - 1.0)
    var3 = (k6 / n + 9.0 * k2 * k4 / (n - 1.0) + 9.0 * k3 ** 2 / (n - 1.0)
            + 6.0 * n * k2 ** 3 / ((n - 1.0) * (n - 2.0)))
    var4 = (k8 / n + 16.0 * k2 * k6 / (n - 1.0) + 48.0 * k3 * k5 / (n - 1.0)
            + 34.0 * k4 ** 2 / (n - 1.0)
            + 72.0 * n * k2 ** 2 * k4 / ((n - 1.0) * (n - 2.0))
            + 144.0 * n * k2 * k3 ** 2 / ((n - 1.0) * (n - 2.0))
            + 24.0 * n * (n + 1.0) * k2 ** 4
            / ((n - 1.0) * (n - 2.0) * (n - 3.0)))
    return np.sqrt([var1, var2, var3, var4])


def _kolmogorov_sf(lam):
    """Asymptotic Kolmogorov survival Q(lam) = 2 sum (-1)^(j-1) exp(-2 j^2 lam^2)."""
    if lam <= 0:
        return 1.0
    total = 0.0
    for j in range(1, 101):
        term = 2.0 * (-1.0) ** (j - 1) * math.exp(-2.0 * j * j * lam * lam)
        total += term
        if abs(term) < 1e-16:
            break
    return min(max(total, 0.0), 1.0)


def ks_statistic(batch: SampleBatch, grid_size=2048):
    """One-sample KS statistic of a batch against the analytic CDF.

    For quadrature-backed parameter sets the CDF is evaluated on a grid in
    one cumulative sweep and interpolated monotonically at the sample
    points (error far below KS resolution).  Returns (D, asymptotic p).
    """
    if batch.params is None:
        raise DomainError("batch carries no DistParams to test against")
    x = np.sort(batch.values)
    n = len(x)
    p = batch.params
    if p.rho == 0.0 or p.n % 2 == 0 or n <= 256:
        if n <= 4096:
            f = np.array([cdf(p, float(v)) for v in x])
        else:
            f = _cdf_interp(p, x, grid_size)
    else:
        f = _cdf_interp(p, x, grid_size)
    i = np.arange(1, n + 1)
    d = float(np.max(np.maximum(i / n - f, f - (i - 1) / n)))
    lam = (math.sqrt(n) + 0.12 + 0.11 / math.sqrt(n)) * d
    return d, _kolmogorov_sf(lam)


def _cdf_interp(p, sorted_x, grid_size):
    lo, hi = sorted_x[0], sorted_x[-1]
    pad = 1e-9 * (hi - lo + 1.0)
    grid = np.linspace(lo - pad, hi + pad, grid_size)
    fg = cdf_grid(p, grid, abs_tol=1e-8)
    return np.interp(sorted_x, grid, fg)


def ks_two_sample(a, b):
    """Two-sample KS statistic and asymptotic p-value."""
    a = np.sort(np.asarray(a, float))
    b = np.sort(np.asarray(b, float))
    pooled = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, pooled, side="right") / len(a)
    cdf_b = np.searchsorted(b, pooled, side="right") / len(b)
    d = float(np.max(np.abs(cdf_a - cdf_b)))
    ne = len(a) * len(b) / (len(a) + len(b))
    lam = (math.sqrt(ne) + 0.12 + 0.11 / math.sqrt(ne)) * d
    return d, _kolmogorov_sf(lam)


# ---------------------------------------------------------------------------
# batch export
# ---------------------------------------------------------------------------

def write_csv(batch: SampleBatch, path):
    """One value per line, 17 significant digits."""
    with open(path, "w", newline="") as fh:
        for v in batch.values:
            fh.write(f"{v:.17g}\n")


def write_binary(batch: SampleBatch, path):
    """8-byte little-endian count header + float64 little-endian block."""
    with open(path, "wb") as fh:
        fh.write(struct.pack("<Q", len(batch.values)))
        fh.write(np.ascontiguousarray(batch.values, dtype="<f8").tobytes())


def read_binary(path):
    """Inverse of write_binary; returns the values array."""
    with open(path, "rb") as fh:
        (count,) = struct.unpack("<Q", fh.read(8))
        data = np.frombuffer(fh.read(8 * count), dtype="<f8")
    if len(data) != count:
        raise ValueError(f"binary block truncated: header says {count}, "
                         f"got {len(data)} values")
    return data.copy()
