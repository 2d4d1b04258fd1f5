"""prodnorm: the distribution of products of zero-mean correlated normals.

Exact densities, distribution functions, moments/cumulants, mode and
median, reproducible samplers, Stein-identity verification and
second-Wiener-chaos limit experiments for Z = XY with (X, Y) bivariate
normal with zero means, and for the mean of n independent copies.

Hot kernels (Bessel K, samplers, eigenvalues) run on a compiled Cython
core when available, with a pure NumPy/Python fallback selected at import
(``prodnorm.backend()`` tells which).
"""

from ._kernels import BACKEND as _BACKEND
from .params import DistParams, NonZeroMeanParams
from .moments import (MomentSet, moments_recursive, moments_hypergeometric,
                      moments_kan_n1, central_moments_chisq_route, cumulants,
                      shape, raw_moment_rho0)
from .dist import (pdf, log_pdf, pdf_elementary, pdf_tail_asymptote, cdf,
                   cdf_grid, survival, survival_asymptote,
                   survival_upper_bound, quantile, mgf, cf, cgf, mode,
                   mode_brackets, median, median_conjecture_audit,
                   limit_checks, pdf_nonzero_mean)
from .sampling import (SampleBatch, Rep, sample, sample_quadform,
                       second_chaos_form, ks_statistic, ks_two_sample,
                       k_statistics, k_statistic_stderrs, write_csv,
                       write_binary, read_binary, stream_seed)
from .stein import (GFunction, SteinReport, default_suite, stein_residual,
                    stein_discriminates, cf_ode_residual)
from .chaos import (ChaosSpec, ChaosResult, y_phi_params,
                    rosenblatt_eigenvalues, chaos_cumulants, six_moment_gap,
                    sample_chaos, hs_norm_exact, sweep)
from .specfun import (EvalResult, bessel_k, bessel_k_scaled, struve_l,
                      gauss_2f1, upper_inc_gamma, confluent_u_poly,
                      bessel_ratio_bounds)

__version__ = "0.1.0"


def backend():
    """Name of the active kernel backend: "compiled" or "pure"."""
    return _BACKEND
