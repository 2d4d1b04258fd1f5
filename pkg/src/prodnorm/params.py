"""Parameter types shared by every distribution operation."""

from dataclasses import dataclass


@dataclass(frozen=True)
class DistParams:
    """Parameters of the mean of n copies of a zero-mean normal product.

    n copies, correlation rho in (-1, 1), marginal scales sigma_x and
    sigma_y.  The derived scale constants are s = sigma_x * sigma_y and
    s_n = s / n; s = n * s_n holds exactly.
    """

    n: int
    rho: float
    sigma_x: float = 1.0
    sigma_y: float = 1.0

    def __post_init__(self):
        if not (isinstance(self.n, int) and self.n >= 1):
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if not -1.0 < self.rho < 1.0:
            raise ValueError(f"rho must lie in (-1, 1), got {self.rho}")
        if not (self.sigma_x > 0 and self.sigma_y > 0):
            raise ValueError("sigma_x and sigma_y must be positive")

    @property
    def s(self):
        return self.sigma_x * self.sigma_y

    @property
    def s_n(self):
        return self.sigma_x * self.sigma_y / self.n

    @property
    def mean(self):
        return self.rho * self.s

    @property
    def variance(self):
        return self.n * self.s_n ** 2 * (1.0 + self.rho ** 2)


@dataclass(frozen=True)
class NonZeroMeanParams:
    """Bivariate normal parameters with nonzero means, for the product PDF."""

    mu_x: float
    mu_y: float
    sigma_x: float = 1.0
    sigma_y: float = 1.0
    rho: float = 0.0

    def __post_init__(self):
        if not (self.sigma_x > 0 and self.sigma_y > 0):
            raise ValueError("sigma_x and sigma_y must be positive")
        if not -1.0 < self.rho < 1.0:
            raise ValueError(f"rho must lie in (-1, 1), got {self.rho}")
