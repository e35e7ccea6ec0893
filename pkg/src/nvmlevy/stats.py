"""Statistical verification primitives: Kolmogorov-Smirnov tests, Q-Q data and
moment estimators with bootstrap kurtosis intervals."""

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .rng import make_stream
from .specfun import DomainError

# Stream key for the bootstrap resamples; fixed so moment summaries are
# reproducible without threading a seed through every caller.
_BOOTSTRAP_SEED = 0x6B757274
_BOOTSTRAP_DEFAULT = 500


@dataclass(frozen=True)
class KSResult:
    statistic: float
    p_value: float
    n: int
    m: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.statistic <= 1.0:
            raise DomainError(f"KS statistic must lie in [0, 1], got {self.statistic}")
        if not 0.0 <= self.p_value <= 1.0:
            raise DomainError(f"p-value must lie in [0, 1], got {self.p_value}")

    def as_dict(self):
        return {"statistic": self.statistic, "p_value": self.p_value, "n": self.n, "m": self.m}


def _ks_p_value(statistic, n_effective):
    # Asymptotic Kolmogorov survival with the small-sample argument correction;
    # accurate to a few 1e-3 in p for n >= ~100.
    lam = statistic * (math.sqrt(n_effective) + 0.12 + 0.11 / math.sqrt(n_effective))
    return float(min(1.0, max(0.0, special.kolmogorov(lam))))


def ks_one_sample(samples, cdf):
    """One-sample KS test of samples against a distribution function."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n < 10:
        raise DomainError(f"need at least 10 samples, got {n}")
    f = np.asarray(cdf(x), dtype=float)
    if np.any(np.diff(f) < -1e-12) or np.any(f < -1e-12) or np.any(f > 1.0 + 1e-12):
        raise DomainError("cdf must be nondecreasing with values in [0, 1]")
    if f[-1] - f[0] == 0.0 and x[-1] > x[0]:
        raise DomainError("cdf is degenerate on the sample range")
    grid = np.arange(1, n + 1) / n
    d = max(float(np.max(grid - f)), float(np.max(f - (grid - 1.0 / n))))
    d = min(max(d, 0.0), 1.0)
    return KSResult(statistic=d, p_value=_ks_p_value(d, n), n=n)


def ks_two_sample(a, b):
    """Two-sample KS test; symmetric in its arguments."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    n, m = a.size, b.size
    if n < 10 or m < 10:
        raise DomainError(f"need at least 10 samples per side, got {n} and {m}")
    grid = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, grid, side="right") / n
    cdf_b = np.searchsorted(b, grid, side="right") / m
    d = float(np.max(np.abs(cdf_a - cdf_b)))
    n_eff = n * m / (n + m)
    return KSResult(statistic=d, p_value=_ks_p_value(d, n_eff), n=n, m=m)


def qq_points(a, b, k):
    """k matched empirical quantile pairs at levels (i - 0.5)/k."""
    if k < 2:
        raise DomainError(f"need at least 2 quantile levels, got {k}")
    levels = (np.arange(k) + 0.5) / k
    qa = np.quantile(np.asarray(a, dtype=float), levels)
    qb = np.quantile(np.asarray(b, dtype=float), levels)
    return list(zip(qa.tolist(), qb.tolist()))


@dataclass(frozen=True)
class MomentSummary:
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float
    se_mean: float
    se_variance: float
    se_skewness: float
    se_kurtosis: float
    kurtosis_ci99: tuple[float, float]
    n: int


def _excess_kurtosis(x):
    c = x - x.mean()
    m2 = np.mean(c * c)
    if m2 == 0.0:
        return 0.0
    return float(np.mean(c ** 4) / m2 ** 2 - 3.0)


def moments(samples, bootstrap=_BOOTSTRAP_DEFAULT, rng=None):
    """Sample moments with standard errors.

    Mean and variance are unbiased with plug-in standard errors; the kurtosis
    standard error and its 99% interval come from a bootstrap (default B=500)
    on a dedicated stream, since plug-in kurtosis errors are unreliable for
    heavy tails.
    """
    x = np.asarray(samples, dtype=float)
    n = x.size
    if n < 20:
        raise DomainError(f"need at least 20 samples, got {n}")
    mean = float(x.mean())
    var = float(x.var(ddof=1))
    c = x - mean
    m2 = float(np.mean(c * c))
    m3 = float(np.mean(c ** 3))
    m4 = float(np.mean(c ** 4))
    skew = m3 / m2 ** 1.5 if m2 > 0.0 else 0.0
    kurt = m4 / m2 ** 2 - 3.0 if m2 > 0.0 else 0.0

    se_mean = math.sqrt(var / n) if var > 0.0 else 0.0
    se_var = math.sqrt(max(m4 - (n - 3.0) / (n - 1.0) * m2 ** 2, 0.0) / n)
    se_skew = math.sqrt(6.0 / n)

    if rng is None:
        rng = make_stream(_BOOTSTRAP_SEED)
    boot = np.empty(int(bootstrap))
    for i in range(int(bootstrap)):
        boot[i] = _excess_kurtosis(x[rng.integers(0, n, size=n)])
    se_kurt = float(boot.std(ddof=1))
    lo, hi = np.quantile(boot, [0.005, 0.995])

    return MomentSummary(
        mean=mean,
        variance=var,
        skewness=float(skew),
        excess_kurtosis=float(kurt),
        se_mean=se_mean,
        se_variance=se_var,
        se_skewness=se_skew,
        se_kurtosis=se_kurt,
        kurtosis_ci99=(float(lo), float(hi)),
        n=n,
    )


def normal_cdf(x):
    return special.ndtr(np.asarray(x, dtype=float))
