"""Normal variance-mean process paths built on subordinator jumps, residual
moments and the moment-matched Gaussian residual approximation."""

import math
from dataclasses import dataclass

import numpy as np

from .rng import standard_normals
from .specfun import DomainError
from .subordinators import JumpSeries


class ConfigError(ValueError):
    """Inconsistent simulation configuration."""


@dataclass(frozen=True)
class NVMSpec:
    """Mixture parameters of a normal variance-mean process.

    Each subordinator jump z carries a Gaussian mark mu_w z + sigma_w sqrt(z) U
    with U standard normal; drift is fixed at zero.
    """

    subordinator: object
    mu_w: float
    sigma_w: float

    def __post_init__(self):
        if not (self.sigma_w > 0.0 and math.isfinite(self.sigma_w)):
            raise DomainError(f"sigma_w must be positive, got {self.sigma_w}")
        if not math.isfinite(self.mu_w):
            raise DomainError(f"mu_w must be finite, got {self.mu_w}")


@dataclass(frozen=True)
class ResidualMoments:
    """Per-unit-time mean and variance of the small-jump remainder."""

    mean_rate: float
    var_rate: float

    @property
    def sigma(self):
        return math.sqrt(self.var_rate)


@dataclass(frozen=True)
class NVMPath:
    """Transformed jump path: events (time, subordinator jump, value)."""

    horizon: float
    truncation: float
    times: np.ndarray
    sizes: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if not (self.times.shape == self.sizes.shape == self.values.shape):
            raise DomainError("times, sizes and values must share one shape")

    def __len__(self):
        return self.values.size

    def write_csv(self, fh):
        fh.write("v,z,x\n")
        for v, z, x in zip(self.times, self.sizes, self.values):
            fh.write(f"{v:.17g},{z:.17g},{x:.17g}\n")


def gaussian_marks(nvm, sizes, rng):
    """One Gaussian mark per jump; jump i consumes uniform draws 2i and 2i+1."""
    u = standard_normals(rng, sizes.size)
    return nvm.mu_w * sizes + nvm.sigma_w * np.sqrt(sizes) * u


def build_nvm_path(nvm, jumps: JumpSeries, rng):
    """Attach independent Gaussian marks to a subordinator jump series."""
    values = gaussian_marks(nvm, jumps.sizes, rng)
    return NVMPath(
        horizon=jumps.horizon,
        truncation=jumps.truncation,
        times=jumps.times,
        sizes=jumps.sizes,
        values=values,
    )


def evaluate_path(path: NVMPath, t):
    """Path value at time t: the sum of marks with event time at most t."""
    if not 0.0 <= t <= path.horizon:
        raise DomainError(f"t must lie in [0, {path.horizon}], got {t}")
    if len(path) == 0:
        return 0.0
    return float(path.values[path.times <= t].sum())


def evaluate_on_grid(path: NVMPath, ts):
    """Path values on an ascending time grid (cumulative sums of time-sorted marks)."""
    ts = np.asarray(ts, dtype=float)
    if ts.size and (ts.min() < 0.0 or ts.max() > path.horizon):
        raise DomainError("grid must lie within [0, horizon]")
    order = np.argsort(path.times, kind="stable")
    sorted_times = path.times[order]
    csum = np.concatenate([[0.0], np.cumsum(path.values[order])])
    idx = np.searchsorted(sorted_times, ts, side="right")
    return csum[idx]


def residual_moments(nvm, eps, tol=None):
    """Mean and variance rates of the sub-threshold remainder process."""
    if not eps > 0.0:
        raise DomainError(f"eps must be positive, got {eps}")
    sub = nvm.subordinator
    m1 = sub.truncated_moment(1.0, eps, tol=tol)
    m2 = sub.truncated_moment(2.0, eps, tol=tol)
    return ResidualMoments(
        mean_rate=nvm.mu_w * m1,
        var_rate=nvm.mu_w ** 2 * m2 + nvm.sigma_w ** 2 * m1,
    )


def residual_variance_deficit(nvm, eps, eps_floor, tol=None):
    """Fraction of the residual variance carried by jumps below eps_floor.

    Simulated residual samples leave this fraction out, so their variance is
    1 - deficit after standardisation by the full analytic scale.
    """
    return residual_moments(nvm, eps_floor, tol=tol).var_rate / residual_moments(nvm, eps, tol=tol).var_rate


def standardised_residual_samples(nvm, eps, t, n, rng, eps_floor=None, tol=None):
    """n independent draws of the standardised remainder at time t.

    The remainder is simulated as the jump series restricted to sizes in
    [eps_floor, eps) (default floor eps * 1e-6), marked and summed, then
    centred with the analytic mean and scaled by the analytic per-unit-time
    standard deviation.  The neglected variance below the floor is available
    from residual_variance_deficit.
    """
    if eps_floor is None:
        eps_floor = eps * 1e-6
    if not eps_floor > 0.0:
        raise ConfigError(f"eps_floor must be positive, got {eps_floor}")
    if eps_floor >= eps:
        raise ConfigError(f"eps_floor must be below eps, got {eps_floor} >= {eps}")
    if not (t > 0.0 and n >= 1):
        raise ConfigError("need t > 0 and n >= 1")
    moments = residual_moments(nvm, eps, tol=tol)
    centre = t * moments.mean_rate
    scale = moments.sigma
    sub = nvm.subordinator
    out = np.empty(int(n))
    for i in range(int(n)):
        # Jump times are irrelevant at the evaluation horizon, so only sizes
        # are generated.
        sizes = sub.sample_jump_sizes(eps_floor, t, rng, upper=eps)
        total = float(gaussian_marks(nvm, sizes, rng).sum())
        out[i] = (total - centre) / scale
    return out


def gaussian_residual_increment(nvm, eps, dt, rng):
    """Moment-matched Gaussian draw replacing the remainder over a step dt."""
    if not dt > 0.0:
        raise DomainError(f"dt must be positive, got {dt}")
    moments = residual_moments(nvm, eps)
    u = standard_normals(rng, 1)[0]
    return moments.mean_rate * dt + math.sqrt(moments.var_rate * dt) * u
