"""Linear Levy-driven SDE simulation through the shot-noise representation of
the driving stochastic integral, with optional Gaussian residual injection."""

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .nvm import NVMPath, gaussian_marks, residual_moments
from .rng import standard_normals
from .specfun import DomainError, NumericError

MAX_STATE_DIM = 8

RESIDUAL_MODES = ("none", "gaussian")


@dataclass(frozen=True)
class LinearSDEModel:
    """State dynamics dX = A X dt + h dW with W a scalar NVM Levy process."""

    A: np.ndarray
    h: np.ndarray
    horizon: float

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.A, dtype=float))
        h = np.atleast_1d(np.asarray(self.h, dtype=float))
        if a.shape[0] != a.shape[1]:
            raise DomainError(f"A must be square, got shape {a.shape}")
        if h.shape != (a.shape[0],):
            raise DomainError(f"h must be a vector of length {a.shape[0]}")
        if a.shape[0] > MAX_STATE_DIM:
            raise DomainError(f"state dimension {a.shape[0]} exceeds supported {MAX_STATE_DIM}")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(h))):
            raise DomainError("A and h must be finite")
        if not (self.horizon > 0.0 and math.isfinite(self.horizon)):
            raise DomainError(f"horizon must be positive, got {self.horizon}")
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "h", h)

    @property
    def dim(self):
        return self.A.shape[0]


@dataclass(frozen=True)
class SDEPath:
    grid: np.ndarray
    states: np.ndarray  # one state vector per grid point
    residual_mode: str

    def write_csv(self, fh):
        dim = self.states.shape[1]
        fh.write("t," + ",".join(f"x{i + 1}" for i in range(dim)) + "\n")
        for t, row in zip(self.grid, self.states):
            fh.write(f"{t:.17g}," + ",".join(f"{v:.17g}" for v in row) + "\n")


def matrix_exp(A, t):
    """Matrix exponential e^(A t) by scaling-and-squaring (Pade)."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if t == 0.0:
        return np.eye(A.shape[0])
    out = linalg.expm(A * float(t))
    if not np.all(np.isfinite(out)):
        raise NumericError(f"matrix exponential overflowed for t={t}", estimate=out)
    return out


_EIG_CACHE = {}


def _eig_factorisation(A, h):
    key = (A.tobytes(), h.tobytes(), A.shape[0])
    hit = _EIG_CACHE.get(key)
    if hit is None:
        try:
            w, v = np.linalg.eig(A)
            cond = np.linalg.cond(v)
            coeff = np.linalg.solve(v, h.astype(complex)) if cond < 1e8 else None
        except np.linalg.LinAlgError:
            w = v = coeff = None
        hit = (w, v, coeff)
        if len(_EIG_CACHE) > 64:
            _EIG_CACHE.clear()
        _EIG_CACHE[key] = hit
    return hit


def _propagator_columns(A, h, taus):
    """Columns e^(A tau_i) h for a batch of lags, shape (dim, len(taus)).

    Diagonalisable drift matrices get a vectorised eigenbasis evaluation; a
    defective or ill-conditioned eigenbasis falls back to one matrix
    exponential per lag.
    """
    taus = np.asarray(taus, dtype=float)
    dim = A.shape[0]
    if taus.size == 0:
        return np.zeros((dim, 0))
    w, v, coeff = _eig_factorisation(A, h)
    if coeff is not None:
        modes = np.exp(np.outer(w, taus)) * coeff[:, None]
        return (v @ modes).real
    return np.column_stack([matrix_exp(A, t) @ h for t in taus])


def shot_noise_integral(model, path: NVMPath, s, t):
    """Sum of X_i e^(A (t - V_i)) h over path events with V_i in (s, t]."""
    if not (0.0 <= s < t <= path.horizon):
        raise DomainError(f"need 0 <= s < t <= horizon, got ({s}, {t})")
    mask = (path.times > s) & (path.times <= t)
    if not mask.any():
        return np.zeros(model.dim)
    cols = _propagator_columns(model.A, model.h, t - path.times[mask])
    return cols @ path.values[mask]


def _van_loan_blocks(model, dt):
    """Mean and covariance loading integrals over a step of length dt.

    One augmented block exponential yields both int_0^dt e^(A u) h du and
    int_0^dt e^(A u) h h^T e^(A^T u) du exactly to matrix-exponential accuracy.
    """
    dim = model.dim
    a, h = model.A, model.h
    m = np.zeros((dim + 1, dim + 1))
    m[:dim, :dim] = a
    m[:dim, dim] = h
    mean_int = matrix_exp(m, dt)[:dim, dim]

    c = np.zeros((2 * dim, 2 * dim))
    c[:dim, :dim] = a
    c[:dim, dim:] = np.outer(h, h)
    c[dim:, dim:] = -a.T
    e = matrix_exp(c, dt)
    cov_int = e[:dim, dim:] @ e[:dim, :dim].T
    cov_int = 0.5 * (cov_int + cov_int.T)
    return mean_int, cov_int


def residual_sde_moments(model, nvm, eps, s, t, tol=None):
    """Mean vector and covariance matrix of the small-jump SDE remainder over (s, t]."""
    if not (0.0 <= s < t <= model.horizon):
        raise DomainError(f"need 0 <= s < t <= horizon, got ({s}, {t})")
    rates = residual_moments(nvm, eps, tol=tol)
    mean_int, cov_int = _van_loan_blocks(model, t - s)
    return rates.mean_rate * mean_int, rates.var_rate * cov_int


def _cholesky_with_jitter(cov):
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        jitter = 1e-12 * max(np.trace(cov), 1e-300)
        try:
            return np.linalg.cholesky(cov + jitter * np.eye(cov.shape[0]))
        except np.linalg.LinAlgError as exc:
            raise NumericError("residual covariance is not positive semidefinite", estimate=cov) from exc


def simulate_sde(model, nvm, eps, grid, residual_mode, x0, rng):
    """Simulate the state recursion on a time grid.

    Each step propagates the state with the matrix exponential, adds the
    shot-noise integral of freshly sampled truncated jumps over the step, and
    (in gaussian mode) a moment-matched multivariate normal remainder draw.
    """
    if residual_mode not in RESIDUAL_MODES:
        raise DomainError(f"residual_mode must be one of {RESIDUAL_MODES}, got {residual_mode!r}")
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or grid[0] != 0.0:
        raise DomainError("grid must be 1-d, start at 0 and contain at least two points")
    if np.any(np.diff(grid) <= 0.0) or grid[-1] > model.horizon:
        raise DomainError("grid must be strictly increasing and lie within the horizon")
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (model.dim,):
        raise DomainError(f"x0 must have shape ({model.dim},)")

    sub = nvm.subordinator
    states = np.empty((grid.size, model.dim))
    states[0] = x0
    step_cache = {}
    x = x0.copy()
    for k in range(grid.size - 1):
        dt = float(grid[k + 1] - grid[k])
        # Quantised key so linspace step jitter at the ulp level still hits.
        dt = round(dt, 12)
        if dt not in step_cache:
            transition = matrix_exp(model.A, dt)
            entry = {"transition": transition}
            if residual_mode == "gaussian":
                mean, cov = residual_sde_moments(model, nvm, eps, 0.0, dt)
                entry["mean"] = mean
                entry["chol"] = _cholesky_with_jitter(cov)
            step_cache[dt] = entry
        entry = step_cache[dt]
        x = entry["transition"] @ x

        jumps = sub.sample_jumps(eps, dt, rng)
        if len(jumps):
            marks = gaussian_marks(nvm, jumps.sizes, rng)
            cols = _propagator_columns(model.A, model.h, dt - jumps.times)
            x = x + cols @ marks
        if residual_mode == "gaussian":
            x = x + entry["mean"] + entry["chol"] @ standard_normals(rng, model.dim)
        states[k + 1] = x
    return SDEPath(grid=grid, states=states, residual_mode=residual_mode)
