import numpy as np


def assert_within_se(estimate, target, se, k=3.0, label=""):
    """Monte Carlo agreement check: |estimate - target| <= k standard errors."""
    gap = abs(estimate - target)
    assert gap <= k * se + 1e-300, (
        f"{label} estimate {estimate!r} vs target {target!r}: "
        f"gap {gap:.4g} exceeds {k} x SE ({se:.4g})"
    )


def sample_se(samples):
    x = np.asarray(samples, dtype=float)
    return float(x.std(ddof=1) / np.sqrt(x.size))
