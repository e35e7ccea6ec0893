"""Seedable counter-based random streams shared by every sampler."""

import numpy as np


def make_stream(seed, *key):
    """Return a Philox-backed generator for the stream (seed, *key).

    Philox is a 64-bit counter-based generator, so streams derived from
    distinct keys are independent regardless of how much randomness each
    consumer draws.  Parallel Monte Carlo derives one stream per replica
    (or replica chunk) from (seed, index).
    """
    entropy = (int(seed),) + tuple(int(k) for k in key)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def standard_normals(rng, n):
    """Draw n standard normals by Box-Muller.

    Each uniform pair yields the full cosine/sine pair of normals, so normals
    2j and 2j+1 consume uniform draws 2j and 2j+1 of the stream; consumption
    stays deterministic when jump generation and Gaussian marks interleave.
    """
    n = int(n)
    pairs = (n + 1) // 2
    u = rng.random((pairs, 2))
    # 1-u[:,0] lies in (0, 1], keeping the log finite.
    radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
    angle = 2.0 * np.pi * u[:, 1]
    out = np.empty((pairs, 2))
    np.multiply(radius, np.cos(angle), out=out[:, 0])
    np.multiply(radius, np.sin(angle), out=out[:, 1])
    return out.reshape(-1)[:n]
