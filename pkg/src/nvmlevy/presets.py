"""Named experiment presets (fig1 ... fig11).

Each preset bundles one process configuration with the truncation level and
replica counts of the corresponding bundled experiment; every field can be
overridden from the command line.
"""

import math

_SQRT2 = math.sqrt(2.0)

_GAMMA = {"family": "gamma", "nu": 2.0, "gamma": _SQRT2}
_TS = {"family": "tempered_stable", "kappa": 0.5, "delta": 1.0, "gamma": 1.35}
_GIG_PATHS = {"family": "gig", "lam": 0.2, "delta": 1.0 / 3.0, "gamma": _SQRT2}
_GIG_RESIDUAL = {"family": "gig", "lam": 0.2, "delta": 1.3, "gamma": _SQRT2}

_NG_MIX = {"mu_w": 1.0, "sigma_w": 2.0}
_NTS_MIX = {"mu_w": 1.0, "sigma_w": 2.0}
_GH_MIX = {"mu_w": 1.0, "sigma_w": 2.0}

_BOUND_GRID = {"min": 1e-6, "max": 1e-1, "count": 25}

PRESETS = {
    # Truncated subordinator sample paths plus marginal verification at t=1.
    "fig1": {
        "command_hint": "simulate/verify-marginal",
        "process": dict(_GAMMA),
        "epsilon": 1e-10,
        "horizon": 1.0,
        "time": 1.0,
        "replicas": 10,
        "marginal_replicas": 100_000,
    },
    "fig2": {
        "command_hint": "simulate/verify-marginal",
        "process": dict(_TS),
        "epsilon": 1e-10,
        "horizon": 1.0,
        "time": 1.0,
        "replicas": 10,
        "marginal_replicas": 100_000,
    },
    "fig3": {
        "command_hint": "simulate/verify-marginal",
        "process": dict(_GIG_PATHS),
        "epsilon": 1e-10,
        "horizon": 1.0,
        "time": 1.0,
        "replicas": 10,
        "marginal_replicas": 40_000,
    },
    # Standardised residual histograms / Q-Q panels at eps = 1e-6.
    "fig4": {
        "command_hint": "residual-hist",
        "process": dict(_GAMMA, **_NG_MIX),
        "epsilon": 1e-6,
        "time": 1.0,
        "replicas": 10_000,
    },
    "fig5": {
        "command_hint": "residual-hist",
        "process": dict(_GAMMA, **_NG_MIX),
        "epsilon": 1e-6,
        "time": 1.0,
        "replicas": 100_000,
    },
    "fig6": {
        "command_hint": "residual-hist",
        "process": dict(_TS, **_NTS_MIX),
        "epsilon": 1e-6,
        "time": 1.0,
        "replicas": 100_000,
    },
    "fig7": {
        "command_hint": "residual-hist",
        "process": dict(_TS, **_NTS_MIX),
        "epsilon": 1e-6,
        "time": 1.0,
        "replicas": 100_000,
    },
    "fig8": {
        "command_hint": "bound-curve",
        "process": dict(_TS, **_NTS_MIX),
        "eps_grid": dict(_BOUND_GRID),
    },
    "fig9": {
        "command_hint": "residual-hist",
        "process": dict(_GIG_RESIDUAL, **_GH_MIX),
        "epsilon": 1e-6,
        "time": 1.0,
        "replicas": 50_000,
    },
    "fig10": {
        "command_hint": "residual-hist",
        "process": dict(_GIG_RESIDUAL, **_GH_MIX),
        "epsilon": 1e-6,
        "time": 1.0,
        "replicas": 50_000,
    },
    "fig11": {
        "command_hint": "bound-curve",
        "process": dict(_GIG_RESIDUAL, **_GH_MIX),
        "eps_grid": dict(_BOUND_GRID),
    },
}


def preset(name):
    try:
        base = PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}")
    out = {k: (dict(v) if isinstance(v, dict) else v) for k, v in base.items()}
    out.pop("command_hint", None)
    return out
