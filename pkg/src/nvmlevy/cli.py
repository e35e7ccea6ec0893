"""Command-line driver: simulation, residual diagnostics, bound curves and
marginal-law verification, emitting CSV/JSON artefacts plus rendered figures.

Exit codes: 0 success (and expectation matched), 1 expectation mismatch,
2 invalid configuration, 3 I/O failure.
"""

import argparse
import functools
import io
import json
import os
import subprocess
import sys
from concurrent import futures

import numpy as np
from scipy import special

from . import __version__, bounds, plots
from . import stats as statsmod
from .nvm import (
    ConfigError,
    NVMSpec,
    build_nvm_path,
    residual_variance_deficit,
    standardised_residual_samples,
)
from .presets import PRESETS, preset
from .rng import make_stream
from .sde import LinearSDEModel, simulate_sde
from .specfun import DomainError
from .subordinators import (
    CapabilityError,
    GIGSubordinator,
    GammaSubordinator,
    TemperedStableSubordinator,
)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_CONFIG = 2
EXIT_IO = 3

# Replicas are dispatched in fixed-size chunks with one derived stream per
# chunk, so results do not depend on the worker pool size.
CHUNK = 64

# Stream namespaces per random purpose.
_NS_PATHS = 0
_NS_RESIDUAL = 1
_NS_MARGINAL = 2
_NS_EXACT = 3

_FAMILIES = ("gamma", "tempered_stable", "gig")


def build_subordinator(proc):
    family = proc.get("family")
    try:
        if family == "gamma":
            return GammaSubordinator(nu=float(proc["nu"]), gamma=float(proc["gamma"]))
        if family == "tempered_stable":
            return TemperedStableSubordinator(
                kappa=float(proc["kappa"]), delta=float(proc["delta"]), gamma=float(proc["gamma"])
            )
        if family == "gig":
            return GIGSubordinator(
                lam=float(proc["lam"]),
                delta=float(proc["delta"]),
                gamma=float(proc["gamma"]),
                corner=float(proc["corner"]) if proc.get("corner") is not None else None,
            )
    except KeyError as exc:
        raise ConfigError(f"process config for family {family!r} is missing parameter {exc}")
    raise ConfigError(f"process.family must be one of {_FAMILIES}, got {family!r}")


def build_nvm_spec(proc):
    return NVMSpec(
        subordinator=build_subordinator(proc),
        mu_w=float(proc.get("mu_w", 0.0)),
        sigma_w=float(proc.get("sigma_w", 1.0)),
    )


def _require(cfg, key, kind=float, positive=False):
    if key not in cfg:
        raise ConfigError(f"config key {key!r} is required")
    try:
        value = kind(cfg[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config key {key!r} is not a valid {kind.__name__}") from exc
    if positive and not value > 0:
        raise ConfigError(f"config key {key!r} must be positive, got {value}")
    return value


def _eps_grid_from(cfg):
    spec = cfg.get("eps_grid") or {}
    lo = float(spec.get("min", 1e-8))
    hi = float(spec.get("max", 1e-2))
    count = int(spec.get("count", 13))
    if not (0.0 < lo < hi) or count < 2:
        raise ConfigError("eps_grid needs 0 < min < max and count >= 2")
    return list(np.geomspace(hi, lo, count))


def _chunk_sizes(n):
    sizes = [CHUNK] * (n // CHUNK)
    if n % CHUNK:
        sizes.append(n % CHUNK)
    return sizes


def _pmap(fn, items, jobs):
    if jobs <= 1:
        return [fn(item) for item in items]
    with futures.ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def build_id():
    here = os.path.dirname(os.path.abspath(__file__))
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=here, capture_output=True, text=True, timeout=10,
        )
        if out.returncode == 0 and out.stdout.strip():
            return out.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        pass
    return f"nvmlevy-{__version__}"


def _write_text(path, text):
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _write_json(path, payload):
    _write_text(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _write_manifest(out_dir, command, cfg, outputs):
    manifest = {
        "command": command,
        "config": cfg,
        "seed": cfg["seed"],
        "build": build_id(),
        "outputs": sorted(outputs),
    }
    _write_json(os.path.join(out_dir, "manifest.json"), manifest)


def _csv_text(write_fn):
    buf = io.StringIO()
    write_fn(buf)
    return buf.getvalue()


# ----------------------------------------------------------------------------
# Replica workers (top-level so they pickle into a process pool).

def _path_worker(payload, idx):
    cfg = payload
    proc = cfg["process"]
    stream = make_stream(cfg["seed"], _NS_PATHS, idx)
    kind = cfg["kind"]
    eps = cfg["epsilon"]
    horizon = cfg["horizon"]
    if kind == "subordinator":
        spec = build_subordinator(proc)
        series = spec.sample_jumps(eps, horizon, stream)
        return idx, _csv_text(series.write_csv), (series.times, series.sizes)
    if kind == "nvm":
        nvm = build_nvm_spec(proc)
        series = nvm.subordinator.sample_jumps(eps, horizon, stream)
        path = build_nvm_path(nvm, series, stream)
        return idx, _csv_text(path.write_csv), (path.times, path.values)
    if kind == "sde":
        nvm = build_nvm_spec(proc)
        sde_cfg = cfg["sde"]
        model = LinearSDEModel(A=np.array(sde_cfg["A"], dtype=float),
                               h=np.array(sde_cfg["h"], dtype=float),
                               horizon=horizon)
        grid = np.linspace(0.0, horizon, int(cfg.get("grid_points", 100)) + 1)
        x0 = np.array(sde_cfg.get("x0", [0.0] * model.dim), dtype=float)
        path = simulate_sde(model, nvm, eps, grid, cfg.get("residual_mode", "none"), x0, stream)
        return idx, _csv_text(path.write_csv), (path.grid, path.states)
    raise ConfigError(f"unknown simulation kind {kind!r}")


def _residual_worker(payload, chunk):
    cfg = payload
    idx, count = chunk
    nvm = build_nvm_spec(cfg["process"])
    stream = make_stream(cfg["seed"], _NS_RESIDUAL, idx)
    return standardised_residual_samples(
        nvm, cfg["epsilon"], cfg.get("time", 1.0), count, stream,
        eps_floor=cfg.get("eps_floor"),
    )


def _marginal_worker(payload, chunk):
    cfg = payload
    idx, count = chunk
    spec = build_subordinator(cfg["process"])
    stream = make_stream(cfg["seed"], _NS_MARGINAL, idx)
    t = cfg.get("time", 1.0)
    out = np.empty(count)
    for i in range(count):
        out[i] = spec.sample_jumps(cfg["epsilon"], t, stream).total()
    return out


# ----------------------------------------------------------------------------
# Commands.

def cmd_simulate(cfg, out_dir, jobs, render):
    replicas = int(_require(cfg, "replicas", int, positive=True))
    _require(cfg, "epsilon", float, positive=True)
    _require(cfg, "horizon", float, positive=True)
    if cfg["kind"] == "sde" and "sde" not in cfg:
        raise ConfigError("simulate sde requires an 'sde' config block (A, h, x0)")
    worker = functools.partial(_path_worker, cfg)
    results = _pmap(worker, range(replicas), jobs)
    outputs = []
    plot_data = []
    for idx, text, data in results:
        name = f"path_{idx:04d}.csv"
        _write_text(os.path.join(out_dir, name), text)
        outputs.append(name)
        plot_data.append(data)
    if render:
        fig = "paths.png"
        if cfg["kind"] == "sde":
            plots.save_state_paths_figure(
                [d[0] for d in plot_data], [d[1] for d in plot_data],
                os.path.join(out_dir, fig),
            )
        else:
            plots.save_paths_figure(plot_data, os.path.join(out_dir, fig))
        outputs.append(fig)
    _write_manifest(out_dir, "simulate", cfg, outputs)
    return EXIT_OK


def cmd_residual_hist(cfg, out_dir, jobs, render):
    replicas = int(_require(cfg, "replicas", int, positive=True))
    eps = _require(cfg, "epsilon", float, positive=True)
    nvm = build_nvm_spec(cfg["process"])
    alpha = float(cfg.get("alpha", 0.01))
    chunks = list(enumerate(_chunk_sizes(replicas)))
    worker = functools.partial(_residual_worker, cfg)
    samples = np.concatenate(_pmap(worker, chunks, jobs))

    ks = statsmod.ks_one_sample(samples, statsmod.normal_cdf)
    summary_moments = statsmod.moments(samples)
    floor = cfg.get("eps_floor") or eps * 1e-6
    summary = {
        "ks_statistic": ks.statistic,
        "ks_p_value": ks.p_value,
        "normal_at_alpha": ks.p_value > alpha,
        "alpha": alpha,
        "n": ks.n,
        "moments": {
            "mean": summary_moments.mean,
            "variance": summary_moments.variance,
            "skewness": summary_moments.skewness,
            "excess_kurtosis": summary_moments.excess_kurtosis,
            "se_kurtosis": summary_moments.se_kurtosis,
            "kurtosis_ci99": list(summary_moments.kurtosis_ci99),
        },
        "eps_floor": floor,
        "variance_deficit_below_floor": residual_variance_deficit(nvm, eps, floor),
    }
    _write_text(os.path.join(out_dir, "samples.csv"),
                "y\n" + "".join(f"{v:.17g}\n" for v in samples))
    _write_json(os.path.join(out_dir, "summary.json"), summary)
    outputs = ["samples.csv", "summary.json"]
    if render:
        plots.save_histogram_figure(samples, os.path.join(out_dir, "histogram.png"))
        levels = (np.arange(min(400, len(samples))) + 0.5) / min(400, len(samples))
        qq = list(zip(np.quantile(samples, levels), special.ndtri(levels)))
        plots.save_qq_figure(qq, os.path.join(out_dir, "qq.png"),
                             xlabel="residual quantiles", ylabel="normal quantiles")
        outputs += ["histogram.png", "qq.png"]
    _write_manifest(out_dir, "residual-hist", cfg, outputs)
    return EXIT_OK


def cmd_bound_curve(cfg, out_dir, jobs, render):
    nvm = build_nvm_spec(cfg["process"])
    grid = _eps_grid_from(cfg)
    curve = bounds.build_bound_curve(nvm, grid)
    _write_text(os.path.join(out_dir, "curve.csv"), _csv_text(curve.write_csv))
    summary = {
        "family": curve.family,
        "parameters": curve.parameters,
        "fitted_loglog_slope": curve.asymptotic_slope,
    }
    _write_json(os.path.join(out_dir, "summary.json"), summary)
    outputs = ["curve.csv", "summary.json"]
    if render:
        plots.save_bound_curve_figure(curve.points, os.path.join(out_dir, "curve.png"))
        outputs.append("curve.png")
    _write_manifest(out_dir, "bound-curve", cfg, outputs)
    return EXIT_OK


def cmd_check_condition(cfg, out_dir, jobs, render, expect=None):
    spec = build_subordinator(cfg["process"])
    report = bounds.condition_report(spec, _eps_grid_from(cfg))
    _write_json(os.path.join(out_dir, "report.json"), report.as_dict())
    outputs = ["report.json"]
    if render:
        plots.save_trace_figure(report.numeric_trace, os.path.join(out_dir, "trace.png"),
                                ylabel="M2 / M1^2")
        outputs.append("trace.png")
    _write_manifest(out_dir, "check-condition", cfg, outputs)
    if expect is not None and report.verdict != expect:
        print(f"verdict {report.verdict} does not match expected {expect}", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_verify_marginal(cfg, out_dir, jobs, render, expect="pass"):
    replicas = int(cfg.get("marginal_replicas") or _require(cfg, "replicas", int, positive=True))
    if replicas < 10:
        raise ConfigError(f"marginal verification needs at least 10 replicas, got {replicas}")
    _require(cfg, "epsilon", float, positive=True)
    spec = build_subordinator(cfg["process"])
    t = float(cfg.get("time", 1.0))
    alpha = float(cfg.get("alpha", 0.01))
    chunks = list(enumerate(_chunk_sizes(replicas)))
    worker = functools.partial(_marginal_worker, cfg)
    samples = np.concatenate(_pmap(worker, chunks, jobs))

    if spec.family == "gamma":
        ks = statsmod.ks_one_sample(samples, spec.marginal_cdf(t))
        reference = None
    else:
        exact_stream = make_stream(cfg["seed"], _NS_EXACT, 0)
        reference = spec.sample_exact_marginal(t, exact_stream, size=replicas)
        ks = statsmod.ks_two_sample(samples, reference)

    passed = ks.p_value > alpha
    payload = dict(ks.as_dict(), alpha=alpha, passed=passed, time=t)
    _write_text(os.path.join(out_dir, "marginal.csv"),
                "z\n" + "".join(f"{v:.17g}\n" for v in samples))
    _write_json(os.path.join(out_dir, "ks.json"), payload)
    outputs = ["marginal.csv", "ks.json"]
    if render:
        k = min(400, len(samples))
        if reference is None:
            from scipy import stats as sp_stats
            levels = (np.arange(k) + 0.5) / k
            dist = sp_stats.gamma(a=spec.nu * t, scale=1.0 / spec.decay_rate)
            qq = list(zip(np.quantile(samples, levels), dist.ppf(levels)))
        else:
            qq = statsmod.qq_points(samples, reference, k)
        plots.save_qq_figure(qq, os.path.join(out_dir, "qq.png"),
                             xlabel="truncated-process quantiles",
                             ylabel="exact-marginal quantiles")
        outputs.append("qq.png")
    _write_manifest(out_dir, "verify-marginal", cfg, outputs)
    if (expect == "pass") != passed:
        print(f"marginal KS p={ks.p_value:.5g} against expectation {expect!r}", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


# ----------------------------------------------------------------------------
# Argument parsing and config resolution.

def _add_common(parser):
    parser.add_argument("--preset", choices=sorted(PRESETS), help="named experiment preset")
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--seed", type=int, help="RNG seed (or env LEVY_SEED)")
    parser.add_argument("--jobs", type=int, default=1, help="worker pool size")
    parser.add_argument("--no-plot", action="store_true", help="skip figure rendering")
    proc = parser.add_argument_group("process overrides")
    proc.add_argument("--family", choices=_FAMILIES)
    proc.add_argument("--nu", type=float)
    proc.add_argument("--gamma", type=float)
    proc.add_argument("--kappa", type=float)
    proc.add_argument("--delta", type=float)
    proc.add_argument("--lam", type=float)
    proc.add_argument("--corner", type=float)
    proc.add_argument("--mu-w", dest="mu_w", type=float)
    proc.add_argument("--sigma-w", dest="sigma_w", type=float)
    run = parser.add_argument_group("run overrides")
    run.add_argument("--epsilon", type=float)
    run.add_argument("--horizon", type=float)
    run.add_argument("--time", type=float)
    run.add_argument("--replicas", type=int)
    run.add_argument("--marginal-replicas", dest="marginal_replicas", type=int)
    run.add_argument("--grid-points", dest="grid_points", type=int)
    run.add_argument("--residual-mode", dest="residual_mode", choices=("none", "gaussian"))
    run.add_argument("--eps-floor", dest="eps_floor", type=float)
    run.add_argument("--alpha", type=float)
    run.add_argument("--eps-min", dest="eps_min", type=float)
    run.add_argument("--eps-max", dest="eps_max", type=float)
    run.add_argument("--eps-count", dest="eps_count", type=int)
    run.add_argument("--sde-a", dest="sde_a", help="drift matrix as JSON rows")
    run.add_argument("--sde-h", dest="sde_h", help="noise loading vector as JSON")
    run.add_argument("--sde-x0", dest="sde_x0", help="initial state as JSON")


def resolve_config(args):
    cfg = {}
    if args.preset:
        cfg.update(preset(args.preset))
    if args.config:
        try:
            with open(args.config) as fh:
                cfg.update(json.load(fh))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}")
    proc = dict(cfg.get("process") or {})
    for key in ("family", "nu", "gamma", "kappa", "delta", "lam", "corner", "mu_w", "sigma_w"):
        value = getattr(args, key, None)
        if value is not None:
            proc[key] = value
    cfg["process"] = proc
    for key in ("epsilon", "horizon", "time", "replicas", "marginal_replicas",
                "grid_points", "residual_mode", "eps_floor", "alpha"):
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    grid = dict(cfg.get("eps_grid") or {})
    for key, name in (("eps_min", "min"), ("eps_max", "max"), ("eps_count", "count")):
        value = getattr(args, key, None)
        if value is not None:
            grid[name] = value
    if grid:
        cfg["eps_grid"] = grid
    sde = dict(cfg.get("sde") or {})
    for key, name in (("sde_a", "A"), ("sde_h", "h"), ("sde_x0", "x0")):
        value = getattr(args, key, None)
        if value is not None:
            try:
                sde[name] = json.loads(value)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"--{key.replace('_', '-')} is not valid JSON: {exc}")
    if sde:
        cfg["sde"] = sde

    seed = args.seed
    if seed is None:
        seed = cfg.get("seed")
    if seed is None and os.environ.get("LEVY_SEED"):
        try:
            seed = int(os.environ["LEVY_SEED"])
        except ValueError:
            raise ConfigError("LEVY_SEED must be an integer")
    if seed is None:
        raise ConfigError("a seed is required (--seed, config 'seed', or LEVY_SEED)")
    cfg["seed"] = int(seed)
    if not cfg["process"].get("family"):
        raise ConfigError("a process family is required (--family, preset, or config)")
    cfg.setdefault("horizon", 1.0)
    return cfg


def make_parser():
    parser = argparse.ArgumentParser(
        prog="nvmlevy",
        description="Shot-noise simulation and Gaussian residual diagnostics "
                    "for normal variance-mean Levy processes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="write truncated sample paths")
    p.add_argument("kind", choices=("subordinator", "nvm", "sde"))
    _add_common(p)

    p = sub.add_parser("residual-hist", help="standardised residual samples and diagnostics")
    _add_common(p)

    p = sub.add_parser("bound-curve", help="distance-bound values over a truncation grid")
    _add_common(p)

    p = sub.add_parser("check-condition", help="Gaussian-limit condition report")
    _add_common(p)
    p.add_argument("--expect", choices=(bounds.GAUSSIAN_LIMIT, bounds.NON_GAUSSIAN,
                                        bounds.INCONCLUSIVE))

    p = sub.add_parser("verify-marginal", help="KS check of the truncated marginal law")
    _add_common(p)
    p.add_argument("--expect", choices=("pass", "reject"), default="pass")
    return parser


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.command == "simulate":
            cfg["kind"] = args.kind
        out_dir = args.out
        os.makedirs(out_dir, exist_ok=True)
        render = not args.no_plot
        if args.command == "simulate":
            return cmd_simulate(cfg, out_dir, args.jobs, render)
        if args.command == "residual-hist":
            return cmd_residual_hist(cfg, out_dir, args.jobs, render)
        if args.command == "bound-curve":
            return cmd_bound_curve(cfg, out_dir, args.jobs, render)
        if args.command == "check-condition":
            return cmd_check_condition(cfg, out_dir, args.jobs, render, expect=args.expect)
        if args.command == "verify-marginal":
            return cmd_verify_marginal(cfg, out_dir, args.jobs, render, expect=args.expect)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, DomainError, CapabilityError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
