"""Command-line entry point: simulate | expand | stability | converge | validate.

Exit codes: 0 success, 1 validation-battery failure, 2 configuration
error, 3 solver blow-up.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from .analysis import convergence_study, critical_mu, dispersion_curve
from .chebfit import cosh_expansion, expansion_error, expansion_error_bound, expansion_to_ks
from .config import (MAX_SEED, build_kernel, build_sim_config, load_config,
                     resolve_config)
from .errors import BlowUpError, ConfigError
from .presets import PRESET_NOTES, preset, preset_names
from .solvers import KellerSegel, solve_ks, solve_nonlocal_fp
from .storage import persist_trajectory, write_json, write_metadata
from .svgplot import line_plot
from .validate import run_battery

__all__ = ["main"]


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="ksapprox",
        description=(
            "Periodic 1-D nonlocal Fokker-Planck solver with chemotaxis-system "
            "approximation, cosh-kernel expansion, and linear stability tools."
        ),
        epilog="Exit codes: 0 success, 1 validation failure, 2 config error, 3 blow-up.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, needs_config=True):
        p = sub.add_parser(name, help=help_text)
        if needs_config:
            p.add_argument("--config", metavar="PATH", help="TOML run document")
            p.add_argument("--preset", metavar="NAME",
                           help=f"built-in recipe ({', '.join(preset_names())})")
            p.add_argument("--seed", type=int, metavar="U64",
                           help="override init.seed (perturbed_constant only)")
        p.add_argument("--out", metavar="DIR", help="override output directory")
        p.add_argument("--quiet", action="store_true", help="suppress progress output")
        return p

    add("simulate", "run one solver configuration and persist the trajectory")
    add("expand", "fit the cosh-basis expansion of the configured kernel")
    add("stability", "dispersion relation and fastest-growing mode")
    add("converge", "paired model-vs-approximation error across an eps ladder")
    p_val = add("validate", "run the built-in oracle battery", needs_config=False)
    p_val.add_argument("--corrupt", action="store_true",
                       help="self-test hook: corrupt one basis table to force a failure")
    return parser


def _load_document(args):
    """Resolve --config/--preset/--seed/--out into one config echo dict."""
    if bool(args.config) == bool(args.preset):
        raise ConfigError("give exactly one of --config PATH or --preset NAME")
    if args.preset:
        cfg = resolve_config(preset(args.preset))
        if not args.quiet:
            print(f"preset {args.preset}: {PRESET_NOTES[args.preset]}")
    else:
        cfg = load_config(args.config)
    if args.seed is not None:
        if not 0 <= args.seed <= MAX_SEED:
            raise ConfigError(f"seed must be in [0, 2^64), got {args.seed}",
                              field="init.seed")
        if cfg["init"]["kind"] != "perturbed_constant":
            raise ConfigError("--seed only applies to perturbed_constant init",
                              field="init.seed")
        cfg["init"]["seed"] = args.seed
    if args.out:
        cfg["output"]["directory"] = args.out
    return cfg


def _outdir(cfg):
    path = cfg["output"]["directory"]
    os.makedirs(path, exist_ok=True)
    return path


def _effective_seed(cfg):
    return cfg["init"]["seed"] if cfg["init"]["kind"] == "perturbed_constant" else None


def cmd_simulate(args):
    cfg = _load_document(args)
    sim = build_sim_config(cfg)
    solve = solve_ks if isinstance(sim.model, KellerSegel) else solve_nonlocal_fp
    traj = solve(sim)
    outdir = _outdir(cfg)
    written = persist_trajectory(outdir, traj, "simulate", cfg, _effective_seed(cfg),
                                 cfg["output"]["formats"])
    mass = traj.mass_log
    drift = float(np.max(np.abs(mass - mass[0])))
    if not args.quiet:
        print(f"simulate: {len(traj.snapshots)} snapshots to t = {traj.times[-1]:.6g} "
              f"in {len(traj.dt_log)} steps; mass drift {drift:.2e}; "
              f"{len(written)} files in {outdir}")
    return 0


def cmd_expand(args):
    cfg = _load_document(args)
    if "model" not in cfg or "n" not in cfg["model"]:
        raise ConfigError("expand needs an expansion degree", field="model.n")
    model = cfg["model"]
    kernel = build_kernel(cfg)
    L = cfg["grid"]["L"]
    mu = model["mu"]
    eps = model.get("eps", 1.0)
    d1_mode = model.get("d1_mode", "exact")
    d1 = math.inf if d1_mode == "exact" else d1_mode
    degrees = model["n"]

    outdir = _outdir(cfg)
    write_metadata(os.path.join(outdir, "metadata.json"), "expand", cfg,
                   _effective_seed(cfg))
    x_dense = np.linspace(-L, L, 801)
    w_dense = kernel.evaluate(x_dense)
    results = []
    for n in degrees:
        expansion = cosh_expansion(kernel.evaluate, n, L)
        sup_err = expansion_error(kernel.evaluate, expansion)
        bound = expansion_error_bound(kernel.evaluate, n, L, safety=4.0)
        params = expansion_to_ks(expansion, eps=eps, mu=mu, d1=d1)
        lines = ["j,alpha,a,d"]
        for j in range(params.M):
            d_j = params.d[j]
            d_txt = "inf" if math.isinf(d_j) else f"{d_j:.17g}"
            lines.append(f"{j + 1},{expansion.alphas[j]:.17g},"
                         f"{params.a[j]:.17g},{d_txt}")
        csv_path = os.path.join(outdir, f"expand_n{n}.csv")
        with open(csv_path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write("\n".join(lines) + "\n")
        if "svg" in cfg["output"]["formats"]:
            line_plot(os.path.join(outdir, f"overlay_n{n}.svg"), x_dense,
                      [w_dense, expansion.reconstruct(x_dense)],
                      labels=["W", f"degree {n}"], xlabel="x", ylabel="W(x)",
                      title=f"cosh-basis fit, degree {n}")
        results.append({"n": n, "M": params.M, "sup_error": sup_err,
                        "error_bound": bound})
        if not args.quiet:
            print(f"expand: n = {n} -> {params.M} channels, sup error "
                  f"{sup_err:.4e} (bound {bound:.4e})")
    write_json(os.path.join(outdir, "expand.json"), {"L": L, "results": results})
    return 0


def cmd_stability(args):
    cfg = _load_document(args)
    if "model" not in cfg:
        raise ConfigError("missing required section [model]", field="model")
    kernel = build_kernel(cfg)
    mu = cfg["model"]["mu"]
    n_max = cfg["stability"]["n_max"]
    curve = dispersion_curve(kernel, mu, n_max=n_max)

    outdir = _outdir(cfg)
    write_metadata(os.path.join(outdir, "metadata.json"), "stability", cfg,
                   _effective_seed(cfg))
    lines = ["n,omega_n,lambda_n"]
    for n, w, lam in zip(curve.modes, curve.omega, curve.lam):
        lines.append(f"{n},{w:.17g},{lam:.17g}")
    with open(os.path.join(outdir, "stability.csv"), "w", encoding="utf-8",
              newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")

    try:
        mu_star = critical_mu(kernel, 1)
    except ConfigError:
        mu_star = None
    band = curve.unstable_band
    summary = {
        "n_star": int(curve.n_star),
        "lambda_star": float(curve.lam[curve.n_star]),
        "unstable_band": [int(n) for n in band],
        "mu_star_mode1": mu_star,
        "mu": mu,
        "n_max": n_max,
    }
    write_json(os.path.join(outdir, "stability.json"), summary)
    if "svg" in cfg["output"]["formats"]:
        line_plot(os.path.join(outdir, "dispersion.svg"),
                  curve.modes.astype(float), [curve.lam],
                  xlabel="mode n", ylabel="lambda(n)",
                  title=f"dispersion relation, mu = {mu:g}")
    if not args.quiet:
        if band.size:
            band_txt = f"unstable band n = {band[0]}..{band[-1]}"
        else:
            band_txt = "no unstable modes"
        print(f"stability: fastest mode n* = {curve.n_star} with lambda = "
              f"{curve.lam[curve.n_star]:.6g}; {band_txt}")
    return 0


def cmd_converge(args):
    cfg = _load_document(args)
    if "converge" not in cfg:
        raise ConfigError("missing required section [converge]", field="converge")
    sim = build_sim_config(cfg)
    ladder = cfg["converge"]["eps"]
    workers = cfg["converge"].get("workers")
    result = convergence_study(sim, ladder, workers=workers)

    outdir = _outdir(cfg)
    write_metadata(os.path.join(outdir, "metadata.json"), "converge", cfg,
                   _effective_seed(cfg))
    lines = ["eps,sup_t_L2,l2_t_H1"]
    for e, err, h1 in zip(result.eps, result.errors, result.h1_errors):
        lines.append(f"{e:.17g},{err:.17g},{h1:.17g}")
    with open(os.path.join(outdir, "converge.csv"), "w", encoding="utf-8",
              newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")
    write_json(os.path.join(outdir, "converge.json"), {
        "slope": result.slope,
        "fit_residual": result.fit_residual,
        "eps": list(result.eps),
        "sup_t_L2": list(result.errors),
        "l2_t_H1": list(result.h1_errors),
        "v_errors": [list(v) for v in result.v_errors],
    })
    if "svg" in cfg["output"]["formats"]:
        line_plot(os.path.join(outdir, "converge.svg"),
                  np.log10(result.eps), [np.log10(result.errors)],
                  xlabel="log10 eps", ylabel="log10 sup_t L2 error",
                  title=f"approximation error, slope = {result.slope:.3f}")
    if not args.quiet:
        print(f"converge: slope = {result.slope:.4f} over {len(result.eps)} "
              f"eps values (fit residual {result.fit_residual:.2e})")
    return 0


def cmd_validate(args):
    results = run_battery(corrupt=getattr(args, "corrupt", False))
    failures = 0
    for res in results:
        tag = "PASS" if res.passed else "FAIL"
        failures += 0 if res.passed else 1
        print(f"{tag} {res.name}: {res.detail}")
    if failures:
        print(f"validate: {failures} of {len(results)} checks failed")
        return 1
    if not args.quiet:
        print(f"validate: all {len(results)} checks passed")
    return 0


_COMMANDS = {
    "simulate": cmd_simulate,
    "expand": cmd_expand,
    "stability": cmd_stability,
    "converge": cmd_converge,
    "validate": cmd_validate,
}


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except BlowUpError as exc:
        print(f"blow-up: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
