"""Command-line entry point: ``dude <subcommand> scenario.toml [options]``.

Exit codes: 0 success, 1 config error, 2 numeric failure, 3 partial results.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .analytic import OUTER_SPEC
from .association import case2_peak_density_ratio, case_probabilities
from .config import ENGINES, load_scenario, load_sweep, SweepSpec
from .errors import ConfigError, DudeError
from .geometry import interferer_intensity, thinning_probability
from .model import PER_KM2, watts_to_dbm
from .montecarlo import MODES, McConfig
from .sweep import compare_policies, run_sweep

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_PARTIAL = 0, 1, 2, 3
DEFAULT_RATIOS = (1.0, 2.0, 5.0, 10.0, 15.0, 20.0)


def _floats(text: str) -> tuple:
    try:
        vals = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _engines(text: str) -> tuple:
    vals = tuple(v.strip() for v in text.split(",") if v.strip())
    bad = [v for v in vals if v not in ENGINES]
    if bad or not vals:
        raise argparse.ArgumentTypeError(f"engines must be drawn from {ENGINES}")
    return vals


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--seed", type=int, help="master seed (default: scenario master_seed)")
    g.add_argument("--trials", type=int, help="Monte Carlo trials (independent deployments)")
    g.add_argument("--probes", type=int, help="probes per trial")
    g.add_argument("--workers", type=int, help="worker processes for Monte Carlo trials")
    g.add_argument("--mode", choices=MODES, help="Monte Carlo estimator mode")
    g.add_argument("--rel-tol", type=float, help="relative tolerance of the outer quadrature")
    g.add_argument("--out", type=Path, default=Path("out"), help="output directory (default: ./out)")

    p = argparse.ArgumentParser(prog="dude", description="Decoupled UL/DL access analysis for two-tier networks.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_, **kw):
        sp = sub.add_parser(name, parents=[common], help=help_, description=help_, **kw)
        sp.add_argument("scenario", type=Path, help="scenario TOML file")
        return sp

    add("validate", "check a scenario file and print derived quantities")
    for name, help_ in (("assoc", "association probabilities across a density sweep"),
                        ("distance", "Case-2 serving-distance laws across a density sweep"),
                        ("capacity", "Case-2 UL spectral efficiency and throughput across a density sweep"),
                        ("grid", "grid vs PPP association probabilities across a density sweep")):
        sp = add(name, help_)
        sp.add_argument("--ratios", type=_floats, default=DEFAULT_RATIOS, help="lambda_S/lambda_M values")
        sp.add_argument("--small-power", type=_floats, dest="series", help="P_S values in dBm (outer series)")
        if name != "grid":
            sp.add_argument("--engines", type=_engines, default=("analytic",), help="comma-separated engines")
        else:
            sp.add_argument("--area-km2", type=float, default=100.0, help="grid area in km^2")
    sp = add("compare", "DRP vs DUDe Case-2 UL throughput table with gain ratio")
    sp.add_argument("--ratios", type=_floats, default=DEFAULT_RATIOS)
    sp.add_argument("--small-power", type=_floats, dest="series")
    sp = add("sweep", "run a sweep described by a TOML file")
    sp.add_argument("sweep", type=Path, help="sweep TOML file")
    return p


def _mc(args, base: McConfig) -> McConfig:
    changes = {k: v for k, v in (("seed", args.seed), ("n_trials", args.trials), ("probes_per_trial", args.probes),
                                 ("workers", args.workers), ("estimator_mode", args.mode)) if v is not None}
    try:
        return replace(base, **changes)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _validate(sf) -> int:
    s = sf.scenario
    p = case_probabilities(s)
    print(f"scenario OK (sha256 {sf.sha256[:12]})")
    print(f"  alpha={s.alpha:g}  P_M={watts_to_dbm(s.macro.tx_power):g} dBm  P_S={watts_to_dbm(s.small.tx_power):g} dBm  "
          f"P_d={watts_to_dbm(s.device.tx_power):g} dBm")
    print(f"  lambda_M={s.macro.intensity / PER_KM2:g}/km2  lambda_S={s.small.intensity / PER_KM2:g}/km2  "
          f"lambda_d={s.device.intensity / PER_KM2:g}/km2")
    print(f"  window: {s.window.shape} {s.window.radius_or_halfside:.1f} m ({s.window.edge_policy})"
          f"{' [auto]' if sf.auto_window else ''}")
    print(f"  p1={p.p1:.6f}  p2={p.p2:.6f}  p3={p.p3:.6f}  p4={p.p4:.6f}")
    print(f"  Case-2 peak at lambda_S/lambda_M = {case2_peak_density_ratio(s):.4f}")
    print(f"  thinning p={thinning_probability(s):.3e}  interferer intensity={interferer_intensity(s) / PER_KM2:g}/km2")
    return EXIT_OK


def _report(result, out: Path) -> int:
    for f in result.failures:
        print(f"error at {f['output']}/{f['engine']} value={f['value']}: {f['error']}", file=sys.stderr)
    print(f"wrote {len(result.files)} CSV file(s) and manifest.json to {out}")
    return result.exit_code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        sf = load_scenario(args.scenario)
        if args.command == "validate":
            try:
                return _validate(sf)
            except DudeError as exc:
                print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
                return EXIT_NUMERIC
        rel_tol = args.rel_tol
        if rel_tol is not None and not (0 < rel_tol < 1 and math.isfinite(rel_tol)):
            raise ConfigError("--rel-tol must lie in (0, 1)")
        if args.command == "sweep":
            spec = load_sweep(args.sweep)
            spec = replace(spec, mc=_mc(args, spec.mc), quad_rel_tol=rel_tol or spec.quad_rel_tol)
        elif args.command != "compare":
            outputs = {"assoc": ("case_probs",), "distance": ("distance_pdf",), "grid": ("case_probs",),
                       "capacity": ("spectral_efficiency", "throughput")}[args.command]
            engines = ("analytic", "mc_ppp", "mc_grid") if args.command == "grid" else args.engines
            spec = SweepSpec("density_ratio", args.ratios, outputs, engines, args.series, _mc(args, McConfig()),
                             getattr(args, "area_km2", 100.0), rel_tol)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "compare":
        quad = OUTER_SPEC if rel_tol is None else replace(OUTER_SPEC, rel_tol=rel_tol)
        try:
            rows = compare_policies(sf, args.out, args.ratios, args.series, quad, source=args.scenario)
        except DudeError as exc:
            print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
            return EXIT_NUMERIC
        for r in rows:
            print(f"P_S={r.small_power_dbm:g} dBm  ratio={r.lambda_ratio:g}  DRP={r.drp_bps / 1e3:.3f} kbps  "
                  f"DUDe={r.dude_bps / 1e3:.3f} kbps  gain={r.gain_ratio:.2f}")
        return EXIT_OK

    result = run_sweep(sf, spec, args.out, source=args.scenario)
    return _report(result, args.out)


if __name__ == "__main__":
    sys.exit(main())
