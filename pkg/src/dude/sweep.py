"""Parameter sweeps, CSV tables and run manifests for figure reproduction."""
from __future__ import annotations

import csv
import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import __version__
from .analytic import (case2_cdf, case2_mean_distance, case2_pdf, spectral_efficiency_case2,
                       throughput_context, ul_throughput_case2, OUTER_SPEC)
from .association import POLICIES, case_probabilities
from .config import ScenarioFile, SweepSpec
from .errors import DudeError
from .geometry import auto_window, matched_grid
from .model import PER_KM2, Scenario, dbm_to_watts
from .montecarlo import (estimate_case_probs_grid, estimate_case_probs_ppp, estimate_spectral_efficiency_case2,
                         sample_case2_distances_both)
from .quadrature import QuadSpec

VARIABLE_COLUMNS = {"density_ratio": "lambda_ratio", "small_power_dbm": "small_power_dbm",
                    "alpha": "alpha", "grid_Q": "grid_Q"}
VARIABLE_UNITS = {"density_ratio": "dimensionless", "small_power_dbm": "dBm",
                  "alpha": "dimensionless", "grid_Q": "probability"}


def apply_variable(base: Scenario, variable: str, value: float, auto: bool = True) -> Scenario:
    """Scenario at one sweep point; the window is re-sized when it was auto-sized."""
    if variable == "density_ratio":
        s = base.replace(small=base.small.__class__(base.small.tx_power, value * base.macro.intensity,
                                                    base.small.shadow_mean_db, base.small.shadow_std_db))
    elif variable == "small_power_dbm":
        s = base.replace(small=base.small.__class__(dbm_to_watts(value), base.small.intensity,
                                                    base.small.shadow_mean_db, base.small.shadow_std_db))
    elif variable == "alpha":
        s = base.replace(path_loss_exponent=float(value))
    elif variable == "grid_Q":
        lam = base.macro.intensity + base.small.intensity
        s = base.replace(
            macro=base.macro.__class__(base.macro.tx_power, value * lam, base.macro.shadow_mean_db,
                                       base.macro.shadow_std_db),
            small=base.small.__class__(base.small.tx_power, (1.0 - value) * lam, base.small.shadow_mean_db,
                                       base.small.shadow_std_db))
    else:
        raise ValueError(f"unknown sweep variable {variable!r}")
    return s.replace(window=auto_window(s)) if auto else s


class SweepRow(NamedTuple):
    series: float | None
    value: float
    metric: str
    engine: str
    result: float
    error: float
    n_samples: int
    runtime_ms: float


@dataclass
class SweepResult:
    variable: str
    rows: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    files: list = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        if not self.failures:
            return 0
        return 3 if self.rows else 2


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


class _Table:
    def __init__(self, name, columns, units):
        self.name = name
        self.columns = columns
        self.units = units
        self.rows = []

    def add(self, *values):
        self.rows.append([_fmt(v) if not isinstance(v, str) else v for v in values])

    def write(self, out_dir: Path) -> Path:
        path = out_dir / f"{self.name}.csv"
        with open(path, "w", newline="") as fh:
            fh.write("# units: " + ", ".join(f"{c}={u}" for c, u in zip(self.columns, self.units)) + "\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.columns)
            w.writerows(self.rows)
        return path


class _Runner:
    def __init__(self, spec: SweepSpec, out_dir: Path):
        self.spec = spec
        self.out_dir = out_dir
        self.result = SweepResult(spec.variable)
        self.quad = OUTER_SPEC if spec.quad_rel_tol is None else QuadSpec(
            rel_tol=spec.quad_rel_tol, abs_tol=OUTER_SPEC.abs_tol, transform="none")
        var_col = VARIABLE_COLUMNS[spec.variable]
        var_unit = VARIABLE_UNITS[spec.variable]
        lead = ["small_power_dbm"] if spec.series_small_power_dbm else []
        lead_u = ["dBm"] if lead else []
        self.lead = lead
        head, head_u = lead + [var_col, "engine"], lead_u + [var_unit, "label"]
        self.tables = {
            "case_probs": _Table("case_probs", head + ["p1", "p1_ci95", "p2", "p2_ci95", "p3", "p3_ci95",
                                                       "p4", "p4_ci95", "n_samples"],
                                 head_u + ["probability"] * 8 + ["count"]),
            "distance_summary": _Table("distance_summary", head + ["policy", "mean_m", "ks_vs_analytic",
                                                                   "n_samples"],
                                       head_u + ["label", "m", "dimensionless", "count"]),
            "distance_pdf": _Table("distance_pdf", head + ["policy", "x_m", "pdf_per_m"],
                                   head_u + ["label", "m", "1/m"]),
            "spectral_efficiency": _Table("spectral_efficiency", head + ["policy", "se_bps_per_hz", "error",
                                                                         "n_samples"],
                                          head_u + ["label", "bit/s/Hz", "bit/s/Hz (quad error or ci95)",
                                                    "count"]),
            "throughput": _Table("throughput", head + ["policy", "throughput_bps", "error", "n_samples"],
                                 head_u + ["label", "bit/s", "bit/s (quad error or ci95)", "count"]),
        }
        self._se_cache = {}

    def _row(self, series, value, metric, engine, result, error, n, t0):
        self.result.rows.append(SweepRow(series, value, metric, engine, float(result), float(error), int(n),
                                         1e3 * (time.perf_counter() - t0)))

    def _prefix(self, series, value, engine):
        return ([series] if self.lead else []) + [value, engine]

    def case_probs(self, s, series, value, engine):
        t0 = time.perf_counter()
        if engine == "analytic":
            p = case_probabilities(s)
            vals = [(x, 0.0) for x in p]
            n = 0
        else:
            if engine == "mc_ppp":
                est = estimate_case_probs_ppp(s, self.spec.mc)
            else:
                est = estimate_case_probs_grid(matched_grid(s, self.spec.grid_area_km2), s, self.spec.mc)
            vals = [(e.mean, e.ci_halfwidth_95) for e in est[:4]]
            n = est.p1.n_samples
        for k, (m, e) in enumerate(vals, start=1):
            self._row(series, value, f"p{k}", engine, m, e, n, t0)
        self.tables["case_probs"].add(*self._prefix(series, value, engine), *[x for pair in vals for x in pair], n)

    def distance_pdf(self, s, series, value, engine):
        t0 = time.perf_counter()
        table, curve = self.tables["distance_summary"], self.tables["distance_pdf"]
        if engine == "analytic":
            x_hi = 3.0 * max(case2_mean_distance(p, s) for p in POLICIES)
            xs = np.linspace(0.0, x_hi, 301)
            for policy in POLICIES:
                mean = case2_mean_distance(policy, s)
                self._row(series, value, f"mean_distance_{policy}", engine, mean, 0.0, 0, t0)
                table.add(*self._prefix(series, value, engine), policy, mean, 0.0, 0)
                for x, f in zip(xs, case2_pdf(policy, xs, s)):
                    curve.add(*self._prefix(series, value, engine), policy, x, f)
            return
        dists = sample_case2_distances_both(s, self.spec.mc)
        for policy in POLICIES:
            d = dists[policy]
            ks = d.ks_statistic(lambda x: case2_cdf(policy, x, s))
            self._row(series, value, f"mean_distance_{policy}", engine, d.mean, 0.0, d.total, t0)
            self._row(series, value, f"ks_{policy}", engine, ks, 0.0, d.total, t0)
            table.add(*self._prefix(series, value, engine), policy, d.mean, ks, d.total)
            centers = 0.5 * (d.bin_edges[1:] + d.bin_edges[:-1])
            for x, f in zip(centers, d.density()):
                curve.add(*self._prefix(series, value, engine), policy, x, f)

    def _se(self, s, series, value, engine, policy):
        key = (series, value, engine, policy)
        if key not in self._se_cache:
            if engine == "analytic":
                self._se_cache[key] = spectral_efficiency_case2(policy, s, self.quad) + (0,)
            else:
                e = estimate_spectral_efficiency_case2(policy, s, self.spec.mc)
                self._se_cache[key] = (e.mean, e.ci_halfwidth_95, e.n_samples)
        return self._se_cache[key]

    def spectral_efficiency(self, s, series, value, engine):
        for policy in POLICIES:
            t0 = time.perf_counter()
            v, e, n = self._se(s, series, value, engine, policy)
            self._row(series, value, f"se_{policy}", engine, v, e, n, t0)
            self.tables["spectral_efficiency"].add(*self._prefix(series, value, engine), policy, v, e, n)

    def throughput(self, s, series, value, engine):
        ctx = throughput_context(s)
        for policy in POLICIES:
            t0 = time.perf_counter()
            v, e, n = self._se(s, series, value, engine, policy)
            share = s.bandwidth_hz / ctx.devices_per_server(policy)
            self._row(series, value, f"throughput_{policy}", engine, v * share, e * share, n, t0)
            self.tables["throughput"].add(*self._prefix(series, value, engine), policy, v * share, e * share, n)

    def run(self, base: ScenarioFile):
        spec = self.spec
        series_list = spec.series_small_power_dbm or (None,)
        for series in series_list:
            s0 = base.scenario
            if series is not None:
                s0 = apply_variable(s0, "small_power_dbm", series, auto=False)
            for value in spec.values:
                try:
                    s = apply_variable(s0, spec.variable, value, base.auto_window)
                except (DudeError, ValueError) as exc:
                    self.result.failures.append({"series": series, "value": value, "output": "*",
                                                 "engine": "*", "error": f"{type(exc).__name__}: {exc}"})
                    continue
                for output in spec.outputs:
                    for engine in spec.engines:
                        try:
                            getattr(self, output)(s, series, value, engine)
                        except (DudeError, ValueError, ZeroDivisionError, ArithmeticError) as exc:
                            self.result.failures.append({"series": series, "value": value, "output": output,
                                                         "engine": engine,
                                                         "error": f"{type(exc).__name__}: {exc}"})


def _outputs_to_tables(outputs):
    names = []
    for o in outputs:
        names.extend(["distance_summary", "distance_pdf"] if o == "distance_pdf" else [o])
    return names


def _write_long(result: SweepResult, out_dir: Path, lead: bool) -> Path:
    path = out_dir / "sweep_result.csv"
    var_col = VARIABLE_COLUMNS[result.variable]
    with open(path, "w", newline="") as fh:
        fh.write(f"# units: {var_col}={VARIABLE_UNITS[result.variable]}, value/error in metric units "
                 "(p*: probability, mean_distance_*: m, ks_*: dimensionless, se_*: bit/s/Hz, "
                 "throughput_*: bit/s)\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow((["small_power_dbm"] if lead else []) + [var_col, "metric", "engine", "value", "error",
                                                            "n_samples"])
        for r in result.rows:
            w.writerow(([_fmt(r.series)] if lead else []) + [_fmt(r.value), r.metric, r.engine, _fmt(r.result),
                                                             _fmt(r.error), str(r.n_samples)])
    return path


def _manifest(out_dir: Path, base: ScenarioFile, spec: SweepSpec, result: SweepResult, source=None, extra=None):
    sweep = asdict(spec)
    manifest = {
        "tool": "dude",
        "version": __version__,
        "scenario_file": str(source) if source else None,
        "scenario_sha256": base.sha256,
        "scenario": _scenario_dict(base.scenario),
        "seed": spec.mc.master_seed(base.scenario),
        "sweep": sweep,
        "files": [p.name for p in result.files],
        "failures": result.failures,
        "timings_ms": [{"series": r.series, "value": r.value, "metric": r.metric, "engine": r.engine,
                        "runtime_ms": round(r.runtime_ms, 3)} for r in result.rows],
    }
    if extra:
        manifest.update(extra)
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n")
    return path


def _scenario_dict(s: Scenario) -> dict:
    d = asdict(s)
    d["macro"]["intensity_per_km2"] = s.macro.intensity / PER_KM2
    d["small"]["intensity_per_km2"] = s.small.intensity / PER_KM2
    d["device"]["intensity_per_km2"] = s.device.intensity / PER_KM2
    return d


def run_sweep(base: ScenarioFile, spec: SweepSpec, out_dir, source=None) -> SweepResult:
    """Evaluate every (value x output x engine) point and write CSVs plus ``manifest.json``.

    A failing point is recorded in the manifest and skipped; the remaining
    points are still written. Rows follow sweep-value order.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    runner = _Runner(spec, out_dir)
    runner.run(base)
    result = runner.result
    for name in _outputs_to_tables(spec.outputs):
        result.files.append(runner.tables[name].write(out_dir))
    result.files.append(_write_long(result, out_dir, bool(runner.lead)))
    _manifest(out_dir, base, spec, result, source)
    return result


class CompareRow(NamedTuple):
    small_power_dbm: float
    lambda_ratio: float
    drp_bps: float
    dude_bps: float
    gain_ratio: float
    drp_se: float
    dude_se: float


def compare_policies(base: ScenarioFile, out_dir, ratios=(1, 2, 5, 10, 15, 20), series=None,
                     quad: QuadSpec = OUTER_SPEC, source=None) -> list:
    """DRP vs DUDe Case-2 UL throughput across the density sweep, written to ``compare.csv``.

    Raises the underlying error (e.g. Case2ProbabilityZero) on the first failing point.
    """
    out_dir = Path(out_dir)
    rows = []
    powers = series or (None,)
    for p in powers:
        s0 = base.scenario if p is None else apply_variable(base.scenario, "small_power_dbm", p, auto=False)
        p_dbm = 10.0 * np.log10(s0.small.tx_power) + 30.0
        for r in ratios:
            s = apply_variable(s0, "density_ratio", r, base.auto_window)
            dude = ul_throughput_case2("dude", s, quad)
            drp = ul_throughput_case2("drp", s, quad)
            rows.append(CompareRow(round(p_dbm, 9), float(r), drp.value, dude.value, dude.value / drp.value,
                                   spectral_efficiency_case2("drp", s, quad).value,
                                   spectral_efficiency_case2("dude", s, quad).value))
    out_dir.mkdir(parents=True, exist_ok=True)
    t = _Table("compare", list(CompareRow._fields),
               ["dBm", "dimensionless", "bit/s", "bit/s", "dimensionless", "bit/s/Hz", "bit/s/Hz"])
    for row in rows:
        t.add(*row)
    path = t.write(out_dir)
    spec_like = {"ratios": list(ratios), "series_small_power_dbm": list(series) if series else None}
    manifest = {"tool": "dude", "version": __version__, "scenario_file": str(source) if source else None,
                "scenario_sha256": base.sha256, "scenario": _scenario_dict(base.scenario),
                "compare": spec_like, "files": [path.name]}
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n")
    return rows
