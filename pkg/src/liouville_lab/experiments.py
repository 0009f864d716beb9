"""Named verification experiments with machine-readable reports.

Each experiment resolves its configuration (defaults, then config file,
then overrides), runs deterministically for a fixed seed, and emits a JSON
report plus a CSV of raw samples.  Pass predicates are documented per
experiment below; reports embed the full resolved configuration so no run
depends on ambient state.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .config import apply_overrides, get_float, get_floats, get_int
from .criteria import (
    DIVERGES,
    RGrid,
    _crosscheck_gate,
    classify_limit,
    closed_form_threshold,
    decide_liouville,
    phi,
)
from .errors import RuleNotApplicable, UnknownExperiment
from .fields import bump_field, constant_field, getoor_field, potential_field
from .fraclap import QuadConfig, dynkin_residual
from .kernels import Ball, KernelConfig, green_ball, green_quadrature, unit_ball
from .model import (
    FAMILY_EXTERIOR_CROSS,
    FAMILY_EXTERIOR_PRODUCT,
    FAMILY_WHOLESPACE_PRODUCT,
    PairPQ,
    PowerLaw,
    ProblemSpec,
    Quad,
    StableIndexPair,
)
from .sim import RNG_IDENTITY, MCConfig, estimate_hitting_probability, path_rng

#: Documented proxy bound for the two-sided Green comparison: the sampled
#: upper ratios must stay below this and the lower ratios above its
#: reciprocal.  The underlying comparison constant is not explicit, so the
#: bound is an artifact choice, like the 0.5 uniformity ratio below.
#: Observed ratios sit in [0.04, 0.3] across the default combos.
GREEN_RATIO_BOUND = 100.0

#: Uniformity proxy for the doubling experiment: min/max of the scale-family
#: hitting estimates (the underlying statement is only existence of a
#: positive constant).
UNIFORMITY_RATIO = 0.5


@dataclass(frozen=True)
class ExperimentReport:
    name: str
    parameters: dict
    metrics: dict
    passed: bool
    runtime_seconds: float
    seed: int
    artifact_version: str = __version__
    csv_columns: tuple = ()
    csv_rows: tuple = field(default_factory=tuple, repr=False)

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "parameters": self.parameters,
            "metrics": self.metrics,
            "pass": self.passed,
            "runtime_seconds": self.runtime_seconds,
            "seed": self.seed,
            "artifact_version": self.artifact_version,
        }

    def write(self, out_dir) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "report.json", "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, sort_keys=True, indent=2)
            fh.write("\n")
        with open(out / "samples.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.csv_columns)
            writer.writerows(self.csv_rows)


def _resolve(defaults: dict, config, overrides) -> dict:
    cfg = dict(defaults)
    cfg.update(config or {})
    return apply_overrides(cfg, overrides)


def _mc_config(cfg: dict, n_key: str = "n_paths") -> MCConfig:
    return MCConfig(
        n_paths=get_int(cfg, n_key),
        seed=get_int(cfg, "seed"),
        max_steps_per_path=get_int(cfg, "max_steps", 10_000),
        workers=get_int(cfg, "workers", 1),
    )


# ---------------------------------------------------------------------------
# experiment bodies

def _sample_in_ball(rng, ball: Ball) -> np.ndarray:
    d = ball.d
    direction = rng.standard_normal(d)
    direction /= np.linalg.norm(direction)
    radius = ball.radius * rng.random() ** (1.0 / d)
    return ball.center_array() + radius * direction


def _run_green_bounds(cfg: dict):
    """Two-sided Green comparison: sampled ratio set must be bounded."""
    n_pairs = get_int(cfg, "n_pairs", 400)
    seed = get_int(cfg, "seed")
    combos = []
    for tok in cfg["combos"].split(";"):
        d_str, alphas = tok.split(":")
        for a in alphas.split(","):
            combos.append((int(d_str), float(a)))
    rows = []
    metrics = {}
    sup_upper, inf_lower = 0.0, float("inf")
    for d, alpha in combos:
        balls = [unit_ball(d), Ball(tuple([1.5, -0.5] + [0.3] * (d - 2)), 2.5)]
        for bi, ball in enumerate(balls):
            rng = path_rng(seed, 1000 * d + bi)
            r = ball.radius
            up, low = 0.0, float("inf")
            for _ in range(n_pairs):
                x = _sample_in_ball(rng, ball)
                y = _sample_in_ball(rng, ball)
                rho = float(np.linalg.norm(x - y))
                if rho < 1e-9 * r:
                    continue
                dx = r - float(np.linalg.norm(x - ball.center_array()))
                dy = r - float(np.linalg.norm(y - ball.center_array()))
                g = green_ball(x, y, ball, alpha)
                bound_u = (dx * dy) ** (alpha / 2.0) * rho ** (-d)
                bound_l = min(rho ** (alpha - d), bound_u)
                up = max(up, g / bound_u)
                low = min(low, g / bound_l)
                rows.append((d, alpha, bi, g / bound_u, g / bound_l))
            metrics[f"sup_upper_d{d}_a{alpha}_b{bi}"] = up
            metrics[f"inf_lower_d{d}_a{alpha}_b{bi}"] = low
            sup_upper = max(sup_upper, up)
            inf_lower = min(inf_lower, low)
    metrics["sup_upper"] = sup_upper
    metrics["inf_lower"] = inf_lower
    metrics["n_samples"] = float(len(rows))
    passed = (
        len(rows) >= 1000
        and sup_upper <= GREEN_RATIO_BOUND
        and inf_lower >= 1.0 / GREEN_RATIO_BOUND
    )
    return metrics, passed, ("d", "alpha", "ball", "ratio_upper", "ratio_lower"), rows


def _run_hitting_scaling(cfg: dict):
    """Fitted log-log slope of the hitting probability vs r near -(d-alpha)."""
    r_values = get_floats(cfg, "r_values")
    tol = get_float(cfg, "slope_tol", 0.15)
    combos = []
    for tok in cfg["combos"].split(";"):
        d_str, alphas = tok.split(":")
        for a in alphas.split(","):
            combos.append((int(d_str), float(a)))
    rows = []
    metrics = {}
    passed = True
    base = _mc_config(cfg)
    point = 0
    for d, alpha in combos:
        ests = []
        for r in r_values:
            # independent streams per grid point: offset the base seed
            point += 1
            mc = MCConfig(n_paths=base.n_paths, seed=base.seed + point,
                          max_steps_per_path=base.max_steps_per_path,
                          workers=base.workers)
            x = np.zeros(d)
            x[0] = r
            est = estimate_hitting_probability(
                x, unit_ball(d), Ball(tuple(x), 2.0 * r), alpha, mc)
            ests.append(est)
            rows.append((d, alpha, r, est.mean, est.std_error,
                         est.truncated_paths / est.n))
        slope = float(np.polyfit(np.log(r_values), np.log([e.mean for e in ests]), 1)[0])
        target = -(d - alpha)
        metrics[f"slope_d{d}_a{alpha}"] = slope
        metrics[f"target_d{d}_a{alpha}"] = target
        passed = passed and abs(slope - target) <= tol
    return metrics, passed, ("d", "alpha", "r", "estimate", "std_error",
                             "truncated_fraction"), rows


def _run_hitting_uniformity(cfg: dict):
    """Scale family of annulus starts: estimates stay uniformly positive."""
    r_values = get_floats(cfg, "r_values")
    d = get_int(cfg, "d", 2)
    alpha = get_float(cfg, "alpha", 1.0)
    start_factor = get_float(cfg, "start_factor", 1.5)
    rows = []
    ests = []
    trunc_max = 0.0
    base = _mc_config(cfg)
    for k, r in enumerate(r_values):
        # the ball-target geometry is exactly scale invariant, so a shared
        # seed would reproduce identical draws at every r; offsetting the
        # seed keeps the uniformity check statistically meaningful
        mc = MCConfig(n_paths=base.n_paths, seed=base.seed + k + 1,
                      max_steps_per_path=base.max_steps_per_path,
                      workers=base.workers)
        x = np.zeros(d)
        x[0] = start_factor * r
        est = estimate_hitting_probability(
            x, Ball((0.0,) * d, r), Ball(tuple(x), 4.0 * r), alpha, mc)
        ests.append(est.mean)
        trunc_max = max(trunc_max, est.truncated_paths / est.n)
        rows.append((r, est.mean, est.std_error, est.truncated_paths / est.n))
    # transience probe: eventual-hitting estimate from a huge enclosure,
    # reported only (no closed-form target exists)
    probe_cfg = MCConfig(n_paths=get_int(cfg, "probe_paths", 2000),
                         seed=get_int(cfg, "seed"),
                         max_steps_per_path=get_int(cfg, "max_steps", 10_000),
                         workers=get_int(cfg, "workers", 1))
    x = np.zeros(d)
    x[0] = 3.0
    probe = estimate_hitting_probability(
        x, Ball((0.0,) * d, 2.0), Ball(tuple(x), 1e6), alpha, probe_cfg)
    metrics = {
        "min_estimate": min(ests),
        "max_estimate": max(ests),
        "uniformity_ratio": min(ests) / max(ests),
        "max_truncated_fraction": trunc_max,
        "transience_probe": probe.mean,
    }
    passed = min(ests) >= UNIFORMITY_RATIO * max(ests) and trunc_max <= 1e-3
    return metrics, passed, ("r", "estimate", "std_error", "truncated_fraction"), rows


def _run_dynkin(cfg: dict):
    """Stochastic-representation residual battery; max residual <= 1e-3."""
    d = get_int(cfg, "d", 2)
    alpha = get_float(cfg, "alpha", 1.0)
    tol = get_float(cfg, "residual_tol", 1e-3)
    qcfg = QuadConfig(rel_tol=get_float(cfg, "rel_tol", 1e-6))
    cases = cfg.get("cases", "constant,getoor,bump").split(",")
    battery = {
        "constant": (constant_field(2.0), unit_ball(d), 1.0),
        "getoor": (getoor_field(alpha), Ball((0.0,) * d, 0.5), 0.5),
        "bump": (bump_field(2.0), unit_ball(d), 1.0),
    }
    rel_points = [(0.0, 0.0), (0.6, 0.0), (-0.4, 0.7)]
    rows = []
    worst = 0.0
    for case in cases:
        f, ball, scale = battery[case.strip()]
        for px, py in rel_points:
            x = np.zeros(d)
            x[0] = px * scale
            if d > 1:
                x[1] = py * scale
            res = dynkin_residual(f, x, ball, alpha, qcfg)
            worst = max(worst, res)
            rows.append((case.strip(), float(x[0]), float(x[1] if d > 1 else 0.0), res))
    metrics = {"max_residual": worst, "tolerance": tol}
    return metrics, worst <= tol, ("case", "x0", "x1", "residual"), rows


def _run_blowup(cfg: dict):
    """Occupation lower bound along growing balls diverges for the
    configured power-law potential (pass checks the r^{beta-d} * phi proxy;
    the direct occupation quadrature is reported alongside)."""
    d = get_int(cfg, "d", 2)
    beta = get_float(cfg, "beta", 1.0)
    pot = PowerLaw(c=get_float(cfg, "V.c", 1.0), m=get_float(cfg, "V.m", 0.0))
    grid = RGrid(r0=get_float(cfg, "grid.r0", 4.0),
                 gamma=get_float(cfg, "grid.gamma", 2.0),
                 k_points=get_int(cfg, "grid.k", 8))
    kcfg = KernelConfig(quad_rel_tol=1e-8)
    vfield = potential_field(pot)
    rows = []
    proxy, occ = [], []
    for r in grid.values():
        x = np.zeros(d)
        x[0] = r + 2.0
        ball = Ball(tuple(x), r)
        occ_val = green_quadrature(x, ball, beta, vfield, kcfg)
        proxy_val = r ** (beta - d) * phi(pot, r, d, kcfg)
        occ.append(occ_val)
        proxy.append(proxy_val)
        rows.append((r, proxy_val, occ_val))
    proxy_cls = classify_limit(list(zip(grid.values(), proxy)))
    occ_cls = classify_limit(list(zip(grid.values(), occ)))
    metrics = {
        "proxy_exponent": proxy_cls.fitted_exponent,
        "proxy_class_diverges": float(proxy_cls.tag == DIVERGES),
        "occupation_exponent": occ_cls.fitted_exponent,
        "occupation_class_diverges": float(occ_cls.tag == DIVERGES),
    }
    return metrics, proxy_cls.tag == DIVERGES, ("r", "proxy", "occupation"), rows


def _sweep_specs(cfg: dict):
    dims = [int(v) for v in get_floats(cfg, "dims", "2,3")]
    alpha = get_float(cfg, "alpha", 1.0)
    pq_vals = get_floats(cfg, "pq_values", "0.5,1,1.5,2,3")
    mn_vals = get_floats(cfg, "mn_values", "0,1")
    etas = get_floats(cfg, "etas", "1.5,2,3")
    fracs = get_floats(cfg, "fractions", "0.25,0.5,0.75")
    specs = []
    for d in dims:
        idx = StableIndexPair(d, alpha, alpha)
        for p in pq_vals:
            for q in pq_vals:
                for m in mn_vals:
                    for n in mn_vals:
                        specs.append(ProblemSpec(
                            FAMILY_EXTERIOR_CROSS, idx, PairPQ(p, q),
                            PowerLaw(1.0, m), PowerLaw(1.0, n)))
        for fam in (FAMILY_WHOLESPACE_PRODUCT, FAMILY_EXTERIOR_PRODUCT):
            for eta in etas:
                for fu in fracs:
                    for fv in fracs:
                        p1 = fu * eta
                        q2 = fv * eta
                        specs.append(ProblemSpec(
                            fam, idx, Quad(p1, eta - p1, eta - q2, q2),
                            PowerLaw(1.0, 0.0), PowerLaw(1.0, 0.0)))
    return specs


def _run_criteria_sweep(cfg: dict):
    """Numeric decisions agree with the closed-form exponent route on every
    lattice spec strictly off the deadband; exact-boundary specs stay
    Inconclusive; sub-unit cross specs with bounded-below potentials hold."""
    grid = RGrid()
    kcfg = KernelConfig(quad_rel_tol=1e-9)
    rows = []
    checked = boundary = clause = skipped = 0
    disagreements = boundary_violations = clause_violations = 0
    for spec in _sweep_specs(cfg):
        verdict = decide_liouville(spec, grid, kcfg)
        holds = verdict.holds()
        ex = spec.exponents
        exps_str = (f"p={ex.p},q={ex.q}" if isinstance(ex, PairPQ)
                    else f"p1={ex.p1},p2={ex.p2},q1={ex.q1},q2={ex.q2}")
        try:
            record = closed_form_threshold(spec)
        except RuleNotApplicable:
            record = None
        if record is None:
            if (spec.family == FAMILY_EXTERIOR_CROSS and ex.p * ex.q <= 1.0
                    and spec.U.m >= 0 and spec.V.m >= 0):
                clause += 1
                if not holds:
                    clause_violations += 1
                status = "clause"
            else:
                skipped += 1
                status = "no_rule"
        elif _crosscheck_gate(spec, record):
            checked += 1
            if record.satisfied != holds:
                disagreements += 1
            status = "checked"
        else:
            exps = record.details["condition_exponents"].values()
            if any(abs(e) <= 1e-9 for e in exps):
                boundary += 1
                if holds and not record.satisfied:
                    boundary_violations += 1
                status = "boundary"
            else:
                skipped += 1
                status = "near_deadband"
        rows.append((spec.family, spec.indices.d, exps_str, spec.U.m, spec.V.m,
                     record.rule if record else "",
                     record.satisfied if record else "", verdict.conclusion, status))
    metrics = {
        "n_specs": float(len(rows)),
        "n_checked": float(checked),
        "n_boundary": float(boundary),
        "n_clause": float(clause),
        "n_skipped": float(skipped),
        "disagreements": float(disagreements),
        "boundary_violations": float(boundary_violations),
        "clause_violations": float(clause_violations),
    }
    passed = (disagreements == 0 and boundary_violations == 0
              and clause_violations == 0 and checked >= 100)
    return metrics, passed, ("family", "d", "exponents", "U_m", "V_m", "rule",
                             "symbolic_satisfied", "conclusion", "status"), rows


_DEFAULTS = {
    "lemma21": {"seed": "1", "workers": "1", "n_pairs": "400",
                "combos": "2:0.5,1.0,1.5;3:1.0,1.5"},
    "lemma22a": {"seed": "1", "workers": "1", "n_paths": "100000",
                 "r_values": "4,8,16,32,64", "combos": "2:1.0;3:1.5",
                 "max_steps": "10000", "slope_tol": "0.15"},
    "lemma22b": {"seed": "1", "workers": "1", "n_paths": "100000",
                 "r_values": "4,8,16,32,64", "d": "2", "alpha": "1.0",
                 "start_factor": "1.5", "max_steps": "10000",
                 "probe_paths": "2000"},
    "dynkin": {"seed": "1", "workers": "1", "d": "2", "alpha": "1.0",
               "cases": "constant,getoor,bump", "rel_tol": "1e-6",
               "residual_tol": "1e-3"},
    "blowup": {"seed": "1", "workers": "1", "d": "2", "beta": "1.0",
               "V.c": "1.0", "V.m": "0.0", "grid.r0": "4", "grid.gamma": "2",
               "grid.k": "8"},
    "criteria-sweep": {"seed": "1", "workers": "1", "dims": "2,3",
                       "alpha": "1.0", "pq_values": "0.5,1,1.5,2,3",
                       "mn_values": "0,1", "etas": "1.5,2,3",
                       "fractions": "0.25,0.5,0.75"},
}

_BODIES = {
    "lemma21": _run_green_bounds,
    "lemma22a": _run_hitting_scaling,
    "lemma22b": _run_hitting_uniformity,
    "dynkin": _run_dynkin,
    "blowup": _run_blowup,
    "criteria-sweep": _run_criteria_sweep,
}

EXPERIMENTS = tuple(sorted(_BODIES))


def run_experiment(name: str, config: dict | None = None, overrides=(),
                   out_dir=None) -> ExperimentReport:
    """Run a named experiment and optionally write report.json + samples.csv."""
    if name not in _BODIES:
        raise UnknownExperiment(f"unknown experiment {name!r}; choose from {EXPERIMENTS}")
    cfg = _resolve(_DEFAULTS[name], config, overrides)
    seed = get_int(cfg, "seed", 1)
    start = time.perf_counter()
    metrics, passed, columns, rows = _BODIES[name](cfg)
    runtime = time.perf_counter() - start
    params = dict(sorted(cfg.items()))
    params["rng"] = RNG_IDENTITY
    report = ExperimentReport(
        name=name,
        parameters=params,
        metrics={k: float(v) for k, v in sorted(metrics.items())},
        passed=bool(passed),
        runtime_seconds=runtime,
        seed=seed,
        csv_columns=tuple(columns),
        csv_rows=tuple(rows),
    )
    if out_dir is not None:
        report.write(out_dir)
    return report
