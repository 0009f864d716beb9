"""Command-line harness: experiments, criteria decisions, single operations.

    liouville-lab experiment NAME [--config FILE] [--set k=v]... [--seed N]
                  [--workers N] [--out DIR]
    liouville-lab decide --config SPEC [--set k=v]... [--out DIR]
    liouville-lab phi|green|flap|hit [--set k=v]... [--out DIR]

Exit code 0 means the experiment passed (or the operation ran cleanly);
failures and errors exit nonzero.  Reports land in --out as report.json
plus samples.csv for experiments.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import (
    apply_overrides,
    get_float,
    get_floats,
    get_int,
    grid_from_config,
    read_config,
    spec_from_config,
)
from .criteria import decide_liouville, phi
from .errors import LiouvilleLabError
from .experiments import EXPERIMENTS, run_experiment
from .fields import named_field
from .fraclap import QuadConfig, frac_laplacian_eval
from .kernels import Ball, KernelConfig, green_ball
from .model import PowerLaw, TabulatedRadial
from .sim import MCConfig, estimate_hitting_probability


def _base_config(args) -> dict:
    cfg = read_config(args.config) if args.config else {}
    cfg = apply_overrides(cfg, args.set or [])
    if args.seed is not None:
        cfg["seed"] = str(args.seed)
    if args.workers is not None:
        cfg["workers"] = str(args.workers)
    return cfg


def _emit(args, payload: dict) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2)
    print(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(text + "\n", encoding="utf-8")


def _kernel_cfg(cfg: dict) -> KernelConfig:
    return KernelConfig(
        quad_rel_tol=get_float(cfg, "quad.rel_tol", 1e-8),
        max_quad_subdivisions=get_int(cfg, "quad.max_subdivisions", 200),
    )


def _potential(cfg: dict, prefix: str):
    kind = cfg.get(f"{prefix}.kind", "power")
    if kind == "power":
        return PowerLaw(get_float(cfg, f"{prefix}.c", 1.0), get_float(cfg, f"{prefix}.m", 0.0))
    knots = tuple(
        (float(r), float(v))
        for r, v in (tok.split(":") for tok in cfg[f"{prefix}.knots"].split(","))
    )
    return TabulatedRadial(knots, get_float(cfg, f"{prefix}.m_tail", 0.0))


def _cmd_experiment(args) -> int:
    cfg = _base_config(args)
    report = run_experiment(args.name, config=cfg, out_dir=args.out)
    summary = report.to_json_dict()
    print(json.dumps(summary, sort_keys=True, indent=2))
    return 0 if report.passed else 1


def _cmd_decide(args) -> int:
    cfg = _base_config(args)
    spec = spec_from_config(cfg)
    verdict = decide_liouville(spec, grid_from_config(cfg), _kernel_cfg(cfg))
    _emit(args, verdict.to_json_dict())
    return 0


def _cmd_phi(args) -> int:
    cfg = _base_config(args)
    value = phi(_potential(cfg, "U"), get_float(cfg, "r"), get_int(cfg, "d"),
                _kernel_cfg(cfg))
    _emit(args, {"operation": "phi", "r": get_float(cfg, "r"), "value": value})
    return 0


def _cmd_green(args) -> int:
    cfg = _base_config(args)
    d = get_int(cfg, "d")
    ball = Ball(tuple(get_floats(cfg, "ball.center", ",".join(["0"] * d))),
                get_float(cfg, "ball.radius", 1.0))
    value = green_ball(get_floats(cfg, "x"), get_floats(cfg, "y"), ball,
                       get_float(cfg, "alpha"), _kernel_cfg(cfg))
    _emit(args, {"operation": "green", "value": value})
    return 0


def _cmd_flap(args) -> int:
    cfg = _base_config(args)
    d = get_int(cfg, "d")
    alpha = get_float(cfg, "alpha")
    f = named_field(cfg.get("f", "getoor"), d, alpha)
    qcfg = QuadConfig(
        split_radius=get_float(cfg, "split_radius", 0.1),
        rel_tol=get_float(cfg, "rel_tol", 1e-6),
    )
    value = frac_laplacian_eval(f, get_floats(cfg, "x"), alpha, qcfg)
    _emit(args, {"operation": "flap", "field": cfg.get("f", "getoor"), "value": value})
    return 0


def _cmd_hit(args) -> int:
    cfg = _base_config(args)
    d = get_int(cfg, "d")
    alpha = get_float(cfg, "alpha")
    start = get_floats(cfg, "start")
    target = Ball(tuple(get_floats(cfg, "target.center", ",".join(["0"] * d))),
                  get_float(cfg, "target.radius", 1.0))
    enclosure = Ball(tuple(get_floats(cfg, "enclosure.center", cfg["start"])),
                     get_float(cfg, "enclosure.radius"))
    mc = MCConfig(
        n_paths=get_int(cfg, "n_paths", 10_000),
        seed=get_int(cfg, "seed", 1),
        max_steps_per_path=get_int(cfg, "max_steps", 10_000),
        workers=get_int(cfg, "workers", 1),
    )
    est = estimate_hitting_probability(np.asarray(start), target, enclosure, alpha, mc)
    _emit(args, {
        "operation": "hit",
        "estimate": {"mean": est.mean, "std_error": est.std_error,
                     "n": est.n, "truncated_paths": est.truncated_paths},
    })
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="liouville-lab",
        description="Stable-process kernel laboratory and Liouville criteria harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a config key (repeatable)")
        p.add_argument("--seed", type=int, help="Monte Carlo seed")
        p.add_argument("--workers", type=int, help="worker process count")
        p.add_argument("--out", help="directory for report.json / samples.csv")

    p_exp = sub.add_parser("experiment", help="run a named verification experiment")
    p_exp.add_argument("name", choices=EXPERIMENTS)
    common(p_exp)
    p_exp.set_defaults(fn=_cmd_experiment)

    for cmd, fn, blurb in (
        ("decide", _cmd_decide, "evaluate the nonexistence criteria for a problem spec"),
        ("phi", _cmd_phi, "annulus growth functional of a potential"),
        ("green", _cmd_green, "ball Green function at a point pair"),
        ("flap", _cmd_flap, "pointwise nonlocal operator on a battery field"),
        ("hit", _cmd_hit, "Monte Carlo hitting-before-exit probability"),
    ):
        p = sub.add_parser(cmd, help=blurb)
        common(p)
        p.set_defaults(fn=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except LiouvilleLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
