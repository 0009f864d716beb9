"""Flat key-value configuration files and problem-spec (de)serialization.

Config files are plain text, one ``key = value`` per line, ``#`` comments,
dotted keys for grouping.  CLI overrides arrive as repeated ``key=value``
strings and take precedence over the file.

Problem-spec keys (the CLI contract):

    family                exterior_cross | wholespace_general |
                          wholespace_product | exterior_product | scalar
    d, alpha, beta        dimension and stability indices (beta ignored for scalar)
    p, q                  cross-system / scalar exponents
    p1, p2, q1, q2        product-system exponents
    U.kind, V.kind        power | table
    U.c, U.m              power-law coefficient and exponent
    U.knots               table knots as "r:v,r:v,..."
    U.m_tail              table tail exponent
    grid.r0, grid.gamma, grid.k   radius grid (defaults 4, 2, 8)
"""

from __future__ import annotations

from .criteria import RGrid
from .errors import ConfigParse
from .model import (
    FAMILIES,
    FAMILY_EXTERIOR_CROSS,
    FAMILY_SCALAR,
    PairPQ,
    Potential,
    PowerLaw,
    ProblemSpec,
    Quad,
    ScalarP,
    StableIndexPair,
    TabulatedRadial,
    validate_problem,
)


def parse_config_text(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParse(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigParse(f"line {lineno}: empty key")
        out[key] = value.strip()
    return out


def read_config(path) -> dict[str, str]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_config_text(fh.read())
    except OSError as exc:
        raise ConfigParse(f"cannot read config file {path}: {exc}") from exc


def apply_overrides(cfg: dict[str, str], overrides) -> dict[str, str]:
    out = dict(cfg)
    for item in overrides or ():
        if "=" not in item:
            raise ConfigParse(f"override {item!r} is not of the form key=value")
        key, value = item.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def get_float(cfg: dict, key: str, default=None) -> float:
    if key not in cfg:
        if default is None:
            raise ConfigParse(f"missing required key {key!r}")
        return float(default)
    try:
        return float(cfg[key])
    except ValueError as exc:
        raise ConfigParse(f"key {key!r}: expected a number, got {cfg[key]!r}") from exc


def get_int(cfg: dict, key: str, default=None) -> int:
    v = get_float(cfg, key, default)
    if v != int(v):
        raise ConfigParse(f"key {key!r}: expected an integer, got {cfg[key]!r}")
    return int(v)


def get_floats(cfg: dict, key: str, default: str | None = None) -> list[float]:
    raw = cfg.get(key, default)
    if raw is None:
        raise ConfigParse(f"missing required key {key!r}")
    try:
        return [float(tok) for tok in str(raw).split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigParse(f"key {key!r}: expected comma-separated numbers") from exc


def _potential_from_config(cfg: dict, prefix: str) -> Potential:
    kind = cfg.get(f"{prefix}.kind", "power")
    if kind == "power":
        return PowerLaw(c=get_float(cfg, f"{prefix}.c", 1.0),
                        m=get_float(cfg, f"{prefix}.m", 0.0))
    if kind == "table":
        raw = cfg.get(f"{prefix}.knots")
        if not raw:
            raise ConfigParse(f"{prefix}.kind=table requires {prefix}.knots")
        knots = []
        for tok in raw.split(","):
            tok = tok.strip()
            if not tok:
                continue
            try:
                r, v = tok.split(":")
                knots.append((float(r), float(v)))
            except ValueError as exc:
                raise ConfigParse(
                    f"{prefix}.knots: expected 'r:v,r:v', got {raw!r}"
                ) from exc
        return TabulatedRadial(knots=tuple(knots),
                               m_tail=get_float(cfg, f"{prefix}.m_tail", 0.0))
    raise ConfigParse(f"{prefix}.kind must be 'power' or 'table', got {kind!r}")


def _potential_to_config(pot: Potential, prefix: str) -> dict[str, str]:
    if isinstance(pot, PowerLaw):
        return {f"{prefix}.kind": "power", f"{prefix}.c": repr(pot.c),
                f"{prefix}.m": repr(pot.m)}
    knots = ",".join(f"{r!r}:{v!r}" for r, v in pot.knots)
    return {f"{prefix}.kind": "table", f"{prefix}.knots": knots,
            f"{prefix}.m_tail": repr(pot.m_tail)}


def spec_from_config(cfg: dict[str, str]) -> ProblemSpec:
    family = cfg.get("family")
    if family not in FAMILIES:
        raise ConfigParse(f"family must be one of {FAMILIES}, got {family!r}")
    d = get_int(cfg, "d")
    alpha = get_float(cfg, "alpha")
    beta = get_float(cfg, "beta", alpha)
    if family == FAMILY_SCALAR:
        exponents = ScalarP(p=get_float(cfg, "p"))
        spec = ProblemSpec(family, StableIndexPair(d, alpha, beta), exponents,
                           _potential_from_config(cfg, "U"))
    elif family == FAMILY_EXTERIOR_CROSS:
        exponents = PairPQ(p=get_float(cfg, "p"), q=get_float(cfg, "q"))
        spec = ProblemSpec(family, StableIndexPair(d, alpha, beta), exponents,
                           _potential_from_config(cfg, "U"),
                           _potential_from_config(cfg, "V"))
    else:
        exponents = Quad(p1=get_float(cfg, "p1"), p2=get_float(cfg, "p2"),
                         q1=get_float(cfg, "q1"), q2=get_float(cfg, "q2"))
        spec = ProblemSpec(family, StableIndexPair(d, alpha, beta), exponents,
                           _potential_from_config(cfg, "U"),
                           _potential_from_config(cfg, "V"))
    return validate_problem(spec)


def spec_to_config(spec: ProblemSpec) -> dict[str, str]:
    out = {
        "family": spec.family,
        "d": str(spec.indices.d),
        "alpha": repr(spec.indices.alpha),
        "beta": repr(spec.indices.beta),
    }
    ex = spec.exponents
    if isinstance(ex, ScalarP):
        out["p"] = repr(ex.p)
    elif isinstance(ex, PairPQ):
        out["p"] = repr(ex.p)
        out["q"] = repr(ex.q)
    else:
        out.update({"p1": repr(ex.p1), "p2": repr(ex.p2),
                    "q1": repr(ex.q1), "q2": repr(ex.q2)})
    out.update(_potential_to_config(spec.U, "U"))
    if spec.V is not None:
        out.update(_potential_to_config(spec.V, "V"))
    return out


def grid_from_config(cfg: dict[str, str]) -> RGrid:
    return RGrid(
        r0=get_float(cfg, "grid.r0", 4.0),
        gamma=get_float(cfg, "grid.gamma", 2.0),
        k_points=get_int(cfg, "grid.k", 8),
    )
