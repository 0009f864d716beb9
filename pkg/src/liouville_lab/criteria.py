"""Annulus potential functionals and the Liouville decision engine.

The growth certificate of a potential is

    phi(W, r) = inf over r/2 <= |x| <= 3r/2 of  int_{B(x, r/4)} W(y) dy,

computed for radial potentials as a one-dimensional integral of the
potential profile against the sphere-slice measure of the off-centre ball.
Each nonexistence criterion is a limit statement about products of powers
of phi against powers of r; limits are classified by log-log regression on
the trailing half of a geometric radius grid with a slope deadband, and a
closed-form exponent route cross-checks the numeric route wherever the
potentials are power laws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    ExponentOutOfRange,
    GridTooCoarse,
    InsufficientSamples,
    InternalInconsistency,
    RuleNotApplicable,
)
from .kernels import KernelConfig, quad_adaptive, surface_area
from .model import (
    FAMILY_EXTERIOR_CROSS,
    FAMILY_EXTERIOR_PRODUCT,
    FAMILY_SCALAR,
    FAMILY_WHOLESPACE_GENERAL,
    FAMILY_WHOLESPACE_PRODUCT,
    PowerLaw,
    ProblemSpec,
    Verdict,
    validate_problem,
)

SLOPE_DEADBAND = 0.05
MIN_R_SQUARED = 0.9
#: Exact log-log exponents closer to zero than this are treated as boundary
#: cases in symbolic/numeric coherence checks (twice the deadband).
GATE_MARGIN = 0.1

TENDS_TO_ZERO = "TendsToZero"
DIVERGES = "DivergesToInfinity"
BOUNDED_AWAY = "BoundedAway"
INDETERMINATE = "Indeterminate"

CONCLUSION_HOLDS = "LiouvilleHolds"
CONCLUSION_INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class LimitClass:
    tag: str
    fitted_exponent: float
    confidence: float


@dataclass(frozen=True)
class RGrid:
    """Geometric radius grid r_k = r0 * gamma^k, k = 0..k_points-1."""

    r0: float = 4.0
    gamma: float = 2.0
    k_points: int = 8

    def __post_init__(self):
        if self.r0 < 4.0:
            raise ValueError("r0 must be >= 4")
        if self.gamma <= 1.0:
            raise ValueError("gamma must exceed 1")
        if self.k_points < 4:
            raise ValueError("need at least 4 grid points")

    def values(self) -> np.ndarray:
        return self.r0 * self.gamma ** np.arange(self.k_points, dtype=float)


@dataclass(frozen=True)
class ConditionReport:
    label: str
    kind: str
    samples: tuple
    limit: LimitClass | None
    satisfied: bool
    note: str = ""

    def to_json_dict(self) -> dict:
        return {
            "label": self.label,
            "kind": self.kind,
            "limit_class": None if self.limit is None else self.limit.tag,
            "fitted_exponent": None if self.limit is None else self.limit.fitted_exponent,
            "confidence": None if self.limit is None else self.limit.confidence,
            "samples": [[float(r), float(v)] for r, v in self.samples],
            "satisfied": bool(self.satisfied),
            "note": self.note,
        }


@dataclass(frozen=True)
class ThresholdRecord:
    rule: str
    thresholds: dict
    satisfied: bool
    details: dict


# ---------------------------------------------------------------------------
# ball integrals of radial potentials

def _slice_measure(rho: float, a: float, s: float, d: int) -> float:
    """(d-1)-measure of the origin-centred sphere of radius rho inside B(x, s),
    |x| = a, valid for a > s (the ball never contains the origin)."""
    if rho <= a - s or rho >= a + s:
        return 0.0
    cosq = (a * a + rho * rho - s * s) / (2.0 * a * rho)
    cosq = min(1.0, max(-1.0, cosq))
    if d == 1:
        return 1.0
    if d == 2:
        return 2.0 * rho * math.acos(cosq)
    if d == 3:
        return 2.0 * math.pi * rho * rho * (1.0 - cosq)
    theta = math.acos(cosq)
    inner = quad_adaptive(lambda t: math.sin(t) ** (d - 2), 0.0, theta,
                          rel_tol=1e-10, limit=100)
    return surface_area(d - 1) * rho ** (d - 1) * inner


def _ball_integral(profile, a: float, s: float, d: int, cfg: KernelConfig,
                   breaks=()) -> float:
    """int_{B(x, s)} W(|y|) dy for |x| = a > s and a radial profile.

    ``breaks`` lists radii where the profile is non-smooth (table knots).
    """
    def integrand(rho):
        return float(profile(np.array([rho]))[0]) * _slice_measure(rho, a, s, d)

    return quad_adaptive(integrand, a - s, a + s, rel_tol=cfg.quad_rel_tol,
                         limit=cfg.max_quad_subdivisions, points=list(breaks))


@lru_cache(maxsize=4096)
def _unit_moment(d: int, m: float, ahat: float, rel_tol: float) -> float:
    """int_{B(x, 1)} |y|^m dy with |x| = ahat > 1, scale-reduced form."""
    def integrand(rho):
        return rho**m * _slice_measure(rho, ahat, 1.0, d)

    return quad_adaptive(integrand, ahat - 1.0, ahat + 1.0, rel_tol=rel_tol, limit=200)


def _golden_min(fn, lo: float, hi: float, iters: int = 60):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    e = a + invphi * (b - a)
    fc, fe = fn(c), fn(e)
    for _ in range(iters):
        if fc < fe:
            b, e, fe = e, c, fc
            c = b - invphi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, e, fe
            e = a + invphi * (b - a)
            fe = fn(e)
    return min(fc, fe)


def phi(potential, r: float, d: int, cfg: KernelConfig | None = None) -> float:
    """Infimum over the annulus r/2 <= |x| <= 3r/2 of the ball integral of
    the potential over B(x, r/4).

    By radial symmetry the infimum runs over the scalar |x|.  Power laws
    are monotone in |x|, so the infimum sits at an annulus endpoint and the
    integral reduces to a cached unit-scale moment; tabulated potentials
    use golden-section search over |x|.
    """
    cfg = cfg or KernelConfig()
    if r < 4.0:
        raise ValueError(f"phi requires r >= 4, got {r}")
    s = r / 4.0
    if isinstance(potential, PowerLaw):
        ahat = 2.0 if potential.m >= 0 else 6.0
        moment = _unit_moment(d, float(potential.m), ahat, cfg.quad_rel_tol)
        return potential.c * s ** (d + potential.m) * moment

    knots = tuple(k for k, _ in potential.knots)

    def objective(a):
        return _ball_integral(potential.profile, a, s, d, cfg, breaks=knots)

    return _golden_min(objective, r / 2.0, 3.0 * r / 2.0)


def ell(potential, r: float, inner_exponent: float, rate_exponent: float,
        d: int, cfg: KernelConfig | None = None) -> float:
    """r^{-rate} times the annulus integral of potential^{-1/(inner-1)}.

    The inner exponent is the nonlinearity power and must exceed 1; the
    rate exponent is beta*p/(p-1) or alpha*q/(q-1) depending on the role.
    """
    cfg = cfg or KernelConfig()
    if inner_exponent <= 1.0:
        raise ExponentOutOfRange(
            f"inner exponent must exceed 1, got {inner_exponent}"
        )
    e = 1.0 / (inner_exponent - 1.0)
    lo, hi = r / 2.0, 3.0 * r / 2.0
    if isinstance(potential, PowerLaw):
        k = d - 1.0 - potential.m * e
        if abs(k + 1.0) < 1e-14:
            radial = math.log(3.0)
        else:
            radial = (hi ** (k + 1.0) - lo ** (k + 1.0)) / (k + 1.0)
        integral = potential.c ** (-e) * radial
    else:
        def integrand(rho):
            return float(potential.profile(np.array([rho]))[0]) ** (-e) * rho ** (d - 1)

        integral = quad_adaptive(integrand, lo, hi, rel_tol=cfg.quad_rel_tol,
                                 limit=cfg.max_quad_subdivisions,
                                 points=[k for k, _ in potential.knots])
    return surface_area(d) * integral * r ** (-rate_exponent)


# ---------------------------------------------------------------------------
# limit classification

def classify_limit(samples) -> LimitClass:
    """Log-log regression on the trailing half of the grid.

    Slope above +0.05 diverges, below -0.05 tends to zero, in the deadband
    with a good fit the trace is bounded away; a poor fit (R^2 < 0.9) is
    Indeterminate.
    """
    samples = list(samples)
    if len(samples) < 4:
        raise InsufficientSamples(f"need at least 4 samples, got {len(samples)}")
    r = np.array([s[0] for s in samples], dtype=float)
    v = np.array([s[1] for s in samples], dtype=float)
    if np.any(np.diff(r) <= 0):
        raise InsufficientSamples("radii must be strictly increasing")
    if np.any(v <= 0) or not np.all(np.isfinite(v)):
        raise ValueError("limit classification requires positive finite values")
    # trailing half, but never fewer than 3 points for a meaningful fit
    tail = max(3, len(samples) // 2)
    x = np.log(r[-tail:])
    y = np.log(v[-tail:])
    slope, intercept = np.polyfit(x, y, 1)
    fitted = intercept + slope * x
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    if ss_tot <= 1e-24:
        r2 = 1.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    confidence = min(1.0, max(0.0, r2))
    slope = float(slope)
    if r2 < MIN_R_SQUARED:
        return LimitClass(INDETERMINATE, slope, confidence)
    if slope > SLOPE_DEADBAND:
        return LimitClass(DIVERGES, slope, confidence)
    if slope < -SLOPE_DEADBAND:
        return LimitClass(TENDS_TO_ZERO, slope, confidence)
    return LimitClass(BOUNDED_AWAY, slope, confidence)


def _suffix_min(v: np.ndarray) -> np.ndarray:
    return np.minimum.accumulate(v[::-1])[::-1]


def _suffix_max(v: np.ndarray) -> np.ndarray:
    return np.maximum.accumulate(v[::-1])[::-1]


# condition kinds and their satisfaction predicates
KIND_LIMIT_ZERO = "limit_zero"
KIND_LIMIT_INFINITY = "limit_infinity"
KIND_LIMINF_ZERO = "liminf_zero"
KIND_LIMSUP_INFINITY = "limsup_infinity"
KIND_LIMINF_POSITIVE = "liminf_positive"


def _evaluate_condition(label: str, kind: str, r: np.ndarray, values: np.ndarray) -> ConditionReport:
    # On a monotone trace lim, liminf and limsup coincide, so the raw trace
    # is classified directly; otherwise liminf/limsup conditions classify
    # the trailing envelope and the trace is flagged.
    note = ""
    work = values
    monotone = bool(np.all(np.diff(values) >= 0) or np.all(np.diff(values) <= 0))
    if not monotone:
        if kind in (KIND_LIMINF_ZERO, KIND_LIMINF_POSITIVE):
            work = _suffix_min(values)
            note = "non-monotone trace; classified its trailing infimum"
        elif kind == KIND_LIMSUP_INFINITY:
            work = _suffix_max(values)
            note = "non-monotone trace; classified its trailing supremum"
    limit = classify_limit(list(zip(r, work)))
    if kind in (KIND_LIMIT_ZERO, KIND_LIMINF_ZERO):
        ok = limit.tag == TENDS_TO_ZERO
    elif kind in (KIND_LIMIT_INFINITY, KIND_LIMSUP_INFINITY):
        ok = limit.tag == DIVERGES
    elif kind == KIND_LIMINF_POSITIVE:
        ok = limit.tag in (BOUNDED_AWAY, DIVERGES)
    else:
        raise ValueError(f"unknown condition kind {kind!r}")
    return ConditionReport(
        label=label,
        kind=kind,
        samples=tuple(zip(r.tolist(), values.tolist())),
        limit=limit,
        satisfied=ok,
        note=note,
    )


# ---------------------------------------------------------------------------
# per-family condition tables

def _conditions_for(spec: ProblemSpec) -> list[tuple[str, str, callable]]:
    """(label, kind, expr(r, phi_u, phi_v) -> values) for the spec's family."""
    d = float(spec.indices.d)
    al, be = spec.indices.alpha, spec.indices.beta
    fam, ex = spec.family, spec.exponents
    conds: list[tuple[str, str, callable]] = []
    if fam == FAMILY_EXTERIOR_CROSS:
        p, q = ex.p, ex.q
        conds.append((
            "kernel_growth", KIND_LIMIT_ZERO,
            lambda r, pu, pv: np.maximum(r ** (d - al) / pu, r ** (d - be) / pv),
        ))
        conds.append((
            "route_u", KIND_LIMIT_INFINITY,
            lambda r, pu, pv: pu ** (1.0 / p) * pv / r ** ((q + 1.0) * d - be - al * q),
        ))
        conds.append((
            "route_v", KIND_LIMIT_INFINITY,
            lambda r, pu, pv: pu * pv ** (1.0 / q) / r ** ((p + 1.0) * d - be * p - al),
        ))
    elif fam == FAMILY_SCALAR:
        p = ex.p
        conds.append((
            "scalar_decay", KIND_LIMIT_ZERO,
            lambda r, pu, pv: r ** (d - al) / pu ** (1.0 / p),
        ))
    elif fam == FAMILY_WHOLESPACE_GENERAL:
        p1, p2, q1, q2 = ex.p1, ex.p2, ex.q1, ex.q2
        total = p1 + p2 + q1 + q2

        def joint(r, pu, pv):
            t1 = r ** (d - al) / pu ** (1.0 / p1)
            t2 = r ** (d - be) / pv ** (1.0 / q2)
            t3 = r ** (total * d - al * (p1 + q1) - be * (p2 + q2)) / (pu * pv)
            return np.maximum(np.maximum(t1, t2), t3)

        conds.append(("joint_decay", KIND_LIMIT_ZERO, joint))
    elif fam == FAMILY_WHOLESPACE_PRODUCT:
        p1, p2, q1, q2 = ex.p1, ex.p2, ex.q1, ex.q2
        total = p1 + p2 + q1 + q2
        if min(p1 + q1, p2 + q2) >= 1.0:
            conds.append((
                "superunit_joint", KIND_LIMINF_ZERO,
                lambda r, pu, pv: r ** (total * d - al * (p1 + q1) - be * (p2 + q2)) / (pu * pv),
            ))
        if q2 < 1.0:
            disp = (p1 - 1.0) * (1.0 - q2) + p2 * q1
            if disp < 0.0:
                conds.append((
                    "v_sublinear_negative", KIND_LIMSUP_INFINITY,
                    lambda r, pu, pv: pu ** (1.0 - q2) * pv ** p2
                    / (r ** ((d - al) * (1.0 - q2)) * r ** ((d - be) * p2)),
                ))
            else:
                conds.append((
                    "v_sublinear_nonnegative", KIND_LIMSUP_INFINITY,
                    lambda r, pu, pv: pv ** p2 * pu ** (1.0 - q2)
                    / (r ** ((d - be) * p2) * r ** ((d - al) * (p2 * q1 + p1 * (1.0 - q2)))),
                ))
        if p1 < 1.0:
            disp = (1.0 - p1) * (q2 - 1.0) + p2 * q1
            if disp < 0.0:
                conds.append((
                    "u_sublinear_negative", KIND_LIMSUP_INFINITY,
                    lambda r, pu, pv: pu ** q1 * pv ** (1.0 - p1)
                    / (r ** ((d - al) * q1) * r ** ((d - be) * (1.0 - p1))),
                ))
            else:
                conds.append((
                    "u_sublinear_nonnegative", KIND_LIMSUP_INFINITY,
                    lambda r, pu, pv: pu ** q1 * pv ** (1.0 - p1)
                    / (r ** ((d - al) * q1) * r ** ((d - be) * (p2 * q1 + q2 * (1.0 - p1)))),
                ))
        if max(p1 + q1, p2 + q2) <= 1.0:
            conds.append((
                "subunit_joint", KIND_LIMINF_ZERO,
                lambda r, pu, pv: (r ** (d - al) / pu) * (r ** (d - be) / pv),
            ))
    elif fam == FAMILY_EXTERIOR_PRODUCT:
        p1, p2, q1, q2 = ex.p1, ex.p2, ex.q1, ex.q2
        conds.append((
            "kernel_growth", KIND_LIMIT_ZERO,
            lambda r, pu, pv: np.maximum(r ** (d - al) / pu, r ** (d - be) / pv),
        ))
        if p2 * q1 + p1 < 1.0:
            conds.append((
                "weak_u_floor", KIND_LIMINF_POSITIVE,
                lambda r, pu, pv: (pv / r ** ((d - be) * (1.0 + q2))) ** p2 * pu / r ** (d - al),
            ))
        else:
            conds.append((
                "strong_u_route", KIND_LIMIT_INFINITY,
                lambda r, pu, pv: pv ** p2 * pu
                / (r ** ((d - al) * (p2 * q1 + p1)) * r ** ((d - be) * (p2 * q2 + p2))),
            ))
        if p2 * q1 + q2 < 1.0:
            conds.append((
                "weak_v_floor", KIND_LIMINF_POSITIVE,
                lambda r, pu, pv: (pu / r ** ((d - al) * (1.0 + p1))) ** q1 * pv / r ** (d - be),
            ))
        else:
            conds.append((
                "strong_v_route", KIND_LIMIT_INFINITY,
                lambda r, pu, pv: pv * pu ** q1
                / (r ** ((d - be) * (p2 * q1 + q2)) * r ** ((d - al) * (p2 * q1 + q1))),
            ))
    else:
        raise ValueError(f"unknown family {fam!r}")
    return conds


def _conclusion_from_reports(family: str, reports: list[ConditionReport]) -> bool:
    by_label = {rep.label: rep for rep in reports}
    if family == FAMILY_EXTERIOR_CROSS:
        return by_label["kernel_growth"].satisfied and (
            by_label["route_u"].satisfied or by_label["route_v"].satisfied
        )
    if family == FAMILY_SCALAR:
        return by_label["scalar_decay"].satisfied
    if family == FAMILY_WHOLESPACE_GENERAL:
        return by_label["joint_decay"].satisfied
    if family == FAMILY_WHOLESPACE_PRODUCT:
        return any(rep.satisfied for rep in reports)
    if family == FAMILY_EXTERIOR_PRODUCT:
        return all(rep.satisfied for rep in reports)
    raise ValueError(f"unknown family {family!r}")


def exact_condition_exponents(spec: ProblemSpec) -> dict[str, float]:
    """Exact log-log slope of every condition for power-law potentials.

    Probes each condition expression with the literal asymptotics
    phi(r) = r^{d+m}; exact because every expression is a product of powers.
    """
    if not isinstance(spec.U, PowerLaw) or (spec.V is not None and not isinstance(spec.V, PowerLaw)):
        raise RuleNotApplicable("exact exponents require power-law potentials")
    d = float(spec.indices.d)
    r = np.array([2.0, 4.0])
    pu = r ** (d + spec.U.m)
    pv = r ** (d + spec.V.m) if spec.V is not None else pu
    out = {}
    for label, _kind, expr in _conditions_for(spec):
        vals = expr(r, pu, pv)
        out[label] = float(np.log(vals[1] / vals[0]) / np.log(2.0))
    return out


# ---------------------------------------------------------------------------
# closed-form thresholds

RULE_CONSTANT_PAIR = "constant_pair"
RULE_POWERLAW_PAIR = "powerlaw_pair"
RULE_BALANCED_PRODUCT = "balanced_product"
RULE_EXTERIOR_BALANCED = "exterior_balanced_product"


def closed_form_threshold(spec: ProblemSpec) -> ThresholdRecord:
    """Exact exponent arithmetic for power-law specs; no quadrature.

    Covers the cross system with power-law potentials (dimension threshold
    max of two explicit fractions, needs pq > 1), and the balanced product
    systems (p1+p2 = q1+q2 > 1 with equal indices and constant potentials,
    critical dimension alpha*eta/(eta-1)).  Raises RuleNotApplicable
    outside these hypotheses.
    """
    spec = validate_problem(spec)
    fam = spec.family
    if fam not in (FAMILY_EXTERIOR_CROSS, FAMILY_WHOLESPACE_PRODUCT, FAMILY_EXTERIOR_PRODUCT):
        raise RuleNotApplicable(f"no closed-form rule for family {fam}")
    if not isinstance(spec.U, PowerLaw) or not isinstance(spec.V, PowerLaw):
        raise RuleNotApplicable("closed-form rules require power-law potentials")
    d = float(spec.indices.d)
    al, be = spec.indices.alpha, spec.indices.beta
    m, n = spec.U.m, spec.V.m
    exps = exact_condition_exponents(spec)

    if fam == FAMILY_EXTERIOR_CROSS:
        p, q = spec.exponents.p, spec.exponents.q
        if p * q <= 1.0:
            raise RuleNotApplicable("cross-system rule requires pq > 1")
        t1 = (m + n * p + (be + al * q) * p) / (p * q - 1.0)
        t2 = (m * q + n + (be * p + al) * q) / (p * q - 1.0)
        threshold = max(t1, t2)
        rule = RULE_CONSTANT_PAIR if m == 0.0 and n == 0.0 else RULE_POWERLAW_PAIR
        return ThresholdRecord(
            rule=rule,
            thresholds={"d_max": threshold, "route_u": t1, "route_v": t2},
            satisfied=d < threshold,
            details={"condition_exponents": exps},
        )

    p1, p2, q1, q2 = (spec.exponents.p1, spec.exponents.p2,
                      spec.exponents.q1, spec.exponents.q2)
    eta = p1 + p2
    balanced = abs((p1 + p2) - (q1 + q2)) < 1e-12
    if not (balanced and eta > 1.0 and abs(al - be) < 1e-12 and m == 0.0 and n == 0.0):
        raise RuleNotApplicable(
            "product rules require constant potentials, equal indices, and "
            "balanced exponent sums > 1"
        )
    threshold = al * eta / (eta - 1.0)
    if fam == FAMILY_WHOLESPACE_PRODUCT:
        return ThresholdRecord(
            rule=RULE_BALANCED_PRODUCT,
            thresholds={"d_max": threshold},
            satisfied=d < threshold,
            details={"condition_exponents": exps},
        )
    # exterior product: conjunction of the applicable case exponents,
    # decided by exact exponent signs (the summary threshold plus the
    # auxiliary bound alpha/(d-alpha) are the sufficient-only shorthand)
    ok = True
    for label, e in exps.items():
        if label == "kernel_growth":
            ok = ok and e < 0
        elif label.startswith("strong"):
            ok = ok and e > 0
        elif label.startswith("weak"):
            ok = ok and e >= -1e-12
    return ThresholdRecord(
        rule=RULE_EXTERIOR_BALANCED,
        thresholds={"d_max": threshold, "aux_max_p1_q2": al / (d - al)},
        satisfied=ok,
        details={"condition_exponents": exps},
    )


def _crosscheck_gate(spec: ProblemSpec, record: ThresholdRecord) -> bool:
    """True when every decision-relevant exact exponent clears the deadband."""
    exps = record.details["condition_exponents"]
    fam = spec.family
    if fam == FAMILY_EXTERIOR_CROSS:
        relevant = [exps["kernel_growth"], max(exps["route_u"], exps["route_v"])]
    elif fam == FAMILY_WHOLESPACE_PRODUCT:
        relevant = list(exps.values())
    else:
        relevant = []
        for label, e in exps.items():
            if label.startswith("weak") and abs(e) < 1e-9:
                continue  # exactly critical floor conditions agree by design
            relevant.append(e)
    return all(abs(e) >= GATE_MARGIN for e in relevant)


# ---------------------------------------------------------------------------
# decision engine

def _bounded_below(potential) -> bool:
    return potential.bounded_below_on_exterior()


def decide_liouville(spec: ProblemSpec, grid: RGrid | None = None,
                     cfg: KernelConfig | None = None) -> Verdict:
    """Evaluate every criterion of the family's nonexistence rule on the grid.

    The verdict concludes LiouvilleHolds only when the family's required
    combination of conditions is satisfied.  For power-law specs a
    closed-form exponent route cross-checks the numeric conclusion;
    disagreement strictly off the deadband raises InternalInconsistency,
    and any Indeterminate classification raises GridTooCoarse.
    """
    spec = validate_problem(spec)
    grid = grid or RGrid()
    cfg = cfg or KernelConfig()
    fam = spec.family
    ex = spec.exponents

    # sub-unit coupling clause of the cross system: no grid work needed
    if fam == FAMILY_EXTERIOR_CROSS and ex.p * ex.q <= 1.0 \
            and _bounded_below(spec.U) and _bounded_below(spec.V):
        report = ConditionReport(
            label="subunit_coupling",
            kind="hypothesis",
            samples=(),
            limit=None,
            satisfied=True,
            note=f"pq = {ex.p * ex.q} <= 1 with potentials bounded below on the exterior",
        )
        return Verdict(theorem_applied=fam, conclusion=CONCLUSION_HOLDS,
                       diagnostics=(report,))

    if fam == FAMILY_SCALAR and ex.p < 1.0:
        report = ConditionReport(
            label="scalar_exponent_hypothesis",
            kind="hypothesis",
            samples=(),
            limit=None,
            satisfied=False,
            note=f"scalar rule requires p >= 1, got p = {ex.p}",
        )
        return Verdict(theorem_applied=fam, conclusion=CONCLUSION_INCONCLUSIVE,
                       diagnostics=(report,))

    r = grid.values()
    d = spec.indices.d
    pu = np.array([phi(spec.U, rv, d, cfg) for rv in r])
    pv = (np.array([phi(spec.V, rv, d, cfg) for rv in r])
          if spec.V is not None else pu)

    reports = [
        _evaluate_condition(label, kind, r, np.asarray(expr(r, pu, pv), dtype=float))
        for label, kind, expr in _conditions_for(spec)
    ]
    for rep in reports:
        if rep.limit is not None and rep.limit.tag == INDETERMINATE:
            raise GridTooCoarse(
                f"condition {rep.label} classified Indeterminate on the grid"
            )
    holds = _conclusion_from_reports(fam, reports)

    try:
        record = closed_form_threshold(spec)
    except RuleNotApplicable:
        record = None
    if record is not None and _crosscheck_gate(spec, record):
        if record.satisfied != holds:
            raise InternalInconsistency(
                f"closed-form rule {record.rule} says satisfied={record.satisfied} "
                f"but the numeric route concluded holds={holds}"
            )
        reports.append(ConditionReport(
            label="closed_form_crosscheck",
            kind="crosscheck",
            samples=(),
            limit=None,
            satisfied=True,
            note=f"agrees with rule {record.rule}",
        ))

    return Verdict(
        theorem_applied=fam,
        conclusion=CONCLUSION_HOLDS if holds else CONCLUSION_INCONCLUSIVE,
        diagnostics=tuple(reports),
    )
