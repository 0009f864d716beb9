import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liouville_lab.criteria import (
    BOUNDED_AWAY,
    DIVERGES,
    INDETERMINATE,
    TENDS_TO_ZERO,
    ConditionReport,
    LimitClass,
    RGrid,
    classify_limit,
    closed_form_threshold,
    decide_liouville,
    ell,
    exact_condition_exponents,
    phi,
)
from liouville_lab.errors import (
    ExponentOutOfRange,
    GridTooCoarse,
    InsufficientSamples,
    RuleNotApplicable,
)
from liouville_lab.model import (
    PairPQ,
    PowerLaw,
    ProblemSpec,
    Quad,
    ScalarP,
    StableIndexPair,
    TabulatedRadial,
    Verdict,
)


def cross(d, p, q, m=0.0, n=0.0, alpha=1.0, beta=1.0):
    return ProblemSpec("exterior_cross", StableIndexPair(d, alpha, beta),
                       PairPQ(p, q), PowerLaw(1.0, m), PowerLaw(1.0, n))


# --- phi ----------------------------------------------------------------------

def brute_force_phi(c, m, r, d=2, n_centers=1000, n_rho=400, n_ang=256):
    """Dense-grid oracle: midpoint rule over |x| and direct 2-d polar
    quadrature of the potential over each ball B(x, r/4)."""
    assert d == 2
    s = r / 4.0
    best = np.inf
    phis = (np.arange(n_ang) + 0.5) * (2 * np.pi / n_ang)
    rhos = (np.arange(n_rho) + 0.5) * (s / n_rho)
    drho = s / n_rho
    dphi = 2 * np.pi / n_ang
    cosines = np.cos(phis)
    for a in np.linspace(r / 2.0, 1.5 * r, n_centers):
        rr, pp = np.meshgrid(rhos, cosines, indexing="ij")
        dist = np.sqrt(a * a + rr * rr + 2 * a * rr * pp)
        integral = float(np.sum(c * dist**m * rr) * drho * dphi)
        best = min(best, integral)
    return best


def test_phi_constant_is_ball_volume():
    assert phi(PowerLaw(1.0, 0.0), 4.0, 2) == pytest.approx(math.pi, rel=1e-10)


@pytest.mark.parametrize("m", [0.0, 1.0, 2.0, -0.5])
@pytest.mark.parametrize("r", [8.0, 32.0])
def test_phi_powerlaw_homogeneity(m, r):
    ratio = phi(PowerLaw(1.3, m), 2 * r, 2) / phi(PowerLaw(1.3, m), r, 2)
    assert ratio == pytest.approx(2.0 ** (2 + m), rel=1e-10)


@pytest.mark.parametrize("c,m,r", [
    (1.0, 1.0, 8.0),
    (1.0, 0.0, 4.0),
    (2.0, 2.0, 8.0),
    (1.0, -0.5, 16.0),
    (0.5, 1.5, 4.0),
])
def test_phi_matches_brute_force_oracle(c, m, r):
    got = phi(PowerLaw(c, m), r, 2)
    oracle = brute_force_phi(c, m, r)
    assert got == pytest.approx(oracle, rel=1e-4)


def test_phi_monotone_in_potential():
    # pointwise U1 <= U2 implies phi(U1) <= phi(U2)
    assert phi(PowerLaw(1.0, 1.0), 8.0, 2) <= phi(PowerLaw(2.0, 1.0), 8.0, 2)
    lo = TabulatedRadial(knots=((1.0, 1.0), (64.0, 1.0)), m_tail=0.0)
    hi = TabulatedRadial(knots=((1.0, 1.5), (64.0, 2.0)), m_tail=0.0)
    assert phi(lo, 8.0, 2) <= phi(hi, 8.0, 2)


def test_phi_tabulated_matches_powerlaw_mimic():
    knots = tuple((rr, rr) for rr in [0.25 * 1.07**k for k in range(120)])
    mimic = TabulatedRadial(knots=knots, m_tail=1.0)
    assert phi(mimic, 8.0, 2) == pytest.approx(phi(PowerLaw(1.0, 1.0), 8.0, 2), rel=1e-6)


def test_phi_requires_r_at_least_four():
    with pytest.raises(ValueError):
        phi(PowerLaw(1.0, 0.0), 2.0, 2)


def test_phi_d3_constant():
    vol = 4.0 / 3.0 * math.pi
    assert phi(PowerLaw(1.0, 0.0), 4.0, 3) == pytest.approx(vol, rel=1e-8)


# --- ell ----------------------------------------------------------------------

def test_ell_constant_example():
    # annulus area times r^{-2} is 2 pi for every r
    for r in (4.0, 16.0, 128.0):
        assert ell(PowerLaw(1.0, 0.0), r, 2.0, 2.0, 2) == pytest.approx(2 * math.pi, rel=1e-12)


def test_ell_homogeneity_exact():
    p, m, rate, d = 2.5, 1.0, 1.8, 2
    ratio = ell(PowerLaw(1.0, m), 16.0, p, rate, d) / ell(PowerLaw(1.0, m), 8.0, p, rate, d)
    assert ratio == pytest.approx(2.0 ** (d - m / (p - 1) - rate), rel=1e-12)


def test_ell_rejects_inner_exponent_at_one():
    with pytest.raises(ExponentOutOfRange):
        ell(PowerLaw(1.0, 0.0), 8.0, 1.0, 2.0, 2)
    with pytest.raises(ExponentOutOfRange):
        ell(PowerLaw(1.0, 0.0), 8.0, 0.9, 2.0, 2)


def test_ell_tabulated_matches_powerlaw():
    knots = tuple((rr, rr) for rr in [0.25 * 1.07**k for k in range(120)])
    mimic = TabulatedRadial(knots=knots, m_tail=1.0)
    a = ell(mimic, 8.0, 2.0, 2.0, 2)
    b = ell(PowerLaw(1.0, 1.0), 8.0, 2.0, 2.0, 2)
    assert a == pytest.approx(b, rel=1e-6)


# --- classify_limit -----------------------------------------------------------

def test_classify_constant_bounded_away():
    cls = classify_limit([(r, 3.0) for r in RGrid().values()])
    assert cls.tag == BOUNDED_AWAY
    assert abs(cls.fitted_exponent) < 1e-12


def test_classify_linear_diverges():
    cls = classify_limit([(r, r) for r in RGrid().values()])
    assert cls.tag == DIVERGES
    assert cls.fitted_exponent == pytest.approx(1.0, abs=1e-10)


def test_classify_slow_decay():
    cls = classify_limit([(r, r**-0.1) for r in RGrid().values()])
    assert cls.tag == TENDS_TO_ZERO
    assert cls.fitted_exponent == pytest.approx(-0.1, abs=0.02)


def test_classify_noise_is_indeterminate():
    rng = np.random.default_rng(0)
    vals = np.exp(rng.normal(0.0, 2.0, size=8))
    cls = classify_limit(list(zip(RGrid().values(), vals)))
    assert cls.tag == INDETERMINATE


def test_classify_requires_four_samples():
    with pytest.raises(InsufficientSamples):
        classify_limit([(4.0, 1.0), (8.0, 2.0), (16.0, 3.0)])


@settings(max_examples=60, deadline=None)
@given(exponent=st.floats(-3.0, 3.0), scale=st.floats(0.01, 100.0))
def test_classify_recovers_exact_power(exponent, scale):
    cls = classify_limit([(r, scale * r**exponent) for r in RGrid().values()])
    assert cls.fitted_exponent == pytest.approx(exponent, abs=1e-8)
    if exponent > 0.05:
        assert cls.tag == DIVERGES
    elif exponent < -0.05:
        assert cls.tag == TENDS_TO_ZERO
    else:
        assert cls.tag == BOUNDED_AWAY


# --- closed-form thresholds -----------------------------------------------------

def test_threshold_constant_pair_example():
    # p=q=2, m=n=0: max{(1+2)*2/3, (2+1)*2/3} = 2, not strictly below d=2
    rec = closed_form_threshold(cross(2, 2.0, 2.0))
    assert rec.rule == "constant_pair"
    assert rec.thresholds["d_max"] == pytest.approx(2.0)
    assert rec.satisfied is False


def test_threshold_powerlaw_pair_example():
    # m=n=1: (1 + 2 + 6)/3 = 3 > d = 2
    rec = closed_form_threshold(cross(2, 2.0, 2.0, m=1.0, n=1.0))
    assert rec.rule == "powerlaw_pair"
    assert rec.thresholds["d_max"] == pytest.approx(3.0)
    assert rec.satisfied is True


def test_threshold_balanced_product_example():
    # eta = 2, alpha = beta = 1: critical value alpha*eta/(eta-1) = 2
    spec = ProblemSpec("wholespace_product", StableIndexPair(2, 1.0, 1.0),
                       Quad(1.0, 1.0, 1.0, 1.0), PowerLaw(1.0, 0.0), PowerLaw(1.0, 0.0))
    rec = closed_form_threshold(spec)
    assert rec.rule == "balanced_product"
    assert rec.thresholds["d_max"] == pytest.approx(2.0)
    assert rec.satisfied is False  # boundary excluded by strict inequality


def test_threshold_requires_pq_above_one():
    with pytest.raises(RuleNotApplicable):
        closed_form_threshold(cross(2, 1.0, 1.0))


def test_threshold_signs_match_exponent_route():
    # the fraction-comparison route and the exponent-sign route agree
    for (d, p, q, m, n) in [(2, 2.0, 2.0, 0.0, 1.0), (3, 1.5, 3.0, 1.0, 0.0),
                            (2, 3.0, 0.5, 0.0, 0.0), (3, 2.0, 2.0, 1.0, 1.0)]:
        spec = cross(d, p, q, m=m, n=n)
        rec = closed_form_threshold(spec)
        exps = rec.details["condition_exponents"]
        best = max(exps["route_u"], exps["route_v"])
        assert rec.satisfied == (best > 0) or abs(best) < 1e-12


def test_exterior_balanced_rule_uses_case_dispatch():
    spec = ProblemSpec("exterior_product", StableIndexPair(2, 1.2, 1.2),
                       Quad(p1=0.375, p2=1.125, q1=1.125, q2=0.375),
                       PowerLaw(1.0, 0.0), PowerLaw(1.0, 0.0))
    rec = closed_form_threshold(spec)
    assert rec.rule == "exterior_balanced_product"
    assert set(rec.details["condition_exponents"]) >= {"kernel_growth"}


# --- decision engine ------------------------------------------------------------

def test_decide_subunit_clause_holds():
    verdict = decide_liouville(cross(2, 1.0, 1.0))
    assert verdict.conclusion == "LiouvilleHolds"
    assert verdict.diagnostics[0].label == "subunit_coupling"


def test_decide_constant_threshold_boundary_inconclusive():
    verdict = decide_liouville(cross(2, 2.0, 2.0))
    assert verdict.conclusion == "Inconclusive"
    tags = {rep.label: rep.limit.tag for rep in verdict.diagnostics if rep.limit}
    assert tags["route_u"] == BOUNDED_AWAY
    assert tags["route_v"] == BOUNDED_AWAY


def test_decide_scalar_example():
    spec = ProblemSpec("scalar", StableIndexPair(2, 1.0, 1.0), ScalarP(2.0),
                       PowerLaw(1.0, 1.0))
    verdict = decide_liouville(spec)
    assert verdict.conclusion == "LiouvilleHolds"
    rep = [r for r in verdict.diagnostics if r.label == "scalar_decay"][0]
    # r^{d-alpha} / Phi^{1/p} scales like r^{1 - 3/2}
    assert rep.limit.fitted_exponent == pytest.approx(-0.5, abs=1e-6)


def test_decide_scalar_needs_p_at_least_one():
    spec = ProblemSpec("scalar", StableIndexPair(2, 1.0, 1.0), ScalarP(0.5),
                       PowerLaw(1.0, 2.0))
    verdict = decide_liouville(spec)
    assert verdict.conclusion == "Inconclusive"
    assert verdict.diagnostics[0].label == "scalar_exponent_hypothesis"


def test_decide_powerlaw_pair_holds_with_crosscheck():
    verdict = decide_liouville(cross(2, 2.0, 2.0, m=1.0, n=1.0))
    assert verdict.conclusion == "LiouvilleHolds"
    labels = [r.label for r in verdict.diagnostics]
    assert "closed_form_crosscheck" in labels


def test_decide_wholespace_general():
    spec = ProblemSpec("wholespace_general", StableIndexPair(2, 1.0, 1.0),
                       Quad(p1=1.0, p2=0.0, q1=0.0, q2=1.0),
                       PowerLaw(1.0, 0.0), PowerLaw(1.0, 0.0))
    verdict = decide_liouville(spec)
    assert verdict.conclusion == "LiouvilleHolds"


def test_decide_exterior_product_requires_all_cases():
    # eta = 4 at d = 2, alpha = 1: threshold 4/3 < 2 so the strong routes fail
    spec = ProblemSpec("exterior_product", StableIndexPair(2, 1.0, 1.0),
                       Quad(p1=2.0, p2=2.0, q1=2.0, q2=2.0),
                       PowerLaw(1.0, 0.0), PowerLaw(1.0, 0.0))
    assert decide_liouville(spec).conclusion == "Inconclusive"
    # strongly growing potentials rescue both routes (m = 2 sits exactly on
    # the strong-route boundary, m = 3 clears it)
    spec2 = ProblemSpec("exterior_product", StableIndexPair(2, 1.0, 1.0),
                        Quad(p1=2.0, p2=2.0, q1=2.0, q2=2.0),
                        PowerLaw(1.0, 3.0), PowerLaw(1.0, 3.0))
    assert decide_liouville(spec2).conclusion == "LiouvilleHolds"


def test_decide_oscillating_table_raises_grid_too_coarse():
    radii = [0.5 * 2**k for k in range(16)]
    vals = [10.0 ** (4.0 * math.cos(2 * math.pi * k / 3)) for k in range(16)]
    pot = TabulatedRadial(knots=tuple(zip(radii, vals)), m_tail=0.0)
    spec = ProblemSpec("scalar", StableIndexPair(2, 1.0, 1.0), ScalarP(1.0), pot)
    with pytest.raises(GridTooCoarse):
        decide_liouville(spec)


def test_verdict_serialization_shape():
    verdict = decide_liouville(cross(2, 2.0, 2.0, m=1.0, n=1.0))
    payload = verdict.to_json_dict()
    assert set(payload) == {"theorem", "conclusion", "cases"}
    for case in payload["cases"]:
        assert {"label", "limit_class", "fitted_exponent", "samples"} <= set(case)


def test_verdict_holds_only_with_required_conditions():
    # every LiouvilleHolds verdict has its required conditions satisfied
    for spec in [cross(2, 2.0, 2.0, m=1.0, n=1.0), cross(3, 2.0, 2.0, m=1.0, n=1.0)]:
        verdict = decide_liouville(spec)
        if verdict.conclusion == "LiouvilleHolds":
            by = {r.label: r for r in verdict.diagnostics}
            assert by["kernel_growth"].satisfied
            assert by["route_u"].satisfied or by["route_v"].satisfied


# --- cross-functional identities -------------------------------------------------

@settings(max_examples=100, deadline=None)
@given(eta=st.floats(1.0, 6.0), fu=st.floats(0.0, 1.0), q2=st.floats(0.0, 1.0))
def test_case_dispatch_identity(eta, fu, q2):
    # (p1-1)(1-q2) + p2 q1 = (eta-1)(eta+1-p1-q2) on balanced exponent sums
    p1 = fu * eta
    p2 = eta - p1
    q1 = eta - q2
    lhs = (p1 - 1.0) * (1.0 - q2) + p2 * q1
    rhs = (eta - 1.0) * (eta + 1.0 - p1 - q2)
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-10)
    if q2 <= 1.0 and eta >= 1.0:
        assert lhs >= -1e-9


def ell_route_exponents(spec):
    """Log-log slopes of the inverse-potential route quantities."""
    d = spec.indices.d
    al, be = spec.indices.alpha, spec.indices.beta
    p, q = spec.exponents.p, spec.exponents.q
    grid = RGrid().values()
    lu = np.array([ell(spec.U, r, p, be * p / (p - 1.0), d) for r in grid])
    lv = np.array([ell(spec.V, r, q, al * q / (q - 1.0), d) for r in grid])
    route_u_proxy = lu ** ((p - 1.0) / p) * lv ** (q - 1.0)
    route_v_proxy = lu ** (p - 1.0) * lv ** ((q - 1.0) / q)
    return (classify_limit(list(zip(grid, route_u_proxy))),
            classify_limit(list(zip(grid, route_v_proxy))))


def test_inverse_potential_route_implies_divergence():
    # whenever the inverse-potential products tend to zero, the matching
    # growth-route quantities diverge
    cases = [
        (2, 1.5, 1.5, 0.0, 0.0), (2, 2.0, 2.0, 1.0, 1.0), (2, 1.2, 3.0, 0.0, 1.0),
        (3, 2.0, 2.0, 0.0, 0.0), (3, 1.5, 2.5, 2.0, 0.0), (2, 4.0, 1.1, 0.5, 0.5),
        (3, 3.0, 3.0, 1.0, 2.0), (2, 2.5, 1.5, -0.5, 0.0), (3, 1.1, 1.1, 0.0, 0.0),
        (2, 5.0, 2.0, 3.0, 1.0),
    ]
    implication_fired = 0
    for d, p, q, m, n in cases:
        spec = cross(d, p, q, m=m, n=n)
        cls_u, cls_v = ell_route_exponents(spec)
        grid = RGrid().values()
        pu = np.array([phi(spec.U, r, d) for r in grid])
        pv = np.array([phi(spec.V, r, d) for r in grid])
        al, be = spec.indices.alpha, spec.indices.beta
        route_u = pu ** (1.0 / p) * pv / grid ** ((q + 1.0) * d - be - al * q)
        route_v = pu * pv ** (1.0 / q) / grid ** ((p + 1.0) * d - be * p - al)
        if cls_u.tag == TENDS_TO_ZERO:
            implication_fired += 1
            assert classify_limit(list(zip(grid, route_u))).tag == DIVERGES
        if cls_v.tag == TENDS_TO_ZERO:
            assert classify_limit(list(zip(grid, route_v))).tag == DIVERGES
    assert implication_fired >= 3  # the battery exercises the implication


def test_exact_exponents_match_phi_traces():
    spec = cross(3, 2.0, 1.5, m=1.0, n=0.0)
    exps = exact_condition_exponents(spec)
    verdict = decide_liouville(spec)
    for rep in verdict.diagnostics:
        if rep.limit is None:
            continue
        assert rep.limit.fitted_exponent == pytest.approx(exps[rep.label], abs=1e-6)
