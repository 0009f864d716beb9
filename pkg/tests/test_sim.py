import math

import numpy as np
import pytest

from liouville_lab import sim as S
from liouville_lab.errors import GeometryViolation
from liouville_lab.fields import constant_field, power_field, radial_field
from liouville_lab.kernels import Ball, green_quadrature, poisson_expectation, unit_ball

# Exit-radius law oracles (one-dimensional quadrature of the exit density,
# which is dimension-free): P(R > 2) and the truncated mean E[min(R, 5)].
# The raw first moment only exists for alpha > 1 and has infinite variance
# for every alpha < 2, so bounded statistics carry the comparison.
EXIT_TAIL_P2 = {0.5: 0.64537483473508409, 1.0: 1.0 / 3.0, 1.5: 0.11606181886242917}
EXIT_TRUNC_MEAN5 = {0.5: 3.2608767875779853, 1.0: 2.1003494961340208, 1.5: 1.400132302306437}

# Occupation-point radial CDF P(|Y| <= q) for the centre start (mpmath oracle).
OCC_CDF = {
    (2, 1.0): {0.3: 0.425891900417, 0.6: 0.756377130801, 0.9: 0.970034236263},
    (3, 1.5): {0.3: 0.27158310621, 0.6: 0.667450598521, 0.9: 0.965855186881},
}


def draws(n, seed, fn):
    rng = S.path_rng(seed, 0)
    return np.array([fn(rng) for _ in range(n)])


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_exit_radius_tail_probability(alpha):
    n = 60_000
    rs = draws(n, 7, lambda rng: S._exit_radius(rng, alpha))
    p = EXIT_TAIL_P2[alpha]
    se = math.sqrt(p * (1 - p) / n)
    assert abs(np.mean(rs > 2.0) - p) <= 4 * se


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_exit_radius_truncated_mean(alpha):
    n = 60_000
    rs = np.minimum(draws(n, 13, lambda rng: S._exit_radius(rng, alpha)), 5.0)
    se = float(np.std(rs, ddof=1) / math.sqrt(n))
    assert abs(float(np.mean(rs)) - EXIT_TRUNC_MEAN5[alpha]) <= 4 * se


def test_exit_points_outside_closed_ball():
    # the exit radius is the support-defining quantity: a million draws
    rng = S.path_rng(1, 0)
    radii = np.array([S._exit_radius(rng, 1.0) for _ in range(1_000_000)])
    assert int(np.sum(radii <= 1.0)) == 0
    # and through the full sampler, off-centre
    b = unit_ball(2)
    pts = np.array([S.sample_ball_exit((0.3, 0.0), b, 1.5, rng) for _ in range(50_000)])
    assert np.linalg.norm(pts, axis=1).min() > 1.0


def test_exit_sampler_deterministic():
    b = unit_ball(2)
    seq1 = [tuple(S.sample_ball_exit((0.2, 0.1), b, 1.0, S.path_rng(42, i))) for i in range(10)]
    seq2 = [tuple(S.sample_ball_exit((0.2, 0.1), b, 1.0, S.path_rng(42, i))) for i in range(10)]
    assert seq1 == seq2


def test_exit_sampler_requires_interior_start():
    with pytest.raises(GeometryViolation):
        S.sample_ball_exit((1.0, 0.0), unit_ball(2), 1.0, S.path_rng(0, 0))


@pytest.mark.parametrize("x,alpha", [((0.0, 0.0), 1.0), ((0.45, -0.3), 1.0), ((0.6, 0.0), 0.7)])
def test_exit_sampler_matches_exit_law_quadrature(x, alpha):
    # E[f(Y)] for a smooth decaying statistic, deterministic oracle vs MC
    f = radial_field(lambda rho: 1.0 / (1.0 + rho**2), decay_exponent=2.0)
    b = unit_ball(2)
    oracle = poisson_expectation(x, b, alpha, f)
    n = 40_000
    rng = S.path_rng(5, 0)
    vals = np.array([
        1.0 / (1.0 + np.sum(S.sample_ball_exit(x, b, alpha, rng) ** 2))
        for _ in range(n)
    ])
    se = float(np.std(vals, ddof=1) / math.sqrt(n))
    assert abs(float(np.mean(vals)) - oracle) <= 3 * se


@pytest.mark.parametrize("d,alpha", [(2, 1.0), (3, 1.5)])
def test_occupation_radius_law(d, alpha):
    n = 50_000
    rs = draws(n, 23, lambda rng: S._occupation_radius(rng, alpha, d))
    for q, p in OCC_CDF[(d, alpha)].items():
        se = math.sqrt(p * (1 - p) / n)
        assert abs(np.mean(rs <= q) - p) <= 4 * se


# --- hitting probability -----------------------------------------------------

def test_hit_inside_target_is_certain():
    est = S.estimate_hitting_probability(
        (0.5, 0.0), unit_ball(2), Ball((0.0, 0.0), 8.0), 1.0,
        S.MCConfig(n_paths=100, seed=1))
    assert est.mean == 1.0
    assert est.std_error == 0.0
    assert est.n == 100
    assert est.truncated_paths == 0


def test_hit_outside_enclosure_rejected():
    with pytest.raises(GeometryViolation):
        S.estimate_hitting_probability(
            (9.0, 0.0), unit_ball(2), Ball((0.0, 0.0), 8.0), 1.0,
            S.MCConfig(n_paths=10, seed=1))


def test_hit_disjoint_geometry_rejected():
    with pytest.raises(GeometryViolation):
        S.estimate_hitting_probability(
            (5.0, 0.0), unit_ball(2), Ball((10.0, 0.0), 2.0), 1.0,
            S.MCConfig(n_paths=10, seed=1))


def test_hit_deterministic_and_worker_invariant():
    args = ((6.0, 0.0), unit_ball(2), Ball((6.0, 0.0), 12.0), 1.0)
    a = S.estimate_hitting_probability(*args, S.MCConfig(n_paths=6000, seed=2, workers=1))
    b = S.estimate_hitting_probability(*args, S.MCConfig(n_paths=6000, seed=2, workers=1))
    c = S.estimate_hitting_probability(*args, S.MCConfig(n_paths=6000, seed=2, workers=3))
    assert a == b == c


def test_hit_monotone_in_target_radius():
    # enlarging the target never decreases the estimate beyond noise
    cfg = S.MCConfig(n_paths=20_000, seed=4)
    x = (6.0, 0.0)
    enclosure = Ball((6.0, 0.0), 12.0)
    small = S.estimate_hitting_probability(x, Ball((0.0, 0.0), 1.0), enclosure, 1.0, cfg)
    big = S.estimate_hitting_probability(x, Ball((0.0, 0.0), 2.0), enclosure, 1.0, cfg)
    noise = 3 * math.hypot(small.std_error, big.std_error)
    assert big.mean >= small.mean - noise


def test_hit_scaling_slope_smoke():
    # coarse version of the r^{-(d-alpha)} decay (acceptance runs it tight)
    ests = []
    rs = [4.0, 16.0, 64.0]
    for k, r in enumerate(rs):
        est = S.estimate_hitting_probability(
            (r, 0.0), unit_ball(2), Ball((r, 0.0), 2 * r), 1.0,
            S.MCConfig(n_paths=20_000, seed=100 + k))
        ests.append(est.mean)
    slope = np.polyfit(np.log(rs), np.log(ests), 1)[0]
    assert abs(slope - (-1.0)) < 0.3


def test_truncation_is_rare_at_default_budget():
    est = S.estimate_hitting_probability(
        (6.0, 0.0), Ball((0.0, 0.0), 4.0), Ball((6.0, 0.0), 16.0), 1.0,
        S.MCConfig(n_paths=20_000, seed=8))
    assert est.truncated_paths / est.n <= 1e-3


# --- occupation functional ---------------------------------------------------

def test_exit_functional_zero_field():
    est = S.estimate_exit_functional((0.0, 0.0), unit_ball(2), 1.0,
                                     constant_field(0.0), S.MCConfig(n_paths=500, seed=1))
    assert est.mean == 0.0
    assert est.std_error == 0.0


def test_exit_functional_exit_time():
    est = S.estimate_exit_functional((0.0, 0.0), unit_ball(2), 1.0,
                                     constant_field(1.0), S.MCConfig(n_paths=60_000, seed=5))
    assert abs(est.mean - 2 / math.pi) <= 3 * est.std_error
    assert est.truncated_paths == 0


def test_exit_functional_matches_green_quadrature():
    f = power_field(1.0, 1.0)
    oracle = green_quadrature((0.0, 0.0), unit_ball(2), 1.0, f)
    est = S.estimate_exit_functional((0.0, 0.0), unit_ball(2), 1.0, f,
                                     S.MCConfig(n_paths=60_000, seed=9))
    assert abs(est.mean - oracle) <= 3 * est.std_error


def test_exit_functional_offcenter_d3():
    b = unit_ball(3)
    x = (0.2, 0.0, -0.3)
    f = constant_field(1.0)
    oracle = green_quadrature(x, b, 1.5, f)
    est = S.estimate_exit_functional(x, b, 1.5, f, S.MCConfig(n_paths=40_000, seed=12))
    assert abs(est.mean - oracle) <= 3 * est.std_error


def test_exit_functional_worker_invariant():
    f = power_field(1.0, 1.0)
    a = S.estimate_exit_functional((0.0, 0.0), unit_ball(2), 1.0, f,
                                   S.MCConfig(n_paths=5000, seed=3, workers=1))
    b = S.estimate_exit_functional((0.0, 0.0), unit_ball(2), 1.0, f,
                                   S.MCConfig(n_paths=5000, seed=3, workers=2))
    assert a == b


def test_exit_functional_requires_interior_start():
    with pytest.raises(GeometryViolation):
        S.estimate_exit_functional((2.0, 0.0), unit_ball(2), 1.0,
                                   constant_field(1.0), S.MCConfig(n_paths=10, seed=1))


# --- infrastructure ----------------------------------------------------------

def test_path_streams_match_fresh_generators():
    streams = S._PathStreams(99)
    for idx in (0, 1, 17, 4096, 123456):
        a = streams.rekey(idx).random(4).tolist()
        b = S.path_rng(99, idx).random(4).tolist()
        assert a == b


def test_mc_config_validation():
    with pytest.raises(ValueError):
        S.MCConfig(n_paths=0, seed=1)
    with pytest.raises(ValueError):
        S.MCConfig(n_paths=1, seed=1, max_steps_per_path=0)
    with pytest.raises(ValueError):
        S.MCConfig(n_paths=1, seed=1, workers=0)


def test_mc_estimate_invariants():
    with pytest.raises(ValueError):
        S.MCEstimate(mean=0.0, std_error=-1.0, n=10, truncated_paths=0)
    with pytest.raises(ValueError):
        S.MCEstimate(mean=0.0, std_error=0.0, n=10, truncated_paths=11)
