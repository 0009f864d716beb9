import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liouville_lab.errors import ExponentSignViolation, IndexOutOfRange, PotentialInvalid
from liouville_lab.model import (
    PairPQ,
    PowerLaw,
    ProblemSpec,
    Quad,
    ScalarP,
    StableIndexPair,
    TabulatedRadial,
    validate_problem,
)


def cross_spec(d=2, alpha=1.0, beta=1.0, p=1.0, q=1.0, m=0.0, n=0.0):
    return ProblemSpec("exterior_cross", StableIndexPair(d, alpha, beta),
                       PairPQ(p, q), PowerLaw(1.0, m), PowerLaw(1.0, n))


def test_accepts_interior_spec():
    spec = cross_spec()
    assert validate_problem(spec) is spec


def test_index_above_dimension_cap_rejected():
    # d = 1 caps the stability index at 1
    spec = ProblemSpec("scalar", StableIndexPair(1, 1.5, 0.5), ScalarP(2.0),
                       PowerLaw(1.0, 0.0))
    with pytest.raises(IndexOutOfRange):
        validate_problem(spec)


def test_index_at_endpoint_rejected():
    with pytest.raises(IndexOutOfRange):
        validate_problem(cross_spec(alpha=2.0))
    with pytest.raises(IndexOutOfRange):
        validate_problem(cross_spec(beta=0.0))


def test_wholespace_general_needs_superunit_diagonal():
    spec = ProblemSpec("wholespace_general", StableIndexPair(2, 1.0, 1.0),
                       Quad(p1=0.5, p2=1.0, q1=1.0, q2=1.0),
                       PowerLaw(1.0, 0.0), PowerLaw(1.0, 0.0))
    with pytest.raises(ExponentSignViolation):
        validate_problem(spec)


def test_exterior_product_needs_positive_cross_exponents():
    spec = ProblemSpec("exterior_product", StableIndexPair(2, 1.0, 1.0),
                       Quad(p1=1.0, p2=0.0, q1=1.0, q2=1.0),
                       PowerLaw(1.0, 0.0), PowerLaw(1.0, 0.0))
    with pytest.raises(ExponentSignViolation):
        validate_problem(spec)


def test_family_variant_mismatch():
    spec = ProblemSpec("exterior_cross", StableIndexPair(2, 1.0, 1.0),
                       Quad(1.0, 1.0, 1.0, 1.0), PowerLaw(1.0, 0.0), PowerLaw(1.0, 0.0))
    with pytest.raises(ExponentSignViolation):
        validate_problem(spec)


def test_nonpositive_coefficient_rejected():
    spec = ProblemSpec("exterior_cross", StableIndexPair(2, 1.0, 1.0),
                       PairPQ(1.0, 1.0), PowerLaw(0.0, 0.0), PowerLaw(1.0, 0.0))
    with pytest.raises(PotentialInvalid):
        validate_problem(spec)


def test_exterior_tail_exponent_floor():
    # m <= -alpha is not integrable against the kernel growth on the exterior
    with pytest.raises(PotentialInvalid):
        validate_problem(cross_spec(m=-1.0))
    validate_problem(cross_spec(m=-0.5))  # above the floor: fine


def test_wholespace_allows_negative_tail():
    spec = ProblemSpec("wholespace_product", StableIndexPair(2, 1.0, 1.0),
                       Quad(2.0, 0.0, 0.0, 2.0), PowerLaw(1.0, -1.5), PowerLaw(1.0, 0.0))
    validate_problem(spec)


def test_tabulated_knots_must_increase():
    pot = TabulatedRadial(knots=((1.0, 2.0), (1.0, 3.0)), m_tail=0.0)
    spec = ProblemSpec("scalar", StableIndexPair(2, 1.0, 1.0), ScalarP(1.0), pot)
    with pytest.raises(PotentialInvalid):
        validate_problem(spec)


def test_tabulated_values_positive():
    pot = TabulatedRadial(knots=((1.0, 2.0), (2.0, 0.0)), m_tail=0.0)
    spec = ProblemSpec("scalar", StableIndexPair(2, 1.0, 1.0), ScalarP(1.0), pot)
    with pytest.raises(PotentialInvalid):
        validate_problem(spec)


def test_scalar_carries_no_second_potential():
    spec = ProblemSpec("scalar", StableIndexPair(2, 1.0, 1.0), ScalarP(1.0),
                       PowerLaw(1.0, 0.0), PowerLaw(1.0, 0.0))
    with pytest.raises(PotentialInvalid):
        validate_problem(spec)


def test_tabulated_tail_extrapolation():
    pot = TabulatedRadial(knots=((1.0, 2.0), (4.0, 8.0)), m_tail=2.0)
    assert pot.profile(8.0) == pytest.approx(8.0 * (8.0 / 4.0) ** 2)
    assert pot.profile(0.5) == pytest.approx(2.0)  # constant below first knot
    assert pot.profile(2.5) == pytest.approx(5.0)  # linear interpolation


@settings(max_examples=60, deadline=None)
@given(
    d=st.integers(min_value=1, max_value=4),
    frac_a=st.floats(min_value=0.05, max_value=0.95),
    frac_b=st.floats(min_value=0.05, max_value=0.95),
    p=st.floats(min_value=0.1, max_value=5.0),
    q=st.floats(min_value=0.1, max_value=5.0),
    m=st.floats(min_value=0.0, max_value=3.0),
)
def test_validation_idempotent_on_valid_specs(d, frac_a, frac_b, p, q, m):
    hi = min(2.0, d)
    spec = cross_spec(d=d, alpha=frac_a * hi, beta=frac_b * hi, p=p, q=q, m=m, n=m)
    accepted = validate_problem(spec)
    assert accepted is spec
    assert validate_problem(accepted) is accepted
