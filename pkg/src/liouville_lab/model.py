"""Domain types for problem specifications and their validation.

A problem is one of five families of coupled (or scalar) differential
inequalities driven by two independent isotropic stable processes:

* ``exterior_cross``    -- exterior domain, each equation forced by the other
  unknown through a power bounded below by a potential (exponents p, q > 0).
* ``wholespace_general`` -- whole space, general monotone nonlinearities with
  product-power floors U u^{p1} v^{p2}, V u^{q1} v^{q2}, p1, q2 >= 1.
* ``wholespace_product`` -- whole space, exact product powers, p1, q2 > 0.
* ``exterior_product``  -- exterior domain, product powers u^{p1} v^{q1} /
  u^{p2} v^{q2}, with p2, q1 > 0.
* ``scalar``            -- single exterior inequality with potential floor.

All types are frozen dataclasses; a validated spec can be shared across
workers with no synchronization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ExponentSignViolation, IndexOutOfRange, PotentialInvalid

FAMILY_EXTERIOR_CROSS = "exterior_cross"
FAMILY_WHOLESPACE_GENERAL = "wholespace_general"
FAMILY_WHOLESPACE_PRODUCT = "wholespace_product"
FAMILY_EXTERIOR_PRODUCT = "exterior_product"
FAMILY_SCALAR = "scalar"

FAMILIES = (
    FAMILY_EXTERIOR_CROSS,
    FAMILY_WHOLESPACE_GENERAL,
    FAMILY_WHOLESPACE_PRODUCT,
    FAMILY_EXTERIOR_PRODUCT,
    FAMILY_SCALAR,
)

# Families posed on the complement of the closed unit ball.  For these the
# power-law tail exponent of a potential must beat the stability index.
EXTERIOR_FAMILIES = (FAMILY_EXTERIOR_CROSS, FAMILY_EXTERIOR_PRODUCT, FAMILY_SCALAR)

#: Default margin keeping strict inequalities away from their endpoints so
#: downstream quadrature stays well conditioned.
ENDPOINT_MARGIN = 1e-9


@dataclass(frozen=True)
class StableIndexPair:
    """Dimension and the two stability indices (u-equation, v-equation)."""

    d: int
    alpha: float
    beta: float


@dataclass(frozen=True)
class ScalarP:
    p: float


@dataclass(frozen=True)
class PairPQ:
    p: float
    q: float


@dataclass(frozen=True)
class Quad:
    p1: float
    p2: float
    q1: float
    q2: float


ExponentSet = ScalarP | PairPQ | Quad


@dataclass(frozen=True)
class PowerLaw:
    """Radial potential c * |y|^m with c > 0."""

    c: float
    m: float

    def profile(self, rho):
        rho = np.asarray(rho, dtype=float)
        return self.c * rho**self.m

    @property
    def asymptotic_exponent(self) -> float:
        return self.m

    def bounded_below_on_exterior(self) -> bool:
        # inf over |y| >= 1 is c when m >= 0.
        return self.m >= 0.0


@dataclass(frozen=True)
class TabulatedRadial:
    """Radial potential interpolated linearly on knots, power-law tail.

    Below the first knot the value is held constant; beyond the last knot
    it extrapolates as value(last) * (rho / rho_last)^{m_tail}, so annulus
    integrals over unbounded radius ranges stay well defined.
    """

    knots: tuple[tuple[float, float], ...]
    m_tail: float

    def profile(self, rho):
        rho = np.asarray(rho, dtype=float)
        radii = np.array([k[0] for k in self.knots])
        values = np.array([k[1] for k in self.knots])
        out = np.interp(rho, radii, values)
        tail = rho > radii[-1]
        if np.any(tail):
            out = np.where(tail, values[-1] * (rho / radii[-1]) ** self.m_tail, out)
        return out

    @property
    def asymptotic_exponent(self) -> float:
        return self.m_tail

    def bounded_below_on_exterior(self) -> bool:
        return self.m_tail >= 0.0 and min(v for _, v in self.knots) > 0.0


Potential = PowerLaw | TabulatedRadial


@dataclass(frozen=True)
class ProblemSpec:
    """One validated problem instance; V is absent for the scalar family."""

    family: str
    indices: StableIndexPair
    exponents: ExponentSet
    U: Potential
    V: Potential | None = None


@dataclass(frozen=True)
class Verdict:
    """Outcome of the decision engine.

    ``conclusion`` is ``LiouvilleHolds`` only when every condition required
    by the applied rule is classified as satisfied; otherwise
    ``Inconclusive``.  ``diagnostics`` carries one report per evaluated
    condition (label, limit classification, numeric trace).
    """

    theorem_applied: str
    conclusion: str
    diagnostics: tuple = field(default_factory=tuple)

    def holds(self) -> bool:
        return self.conclusion == "LiouvilleHolds"

    def to_json_dict(self) -> dict:
        return {
            "theorem": self.theorem_applied,
            "conclusion": self.conclusion,
            "cases": [c.to_json_dict() for c in self.diagnostics],
        }


def _check_index(name: str, value: float, d: int, margin: float) -> None:
    hi = min(2.0, float(d))
    if not (margin <= value <= hi - margin):
        raise IndexOutOfRange(
            f"{name}={value} outside ({0}, min(2, d)={hi}) with margin {margin}"
        )


def _check_potential(name: str, pot: Potential, index: float, exterior: bool, margin: float) -> None:
    if isinstance(pot, PowerLaw):
        if not pot.c > 0:
            raise PotentialInvalid(f"{name}: coefficient must be positive, got {pot.c}")
        if exterior and not pot.m > -index + margin:
            raise PotentialInvalid(
                f"{name}: exponent m={pot.m} must exceed -{index} for exterior families"
            )
    elif isinstance(pot, TabulatedRadial):
        if len(pot.knots) < 1:
            raise PotentialInvalid(f"{name}: needs at least one knot")
        radii = [k[0] for k in pot.knots]
        if any(r2 <= r1 for r1, r2 in zip(radii, radii[1:])) or radii[0] <= 0:
            raise PotentialInvalid(f"{name}: knot radii must be positive and strictly increasing")
        if any(v <= 0 for _, v in pot.knots):
            raise PotentialInvalid(f"{name}: knot values must be strictly positive")
        if exterior and not pot.m_tail > -index + margin:
            raise PotentialInvalid(
                f"{name}: tail exponent {pot.m_tail} must exceed -{index} for exterior families"
            )
    else:
        raise PotentialInvalid(f"{name}: unsupported potential type {type(pot)!r}")


def _check_exponents(spec: ProblemSpec) -> None:
    fam, exps = spec.family, spec.exponents
    if fam == FAMILY_SCALAR:
        if not isinstance(exps, ScalarP):
            raise ExponentSignViolation("scalar family requires a single exponent p")
        if not exps.p > 0:
            raise ExponentSignViolation(f"p must be positive, got {exps.p}")
        return
    if fam == FAMILY_EXTERIOR_CROSS:
        if not isinstance(exps, PairPQ):
            raise ExponentSignViolation("exterior_cross family requires exponents (p, q)")
        if not (exps.p > 0 and exps.q > 0):
            raise ExponentSignViolation(f"p, q must be positive, got p={exps.p}, q={exps.q}")
        return
    if not isinstance(exps, Quad):
        raise ExponentSignViolation(f"family {fam} requires exponents (p1, p2, q1, q2)")
    p1, p2, q1, q2 = exps.p1, exps.p2, exps.q1, exps.q2
    if fam == FAMILY_WHOLESPACE_GENERAL:
        ok = p2 >= 0 and q1 >= 0 and p1 >= 1 and q2 >= 1
        rule = "p2, q1 >= 0 and p1, q2 >= 1"
    elif fam == FAMILY_WHOLESPACE_PRODUCT:
        ok = p1 > 0 and q2 > 0 and p2 >= 0 and q1 >= 0
        rule = "p1, q2 > 0 and p2, q1 >= 0"
    elif fam == FAMILY_EXTERIOR_PRODUCT:
        ok = p1 >= 0 and q2 >= 0 and p2 > 0 and q1 > 0
        rule = "p1, q2 >= 0 and p2, q1 > 0"
    else:
        raise ExponentSignViolation(f"unknown family {fam!r}")
    if not ok:
        raise ExponentSignViolation(
            f"family {fam} needs {rule}; got p1={p1}, p2={p2}, q1={q1}, q2={q2}"
        )


def validate_problem(spec: ProblemSpec, margin: float = ENDPOINT_MARGIN) -> ProblemSpec:
    """Validate every type invariant and return the spec unchanged.

    Idempotent; every accepted spec is accepted by all downstream
    operations.  Raises ``IndexOutOfRange``, ``ExponentSignViolation`` or
    ``PotentialInvalid`` on the first violated constraint.
    """
    if margin < ENDPOINT_MARGIN:
        raise ValueError(f"margin must be >= {ENDPOINT_MARGIN}")
    if spec.family not in FAMILIES:
        raise ExponentSignViolation(f"unknown family {spec.family!r}")
    idx = spec.indices
    if not (isinstance(idx.d, int) and idx.d >= 1):
        raise IndexOutOfRange(f"dimension must be an integer >= 1, got {idx.d!r}")
    _check_index("alpha", idx.alpha, idx.d, margin)
    _check_index("beta", idx.beta, idx.d, margin)
    if not (math.isfinite(idx.alpha) and math.isfinite(idx.beta)):
        raise IndexOutOfRange("stability indices must be finite")
    _check_exponents(spec)
    exterior = spec.family in EXTERIOR_FAMILIES
    _check_potential("U", spec.U, idx.alpha, exterior, margin)
    if spec.family == FAMILY_SCALAR:
        if spec.V is not None:
            raise PotentialInvalid("scalar family carries no second potential")
    else:
        if spec.V is None:
            raise PotentialInvalid(f"family {spec.family} requires a potential V")
        _check_potential("V", spec.V, idx.beta, exterior, margin)
    return spec
