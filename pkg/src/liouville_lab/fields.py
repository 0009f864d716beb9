"""Scalar-field callbacks with declared tail behaviour.

Quadrature of the nonlocal operator needs three analytic facts about a
function besides point values: how fast it decays (f ~ |y|^{-decay_exponent}
up to a constant), whether it vanishes outside a ball (support_radius), and
on which origin-centred spheres it loses smoothness (kink_radii), so radial
integrals can split there.  Callables act on arrays: a point function maps
an (n, d) array to (n,), a radial profile maps radii (n,) to (n,).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class ScalarField:
    radial_profile: Callable | None = None
    point_fn: Callable | None = None
    decay_exponent: float = 0.0
    support_radius: float | None = None
    kink_radii: tuple[float, ...] = ()

    @property
    def is_radial(self) -> bool:
        return self.radial_profile is not None

    def values_at(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if self.radial_profile is not None:
            return np.asarray(self.radial_profile(np.linalg.norm(points, axis=-1)), dtype=float)
        return np.asarray(self.point_fn(points), dtype=float)

    def value(self, point) -> float:
        return float(self.values_at(np.atleast_2d(point))[0])

    def profile_values(self, rho) -> np.ndarray:
        if self.radial_profile is None:
            raise ValueError("field has no radial profile")
        return np.asarray(self.radial_profile(np.asarray(rho, dtype=float)), dtype=float)


# Profile callables are small frozen dataclasses so fields stay picklable
# for process-parallel Monte Carlo.


@dataclass(frozen=True)
class _PowerProfile:
    c: float
    m: float

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        return self.c * rho**self.m


@dataclass(frozen=True)
class _GetoorProfile:
    alpha: float

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        return np.maximum(1.0 - rho**2, 0.0) ** (self.alpha / 2.0)


@dataclass(frozen=True)
class _BumpProfile:
    radius: float

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        t2 = np.minimum((rho / self.radius) ** 2, 1.0)
        with np.errstate(divide="ignore", over="ignore"):
            inner = np.where(t2 < 1.0, np.exp(1.0 - 1.0 / np.maximum(1.0 - t2, 1e-300)), 0.0)
        return inner


@dataclass(frozen=True)
class _GaussProfile:
    sigma: float

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        return np.exp(-0.5 * (rho / self.sigma) ** 2)


@dataclass(frozen=True)
class _ChebProfile:
    coeffs: tuple[float, ...]
    lo: float
    hi: float

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        x = 2.0 * (rho - self.lo) / (self.hi - self.lo) - 1.0
        return np.polynomial.chebyshev.chebval(np.clip(x, -1.0, 1.0), self.coeffs)


@dataclass(frozen=True)
class _ComboPoint:
    a: float
    f: ScalarField
    b: float
    g: ScalarField

    def __call__(self, points):
        return self.a * self.f.values_at(points) + self.b * self.g.values_at(points)


@dataclass(frozen=True)
class _ComboProfile:
    a: float
    f: ScalarField
    b: float
    g: ScalarField

    def __call__(self, rho):
        return self.a * self.f.profile_values(rho) + self.b * self.g.profile_values(rho)


@dataclass(frozen=True)
class _ScaledProfile:
    """profile(rho / scale): dilation f_r(y) = f(y / r)."""

    base: Callable
    scale: float

    def __call__(self, rho):
        return self.base(np.asarray(rho, dtype=float) / self.scale)


def constant_field(c: float = 1.0) -> ScalarField:
    return ScalarField(radial_profile=_PowerProfile(c, 0.0), decay_exponent=0.0)


def power_field(c: float, m: float) -> ScalarField:
    # |y|^m is smooth at the origin only for even nonnegative integer m.
    smooth = m >= 0 and float(m).is_integer() and int(m) % 2 == 0
    kinks = () if smooth else (0.0,)
    return ScalarField(radial_profile=_PowerProfile(c, m), decay_exponent=-m, kink_radii=kinks)


def getoor_field(alpha: float) -> ScalarField:
    """(1 - |y|^2)_+^{alpha/2}; its nonlocal derivative is constant in the unit ball."""
    return ScalarField(
        radial_profile=_GetoorProfile(alpha),
        support_radius=1.0,
        kink_radii=(1.0,),
    )


def bump_field(radius: float = 2.0) -> ScalarField:
    """Smooth compactly supported mollifier bump, equal to 1 at the origin."""
    return ScalarField(radial_profile=_BumpProfile(radius), support_radius=radius)


def gaussian_field(sigma: float = 1.0) -> ScalarField:
    # exp(-0.5 (r/sigma)^2) underflows to exact zero well before 30 sigma,
    # so the compact-support treatment is lossless in float64.
    return ScalarField(radial_profile=_GaussProfile(sigma), support_radius=40.0 * sigma)


def riesz_field(d: int, alpha: float) -> ScalarField:
    """|y|^{alpha - d}, annihilated by the operator away from the origin."""
    return ScalarField(
        radial_profile=_PowerProfile(1.0, alpha - d),
        decay_exponent=d - alpha,
        kink_radii=(0.0,),
    )


def potential_field(potential) -> ScalarField:
    """Wrap a model potential (power-law or tabulated radial) as a field."""
    if hasattr(potential, "knots"):
        kinks = tuple(k for k, _ in potential.knots)
    else:
        m = potential.m
        smooth = m >= 0 and float(m).is_integer() and int(m) % 2 == 0
        kinks = () if smooth else (0.0,)
    return ScalarField(
        radial_profile=potential.profile,
        decay_exponent=-potential.asymptotic_exponent,
        kink_radii=kinks,
    )


def radial_field(profile: Callable, decay_exponent: float = 0.0,
                 support_radius: float | None = None,
                 kink_radii: tuple[float, ...] = ()) -> ScalarField:
    return ScalarField(
        radial_profile=profile,
        decay_exponent=decay_exponent,
        support_radius=support_radius,
        kink_radii=kink_radii,
    )


def chebyshev_radial_field(coeffs, lo: float, hi: float,
                           support_radius: float | None = None) -> ScalarField:
    return ScalarField(
        radial_profile=_ChebProfile(tuple(float(c) for c in coeffs), lo, hi),
        support_radius=support_radius,
    )


def dilated_field(f: ScalarField, scale: float) -> ScalarField:
    """f_r(y) = f(y / scale), for scaling-covariance checks."""
    if not f.is_radial:
        raise ValueError("dilation helper only supports radial fields")
    support = None if f.support_radius is None else f.support_radius * scale
    return ScalarField(
        radial_profile=_ScaledProfile(f.radial_profile, scale),
        decay_exponent=f.decay_exponent,
        support_radius=support,
        kink_radii=tuple(k * scale for k in f.kink_radii),
    )


def linear_combination(a: float, f: ScalarField, b: float, g: ScalarField) -> ScalarField:
    """a*f + b*g with merged tail metadata."""
    supports = [s for s in (f.support_radius, g.support_radius)]
    support = None if any(s is None for s in supports) else max(supports)
    decay = min(f.decay_exponent, g.decay_exponent)
    kinks = tuple(sorted(set(f.kink_radii) | set(g.kink_radii)))
    if f.is_radial and g.is_radial:
        return ScalarField(
            radial_profile=_ComboProfile(a, f, b, g),
            decay_exponent=decay,
            support_radius=support,
            kink_radii=kinks,
        )
    return ScalarField(
        point_fn=_ComboPoint(a, f, b, g),
        decay_exponent=decay,
        support_radius=support,
        kink_radii=kinks,
    )


BATTERY = {
    "constant": lambda d, alpha: constant_field(1.0),
    "getoor": lambda d, alpha: getoor_field(alpha),
    "bump": lambda d, alpha: bump_field(2.0),
    "gaussian": lambda d, alpha: gaussian_field(1.0),
    "riesz": lambda d, alpha: riesz_field(d, alpha),
}


def named_field(name: str, d: int, alpha: float) -> ScalarField:
    try:
        return BATTERY[name](d, alpha)
    except KeyError:
        raise ValueError(f"unknown field {name!r}; choose from {sorted(BATTERY)}") from None


def feature_scale(f: ScalarField) -> float:
    """Crude length scale used to pick the near/far split radius."""
    candidates = [k for k in f.kink_radii if k > 0]
    if f.support_radius is not None:
        candidates.append(f.support_radius)
    return min(candidates) if candidates else 1.0
