"""Isoperimetric deficits, Bonnesen-type bounds, and their proof machinery.

Every bound is evaluated from a :class:`~curvedkin.radii.BodyMetrics` alone,
never from the polygon, so test oracles can substitute their own radii.
Applicability is an explicit flag: the sharp hyperbolic bound legitimately
fails its sign hypothesis (long thin bodies) and the min-form takes over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .convex import GeodesicPolygon, convex_hull
from .radii import BodyMetrics, metrics
from .surface import (Curvature, GeometryError, RandomStream, exp_at_base,
                      sample_positions)

TWO_PI = 2.0 * math.pi
FOUR_PI = 4.0 * math.pi


class BoundName(Enum):
    EUCLID_B = "euclid_bonnesen"
    S1 = "sphere_sharp"
    S2 = "sphere_simplified"
    S3 = "sphere_isoperimetric"
    S4 = "sphere_complement"
    H1 = "hyperbolic_sharp"
    H_MIN = "hyperbolic_min_form"
    H_ISO = "hyperbolic_isoperimetric"


@dataclass(frozen=True)
class Bound:
    name: BoundName
    value: float
    applicable: bool


@dataclass(frozen=True)
class DeficitReport:
    kappa: float
    metrics: BodyMetrics
    deficit: float
    bounds: tuple[Bound, ...]

    def slack(self, b: Bound) -> float:
        return self.deficit - b.value

    def satisfied(self, b: Bound) -> bool:
        if not b.applicable:
            return True
        return self.deficit >= b.value - 1e-9 * (1.0 + abs(b.value))

    @property
    def all_satisfied(self) -> bool:
        return all(self.satisfied(b) for b in self.bounds)

    @property
    def active_bound(self) -> Bound:
        """The largest applicable bound value."""
        applicable = [b for b in self.bounds if b.applicable]
        return max(applicable, key=lambda b: b.value)


def deficit(curvature: Curvature, A: float, P: float) -> float:
    """Isoperimetric deficit P^2 - A (4 pi - kappa A)."""
    if A < 0 or P < 0:
        raise GeometryError("area and perimeter must be nonnegative")
    return P * P - A * (FOUR_PI - curvature.kappa * A)


def euclid_bonnesen_rhs(m: BodyMetrics) -> float:
    """Classical error term pi^2 (R - r)^2, flat regime only."""
    if m.kappa != 0.0:
        raise GeometryError("Euclidean bound needs kappa = 0 metrics")
    return math.pi ** 2 * (m.R_circ - m.r_in) ** 2


def sphere_bounds(m: BodyMetrics) -> list[Bound]:
    """Right-hand sides of the four spherical inequalities."""
    k = m.kappa
    if k <= 0:
        raise GeometryError("spherical bounds need kappa > 0 metrics")
    s = math.sqrt(k)
    a, p = m.A, m.P
    if a >= FOUR_PI / k:
        raise GeometryError("body is not a proper subset of the sphere")
    two_pi_ka = TWO_PI - k * a
    ds = math.sin(s * m.R_circ) - math.sin(s * m.r_in)
    bounds = [Bound(BoundName.S3, 0.0, True)]
    if two_pi_ka <= 1e-12:
        bounds.append(Bound(BoundName.S1, math.nan, False))
        bounds.append(Bound(BoundName.S2, math.nan, False))
        bounds.append(Bound(BoundName.S4, math.nan, False))
        return bounds
    s1 = ds ** 2 * (two_pi_ka ** 2 + k * p * p) ** 2 / (4.0 * k * two_pi_ka ** 2)
    s2 = ds ** 2 * two_pi_ka ** 2 / (4.0 * k)
    a_comp = FOUR_PI / k - a
    s4 = (k / 16.0) * ds ** 2 * (a - a_comp) ** 2
    if abs(s4 - s2) > 1e-9 * (1.0 + abs(s2)):
        raise GeometryError("complement-form bound disagrees with the "
                            "simplified bound; metrics are inconsistent")
    bounds.append(Bound(BoundName.S1, s1, True))
    bounds.append(Bound(BoundName.S2, s2, True))
    bounds.append(Bound(BoundName.S4, s4, True))
    return bounds


def hyperbolic_bounds(m: BodyMetrics) -> list[Bound]:
    """Sharp, min-form and isoperimetric bounds for kappa < 0."""
    k = m.kappa
    if k >= 0:
        raise GeometryError("hyperbolic bounds need kappa < 0 metrics")
    lam = -k
    s = math.sqrt(lam)
    a, p = m.A, m.P
    two_pi_la = TWO_PI + lam * a
    cond = two_pi_la ** 2 - lam * p * p
    dsh = math.sinh(s * m.R_circ) - math.sinh(s * m.r_in)
    sharp = dsh ** 2 * cond ** 2 / (4.0 * lam * two_pi_la ** 2)
    return [
        Bound(BoundName.H_ISO, 0.0, True),
        Bound(BoundName.H1, sharp, cond >= 0.0),
        Bound(BoundName.H_MIN, min(4.0 * math.pi ** 2 / lam, sharp), True),
    ]


def deficit_report(curvature: Curvature, m: BodyMetrics) -> DeficitReport:
    """Evaluate every bound of the regime against the deficit."""
    d = deficit(curvature, m.A, m.P)
    k = curvature.kappa
    if k > 0:
        bounds = sphere_bounds(m)
    elif k < 0:
        bounds = hyperbolic_bounds(m)
    else:
        bounds = [Bound(BoundName.EUCLID_B, euclid_bonnesen_rhs(m), True)]
    return DeficitReport(kappa=k, metrics=m, deficit=d, bounds=tuple(bounds))


# ---------------------------------------------------------------------------
# Quadratic root witnesses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadraticWitness:
    """The proof's quadratic whose real roots must straddle the radii."""

    coeffs: tuple[float, float, float]  # a2, a1, a0
    discriminant: float
    roots: Optional[tuple[float, float]]
    bracket: tuple[float, float]

    def evaluate(self, x: float) -> float:
        a2, a1, a0 = self.coeffs
        return a2 * x * x + a1 * x + a0

    @property
    def brackets_interval(self) -> bool:
        if self.roots is None:
            return False
        lo, hi = self.bracket
        return self.roots[0] <= lo + 1e-9 and hi <= self.roots[1] + 1e-9


NON_DISC_THRESHOLD = 1e-6


def quadratic_witness(curvature: Curvature, m: BodyMetrics) -> QuadraticWitness:
    """Build the regime's quadratic in x = eps, sin eps, or sinh eps.

    For kappa != 0 the body is rescaled to unit |curvature| first, matching
    the substitutions x = sin eps and x = sinh eps of the unit-curvature
    arguments.
    """
    if m.R_circ - m.r_in <= NON_DISC_THRESHOLD * (1.0 + m.R_circ):
        raise GeometryError("witness needs a non-disc body (r_in < R_circ)")
    k = curvature.kappa
    if k == 0.0:
        coeffs = (-math.pi, m.P, -m.A)
        bracket = (m.r_in, m.R_circ)
    else:
        s = curvature.scale
        a_bar = abs(k) * m.A
        p_bar = s * m.P
        if k > 0:
            if p_bar <= 0:
                raise GeometryError("spherical witness needs P > 0")
            coeffs = ((TWO_PI - a_bar) ** 2 + p_bar ** 2,
                      -FOUR_PI * p_bar,
                      (FOUR_PI - a_bar) * a_bar)
            bracket = (math.sin(s * m.r_in), math.sin(s * m.R_circ))
        else:
            coeffs = (p_bar ** 2 - (TWO_PI + a_bar) ** 2,
                      FOUR_PI * p_bar,
                      -(FOUR_PI + a_bar) * a_bar)
            if coeffs[0] >= 0:
                raise GeometryError(
                    "hyperbolic witness needs the sign condition "
                    "(2pi + A)^2 - P^2 > 0")
            bracket = (math.sinh(s * m.r_in), math.sinh(s * m.R_circ))
    a2, a1, a0 = coeffs
    disc = a1 * a1 - 4.0 * a2 * a0
    roots = None
    if disc >= 0 and a2 != 0.0:
        sq = math.sqrt(disc)
        r1 = (-a1 - sq) / (2.0 * a2)
        r2 = (-a1 + sq) / (2.0 * a2)
        roots = (min(r1, r2), max(r1, r2))
    return QuadraticWitness(coeffs=coeffs, discriminant=disc, roots=roots,
                            bracket=bracket)


# ---------------------------------------------------------------------------
# kappa -> 0 degeneration sweep
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    kappa: float
    deficit: float
    active_bound_name: BoundName
    active_bound_value: float
    euclid_reference: float


def body_from_polar(curvature: Curvature,
                    polar_vertices: Sequence[tuple[float, float]]) -> GeodesicPolygon:
    """Hull of fixed (r, theta) vertex data realized on the given surface."""
    pts = [exp_at_base(curvature, r, th) for r, th in polar_vertices]
    return convex_hull(pts)


def kappa_limit_sweep(polar_vertices: Sequence[tuple[float, float]],
                      kappas: Sequence[float]) -> list[SweepRow]:
    """Evaluate deficit and active bound across curvatures for one body."""
    flat = Curvature(0.0)
    m0 = metrics(body_from_polar(flat, polar_vertices))
    reference = euclid_bonnesen_rhs(m0)
    rows = []
    for kappa in kappas:
        curv = Curvature(kappa)
        m = metrics(body_from_polar(curv, polar_vertices))
        rep = deficit_report(curv, m)
        active = rep.active_bound
        rows.append(SweepRow(kappa=kappa, deficit=rep.deficit,
                             active_bound_name=active.name,
                             active_bound_value=active.value,
                             euclid_reference=reference))
    return rows


# ---------------------------------------------------------------------------
# Random test bodies
# ---------------------------------------------------------------------------

def _disc_radius_limit(curvature: Curvature) -> float:
    if curvature.kappa > 0:
        return curvature.hemisphere_limit
    # No hemisphere bound off the sphere; keep bodies at a moderate size so
    # solver conditioning and the hyperbolic sign hypothesis stay healthy.
    return (5.0 / 3.0) / max(1.0, curvature.scale)


def random_point_in_disc(curvature: Curvature, rho: float,
                         rng: RandomStream):
    r, theta = sample_positions(curvature, rho, 1, rng)
    if curvature.kappa > 0:
        # sample_positions covers the whole sphere; re-draw radially instead.
        from .surface import disc_area
        u = rng.uniform(0.0, disc_area(curvature, rho))
        r = [math.acos(1.0 - curvature.kappa * u / TWO_PI) / curvature.scale]
    return exp_at_base(curvature, float(r[0]), float(theta[0]))


def random_convex_body(curvature: Curvature, rng: RandomStream,
                       min_vertices: int = 3, max_vertices: int = 12,
                       rho_limit: Optional[float] = None) -> GeodesicPolygon:
    """Hull of points drawn area-uniformly in a random disc about the base.

    The disc radius is uniform in [0.1, 0.9 * limit], covering both fat and
    thin bodies; the result always has nonempty interior.
    """
    if rho_limit is None:
        rho_limit = _disc_radius_limit(curvature)
    while True:
        m = int(rng.integers(min_vertices, max_vertices + 1))
        rho = float(rng.uniform(0.1, 0.9 * rho_limit))
        pts = [random_point_in_disc(curvature, rho, rng) for _ in range(m)]
        hull = convex_hull(pts)
        if hull.dim == 2:
            return hull
