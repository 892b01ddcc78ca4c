"""Tests for inradius/circumradius against independent brute-force oracles."""

import math
from itertools import combinations

import numpy as np
import pytest

from curvedkin.convex import (area, contains_point, convex_hull, perimeter,
                              point_body, regular_ngon, segment_body)
from curvedkin.radii import (BodyMetrics, circumradius, inradius, metrics,
                             smallest_enclosing_disc)
from curvedkin.surface import (Curvature, GeometryError, RandomStream,
                               SurfacePoint, disc_area, disc_perimeter,
                               exp_at_base, form_dot, gen_asin,
                               geodesic_distance, normalize_to_surface,
                               sample_isometry)

REGIME_KAPPAS = [1.0, 0.0, -1.0]


def flat_point(x, y):
    return SurfacePoint(np.array([x, y, 1.0]), Curvature(0.0))


def random_body(curv, rng, n_points=7, rho=0.8):
    while True:
        pts = [exp_at_base(curv, float(rng.uniform(0, rho)),
                           float(rng.uniform(0, 2 * math.pi)))
               for _ in range(n_points)]
        hull = convex_hull(pts)
        if hull.dim == 2:
            return hull


# ---------------------------------------------------------------------------
# Oracles
# ---------------------------------------------------------------------------

def circumdisc_oracle(K):
    """Min over all vertex pair/triple circumdiscs that enclose everything."""
    from curvedkin.radii import _circumcenter3, _midpoint
    curv = K.curvature
    va = K.vertex_array
    pts = list(K.vertices)
    best = None
    candidates = []
    for i, j in combinations(range(len(va)), 2):
        candidates.append(_midpoint(curv, va[i], va[j]))
    for i, j, k in combinations(range(len(va)), 3):
        candidates.extend(_circumcenter3(curv, va[i], va[j], va[k]))
    for c in candidates:
        cp = SurfacePoint(c, curv)
        r = max(geodesic_distance(cp, p) for p in pts)
        if best is None or r < best:
            best = r
    return best


def inradius_grid_oracle(K, steps=500):
    """Grid search maximizing min geodesic distance to the edge geodesics."""
    curv = K.curvature
    r_c, center = circumradius(K)
    diam = 2.0 * r_c
    step = diam / steps
    # Chart grid over the circumdisc's bounding box, mapped back.
    from curvedkin.convex import _chart, hemisphere_direction
    u = (hemisphere_direction(curv, K.vertex_array)
         if curv.kappa > 0 else None)
    xy = _chart(curv, K.vertex_array, u)
    lo, hi = xy.min(axis=0), xy.max(axis=0)
    n = 120  # chart resolution; converted to arclength below
    gx = np.linspace(lo[0], hi[0], n)
    gy = np.linspace(lo[1], hi[1], n)
    X, Y = np.meshgrid(gx, gy)
    if curv.kappa == 0.0:
        emb = np.stack([X.ravel(), Y.ravel(), np.ones(X.size)], axis=1)
    elif curv.kappa < 0:
        z2 = 1.0 / (-curv.kappa) + X.ravel() ** 2 + Y.ravel() ** 2
        emb = np.stack([X.ravel(), Y.ravel(), np.sqrt(z2)], axis=1)
    else:
        from curvedkin.convex import _chart as chart_fn
        a = np.array([1.0, 0.0, 0.0])
        if abs(u @ a) > 0.9:
            a = np.array([0.0, 1.0, 0.0])
        e1 = a - (a @ u) * u
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(u, e1)
        raw = (np.outer(X.ravel(), e1) + np.outer(Y.ravel(), e2)
               + u[None, :])
        nrm = np.linalg.norm(raw, axis=1, keepdims=True)
        emb = raw / (nrm * curv.scale)
    sines = K.signed_edge_distances(emb)
    worst = np.min(sines, axis=0)
    best = float(np.max(worst))
    if best <= 0:
        return 0.0
    return gen_asin(curv, best)


class TestCircumradius:
    def test_unit_square(self):
        sq = convex_hull([flat_point(x, y)
                          for x in (0.0, 1.0) for y in (0.0, 1.0)])
        R, center = circumradius(sq)
        assert abs(R - math.sqrt(0.5)) < 1e-12
        assert np.allclose(center.coords[:2], [0.5, 0.5], atol=1e-12)

    def test_point_body(self):
        R, _ = circumradius(point_body(flat_point(2.0, 3.0)))
        assert R == 0.0

    def test_segment_body(self):
        c = Curvature(-1.0)
        seg = segment_body(exp_at_base(c, 0.5, 0.0),
                           exp_at_base(c, 0.5, math.pi))
        R, center = circumradius(seg)
        assert abs(R - 0.5) < 1e-9

    @pytest.mark.parametrize("kappa", REGIME_KAPPAS)
    def test_matches_pair_triple_oracle(self, kappa):
        curv = Curvature(kappa)
        rng = RandomStream(83)
        for _ in range(200):
            body = random_body(curv, rng,
                               n_points=int(rng.integers(3, 9)))
            R, center = circumradius(body)
            oracle = circumdisc_oracle(body)
            assert abs(R - oracle) < 1e-7

    @pytest.mark.parametrize("kappa", REGIME_KAPPAS)
    def test_all_vertices_inside(self, kappa):
        curv = Curvature(kappa)
        rng = RandomStream(89)
        for _ in range(50):
            body = random_body(curv, rng)
            R, center = circumradius(body)
            for v in body.vertices:
                assert geodesic_distance(center, v) <= R + 1e-9


class TestInradius:
    def test_square_side_two(self):
        sq = convex_hull([flat_point(x, y)
                          for x in (-1.0, 1.0) for y in (-1.0, 1.0)])
        r, center = inradius(sq)
        assert abs(r - 1.0) < 1e-12
        assert np.allclose(center.coords[:2], [0.0, 0.0], atol=1e-12)

    def test_segment_zero(self):
        c = Curvature(1.0)
        seg = segment_body(exp_at_base(c, 0.3, 0.0),
                           exp_at_base(c, 0.3, 2.0))
        r, _ = inradius(seg)
        assert r == 0.0

    @pytest.mark.parametrize("kappa", REGIME_KAPPAS)
    def test_matches_grid_oracle(self, kappa):
        curv = Curvature(kappa)
        rng = RandomStream(97)
        for _ in range(40):
            body = random_body(curv, rng,
                               n_points=int(rng.integers(3, 9)))
            r, center = inradius(body)
            oracle = inradius_grid_oracle(body)
            R, _ = circumradius(body)
            grid_step = 2.0 * R / 120.0
            assert r >= oracle - 1e-9
            assert abs(r - oracle) < 2.0 * grid_step

    @pytest.mark.parametrize("kappa", REGIME_KAPPAS)
    def test_incenter_realizes_radius(self, kappa):
        curv = Curvature(kappa)
        rng = RandomStream(101)
        for _ in range(50):
            body = random_body(curv, rng)
            r, center = inradius(body)
            sines = body.signed_edge_distances(center.coords)
            dmin = gen_asin(curv, float(np.min(sines)))
            assert abs(dmin - r) < 1e-9
            assert contains_point(body, center)


class TestMetrics:
    def test_unit_square_all_fields(self):
        sq = convex_hull([flat_point(x, y)
                          for x in (0.0, 1.0) for y in (0.0, 1.0)])
        m = metrics(sq)
        assert abs(m.A - 1.0) < 1e-12
        assert abs(m.P - 4.0) < 1e-12
        assert abs(m.r_in - 0.5) < 1e-12
        assert abs(m.R_circ - math.sqrt(0.5)) < 1e-12

    def test_point_body_all_zero(self):
        m = metrics(point_body(flat_point(1.0, 1.0)))
        assert m.A == m.P == m.r_in == m.R_circ == 0.0

    @pytest.mark.parametrize("kappa", REGIME_KAPPAS)
    def test_disc_ngon_within_one_percent(self, kappa):
        curv = Curvature(kappa)
        rho = 0.5
        body = regular_ngon(curv, rho, 64)
        m = metrics(body)
        assert abs(m.A - disc_area(curv, rho)) < 0.01 * disc_area(curv, rho)
        assert abs(m.P - disc_perimeter(curv, rho)) < 0.01 * disc_perimeter(
            curv, rho)
        assert abs(m.r_in - rho) < 0.01 * rho
        assert abs(m.R_circ - rho) < 0.01 * rho

    @pytest.mark.parametrize("kappa", REGIME_KAPPAS)
    def test_radius_ordering(self, kappa):
        curv = Curvature(kappa)
        rng = RandomStream(103)
        for _ in range(100):
            m = metrics(random_body(curv, rng))
            assert 0.0 <= m.r_in <= m.R_circ + 1e-9
            if kappa > 0:
                assert m.R_circ < curv.hemisphere_limit

    @pytest.mark.parametrize("kappa", REGIME_KAPPAS)
    def test_sandwich(self, kappa):
        # Inscribed disc inside K inside circumscribed disc, by sampling
        # boundary points of the inscribed disc and checking edge distances.
        curv = Curvature(kappa)
        rng = RandomStream(107)
        for _ in range(25):
            body = random_body(curv, rng)
            m = metrics(body)
            from curvedkin.surface import translation_to
            t = translation_to(m.incenter)
            for th in np.linspace(0.0, 2 * math.pi, 24, endpoint=False):
                p = t.apply(exp_at_base(curv, max(m.r_in - 1e-10, 0.0), th))
                assert contains_point(body, p)
            for v in body.vertices:
                assert geodesic_distance(m.circumcenter, v) <= m.R_circ + 1e-8

    @pytest.mark.parametrize("kappa", REGIME_KAPPAS)
    def test_isometry_invariance(self, kappa):
        curv = Curvature(kappa)
        rng = RandomStream(109)
        body = random_body(curv, rng)
        m0 = metrics(body)
        for _ in range(10):
            g = sample_isometry(curv, 1.0, rng)
            m1 = metrics(body.transformed(g))
            assert abs(m1.A - m0.A) < 1e-8
            assert abs(m1.P - m0.P) < 1e-8
            assert abs(m1.r_in - m0.r_in) < 1e-8
            assert abs(m1.R_circ - m0.R_circ) < 1e-8


class TestWelzlDeterminism:
    def test_same_input_same_support(self):
        curv = Curvature(0.0)
        rng = RandomStream(113)
        body = random_body(curv, rng, n_points=9)
        c1, r1 = smallest_enclosing_disc(curv, body.vertex_array)
        c2, r2 = smallest_enclosing_disc(curv, body.vertex_array)
        assert np.array_equal(c1, c2) and r1 == r2
