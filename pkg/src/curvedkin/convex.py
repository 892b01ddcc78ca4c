"""Geodesically convex polygons on the model surfaces.

A polygon is an ordered counterclockwise cycle of surface points.  One and
two vertex bodies (points and segments) are first-class: the perimeter
convention doubles a segment's length, and several inequality stress cases
need them.

Geodesics are traces of planes through the origin of the embedding, so a
single orientation predicate, the sign of det(a, b, p), answers every
sidedness question in all three regimes.
"""

from __future__ import annotations

import math
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from .surface import (EPS, Curvature, GeometryError, Isometry, Regime,
                      SurfacePoint, exp_at_base, form_dot, gen_asin,
                      geodesic_distance, normalize_to_surface)


class DegeneratePosition(GeometryError):
    """Boundaries share an edge segment; crossing counts are undefined."""


def hemisphere_direction(curvature: Curvature,
                         coords: np.ndarray) -> np.ndarray:
    """A unit direction u with <u, v> > 0 for every point, or raise.

    The direction maximizing the worst margin over unit points is supported
    by at most three of them: it is a point itself, the bisector of a pair,
    or the circumcenter direction of a triple.  Enumerating those candidates
    makes the search exact at polygon sizes.
    """
    coords = np.atleast_2d(coords)
    scale = np.max(np.linalg.norm(coords, axis=1))
    unit = coords / np.linalg.norm(coords, axis=1, keepdims=True)
    n = len(unit)

    def best_of(candidates: np.ndarray):
        norms = np.linalg.norm(candidates, axis=1)
        ok = norms > EPS
        if not np.any(ok):
            return None, 0.0
        cand = candidates[ok] / norms[ok, None]
        margins = np.min(coords @ cand.T, axis=0)
        i = int(np.argmax(margins))
        return cand[i], float(margins[i])

    # Cheap first pass: mean, the points, pair bisectors.
    cheap = [unit.sum(axis=0, keepdims=True), unit]
    if n >= 2:
        ii, jj = np.triu_indices(n, 1)
        cheap.append(unit[ii] + unit[jj])
    best, best_margin = best_of(np.concatenate(cheap))
    if best is not None and best_margin > EPS * scale:
        return best
    # Exact pass: circumcenter directions of triples, both signs.
    if n >= 3:
        ii, jj, kk = (np.array(t) for t in zip(
            *[(i, j, k) for i in range(n) for j in range(i + 1, n)
              for k in range(j + 1, n)]))
        tri = np.cross(unit[ii] - unit[jj], unit[jj] - unit[kk])
        cand, margin = best_of(np.concatenate([tri, -tri]))
        if cand is not None and margin > best_margin:
            best, best_margin = cand, margin
    if best is None or best_margin <= EPS * scale:
        raise GeometryError("points do not fit in an open hemisphere")
    return best


def _chart(curvature: Curvature, coords: np.ndarray,
           u: Optional[np.ndarray] = None) -> np.ndarray:
    """Project to a chart where geodesics are straight lines.

    Gnomonic for the sphere (about the hemisphere direction u), Klein for
    the hyperbolic plane, identity for the flat plane.
    """
    k = curvature.kappa
    coords = np.atleast_2d(coords)
    if k == 0.0:
        return coords[:, :2].copy()
    if k < 0:
        return coords[:, :2] / coords[:, 2:3]
    if u is None:
        u = hemisphere_direction(curvature, coords)
    # Right-handed basis (e1, e2, u) so chart orientation matches det sign.
    a = np.array([1.0, 0.0, 0.0])
    if abs(u @ a) > 0.9:
        a = np.array([0.0, 1.0, 0.0])
    e1 = a - (a @ u) * u
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(u, e1)
    denom = coords @ u
    return np.stack([coords @ e1 / denom, coords @ e2 / denom], axis=1)


def _hull_indices(xy: np.ndarray) -> list[int]:
    """Andrew monotone chain; returns CCW indices, strict turns only."""
    n = len(xy)
    scale = max(1.0, float(np.max(np.abs(xy))))
    tol = 1e-12 * scale * scale
    order = sorted(range(n), key=lambda i: (xy[i, 0], xy[i, 1]))

    def cross(o, a, b):
        return ((xy[a, 0] - xy[o, 0]) * (xy[b, 1] - xy[o, 1])
                - (xy[a, 1] - xy[o, 1]) * (xy[b, 0] - xy[o, 0]))

    def build(seq):
        h: list[int] = []
        for i in seq:
            while len(h) >= 2 and cross(h[-2], h[-1], i) <= tol:
                h.pop()
            h.append(i)
        return h

    lower = build(order)
    upper = build(reversed(order))
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 0:
        hull = [order[0]]
    return hull


class GeodesicPolygon:
    """Compact convex polygon; immutable after construction."""

    def __init__(self, vertices: Sequence[SurfacePoint],
                 curvature: Optional[Curvature] = None):
        vertices = tuple(vertices)
        if not vertices:
            raise GeometryError("polygon needs at least one vertex")
        if curvature is None:
            curvature = vertices[0].curvature
        for v in vertices:
            curvature.require_same(v.curvature)
        self.vertices = vertices
        self.curvature = curvature
        self._validate()

    @cached_property
    def vertex_array(self) -> np.ndarray:
        a = np.array([v.coords for v in self.vertices])
        a.setflags(write=False)
        return a

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def dim(self) -> int:
        return min(self.n_vertices - 1, 2)

    @cached_property
    def edges(self) -> list[tuple[int, int]]:
        n = self.n_vertices
        if n == 1:
            return []
        if n == 2:
            return [(0, 1)]
        return [(i, (i + 1) % n) for i in range(n)]

    @cached_property
    def edge_normals(self) -> np.ndarray:
        """Form-normalized inward normals, one per edge; gen_sin-valued distances.

        For a point p, form_dot(curvature, normal, p) equals gen_sin of the
        signed geodesic distance from the edge's supporting geodesic,
        positive on the interior side.
        """
        k = self.curvature.kappa
        va = self.vertex_array
        normals = []
        for i, j in self.edges:
            nu = np.cross(va[i], va[j])
            if k < 0:
                norm2 = nu[0] ** 2 + nu[1] ** 2 - nu[2] ** 2
                if norm2 <= 0:
                    raise GeometryError("edge does not support a geodesic")
                normals.append(nu * np.array([1.0, 1.0, -1.0])
                               / math.sqrt(norm2))
            elif k > 0:
                normals.append(nu / np.linalg.norm(nu))
            else:
                normals.append(nu / math.hypot(nu[0], nu[1]))
        return np.array(normals)

    def _validate(self):
        n = self.n_vertices
        va = np.array([v.coords for v in self.vertices])
        scale = float(np.max(np.abs(va))) + 1.0
        for i in range(n):
            j = (i + 1) % n
            if n > 1 and np.all(np.abs(va[i] - va[j]) < EPS * scale):
                raise GeometryError(f"repeated adjacent vertices {i}, {j}")
        if self.curvature.kappa > 0:
            hemisphere_direction(self.curvature, va)  # raises on violation
        if n < 3:
            return
        dists = form_dot(self.curvature, self.edge_normals[:, None, :],
                         va[None, :, :])
        if np.min(dists) < -EPS * scale:
            raise GeometryError(
                "vertex cycle is not convex/counterclockwise "
                f"(worst signed distance {np.min(dists):.3g})")
        # Canonical form: no three consecutive collinear vertices.
        for i in range(n):
            d = dists[(i - 1) % n, (i + 1) % n]
            if abs(d) < 1e-13 * scale:
                raise GeometryError(f"vertex {i + 1} is collinear with neighbours")

    def signed_edge_distances(self, coords: np.ndarray) -> np.ndarray:
        """gen_sin of the signed distance from each edge geodesic (rows)."""
        return form_dot(self.curvature, self.edge_normals[:, None, :],
                        np.atleast_2d(coords)[None, :, :])

    def transformed(self, g: Isometry) -> "GeodesicPolygon":
        self.curvature.require_same(g.curvature)
        return GeodesicPolygon([g.apply(v) for v in self.vertices],
                               self.curvature)

    def __repr__(self):
        return (f"GeodesicPolygon(kappa={self.curvature.kappa}, "
                f"n={self.n_vertices})")


def point_body(p: SurfacePoint) -> GeodesicPolygon:
    return GeodesicPolygon([p])


def segment_body(a: SurfacePoint, b: SurfacePoint) -> GeodesicPolygon:
    return GeodesicPolygon([a, b])


def _canonical_rotation(points: list[SurfacePoint]) -> list[SurfacePoint]:
    """Rotate the cycle so the lexicographically smallest vertex is first."""
    if len(points) <= 1:
        return points
    keys = [tuple(p.coords) for p in points]
    start = min(range(len(points)), key=keys.__getitem__)
    return points[start:] + points[:start]


def convex_hull(points: Iterable[SurfacePoint]) -> GeodesicPolygon:
    """Minimal convex polygon containing the points; vertices are inputs."""
    pts = list(points)
    if not pts:
        raise GeometryError("empty point set")
    curv = pts[0].curvature
    for p in pts:
        curv.require_same(p.curvature)
    coords = np.array([p.coords for p in pts])
    scale = float(np.max(np.abs(coords))) + 1.0
    # Drop duplicates, keeping first occurrences.
    keep: list[int] = []
    for i in range(len(pts)):
        if all(np.max(np.abs(coords[i] - coords[j])) > EPS * scale
               for j in keep):
            keep.append(i)
    if len(keep) == 1:
        return GeodesicPolygon([pts[keep[0]]], curv)
    u = hemisphere_direction(curv, coords) if curv.kappa > 0 else None
    xy = _chart(curv, coords[keep], u)
    hull = _hull_indices(xy)
    chosen = _canonical_rotation([pts[keep[i]] for i in hull])
    return GeodesicPolygon(chosen, curv)


# ---------------------------------------------------------------------------
# Metric quantities
# ---------------------------------------------------------------------------

def perimeter(K: GeodesicPolygon) -> float:
    """Boundary length; twice the length for a segment body, 0 for a point."""
    n = K.n_vertices
    if n == 1:
        return 0.0
    if n == 2:
        return 2.0 * geodesic_distance(K.vertices[0], K.vertices[1])
    return sum(geodesic_distance(K.vertices[i], K.vertices[j])
               for i, j in K.edges)


def _interior_angle(curv: Curvature, a: np.ndarray, b: np.ndarray,
                    c: np.ndarray) -> float:
    """Angle at b between the geodesics toward a and c (form metric)."""
    bb = form_dot(curv, b, b)
    u = a - (form_dot(curv, a, b) / bb) * b
    v = c - (form_dot(curv, c, b) / bb) * b
    uu = form_dot(curv, u, u)
    vv = form_dot(curv, v, v)
    cosang = form_dot(curv, u, v) / math.sqrt(uu * vv)
    return math.acos(min(1.0, max(-1.0, float(cosang))))


def area(K: GeodesicPolygon) -> float:
    """Area via the shoelace formula (flat) or angle excess over kappa."""
    if K.dim < 2:
        return 0.0
    va = K.vertex_array
    n = K.n_vertices
    k = K.curvature.kappa
    if k == 0.0:
        x, y = va[:, 0], va[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
    total = sum(_interior_angle(K.curvature, va[i - 1], va[i], va[(i + 1) % n])
                for i in range(n))
    return (total - (n - 2) * math.pi) / k


def contains_point(K: GeodesicPolygon, p: SurfacePoint) -> bool:
    """Is p in K?  Boundary points count as contained (within tolerance)."""
    K.curvature.require_same(p.curvature)
    scale = float(np.max(np.abs(K.vertex_array))) + 1.0
    tol = EPS * scale
    if K.n_vertices == 1:
        return geodesic_distance(K.vertices[0], p) <= tol
    if K.n_vertices == 2:
        a, b = K.vertices
        return (geodesic_distance(a, p) + geodesic_distance(p, b)
                <= geodesic_distance(a, b) + tol)
    return bool(np.min(K.signed_edge_distances(p.coords)) >= -tol)


# ---------------------------------------------------------------------------
# Intersection, Euler characteristic, boundary crossings
# ---------------------------------------------------------------------------

def _plane_crossing(p: np.ndarray, q: np.ndarray, sp: float, sq: float,
                    curv: Curvature) -> np.ndarray:
    """Point where the geodesic pq meets the plane with values sp, sq."""
    d = sq * p - sp * q
    if sq - sp < 0:
        d = -d
    return normalize_to_surface(curv, d)


def _clip_cycle(coords: np.ndarray, nu: np.ndarray, curv: Curvature,
                tol: float) -> np.ndarray:
    """One Sutherland-Hodgman pass against the half-space nu . x >= 0."""
    s = coords @ nu
    out = []
    m = len(coords)
    for i in range(m):
        j = (i + 1) % m
        if s[i] >= -tol:
            out.append(coords[i])
        if (s[i] > tol and s[j] < -tol) or (s[i] < -tol and s[j] > tol):
            out.append(_plane_crossing(coords[i], coords[j], s[i], s[j], curv))
    return np.array(out) if out else np.empty((0, 3))


def _clip_segment(pa: np.ndarray, pb: np.ndarray, planes: np.ndarray,
                  curv: Curvature, tol: float):
    for nu in planes:
        sa, sb = float(pa @ nu), float(pb @ nu)
        if sa < -tol and sb < -tol:
            return None
        if sa < -tol:
            pa = _plane_crossing(pa, pb, sa, sb, curv)
        elif sb < -tol:
            pb = _plane_crossing(pa, pb, sa, sb, curv)
    return pa, pb


def _edge_planes(K: GeodesicPolygon) -> np.ndarray:
    """Unnormalized interior half-space normals (Euclidean cross products)."""
    va = K.vertex_array
    return np.array([np.cross(va[i], va[j]) for i, j in K.edges])


def _points_to_body(coords: np.ndarray,
                    curv: Curvature) -> Optional[GeodesicPolygon]:
    if len(coords) == 0:
        return None
    return convex_hull([SurfacePoint(c, curv) for c in coords])


def intersect_convex(K: GeodesicPolygon,
                     L: GeodesicPolygon) -> Optional[GeodesicPolygon]:
    """Convex intersection as a polygon, or None when empty."""
    K.curvature.require_same(L.curvature)
    curv = K.curvature
    if K.dim == 0:
        return K if contains_point(L, K.vertices[0]) else None
    if L.dim == 0:
        return L if contains_point(K, L.vertices[0]) else None
    scale = float(max(np.max(np.abs(K.vertex_array)),
                      np.max(np.abs(L.vertex_array)))) + 1.0
    tol = EPS * scale
    if K.dim == 1 and L.dim == 1:
        hits = [c for c in _segment_intersections(K, L, tol)]
        return _points_to_body(np.array(hits), curv) if hits else None
    if K.dim == 1:
        K, L = L, K
    if L.dim == 1:
        seg = _clip_segment(L.vertex_array[0], L.vertex_array[1],
                            _edge_planes(K), curv, tol)
        if seg is None:
            return None
        return _points_to_body(np.array(seg), curv)
    coords = K.vertex_array
    for nu in _edge_planes(L):
        coords = _clip_cycle(coords, nu, curv, tol)
        if len(coords) == 0:
            return None
    return _points_to_body(coords, curv)


def euler_intersection(K: GeodesicPolygon, L: GeodesicPolygon) -> int:
    """Euler characteristic of the convex intersection: 1 if nonempty."""
    return 1 if intersect_convex(K, L) is not None else 0


def _arc_coefficients(p: np.ndarray, q: np.ndarray,
                      d: np.ndarray) -> tuple[float, float]:
    """Solve d = alpha p + beta q in the plane span(p, q) (least squares)."""
    g11, g12, g22 = p @ p, p @ q, q @ q
    b1, b2 = p @ d, q @ d
    det = g11 * g22 - g12 * g12
    alpha = (b1 * g22 - b2 * g12) / det
    beta = (b2 * g11 - b1 * g12) / det
    return float(alpha), float(beta)


def _segment_intersections(K: GeodesicPolygon, L: GeodesicPolygon,
                           tol: float) -> list[np.ndarray]:
    """Transversal intersection points of the two boundaries' edges."""
    curv = K.curvature
    out = []
    va, vb = K.vertex_array, L.vertex_array
    for i, j in K.edges:
        p = va[i] / np.linalg.norm(va[i])
        q = va[j] / np.linalg.norm(va[j])
        nk = np.cross(p, q)
        for a_i, b_i in L.edges:
            a = vb[a_i] / np.linalg.norm(vb[a_i])
            b = vb[b_i] / np.linalg.norm(vb[b_i])
            nl = np.cross(a, b)
            d = np.cross(nk, nl)
            nd = np.linalg.norm(d)
            if nd < 1e-12 * np.linalg.norm(nk) * np.linalg.norm(nl):
                # Parallel supporting geodesics; overlap is degenerate.
                if (abs(nl @ p) < tol and abs(nl @ q) < tol
                        and _arcs_overlap(p, q, a, b)):
                    raise DegeneratePosition(
                        "edges share a supporting geodesic segment")
                continue
            d = d / nd
            alpha, beta = _arc_coefficients(p, q, d)
            gamma, delta = _arc_coefficients(a, b, d)
            vals = np.array([alpha, beta, gamma, delta])
            if np.all(vals > 1e-12) or np.all(vals < -1e-12):
                sgn = 1.0 if vals[0] > 0 else -1.0
                out.append(normalize_to_surface(curv, sgn * d))
    return out


def _arcs_overlap(p, q, a, b) -> bool:
    # Midpoints included so exactly-coincident arcs (shared endpoints give
    # no strictly interior coefficients) still register as overlapping.
    for u in (a, b, 0.5 * (a + b)):
        al, be = _arc_coefficients(p, q, u)
        if al > 1e-9 and be > 1e-9:
            return True
    for u in (p, q, 0.5 * (p + q)):
        al, be = _arc_coefficients(a, b, u)
        if al > 1e-9 and be > 1e-9:
            return True
    return False


def boundary_crossings(K: GeodesicPolygon, L: GeodesicPolygon) -> int:
    """Number of transversal crossing points of the two boundaries."""
    K.curvature.require_same(L.curvature)
    scale = float(max(np.max(np.abs(K.vertex_array)),
                      np.max(np.abs(L.vertex_array)))) + 1.0
    return len(_segment_intersections(K, L, EPS * scale))


# ---------------------------------------------------------------------------
# Convenience constructors
# ---------------------------------------------------------------------------

def regular_ngon(curvature: Curvature, r: float, n: int,
                 phase: float = 0.0) -> GeodesicPolygon:
    """Regular n-gon inscribed in the disc of radius r about the base point."""
    if n < 3:
        raise GeometryError("regular polygon needs n >= 3")
    verts = [exp_at_base(curvature, r, phase + 2.0 * math.pi * i / n)
             for i in range(n)]
    return GeodesicPolygon(verts, curvature)


def polygons_close(K: GeodesicPolygon, L: GeodesicPolygon,
                   tol: float = 1e-9) -> bool:
    """Vertex-wise equality in canonical form, within tolerance."""
    if K.n_vertices != L.n_vertices or K.curvature.kappa != L.curvature.kappa:
        return False
    va = np.array([p.coords for p in _canonical_rotation(list(K.vertices))])
    vb = np.array([p.coords for p in _canonical_rotation(list(L.vertices))])
    return bool(np.max(np.abs(va - vb)) <= tol)
