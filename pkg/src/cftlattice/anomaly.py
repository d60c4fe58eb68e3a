"""Anomaly (Liouville) action on planar regions and the triangle anomaly constant.

For a flat region S and a Weyl factor W the action is

    L_S(W) = 1/(4 pi) int_S |grad W|^2 dx dy + 1/pi int_{dS} k W dl,

with k the curvature of the boundary measured towards the interior.  A
conformally flat background e^{W1}|dz|^2 adds the curvature term and changes
k dl into (k - 1/2 d_in W1) dl.  Corners are excluded from the line integral;
an optional corner term can be switched on for reference computations.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple

import mpmath
import numpy as np
from scipy.special import roots_legendre

from .uniformization import TriangleGeometry

ANOMALY_CACHE_ENV = "CFTLATTICE_ANOMALY_CACHE"
SHARED_CACHE_ENV = "CFTLATTICE_CACHE_DIR"
CACHE_STATS = {"hits": 0, "misses": 0}


class QuadratureError(RuntimeError):
    """Raised when a quadrature error estimate exceeds the requested tolerance."""


# ---- Weyl factors -----------------------------------------------------------


@dataclass
class WeylField:
    """A smooth function W on a planar region, with its gradient and Laplacian.

    ``gradient`` returns dW/dx + i dW/dy as a complex array.
    """

    value: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray]
    laplacian: Callable[[np.ndarray], np.ndarray] = field(default=lambda z: np.zeros(np.shape(z)))

    @classmethod
    def from_map(cls, derivatives: Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]]):
        """W = log|F'|^2 for a holomorphic F given through z -> (F', F'')."""
        def value(z):
            d1, _ = derivatives(z)
            return np.log(np.abs(d1) ** 2)

        def gradient(z):
            d1, d2 = derivatives(z)
            return 2 * np.conj(d2 / d1)

        return cls(value, gradient)

    @classmethod
    def constant(cls, level: float):
        return cls(lambda z: np.full(np.shape(z), float(level)),
                   lambda z: np.zeros(np.shape(z), dtype=complex))

    def __add__(self, other: "WeylField") -> "WeylField":
        return WeylField(lambda z: self.value(z) + other.value(z),
                         lambda z: self.gradient(z) + other.gradient(z),
                         lambda z: self.laplacian(z) + other.laplacian(z))

    def __neg__(self) -> "WeylField":
        return WeylField(lambda z: -self.value(z), lambda z: -self.gradient(z),
                         lambda z: -self.laplacian(z))

    def normal_derivative(self, z, normal):
        return np.real(self.gradient(z) * np.conj(normal))


def mobius_field(a, b, c, d) -> WeylField:
    """W = log|M'|^2 for M(z) = (a z + b)/(c z + d)."""
    det = a * d - b * c

    def derivs(z):
        den = c * np.asarray(z) + d
        return det / den ** 2, -2 * c * det / den ** 3

    return WeylField.from_map(derivs)


# ---- quadrature rules ---------------------------------------------------------


def gauss_rule(lo: float, hi: float, n: int):
    x, w = roots_legendre(n)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1), half * w


@dataclass
class BoundaryRule:
    """Quadrature for one smooth boundary piece.

    ``normals`` point into the region and ``curvature`` is measured towards them.
    """

    nodes: np.ndarray
    weights: np.ndarray
    normals: np.ndarray
    curvature: np.ndarray
    name: str = ""


@dataclass
class Region:
    """Planar region described by quadrature data for its bulk and boundary."""

    bulk_nodes: np.ndarray
    bulk_weights: np.ndarray
    boundary: List[BoundaryRule]
    corners: List[Tuple[complex, float]] = field(default_factory=list)
    name: str = ""

    @property
    def area(self) -> float:
        return float(np.sum(self.bulk_weights))

    @property
    def perimeter(self) -> float:
        return float(sum(np.sum(b.weights) for b in self.boundary))

    def total_turning(self) -> float:
        """int k dl plus the exterior angles at corners; 2 pi for a simply connected region."""
        smooth = sum(float(np.sum(b.curvature * b.weights)) for b in self.boundary)
        return smooth + sum(math.pi - alpha for _, alpha in self.corners)


def circle_arc(center: complex, radius: float, theta0: float, theta1: float, n: int,
               inside: bool = True, name: str = "") -> BoundaryRule:
    """Arc of a circle; ``inside`` says the region lies inside the circle."""
    th, w = gauss_rule(theta0, theta1, n)
    radial = np.exp(1j * th)
    sign = 1.0 if inside else -1.0
    return BoundaryRule(center + radius * radial, radius * np.abs(w), -sign * radial,
                        np.full(n, sign / radius), name)


def segment(start: complex, end: complex, n: int, name: str = "") -> BoundaryRule:
    """Straight piece traversed with the region on its left."""
    s, w = gauss_rule(0.0, 1.0, n)
    step = end - start
    return BoundaryRule(start + s * step, abs(step) * w, np.full(n, 1j * step / abs(step)),
                        np.zeros(n), name)


def parametric_arc(curve: Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray, np.ndarray]],
                   s0: float, s1: float, n: int, name: str = "") -> BoundaryRule:
    """Smooth curve s -> (z, z', z'') traversed with the region on its left."""
    s, w = gauss_rule(s0, s1, n)
    z, d1, d2 = curve(s)
    speed = np.abs(d1)
    kappa = np.imag(np.conj(d1) * d2) / speed ** 3
    return BoundaryRule(z, speed * w, 1j * d1 / speed, kappa, name)


def polyline_arc(points: np.ndarray, normals: np.ndarray, curvature: np.ndarray,
                 name: str = "") -> BoundaryRule:
    """Trapezoid rule along a sampled curve with the region on its left."""
    pts = np.asarray(points)
    seg = np.abs(np.diff(pts))
    w = np.zeros(len(pts))
    w[:-1] += seg / 2
    w[1:] += seg / 2
    return BoundaryRule(pts, w, np.asarray(normals), np.asarray(curvature), name)


def polar_bulk(theta0, theta1, r_inner, r_outer, n_theta, n_r):
    """Tensor Gauss rule for {r_inner(theta) < r < r_outer(theta)}."""
    th, wt = gauss_rule(theta0, theta1, n_theta)
    x, wx = gauss_rule(0.0, 1.0, n_r)
    nodes, weights = [], []
    for angle, wa in zip(th, wt):
        lo = r_inner(angle) if callable(r_inner) else r_inner
        hi = r_outer(angle) if callable(r_outer) else r_outer
        r = lo + (hi - lo) * x
        nodes.append(r * np.exp(1j * angle))
        weights.append(wa * wx * (hi - lo) * r)
    return np.concatenate(nodes), np.concatenate(weights)


def disc_region(radius: float = 1.0, center: complex = 0.0, n: int = 48) -> Region:
    nodes, weights = polar_bulk(0.0, 2 * math.pi, 0.0, radius, 2 * n, n)
    return Region(nodes + center, weights,
                  [circle_arc(center, radius, 0.0, 2 * math.pi, 2 * n, name="circle")], name="disc")


def annulus_region(r_inner: float, r_outer: float, n: int = 48) -> Region:
    nodes, weights = polar_bulk(0.0, 2 * math.pi, r_inner, r_outer, 2 * n, n)
    return Region(nodes, weights, [
        circle_arc(0.0, r_outer, 0.0, 2 * math.pi, 2 * n, inside=True, name="outer"),
        circle_arc(0.0, r_inner, 2 * math.pi, 0.0, 2 * n, inside=False, name="inner"),
    ], name="annulus")


def half_disc_region(n: int = 48) -> Region:
    """Upper half of the unit disc, with right-angle corners at +-1."""
    nodes, weights = polar_bulk(0.0, math.pi, 0.0, 1.0, n, n)
    return Region(nodes, weights, [
        segment(-1.0, 1.0, n, name="diameter"),
        circle_arc(0.0, 1.0, 0.0, math.pi, n, name="arc"),
    ], corners=[(1.0, math.pi / 2), (-1.0, math.pi / 2)], name="half_disc")


def _triangle_rule(a, b, c, n):
    """Collapsed-square Gauss rule on a triangle."""
    x, wx = gauss_rule(0.0, 1.0, n)
    u, v = np.meshgrid(x, x, indexing="ij")
    wu, wv = np.meshgrid(wx, wx, indexing="ij")
    pts = a + u * (b - a) + (u * v) * (c - b)
    jac = abs(((b - a).conjugate() * (c - b)).imag)
    return pts.ravel(), (wu * wv * u * jac).ravel()


def polygon_region(vertices: Sequence[complex], n: int = 24) -> Region:
    """Convex polygon with vertices listed counter-clockwise."""
    verts = np.asarray(vertices, dtype=complex)
    centre = verts.mean()
    nodes, weights, sides, corners = [], [], [], []
    m = len(verts)
    for k in range(m):
        a, b = verts[k], verts[(k + 1) % m]
        pts, w = _triangle_rule(centre, a, b, n)
        nodes.append(pts)
        weights.append(w)
        sides.append(segment(a, b, n, name=f"side{k}"))
        prev, nxt = verts[k - 1], verts[(k + 1) % m]
        angle = abs(np.angle((prev - verts[k]) / (nxt - verts[k])))
        corners.append((complex(verts[k]), float(angle)))
    return Region(np.concatenate(nodes), np.concatenate(weights), sides, corners, name="polygon")


def regular_polygon(n_sides: int, circumradius: float = 1.0, n: int = 24) -> Region:
    verts = circumradius * np.exp(2j * math.pi * np.arange(n_sides) / n_sides)
    return polygon_region(verts, n)


# ---- the action -----------------------------------------------------------------


@dataclass
class ActionParts:
    bulk: float
    boundary: float
    corners: float = 0.0
    curvature: float = 0.0

    @property
    def total(self) -> float:
        return self.bulk + self.boundary + self.corners + self.curvature


def corner_weight(alpha: float) -> float:
    """Coefficient of W at a corner with interior angle alpha."""
    return (math.pi ** 2 - alpha ** 2) / (2 * math.pi * alpha)


def liouville_action(region: Region, weyl: WeylField, include_corners: bool = False,
                     background: Optional[WeylField] = None, parts: bool = False):
    """Anomaly action of ``weyl`` on ``region``.

    With ``background`` = W1 the region carries the metric e^{W1}|dz|^2.
    """
    grad = weyl.gradient(region.bulk_nodes)
    bulk = float(np.sum(np.abs(grad) ** 2 * region.bulk_weights)) / (4 * math.pi)
    curv = 0.0
    if background is not None:
        # sqrt(g) R = -Laplacian(W1)
        curv = -float(np.sum(background.laplacian(region.bulk_nodes) * weyl.value(region.bulk_nodes)
                             * region.bulk_weights)) / (2 * math.pi)
    edge = 0.0
    for piece in region.boundary:
        k = piece.curvature
        if background is not None:
            k = k - 0.5 * background.normal_derivative(piece.nodes, piece.normals)
        edge += float(np.sum(k * weyl.value(piece.nodes) * piece.weights)) / math.pi
    corner = 0.0
    if include_corners:
        for point, alpha in region.corners:
            corner += corner_weight(alpha) * float(weyl.value(np.array([point]))[0])
    out = ActionParts(bulk, edge, corner, curv)
    return out if parts else out.total


def converged_action(build: Callable[[int], Region], weyl: WeylField, n: int = 32,
                     tol: float = 1e-8, include_corners: bool = False) -> Tuple[float, float]:
    """Action with an error estimate from doubling the quadrature order."""
    coarse = liouville_action(build(n), weyl, include_corners)
    fine = liouville_action(build(2 * n), weyl, include_corners)
    err = abs(fine - coarse)
    if err > tol:
        raise QuadratureError(f"quadrature error estimate {err:.2e} exceeds tolerance {tol:.1e}")
    return fine, err


# ---- closed-form reference values ----------------------------------------------

REFERENCE_CASES = ("disc_scale", "cylinder_annulus", "torus_hole", "half_disc_mobius",
                   "regular_ngon_corner")


def reference_anomaly(case: str, **params) -> float:
    """Closed-form anomaly actions.

    disc_scale(radius): unit disc with F(z) = radius*z.
    cylinder_annulus(radius, length): annulus mapped onto a cylinder of circumference 2 pi radius.
    torus_hole(radius): contribution of one hole of the given radius, -4 log(radius),
        so that exp(c L / 24) = R^{-c/6}.
    half_disc_mobius(): upper half disc with F(z) = (i - z)/(i + z).
    regular_ngon_corner(n_sides, level): corner sum of a regular n-gon with constant W.
    """
    if case == "disc_scale":
        radius = params["radius"]
        if radius <= 0:
            raise ValueError("radius must be positive")
        return 4 * math.log(radius)
    if case == "cylinder_annulus":
        radius, length = params["radius"], params["length"]
        if radius <= 0 or length <= 0:
            raise ValueError("radius and length must be positive")
        return -2 * length / radius
    if case == "torus_hole":
        radius = params["radius"]
        if radius <= 0:
            raise ValueError("radius must be positive")
        return -4 * math.log(radius)
    if case == "half_disc_mobius":
        return 0.0
    if case == "regular_ngon_corner":
        n_sides, level = params["n_sides"], params.get("level", 1.0)
        if n_sides < 3:
            raise ValueError("a polygon needs at least three sides")
        return 2 * (1 - 1 / n_sides) / (1 - 2 / n_sides) * level
    raise ValueError(f"unknown reference case {case!r}; choose from {REFERENCE_CASES}")


def half_disc_mobius_parts() -> Tuple[float, float]:
    """Bulk and boundary terms of the half-disc Moebius case, which cancel."""
    catalan = float(mpmath.catalan)
    bulk = 8 * catalan / math.pi - 2 * math.log(2)
    return bulk, -bulk


# ---- cocycle and composition identities ------------------------------------------


def cocycle_check(region: Region, first: WeylField, second: WeylField) -> float:
    """|L(W1 + W2) - L_{e^{W1}}(W2) - L(W1)| on ``region``."""
    lhs = liouville_action(region, first + second)
    rhs = liouville_action(region, second, background=first) + liouville_action(region, first)
    return abs(lhs - rhs)


def composition_checks(region: Region, outer, inner, inner_image: Region) -> dict:
    """Residuals of the three identities for holomorphic maps.

    ``inner`` maps ``region`` onto ``inner_image`` and ``outer`` is defined on
    ``inner_image``.  Each map is given as z -> (value, first, second) derivatives
    on numpy arrays.

    additivity: L(W_{outer o inner}) = L(W_inner) + L_{inner}(W_outer o inner)
    inversion:  L_region(W_inner) = -L_image(W_{inner^-1})
    pullback:   L_region(W_outer o inner) with metric from inner equals L_image(W_outer)
    """
    def field_of(fn):
        return WeylField.from_map(lambda z: fn(z)[1:])

    def composed(z):
        w, d1, d2 = inner(z)
        _, e1, e2 = outer(w)
        return None, e1 * d1, e2 * d1 ** 2 + e1 * d2

    def pulled(z):
        w, d1, d2 = inner(z)
        _, e1, e2 = outer(w)
        return None, e1, e2 * d1

    inner_field = field_of(inner)
    outer_pulled = WeylField(lambda z: np.log(np.abs(pulled(z)[1]) ** 2),
                             lambda z: 2 * np.conj(pulled(z)[2] / pulled(z)[1]))
    total = liouville_action(region, field_of(composed))
    additivity = abs(total - liouville_action(region, inner_field)
                     - liouville_action(region, outer_pulled, background=inner_field))
    pullback = abs(liouville_action(region, outer_pulled, background=inner_field)
                   - liouville_action(inner_image, field_of(outer)))
    return {"additivity": additivity, "pullback": pullback}


# ---- the triangle anomaly constant ------------------------------------------------


@dataclass
class AnomalyTerms:
    """Both action terms entering A(t), split into bulk and boundary parts."""

    t: float
    wedge_bulk: float
    wedge_boundary: float
    patch_bulk: float
    patch_boundary: float
    error: float
    method: str

    @property
    def wedge(self) -> float:
        return self.wedge_bulk + self.wedge_boundary

    @property
    def patch(self) -> float:
        return self.patch_bulk + self.patch_boundary

    def anomaly(self, c: float) -> float:
        return c / 8 * (self.wedge - self.patch)


def _cut_samples(geom: TriangleGeometry, phis: np.ndarray):
    """phi0 and derivatives on the unit circle, plus E and derivatives on the cut preimage."""
    out = []
    for u, d1, d2 in geom.cut_jets(phis):
        _, e1, e2 = geom.uniformizer_with_derivatives(u)
        out.append((complex(u), complex(d1), complex(d2), complex(e1), complex(e2)))
    return np.array(out).T


def _cut_pieces(geom: TriangleGeometry, phis, wphi):
    """Unit semicircle of D+ and its image b, for phi in [0, pi/2].

    Returns integrals of W dW/dn_out and of k W for both Weyl factors.
    Seen from the wedge region, b has outward normal i*T and inward curvature -kappa.
    """
    u, d1, d2, e1, e2 = _cut_samples(geom, phis)
    zc = np.exp(1j * phis)
    om_p = np.log(np.abs(d1) ** 2)
    patch_green = np.sum(om_p * 2 * np.real(zc * d2 / d1) * wphi)
    patch_edge = np.sum(om_p * wphi)
    speed = np.abs(d1)
    tangent = 1j * zc * d1 / speed
    kappa = (1 + np.real(zc * d2 / d1)) / speed
    om_e = np.log(np.abs(e1) ** 2)
    wedge_green = np.sum(om_e * 2 * np.real(1j * tangent * e2 / e1) * speed * wphi)
    wedge_edge = -np.sum(kappa * om_e * speed * wphi)
    return wedge_green, wedge_edge, patch_green, patch_edge


def _diameter_piece(geom: TriangleGeometry, xs, wx):
    """Diameter of D+ for x in [0, 1]: outward normal -i and no curvature."""
    jets = []
    seed = branch = None
    for x in xs:
        val, f1, f2, branch = geom._phi0_jet(x, seed, branch)
        seed = val
        jets.append((complex(f1), complex(f2)))
    f1, f2 = np.array(jets).T
    return np.sum(np.log(np.abs(f1) ** 2) * 2 * np.imag(f2 / f1) * wx)


def _arc_piece(geom: TriangleGeometry, ths, wth):
    """Arc of the unit circle bounding the wedge region, theta in [theta_e, pi/3]."""
    jets = np.array([[complex(v) for v in geom.uniformizer_with_derivatives(mpmath.expj(th))[1:]]
                     for th in ths]).T
    a1, a2 = jets
    za = np.exp(1j * ths)
    om_a = np.log(np.abs(a1) ** 2)
    return np.sum(om_a * 2 * np.real(za * a2 / a1) * wth), np.sum(om_a * wth)


def graded_rule(lo: float, hi: float, n: int, scale: float):
    """Composite Gauss rule on panels growing geometrically away from ``lo``.

    The first panel has width ``scale``; panels double until ``hi`` is reached.
    """
    edges = [lo]
    width = min(scale, hi - lo)
    while edges[-1] + width < hi - 1e-14:
        edges.append(edges[-1] + width)
        width *= 2
    edges.append(hi)
    if len(edges) > 2 and edges[-1] - edges[-2] < 0.5 * (edges[-2] - edges[-3]):
        del edges[-2]
    nodes, weights = zip(*(gauss_rule(a, b, n) for a, b in zip(edges[:-1], edges[1:])))
    return np.concatenate(nodes), np.concatenate(weights)


def _green_terms(geom: TriangleGeometry, n: int):
    """Both actions from boundary data only (the Weyl factors are harmonic).

    Symmetric halves are doubled: the cut preimage and the unit semicircle use
    phi in [0, pi/2], the wedge arc theta in [theta_e, pi/3], the diameter x in [0, 1].
    The two wedge rays cancel by the rotation covariance of E.
    """
    theta_e = geom.cut_endpoint_angle()
    # near pi/3 the cut ends close to the wedge corner and its data vary on that scale
    cut_scale = min(math.pi / 2, 4 * (math.pi / 3 - theta_e))
    wedge_green, wedge_edge, patch_green, patch_edge = _cut_pieces(
        geom, *graded_rule(0.0, math.pi / 2, n, cut_scale))
    patch_green += _diameter_piece(geom, *gauss_rule(0.0, 1.0, n))
    arc_green, arc_edge = _arc_piece(geom, *graded_rule(theta_e, math.pi / 3, n, min(theta_e, 0.1)))
    wedge_green += arc_green
    wedge_edge += arc_edge
    return (2 * wedge_green / (4 * math.pi), 2 * wedge_edge / math.pi,
            2 * patch_green / (4 * math.pi), 2 * patch_edge / math.pi)


def anomaly_terms(geom: TriangleGeometry, n: int = 24, method: str = "green") -> AnomalyTerms:
    """Both actions of A(t) with an error estimate from a half-order rerun."""
    if method == "green":
        fine = _green_terms(geom, n)
        coarse = _green_terms(geom, max(8, n // 2))
    elif method == "area":
        fine = _area_terms(geom, n)
        coarse = _area_terms(geom, max(8, n // 2))
    else:
        raise ValueError(f"unknown method {method!r}")
    err = abs((fine[0] + fine[1] - fine[2] - fine[3]) - (coarse[0] + coarse[1] - coarse[2] - coarse[3]))
    return AnomalyTerms(geom.t, *map(float, fine), error=float(err), method=method)


def _area_terms(geom: TriangleGeometry, n: int, curve_points: int = 512):
    """Bulk terms by 2D quadrature; the cut boundary term uses the traced polyline.

    The wedge region splits into the star-shaped part {rho b(phi)} under the cut
    and the sector theta_e < theta < pi/3.  D+ uses the phi0 series.
    """
    theta_e = geom.cut_endpoint_angle()
    phis, wphi = gauss_rule(0.0, math.pi / 2, n)
    u, d1, d2, e1, e2 = _cut_samples(geom, phis)
    rhos, wrho = gauss_rule(0.0, 1.0, n)
    wedge_bulk = 0.0
    for b, db, wb in zip(u, 1j * np.exp(1j * phis) * d1, wphi):
        jac = abs(np.imag(np.conj(b) * db))
        for rho, wr in zip(rhos, wrho):
            _, f1, f2 = geom.uniformizer_with_derivatives(rho * b)
            wedge_bulk += abs(complex(f2 / f1)) ** 2 * rho * jac * wb * wr
    ths, wth = gauss_rule(theta_e, math.pi / 3, n)
    for th, wt in zip(ths, wth):
        for r, wr in zip(rhos, wrho):
            _, f1, f2 = geom.uniformizer_with_derivatives(r * mpmath.expj(th))
            wedge_bulk += abs(complex(f2 / f1)) ** 2 * r * wt * wr
    wedge_bulk *= 2 * 4 / (4 * math.pi)

    curve = geom.trace_cut_curve(curve_points)
    om_b = np.array([math.log(abs(complex(geom.uniformizer_with_derivatives(z)[1])) ** 2)
                     for z in curve.points])
    rule = polyline_arc(curve.points, curve.normals, curve.curvature)
    wedge_edge = float(np.sum(rule.curvature * om_b * rule.weights)) / math.pi
    arc = np.array([complex(geom.uniformizer_with_derivatives(mpmath.expj(th))[1]) for th in ths])
    wedge_edge += 2 * float(np.sum(np.log(np.abs(arc) ** 2) * wth)) / math.pi

    nodes, weights = polar_bulk(0.0, math.pi / 2, 0.0, 1.0, n, n)
    ratio = geom.phi0_series(nodes, 2) / geom.phi0_series(nodes, 1)
    patch_bulk = 2 * 4 * float(np.sum(np.abs(ratio) ** 2 * weights)) / (4 * math.pi)
    patch_edge = 2 * float(np.sum(np.log(np.abs(d1) ** 2) * wphi)) / math.pi
    return wedge_bulk, wedge_edge, patch_bulk, patch_edge


def _cache_file() -> Path:
    root = os.environ.get(ANOMALY_CACHE_ENV) or os.environ.get(SHARED_CACHE_ENV)
    base = Path(root) if root else Path.home() / ".cache" / "cftlattice"
    return base / "anomaly.json"


def _cache_key(t, series_order, n, method):
    return f"{t!r}|{series_order}|{n}|{method}"


def triangle_anomaly_terms(t: float, n: int = 24, method: str = "green", series_order: int = 30,
                           use_cache: bool = True, tolerance: Optional[float] = None) -> AnomalyTerms:
    """Cached evaluation of the two actions at parameter t (edge length 1)."""
    path = _cache_file()
    key = _cache_key(float(t), series_order, n, method)
    store = {}
    if use_cache and path.exists():
        try:
            store = json.loads(path.read_text())
        except (OSError, ValueError):
            store = {}
        if key in store:
            CACHE_STATS["hits"] += 1
            return AnomalyTerms(**store[key])
    CACHE_STATS["misses"] += 1
    terms = anomaly_terms(TriangleGeometry(t, series_order=series_order), n=n, method=method)
    if tolerance is not None and terms.error > tolerance:
        raise QuadratureError(f"anomaly error estimate {terms.error:.2e} at t={t} exceeds {tolerance:.1e}")
    if use_cache:
        store[key] = asdict(terms)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(store, indent=1, sort_keys=True))
        os.replace(tmp, path)
    return terms


def triangle_anomaly_A(geom_or_t, c: float, n: int = 24, method: str = "green",
                       use_cache: bool = True) -> float:
    """A(t) = c/8 (L_wedge(log|E'|^2) - L_{D+}(log|phi0'|^2)) for edge length 1."""
    if isinstance(geom_or_t, TriangleGeometry):
        if use_cache:
            terms = triangle_anomaly_terms(geom_or_t.t, n=n, method=method,
                                           series_order=geom_or_t.series_order)
        else:
            terms = anomaly_terms(geom_or_t, n=n, method=method)
    else:
        terms = triangle_anomaly_terms(float(geom_or_t), n=n, method=method, use_cache=use_cache)
    return terms.anomaly(c)
