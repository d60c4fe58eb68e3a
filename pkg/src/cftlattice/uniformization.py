"""Geometry of the clipped triangle and its uniformisation onto the unit disc.

The parameter t > 0 fixes the hole-radius to edge-length ratio
R/d = 1/(2 cosh(pi t)).  The disc D carries three insertion points at the
cube roots of unity; around the insertion at 1 the coordinate patch
K0 = phi0(D+) is bounded by an arc of the unit circle and by the curve b,
the preimage of the cut.  The wedge |arg z| <= pi/3 minus K0 is mapped onto
one third of the clipped triangle by the uniformiser E.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import List, Sequence, Tuple

import mpmath
import numpy as np

DEFAULT_SERIES_ORDER = 30
DEFAULT_CURVE_POINTS = 512
DEFAULT_DPS = 30


class GeometryError(ValueError):
    """Invalid geometry request or a failed numerical construction."""


# ---- scalar functions of t ------------------------------------------------


def ratio_of_t(t: float) -> float:
    """R/d for the parameter t."""
    return 1.0 / (2.0 * math.cosh(math.pi * t))


def t_of_ratio(ratio: float) -> float:
    """Inverse of ratio_of_t on the open interval (0, 1/2)."""
    if not 0.0 < ratio < 0.5:
        raise GeometryError(f"R/d must lie in (0, 1/2), got {ratio}")
    return math.acosh(1.0 / (2.0 * ratio)) / math.pi


def radius_of_t(t) -> mpmath.mpf:
    t = mpmath.mpf(t)
    num = mpmath.sqrt(3 * mpmath.pi) * mpmath.gamma(mpmath.mpf(7) / 6)
    den = ((mpmath.cosh(mpmath.pi * t) ** 2 - mpmath.mpf(3) / 4)
           * abs(mpmath.gamma(mpmath.mpf(5) / 6 - 1j * t)) ** 2)
    return num / den


def edge_of_t(t) -> mpmath.mpf:
    return 2 * mpmath.cosh(mpmath.pi * mpmath.mpf(t)) * radius_of_t(t)


def scale_of_t(t) -> mpmath.mpf:
    """X(t).  The Gamma ratio in its definition has unit modulus, so X is real and positive."""
    t = mpmath.mpf(t)
    phase = mpmath.im(mpmath.loggamma(mpmath.mpf(1) / 6 + 1j * t) + mpmath.loggamma(-1j * t))
    return mpmath.exp(phase / t)


# ---- truncated power series over mpc --------------------------------------


def _ps_mul(a, b, n):
    out = [mpmath.mpc(0)] * n
    for i, x in enumerate(a[:n]):
        if x == 0:
            continue
        for j in range(n - i):
            out[i + j] += x * b[j]
    return out


def _ps_exp(a, n):
    """exp of a series with a[0] == 0."""
    out = [mpmath.mpc(0)] * n
    out[0] = mpmath.mpc(1)
    for k in range(1, n):
        acc = mpmath.mpc(0)
        for j in range(1, k + 1):
            acc += j * a[j] * out[k - j]
        out[k] = acc / k
    return out


def _ps_log1p(a, n):
    """log(1 + a) for a series with a[0] == 0."""
    out = [mpmath.mpc(0)] * n
    base = [mpmath.mpc(1)] + list(a[1:n])
    for k in range(1, n):
        acc = k * base[k]
        for j in range(1, k):
            acc -= j * out[j] * base[k - j]
        out[k] = acc / k
    return out


def _ps_compose_poly(coeffs, x, n):
    """sum_k coeffs[k] x(eps)^k for a series x with x[0] == 0."""
    out = [mpmath.mpc(0)] * n
    power = [mpmath.mpc(1)] + [mpmath.mpc(0)] * (n - 1)
    for c in coeffs:
        for i in range(n):
            out[i] += c * power[i]
        power = _ps_mul(power, x, n)
        if all(v == 0 for v in power):
            break
    return out


def _ps_revert(g, n):
    """Coefficients of the compositional inverse of g (g[0] == 0, g[1] != 0)."""
    inv = [mpmath.mpc(0)] * n
    inv[1] = 1 / g[1]
    for m in range(2, n):
        trial = list(inv)
        comp = [mpmath.mpc(0)] * n
        power = list(trial)
        for k in range(1, m + 1):
            if k >= 2:
                power = _ps_mul(power, trial, m + 1) + [mpmath.mpc(0)] * (n - m - 1)
            comp[m] += g[k] * power[m]
        inv[m] = -comp[m] / g[1]
    return inv


def _binomial_series(alpha, n):
    out = [mpmath.mpf(1)]
    for k in range(1, n):
        out.append(out[-1] * (alpha - k + 1) / k)
    return out


def _hyp_coeffs(a, b, c, n):
    out = [mpmath.mpc(1)]
    for k in range(1, n):
        out.append(out[-1] * (a + k - 1) * (b + k - 1) / ((c + k - 1) * k))
    return out


# ---- the geometry object ----------------------------------------------------


@dataclass
class CutCurve:
    """Polyline through the preimage of the cut, ordered from the lower to the upper endpoint."""

    points: np.ndarray
    tangents: np.ndarray
    normals: np.ndarray
    curvature: np.ndarray
    theta: np.ndarray

    @property
    def endpoints(self) -> Tuple[complex, complex]:
        return complex(self.points[0]), complex(self.points[-1])


def discrete_frame(points: np.ndarray):
    """Tangents, left normals and curvature of a polyline.

    t_j and n_j use the backward difference z_j - z_{j-1};
    k_j = 2 t_{j+1}.n_j / |z_{j+1} - z_{j-1}| for interior points.
    Endpoint entries repeat their neighbours.
    """
    z = np.asarray(points, dtype=complex)
    step = np.diff(z)
    unit = step / np.abs(step)
    tang = np.empty_like(z)
    tang[1:] = unit
    tang[0] = unit[0]
    normal = 1j * tang
    curv = np.empty(len(z))
    for j in range(1, len(z) - 1):
        tn = tang[j + 1].real * normal[j].real + tang[j + 1].imag * normal[j].imag
        curv[j] = 2.0 * tn / abs(z[j + 1] - z[j - 1])
    curv[0] = curv[1]
    curv[-1] = curv[-2]
    return tang, normal, curv


class TriangleGeometry:
    """All t-dependent data of the clipped-triangle uniformisation.

    ``edge`` is the physical edge length d used to scale E; the anomaly
    factor is defined with ``edge = 1``.
    """

    def __init__(self, t: float, series_order: int = DEFAULT_SERIES_ORDER,
                 dps: int = DEFAULT_DPS, edge: float = 1.0):
        if not t > 0:
            raise GeometryError(f"t must be positive, got {t}")
        if series_order < 3:
            raise GeometryError("series_order must be at least 3")
        self.t = float(t)
        self.series_order = series_order
        self.dps = dps
        self.edge = edge
        with mpmath.workdps(dps):
            self._t = mpmath.mpf(t)
            self.R_mp = radius_of_t(self._t)
            self.d_mp = edge_of_t(self._t)
            self.X_mp = scale_of_t(self._t)
            a = mpmath.mpf(5) / 12 + 0.5j * self._t
            b = mpmath.mpf(1) / 12 + 0.5j * self._t
            self._inv_params = ((a, b, 1 + 1j * self._t),
                                (mpmath.conj(a), mpmath.conj(b), 1 - 1j * self._t))
            e1 = mpmath.mpf(5) / 12 + 0.5j * self._t
            e2 = mpmath.mpf(1) / 12 + 0.5j * self._t
            self._e_params = ((e1, mpmath.conj(e1), mpmath.mpf(4) / 3),
                              (e2, mpmath.conj(e2), mpmath.mpf(2) / 3))
        self.R = float(self.R_mp)
        self.d = float(self.d_mp)
        self.X = float(self.X_mp)

    def __repr__(self):
        return f"TriangleGeometry(t={self.t})"

    @property
    def ratio(self) -> float:
        return self.R / self.d

    @property
    def scale(self) -> float:
        """d/d(t): factor turning the reference uniformiser into the one for edge length d."""
        return self.edge / self.d

    # ---- phi0 inverse in closed form ---------------------------------

    def _principal_log_ratio(self, u):
        u32 = mpmath.power(u, 1.5)
        s = (u32 - 1 / u32) / 2j
        x = s * s
        (a, b, c), (a2, b2, c2) = self._inv_params
        return mpmath.log(mpmath.hyp2f1(a, b, c, x)) - mpmath.log(mpmath.hyp2f1(a2, b2, c2, x))

    @staticmethod
    def _unwrap(value, ref):
        turns = mpmath.nint(mpmath.im(ref - value) / (2 * mpmath.pi))
        return value + 2j * mpmath.pi * turns

    def continued_log_ratio(self, u, max_steps: int = 512):
        """log of the hypergeometric ratio continued along the segment from u = 1.

        The principal logarithm jumps by 2 pi i where the ratio crosses the
        negative axis, which happens deep inside the disc for large t.
        """
        with mpmath.workdps(self.dps):
            u = mpmath.mpc(u)
            steps = 4
            while steps <= max_steps:
                ref = mpmath.mpc(0)
                smooth = True
                for k in range(1, steps + 1):
                    val = self._unwrap(self._principal_log_ratio(1 + (u - 1) * k / steps), ref)
                    if abs(val - ref) > 1:
                        smooth = False
                        break
                    ref = val
                if smooth:
                    return ref
                steps *= 2
            raise GeometryError(f"could not continue the phi0 inverse to u={complex(u)} at t={self.t}")

    def phi0_inverse(self, u, branch=None):
        """phi0^{-1}(u) from the hypergeometric closed form."""
        return self._inverse_jet(u, branch)[0]

    def phi0_inverse_derivatives(self, u, branch=None):
        """(g, g', g'') for g = phi0^{-1}, analytic in u and regular at u = 1."""
        return self._inverse_jet(u, branch)[:3]

    def _inverse_jet(self, u, branch=None):
        """(g, g', g'', log ratio); ``branch`` is a nearby value of the log ratio."""
        with mpmath.workdps(self.dps):
            u = mpmath.mpc(u)
            if branch is None:
                branch = self.continued_log_ratio(u)
            u12 = mpmath.sqrt(u)
            u32 = u * u12
            s = (u32 - 1 / u32) / 2j
            s1 = 1.5 * (u12 + 1 / (u32 * u)) / 2j
            s2 = 1.5 * (1 / (2 * u12) - 2.5 / (u32 * u * u)) / 2j
            x = s * s
            x1 = 2 * s * s1
            x2 = 2 * (s1 * s1 + s * s2)
            lam = 1 / (2j * self._t)
            log_ratio = dpsi = ddpsi = 0
            for sign, (a, b, c) in zip((1, -1), self._inv_params):
                f = mpmath.hyp2f1(a, b, c, x)
                fp = a * b / c * mpmath.hyp2f1(a + 1, b + 1, c + 1, x)
                fpp = a * (a + 1) * b * (b + 1) / (c * (c + 1)) * mpmath.hyp2f1(a + 2, b + 2, c + 2, x)
                psi = fp / f
                log_ratio += sign * mpmath.log(f)
                dpsi += sign * psi
                ddpsi += sign * (fpp / f - psi * psi)
            log_ratio = self._unwrap(log_ratio, branch)
            pref = self.X_mp / 2 * mpmath.exp(lam * log_ratio)
            slope = lam * dpsi * x1
            g = pref * s
            g1 = pref * (s1 + s * slope)
            g2 = pref * (slope * (s1 + s * slope) + s2 + s1 * slope
                         + s * lam * (ddpsi * x1 * x1 + dpsi * x2))
            return g, g1, g2, log_ratio

    # ---- phi0 series ---------------------------------------------------

    @cached_property
    def phi0_coefficients_mp(self) -> List[mpmath.mpc]:
        """Taylor coefficients c_k of phi0(z) = sum c_k z^k, k = 0..series_order."""
        n = self.series_order + 1
        with mpmath.workdps(self.dps + 10):
            up = _binomial_series(mpmath.mpf(3) / 2, n)
            um = _binomial_series(-mpmath.mpf(3) / 2, n)
            s = [(x - y) / 2j for x, y in zip(up, um)]
            s[0] = mpmath.mpc(0)
            x = _ps_mul(s, s, n)
            logs = []
            for (a, b, c) in self._inv_params:
                f = _ps_compose_poly(_hyp_coeffs(a, b, c, n), x, n)
                f_minus_1 = [mpmath.mpc(0)] + f[1:]
                logs.append(_ps_log1p(f_minus_1, n))
            expo = [(p - q) / (2j * self._t) for p, q in zip(*logs)]
            ex = _ps_exp(expo, n)
            g = _ps_mul([v * self.X_mp / 2 for v in s], ex, n)
            inv = _ps_revert(g, n)
            inv[0] = mpmath.mpc(1)
            return [+v for v in inv]

    @cached_property
    def phi0_coefficients(self) -> np.ndarray:
        return np.array([complex(v) for v in self.phi0_coefficients_mp])

    def phi0_series(self, z, derivative: int = 0):
        """Truncated series of phi0 (or its first/second derivative); vectorised."""
        coeffs = self.phi0_coefficients
        for _ in range(derivative):
            coeffs = coeffs[1:] * np.arange(1, len(coeffs))
        return np.polynomial.polynomial.polyval(np.asarray(z, dtype=complex), coeffs)

    def series_radius_estimate(self) -> float:
        """Root-test estimate of the radius of convergence of the phi0 series."""
        c = np.abs(self.phi0_coefficients[1:])
        k = np.arange(1, len(c) + 1)
        tail = slice(len(c) // 2, None)
        return float(1.0 / np.max(c[tail] ** (1.0 / k[tail])))

    # ---- phi0 by inversion of the closed form -------------------------

    def phi0(self, z, seed=None):
        """phi0(z), solving phi0^{-1}(u) = z by Newton's method."""
        return self.phi0_with_derivatives(z, seed=seed)[0]

    def phi0_with_derivatives(self, z, seed=None, branch=None):
        """(phi0, phi0', phi0'') at z, as mpc values."""
        return self._phi0_jet(z, seed, branch)[:3]

    def _phi0_jet(self, z, seed=None, branch=None):
        with mpmath.workdps(self.dps):
            z = mpmath.mpc(z)
            u = mpmath.mpc(seed) if seed is not None else mpmath.mpc(complex(self.phi0_series(complex(z))))
            if branch is None:
                branch = self.continued_log_ratio(u)
            tol = mpmath.mpf(10) ** (-(self.dps - 4))
            for _ in range(60):
                g, g1, g2, branch = self._inverse_jet(u, branch)
                step = (g - z) / g1
                # damp steps that would jump across the patch
                if abs(step) > 0.25:
                    step *= 0.25 / abs(step)
                u -= step
                if abs(step) < tol:
                    break
            else:
                raise GeometryError(f"phi0 Newton iteration did not converge at z={complex(z)}, t={self.t}")
            return u, 1 / g1, -g2 / g1 ** 3, branch

    # ---- uniformiser E --------------------------------------------------

    def _base_wedge(self, z):
        arg = mpmath.arg(z)
        n = int(mpmath.nint(arg / (2 * mpmath.pi / 3)))
        rot = mpmath.expjpi(mpmath.mpf(2 * n) / 3)
        return n, rot

    def uniformizer(self, z):
        """E(z) for z in the disc outside the three coordinate patches."""
        return self.uniformizer_with_derivatives(z)[0]

    def uniformizer_with_derivatives(self, z):
        """(E, E', E'') at z as mpc values, using the wedge covariance for other wedges."""
        with mpmath.workdps(self.dps):
            z = mpmath.mpc(z)
            if abs(z) > 1 + 1e-12:
                raise GeometryError("E is only defined on the closed unit disc")
            if z == 0:
                lead = -1j * mpmath.cbrt(4) * self.scale
                return mpmath.mpc(0), lead, mpmath.mpc(0)
            on_circle = abs(abs(z) - 1) < 1e-12
            if on_circle:
                z = z / abs(z)
            n, rot = self._base_wedge(z)
            z0 = z / rot
            e, e1, e2 = self._uniformizer_base(z0, on_circle)
            return rot * e, e1, e2 / rot

    def _uniformizer_base(self, z, on_circle=False):
        z12 = mpmath.sqrt(z)
        z32 = z * z12
        diff = 1 / z32 - z32
        big_d = diff / 2
        d1 = -mpmath.mpf(3) / 4 * (1 / (z32 * z) + z12)
        d2 = -mpmath.mpf(3) / 4 * (-mpmath.mpf(5) / 2 / (z32 * z * z) + 1 / (2 * z12))
        w = -1 / big_d ** 2
        w1 = 2 * d1 / big_d ** 3
        w2 = 2 * (d2 / big_d ** 3 - 3 * d1 ** 2 / big_d ** 4)
        if on_circle and mpmath.re(w) >= 1:
            # on the unit circle w sits on the branch cut; take the limit from inside the disc
            side = -1 if mpmath.im(z) > 0 else 1
            w = mpmath.mpc(mpmath.re(w), side * mpmath.mpf(10) ** (-(self.dps - 3)))
        psi = []
        dpsi = []
        logs = []
        for (a, b, c) in self._e_params:
            f = mpmath.hyp2f1(a, b, c, w)
            fp = a * b / c * mpmath.hyp2f1(a + 1, b + 1, c + 1, w)
            fpp = (a * b * f - (c - (a + b + 1) * w) * fp) / (w * (1 - w))
            logs.append(f)
            psi.append(fp / f)
            dpsi.append(fpp / f - (fp / f) ** 2)
        value = self.scale * (-1j) * mpmath.power(big_d, -mpmath.mpf(2) / 3) * logs[0] / logs[1]
        h = -mpmath.mpf(2) / 3 * d1 / big_d + (psi[0] - psi[1]) * w1
        dh = (-mpmath.mpf(2) / 3 * (d2 / big_d - (d1 / big_d) ** 2)
              + (dpsi[0] - dpsi[1]) * w1 ** 2 + (psi[0] - psi[1]) * w2)
        first = value * h
        second = first * (h + dh / h)
        return value, first, second

    # ---- cut curve --------------------------------------------------------

    def cut_endpoint_angle(self) -> float:
        """Angle theta_e with phi0(1) = exp(i theta_e)."""
        u = self.phi0(1.0)
        return float(mpmath.arg(u))

    def cut_point(self, theta, seed=None, branch=None):
        """phi0(e^{i theta}) together with phi0' and phi0'' there."""
        with mpmath.workdps(self.dps):
            return self.phi0_with_derivatives(mpmath.expj(theta), seed=seed, branch=branch)

    def cut_jets(self, thetas, max_step: float = 0.05):
        """phi0 with two derivatives along the unit circle.

        Predictor-corrector continuation in the circle angle, starting at
        theta = 0 and never stepping more than ``max_step`` radians, so that
        the Newton seed and the logarithm branch are carried along reliably.
        """
        out = []
        with mpmath.workdps(self.dps):
            here = 0.0
            u, d1, d2, branch = self._phi0_jet(mpmath.mpf(1))
            for j, th in enumerate(thetas):
                n_sub = max(1, int(math.ceil(abs(th - here) / max_step)))
                try:
                    for k in range(1, n_sub + 1):
                        nxt = here + (th - here) * k / n_sub
                        prev = mpmath.expj(here + (th - here) * (k - 1) / n_sub)
                        target = mpmath.expj(nxt)
                        guess = u + d1 * (target - prev)
                        u, d1, d2, branch = self._phi0_jet(target, guess, branch)
                except GeometryError as exc:
                    raise GeometryError(f"cut tracing failed at j={j}, t={self.t}: {exc}") from exc
                here = th
                out.append((u, d1, d2))
        return out

    def trace_cut_curve(self, n_points: int = DEFAULT_CURVE_POINTS) -> CutCurve:
        """Sample b = phi0(upper unit semicircle) at N+1 points.

        Points are equally spaced in the semicircle angle, ordered from
        phi0(1) down to phi0(-1) reversed so that the region C lies on the left.
        """
        if n_points < 64:
            raise GeometryError("need at least 64 curve segments")
        thetas = np.linspace(0.0, math.pi, n_points + 1)
        pts = np.array([complex(u) for u, _, _ in self.cut_jets(thetas)])
        # phi0(1) is the upper endpoint; walking from phi0(-1) to phi0(1) keeps C on the left
        pts = pts[::-1]
        thetas = thetas[::-1]
        tang, normal, curv = discrete_frame(pts)
        return CutCurve(points=pts, tangents=tang, normals=normal, curvature=curv, theta=thetas)


def geometry_of_t(t: float, series_order: int = DEFAULT_SERIES_ORDER, **kwargs) -> TriangleGeometry:
    """Build the geometry and warn when the phi0 series cannot reach the unit semicircle."""
    geom = TriangleGeometry(t, series_order=series_order, **kwargs)
    radius = geom.series_radius_estimate()
    if radius < 1.05:
        warnings.warn(f"phi0 series radius {radius:.3f} at t={t} barely covers the unit half disc; "
                      "series-based quadrature will be inaccurate", RuntimeWarning, stacklevel=2)
    return geom


def uniformizer_E(geom: TriangleGeometry, z) -> complex:
    return complex(geom.uniformizer(z))


def trace_cut_curve(geom: TriangleGeometry, n_points: int = DEFAULT_CURVE_POINTS) -> CutCurve:
    return geom.trace_cut_curve(n_points)


def write_cut_csv(path, curves: Sequence[Tuple[float, CutCurve]]) -> None:
    """Write rows (t, j, x_j, y_j, k_j) for each traced curve."""
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["t", "j", "x", "y", "k"])
        for t, curve in curves:
            for j, (z, k) in enumerate(zip(curve.points, curve.curvature)):
                out.writerow([repr(float(t)), j, repr(float(z.real)), repr(float(z.imag)), repr(float(k))])
