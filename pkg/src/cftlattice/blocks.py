"""Disc amplitudes with boundary insertions and the clipped-triangle vertex.

The descendant part of a triangle amplitude is a chiral three-point block on
the plane with insertions at 1, w, w^2 (w = exp(2 pi i/3)) and local
coordinates sigma_s(z) = e^{2 pi i s}(1 + i z).  It is reduced to the
primaries with a three-term recursion and is fixed by B(|i>,|j>,|k>) = 1.
"""
from __future__ import annotations

import cmath
import csv
import math
import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .minimal_model import KacLabel, MinimalModel
from .uniformization import TriangleGeometry
from .virasoro import TruncatedModule, build_module, gamma_operator

ZETA = cmath.exp(2j * math.pi / 3)
IMAG_TOLERANCE = 1e-8


class FusionClosureError(ValueError):
    """The symmetry set is not closed under fusion."""


def generalized_binomial(top: int, k: int) -> float:
    out = 1.0
    for n in range(k):
        out *= (top - n) / (n + 1)
    return out


# ---- disc amplitudes of primaries ----------------------------------------------


def _f(model, b, k, c, a, j, i):
    """F_{bk}[c a; j i] in the ordering used by the triangle constants."""
    return model.f_symbol(b, k, c, a, j, i)


def disc_amplitude(model: MinimalModel, a) -> float:
    """Empty unit disc with boundary condition a: S_{a1}/sqrt(S_11)."""
    one = model.identity
    return model.s_matrix(a, one) / math.sqrt(model.s_matrix(one, one))


def disc_2pt(model: MinimalModel, a, b, i, angle: float) -> float:
    """Two boundary primaries i at exp(i angle) and 1 on the unit disc."""
    if not 0 < angle < 2 * math.pi:
        raise ValueError("the angle must lie in (0, 2 pi)")
    if not model.fusion(i, a, b):
        return 0.0
    h = float(model.weight(i))
    return disc_amplitude(model, a) * _f(model, b, model.identity, a, a, i, i) * math.sin(angle / 2) ** (-2 * h)


def pairing_constant(model: MinimalModel, a, b, i) -> float:
    """(psi_i^{(ab)}, psi_i^{(ba)})_{ab}."""
    return disc_2pt(model, a, b, i, math.pi)


def admissible_triangle(model: MinimalModel, a, b, c, i, j, k) -> bool:
    """i in H_ba, j in H_cb, k in H_ac, and N_ij^k != 0."""
    return bool(model.fusion(i, a, b) and model.fusion(j, b, c) and model.fusion(k, c, a)
                and model.fusion(i, j, k))


def disc_3pt_primary(model: MinimalModel, a, b, c, i, j, k) -> float:
    """Primaries at 1, w, w^2 with coordinates rho rotated to each point."""
    if not admissible_triangle(model, a, b, c, i, j, k):
        return 0.0
    hsum = float(model.weight(i) + model.weight(j) + model.weight(k))
    return (_f(model, b, k, c, a, j, i) * _f(model, c, model.identity, a, a, k, k)
            * disc_amplitude(model, a) * (math.sqrt(3) / 2) ** (-hsum))


def triangle_constant(model: MinimalModel, a, b, c, i, j, k) -> float:
    """The constant N^{abc}_{ijk} multiplying the block in the triangle amplitude."""
    if not admissible_triangle(model, a, b, c, i, j, k):
        return 0.0
    one = model.identity
    hsum = float(model.weight(i) + model.weight(j) + model.weight(k))
    s11 = model.s_matrix(one, one)
    ratio = _f(model, c, one, a, a, k, k) / (_f(model, a, one, b, b, i, i) * _f(model, b, one, c, c, j, j))
    return (model.quantum_dim(a) / (s11 ** 0.25 * 3 ** (hsum / 2))
            * math.sqrt(ratio) * _f(model, b, k, c, a, j, i))


# ---- three-point block -----------------------------------------------------------


def _leg_operators(module: TruncatedModule, sign: int) -> Dict[int, np.ndarray]:
    """A_+ (sign=+1) or A_- (sign=-1) for m = 1..max_level as matrices on the truncation."""
    out = {}
    weights = float(module.h) + module.level_diagonal()
    rot = ZETA if sign < 0 else ZETA.conjugate()
    for m in range(1, module.max_level + 1):
        coeffs = {}
        for k in range(1, module.max_level + 1):
            c = generalized_binomial(1 - m, k - 1) * 3 ** (-k / 2) * rot ** k * ((2 - m - k) / k - rot)
            if sign > 0:
                c *= (-1) ** k
            coeffs[k] = c
        mat = module.operator_matrix(coeffs) + np.diag(weights)
        if sign > 0:
            pref = -((-1) ** m) * 3 ** (-m / 2) * ZETA ** (m - 1)
        else:
            pref = -(3 ** (-m / 2)) * ZETA.conjugate() ** (m - 1)
        out[m] = pref * mat
    return out


class _LegData:
    def __init__(self, module: TruncatedModule):
        self.module = module
        self.off = module.offsets()
        self.n = module.total_dim
        self.levels = module.level_diagonal().astype(int)
        self.plus = _leg_operators(module, +1)
        self.minus = _leg_operators(module, -1)
        # for each basis word L_{-m} rest: m, the quotient vector of rest, and A_0 rest
        self.split = []
        for level in range(module.max_level + 1):
            for word in module.basis[level]:
                if not word:
                    self.split.append(None)
                    continue
                m, rest = word[0], word[1:]
                low = level - m
                rest_vec = np.zeros(self.n, complex)
                rest_vec[self.off[low]:self.off[low + 1]] = module.word_state(rest).vector
                a0 = np.zeros(self.n, complex)
                piece = rest_vec[self.off[low]:self.off[low + 1]]
                a0[self.off[level - 1]:self.off[level]] += -1j * (module.mode_matrix(1 - m, low) @ piece)
                if level - 2 >= 0:
                    a0[self.off[level - 2]:self.off[level - 1]] += (module.mode_matrix(2 - m, low) @ piece) / 3
                self.split.append((m, rest_vec, a0))


class ThreePointBlock:
    """B(u, v, w) on three truncated modules, for all basis triples at once.

    Only fusion-admissible triples give a block on the quotient modules; for
    others the reductions through different legs disagree once a null level
    is reached.
    """

    def __init__(self, first: TruncatedModule, second: TruncatedModule, third: TruncatedModule):
        self.legs = [_LegData(first), _LegData(second), _LegData(third)]
        shapes = [(self.legs[r % 3].n, self.legs[(r + 1) % 3].n, self.legs[(r + 2) % 3].n) for r in range(3)]
        self.rotated = [np.zeros(s, complex) for s in shapes]
        self._fill()

    def _fill(self):
        legs = self.legs
        by_total: Dict[int, List[Tuple[int, int, int]]] = {}
        n0, n1, n2 = (leg.n for leg in legs)
        for x in range(n0):
            for y in range(n1):
                for z in range(n2):
                    tot = legs[0].levels[x] + legs[1].levels[y] + legs[2].levels[z]
                    by_total.setdefault(tot, []).append((x, y, z))
        for tot in sorted(by_total):
            pending = []
            for x, y, z in by_total[tot]:
                idx = (x, y, z)
                for r in range(3):
                    # indices in rotation r: (leg r, leg r+1, leg r+2)
                    rx, ry, rz = idx[r % 3], idx[(r + 1) % 3], idx[(r + 2) % 3]
                    first = legs[r % 3]
                    if first.levels[rx] > 0:
                        self.rotated[r][rx, ry, rz] = self._reduce(r, rx, ry, rz)
                    else:
                        pending.append((r, rx, ry, rz))
            for r, rx, ry, rz in pending:
                self.rotated[r][rx, ry, rz] = self._from_rotation(r, rx, ry, rz)

    def _from_rotation(self, r, x, y, z):
        legs = [self.legs[(r + s) % 3] for s in range(3)]
        if legs[0].levels[x] == 0 and legs[1].levels[y] == 0 and legs[2].levels[z] == 0:
            return 1.0
        if legs[1].levels[y] > 0:
            return self.rotated[(r + 1) % 3][y, z, x]
        return self.rotated[(r + 2) % 3][z, x, y]

    def _reduce(self, r, x, y, z):
        table = self.rotated[r]
        first = self.legs[r % 3]
        second = self.legs[(r + 1) % 3]
        third = self.legs[(r + 2) % 3]
        m, rest, a0 = first.split[x]
        val = a0 @ table[:, y, z]
        val += rest @ (table[:, :, z] @ second.plus[m][:, y])
        val += rest @ (table[:, y, :] @ third.minus[m][:, z])
        return val

    @property
    def tensor(self) -> np.ndarray:
        return self.rotated[0]

    def __call__(self, u, v, w) -> complex:
        return complex(np.einsum("abc,a,b,c->", self.tensor, u, v, w))


_BLOCK_CACHE: Dict[tuple, ThreePointBlock] = {}


def _module_key(module: TruncatedModule):
    return (module.model.p, module.model.q, tuple(module.label), module.max_level)


def three_point_block(first, second, third) -> ThreePointBlock:
    """Memoised block on (weights, central charge, truncation)."""
    key = tuple(_module_key(m) for m in (first, second, third))
    if key not in _BLOCK_CACHE:
        _BLOCK_CACHE[key] = ThreePointBlock(first, second, third)
    return _BLOCK_CACHE[key]


def triangle_gamma_series(geom: TriangleGeometry, order: int) -> np.ndarray:
    """Taylor coefficients of G(z) = -i(phi_0(z) - 1), so that phi_0 = sigma_0 o G."""
    coeffs = np.array(geom.phi0_coefficients, complex)
    if len(coeffs) < order + 1:
        raise ValueError(f"geometry carries {len(coeffs) - 1} series coefficients, need {order}")
    series = -1j * coeffs[:order + 1]
    series[0] = 0
    return series


def block_B(model: MinimalModel, geom: TriangleGeometry, states, max_level: Optional[int] = None) -> complex:
    """B(Gamma u, Gamma v, Gamma w) for ((label, vector), ...) with vectors on the full truncation."""
    labels = [lab for lab, _ in states]
    vecs = [np.asarray(v) for _, v in states]
    if max_level is None:
        max_level = max(_level_for_size(model, lab, len(v)) for lab, v in states)
    mods = [build_module(model, lab, max_level) for lab in labels]
    gam = [gamma_operator(triangle_gamma_series(geom, max_level + 1), m).matrix for m in mods]
    block = three_point_block(*mods)
    return block(gam[0] @ vecs[0], gam[1] @ vecs[1], gam[2] @ vecs[2])


def _level_for_size(model, label, size):
    level = 0
    while build_module(model, label, level).total_dim < size:
        level += 1
    if build_module(model, label, level).total_dim != size:
        raise ValueError("state length does not match any truncation")
    return level


# ---- triangle amplitudes -----------------------------------------------------------


def _gamma_on_basis(module: TruncatedModule, geom: TriangleGeometry) -> np.ndarray:
    """Columns are Gamma |i alpha> for the ON basis of the truncation."""
    gam = gamma_operator(triangle_gamma_series(geom, module.max_level + 1), module).matrix
    off = module.offsets()
    on = np.zeros((module.total_dim, module.total_dim), complex)
    for level in range(module.max_level + 1):
        on[off[level]:off[level + 1], off[level]:off[level + 1]] = module.on_basis(level)
    return gam @ on


def _odd_leg_phase(mods) -> np.ndarray:
    """i^{number of odd-level legs} for every entry of a triangle tensor."""
    parity = [m.level_diagonal().astype(int) % 2 for m in mods]
    count = parity[0][:, None, None] + parity[1][None, :, None] + parity[2][None, None, :]
    return 1j ** count


def _check_real(values, mods, what):
    """Warn when an entry is not real up to the ON-basis phase i^{odd legs}.

    ON vectors of the twisted pairing at odd levels are imaginary multiples of
    real vectors, so entries with an odd number of odd-level legs are imaginary.
    """
    values = np.asarray(values)
    if not values.size:
        return values
    stripped = values / _odd_leg_phase(mods)
    scale = max(1.0, float(np.max(np.abs(values))))
    if np.max(np.abs(stripped.imag)) > IMAG_TOLERANCE * scale:
        warnings.warn(f"{what} has a non-real residue of {np.max(np.abs(stripped.imag)):.2e}", RuntimeWarning)
    return values


def triangle_block_tensor(model: MinimalModel, i, j, k, geom: TriangleGeometry, max_level: int) -> np.ndarray:
    """B(Gamma|i a>, Gamma|j b>, Gamma|k c>) over ON bases up to max_level."""
    mods = [build_module(model, lab, max_level) for lab in (i, j, k)]
    cols = [_gamma_on_basis(m, geom) for m in mods]
    block = three_point_block(*mods).tensor
    return np.einsum("abc,ax,by,cz->xyz", block, *cols)


def triangle_amplitude(model: MinimalModel, a, b, c, i, j, k, geom: TriangleGeometry,
                       max_level: int = 7, with_anomaly: bool = True, anomaly: Optional[float] = None,
                       states: Optional[Tuple[int, int, int]] = None):
    """T^{abc}_{d,R} on ON states; the whole tensor unless ``states`` picks one entry.

    Entries are complex because of the ON-basis phases; contractions over
    matching states are real.

    ``anomaly`` is the constant A; when omitted it is computed for the
    geometry's t (edge length 1).
    """
    const = triangle_constant(model, a, b, c, i, j, k)
    if const == 0.0:
        return 0.0 if states is not None else None
    pref = const / math.sqrt(model.quantum_dim(a) * model.quantum_dim(b) * model.quantum_dim(c))
    if with_anomaly:
        if anomaly is None:
            from .anomaly import triangle_anomaly_A
            anomaly = triangle_anomaly_A(geom.t, float(model.central_charge))
        pref *= math.exp(anomaly)
    mods = [build_module(model, lab, max_level) for lab in (i, j, k)]
    values = _check_real(pref * triangle_block_tensor(model, i, j, k, geom, max_level), mods,
                         "triangle amplitude")
    return values if states is None else complex(values[states])


def check_fusion_closed(model: MinimalModel, symmetry: Sequence) -> List[KacLabel]:
    labels = [model.canonical(*x) for x in symmetry]
    members = set(labels)
    for x in labels:
        for y in labels:
            for z in model.fusion_products(x, y):
                if z not in members:
                    raise FusionClosureError(f"{x} x {y} contains {z}, which is outside the set")
    return labels


@dataclass
class TriangleAmplitudeTable:
    """Cloaking-boundary vertex weights, keyed by boundary and field labels."""

    model: MinimalModel
    symmetry: List[KacLabel]
    delta0: float
    max_level: int
    t: float
    edge: float
    anomaly: float
    entries: Dict[tuple, np.ndarray] = field(default_factory=dict)

    def get(self, a, b, c, i, j, k) -> Optional[np.ndarray]:
        return self.entries.get((a, b, c, i, j, k))

    def cyclic_residual(self) -> float:
        worst = 0.0
        for (a, b, c, i, j, k), val in self.entries.items():
            other = self.entries.get((b, c, a, j, k, i))
            if other is None:
                return math.inf
            worst = max(worst, float(np.max(np.abs(np.transpose(val, (1, 2, 0)) - other))))
        return worst

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["p", "q", "symmetry", "max_level", "t", "d", "delta0", "anomaly"])
            out.writerow([self.model.p, self.model.q, " ".join(str(x) for x in self.symmetry),
                          self.max_level, repr(self.t), repr(self.edge), repr(self.delta0), repr(self.anomaly)])
            out.writerow(["a", "b", "c", "i", "j", "k", "alpha", "beta", "gamma", "value"])
            for key, val in sorted(self.entries.items()):
                for idx in np.ndindex(val.shape):
                    out.writerow([str(x) for x in key] + list(idx) + [repr(complex(val[idx]))])


def cloaking_triangle_table(model: MinimalModel, symmetry: Sequence, delta0: float, max_level: int,
                            geom: TriangleGeometry, with_anomaly: bool = True,
                            anomaly: Optional[float] = None) -> TriangleAmplitudeTable:
    """Vertex weights for the cloaking boundary built from ``symmetry``."""
    labels = check_fusion_closed(model, symmetry)
    if with_anomaly and anomaly is None:
        from .anomaly import triangle_anomaly_A
        anomaly = triangle_anomaly_A(geom.t, float(model.central_charge))
    amp = anomaly if with_anomaly else 0.0
    table = TriangleAmplitudeTable(model, labels, delta0, max_level, geom.t, geom.edge, amp)
    for a in labels:
        for b in labels:
            for c in labels:
                for i in labels:
                    for j in labels:
                        for k in labels:
                            const = triangle_constant(model, a, b, c, i, j, k)
                            if const == 0.0:
                                continue
                            dims = model.quantum_dim(a) * model.quantum_dim(b) * model.quantum_dim(c)
                            pref = math.exp(amp) * math.sqrt(delta0) * const / dims ** (1 / 3)
                            vals = triangle_block_tensor(model, i, j, k, geom, max_level)
                            mods = [build_module(model, lab, max_level) for lab in (i, j, k)]
                            table.entries[(a, b, c, i, j, k)] = _check_real(pref * vals, mods, "vertex weight")
    return table
