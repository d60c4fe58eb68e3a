"""Cloaking boundary states and the one-hole torus in the open and closed channel."""
from __future__ import annotations

import cmath
import csv
import json
import math
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .blocks import check_fusion_closed, triangle_amplitude
from .minimal_model import KacLabel, MinimalModel
from .uniformization import TriangleGeometry, t_of_ratio
from .virasoro import build_module, gamma_operator, graded_character

HEX_TAU = cmath.exp(1j * math.pi / 3)
ALT_TAU = cmath.exp(1j * math.pi / 6)
DEFAULT_WEIGHT_CUTOFF = 14
DEFAULT_OPEN_LEVEL = 7
DEFAULT_TRACE_LEVEL = 7


class ChannelError(ValueError):
    """Request outside what a channel computation supports."""


# ---- symmetry sets ------------------------------------------------------------------


def symmetry_set(model: MinimalModel, name: str) -> List[KacLabel]:
    """Named fusion-closed label sets: 'I' (all), 'R' (first Kac row), 'Z' (Z2 pair)."""
    if name == "I":
        return list(model.labels)
    if name == "R":
        return sorted({model.canonical(1, s) for s in range(1, model.q)})
    if name == "Z":
        return [model.canonical(1, 1), model.canonical(1, model.q - 1)]
    raise ChannelError(f"unknown symmetry set {name!r}")


def category_dimension(model: MinimalModel, symmetry: Sequence) -> float:
    """Dim(J) = sum of squared quantum dimensions."""
    return sum(model.quantum_dim(j) ** 2 for j in symmetry)


def lemma_sums(model: MinimalModel, symmetry: Sequence) -> Dict[KacLabel, float]:
    """sum_j dim(j) S_xj / S_x1 for every x."""
    one = model.identity
    return {x: sum(model.quantum_dim(j) * model.s_matrix(x, j) / model.s_matrix(x, one) for j in symmetry)
            for x in model.labels}


def tilde_set(model: MinimalModel, symmetry: Sequence, tol: float = 1e-10) -> List[KacLabel]:
    """Rows x whose normalised S-matrix entries agree with the identity row on the set."""
    labels = check_fusion_closed(model, symmetry)
    one = model.identity
    out = []
    for x in model.labels:
        if all(abs(model.s_matrix(x, j) / model.s_matrix(x, one)
                   - model.s_matrix(one, j) / model.s_matrix(one, one)) < tol for j in labels):
            out.append(x)
    return out


@dataclass
class StabilityVerdict:
    satisfied: bool
    offenders: List[Tuple[KacLabel, float]]

    def __str__(self):
        if self.satisfied:
            return "satisfied"
        return "violated by " + ", ".join(f"{x} (h={h:.4g})" for x, h in self.offenders)


def stability_check(model: MinimalModel, symmetry: Sequence) -> StabilityVerdict:
    """Every non-vacuum bulk sector in the cloaking boundary state must be irrelevant."""
    if model.q != model.p + 1 and model.p != model.q + 1:
        raise ChannelError("the stability criterion is stated for unitary models M(p, p+1)")
    offenders = []
    # the vacuum sector has no weight-one descendant, so only primaries can violate
    if build_module(model, model.identity, 1).dim(1) != 0:
        offenders.append((model.identity, 1.0))
    for x in tilde_set(model, symmetry):
        if x == model.identity:
            continue
        h = float(model.weight(x))
        if h <= 1:
            offenders.append((x, h))
    return StabilityVerdict(not offenders, offenders)


@dataclass
class CloakingBoundaryState:
    """delta_0 sum_j dim(j) ||j>> expanded in Ishibashi states of the surviving sectors."""

    model: MinimalModel
    symmetry: List[KacLabel]
    delta0: float
    sectors: List[KacLabel]
    coefficients: Dict[KacLabel, float]

    def projector_eigenvalue(self, x) -> float:
        """Eigenvalue of delta_0 sum_j dim(j) D_j on the Ishibashi state of x."""
        one = self.model.identity
        return self.delta0 * sum(self.model.quantum_dim(j) * self.model.s_matrix(j, x) / self.model.s_matrix(one, x)
                                 for j in self.symmetry)


def cloaking_boundary_state(model: MinimalModel, symmetry: Sequence,
                            delta0: Optional[float] = None) -> CloakingBoundaryState:
    labels = check_fusion_closed(model, symmetry)
    one = model.identity
    if delta0 is None:
        delta0 = model.s_matrix(one, one) ** 1.5
    sectors = tilde_set(model, labels)
    dim = category_dimension(model, labels)
    coeffs = {x: delta0 * dim * math.sqrt(model.s_matrix(x, one)) for x in sectors}
    return CloakingBoundaryState(model, labels, delta0, sectors, coeffs)


def elementary_boundary_coefficients(model: MinimalModel, a) -> Dict[KacLabel, float]:
    one = model.identity
    return {b: model.s_matrix(a, b) / math.sqrt(model.s_matrix(b, one)) for b in model.labels}


# ---- torus one-point functions of vacuum descendants --------------------------------


class TorusTraces:
    """Chiral torus one-point blocks Tr_{R_i} o(Gamma v) q^{L_0 - c/24} for v in the vacuum module.

    Zero modes of vacuum descendants are built from the associativity formula
    for (L_{-n} b)_{(k)}; Gamma moves the insertion from the flat torus
    coordinate (periods 1 and tau) to the plane.
    """

    def __init__(self, model: MinimalModel, vacuum_level: int = DEFAULT_WEIGHT_CUTOFF,
                 trace_level: int = DEFAULT_TRACE_LEVEL):
        self.model = model
        self.vacuum_level = vacuum_level
        self.trace_level = trace_level
        self.vacuum = build_module(model, model.identity, vacuum_level)
        depth = vacuum_level // 2
        module_level = trace_level + depth
        self.modules = {lab: build_module(model, lab, module_level, bound=max(module_level, DEFAULT_WEIGHT_CUTOFF))
                        for lab in model.labels}
        series = [0.0] + [(2j * math.pi) ** k / math.factorial(k) for k in range(1, vacuum_level + 2)]
        self.gamma = gamma_operator(series, self.vacuum).matrix
        self._modes: Dict[tuple, Optional[np.ndarray]] = {}
        self._zero: Dict[tuple, np.ndarray] = {}

    def _mode(self, lab, word, k, level):
        """Matrix of b_{(k)} from ``level`` of R_lab, b the vacuum word; None if it leaves the range."""
        key = (lab, word, k, level)
        if key in self._modes:
            return self._modes[key]
        module = self.modules[lab]
        weight = sum(word)
        target = level + weight - k - 1
        if target < 0 or target > module.max_level:
            self._modes[key] = None
            return None
        if not word:
            out = np.eye(module.dim(level)) if k == -1 else None
            self._modes[key] = out
            return out
        n, rest = word[0], word[1:]
        j = 1 - n
        wrest = sum(rest)
        out = np.zeros((module.dim(target), module.dim(level)))
        binom = 1.0
        l = 0
        while True:
            mid1 = level + wrest - (k + l) - 1
            mid2 = level - l + 1
            if mid1 < 0 and mid2 < 0:
                break
            if mid1 >= 0:
                inner = self._mode(lab, rest, k + l, level)
                if inner is not None and inner.size:
                    out += (-1) ** l * binom * (module.mode_matrix(j - l - 1, mid1) @ inner)
            if 0 <= mid2 <= module.max_level:
                inner = self._mode(lab, rest, j + k - l, mid2)
                if inner is not None and inner.size and module.dim(mid2):
                    out -= (-1) ** l * binom * (-1) ** j * (inner @ module.mode_matrix(l - 1, level))
            binom *= (j - l) / (l + 1)
            l += 1
        self._modes[key] = out
        return out

    def zero_mode_traces(self, lab, word) -> np.ndarray:
        """tr o(word) on each level 0..trace_level of R_lab."""
        key = (lab, word)
        if key not in self._zero:
            weight = sum(word)
            traces = np.zeros(self.trace_level + 1)
            for level in range(self.trace_level + 1):
                mat = self._mode(lab, word, weight - 1, level)
                traces[level] = 0.0 if mat is None or not mat.size else float(np.trace(mat))
            self._zero[key] = traces
        return self._zero[key]

    def plane_trace(self, lab, vector, tau: complex) -> complex:
        """Tr o(v) q^{L_0 - c/24} for a vacuum vector in quotient coordinates (no coordinate change)."""
        lab = self.model.canonical(*lab)
        h = float(self.model.weight(lab))
        c = float(self.model.central_charge)
        nome = cmath.exp(2j * math.pi * tau)
        if abs(nome) >= 1:
            raise ChannelError("tau must lie in the upper half plane")
        lead = cmath.exp(2j * math.pi * tau * (h - c / 24))
        powers = nome ** np.arange(self.trace_level + 1)
        total = 0j
        off = self.vacuum.offsets()
        for level in range(self.vacuum_level + 1):
            for idx, word in enumerate(self.vacuum.basis[level]):
                coef = vector[off[level] + idx]
                if coef == 0:
                    continue
                total += coef * (self.zero_mode_traces(lab, word) @ powers)
        return lead * total

    def chiral_one_point(self, lab, vector, tau: complex) -> complex:
        """One-point block of the vacuum vector inserted with the flat torus coordinate."""
        return self.plane_trace(lab, self.gamma @ np.asarray(vector, complex), tau)

    def level_vector(self, level: int, index: int) -> np.ndarray:
        vec = np.zeros(self.vacuum.total_dim)
        vec[self.vacuum.offsets()[level] + index] = 1.0
        return vec

    def word_vector(self, word) -> np.ndarray:
        level = sum(word)
        vec = np.zeros(self.vacuum.total_dim)
        off = self.vacuum.offsets()
        vec[off[level]:off[level + 1]] = self.vacuum.word_state(word).vector
        return vec


@lru_cache(maxsize=None)
def torus_traces(model: MinimalModel, vacuum_level: int = DEFAULT_WEIGHT_CUTOFF,
                 trace_level: int = DEFAULT_TRACE_LEVEL) -> TorusTraces:
    return TorusTraces(model, vacuum_level, trace_level)


def torus_one_point(model: MinimalModel, word: Sequence[int], tau: complex = HEX_TAU,
                    level_cutoff: int = DEFAULT_WEIGHT_CUTOFF, trace_level: int = DEFAULT_TRACE_LEVEL) -> complex:
    """Amplitude of (w (x) w-bar)(0) on the torus with periods 1 and tau, w = L_{-n1}...|0>."""
    level = sum(word)
    if level > level_cutoff:
        raise ChannelError(f"word of level {level} above the cutoff {level_cutoff}")
    traces = torus_traces(model, level_cutoff, trace_level)
    vec = traces.word_vector(tuple(word))
    total = 0j
    for lab in model.labels:
        block = traces.chiral_one_point(lab, vec, tau)
        total += block * block.conjugate()
    return total


def torus_partition_function(model: MinimalModel, tau: complex = HEX_TAU,
                             level_cutoff: int = DEFAULT_WEIGHT_CUTOFF) -> float:
    nome = cmath.exp(2j * math.pi * tau)
    total = 0.0
    for lab in model.labels:
        mod = build_module(model, lab, level_cutoff)
        total += abs(graded_character(mod, nome)) ** 2
    return total


@dataclass
class ClosedChannelSeries:
    """sum_N R^{2N} c_N: the Ishibashi sum of the vacuum sector per level."""

    model: MinimalModel
    tau: complex
    coefficients: np.ndarray
    prefactor: float

    def raw(self, radius: float) -> float:
        powers = radius ** (2 * np.arange(len(self.coefficients)))
        return float(self.prefactor * np.real(self.coefficients @ powers))

    def with_anomaly(self, radius: float) -> float:
        return radius ** (-float(self.model.central_charge) / 6) * self.raw(radius)


def closed_channel_series(model: MinimalModel, tau: complex = HEX_TAU, weight_cutoff: int = DEFAULT_WEIGHT_CUTOFF,
                          trace_level: int = DEFAULT_TRACE_LEVEL, symmetry: Optional[Sequence] = None,
                          delta0: Optional[float] = None) -> ClosedChannelSeries:
    """Per-level torus one-point sums over an ON basis of the vacuum module."""
    symmetry = list(model.labels) if symmetry is None else symmetry
    state = cloaking_boundary_state(model, symmetry, delta0)
    if state.sectors != [model.identity]:
        raise ChannelError("only cloaking sets whose boundary state is purely vacuum are supported")
    traces = torus_traces(model, weight_cutoff, trace_level)
    vac = traces.vacuum
    coeffs = np.zeros(weight_cutoff + 1, complex)
    off = vac.offsets()
    for level in range(weight_cutoff + 1):
        if not vac.dim(level):
            continue
        inverse = vac.copairing(level)
        blocks = []
        for lab in model.labels:
            row = []
            for idx in range(vac.dim(level)):
                row.append(traces.chiral_one_point(lab, traces.level_vector(level, idx), tau))
            blocks.append(np.array(row))
        coeffs[level] = sum(b @ inverse @ b.conj() for b in blocks)
    return ClosedChannelSeries(model, tau, coeffs, state.coefficients[model.identity])


def one_hole_closed(model: MinimalModel, radius: float, tau: complex = HEX_TAU,
                    weight_cutoff: int = DEFAULT_WEIGHT_CUTOFF, with_anomaly: bool = True) -> float:
    """Torus with periods 1 and tau and one cloaking hole of the given radius."""
    if radius <= 0:
        raise ChannelError("radius must be positive")
    if 2 * radius >= min(1.0, abs(tau)):
        raise ChannelError("hole does not fit into the torus")
    series = closed_channel_series(model, tau, weight_cutoff)
    return series.with_anomaly(radius) if with_anomaly else series.raw(radius)


# ---- open channel -------------------------------------------------------------------


def one_hole_open(model: MinimalModel, ratio: float, level_cutoff: int = DEFAULT_OPEN_LEVEL,
                  with_anomaly: bool = True, symmetry: Optional[Sequence] = None,
                  delta0: Optional[float] = None, anomaly: Optional[float] = None,
                  geom: Optional[TriangleGeometry] = None) -> float:
    """Two triangle amplitudes glued along three edges: sum_a delta_0 dim(a) sum (T^{aaa})^2."""
    symmetry = check_fusion_closed(model, list(model.labels) if symmetry is None else symmetry)
    one = model.identity
    if delta0 is None:
        delta0 = model.s_matrix(one, one) ** 1.5
    if geom is None:
        geom = TriangleGeometry(t_of_ratio(ratio), series_order=max(12, level_cutoff + 3))
    if with_anomaly and anomaly is None:
        from .anomaly import triangle_anomaly_A
        anomaly = triangle_anomaly_A(geom.t, float(model.central_charge))
    total = 0j
    for a in symmetry:
        for i in symmetry:
            for j in symmetry:
                for k in symmetry:
                    amp = triangle_amplitude(model, a, a, a, i, j, k, geom, level_cutoff, with_anomaly=False)
                    if amp is None:
                        continue
                    total += delta0 * model.quantum_dim(a) * np.sum(amp * amp)
    if abs(total.imag) > 1e-8 * max(1.0, abs(total)):
        raise ChannelError(f"open-channel sum is not real: {total}")
    value = total.real
    return value * math.exp(2 * anomaly) if with_anomaly else value


def ising_open_formula(geom: TriangleGeometry, level_cutoff: int = DEFAULT_OPEN_LEVEL) -> float:
    """The Ising reduction (1/2)(3 sum B_{111}^2 + sum B_{ee1}^2) without the anomaly factor."""
    from .blocks import triangle_block_tensor
    model = MinimalModel(3, 4)
    one, eps = (1, 1), (1, 3)
    vac = triangle_block_tensor(model, one, one, one, geom, level_cutoff)
    mixed = triangle_block_tensor(model, eps, eps, one, geom, level_cutoff)
    total = 0.5 * (3 * np.sum(vac * vac) + np.sum(mixed * mixed))
    return float(total.real)


# ---- channel comparison ---------------------------------------------------------------


@dataclass
class OneHoleResult:
    channel: str
    ratios: np.ndarray
    values: np.ndarray
    with_anomaly: bool
    cutoffs: Dict[str, int]


@dataclass
class ChannelComparison:
    model: MinimalModel
    tau: complex
    ratios: np.ndarray
    open_raw: np.ndarray
    open_anomaly: np.ndarray
    closed_raw: np.ndarray
    closed_anomaly: np.ndarray
    anomaly: np.ndarray
    cutoffs: Dict[str, int]
    runtimes: Dict[str, float] = field(default_factory=dict)

    @property
    def diff(self) -> np.ndarray:
        return self.open_anomaly - self.closed_anomaly

    def relative(self, with_anomaly: bool = True) -> np.ndarray:
        if with_anomaly:
            return np.abs(self.open_anomaly - self.closed_anomaly) / np.abs(self.closed_anomaly)
        return np.abs(self.open_raw - self.closed_raw) / np.abs(self.closed_raw)

    def results(self) -> List[OneHoleResult]:
        return [OneHoleResult("open", self.ratios, self.open_raw, False, self.cutoffs),
                OneHoleResult("open", self.ratios, self.open_anomaly, True, self.cutoffs),
                OneHoleResult("closed", self.ratios, self.closed_raw, False, self.cutoffs),
                OneHoleResult("closed", self.ratios, self.closed_anomaly, True, self.cutoffs)]

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["R_over_d", "open_raw", "open_anomaly", "closed_raw", "closed_anomaly", "diff"])
            for row in zip(self.ratios, self.open_raw, self.open_anomaly, self.closed_raw,
                           self.closed_anomaly, self.diff):
                out.writerow([repr(float(x)) for x in row])

    def summary(self) -> dict:
        return {
            "model": [self.model.p, self.model.q],
            "tau": [self.tau.real, self.tau.imag],
            "cutoffs": self.cutoffs,
            "runtimes": self.runtimes,
            "max_relative_with_anomaly": float(np.max(self.relative(True))),
            "max_relative_without_anomaly": float(np.max(self.relative(False))),
        }

    def write_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.summary(), fh, indent=2)


def channel_compare(model: MinimalModel, ratios: Sequence[float], tau: complex = HEX_TAU,
                    open_level: int = DEFAULT_OPEN_LEVEL, weight_cutoff: int = DEFAULT_WEIGHT_CUTOFF,
                    anomaly_n: int = 16) -> ChannelComparison:
    """Open and closed one-hole partition functions on a grid of R/d (edge d = 1)."""
    from .anomaly import triangle_anomaly_A
    ratios = np.asarray(sorted(ratios), float)
    c = float(model.central_charge)
    start = time.perf_counter()
    series = closed_channel_series(model, tau, weight_cutoff)
    closed_time = time.perf_counter() - start
    closed_raw = np.array([series.raw(r) for r in ratios])
    closed_anom = np.array([series.with_anomaly(r) for r in ratios])
    start = time.perf_counter()
    open_raw, amps = [], []
    for r in ratios:
        geom = TriangleGeometry(t_of_ratio(r), series_order=max(12, open_level + 3))
        open_raw.append(one_hole_open(model, r, open_level, with_anomaly=False, geom=geom))
        amps.append(triangle_anomaly_A(geom.t, c, n=anomaly_n))
    open_time = time.perf_counter() - start
    open_raw = np.array(open_raw)
    amps = np.array(amps)
    return ChannelComparison(model, tau, ratios, open_raw, open_raw * np.exp(2 * amps), closed_raw, closed_anom,
                             amps, {"open_level": open_level, "closed_weight": weight_cutoff},
                             {"closed_s": closed_time, "open_s": open_time})


# ---- intermediate-state fixtures ----------------------------------------------------

FIXTURE_CASES = ("torus_from_sphere", "cylinder_closed", "cylinder_open", "boundary_state_radius")


@dataclass
class FixtureReport:
    case: str
    checks: Dict[str, Tuple[float, float]]
    tolerance: float

    def residual(self, name: str) -> float:
        value, reference = self.checks[name]
        return abs(value - reference) / max(1.0, abs(reference))

    @property
    def max_residual(self) -> float:
        return max(self.residual(k) for k in self.checks)

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tolerance

    def __str__(self):
        lines = [f"{self.case}: {'ok' if self.passed else 'FAILED'} (max residual {self.max_residual:.2e})"]
        for name, (value, ref) in self.checks.items():
            lines.append(f"  {name}: {value:.12g} vs {ref:.12g}")
        return "\n".join(lines)


def _graded_dims(model: MinimalModel, truncation: int) -> Dict[KacLabel, List[int]]:
    return {lab: build_module(model, lab, truncation).graded_dims for lab in model.labels}


def _chi(model, dims, lab, nome_exponent):
    """Truncated character with q = exp(-nome_exponent), including q^{h - c/24}."""
    h = float(model.weight(lab))
    c = float(model.central_charge)
    q = math.exp(-nome_exponent)
    return math.exp(-nome_exponent * (h - c / 24)) * sum(d * q ** n for n, d in enumerate(dims[lab]))


def _cylinder_field(radius: float) -> "WeylField":
    from .anomaly import WeylField
    return WeylField.from_map(lambda z: (radius / z, -radius / z ** 2))


def _annulus_action(radius: float, length: float, n: int) -> float:
    """Anomaly of the annulus 1 < |z| < e^{length/radius} mapped onto a flat cylinder."""
    from .anomaly import annulus_region, liouville_action
    # thin rings keep the radial Gauss rule resolved; the action is additive over patches
    pieces = max(1, math.ceil(length / radius))
    edges = np.exp(np.linspace(0.0, length / radius, pieces + 1))
    field_ = _cylinder_field(radius)
    return sum(liouville_action(annulus_region(lo, hi, n), field_) for lo, hi in zip(edges[:-1], edges[1:]))


def _constant_disc_action(radius: float, level: float, n: int) -> float:
    from .anomaly import WeylField, disc_region, liouville_action
    return liouville_action(disc_region(radius, n=n), WeylField.constant(level))


def _half_annulus_action(width: float, length: float, n: int) -> float:
    """Anomaly of the half annulus 1 < |z| < e^{2 pi^2 width/length} mapped onto a strip of height length."""
    from .anomaly import Region, WeylField, circle_arc, liouville_action, polar_bulk, segment
    log_outer = 2 * math.pi ** 2 * width / length
    edges = np.exp(np.linspace(0.0, log_outer, max(1, math.ceil(log_outer)) + 1))
    scale = length / math.pi
    weyl = WeylField.from_map(lambda z: (scale / z, -scale / z ** 2))
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        nodes, weights = polar_bulk(0.0, math.pi, lo, hi, 2 * n, n)
        region = Region(nodes, weights, [
            segment(lo, hi, n), circle_arc(0.0, hi, 0.0, math.pi, 2 * n, inside=True),
            segment(-hi, -lo, n), circle_arc(0.0, lo, math.pi, 0.0, 2 * n, inside=False)])
        total += liouville_action(region, weyl)
    return total


def _cylinder_channels(model, length_over_radius, truncation, n, a, b):
    """Closed and open channel sums for the cylinder of radius 1 and length L with boundaries a, b."""
    radius, length = 1.0, float(length_over_radius)
    c = float(model.central_charge)
    dims = _graded_dims(model, truncation)
    one = model.identity
    # closed: cylinder -> annulus, then each half rescaled onto a unit disc
    closed_action = _annulus_action(radius, length, n) + 2 * _constant_disc_action(
        math.exp(-length / (2 * radius)), length / radius, n)
    closed = 0.0
    for lab in model.labels:
        ba = model.s_matrix(a, lab) / math.sqrt(model.s_matrix(one, lab))
        bb = model.s_matrix(b, lab) / math.sqrt(model.s_matrix(one, lab))
        h = float(model.weight(lab))
        ishibashi = sum(d * math.exp(-2 * length / radius * k) for k, d in enumerate(dims[lab]))
        closed += ba * bb * math.exp(-length / radius * 2 * h) * ishibashi
    closed *= math.exp(c / 24 * closed_action)
    # open: cut across, strip of width 2 pi R glued from half discs
    open_action = _half_annulus_action(radius, length, n) + 4 * math.pi ** 2 * radius / length
    open_sum = 0.0
    for j in model.labels:
        if model.fusion(a, b, j):
            h = float(model.weight(j))
            open_sum += math.exp(-2 * math.pi ** 2 * radius / length * h) * sum(
                d * math.exp(-2 * math.pi ** 2 * radius / length * k) for k, d in enumerate(dims[j]))
    open_sum *= math.exp(c / 24 * open_action)
    return closed, open_sum, closed_action, open_action


def state_sum_fixture(case: str, model: Optional[MinimalModel] = None, truncation: int = DEFAULT_WEIGHT_CUTOFF,
                     length_over_radius: float = 6.0, n: int = 48, tolerance: float = 1e-6,
                     boundary: Tuple = ((1, 1), (1, 1))) -> FixtureReport:
    """State-sum checks on the torus, the cylinder in both channels, and the hole boundary state."""
    model = MinimalModel(3, 4) if model is None else model
    c = float(model.central_charge)
    lr = float(length_over_radius)
    checks: Dict[str, Tuple[float, float]] = {}
    if case == "torus_from_sphere":
        dims = _graded_dims(model, truncation)
        # cylinder patch plus shrinking the glued half sphere onto |z| < e^{-L/R}
        action = _annulus_action(1.0, lr, n) - _constant_disc_action(1.0, -2 * lr, n)
        checks["anomaly_action"] = (action, 2 * lr)
        state_sum = math.exp(c / 24 * action) * sum(
            (math.exp(-lr * float(model.weight(lab))) * sum(d * math.exp(-lr * k) for k, d in enumerate(dims[lab]))) ** 2
            for lab in model.labels)
        closed_form = sum(_chi(model, dims, lab, lr) ** 2 for lab in model.labels)
        checks["state_sum"] = (state_sum, closed_form)
        # modular invariance: q = e^{-L/R}, tau = i L/(2 pi R) -> -1/tau
        dual = sum(_chi(model, dims, lab, 4 * math.pi ** 2 / lr) ** 2 for lab in model.labels)
        checks["modular_dual"] = (closed_form, dual)
        deep = 400.0
        checks["vacuum_dominance_small_q"] = (
            sum(_chi(model, dims, lab, deep) ** 2 for lab in model.labels) / math.exp(deep * c / 12), 1.0)
    elif case in ("cylinder_closed", "cylinder_open"):
        a, b = (model.canonical(*x) for x in boundary)
        closed, open_sum, closed_action, open_action = _cylinder_channels(model, lr, truncation, n, a, b)
        if case == "cylinder_closed":
            checks["anomaly_action"] = (closed_action, 2 * lr)
            tau = 1j * lr / math.pi
            for lab in model.labels:
                h = float(model.weight(lab))
                prefactor = math.exp(-lr * (2 * h - c / 12))
                checks[f"prefactor_{lab}"] = (prefactor, (cmath.exp(2j * math.pi * tau * (h - c / 24))).real)
        else:
            checks["anomaly_action"] = (open_action, 2 * math.pi ** 2 / lr)
        checks["channel_agreement"] = (open_sum, closed)
    elif case == "boundary_state_radius":
        mod_cache = {lab: build_module(model, lab, min(truncation, 6)) for lab in model.labels}
        for r in (0.2, 0.5, 0.8):
            scaling = math.exp(-c / 24 * _constant_disc_action(1.0, 2 * math.log(r), n))
            for lab, mod in mod_cache.items():
                gam = gamma_operator([0.0, r] + [0.0] * (mod.max_level + 1), mod).matrix
                diag = np.real(np.diag(gam))
                off = mod.offsets()
                for level in range(mod.max_level + 1):
                    if not mod.dim(level):
                        continue
                    value = diag[off[level]] ** 2 * scaling
                    h = float(model.weight(lab)) + level
                    checks[f"r={r} {lab} level {level}"] = (value, r ** (2 * h - c / 6))
            checks[f"r={r} no anomaly at c=0"] = (math.exp(-0.0 / 24 * _constant_disc_action(1.0, 2 * math.log(r), n)), 1.0)
    else:
        raise ChannelError(f"unknown fixture {case!r}; choose from {FIXTURE_CASES}")
    return FixtureReport(case, checks, tolerance)
