"""Truncated lattice models on a hexagonal torus, their Ising and RSOS forms, and the loop rewriting."""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from .blocks import TriangleAmplitudeTable, check_fusion_closed
from .minimal_model import KacLabel, MinimalModel
from .uniformization import ratio_of_t, scale_of_t, t_of_ratio

MAX_CONTRACT_ENTRIES = 1 << 24
MAX_HEIGHT_CONFIGS = 5_000_000
MAX_TRANSFER_DIM = 4096
MAX_LOOP_GENERATORS = 22

# displacement (in thirds of a lattice vector) from the up to the down triangle across each edge kind
_EDGE_SHIFT = {"h": (1, -2), "v": (-2, 1), "d": (1, 1)}


class LatticeError(ValueError):
    """Lattice request that cannot be evaluated as asked."""


class LatticeSizeError(LatticeError):
    """Configuration space too large for the requested exact route."""


# ---- geometry ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LatticeSpec:
    """Hexagonal lattice on an M x N torus, described through its dual triangulation.

    Sites of the triangular lattice are the hexagonal faces (holes), triangles are the
    hexagonal vertices, and triangle edges are the hexagonal edges.  Triangle corners are
    listed counter-clockwise.
    """

    M: int
    N: int
    sites: int = field(init=False)
    triangles: Tuple[Tuple[int, int, int], ...] = field(init=False)
    edges: Tuple[Tuple[int, int], ...] = field(init=False)
    triangle_edges: Tuple[Tuple[int, int, int], ...] = field(init=False)
    edge_triangles: Tuple[Tuple[int, int], ...] = field(init=False)
    edge_shift: Tuple[Tuple[int, int], ...] = field(init=False)

    def __post_init__(self):
        M, N = self.M, self.N
        if M < 2 or N < 2:
            raise LatticeError("torus dimensions must be at least 2")

        def site(i, j):
            return i % M + M * (j % N)

        edges, shifts, index = [], [], {}
        for j in range(N):
            for i in range(M):
                for kind, (u, w) in (("h", (site(i, j), site(i + 1, j))),
                                     ("v", (site(i, j), site(i, j + 1))),
                                     ("d", (site(i + 1, j), site(i, j + 1)))):
                    index[kind, i, j] = len(edges)
                    edges.append((u, w))
                    shifts.append(_EDGE_SHIFT[kind])

        def e(kind, i, j):
            return index[kind, i % M, j % N]

        tris, tri_edges = [], []
        up, down = {}, {}
        for j in range(N):
            for i in range(M):
                up[i, j] = len(tris)
                tris.append((site(i, j), site(i + 1, j), site(i, j + 1)))
                tri_edges.append((e("h", i, j), e("d", i, j), e("v", i, j)))
                down[i, j] = len(tris)
                tris.append((site(i + 1, j), site(i + 1, j + 1), site(i, j + 1)))
                tri_edges.append((e("v", i + 1, j), e("h", i, j + 1), e("d", i, j)))
        owners = [[] for _ in edges]
        for t, trio in enumerate(tri_edges):
            for ed in trio:
                owners[ed].append(t)
        up_set = set(up.values())
        edge_tris = []
        for pair in owners:
            a, b = pair
            edge_tris.append((a, b) if a in up_set else (b, a))
        object.__setattr__(self, "sites", M * N)
        object.__setattr__(self, "triangles", tuple(tris))
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "triangle_edges", tuple(tri_edges))
        object.__setattr__(self, "edge_triangles", tuple(edge_tris))
        object.__setattr__(self, "edge_shift", tuple(shifts))

    @property
    def n_vertices(self) -> int:
        return len(self.triangles)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def corner_pairs(self, t: int) -> Tuple[Tuple[int, int], ...]:
        a, b, c = self.triangles[t]
        return ((a, b), (b, c), (c, a))

    def orientation_flags(self, t: int) -> Tuple[bool, bool, bool]:
        """True where the triangle reads an edge against its stored (u, w) order."""
        return tuple(self.edges[ed] != pair for ed, pair in zip(self.triangle_edges[t], self.corner_pairs(t)))


# ---- truncated state spaces -------------------------------------------------------------------


@dataclass(frozen=True)
class EdgeState:
    """kappa^{(ab)}_{i alpha}: ``index`` is the position in the level-ordered ON basis of module i."""

    a: KacLabel
    b: KacLabel
    i: KacLabel
    level: int
    index: int
    weight: Fraction

    def reversed(self) -> "EdgeState":
        return EdgeState(self.b, self.a, self.i, self.level, self.index, self.weight)


def truncated_basis(model: MinimalModel, symmetry: Sequence, h_max) -> List[EdgeState]:
    from .virasoro import build_module

    labels = check_fusion_closed(model, symmetry)
    h_max = Fraction(h_max)
    out = []
    for a in labels:
        for b in labels:
            for i in labels:
                if not model.fusion(i, b, a):
                    continue
                h = model.weight(i)
                if h > h_max:
                    continue
                top = int(h_max - h)
                module = build_module(model, i, top)
                offsets = module.offsets()
                for level in range(top + 1):
                    for alpha in range(module.dim(level)):
                        out.append(EdgeState(a, b, i, level, offsets[level] + alpha, h + level))
    return out


# ---- exact contraction of a vertex-weight table ---------------------------------------------------


def _table_value(table: TriangleAmplitudeTable, s1: EdgeState, s2: EdgeState, s3: EdgeState) -> complex:
    if s1.b != s2.a or s2.b != s3.a or s3.b != s1.a:
        return 0.0
    block = table.get(s1.a, s1.b, s2.b, s1.i, s2.i, s3.i)
    if block is None:
        return 0.0
    try:
        return complex(block[s1.index, s2.index, s3.index])
    except IndexError:
        raise LatticeError("table was built at a lower level than the truncated basis needs") from None


def _vertex_tensor(table, states, flags) -> np.ndarray:
    """W[s1, s2, s3] with the three edge states read in the triangle's own corner order."""
    views = [[s.reversed() if flip else s for s in states] for flip in flags]
    n = len(states)
    out = np.zeros((n, n, n), dtype=complex)
    for x, s1 in enumerate(views[0]):
        for y, s2 in enumerate(views[1]):
            if s1.b != s2.a:
                continue
            for z, s3 in enumerate(views[2]):
                out[x, y, z] = _table_value(table, s1, s2, s3)
    return out


def _real(value: complex, what: str) -> float:
    if abs(value.imag) > 1e-9 * max(1.0, abs(value.real)):
        raise LatticeError(f"{what} has an imaginary part {value.imag:.3e}")
    return float(value.real)


def _contract(lattice: LatticeSpec, table, states) -> float:
    """Sweep the triangles row by row, contracting each edge once both of its triangles are in."""
    cache = {}
    cur, open_edges = np.ones(()), []
    for t in range(lattice.n_vertices):
        flags = lattice.orientation_flags(t)
        if flags not in cache:
            cache[flags] = _vertex_tensor(table, states, flags)
        legs = list(lattice.triangle_edges[t])
        shared = [ed for ed in legs if ed in open_edges]
        fresh = [ed for ed in open_edges if ed not in shared] + [ed for ed in legs if ed not in shared]
        if len(states) ** len(fresh) > MAX_CONTRACT_ENTRIES:
            raise LatticeSizeError(f"{len(fresh)} open edges with {len(states)} states each; "
                                   "use method='heights' or 'transfer'")
        cur = np.tensordot(cur, cache[flags], axes=([open_edges.index(ed) for ed in shared],
                                                    [legs.index(ed) for ed in shared]))
        open_edges = fresh
    return _real(complex(cur), "lattice partition function")


def _height_configs(n_labels: int, n_sites: int) -> np.ndarray:
    if n_labels ** n_sites > MAX_HEIGHT_CONFIGS:
        raise LatticeSizeError(f"{n_labels}^{n_sites} height configurations; use method='transfer'")
    grids = np.indices((n_labels,) * n_sites).reshape(n_sites, -1).T
    return grids.astype(np.int16)


def _enumerate_heights(lattice: LatticeSpec, table, states, labels) -> float:
    """Sum over hole labels; for each labelling contract the remaining edge multiplicities."""
    blocks: Dict[tuple, np.ndarray] = {}

    def block(flags, corner_labels):
        key = (flags, corner_labels)
        if key not in blocks:
            picks = []
            for flip, (x, y) in zip(flags, ((0, 1), (1, 2), (2, 0))):
                want = (corner_labels[x], corner_labels[y])
                if flip:
                    want = want[::-1]
                picks.append([n for n, s in enumerate(states) if (s.a, s.b) == want])
            full = _vertex_tensor(table, states, flags)
            blocks[key] = full[np.ix_(*picks)] if all(picks) else np.zeros((0, 0, 0))
        return blocks[key]

    total = 0.0 + 0.0j
    for config in _height_configs(len(labels), lattice.sites):
        operands = []
        for t, corners in enumerate(lattice.triangles):
            b = block(lattice.orientation_flags(t), tuple(labels[config[c]] for c in corners))
            if b.size == 0:
                break
            operands += [b, list(lattice.triangle_edges[t])]
        else:
            total += np.einsum(*operands, [], optimize="greedy")
    return _real(total, "lattice partition function")


def height_weights(table: TriangleAmplitudeTable, states: Sequence[EdgeState]) -> Tuple[List[KacLabel], np.ndarray]:
    """W[a, b, c] of the face-label model, valid when each label pair carries at most one edge state."""
    labels = list(table.symmetry)
    by_pair: Dict[tuple, EdgeState] = {}
    for s in states:
        if (s.a, s.b) in by_pair:
            raise LatticeError("more than one edge state per label pair; the face-label form does not apply")
        by_pair[s.a, s.b] = s
    n = len(labels)
    out = np.zeros((n, n, n))
    for x, a in enumerate(labels):
        for y, b in enumerate(labels):
            for z, c in enumerate(labels):
                trio = (by_pair.get((a, b)), by_pair.get((b, c)), by_pair.get((c, a)))
                if None in trio:
                    continue
                out[x, y, z] = _real(complex(_table_value(table, *trio)), "vertex weight")
    return labels, out


def _transfer(lattice: LatticeSpec, weights: np.ndarray) -> float:
    """Tr T^N for the row-to-row transfer matrix of a face-label model."""
    n, M = weights.shape[0], lattice.M
    if n ** M > MAX_TRANSFER_DIM:
        raise LatticeSizeError(f"transfer matrix of size {n ** M} is too large")
    rows = np.indices((n,) * M).reshape(M, -1).T
    lower, upper = rows[:, None, :], rows[None, :, :]
    T = np.ones((len(rows), len(rows)))
    for i in range(M):
        k = (i + 1) % M
        T *= weights[lower[..., i], lower[..., k], upper[..., i]]
        T *= weights[lower[..., k], upper[..., k], upper[..., i]]
    return float(np.trace(np.linalg.matrix_power(T, lattice.N)))


def face_model_Z(lattice: LatticeSpec, weights: np.ndarray, method: str = "transfer") -> float:
    """Z = sum over face labels of the product of W over triangles (corners counter-clockwise)."""
    if method == "transfer":
        return _transfer(lattice, weights)
    if method != "heights":
        raise LatticeError(f"unknown method {method!r}")
    configs = _height_configs(weights.shape[0], lattice.sites)
    prod = np.ones(len(configs))
    for a, b, c in lattice.triangles:
        prod *= weights[configs[:, a], configs[:, b], configs[:, c]]
    return float(prod.sum())


def lattice_Z_exact(lattice: LatticeSpec, table: TriangleAmplitudeTable, h_max=None,
                    method: str = "contract") -> float:
    """Exact partition function of the truncated lattice model.

    ``contract`` sums over every edge-state assignment as a tensor network, ``heights``
    enumerates the hole labels and contracts what is left, ``transfer`` runs a row transfer
    matrix and needs one edge state per label pair.
    """
    model = table.model
    if h_max is None:
        h_max = max(model.weight(i) for i in table.symmetry) + table.max_level
    states = truncated_basis(model, table.symmetry, h_max)
    if method == "contract":
        return _contract(lattice, table, states)
    if method == "heights":
        return _enumerate_heights(lattice, table, states, list(table.symmetry))
    if method == "transfer":
        _, weights = height_weights(table, states)
        return _transfer(lattice, weights)
    raise LatticeError(f"unknown method {method!r}")


# ---- Ising form ---------------------------------------------------------------------------------


def vertex_scale(model: MinimalModel, delta0: float, anomaly: float = 0.0) -> float:
    """F = e^A delta0^{1/2} S_11^{-1/4}, the weight of a triangle with equal labels."""
    s11 = model.s_matrix(model.identity, model.identity)
    return math.exp(anomaly) * math.sqrt(delta0) * s11 ** -0.25


def hopping_weight(t: float, h: float) -> float:
    """x(R) = (4 / (3 sqrt3 X(t)))^{2h}."""
    return (4.0 / (3.0 * math.sqrt(3.0) * float(scale_of_t(t)))) ** (2.0 * h)


@dataclass(frozen=True)
class IsingMap:
    model: MinimalModel
    ratio: float
    h_f: float
    x: float
    beta: float
    x_max: float
    beta_min: float
    beta_star: float

    @property
    def covered(self) -> bool:
        return self.beta_min < self.beta_star

    def to_dict(self) -> dict:
        return {"p": self.model.p, "q": self.model.q, "R_over_d": self.ratio, "h_f": self.h_f, "x": self.x,
                "beta": self.beta, "x_max": self.x_max, "beta_min": self.beta_min,
                "beta_star": self.beta_star, "covered": self.covered}


def ising_map(model: MinimalModel, ratio: float) -> IsingMap:
    """Coupling of the Ising model equivalent to the two-label cloaking lattice at hole size R/d."""
    if (model.p, model.q) not in ((3, 4), (4, 5)):
        raise LatticeError("the Ising form is available for M(3,4) and M(4,5) only")
    h_f = float(model.weight(model.canonical(1, model.q - 1)))
    x = hopping_weight(t_of_ratio(ratio), h_f)
    x_max = (16.0 / 27.0) ** h_f
    return IsingMap(model, ratio, h_f, x, -0.5 * math.log(x), x_max, -0.5 * math.log(x_max), math.log(3.0) / 4)


def ising_Z(lattice: LatticeSpec, beta: float) -> float:
    """Nearest-neighbour Ising model on the triangular lattice, by enumeration."""
    spins = 1 - 2 * _height_configs(2, lattice.sites).astype(float)
    energy = np.zeros(len(spins))
    for u, w in lattice.edges:
        energy += spins[:, u] * spins[:, w]
    return float(np.exp(beta * energy).sum())


# ---- RSOS form ----------------------------------------------------------------------------------


def _check_unitary(model: MinimalModel) -> int:
    if model.q != model.p + 1:
        raise LatticeError(f"{model} is not a unitary minimal model")
    return model.p


@dataclass(frozen=True)
class RSOSWeights:
    """Face-label weights of the lowest non-trivial cutoff; heights 1..p index (1, a)."""

    p: int
    F: float
    x: float
    dims: Tuple[float, ...]

    def __call__(self, a: int, b: int, c: int) -> float:
        trio = (a, b, c)
        if a == b == c:
            return self.F
        values = sorted(trio)
        if values[0] == values[1]:
            rep, odd = values[0], values[2]
        elif values[1] == values[2]:
            rep, odd = values[1], values[0]
        else:
            return 0.0
        if abs(rep - odd) != 1:
            return 0.0
        return self.F * self.x * (self.dims[odd - 1] / self.dims[rep - 1]) ** (1 / 6)

    def array(self) -> np.ndarray:
        p = self.p
        out = np.zeros((p, p, p))
        for a, b, c in itertools.product(range(1, p + 1), repeat=3):
            out[a - 1, b - 1, c - 1] = self(a, b, c)
        return out

    def table(self) -> Dict[Tuple[int, int, int], float]:
        return {abc: self(*abc) for abc in itertools.product(range(1, self.p + 1), repeat=3) if self(*abc) != 0.0}


def rsos_weights(model: MinimalModel, t: float, delta0: Optional[float] = None, anomaly: float = 0.0) -> RSOSWeights:
    p = _check_unitary(model)
    if delta0 is None:
        delta0 = model.s_matrix(model.identity, model.identity) ** 1.5
    h_f = float(model.weight(model.canonical(1, 2)))
    dims = tuple(model.quantum_dim(model.canonical(1, a)) for a in range(1, p + 1))
    return RSOSWeights(p, vertex_scale(model, delta0, anomaly), hopping_weight(t, h_f), dims)


def rsos_Z(lattice: LatticeSpec, weights: RSOSWeights, method: str = "heights") -> float:
    return face_model_Z(lattice, weights.array(), method)


# ---- loop gas -------------------------------------------------------------------------------------


def _cycle_basis(lattice: LatticeSpec) -> List[int]:
    """GF(2) null space of the vertex-edge incidence, as edge bitmasks."""
    rows = []
    for trio in lattice.triangle_edges:
        mask = 0
        for ed in trio:
            mask ^= 1 << ed
        rows.append(mask)
    pivots: Dict[int, int] = {}
    for row in rows:
        for col, prow in pivots.items():
            if row >> col & 1:
                row ^= prow
        if row:
            col = (row & -row).bit_length() - 1
            for c2 in list(pivots):
                if pivots[c2] >> col & 1:
                    pivots[c2] ^= row
            pivots[col] = row
    basis = []
    for free in range(lattice.n_edges):
        if free in pivots:
            continue
        vec = 1 << free
        for col, prow in pivots.items():
            if prow >> free & 1:
                vec |= 1 << col
        basis.append(vec)
    return basis


def loop_components(lattice: LatticeSpec, mask: int) -> List[Tuple[int, Tuple[int, int]]]:
    """(length, winding) of each loop in an edge set where every vertex has degree 0 or 2."""
    at_vertex: Dict[int, List[int]] = {}
    chosen = [ed for ed in range(lattice.n_edges) if mask >> ed & 1]
    for ed in chosen:
        for t in lattice.edge_triangles[ed]:
            at_vertex.setdefault(t, []).append(ed)
    if any(len(v) != 2 for v in at_vertex.values()):
        raise LatticeError("edge set is not a union of disjoint loops")
    seen, out = set(), []
    for start in chosen:
        if start in seen:
            continue
        ed, vertex = start, lattice.edge_triangles[start][0]
        dx = dy = length = 0
        while True:
            seen.add(ed)
            length += 1
            up, down = lattice.edge_triangles[ed]
            sign = 1 if vertex == up else -1
            sx, sy = lattice.edge_shift[ed]
            dx, dy = dx + sign * sx, dy + sign * sy
            vertex = down if vertex == up else up
            a, b = at_vertex[vertex]
            ed = b if a == ed else a
            if ed == start:
                break
        out.append((length, (dx // (3 * lattice.M), dy // (3 * lattice.N))))
    return out


@lru_cache(maxsize=None)
def loop_statistics(M: int, N: int) -> Dict[Tuple[int, int, int], int]:
    """Multiplicity of each (|L|, d(L), w(L)) over all loop configurations of the M x N torus."""
    lattice = LatticeSpec(M, N)
    basis = _cycle_basis(lattice)
    if len(basis) > MAX_LOOP_GENERATORS:
        raise LatticeSizeError(f"2^{len(basis)} loop configurations is too many to enumerate")
    counts: Counter = Counter()
    mask = 0
    for step in range(1 << len(basis)):
        if step:
            mask ^= basis[(step & -step).bit_length() - 1]
        comps = loop_components(lattice, mask)
        winding = sum(1 for _, w in comps if w != (0, 0))
        counts[bin(mask).count("1"), len(comps) - winding, winding] += 1
    return dict(counts)


def loop_Z(p: int, x: float, n_weight: float, winding_weight: float, lattice: LatticeSpec) -> float:
    """sum_L x^{|L|} n^{d(L)} n~^{w(L)}; ``p`` only labels the call and is checked."""
    if p < 2:
        raise LatticeError("p must be at least 2")
    stats = loop_statistics(lattice.M, lattice.N)
    return float(sum(mult * x ** L * n_weight ** d * winding_weight ** w for (L, d, w), mult in stats.items()))


def loop_parameters(p: int) -> Tuple[float, List[float]]:
    """n = 2 cos(pi/(p+1)) and xi_a = cos(pi a/(p+1)) / cos(pi/(p+1)) for a = 1..p."""
    n = 2 * math.cos(math.pi / (p + 1))
    return n, [math.cos(math.pi * a / (p + 1)) / math.cos(math.pi / (p + 1)) for a in range(1, p + 1)]


def rsos_loop_Z(weights: RSOSWeights, lattice: LatticeSpec) -> float:
    n, xis = loop_parameters(weights.p)
    total = sum(loop_Z(weights.p, weights.x, n, n * xi, lattice) for xi in xis)
    return weights.F ** lattice.n_vertices * total


@dataclass(frozen=True)
class LoopCheck:
    p: int
    M: int
    N: int
    t: float
    x: float
    z_rsos: float
    z_loop: float
    loop_configs: int
    height_configs: int

    @property
    def residual(self) -> float:
        return abs(self.z_rsos - self.z_loop) / abs(self.z_rsos)

    def to_dict(self) -> dict:
        return {"p": self.p, "M": self.M, "N": self.N, "t": self.t, "x": self.x, "z_rsos": self.z_rsos,
                "z_loop": self.z_loop, "residual": self.residual, "loop_configs": self.loop_configs,
                "height_configs": self.height_configs}


def loop_equivalence_check(p: int, t: float, lattice: LatticeSpec, x: Optional[float] = None) -> LoopCheck:
    """Compare the RSOS enumeration with the loop gas; ``x`` overrides the hopping weight x(R)."""
    weights = rsos_weights(MinimalModel(p, p + 1), t)
    if x is not None:
        weights = RSOSWeights(weights.p, weights.F, x, weights.dims)
    z_rsos = rsos_Z(lattice, weights, "heights")
    z_loop = rsos_loop_Z(weights, lattice)
    configs = sum(loop_statistics(lattice.M, lattice.N).values())
    return LoopCheck(p, lattice.M, lattice.N, t, weights.x, z_rsos, z_loop, configs, p ** lattice.sites)


def winding_parity_violations(p: int, lattice: LatticeSpec) -> int:
    """Height configurations with adjacent heights differing by at most one whose domain walls wind an odd number of times."""
    configs = _height_configs(p, lattice.sites)
    u = np.array([e[0] for e in lattice.edges])
    w = np.array([e[1] for e in lattice.edges])
    diff = np.abs(configs[:, u] - configs[:, w])
    allowed = np.all(diff <= 1, axis=1)
    bits = (1 << np.arange(lattice.n_edges, dtype=np.int64))
    masks = ((diff[allowed] == 1).astype(np.int64) * bits).sum(axis=1)
    bad = 0
    for mask in np.unique(masks):
        comps = loop_components(lattice, int(mask))
        if sum(1 for _, wind in comps if wind != (0, 0)) % 2:
            bad += 1
    return bad


# ---- phase diagram ----------------------------------------------------------------------------------


@dataclass(frozen=True)
class PhasePoints:
    p: int
    n: float
    x_c: float
    x_0: float
    x_max: float
    c_c: Fraction
    c_0: Fraction
    R_C_over_d: float
    R_0_over_d: float

    def to_dict(self) -> dict:
        out = dict(self.__dict__)
        out["c_c"], out["c_0"] = float(self.c_c), float(self.c_0)
        return out


def _solve_t(target: float, h: float, bracket=(0.02, 20.0)) -> float:
    lo, hi = bracket

    def gap(t):
        return math.log(hopping_weight(t, h)) - math.log(target)

    if gap(lo) * gap(hi) > 0:
        raise LatticeError(f"x(t) = {target} has no root for t in [{lo}, {hi}]")
    return brentq(gap, lo, hi, xtol=1e-14, rtol=1e-14)


def phase_points(p: int) -> PhasePoints:
    if p < 3:
        raise LatticeError("p must be at least 3")
    n = 2 * math.cos(math.pi / (p + 1))
    x_c = (2 + math.sqrt(2 - n)) ** -0.5
    x_0 = (2 - math.sqrt(2 - n)) ** -0.5
    x_max = (2 / 3 ** 0.75) ** ((p - 2) / (p + 1))
    h = (p - 2) / (4 * (p + 1))
    t_c, t_0 = _solve_t(x_c, h), _solve_t(x_0, h)
    return PhasePoints(p, n, x_c, x_0, x_max, 1 - Fraction(6, (p + 1) * (p + 2)), 1 - Fraction(6, p * (p + 1)),
                       ratio_of_t(t_c), ratio_of_t(t_0))
