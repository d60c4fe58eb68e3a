"""Level-truncated irreducible Virasoro modules with the twisted pairing.

States of the Verma module are spanned by words L_{-n1} ... L_{-nk}|h>
with n1 >= ... >= nk >= 1.  The pairing is the bilinear form with
<L_m u|v> = (-1)^m <u|L_{-m} v> and <h|h> = 1; on level N it is (-1)^N times
the Shapovalov form.  Null vectors are the radical of this pairing, so the
irreducible quotient at each level is represented by a subset of words whose
Gram block is invertible.
"""
from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .minimal_model import MinimalModel

Word = Tuple[int, ...]
DEFAULT_MAX_LEVEL = 14


class ModuleError(ValueError):
    """Invalid request on a truncated module."""


@lru_cache(maxsize=None)
def partitions(level: int) -> Tuple[Word, ...]:
    """Partitions of ``level`` as non-increasing tuples, in reverse lexicographic order."""
    def gen(n, cap):
        if n == 0:
            yield ()
            return
        for first in range(min(n, cap), 0, -1):
            for rest in gen(n - first, first):
                yield (first,) + rest
    return tuple(gen(level, level))


def _add(acc: Dict, key, val):
    if val:
        new = acc.get(key, 0) + val
        if new:
            acc[key] = new
        else:
            acc.pop(key, None)


class VermaModule:
    """Exact mode action on the Verma module of weight h and central charge c."""

    def __init__(self, h, c):
        self.h = Fraction(h)
        self.c = Fraction(c)
        self._cache: Dict[Tuple[int, Word], Dict[Word, Fraction]] = {}

    def act(self, m: int, word: Word) -> Dict[Word, Fraction]:
        """L_m applied to the basis word, as {word: coefficient}."""
        key = (m, word)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        out: Dict[Word, Fraction] = {}
        if not word:
            if m < 0:
                out[(-m,)] = Fraction(1)
            elif m == 0:
                _add(out, (), self.h)
        elif m == 0:
            out[word] = self.h + sum(word)
        elif m < 0 and -m >= word[0]:
            out[(-m,) + word] = Fraction(1)
        else:
            # L_m L_a rest = L_a L_m rest + (m - a) L_{m+a} rest + central term, a = -word[0]
            a = -word[0]
            rest = word[1:]
            for w, x in self.act(m, rest).items():
                for w2, y in self.act(a, w).items():
                    _add(out, w2, x * y)
            for w, x in self.act(m + a, rest).items():
                _add(out, w, (m - a) * x)
            if m + a == 0:
                _add(out, rest, self.c / 12 * (m ** 3 - m))
        self._cache[key] = out
        return out

    def act_state(self, m: int, state: Dict[Word, Fraction]) -> Dict[Word, Fraction]:
        out: Dict[Word, Fraction] = {}
        for w, x in state.items():
            for w2, y in self.act(m, w).items():
                _add(out, w2, x * y)
        return out


def _rank_select(rows: List[List[Fraction]]) -> List[int]:
    """Indices of a maximal linearly independent subset of rows, chosen greedily in order."""
    basis: List[Tuple[int, List[Fraction]]] = []
    chosen = []
    for idx, row in enumerate(rows):
        vec = list(row)
        for pivot, brow in basis:
            if vec[pivot]:
                f = vec[pivot]
                vec = [v - f * b for v, b in zip(vec, brow)]
        pivot = next((k for k, v in enumerate(vec) if v), None)
        if pivot is None:
            continue
        inv = 1 / vec[pivot]
        basis.append((pivot, [v * inv for v in vec]))
        chosen.append(idx)
    return chosen


def _solve_exact(mat: List[List[Fraction]], rhs: List[List[Fraction]]) -> List[List[Fraction]]:
    """Solve mat @ X = rhs by Gauss-Jordan elimination over the rationals."""
    n = len(mat)
    aug = [list(mat[i]) + list(rhs[i]) for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col])
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


class TruncatedModule:
    """Irreducible module of a primary, truncated at ``max_level``."""

    def __init__(self, model: MinimalModel, label, max_level: int = 7, bound: int = DEFAULT_MAX_LEVEL):
        if max_level < 0:
            raise ModuleError("max_level must be non-negative")
        if max_level > bound:
            raise ModuleError(f"max_level {max_level} exceeds the configured bound {bound}")
        self.model = model
        self.label = model.canonical(*label)
        self.h = model.weight(self.label)
        self.c = model.central_charge
        self.max_level = max_level
        self.verma = VermaModule(self.h, self.c)
        self._verma_gram: Dict[int, List[List[Fraction]]] = {}
        self.basis: List[List[Word]] = []
        self._gram: List[List[List[Fraction]]] = []
        for level in range(max_level + 1):
            full = self.verma_gram(level)
            keep = _rank_select(full)
            words = partitions(level)
            self.basis.append([words[k] for k in keep])
            self._gram.append([[full[a][b] for b in keep] for a in keep])
        self._mode_cache: Dict[Tuple[int, int], np.ndarray] = {}
        self._on: Dict[int, np.ndarray] = {}

    def __repr__(self):
        return f"TruncatedModule({self.model.p},{self.model.q}; {tuple(self.label)}, max_level={self.max_level})"

    # ---- pairing -----------------------------------------------------------

    def verma_gram(self, level: int) -> List[List[Fraction]]:
        """Twisted pairing on all words of the given level."""
        if level in self._verma_gram:
            return self._verma_gram[level]
        words = partitions(level)
        if level == 0:
            gram = [[Fraction(1)]]
        else:
            gram = [[Fraction(0)] * len(words) for _ in words]
            for col, v in enumerate(words):
                lowered: Dict[int, Dict[Word, Fraction]] = {}
                for row, w in enumerate(words):
                    first, rest = w[0], w[1:]
                    if first not in lowered:
                        lowered[first] = self.verma.act(first, v)
                    sub = self.verma_gram(level - first)
                    sub_index = {x: k for k, x in enumerate(partitions(level - first))}
                    r = sub_index[rest]
                    total = sum((coef * sub[r][sub_index[u]] for u, coef in lowered[first].items()),
                                Fraction(0))
                    gram[row][col] = (-1) ** first * total
        self._verma_gram[level] = gram
        return gram

    def gram(self, level: int) -> List[List[Fraction]]:
        """Twisted pairing on the quotient basis of the level."""
        return self._gram[level]

    def gram_array(self, level: int) -> np.ndarray:
        return np.array(self._gram[level], dtype=float)

    @property
    def graded_dims(self) -> List[int]:
        return [len(b) for b in self.basis]

    def dim(self, level: int) -> int:
        return len(self.basis[level])

    def offsets(self) -> List[int]:
        out = [0]
        for d in self.graded_dims:
            out.append(out[-1] + d)
        return out

    @property
    def total_dim(self) -> int:
        return sum(self.graded_dims)

    # ---- ON bases ----------------------------------------------------------------

    def on_basis(self, level: int) -> np.ndarray:
        """Columns are ON vectors in the quotient basis: B^T G B = 1.

        Symmetric orthogonalisation B = G^{-1/2}; at levels where the twisted
        pairing is negative the square root is imaginary.
        """
        if level not in self._on:
            gram = self.gram_array(level)
            if gram.size == 0:
                self._on[level] = np.zeros((0, 0), dtype=complex)
            else:
                vals, vecs = np.linalg.eigh(gram)
                roots = np.array([1 / cmath.sqrt(v) for v in vals])
                self._on[level] = (vecs * roots) @ vecs.T
        return self._on[level]

    def copairing(self, level: int) -> np.ndarray:
        """sum_alpha |alpha> (x) |alpha> in the quotient basis, i.e. the inverse Gram."""
        return np.linalg.inv(self.gram_array(level)) if self.dim(level) else np.zeros((0, 0))

    # ---- mode action -------------------------------------------------------------

    def _project(self, level: int, verma_state: Dict[Word, Fraction]) -> List[Fraction]:
        """Quotient coordinates of a Verma state: solve G_BB x = <B|state>."""
        if not self.basis[level]:
            return []
        words = partitions(level)
        index = {w: k for k, w in enumerate(words)}
        full = self.verma_gram(level)
        keep = [index[w] for w in self.basis[level]]
        pair = [sum((full[k][index[w]] * x for w, x in verma_state.items()), Fraction(0)) for k in keep]
        sol = _solve_exact(self._gram[level], [[v] for v in pair])
        return [row[0] for row in sol]

    def mode_matrix_exact(self, m: int, level: int) -> List[List[Fraction]]:
        """Matrix of L_m from ``level`` to ``level - m`` in quotient bases."""
        target = level - m
        if not 0 <= level <= self.max_level or not 0 <= target <= self.max_level:
            raise ModuleError(f"L_{m} on level {level} leaves the truncation 0..{self.max_level}")
        cols = [self._project(target, self.verma.act(m, w)) for w in self.basis[level]]
        return [[cols[j][i] for j in range(len(cols))] for i in range(self.dim(target))]

    def mode_matrix(self, m: int, level: int) -> np.ndarray:
        key = (m, level)
        if key not in self._mode_cache:
            exact = self.mode_matrix_exact(m, level)
            self._mode_cache[key] = np.array(exact, dtype=float).reshape(self.dim(level - m), self.dim(level))
        return self._mode_cache[key]

    def apply_mode(self, m: int, state: "ModuleState") -> "ModuleState":
        if state.module is not self:
            raise ModuleError("state belongs to a different module")
        return ModuleState(self, state.level - m, self.mode_matrix(m, state.level) @ state.vector)

    def primary(self) -> "ModuleState":
        return ModuleState(self, 0, np.array([1.0]))

    def word_state(self, word: Sequence[int]) -> "ModuleState":
        """Quotient image of L_{-n1} ... L_{-nk}|h> for any ordering of the modes."""
        state = {(): Fraction(1)}
        for n in reversed(list(word)):
            state = self.verma.act_state(-n, state)
        level = sum(word)
        if level > self.max_level:
            raise ModuleError("word above the truncation level")
        return ModuleState(self, level, np.array(self._project(level, state), dtype=float))

    def pairing(self, left: "ModuleState", right: "ModuleState") -> complex:
        if left.level != right.level:
            return 0.0
        return left.vector @ self.gram_array(left.level) @ right.vector

    def operator_matrix(self, coeffs: Dict[int, complex]) -> np.ndarray:
        """Block matrix of sum_k coeffs[k] L_k (k > 0) on the whole truncation."""
        off = self.offsets()
        out = np.zeros((self.total_dim, self.total_dim), dtype=complex)
        for k, v in coeffs.items():
            if k <= 0:
                raise ModuleError("only annihilation modes are supported here")
            for level in range(k, self.max_level + 1):
                if self.dim(level) and self.dim(level - k):
                    out[off[level - k]:off[level - k + 1], off[level]:off[level + 1]] += v * self.mode_matrix(k, level)
        return out

    def level_diagonal(self) -> np.ndarray:
        return np.concatenate([np.full(d, n) for n, d in enumerate(self.graded_dims)])


class ModuleState:
    """Homogeneous element of a truncated module in quotient coordinates."""

    def __init__(self, module: TruncatedModule, level: int, vector):
        self.module = module
        self.level = level
        self.vector = np.asarray(vector)

    def __add__(self, other):
        if other.level != self.level:
            raise ModuleError("only homogeneous states can be added")
        return ModuleState(self.module, self.level, self.vector + other.vector)

    def __rmul__(self, scalar):
        return ModuleState(self.module, self.level, scalar * self.vector)

    def __sub__(self, other):
        return self + (-1) * other

    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))


_MODULES: Dict[tuple, TruncatedModule] = {}


def build_module(model: MinimalModel, label, max_level: int = 7,
                 bound: int = DEFAULT_MAX_LEVEL) -> TruncatedModule:
    """Shared, memoised module; built modules are not mutated after construction."""
    key = (model.p, model.q, model.canonical(*label), max_level)
    if key not in _MODULES:
        _MODULES[key] = TruncatedModule(model, label, max_level, bound)
    elif max_level > bound:
        raise ModuleError(f"max_level {max_level} exceeds the configured bound {bound}")
    return _MODULES[key]


def apply_mode(module: TruncatedModule, m: int, state: ModuleState) -> ModuleState:
    return module.apply_mode(m, state)


# ---- local coordinate changes ----------------------------------------------------


def _compose_vector_field(coeffs: Sequence[complex], order: int) -> List[complex]:
    """Taylor coefficients of exp(V) w with V = sum_k v_k w^{k+1} d/dw, up to w^order."""
    def apply_field(series):
        out = [0j] * (order + 1)
        deriv = [(j + 1) * series[j + 1] for j in range(order)] + [0j]
        for k, v in enumerate(coeffs, start=1):
            if not v:
                continue
            for j in range(order + 1 - (k + 1)):
                out[j + k + 1] += v * deriv[j]
        return out

    term = [0j] * (order + 1)
    term[1] = 1.0
    total = list(term)
    for n in range(1, order + 1):
        term = [x / n for x in apply_field(term)]
        total = [a + b for a, b in zip(total, term)]
    return total


def vector_field_coefficients(series: Sequence[complex], order: int) -> List[complex]:
    """v_1..v_{order-1} with exp(sum v_k w^{k+1} d/dw) w = w + b_2 w^2 + ... (b_k = series[k]).

    ``series`` holds normalised coefficients with series[1] == 1.
    """
    v = [0j] * (order - 1)
    for k in range(1, order):
        current = _compose_vector_field(v, order)
        target = series[k + 1] if k + 1 < len(series) else 0.0
        v[k - 1] += target - current[k + 1]
    return v


class CoordMapOperator:
    """Gamma_G on a truncated module for G(z) = a1 z + a2 z^2 + ... ."""

    def __init__(self, module: TruncatedModule, coefficients: Sequence[complex]):
        coeffs = list(coefficients)
        if len(coeffs) < 2 or coeffs[1] == 0:
            raise ModuleError("need G(0) = 0 with a nonzero linear coefficient")
        need = module.max_level + 2
        if len(coeffs) < need:
            raise ModuleError(f"level {module.max_level} needs {need - 1} series coefficients, got {len(coeffs) - 1}")
        if coeffs[0] != 0:
            raise ModuleError("the map must fix the origin")
        self.module = module
        self.coefficients = coeffs
        a1 = complex(coeffs[1])
        normalised = [0j, 1.0] + [complex(coeffs[k]) / a1 ** k for k in range(2, need)]
        self.vector_field = vector_field_coefficients(normalised, module.max_level + 1)
        gen = module.operator_matrix({k: v for k, v in enumerate(self.vector_field, start=1)
                                      if k <= module.max_level})
        expo = np.eye(module.total_dim, dtype=complex)
        term = np.eye(module.total_dim, dtype=complex)
        for n in range(1, module.max_level + 1):
            term = term @ gen / n
            expo = expo + term
        weights = float(module.h) + module.level_diagonal()
        scale = np.exp(weights * cmath.log(a1))
        self.matrix = expo * scale[None, :]

    def block(self, out_level: int, in_level: int) -> np.ndarray:
        off = self.module.offsets()
        return self.matrix[off[out_level]:off[out_level + 1], off[in_level]:off[in_level + 1]]

    def __matmul__(self, other):
        return self.matrix @ (other.matrix if isinstance(other, CoordMapOperator) else other)


def gamma_operator(series: Sequence[complex], module: TruncatedModule) -> CoordMapOperator:
    return CoordMapOperator(module, series)


# ---- characters ------------------------------------------------------------------


def kac_character_dims(p: int, q: int, r: int, s: int, max_level: int) -> List[int]:
    """Graded dimensions of the irreducible module from the alternating Kac sum."""
    def eta_dims(shift):
        out = [0] * (max_level + 1)
        for n in range(shift, max_level + 1):
            out[n] = len(partitions(n - shift))
        return out

    total = [0] * (max_level + 1)
    base = ((q * r - p * s) ** 2 - (p - q) ** 2) // (4 * p * q)
    k = -max_level - 2
    while k <= max_level + 2:
        for sign, ss in ((1, s), (-1, -s)):
            num = (2 * p * q * k + q * r - p * ss) ** 2 - (p - q) ** 2
            weight = num // (4 * p * q) - base
            if 0 <= weight <= max_level:
                for n, d in enumerate(eta_dims(weight)):
                    total[n] += sign * d
        k += 1
    return total


def graded_character(module_or_dims, nome: complex, h=None, c=None) -> complex:
    """q^{h - c/24} sum_n dim_n q^n over the truncation."""
    if isinstance(module_or_dims, TruncatedModule):
        dims = module_or_dims.graded_dims
        h, c = module_or_dims.h, module_or_dims.c
    else:
        dims = list(module_or_dims)
    if abs(nome) >= 1:
        raise ModuleError("the nome must lie inside the unit disc")
    lead = cmath.exp((float(h) - float(c) / 24) * cmath.log(nome))
    return lead * sum(d * nome ** n for n, d in enumerate(dims))
