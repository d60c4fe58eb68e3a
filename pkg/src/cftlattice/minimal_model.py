"""Chiral data of the A-series Virasoro minimal models M(p, q).

Weights and fusion are exact (``fractions.Fraction`` / int).  The modular
S-matrix and the fusing matrices are evaluated with mpmath at a configurable
number of decimal digits.

Fusing matrices use the tree convention

    ((i j)_p k)_l  =  sum_q  F_{pq}[j k; i l]  (i (j k)_q)_l

which is the same ordering as ``f_symbol(b, k, a, c, i, j)`` with
``p=b, q=k, j=a, k=c, i=i, l=j``.  Blocks are normalised to unit leading
coefficient in both channels, so F also gives the boundary OPE constants.
"""
from __future__ import annotations

import os
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd
from typing import Dict, Iterable, List, NamedTuple, Optional, Tuple

import mpmath

DEFAULT_PRECISION = 64
CACHE_ENV = "CFTLATTICE_CACHE_DIR"


class ModelError(ValueError):
    """Invalid model parameters or labels."""


class ConsistencyError(RuntimeError):
    """An internal identity check on the F-symbols failed."""


class KacLabel(NamedTuple):
    r: int
    s: int

    def __str__(self):
        return f"({self.r},{self.s})"


Label = KacLabel
FKey = Tuple[KacLabel, KacLabel, KacLabel, KacLabel, KacLabel, KacLabel]


def su2_fusion(a: int, b: int, level: int) -> List[int]:
    """Truncated su(2) product a x b for Dynkin-shifted labels 1..level-1."""
    top = min(a + b - 1, 2 * level - a - b - 1)
    return list(range(abs(a - b) + 1, top + 1, 2))


@lru_cache(maxsize=None)
def _weight_formula(r: int, s: int, t: Fraction) -> Fraction:
    return ((r - s * t) ** 2 - (1 - t) ** 2) / (4 * t)


class MinimalModel:
    """The minimal model M(p, q) with t = p/q."""

    def __init__(self, p: int, q: int, precision: int = DEFAULT_PRECISION,
                 cache_dir: Optional[str] = None, use_cache: bool = True):
        if p < 3 or q < 3:
            raise ModelError(f"need p, q >= 3, got ({p}, {q})")
        if gcd(p, q) != 1:
            raise ModelError(f"p and q must be coprime, got ({p}, {q})")
        self.p = p
        self.q = q
        self.precision = precision
        self.t = Fraction(p, q)
        self.use_cache = use_cache
        self._cache_dir = cache_dir
        self._fsym: Optional[Dict[FKey, mpmath.mpf]] = None
        self._fusing: Optional[Dict[FKey, mpmath.mpf]] = None
        self.cache_hit: Optional[bool] = None

    def __repr__(self):
        return f"MinimalModel({self.p}, {self.q})"

    def __eq__(self, other):
        return isinstance(other, MinimalModel) and (self.p, self.q) == (other.p, other.q)

    def __hash__(self):
        return hash((self.p, self.q))

    # ---- labels ---------------------------------------------------------

    def canonical(self, r: int, s: int) -> KacLabel:
        if not (1 <= r <= self.p - 1 and 1 <= s <= self.q - 1):
            raise ModelError(f"label ({r},{s}) outside the Kac table of M({self.p},{self.q})")
        other = (self.p - r, self.q - s)
        return KacLabel(*min((r, s), other))

    def label(self, r: int, s: int) -> KacLabel:
        return self.canonical(r, s)

    @cached_property
    def labels(self) -> List[KacLabel]:
        found = {self.canonical(r, s) for r in range(1, self.p) for s in range(1, self.q)}
        return sorted(found)

    @cached_property
    def index(self) -> Dict[KacLabel, int]:
        return {a: n for n, a in enumerate(self.labels)}

    @property
    def identity(self) -> KacLabel:
        return KacLabel(1, 1)

    def check_label(self, a) -> KacLabel:
        a = KacLabel(*a)
        canon = self.canonical(a.r, a.s)
        if canon != a:
            raise ModelError(f"label {a} is not canonical (use {canon})")
        return a

    # ---- exact data -----------------------------------------------------

    @cached_property
    def central_charge(self) -> Fraction:
        t = self.t
        return 1 - 6 * (1 - t) ** 2 / t

    def weight(self, a) -> Fraction:
        a = KacLabel(*a)
        if not (1 <= a.r <= self.p - 1 and 1 <= a.s <= self.q - 1):
            raise ModelError(f"label {a} outside the Kac table")
        return _weight_formula(a.r, a.s, self.t)

    def formal_weight(self, r: int, s: int) -> Fraction:
        """Kac formula evaluated at any integers, including the table edges."""
        return _weight_formula(r, s, self.t)

    def fusion(self, i, j, k) -> int:
        """N_{ij}^k in {0, 1}."""
        i, j, k = KacLabel(*i), KacLabel(*j), KacLabel(*k)
        return int(k in self._products(i, j))

    def fusion_products(self, i, j) -> List[KacLabel]:
        return sorted(self._products(KacLabel(*i), KacLabel(*j)))

    @cached_property
    def _product_table(self) -> Dict[Tuple[KacLabel, KacLabel], frozenset]:
        table = {}
        for i in self.labels:
            for j in self.labels:
                out = set()
                for r in su2_fusion(i.r, j.r, self.p):
                    for s in su2_fusion(i.s, j.s, self.q):
                        out.add(self.canonical(r, s))
                table[i, j] = frozenset(out)
        return table

    def _products(self, i: KacLabel, j: KacLabel) -> frozenset:
        i = self.canonical(*i)
        j = self.canonical(*j)
        return self._product_table[i, j]

    # ---- modular data ---------------------------------------------------

    def s_matrix_mp(self, a, b) -> mpmath.mpf:
        a, b = KacLabel(*a), KacLabel(*b)
        with mpmath.workdps(self.precision):
            t = mpmath.mpf(self.p) / self.q
            sign = -1 if (1 + a.r * b.s + a.s * b.r) % 2 else 1
            return (sign * mpmath.sqrt(mpmath.mpf(8) / (self.p * self.q))
                    * mpmath.sin(mpmath.pi * a.r * b.r / t)
                    * mpmath.sin(mpmath.pi * a.s * b.s * t))

    def s_matrix(self, a, b) -> float:
        return float(self.s_matrix_mp(a, b))

    @cached_property
    def s_array(self):
        import numpy as np
        n = len(self.labels)
        out = np.empty((n, n))
        for x, a in enumerate(self.labels):
            for y, b in enumerate(self.labels):
                out[x, y] = self.s_matrix(a, b)
        return out

    def quantum_dim(self, a) -> float:
        return float(self.quantum_dim_mp(a))

    def quantum_dim_mp(self, a) -> mpmath.mpf:
        one = self.identity
        with mpmath.workdps(self.precision):
            return self.s_matrix_mp(a, one) / self.s_matrix_mp(one, one)

    @property
    def total_dim_sq(self) -> float:
        """Dim(C) = sum_a dim(a)^2 = 1/S_11^2."""
        return 1.0 / self.s_matrix(self.identity, self.identity) ** 2

    # ---- F-symbols ------------------------------------------------------

    def f_symbol_mp(self, b, k, a, c, i, j) -> mpmath.mpf:
        key = tuple(self.canonical(*x) for x in (b, k, a, c, i, j))
        return self.f_table.get(key, mpmath.mpf(0))

    def f_symbol(self, b, k, a, c, i, j) -> float:
        """F_{bk}[a c; i j]; zero when the label tuple is not admissible."""
        return float(self.f_symbol_mp(b, k, a, c, i, j))

    def boundary_ope(self, a, b, c, i, j, k) -> float:
        """C^{(abc)k}_{ij}: psi^{(ab)}_i psi^{(bc)}_j -> psi^{(ac)}_k."""
        return self.f_symbol(b, k, a, c, i, j)

    @property
    def f_table(self) -> Dict[FKey, mpmath.mpf]:
        """F-symbols keyed by (b, k, a, c, i, j)."""
        if self._fsym is None:
            self._fsym = self._load_or_build()
        return self._fsym

    @property
    def fusing_table(self) -> Dict[FKey, mpmath.mpf]:
        """Block fusing matrices keyed by (p, q, j, k, i, l), tree convention."""
        if self._fusing is None:
            with mpmath.workdps(self.precision):
                self._fusing = transpose_inverse_blocks(self, self.f_table)
        return self._fusing

    def admissible(self, p, q, j, k, i, l) -> bool:
        return bool(self.fusion(i, j, p) and self.fusion(p, k, l)
                    and self.fusion(j, k, q) and self.fusion(i, q, l))

    def f_keys(self) -> Iterable[FKey]:
        prods = self._product_table
        for i in self.labels:
            for j in self.labels:
                for p in prods[i, j]:
                    for k in self.labels:
                        for l in prods[p, k]:
                            for q in prods[j, k]:
                                if l in prods[i, q]:
                                    yield (p, q, j, k, i, l)

    def _load_or_build(self) -> Dict[FKey, mpmath.mpf]:
        path = self.cache_path() if self.use_cache else None
        if path is not None:
            table = read_f_cache(path, self)
            if table is not None:
                self.cache_hit = True
                return table
        fusing = FusingBootstrap(self).run()
        with mpmath.workdps(self.precision + 10):
            table = transpose_inverse_blocks(self, fusing)
        with mpmath.workdps(self.precision):
            table = {key: +val for key, val in table.items()}
            self._fusing = {key: +val for key, val in fusing.items()}
        self.cache_hit = False
        if path is not None:
            write_f_cache(path, self, table)
        return table

    def cache_path(self) -> Optional[str]:
        base = self._cache_dir or os.environ.get(CACHE_ENV)
        if base is None:
            base = os.path.join(os.path.expanduser("~"), ".cache", "cftlattice")
        return os.path.join(base, f"fsym_{self.p}_{self.q}_{self.precision}.txt")

    def f_residuals(self) -> Dict[str, float]:
        """Largest violations of the S-relation and the triple identity."""
        s_rel = 0.0
        triple = 0.0
        one = self.identity
        for a in self.labels:
            for b in self.labels:
                for i in self._products(a, b):
                    lhs = self.f_symbol(b, one, a, a, i, i) * self.s_matrix(a, one)
                    rhs = self.f_symbol(a, one, b, b, i, i) * self.s_matrix(b, one)
                    s_rel = max(s_rel, abs(lhs - rhs))
        for (b, k, c, a, j, i) in self.f_keys():
            # key order is (p, q, j, k, i, l) = (b, k, c, a, j, i) for F_{bk}[c a; j i]
            lhs = self.f_symbol(b, k, c, a, j, i) * self.f_symbol(c, one, a, a, k, k)
            rhs = self.f_symbol(c, i, a, b, k, j) * self.f_symbol(b, one, a, a, i, i)
            triple = max(triple, abs(lhs - rhs))
        return {"s_relation": s_rel, "triple": triple}


def pentagon_residual(model: MinimalModel) -> float:
    """Largest violation of the pentagon relation over all admissible trees.

    With legs (i, a, b, c) -> l:
      F_{rs}[b c; p l] F_{pq}[a s; i l]
        = sum_m F_{pm}[a b; i r] F_{rq}[m c; i l] F_{ms}[b c; a q]
    """
    import numpy as np
    # extended precision keeps the absolute residual meaningful for entries of size ~1e6
    fus = {key: np.longdouble(mpmath.nstr(val, 25)) for key, val in model.fusing_table.items()}
    prods = model._product_table
    labels = model.labels
    zero = np.longdouble(0)
    worst = zero
    for i in labels:
        for a in labels:
            for b in labels:
                for c in labels:
                    for l in labels:
                        ps = [x for x in prods[i, a]]
                        for p in ps:
                            for r in prods[p, b]:
                                if l not in prods[r, c]:
                                    continue
                                for s in prods[b, c]:
                                    if l not in prods[p, s]:
                                        continue
                                    left_rs = fus.get((r, s, b, c, p, l), zero)
                                    for q in prods[a, s]:
                                        if l not in prods[i, q]:
                                            continue
                                        lhs = left_rs * fus.get((p, q, a, s, i, l), zero)
                                        rhs = zero
                                        for mm in prods[a, b]:
                                            rhs += (fus.get((p, mm, a, b, i, r), zero)
                                                    * fus.get((r, q, mm, c, i, l), zero)
                                                    * fus.get((mm, s, b, c, a, q), zero))
                                        worst = max(worst, abs(lhs - rhs))
    return float(worst)


# ---- F-symbol bootstrap -------------------------------------------------


def riemann_connection(alpha, beta, gamma):
    """Connection matrix of a Riemann P-function between x=0 and x=1.

    ``alpha``, ``beta``, ``gamma`` are the exponent pairs at 0, 1 and infinity
    (as x**alpha, (1-x)**beta, x**-gamma).  Entry [m][n] expands the solution
    with exponent alpha[m] at 0 (unit leading coefficient) in solutions with
    exponent beta[n] at 1 (unit leading coefficient).
    """
    out = [[None, None], [None, None]]
    for m in range(2):
        for n in range(2):
            a, a2 = alpha[m], alpha[1 - m]
            b, b2 = beta[n], beta[1 - n]
            out[m][n] = (mpmath.gamma(1 + a - a2) * mpmath.gamma(b2 - b)
                         * mpmath.rgamma(a + b2 + gamma[0]) * mpmath.rgamma(a + b2 + gamma[1]))
    return out


class FusingBootstrap:
    """Build all F_{pq}[j k; i l] from the two degenerate generators.

    Seeds: fusing matrices with the (1,2) or (2,1) field in the j or k slot
    come from the hypergeometric connection formula.  Every other j is reached
    by the pentagon relation, fusing one generator at a time.
    """

    def __init__(self, model: MinimalModel):
        self.model = model
        m = model
        self.gens = {"s": m.canonical(1, 2), "r": m.canonical(2, 1)}
        self.table: Dict[FKey, mpmath.mpf] = {}
        self._seeds: Dict[tuple, mpmath.mpf] = {}
        self._inverses: Dict[tuple, tuple] = {}

    def _shift(self, a: KacLabel, kind: str) -> List[Tuple[int, int]]:
        if kind == "s":
            return [(a.r, a.s + 1), (a.r, a.s - 1)]
        return [(a.r + 1, a.s), (a.r - 1, a.s)]

    def _channel_rep(self, a: KacLabel, target: KacLabel, kind: str):
        """Integer pair among the two formal shifts of a equal to target."""
        m = self.model
        for rep in (a, KacLabel(m.p - a.r, m.q - a.s)):
            for r, s in self._shift(rep, kind):
                if 1 <= r < m.p and 1 <= s < m.q and m.canonical(r, s) == target:
                    return rep, (r, s)
        raise ConsistencyError(f"{target} is not a generator shift of {a}")

    def _exponent_pair(self, base: KacLabel, chosen: KacLabel, kind: str, fn):
        """(exponent of the chosen channel, exponent of the other formal channel)."""
        m = self.model
        rep, pair = self._channel_rep(base, chosen, kind)
        shifts = self._shift(rep, kind)
        other = shifts[1] if shifts[0] == pair else shifts[0]
        return fn(m.formal_weight(*pair)), fn(m.formal_weight(*other))

    def seed_j(self, gen_kind: str, p, q, k, i, l) -> mpmath.mpf:
        """F_{pq}[g k; i l] with the generator g in the j slot."""
        key = ("j", gen_kind, p, q, k, i, l)
        if key not in self._seeds:
            self._seeds[key] = self._seed_j(gen_kind, p, q, k, i, l)
        return self._seeds[key]

    def seed_k(self, gen_kind: str, p, q, j, i, l) -> mpmath.mpf:
        """F_{pq}[j g; i l] with the generator g in the k slot."""
        key = ("k", gen_kind, p, q, j, i, l)
        if key not in self._seeds:
            self._seeds[key] = self._seed_k(gen_kind, p, q, j, i, l)
        return self._seeds[key]

    def _seed_j(self, gen_kind, p, q, k, i, l):
        m = self.model
        g = self.gens[gen_kind]
        hg, hi, hk, hl = (m.weight(x) for x in (g, i, k, l))
        a0, a1 = self._exponent_pair(i, p, gen_kind, lambda h: h - hi - hg)
        b0, b1 = self._exponent_pair(k, q, gen_kind, lambda h: h - hg - hk)
        shifts = self._shift(l, gen_kind)
        gam = [hg + m.formal_weight(*x) - hl for x in shifts]
        return self._connect((a0, a1), (b0, b1), gam)

    def _seed_k(self, gen_kind, p, q, j, i, l):
        m = self.model
        g = self.gens[gen_kind]
        hg, hi, hj, hl = (m.weight(x) for x in (g, i, j, l))
        a0, a1 = self._exponent_pair(l, p, gen_kind, lambda h: h - hi - hj)
        b0, b1 = self._exponent_pair(j, q, gen_kind, lambda h: h - hj - hg)
        shifts = self._shift(i, gen_kind)
        gam = [hj + m.formal_weight(*x) - hl for x in shifts]
        return self._connect((a0, a1), (b0, b1), gam)

    @staticmethod
    def _connect(alpha, beta, gamma) -> mpmath.mpf:
        a, a2 = (mpmath.mpf(x.numerator) / x.denominator for x in alpha)
        b, b2 = (mpmath.mpf(x.numerator) / x.denominator for x in beta)
        g0, g1 = (mpmath.mpf(x.numerator) / x.denominator for x in gamma)
        return (mpmath.gamma(1 + a - a2) * mpmath.gamma(b2 - b)
                * mpmath.rgamma(a + b2 + g0) * mpmath.rgamma(a + b2 + g1))

    def depth_path(self, a: KacLabel):
        """Parent label and generator kind used to reach a; None for the identity."""
        m = self.model
        reps = [a, KacLabel(m.p - a.r, m.q - a.s)]
        rep = min(reps, key=lambda x: (x.r + x.s, x.s))
        if rep == (1, 1):
            return None
        if rep.s >= 2:
            return m.canonical(rep.r, rep.s - 1), "s"
        return m.canonical(rep.r - 1, rep.s), "r"

    def depth(self, a: KacLabel) -> int:
        n = 0
        while True:
            step = self.depth_path(a)
            if step is None:
                return n
            a = step[0]
            n += 1

    def run(self) -> Dict[FKey, mpmath.mpf]:
        m = self.model
        with mpmath.workdps(m.precision + 10):
            keys_by_j: Dict[KacLabel, List[FKey]] = {}
            for key in m.f_keys():
                keys_by_j.setdefault(key[2], []).append(key)
            order = sorted(keys_by_j, key=self.depth)
            for j in order:
                for key in keys_by_j[j]:
                    self.table[key] = self._compute(key)
            floor = mpmath.mpf(10) ** (-(m.precision - 8))
            return {key: (val if abs(val) > floor else mpmath.mpf(0))
                    for key, val in self.table.items()}

    def _f(self, key) -> mpmath.mpf:
        return self.table.get(key, mpmath.mpf(0))

    def _compute(self, key: FKey) -> mpmath.mpf:
        p, q, j, k, i, l = key
        m = self.model
        one = m.identity
        if j == one:
            return mpmath.mpf(1) if (p == i and q == k) else mpmath.mpf(0)
        for kind, g in self.gens.items():
            if j == g:
                return self.seed_j(kind, p, q, k, i, l)
        parent, kind = self.depth_path(j)
        return self._pentagon_step(key, parent, kind)

    def _pentagon_step(self, key: FKey, a: KacLabel, kind: str) -> mpmath.mpf:
        # Pentagon with legs (i, a, g, c) -> l:
        #   F_{rs}[g c; p l] F_{pq}[a s; i l]
        #     = sum_m F_{pm}[a g; i r] F_{rq}[m c; i l] F_{ms}[g c; a q]
        r, q, mm, c, i, l = key
        m = self.model
        g = self.gens[kind]
        prods = m._product_table
        p_list = sorted(x for x in prods[i, a] if r in prods[x, g])
        m_list = sorted(x for x in prods[a, g] if r in prods[i, x])
        if mm not in m_list or len(p_list) != len(m_list):
            raise ConsistencyError(f"tree spaces do not match for {key}")
        inv_key = (kind, a, i, r)
        if inv_key not in self._inverses:
            mat = mpmath.matrix(len(p_list), len(m_list))
            for x, pp in enumerate(p_list):
                for y, m2 in enumerate(m_list):
                    mat[x, y] = self.seed_k(kind, pp, m2, a, i, r)
            self._inverses[inv_key] = mat ** -1
        inv = self._inverses[inv_key]
        row = m_list.index(mm)
        best = None
        for s in sorted(prods[g, c]):
            if q not in prods[a, s]:
                continue
            piv = self.seed_j(kind, mm, s, c, a, q)
            if best is None or abs(piv) > abs(best[1]):
                best = (s, piv)
        if best is None or best[1] == 0:
            raise ConsistencyError(f"no pivot for {key}")
        s, piv = best
        total = mpmath.mpf(0)
        for x, pp in enumerate(p_list):
            left = self._seed_or_table_j(kind, r, s, c, pp, l)
            if left == 0:
                continue
            total += inv[row, x] * left * self._f((pp, q, a, s, i, l))
        return total / piv

    def _seed_or_table_j(self, kind, p, q, k, i, l) -> mpmath.mpf:
        m = self.model
        prods = m._product_table
        g = self.gens[kind]
        if not (p in prods[i, g] and l in prods[p, k] and q in prods[g, k] and l in prods[i, q]):
            return mpmath.mpf(0)
        return self.seed_j(kind, p, q, k, i, l)


def transpose_inverse_blocks(model: MinimalModel, table: Dict[FKey, mpmath.mpf]) -> Dict[FKey, mpmath.mpf]:
    """Map F to G with G_{pq}[j k; i l] = (F[j k; i l]^-1)_{qp}.

    The map is an involution.  It converts the tree-convention fusing
    matrices into the F-symbols that equal the boundary OPE constants.
    """
    prods = model._product_table
    out = {}
    for j in model.labels:
        for k in model.labels:
            for i in model.labels:
                for l in model.labels:
                    rows = sorted(x for x in prods[i, j] if l in prods[x, k])
                    if not rows:
                        continue
                    cols = sorted(x for x in prods[j, k] if l in prods[i, x])
                    mat = mpmath.matrix(len(rows), len(cols))
                    for x, p in enumerate(rows):
                        for y, q in enumerate(cols):
                            mat[x, y] = table.get((p, q, j, k, i, l), 0)
                    inv = mat ** -1
                    for x, p in enumerate(rows):
                        for y, q in enumerate(cols):
                            out[p, q, j, k, i, l] = inv[y, x]
    return out


# ---- cache file ---------------------------------------------------------


def _fmt_label(a: KacLabel) -> str:
    return f"{a.r}:{a.s}"


def _parse_label(text: str) -> KacLabel:
    r, s = text.split(":")
    return KacLabel(int(r), int(s))


def write_f_cache(path: str, model: MinimalModel, table: Dict[FKey, mpmath.mpf]) -> None:
    os.makedirs(os.path.dirname(path), exist_ok=True)
    lines = []
    with mpmath.workdps(model.precision):
        for key in sorted(table):
            labels = " ".join(_fmt_label(x) for x in key)
            value = mpmath.nstr(table[key], model.precision, min_fixed=-1, max_fixed=-1)
            lines.append(f"{model.p} {model.q} {labels} {value} {model.precision}\n")
    tmp = f"{path}.{os.getpid()}.tmp"
    with open(tmp, "w") as fh:
        fh.writelines(lines)
    os.replace(tmp, path)


def read_f_cache(path: str, model: MinimalModel) -> Optional[Dict[FKey, mpmath.mpf]]:
    if not os.path.exists(path):
        return None
    table = {}
    with mpmath.workdps(model.precision):
        with open(path) as fh:
            for line in fh:
                parts = line.split()
                if len(parts) != 10:
                    return None
                if (int(parts[0]), int(parts[1]), int(parts[9])) != (model.p, model.q, model.precision):
                    return None
                key = tuple(_parse_label(x) for x in parts[2:8])
                table[key] = mpmath.mpf(parts[8])
    return table


# ---- module-level operations --------------------------------------------


def central_charge(model: MinimalModel) -> Fraction:
    return model.central_charge


def conformal_weight(model: MinimalModel, label) -> Fraction:
    return model.weight(model.check_label(label))


def fusion_coeff(model: MinimalModel, i, j, k) -> int:
    return model.fusion(i, j, k)


def s_matrix(model: MinimalModel, i, j) -> float:
    return model.s_matrix(i, j)


def quantum_dim(model: MinimalModel, a) -> float:
    return model.quantum_dim(a)


def f_symbol(model: MinimalModel, b, k, a, c, i, j) -> float:
    return model.f_symbol(b, k, a, c, i, j)
