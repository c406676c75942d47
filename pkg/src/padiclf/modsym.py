"""Weight-2 modular symbols for Gamma0(N) over exact rationals.

Builds the Manin-symbol presentation of the space of modular symbols of
weight 2 and level N, split into +/- eigenspaces of the real involution,
with the boundary map to cusp classes, the cuspidal subspace, Hecke
operators via Heilbronn matrices, eigensymbol extraction, and
period-normalized evaluation on paths {oo -> r} through continued
fractions.

All linear algebra is exact over Q; floating point enters only in the
normalization step, where the global rational scale of the symbol is
reconstructed from numerically computed L-values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import divisors, primerange

from .curves import (
    Curve,
    is_fundamental_discriminant,
    kronecker,
    l_value_numeric,
    real_periods,
    trace_of_frobenius,
)
from .errors import (
    BadLevel,
    BadReduction,
    EigenspaceNotCutOut,
    NormalizationAmbiguous,
)

# Sparse vector: column id -> nonzero Fraction coefficient.
Vec = Dict[int, Fraction]


# ----------------------------------------------------------------------
# sparse vector helpers
# ----------------------------------------------------------------------

def _vec_add_scaled(dst: Vec, src: Vec, c: Fraction) -> None:
    """dst += c * src, dropping entries that cancel to zero."""
    if not c:
        return
    for k, v in src.items():
        w = dst.get(k, 0) + c * v
        if w:
            dst[k] = w
        else:
            dst.pop(k, None)


def _vec_scale(v: Vec, c: Fraction) -> Vec:
    if c == 1:
        return dict(v)
    return {k: c * x for k, x in v.items()} if c else {}


def _pairing(w: Dict[int, int], v: Vec) -> Fraction:
    if len(w) > len(v):
        return sum((Fraction(w[k]) * x for k, x in v.items() if k in w),
                   Fraction(0))
    return sum((Fraction(c) * v[k] for k, c in w.items() if k in v),
               Fraction(0))


def _integerize(v: Vec) -> Dict[int, int]:
    """Scale a rational vector to coprime integers, first nonzero > 0."""
    if not v:
        return {}
    den = 1
    for x in v.values():
        den = den * x.denominator // math.gcd(den, x.denominator)
    ints = {k: int(x * den) for k, x in v.items()}
    g = 0
    for x in ints.values():
        g = math.gcd(g, x)
    if g > 1:
        ints = {k: x // g for k, x in ints.items()}
    lead = ints[min(ints)]
    if lead < 0:
        ints = {k: -x for k, x in ints.items()}
    return ints


# ----------------------------------------------------------------------
# sparse reduced row echelon form
# ----------------------------------------------------------------------

def _sparse_rref(rows: Sequence[Vec], pivot_limit: Optional[int] = None,
                 ) -> Tuple[List[Tuple[int, Vec]], List[Vec]]:
    """Fully reduce a list of sparse rows (Gauss-Jordan).

    Pivots are chosen only among columns < pivot_limit (all columns when
    None).  Returns (pivots, leftovers): `pivots` is a list of
    (pivot_column, row) with the pivot coefficient scaled to 1 and the
    pivot column eliminated from every other row; `leftovers` are the
    nonzero rows that contain no pivotable column.
    """
    store: Dict[int, Vec] = {i: dict(r) for i, r in enumerate(rows) if r}
    col_rows: Dict[int, set] = {}
    for rid, row in store.items():
        for c in row:
            col_rows.setdefault(c, set()).add(rid)

    def pivotable(c: int) -> bool:
        return pivot_limit is None or c < pivot_limit

    pending = set(store)
    settled: List[Tuple[int, int]] = []      # (pivot column, row id)
    leftovers: List[Vec] = []
    while pending:
        # shortest pending row (deterministic tiebreak by id)
        rid = min(pending, key=lambda i: (len(store[i]), i))
        pending.discard(rid)
        row = store[rid]
        if not row:
            del store[rid]
            continue
        cand = [c for c in row if pivotable(c)]
        if not cand:
            # never touched again: leftovers contain no pivotable column,
            # so no later elimination can reach them
            leftovers.append(row)
            del store[rid]
            for c in row:
                col_rows[c].discard(rid)
            continue
        # pivot column with fewest other occurrences (deterministic)
        pc = min(cand, key=lambda c: (len(col_rows[c]), c))
        inv = 1 / row[pc]
        if inv != 1:
            for c in list(row):
                row[c] *= inv
        for other in sorted(col_rows[pc] - {rid}):
            orow = store[other]
            coef = orow[pc]
            before = set(orow)
            _vec_add_scaled(orow, row, -coef)
            for c in before - set(orow):
                col_rows[c].discard(other)
            for c in set(orow) - before:
                col_rows.setdefault(c, set()).add(other)
        # the pivot row stays in the pool so that later pivots are
        # eliminated from it too (full Gauss-Jordan reduction)
        settled.append((pc, rid))
    pivots = [(pc, store[rid]) for pc, rid in settled]
    return pivots, leftovers


def _kernel(images: Sequence[Vec], track: int, offset: int = 1 << 30,
            ) -> List[Vec]:
    """Kernel of the linear map e_t -> images[t] (t < track).

    Returns sparse coefficient vectors k (over t) with
    sum_t k[t] * images[t] = 0, inter-reduced.
    """
    rows: List[Vec] = []
    for t in range(track):
        row: Vec = {offset + t: Fraction(1)}
        for c, x in images[t].items():
            row[c] = x
        rows.append(row)
    _, leftovers = _sparse_rref(rows, pivot_limit=offset)
    out = []
    for row in leftovers:
        out.append({c - offset: x for c, x in row.items()})
    return out


# ----------------------------------------------------------------------
# P^1(Z/N)
# ----------------------------------------------------------------------

def p1_normalize(N: int, u: int, v: int) -> Tuple[int, int]:
    """Canonical representative of the projective class of (u : v)."""
    u %= N
    v %= N
    if N == 1:
        return (0, 0)
    if math.gcd(math.gcd(u, v), N) != 1:
        raise ValueError(f"({u}:{v}) is not a point of P1(Z/{N})")
    if u == 0:
        return (0, 1)
    g = math.gcd(u, N)
    m = N // g
    t0 = pow((u // g) % m, -1, m)
    best: Optional[int] = None
    for k in range(g):
        t = (t0 + k * m) % N
        if math.gcd(t, N) == 1:
            cand = (t * v) % N
            if best is None or cand < best:
                best = cand
    assert best is not None
    return (g, best)


def p1_list(N: int) -> Tuple[List[Tuple[int, int]], Dict[Tuple[int, int], int]]:
    """All points of P^1(Z/N) as canonical reps, with an index map."""
    reps: List[Tuple[int, int]] = []
    index: Dict[Tuple[int, int], int] = {}
    for g in sorted(int(d) for d in divisors(N)):
        gg = g % N
        for d in range(N):
            if math.gcd(math.gcd(gg, d), N) != 1:
                continue
            r = p1_normalize(N, gg, d)
            if r not in index:
                index[r] = len(reps)
                reps.append(r)
    return reps, index


# Right action of the standard 2x2 generators on row classes (u : v).
def _act_S(u: int, v: int, N: int) -> Tuple[int, int]:
    return (v % N, (-u) % N)


def _act_M(u: int, v: int, N: int) -> Tuple[int, int]:
    # order-3 element [[0, -1], [1, -1]]
    return (v % N, (-u - v) % N)


def _act_J(u: int, v: int, N: int) -> Tuple[int, int]:
    return ((-u) % N, v % N)


# ----------------------------------------------------------------------
# signed union-find for the two-term relations
# ----------------------------------------------------------------------

class _SignedUF:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.sign = [1] * n
        self.zero = [False] * n

    def find(self, i: int) -> Tuple[int, int]:
        chain = []
        j = i
        while self.parent[j] != j:
            chain.append(j)
            j = self.parent[j]
        for k in reversed(chain):
            p = self.parent[k]
            if p != j:
                self.sign[k] *= self.sign[p]
                self.parent[k] = j
        return (j, self.sign[i] if i != j else 1)

    def union(self, i: int, j: int, s: int) -> None:
        """Impose x_i = s * x_j."""
        ri, si = self.find(i)
        rj, sj = self.find(j)
        if ri == rj:
            if si != s * sj:
                self.zero[ri] = True
            return
        # x_ri = si^-1 * s * sj * x_rj  (signs are +-1)
        self.parent[ri] = rj
        self.sign[ri] = si * s * sj
        if self.zero[ri]:
            self.zero[rj] = True

    def is_zero(self, i: int) -> bool:
        r, _ = self.find(i)
        return self.zero[r]


# ----------------------------------------------------------------------
# cusps
# ----------------------------------------------------------------------

def _xgcd(a: int, b: int) -> Tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def _cusp_canonical(p: int, q: int) -> Tuple[int, int]:
    if q < 0:
        p, q = -p, -q
    if q == 0:
        return (1, 0)
    g = math.gcd(p, q)
    return (p // g, q // g)


def _cusp_equiv(N: int, c1: Tuple[int, int], c2: Tuple[int, int]) -> bool:
    """Gamma0(N)-equivalence of cusps in lowest terms."""
    p1, q1 = c1
    p2, q2 = c2

    def inv_mod(p: int, q: int) -> int:
        if q == 0:
            return 1 if p >= 0 else -1
        if q == 1:
            return 0
        return pow(p % q, -1, q)

    s1 = inv_mod(p1, q1)
    s2 = inv_mod(p2, q2)
    g = math.gcd(q1 * q2, N)
    return (s1 * q2 - s2 * q1) % g == 0


def _lift_to_sl2(c: int, d: int, N: int) -> Tuple[int, int, int, int]:
    """Integer matrix [[a, b], [c0, d0]] of det 1 with (c0, d0) = (c, d) mod N."""
    c0 = c % N
    d0 = d % N
    if c0 == 0 and math.gcd(c0, d0) != 1:
        c0 = N
    if math.gcd(c0, d0) != 1:
        k = 1
        while math.gcd(c0, d0 + k * N) != 1:
            k += 1
            assert k <= abs(c0) + 1
        d0 += k * N
    g, x, y = _xgcd(d0, c0)
    assert g == 1
    a, b = x, -y
    assert a * d0 - b * c0 == 1
    return (a, b, c0, d0)


# ----------------------------------------------------------------------
# Heilbronn matrices
# ----------------------------------------------------------------------

@lru_cache(maxsize=None)
def heilbronn_matrices(ell: int) -> Tuple[Tuple[int, int, int, int], ...]:
    """Matrices (a, b; c, d) of determinant ell with a > b >= 0, d > c >= 0."""
    out = []
    for a in range(1, ell + 1):
        for d in range(1, ell + 1):
            r = a * d - ell
            if r < 0:
                continue
            if r == 0:
                for c in range(d):
                    out.append((a, 0, c, d))
                for b in range(1, a):
                    out.append((a, b, 0, d))
            else:
                b = 1
                while b * b <= r:
                    if r % b == 0:
                        c = r // b
                        if b < a and c < d:
                            out.append((a, b, c, d))
                        b2, c2 = c, b
                        if b2 != b and b2 < a and c2 < d:
                            out.append((a, b2, c2, d))
                    b += 1
    out.sort()
    return tuple(out)


# ----------------------------------------------------------------------
# the symbol space
# ----------------------------------------------------------------------

@dataclass
class SymbolSpace:
    """Sign-split quotient of Manin symbols for Gamma0(N)."""

    N: int
    sign: int
    p1: List[Tuple[int, int]]
    p1_index: Dict[Tuple[int, int], int]
    expr: List[Vec]                 # P1 index -> vector over free positions
    free_reps: List[int]            # P1 indices serving as free generators
    dim: int
    cusp_basis: List[Vec]           # reduced basis of the cuspidal subspace
    cusp_pivots: List[int]
    cusp_dim: int
    n_cusp_classes: int
    _hecke_free: Dict[int, List[Vec]] = field(default_factory=dict, repr=False)
    _hecke_cusp: Dict[int, List[List[Fraction]]] = field(
        default_factory=dict, repr=False)

    # -- plumbing -------------------------------------------------------

    def index_of(self, u: int, v: int) -> int:
        return self.p1_index[p1_normalize(self.N, u, v)]

    def gen_expr(self, u: int, v: int) -> Vec:
        return self.expr[self.index_of(u, v)]

    def hecke_free_columns(self, ell: int) -> List[Vec]:
        """T_ell applied to each free generator, in free coordinates."""
        cols = self._hecke_free.get(ell)
        if cols is None:
            cols = [self._hecke_image(ell, j) for j in range(self.dim)]
            self._hecke_free[ell] = cols
        return cols

    def _hecke_image(self, ell: int, j: int) -> Vec:
        N = self.N
        u, v = self.p1[self.free_reps[j]]
        acc: Vec = {}
        for (a, b, c, d) in heilbronn_matrices(ell):
            u2 = (a * u + c * v) % N
            v2 = (b * u + d * v) % N
            if math.gcd(math.gcd(u2, v2), N) != 1:
                continue
            _vec_add_scaled(acc, self.expr[self.p1_index[p1_normalize(N, u2, v2)]],
                            Fraction(1))
        return acc

    def cusp_coordinates(self, v: Vec) -> Vec:
        """Coordinates of a cuspidal vector in the stored cuspidal basis."""
        coords: Vec = {}
        resid = dict(v)
        for i, (piv, row) in enumerate(zip(self.cusp_pivots, self.cusp_basis)):
            c = resid.get(piv)
            if c:
                coords[i] = c
                _vec_add_scaled(resid, row, -c)
        if resid:
            raise AssertionError("vector is not in the cuspidal subspace")
        return coords


def build_space(N: int, sign: int) -> SymbolSpace:
    """Construct the sign-quotient of weight-2 Manin symbols for Gamma0(N)."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if N < 1:
        raise ValueError("level must be positive")
    reps, index = p1_list(N)
    n = len(reps)
    uf = _SignedUF(n)
    for i, (u, v) in enumerate(reps):
        j = index[p1_normalize(N, *_act_S(u, v, N))]
        uf.union(i, j, -1)                      # x + xS = 0
        j = index[p1_normalize(N, *_act_J(u, v, N))]
        uf.union(i, j, sign)                    # xJ = sign * x

    # three-term relations over union-find representatives
    rows: List[Vec] = []
    seen = set()
    for i, (u, v) in enumerate(reps):
        i1 = index[p1_normalize(N, *_act_M(u, v, N))]
        u1, v1 = reps[i1]
        i2 = index[p1_normalize(N, *_act_M(u1, v1, N))]
        key = min(i, i1, i2)
        if key in seen:
            continue
        seen.add(key)
        row: Vec = {}
        for t in (i, i1, i2):
            r, s = uf.find(t)
            if uf.zero[r]:
                continue
            w = row.get(r, 0) + s
            if w:
                row[r] = Fraction(w)
            else:
                row.pop(r, None)
        if row:
            rows.append(row)

    pivots, leftovers = _sparse_rref(rows)
    assert not leftovers
    pivot_expr = {pc: row for pc, row in pivots}

    roots = sorted({uf.find(i)[0] for i in range(n)
                    if not uf.is_zero(i)})
    free_roots = [r for r in roots if r not in pivot_expr]
    free_pos = {r: k for k, r in enumerate(free_roots)}
    dim = len(free_roots)

    # expression of each root in the free basis
    root_expr: Dict[int, Vec] = {}
    for r in free_roots:
        root_expr[r] = {free_pos[r]: Fraction(1)}
    for pc, row in pivot_expr.items():
        e: Vec = {}
        for c, x in row.items():
            if c == pc:
                continue
            assert c in free_pos, "pivot row not fully reduced"
            e[free_pos[c]] = -x
        root_expr[pc] = e

    expr: List[Vec] = []
    for i in range(n):
        r, s = uf.find(i)
        if uf.zero[r]:
            expr.append({})
        else:
            base = root_expr[r]
            expr.append(base if s == 1 else _vec_scale(base, Fraction(-1)))

    free_reps = free_roots

    # boundary map and cuspidal subspace
    classes: List[Tuple[int, int]] = []

    def classify(cusp: Tuple[int, int]) -> Optional[Tuple[int, int]]:
        for k, r in enumerate(classes):
            if _cusp_equiv(N, cusp, r):
                return (k, 1)
        neg = _cusp_canonical(-cusp[0], cusp[1])
        for k, r in enumerate(classes):
            if _cusp_equiv(N, neg, r):
                return (k, sign)
        if sign == -1 and _cusp_equiv(N, cusp, neg):
            return None
        classes.append(cusp)
        return (len(classes) - 1, 1)

    boundary_rows: List[Vec] = []
    for r in free_reps:
        c, d = reps[r]
        a, b, c0, d0 = _lift_to_sl2(c, d, N)
        row: Vec = {}
        hit = classify(_cusp_canonical(a, c0))
        if hit is not None:
            _vec_add_scaled(row, {hit[0]: Fraction(hit[1])}, Fraction(1))
        hit = classify(_cusp_canonical(b, d0))
        if hit is not None:
            _vec_add_scaled(row, {hit[0]: Fraction(hit[1])}, Fraction(-1))
        boundary_rows.append(row)

    kernel = _kernel(boundary_rows, dim)
    kpivots, kleft = _sparse_rref(kernel)
    assert not kleft
    cusp_basis = [row for _, row in sorted(kpivots, key=lambda t: t[0])]
    cusp_pivots = [pc for pc, _ in sorted(kpivots, key=lambda t: t[0])]

    return SymbolSpace(
        N=N, sign=sign, p1=reps, p1_index=index, expr=expr,
        free_reps=free_reps, dim=dim,
        cusp_basis=cusp_basis, cusp_pivots=cusp_pivots,
        cusp_dim=len(cusp_basis), n_cusp_classes=len(classes),
    )


def hecke_operator(space: SymbolSpace, ell: int) -> List[List[Fraction]]:
    """Matrix of T_ell on the cuspidal subspace (columns of images)."""
    if space.N % ell == 0:
        raise BadLevel(f"T_{ell} via Heilbronn matrices needs ell coprime "
                       f"to the level {space.N}")
    cached = space._hecke_cusp.get(ell)
    if cached is not None:
        return cached
    free_cols = space.hecke_free_columns(ell)
    dim_c = space.cusp_dim
    mat: List[List[Fraction]] = [[Fraction(0)] * dim_c for _ in range(dim_c)]
    for j in range(dim_c):
        img: Vec = {}
        for pos, coef in space.cusp_basis[j].items():
            _vec_add_scaled(img, free_cols[pos], coef)
        coords = space.cusp_coordinates(img)
        for i, x in coords.items():
            mat[i][j] = x
    space._hecke_cusp[ell] = mat
    return mat


def hecke_trace(space: SymbolSpace, ell: int) -> Fraction:
    mat = hecke_operator(space, ell)
    return sum((mat[i][i] for i in range(space.cusp_dim)), Fraction(0))


# ----------------------------------------------------------------------
# eigensymbols
# ----------------------------------------------------------------------

@dataclass
class EigenSymbol:
    """A Hecke eigensymbol with its dual evaluation functional."""

    space: SymbolSpace
    curve: Curve
    sign: int
    line: Dict[int, int]            # eigenvector over free positions
    dual: Dict[int, int]            # dual left-eigenvector over free positions
    gen_values: List[Fraction]      # raw pairing with each P1 generator
    cut_primes: Tuple[int, ...]
    scaling: Optional[Fraction] = None
    norm_id: str = ""
    _grid: Optional[List[int]] = field(default=None, repr=False)
    _grid_denom: int = 1

    # -- evaluation -----------------------------------------------------

    @property
    def is_normalized(self) -> bool:
        return self.scaling is not None

    @property
    def denominator_bound(self) -> int:
        """Single integer m with all values in (1/m) Z."""
        self._ensure_grid()
        return self._grid_denom

    def _ensure_grid(self) -> None:
        if self._grid is not None:
            return
        scale = self.scaling if self.scaling is not None else Fraction(1)
        vals = [scale * g for g in self.gen_values]
        den = 1
        for x in vals:
            den = den * x.denominator // math.gcd(den, x.denominator)
        self._grid = [int(x * den) for x in vals]
        self._grid_denom = den

    def raw_path_value(self, r: Fraction) -> Fraction:
        total = Fraction(0)
        for idx in _path_symbol_indices(self.space, r):
            total += self.gen_values[idx]
        return total

    def value(self, r) -> Fraction:
        """Normalized symbol value on the path {oo -> r}."""
        self._ensure_grid()
        r = Fraction(r)
        total = 0
        grid = self._grid
        for idx in _path_symbol_indices(self.space, r):
            total += grid[idx]
        return Fraction(total, self._grid_denom)


def _path_symbol_indices(space: SymbolSpace, r: Fraction) -> List[int]:
    """Manin symbols of the unimodular path chain for {oo -> r}."""
    N = space.N
    num, den = r.numerator, r.denominator
    cfs = []
    n, d = num, den
    while d:
        a = n // d
        cfs.append(a)
        n, d = d, n - a * d
    out = []
    q_prev = 0                      # q_{-1}
    q_cur = 1                       # q_0 after first step
    p_prev, p_cur = 1, cfs[0]
    for k in range(len(cfs)):
        if k > 0:
            p_prev, p_cur = p_cur, cfs[k] * p_cur + p_prev
            q_prev, q_cur = q_cur, cfs[k] * q_cur + q_prev
        qk = q_cur if k % 2 == 1 else -q_cur
        out.append(space.p1_index[p1_normalize(N, qk, q_prev)])
    return out


def eigensymbol(space: SymbolSpace, curve: Curve,
                prime_bound: int = 100) -> EigenSymbol:
    """Cut out the one-dimensional Hecke eigenline attached to the curve."""
    if curve.conductor != space.N:
        raise BadLevel(f"curve conductor {curve.conductor} does not match "
                       f"space level {space.N}")
    N = space.N
    usable: List[Tuple[int, int]] = []
    for ell in primerange(2, prime_bound + 1):
        if N % ell == 0:
            continue
        try:
            usable.append((int(ell), trace_of_frobenius(curve, int(ell))))
        except BadReduction:
            continue

    # primal line inside the cuspidal subspace
    vectors: List[Vec] = [{i: Fraction(1)} for i in range(space.cusp_dim)]
    cut: List[int] = []
    for ell, a in usable:
        if len(vectors) == 1:
            break
        mat = hecke_operator(space, ell)
        images = []
        for v in vectors:
            img: Vec = {}
            for j, coef in v.items():
                for i in range(space.cusp_dim):
                    x = mat[i][j]
                    if x:
                        w = img.get(i, 0) + coef * x
                        if w:
                            img[i] = w
                        else:
                            img.pop(i, None)
            _vec_add_scaled(img, v, Fraction(-a))
            images.append(img)
        combos = _kernel(images, len(vectors))
        new_vectors: List[Vec] = []
        for combo in combos:
            vec: Vec = {}
            for t, coef in combo.items():
                _vec_add_scaled(vec, vectors[t], coef)
            if vec:
                new_vectors.append(vec)
        vectors = new_vectors
        cut.append(ell)
        if not vectors:
            raise EigenspaceNotCutOut(
                f"no eigenvector with the requested system at level {N}")
    if len(vectors) != 1:
        raise EigenspaceNotCutOut(
            f"eigenspace at level {N} still {len(vectors)}-dimensional "
            f"after T_ell for ell <= {prime_bound}")
    e_cusp = vectors[0]
    e_free: Vec = {}
    for i, coef in e_cusp.items():
        _vec_add_scaled(e_free, space.cusp_basis[i], coef)
    line = _integerize(e_free)

    # dual functional on the full quotient
    duals: List[Vec] = [{i: Fraction(1)} for i in range(space.dim)]
    for ell, a in usable:
        if len(duals) == 1:
            break
        cols = space.hecke_free_columns(ell)
        images = []
        for w in duals:
            img: Vec = {}
            for j in range(space.dim):
                x = sum((w.get(k, 0) * v for k, v in cols[j].items()),
                        Fraction(0)) - a * w.get(j, 0)
                if x:
                    img[j] = x
            images.append(img)
        combos = _kernel(images, len(duals))
        new_duals: List[Vec] = []
        for combo in combos:
            vec: Vec = {}
            for t, coef in combo.items():
                _vec_add_scaled(vec, duals[t], coef)
            if vec:
                new_duals.append(vec)
        duals = new_duals
        if not duals:
            raise EigenspaceNotCutOut(
                f"dual eigenfunctional vanished at level {N}")
    if len(duals) != 1:
        raise EigenspaceNotCutOut(
            f"dual eigenspace at level {N} still {len(duals)}-dimensional "
            f"after T_ell for ell <= {prime_bound}")
    dual = _integerize(duals[0])
    if _pairing(dual, {k: Fraction(v) for k, v in line.items()}) == 0:
        raise EigenspaceNotCutOut(
            f"dual functional is orthogonal to the eigenline at level {N}")

    gen_values = [_pairing(dual, e) for e in space.expr]
    return EigenSymbol(space=space, curve=curve, sign=space.sign,
                       line=line, dual=dual, gen_values=gen_values,
                       cut_primes=tuple(cut))


def hecke_eigenvalue(sym: EigenSymbol, ell: int) -> int:
    """Eigenvalue of T_ell on the symbol's line, via the dual functional."""
    space = sym.space
    if space.N % ell == 0:
        raise BadLevel(f"T_{ell} via Heilbronn matrices needs ell coprime "
                       f"to the level {space.N}")
    j = next(pos for pos in sorted(sym.dual) if sym.dual[pos])
    col = space._hecke_image(ell, j)
    val = _pairing(sym.dual, col) / sym.dual[j]
    assert val.denominator == 1, "Hecke eigenvalue is not integral"
    return int(val)


# ----------------------------------------------------------------------
# normalization against numeric L-values
# ----------------------------------------------------------------------

def _candidate_discriminants(sign: int, N: int, bound: int = 200) -> List[int]:
    out = []
    if sign > 0:
        out.append(1)
    for mag in range(3, bound + 1):
        d = mag if sign > 0 else -mag
        if math.gcd(mag, N) != 1:
            continue
        if is_fundamental_discriminant(d):
            out.append(d)
    return out


def _twist_sum(sym: EigenSymbol, d: int) -> Fraction:
    """Exact sum over a mod |d| of (d|a) * raw symbol at a/|d|."""
    if d == 1:
        return sym.raw_path_value(Fraction(0))
    total = Fraction(0)
    ad = abs(d)
    for a in range(ad):
        chi = kronecker(d, a)
        if chi:
            total += chi * sym.raw_path_value(Fraction(a, ad))
    return total


def normalize(sym: EigenSymbol, curve: Optional[Curve] = None,
              periods: Optional[Tuple[float, float]] = None,
              discs: Optional[Sequence[int]] = None,
              bits: int = 96,
              an_override: Optional[Dict[int, int]] = None) -> EigenSymbol:
    """Fix the rational scale of the symbol against numeric L-values.

    The scale is solved from one auxiliary fundamental discriminant via
    rational reconstruction (height <= 10^6) and verified on a second,
    independent one.  Retries at doubled float precision before raising
    NormalizationAmbiguous.
    """
    curve = curve or sym.curve
    space = sym.space
    if periods is None:
        periods = real_periods(curve, bits=max(128, bits))
    omega = periods[0] if sym.sign > 0 else periods[1]
    if discs is None:
        discs = _candidate_discriminants(sym.sign, space.N)

    last_error = "no usable auxiliary discriminant"
    for attempt_bits in (bits, 2 * bits):
        solved: List[Tuple[int, Fraction]] = []
        for d in discs:
            lval, _ = l_value_numeric(curve, d, bits=attempt_bits,
                                      override=an_override)
            if abs(lval) <= 1e-8 * abs(omega):
                continue
            s_exact = _twist_sum(sym, d)
            predicted = float(math.sqrt(abs(d)) * lval / omega)
            if s_exact == 0:
                last_error = (f"exact twist sum vanished at D={d} while the "
                              f"numeric value {predicted:.3g} did not")
                continue
            ratio = predicted / float(s_exact)
            scale = Fraction(ratio).limit_denominator(10 ** 6)
            if scale == 0 or abs(float(scale) - ratio) > 1e-9 * max(1.0, abs(ratio)):
                last_error = (f"rational reconstruction failed at D={d}: "
                              f"ratio {ratio!r}")
                continue
            solved.append((d, scale))
            if len(solved) == 2:
                break
        if len(solved) == 2:
            (d1, s1), (d2, s2) = solved
            if s1 != s2:
                last_error = (f"auxiliary discriminants D={d1}, D={d2} "
                              f"disagree: {s1} vs {s2}")
                continue
            norm_id = (f"{curve.label or curve.a_invariants()}|sign={sym.sign:+d}"
                       f"|scale={s1.numerator}/{s1.denominator}")
            return EigenSymbol(
                space=space, curve=curve, sign=sym.sign, line=sym.line,
                dual=sym.dual, gen_values=sym.gen_values,
                cut_primes=sym.cut_primes, scaling=s1, norm_id=norm_id,
            )
        if len(solved) == 1:
            last_error = (f"only one usable auxiliary discriminant "
                          f"(D={solved[0][0]}) in the search range")
    raise NormalizationAmbiguous(last_error)


def evaluate_path(sym: EigenSymbol, r) -> Fraction:
    """Value of the (scaled, if normalized) symbol on {oo -> r}."""
    r = Fraction(r)
    if sym.is_normalized:
        return sym.value(r)
    return sym.raw_path_value(r)


def twisted_symbol_value(sym: EigenSymbol, d: int, a: int, m: int) -> Fraction:
    """One term (d|a) * x^{s(d)}(a / (m * |d|)) of the twisted construction.

    `m` is the p-power part of the denominator supplied by the caller.
    Preconditions: d fundamental (or 1), sym has the sign of d, and
    gcd(a, d*m) = 1.
    """
    if d != 1 and not is_fundamental_discriminant(d):
        raise ValueError(f"{d} is not a fundamental discriminant")
    want = 1 if d > 0 else -1
    if sym.sign != want:
        raise ValueError(f"twist by {d} needs the sign-{want:+d} symbol")
    if m < 1:
        raise ValueError("denominator scale must be >= 1")
    if math.gcd(a, d * m) != 1:
        raise ValueError(f"residue {a} shares a factor with {d}*{m}")
    chi = kronecker(d, a)
    if chi == 0:
        return Fraction(0)
    return chi * evaluate_path(sym, Fraction(a, m * abs(d)))


def attached_symbol(curve: Curve, sign: int, bits: int = 96,
                    discs: Optional[Sequence[int]] = None,
                    space: Optional[SymbolSpace] = None,
                    an_override: Optional[Dict[int, int]] = None,
                    ) -> EigenSymbol:
    """Convenience pipeline: space -> eigensymbol -> normalized symbol."""
    if space is None:
        space = build_space(curve.conductor, sign)
    sym = eigensymbol(space, curve)
    return normalize(sym, curve, discs=discs, bits=bits,
                     an_override=an_override)
