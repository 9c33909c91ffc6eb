"""Finite-dimensional Hilbert complexes with endomorphisms.

Exact parts (cohomology, Lefschetz polynomials, duality) use rational
matrices; spectral parts (heat supertraces, supersymmetric pairing) use a
cyclic Jacobi eigensolver in floating point.  Inner products are the standard
coordinate ones, so adjoints are transposes.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .morse import BPoly

Matrix = tuple  # tuple of row tuples of Fraction

JACOBI_MAX_SWEEPS = 100
JACOBI_TOL = 1e-12


class ShapeError(ValueError):
    pass


class EigenNotConverged(RuntimeError):
    pass


# exact matrices ------------------------------------------------------------------

def mat(rows, nrows: int | None = None, ncols: int | None = None) -> Matrix:
    rows = tuple(tuple(Fraction(x) for x in r) for r in rows)
    if nrows is not None and len(rows) != nrows:
        raise ShapeError(f"expected {nrows} rows, got {len(rows)}")
    if rows and len({len(r) for r in rows}) != 1:
        raise ShapeError("ragged matrix")
    if ncols is not None and rows and len(rows[0]) != ncols:
        raise ShapeError(f"expected {ncols} columns, got {len(rows[0])}")
    return rows


def zeros(n: int, m: int) -> Matrix:
    return tuple((Fraction(0),) * m for _ in range(n))


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def shape(a: Matrix, ncols_if_empty: int = 0) -> tuple:
    return (len(a), len(a[0]) if a else ncols_if_empty)


def matmul(a: Matrix, b: Matrix, inner: int | None = None) -> Matrix:
    if not a:
        return ()
    bt = list(zip(*b)) if b else []
    if len(a[0]) != len(b):
        raise ShapeError(f"cannot multiply {len(a)}x{len(a[0])} by {len(b)}x?")
    if not bt:
        return tuple(() for _ in a)
    return tuple(tuple(sum((x * y for x, y in zip(r, c)), Fraction(0)) for c in bt) for r in a)


def transpose(a: Matrix, ncols: int = 0) -> Matrix:
    if not a:
        return tuple(() for _ in range(ncols))
    return tuple(zip(*a))


def is_zero(a: Matrix) -> bool:
    return all(x == 0 for r in a for x in r)


def kron(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x * y for x in ra for y in rb) for ra in a for rb in b)


def block_diag_rows(blocks: Sequence[Matrix]) -> Matrix:
    ncol = sum(len(b[0]) if b else 0 for b in blocks)
    out, off = [], 0
    for bl in blocks:
        w = len(bl[0]) if bl else 0
        for r in bl:
            out.append((Fraction(0),) * off + tuple(r) + (Fraction(0),) * (ncol - off - w))
        off += w
    return tuple(out)


def _integer_rows(a: Matrix) -> list:
    out = []
    for r in a:
        den = math.lcm(*(x.denominator for x in r)) if r else 1
        out.append([int(x * den) for x in r])
    return out


def rank(a: Matrix) -> int:
    """Rank by fraction-free Bareiss elimination on an integer rescaling of the rows."""
    m = _integer_rows(a)
    if not m or not m[0]:
        return 0
    nr, nc = len(m), len(m[0])
    r, prev = 0, 1
    for c in range(nc):
        piv = next((i for i in range(r, nr) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, nr):
            for j in range(c + 1, nc):
                m[i][j] = (m[r][c] * m[i][j] - m[i][c] * m[r][j]) // prev
            m[i][c] = 0
        prev = m[r][c]
        r += 1
        if r == nr:
            break
    return r


def rref(a: Matrix) -> tuple:
    """Reduced row echelon form over Q and the pivot columns."""
    m = [list(r) for r in a]
    if not m:
        return [], []
    nr, nc = len(m), len(m[0])
    pivots, r = [], 0
    for c in range(nc):
        piv = next((i for i in range(r, nr) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(nr):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return m, pivots


def nullspace(a: Matrix, ncols: int) -> list:
    """Basis of ``{v : a v = 0}`` as a list of column vectors."""
    if not a:
        return [tuple(Fraction(int(i == j)) for i in range(ncols)) for j in range(ncols)]
    m, pivots = rref(a)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, pc in zip(m, pivots):
            v[pc] = -row[f]
        basis.append(tuple(v))
    return basis


def column_basis(a: Matrix, ncols: int) -> list:
    """Independent columns spanning the image of ``a``."""
    if not a or ncols == 0:
        return []
    _, pivots = rref(a)
    cols = transpose(a)
    return [tuple(cols[c]) for c in pivots]


def solve(cols: list, v: tuple) -> list:
    """Coefficients ``x`` with ``sum x_i cols[i] == v``; ``cols`` must be independent and span ``v``."""
    n = len(v)
    aug = tuple(tuple(c[i] for c in cols) + (v[i],) for i in range(n))
    m, pivots = rref(aug)
    k = len(cols)
    if k in pivots:
        raise ArithmeticError("vector is not in the span")
    x = [Fraction(0)] * k
    for row, pc in zip(m, pivots):
        x[pc] = row[k]
    return x


# complexes -----------------------------------------------------------------------

@dataclass(frozen=True)
class FiniteComplex:
    """Cochain complex ``C_0 -> C_1 -> ... -> C_N``; ``differentials[k]`` has shape ``dims[k+1] x dims[k]``."""

    dims: tuple
    differentials: tuple

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        diffs = tuple(mat(p) for p in self.differentials)
        if len(diffs) != max(len(self.dims) - 1, 0):
            raise ShapeError("need exactly one differential between consecutive degrees")
        for k, p in enumerate(diffs):
            if len(p) != self.dims[k + 1] or (p and len(p[0]) != self.dims[k]):
                raise ShapeError(f"P_{k} must be {self.dims[k + 1]}x{self.dims[k]}")
        object.__setattr__(self, "differentials", diffs)

    @property
    def N(self) -> int:
        return len(self.dims) - 1

    def P(self, k: int) -> Matrix:
        """Differential out of degree ``k`` (zero matrix outside the range)."""
        if 0 <= k < self.N:
            return self.differentials[k]
        src = self.dims[k] if 0 <= k <= self.N else 0
        dst = self.dims[k + 1] if 0 <= k + 1 <= self.N else 0
        return zeros(dst, src)

    @classmethod
    def zero(cls, dims: Sequence[int]) -> "FiniteComplex":
        return cls(tuple(dims), tuple(zeros(dims[k + 1], dims[k]) for k in range(len(dims) - 1)))


@dataclass(frozen=True)
class ComplexEndomorphism:
    maps: tuple

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(mat(t) for t in self.maps))

    @classmethod
    def identity(cls, c: FiniteComplex) -> "ComplexEndomorphism":
        return cls(tuple(identity(d) for d in c.dims))


def is_complex(c: FiniteComplex) -> bool:
    for k in range(c.N - 1):
        if c.dims[k] and c.dims[k + 2] and not is_zero(matmul(c.differentials[k + 1],
                                                              c.differentials[k])):
            return False
    return True


def intertwines(c: FiniteComplex, t: ComplexEndomorphism) -> bool:
    for k in range(c.N):
        if not c.dims[k] or not c.dims[k + 1]:
            continue
        if matmul(c.differentials[k], t.maps[k]) != matmul(t.maps[k + 1], c.differentials[k]):
            return False
    return True


def validate(c: FiniteComplex, t: ComplexEndomorphism) -> bool:
    if len(t.maps) != len(c.dims):
        raise ShapeError("endomorphism needs one map per degree")
    for k, (tk, d) in enumerate(zip(t.maps, c.dims)):
        if len(tk) != d or (tk and len(tk[0]) != d):
            raise ShapeError(f"T_{k} must be {d}x{d}")
    return is_complex(c) and intertwines(c, t)


def cohomology_dims(c: FiniteComplex) -> list:
    out = []
    for k, d in enumerate(c.dims):
        ker = d - (rank(c.P(k)) if d else 0)
        im = rank(c.P(k - 1)) if k > 0 and c.dims[k - 1] and d else 0
        out.append(ker - im)
    return out


def _apply(a: Matrix, v) -> tuple:
    return tuple(sum((x * y for x, y in zip(r, v)), Fraction(0)) for r in a)


def induced_trace(c: FiniteComplex, t: ComplexEndomorphism, k: int) -> Fraction:
    """Trace of ``T_k`` on ``ker P_k / im P_{k-1}``."""
    d = c.dims[k]
    if d == 0:
        return Fraction(0)
    ker = nullspace(c.P(k), d)
    im = column_basis(c.P(k - 1), c.dims[k - 1]) if k > 0 else []
    basis = list(im)
    ext = []
    for v in ker:
        trial = basis + [v]
        if rank(transpose(tuple(trial))) == len(trial):
            basis = trial
            ext.append(v)
    tr = Fraction(0)
    off = len(im)
    for i, v in enumerate(ext):
        x = solve(basis, _apply(t.maps[k], v))
        tr += x[off + i]
    return tr


def lefschetz_poly(c: FiniteComplex, t: ComplexEndomorphism) -> BPoly:
    return BPoly([induced_trace(c, t, k) for k in range(len(c.dims))])


def lefschetz_number(c: FiniteComplex, t: ComplexEndomorphism) -> Fraction:
    return lefschetz_poly(c, t)(-1)


# spectral side -----------------------------------------------------------------------

def _offnorm(A: np.ndarray) -> float:
    return float(np.linalg.norm(A - np.diag(np.diag(A))))


def jacobi_eigh(a, max_sweeps: int = JACOBI_MAX_SWEEPS, tol: float = JACOBI_TOL) -> tuple:
    """Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Stops when the off-diagonal Frobenius norm drops below ``tol * max(1, ||A||_F)``.
    Returns ``(eigenvalues, eigenvectors)`` with eigenvectors as columns.
    """
    A = np.array(a, dtype=float, copy=True)
    n = A.shape[0]
    V = np.eye(n)
    if n <= 1:
        return np.diag(A).copy(), V
    scale = max(1.0, float(np.linalg.norm(A)))
    for _ in range(max_sweeps):
        off = _offnorm(A)
        if off < tol * scale:
            return np.diag(A).copy(), V
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) < 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    tt = 0.5 / theta  # theta^2 would overflow
                else:
                    tt = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                cs = 1.0 / math.sqrt(tt * tt + 1.0)
                sn = tt * cs
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = cs * rp - sn * rq
                A[q, :] = sn * rp + cs * rq
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = cs * cp - sn * cq
                A[:, q] = sn * cp + cs * cq
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = cs * vp - sn * vq
                V[:, q] = sn * vp + cs * vq
    off = _offnorm(A)
    if off < tol * scale:
        return np.diag(A).copy(), V
    raise EigenNotConverged(f"Jacobi did not converge in {max_sweeps} sweeps (off-norm {off:.3e})")


def _f(a: Matrix, nrows: int, ncols: int) -> np.ndarray:
    if nrows == 0 or ncols == 0:
        return np.zeros((nrows, ncols))
    return np.array([[float(x) for x in r] for r in a], dtype=float)


def laplacian(c: FiniteComplex, k: int) -> np.ndarray:
    d = c.dims[k]
    up = _f(c.P(k), c.dims[k + 1] if k < c.N else 0, d)
    down = _f(c.P(k - 1), d, c.dims[k - 1]) if k > 0 else np.zeros((d, 0))
    return up.T @ up + down @ down.T


def heat_supertrace(c: FiniteComplex, t: ComplexEndomorphism, time: float, b: float) -> float:
    """``sum_k b^k tr(T_k exp(-time * Delta_k))`` via an orthonormal eigenbasis of each Laplacian."""
    if time <= 0:
        raise ValueError("time must be positive")
    total = 0.0
    for k, d in enumerate(c.dims):
        if d == 0:
            continue
        lam, V = jacobi_eigh(laplacian(c, k))
        T = _f(t.maps[k], d, d)
        diag = np.einsum("ji,jk,ki->i", V, T, V)  # <T v_i, v_i>
        total += b ** k * float(np.sum(np.exp(-time * lam) * diag))
    return total


def _positive(vals, scale: float, tol: float) -> list:
    return sorted(float(v) for v in vals if v > tol * scale)


def supersymmetry_check(c: FiniteComplex, tol: float = 1e-9) -> bool:
    """Positive spectra of ``P^T P`` and ``P P^T`` agree in every degree."""
    for k in range(c.N):
        P = _f(c.differentials[k], c.dims[k + 1], c.dims[k])
        if P.size == 0:
            continue
        scale = max(1.0, float(np.linalg.norm(P)) ** 2)
        a = _positive(jacobi_eigh(P.T @ P)[0], scale, tol)
        b = _positive(jacobi_eigh(P @ P.T)[0], scale, tol)
        if len(a) != len(b) or any(abs(x - y) > tol * scale for x, y in zip(a, b)):
            return False
    return True


# constructions ---------------------------------------------------------------------------

def dual_pair(c: FiniteComplex, t: ComplexEndomorphism) -> tuple:
    """Transposed differentials in reversed grading and the transposed endomorphism."""
    N = c.N
    dims = tuple(reversed(c.dims))
    diffs = tuple(transpose(c.differentials[N - j - 1]) if dims[j] and dims[j + 1]
                  else zeros(dims[j + 1], dims[j]) for j in range(N))
    maps = tuple(transpose(t.maps[N - j], c.dims[N - j]) for j in range(N + 1))
    return FiniteComplex(dims, diffs), ComplexEndomorphism(maps)


def duality_check(c: FiniteComplex, t: ComplexEndomorphism) -> bool:
    """``L(b) == b^N L*(1/b)``; at ``b = -1`` this is ``L = (-1)^N L*``."""
    cd, td = dual_pair(c, t)
    L, Ld = lefschetz_poly(c, t), lefschetz_poly(cd, td)
    reflected = BPoly({c.N - j: x for j, x in enumerate(Ld.coeffs)})
    return L == reflected and lefschetz_number(c, t) == (-1) ** c.N * lefschetz_number(cd, td)


def tensor_pair(c1: FiniteComplex, t1: ComplexEndomorphism, c2: FiniteComplex,
                t2: ComplexEndomorphism) -> tuple:
    """Graded tensor product with ``d = d1 x 1 + (-1)^i 1 x d2`` and ``T = T1 x T2``."""
    N = c1.N + c2.N
    parts = [[(i, k - i) for i in range(len(c1.dims)) if 0 <= k - i < len(c2.dims)]
             for k in range(N + 1)]

    def offsets(k):
        off, out = 0, {}
        for i, j in parts[k]:
            out[(i, j)] = off
            off += c1.dims[i] * c2.dims[j]
        return out, off

    dims, offs = [], []
    for k in range(N + 1):
        o, n = offsets(k)
        offs.append(o)
        dims.append(n)
    diffs = []
    for k in range(N):
        D = [[Fraction(0)] * dims[k] for _ in range(dims[k + 1])]

        def put(block, r0, c0):
            for r, row in enumerate(block):
                for cc, x in enumerate(row):
                    if x:
                        D[r0 + r][c0 + cc] += x

        for i, j in parts[k]:
            src = offs[k][(i, j)]
            if i < c1.N and (i + 1, j) in offs[k + 1] and c1.dims[i + 1] and c1.dims[i]:
                put(kron(c1.differentials[i], identity(c2.dims[j])), offs[k + 1][(i + 1, j)], src)
            if j < c2.N and (i, j + 1) in offs[k + 1] and c2.dims[j + 1] and c2.dims[j]:
                blk = kron(identity(c1.dims[i]), c2.differentials[j])
                if i % 2:
                    blk = tuple(tuple(-x for x in r) for r in blk)
                put(blk, offs[k + 1][(i, j + 1)], src)
        diffs.append(tuple(tuple(r) for r in D))
    maps = []
    for k in range(N + 1):
        blocks = [kron(t1.maps[i], t2.maps[j]) for i, j in parts[k]]
        maps.append(block_diag_rows([b for b in blocks if b]) if dims[k] else ())
    return FiniteComplex(tuple(dims), tuple(diffs)), ComplexEndomorphism(tuple(maps))


@dataclass(frozen=True)
class KunnethResult:
    exact: bool
    heat_error: float

    @property
    def ok(self) -> bool:
        return self.exact and self.heat_error <= 1e-8


def kunneth_check(c1, t1, c2, t2, b: float = -1.0, time: float = 0.5) -> KunnethResult:
    c, t = tensor_pair(c1, t1, c2, t2)
    exact = lefschetz_poly(c, t) == lefschetz_poly(c1, t1) * lefschetz_poly(c2, t2)
    lhs = heat_supertrace(c, t, time, b)
    rhs = heat_supertrace(c1, t1, time, b) * heat_supertrace(c2, t2, time, b)
    return KunnethResult(exact, abs(lhs - rhs) / max(1.0, abs(rhs)))


# random instances --------------------------------------------------------------------------

def _rand_int_matrix(rng: random.Random, n: int, m: int, lo: int = -2, hi: int = 2) -> list:
    return [[Fraction(rng.randint(lo, hi)) for _ in range(m)] for _ in range(n)]


def _unimodular(rng: random.Random, n: int) -> tuple:
    """Random integer matrix with integer inverse, returned as ``(S, S^-1)``."""
    S = [list(r) for r in identity(n)]
    Si = [list(r) for r in identity(n)]
    for _ in range(n):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j:
            continue
        a = rng.choice([-1, 1])
        # row_i += a row_j on S; column_j -= a column_i on S^-1
        S[i] = [x + a * y for x, y in zip(S[i], S[j])]
        for r in Si:
            r[j] -= a * r[i]
    return mat(S), mat(Si)


@dataclass(frozen=True)
class RandomPair:
    complex: FiniteComplex
    endo: ComplexEndomorphism
    expected: BPoly  # Lefschetz polynomial known by construction


def random_pair(rng: random.Random, max_total: int = 24, max_len: int = 4) -> RandomPair:
    """A valid pair built in split form ``C_k = H_k + X_k + Y_k`` and then conjugated.

    ``P`` maps ``X_k`` isomorphically onto ``Y_{k+1}`` and kills ``H`` and ``Y``,
    so ``H_k`` represents the cohomology.  ``T`` is block triangular with the
    blocks forced by intertwining; its Lefschetz polynomial is
    ``sum_k b^k tr(T|H_k)`` no matter how the coordinates are scrambled.
    """
    while True:
        N = rng.randint(1, max_len)
        h = [rng.randint(0, 3) for _ in range(N + 1)]
        x = [rng.randint(0, 3) for _ in range(N)] + [0]
        y = [0] + x[:-1]
        dims = [a + b + c for a, b, c in zip(h, x, y)]
        if 0 < sum(dims) <= max_total:
            break
    diffs = []
    for k in range(N):
        D = [[Fraction(0)] * dims[k] for _ in range(dims[k + 1])]
        for i in range(x[k]):
            D[h[k + 1] + x[k + 1] + i][h[k] + i] = Fraction(1)
        diffs.append(D)
    M = [_rand_int_matrix(rng, x[k], x[k]) for k in range(N + 1)]
    maps, expected = [], []
    for k in range(N + 1):
        d = dims[k]
        T = [[Fraction(0)] * d for _ in range(d)]
        H, X, Y = range(0, h[k]), range(h[k], h[k] + x[k]), range(h[k] + x[k], d)
        for r in H:
            for cidx in list(H) + list(X):
                T[r][cidx] = Fraction(rng.randint(-2, 2))
        for a, r in enumerate(X):
            for b_, cidx in enumerate(X):
                T[r][cidx] = M[k][a][b_]
        for r in Y:
            for cidx in list(H) + list(X):
                T[r][cidx] = Fraction(rng.randint(-2, 2))
        if k > 0:
            for a, r in enumerate(Y):
                for b_, cidx in enumerate(Y):
                    T[r][cidx] = M[k - 1][a][b_]
        maps.append(T)
        expected.append(sum((T[i][i] for i in H), Fraction(0)))
    S = [_unimodular(rng, d) if d else ((), ()) for d in dims]
    cdiffs = tuple(matmul(matmul(S[k + 1][0], mat(diffs[k])), S[k][1])
                   if dims[k] and dims[k + 1] else zeros(dims[k + 1], dims[k])
                   for k in range(N))
    cmaps = tuple(matmul(matmul(S[k][0], mat(maps[k])), S[k][1]) if dims[k] else ()
                  for k in range(N + 1))
    return RandomPair(FiniteComplex(tuple(dims), cdiffs), ComplexEndomorphism(cmaps),
                      BPoly(expected))


# cubical torus ---------------------------------------------------------------------------

def torus_pair(n: int, A: Sequence[Sequence[int]]) -> tuple:
    """Cubical cochain complex of the ``n x n`` torus with the pullback of ``x -> A x``.

    ``A`` must be an integer matrix with determinant +-1; it permutes cells of
    the standard lattice cell structure up to orientation.
    """
    a, b_, c, d = int(A[0][0]), int(A[0][1]), int(A[1][0]), int(A[1][1])
    det = a * d - b_ * c
    if abs(det) != 1:
        raise ValueError("torus map must be invertible over Z")
    cells = {0: [], 1: [], 2: []}
    # 1-cells: edge from (i,j) in direction e0 or e1
    verts = [(i, j) for i in range(n) for j in range(n)]
    cells[0] = verts
    cells[1] = [(i, j, e) for i in range(n) for j in range(n) for e in (0, 1)]
    cells[2] = verts
    idx = {k: {cl: m for m, cl in enumerate(v)} for k, v in cells.items()}

    def w(i, j):
        return (i % n, j % n)

    # coboundary delta0: (delta f)(edge) = f(head) - f(tail)
    d0 = [[Fraction(0)] * n * n for _ in range(2 * n * n)]
    for (i, j, e) in cells[1]:
        r = idx[1][(i, j, e)]
        head = w(i + 1, j) if e == 0 else w(i, j + 1)
        d0[r][idx[0][head]] += 1
        d0[r][idx[0][(i, j)]] -= 1
    # square at (i,j) boundary: e0(i,j) + e1(i+1,j) - e0(i,j+1) - e1(i,j)
    d1 = [[Fraction(0)] * 2 * n * n for _ in range(n * n)]
    for (i, j) in cells[2]:
        r = idx[2][(i, j)]
        for (ci, cj, e, s) in ((i, j, 0, 1), (i + 1, j, 1, 1), (i, j + 1, 0, -1), (i, j, 1, -1)):
            d1[r][idx[1][(*w(ci, cj), e)]] += s
    # chain map on cells, then pullback = transpose
    def image_vertex(v):
        i, j = v
        return w(a * i + b_ * j, c * i + d * j)

    F0 = [[Fraction(0)] * n * n for _ in range(n * n)]
    for v in verts:
        F0[idx[0][image_vertex(v)]][idx[0][v]] = Fraction(1)
    F1 = [[Fraction(0)] * 2 * n * n for _ in range(2 * n * n)]
    cols = ((a, c), (b_, d))  # images of e0, e1
    for (i, j, e) in cells[1]:
        vi, vj = image_vertex((i, j))
        di, dj = cols[e]
        # image edge is a unit step along +-e0 or +-e1 since A is a signed permutation
        if di and dj:
            raise ValueError("only signed permutation matrices act cellularly")
        if di:
            e2, s = 0, di
        else:
            e2, s = 1, dj
        start = (vi, vj) if s > 0 else w(vi + (di if e2 == 0 else 0), vj + (dj if e2 == 1 else 0))
        F1[idx[1][(*start, e2)]][idx[1][(i, j, e)]] = Fraction(s)
    F2 = [[Fraction(0)] * n * n for _ in range(n * n)]
    for (i, j) in verts:
        # unit square [i,i+1]x[j,j+1] maps to the square spanned from image corner
        vi, vj = image_vertex((i, j))
        xs = [vi, vi + a, vi + b_, vi + a + b_]
        ys = [vj, vj + c, vj + d, vj + c + d]
        F2[idx[2][w(min(xs), min(ys))]][idx[2][(i, j)]] = Fraction(det)
    cplx = FiniteComplex((n * n, 2 * n * n, n * n), (mat(d0), mat(d1)))
    endo = ComplexEndomorphism(tuple(transpose(mat(F)) for F in (F0, F1, F2)))
    return cplx, endo
