"""Dense exact linear algebra over k and k(s).

Matrices hold :class:`Scalar` entries.  Elimination pivots on the leftmost
column, then the entry of lowest s-adic valuation, then the first row, so
every result is deterministic.  Subspaces are stored with a basis in
canonical column-echelon form (the transpose of a reduced row echelon
form), which makes subspace equality plain matrix equality.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence

from .errors import DimensionMismatch, NotFullRank, NotInvertible
from .scalar import FieldDesc, Scalar


class Matrix:
    __slots__ = ("rows", "nrows", "ncols", "field")

    def __init__(self, rows: Sequence[Sequence[Scalar]], field: FieldDesc, ncols: int | None = None):
        rows = tuple(tuple(r) for r in rows)
        if ncols is None:
            if not rows:
                raise ValueError("ncols is required for a matrix with no rows")
            ncols = len(rows[0])
        for r in rows:
            if len(r) != ncols:
                raise DimensionMismatch("ragged matrix rows")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "nrows", len(rows))
        object.__setattr__(self, "ncols", ncols)
        object.__setattr__(self, "field", field)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    # -- constructors --------------------------------------------------------

    @classmethod
    def from_values(cls, values, field: FieldDesc, ncols: int | None = None) -> Matrix:
        """Build from nested lists of ints, Fractions, strings, or Scalars."""

        def lift(x):
            if isinstance(x, Scalar):
                return x
            return Scalar.from_json(x, field)

        return cls([[lift(x) for x in row] for row in values], field, ncols)

    @classmethod
    def zeros(cls, nrows: int, ncols: int, field: FieldDesc) -> Matrix:
        z = Scalar.zero(field)
        return cls([[z] * ncols for _ in range(nrows)], field, ncols)

    @classmethod
    def identity(cls, n: int, field: FieldDesc) -> Matrix:
        return cls.diag([Scalar.one(field)] * n, field)

    @classmethod
    def diag(cls, entries: Sequence, field: FieldDesc) -> Matrix:
        n = len(entries)
        z = Scalar.zero(field)
        rows = []
        for i, x in enumerate(entries):
            row = [z] * n
            row[i] = x if isinstance(x, Scalar) else Scalar.const(x, field)
            rows.append(row)
        return cls(rows, field, n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[Scalar]], nrows: int, field: FieldDesc) -> Matrix:
        columns = list(columns)
        return cls([[c[i] for c in columns] for i in range(nrows)], field, len(columns))

    @classmethod
    def hstack(cls, mats: Sequence[Matrix], nrows: int | None = None, field: FieldDesc | None = None) -> Matrix:
        mats = list(mats)
        if not mats:
            return cls([()] * (nrows or 0), field, 0)
        nrows = mats[0].nrows
        for m in mats:
            if m.nrows != nrows:
                raise DimensionMismatch("hstack of matrices with different row counts")
        rows = [sum((m.rows[i] for m in mats), ()) for i in range(nrows)]
        return cls(rows, mats[0].field, sum(m.ncols for m in mats))

    @classmethod
    def vstack(cls, mats: Sequence[Matrix]) -> Matrix:
        mats = list(mats)
        ncols = mats[0].ncols
        for m in mats:
            if m.ncols != ncols:
                raise DimensionMismatch("vstack of matrices with different column counts")
        return cls([r for m in mats for r in m.rows], mats[0].field, ncols)

    # -- basic access --------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, idx):
        i, j = idx
        return self.rows[i][j]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[tuple]:
        return [self.col(j) for j in range(self.ncols)]

    def select_columns(self, idx: Iterable[int]) -> Matrix:
        idx = list(idx)
        return Matrix([[r[j] for j in idx] for r in self.rows], self.field, len(idx))

    def submatrix(self, r0: int, r1: int, c0: int, c1: int) -> Matrix:
        return Matrix([r[c0:c1] for r in self.rows[r0:r1]], self.field, c1 - c0)

    @property
    def T(self) -> Matrix:
        return Matrix([self.col(j) for j in range(self.ncols)], self.field, self.nrows)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash((self.shape, self.rows))

    def __repr__(self):
        body = "; ".join(", ".join(str(x) for x in r) for r in self.rows)
        return f"Matrix{self.shape}[{body}]"

    def is_zero(self) -> bool:
        return all(not x.num for r in self.rows for x in r)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: Matrix) -> Matrix:
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} + {other.shape}")
        return Matrix([[a + b for a, b in zip(r, q)] for r, q in zip(self.rows, other.rows)], self.field, self.ncols)

    def __neg__(self) -> Matrix:
        return Matrix([[-a for a in r] for r in self.rows], self.field, self.ncols)

    def __sub__(self, other: Matrix) -> Matrix:
        return self + (-other)

    def scale(self, c) -> Matrix:
        if not isinstance(c, Scalar):
            c = Scalar.const(c, self.field)
        if not c.num:
            return Matrix.zeros(self.nrows, self.ncols, self.field)
        return Matrix([[a * c for a in r] for r in self.rows], self.field, self.ncols)

    def __matmul__(self, other: Matrix) -> Matrix:
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"{self.shape} @ {other.shape}")
        z = Scalar.zero(self.field)
        cols = other.columns()
        out = []
        for r in self.rows:
            nz = [(k, a) for k, a in enumerate(r) if a.num]
            row = []
            for c in cols:
                acc = z
                for k, a in nz:
                    b = c[k]
                    if b.num:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return Matrix(out, self.field, other.ncols)

    def apply(self, v: Sequence[Scalar]) -> tuple:
        z = Scalar.zero(self.field)
        out = []
        for r in self.rows:
            acc = z
            for a, b in zip(r, v):
                if a.num and b.num:
                    acc = acc + a * b
            out.append(acc)
        return tuple(out)

    # -- s-adic helpers ------------------------------------------------------

    def min_valuation(self):
        return min((x.valuation() for r in self.rows for x in r), default=math.inf)

    def specialize0(self) -> Matrix:
        """Entrywise evaluation at s = 0 (entries become constant scalars)."""
        f = self.field
        return Matrix([[Scalar.const(x.specialize0(), f) for x in r] for r in self.rows], f, self.ncols)

    def is_constant(self) -> bool:
        return all(x.is_constant() for r in self.rows for x in r)

    # -- derived quantities --------------------------------------------------

    def det(self) -> Scalar:
        if self.nrows != self.ncols:
            raise DimensionMismatch("determinant of a non-square matrix")
        rows = [list(r) for r in self.rows]
        n = self.nrows
        det = Scalar.one(self.field)
        for c in range(n):
            piv = _choose_pivot(rows, c, c)
            if piv is None:
                return Scalar.zero(self.field)
            if piv != c:
                rows[c], rows[piv] = rows[piv], rows[c]
                det = -det
            pv = rows[c][c]
            det = det * pv
            inv = pv.inverse()
            for i in range(c + 1, n):
                x = rows[i][c]
                if x.num:
                    m = x * inv
                    rows[i] = [a - m * b if b.num else a for a, b in zip(rows[i], rows[c])]
        return det

    def inverse(self) -> Matrix:
        n = self.nrows
        if n != self.ncols:
            raise DimensionMismatch("inverse of a non-square matrix")
        aug = Matrix.hstack([self, Matrix.identity(n, self.field)])
        red, pivots = rref(aug.rows, 2 * n)
        if pivots[:n] != list(range(n)):
            raise NotInvertible("matrix is singular")
        return Matrix([r[n:] for r in red[:n]], self.field, n)

    # -- JSON ----------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "rows": self.nrows,
            "cols": self.ncols,
            "entries": [[x.to_json() for x in r] for r in self.rows],
        }

    @classmethod
    def from_json(cls, obj, field: FieldDesc) -> Matrix:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        m = cls.from_values(obj["entries"], field, cols)
        if m.nrows != rows:
            raise DimensionMismatch(f"declared {rows} rows, found {m.nrows}")
        return m


# -- elimination ----------------------------------------------------------------


def _choose_pivot(rows: list, col: int, start: int):
    best, best_val = None, math.inf
    for i in range(start, len(rows)):
        x = rows[i][col]
        if x.num:
            v = x.valuation()
            if v < best_val:
                best, best_val = i, v
    return best


def rref(rows: Sequence[Sequence[Scalar]], ncols: int) -> tuple[list[list[Scalar]], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    rows = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(rows):
            break
        piv = _choose_pivot(rows, c, r)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][c].inverse()
        prow = [x * inv if x.num else x for x in rows[r]]
        rows[r] = prow
        nz = [k for k in range(c, ncols) if prow[k].num]
        for i in range(len(rows)):
            if i == r:
                continue
            m = rows[i][c]
            if m.num:
                row = rows[i]
                for k in nz:
                    row[k] = row[k] - m * prow[k]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def rank(M: Matrix) -> int:
    return len(rref(M.rows, M.ncols)[1])


def kernel(M: Matrix) -> Subspace:
    """Right kernel {x : M x = 0}."""
    red, pivots = rref(M.rows, M.ncols)
    field = M.field
    free = [c for c in range(M.ncols) if c not in set(pivots)]
    vecs = []
    zero, one = Scalar.zero(field), Scalar.one(field)
    for f in free:
        v = [zero] * M.ncols
        v[f] = one
        for row, pc in zip(red, pivots):
            v[pc] = -row[f]
        vecs.append(v)
    return Subspace.span(vecs, M.ncols, field)


def image(M: Matrix) -> Subspace:
    return Subspace.span(M.columns(), M.nrows, M.field)


def solve(M: Matrix, v: Sequence[Scalar]):
    """Some x with M x = v, or None if v is outside the column span."""
    if len(v) != M.nrows:
        raise DimensionMismatch("right-hand side length")
    aug = [list(r) + [x] for r, x in zip(M.rows, v)]
    red, pivots = rref(aug, M.ncols + 1)
    if pivots and pivots[-1] == M.ncols:
        return None
    x = [Scalar.zero(M.field)] * M.ncols
    for row, pc in zip(red, pivots):
        x[pc] = row[M.ncols]
    return tuple(x)


def solve_matrix(M: Matrix, R: Matrix):
    """Some X with M X = R, or None."""
    cols = []
    for c in R.columns():
        x = solve(M, c)
        if x is None:
            return None
        cols.append(x)
    return Matrix.from_columns(cols, M.ncols, M.field)


# -- subspaces --------------------------------------------------------------------


class Subspace:
    """Column span inside k^d or K^d with a canonical echelon basis."""

    __slots__ = ("ambient_dim", "basis")

    def __init__(self, ambient_dim: int, basis: Matrix):
        object.__setattr__(self, "ambient_dim", ambient_dim)
        object.__setattr__(self, "basis", basis)

    def __setattr__(self, name, value):
        raise AttributeError("Subspace is immutable")

    @classmethod
    def span(cls, vectors: Iterable[Sequence[Scalar]], ambient_dim: int, field: FieldDesc) -> Subspace:
        vectors = [tuple(v) for v in vectors]
        for v in vectors:
            if len(v) != ambient_dim:
                raise DimensionMismatch("vector length differs from ambient dimension")
        red, _ = rref(vectors, ambient_dim) if vectors else ([], [])
        basis = Matrix.from_columns(red, ambient_dim, field) if red else _empty(ambient_dim, field)
        return cls(ambient_dim, basis)

    @classmethod
    def of_matrix(cls, M: Matrix) -> Subspace:
        return cls.span(M.columns(), M.nrows, M.field)

    @classmethod
    def full(cls, d: int, field: FieldDesc) -> Subspace:
        return cls(d, Matrix.identity(d, field))

    @classmethod
    def zero(cls, d: int, field: FieldDesc) -> Subspace:
        return cls(d, _empty(d, field))

    @classmethod
    def coordinate(cls, d: int, indices: Iterable[int], field: FieldDesc) -> Subspace:
        """Span of the standard basis vectors e_i for 0-based ``indices``."""
        one, zero = Scalar.one(field), Scalar.zero(field)
        vecs = [[one if k == i else zero for k in range(d)] for i in indices]
        return cls.span(vecs, d, field)

    @property
    def field(self) -> FieldDesc:
        return self.basis.field

    @property
    def dim(self) -> int:
        return self.basis.ncols

    def vectors(self) -> list[tuple]:
        return self.basis.columns()

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.basis == other.basis

    def __hash__(self):
        return hash((self.ambient_dim, self.basis))

    def __repr__(self):
        return f"Subspace(dim={self.dim} in {self.ambient_dim}: {self.basis!r})"

    def contains_vector(self, v: Sequence[Scalar]) -> bool:
        return solve(self.basis, v) is not None if self.dim else all(not x.num for x in v)

    def specialize0(self) -> Subspace:
        return Subspace.of_matrix(self.basis.specialize0())


def _empty(d: int, field: FieldDesc) -> Matrix:
    return Matrix([()] * d, field, 0)


def _check_ambient(U: Subspace, V: Subspace):
    if U.ambient_dim != V.ambient_dim:
        raise DimensionMismatch(f"ambient dimensions {U.ambient_dim} and {V.ambient_dim}")


def subspace_sum(U: Subspace, V: Subspace) -> Subspace:
    _check_ambient(U, V)
    return Subspace.span(U.vectors() + V.vectors(), U.ambient_dim, U.field)


def intersect(U: Subspace, V: Subspace) -> Subspace:
    _check_ambient(U, V)
    if U.dim == 0 or V.dim == 0:
        return Subspace.zero(U.ambient_dim, U.field)
    M = Matrix.hstack([U.basis, -V.basis])
    K = kernel(M)
    top = [c[: U.dim] for c in K.vectors()]
    return Subspace.span([U.basis.apply(c) for c in top], U.ambient_dim, U.field)


def contains(U: Subspace, V: Subspace) -> bool:
    """True when V is a subspace of U."""
    _check_ambient(U, V)
    return subspace_sum(U, V).dim == U.dim


def equals(U: Subspace, V: Subspace) -> bool:
    _check_ambient(U, V)
    return U == V


def subspace_ops(U: Subspace, V: Subspace, op: str):
    ops = {"sum": subspace_sum, "intersect": intersect, "contains": contains, "equals": equals}
    try:
        return ops[op](U, V)
    except KeyError:
        raise ValueError(f"unknown subspace op {op!r}") from None


def complement(U: Subspace) -> Matrix:
    """Standard basis vectors completing U, chosen greedily in coordinate order."""
    d, field = U.ambient_dim, U.field
    M = Matrix.hstack([U.basis, Matrix.identity(d, field)])
    _, pivots = rref(M.rows, M.ncols)
    chosen = [c - U.dim for c in pivots if c >= U.dim]
    one, zero = Scalar.one(field), Scalar.zero(field)
    cols = [[one if k == i else zero for k in range(d)] for i in chosen]
    return Matrix.from_columns(cols, d, field) if cols else _empty(d, field)


# -- pairings -------------------------------------------------------------------------


def left_radical(B: Matrix, U: Subspace, V: Subspace) -> Subspace:
    """{u in U : u^T B v = 0 for all v in V}."""
    if B.nrows != U.ambient_dim or B.ncols != V.ambient_dim:
        raise DimensionMismatch("pairing shape does not match the subspaces")
    if U.dim == 0:
        return U
    if V.dim == 0:
        return U
    # coefficients c with c^T (U^T B V) = 0
    G = U.basis.T @ B @ V.basis
    K = kernel(G.T)
    return Subspace.span([U.basis.apply(c) for c in K.vectors()], U.ambient_dim, U.field)


def perp(B: Matrix, Vp: Subspace, side: str = "right") -> Subspace:
    """Right perp {w : <v, w> = 0 for v in V'} or left perp {w : <w, v> = 0}."""
    if side == "right":
        if Vp.ambient_dim != B.nrows:
            raise DimensionMismatch("subspace lives in the wrong factor")
        if Vp.dim == 0:
            return Subspace.full(B.ncols, B.field)
        return kernel(Vp.basis.T @ B)
    if side == "left":
        if Vp.ambient_dim != B.ncols:
            raise DimensionMismatch("subspace lives in the wrong factor")
        if Vp.dim == 0:
            return Subspace.full(B.nrows, B.field)
        return kernel((B @ Vp.basis).T)
    raise ValueError(f"side must be 'left' or 'right', not {side!r}")


def random_subspace(t: int, field: FieldDesc, rng, inside: Subspace) -> Subspace:
    """A random t-dimensional subspace of ``inside`` (retries until the span has dimension t)."""
    if not 0 <= t <= inside.dim:
        raise DimensionMismatch(f"cannot pick a {t}-dimensional subspace of a {inside.dim}-dimensional one")
    while True:
        vecs = [inside.basis.apply([Scalar.const(field.random_element(rng), field) for _ in range(inside.dim)]) for _ in range(t)]
        S = Subspace.span(vecs, inside.ambient_dim, field)
        if S.dim == t:
            return S


def perp_lemma_instance(d: int, field: FieldDesc, rng):
    """Random (B, V', W_1, W_2) with B nondegenerate on k^d x k^d and W_1 strictly inside W_2.

    Returns None when the instance misses the hypothesis perp(V') & W_2 <= W_1.
    """
    while True:
        B = Matrix.from_values([[field.random_element(rng) for _ in range(d)] for _ in range(d)], field)
        if not B.det().is_zero():
            break
    full = Subspace.full(d, field)
    w2 = rng.randint(1, d)
    W2 = random_subspace(w2, field, rng, full)
    W1 = random_subspace(rng.randint(0, w2 - 1), field, rng, W2)
    Vp = random_subspace(rng.randint(0, d), field, rng, full)
    if not contains(W1, intersect(perp(B, Vp, "right"), W2)):
        return None
    return B, Vp, W1, W2


# -- saturation -------------------------------------------------------------------------


def _shift_column(col: Sequence[Scalar], field: FieldDesc) -> tuple:
    v = min(x.valuation() for x in col)
    if v == 0:
        return tuple(col)
    f = Scalar.s_pow(-v, field)
    return tuple(x * f for x in col)


def saturate(M: Matrix) -> Matrix:
    """Rescale columns by powers of s until the reduction mod s has full column rank.

    The column span over k(s) is unchanged and the result has entries of
    nonnegative valuation, so its columns are a basis of the saturated
    lattice (span intersected with the valuation ring).
    """
    field = M.field
    if rank(M) != M.ncols:
        raise NotFullRank(f"{M.ncols} columns of rank {rank(M)}")
    cols = [_shift_column(c, field) for c in M.columns()]
    s_inv = Scalar.s_pow(-1, field)
    while True:
        cur = Matrix.from_columns(cols, M.nrows, field) if cols else M
        M0 = cur.specialize0()
        red, pivots = rref(M0.rows, M0.ncols)
        if len(pivots) == len(cols):
            return cur
        free = next(c for c in range(len(cols)) if c not in set(pivots))
        coeffs = [Scalar.zero(field)] * len(cols)
        coeffs[free] = Scalar.one(field)
        for row, pc in zip(red, pivots):
            coeffs[pc] = -row[free]
        j = next(c for c in range(len(cols)) if coeffs[c].num)
        # lift of a k-relation; the combination vanishes mod s
        combo = cur.apply(coeffs)
        scale = s_inv / coeffs[j]
        cols[j] = _shift_column(tuple(x * scale for x in combo), field)


# -- sparse systems over k ----------------------------------------------------------------


class SparseEliminator:
    """Incremental rank of sparse linear equations over the base field k.

    Rows are dicts ``{column: coefficient}`` with coefficients in k.
    """

    def __init__(self, field: FieldDesc):
        self.field = field
        self.pivots: dict[int, dict] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def add(self, row: dict) -> bool:
        p = self.field.modulus
        row = {c: x for c, x in row.items() if x != 0}
        while row:
            c = min(row)
            prow = self.pivots.get(c)
            if prow is None:
                inv = self.field.inv(row[c])
                if p:
                    self.pivots[c] = {k: x * inv % p for k, x in row.items()}
                else:
                    self.pivots[c] = {k: x * inv for k, x in row.items()}
                return True
            m = row[c]
            for k, y in prow.items():
                x = row.get(k, 0) - m * y
                if p:
                    x %= p
                if x == 0:
                    row.pop(k, None)
                else:
                    row[k] = x
        return False
