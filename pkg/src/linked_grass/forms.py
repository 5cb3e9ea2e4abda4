"""Linked bilinear, alternating, and symplectic forms on a chain.

A linked form of index m (stored as ``two_m`` = 2m) is an n x n grid of
Gram matrices B[i][j], with <x, y>_{i,j} = x^T B_{i,j} y for x in E_i and
y in E_j.  Pushing an argument one level forward picks up s^eps, one level
backward s^eps_hat, where

    eps(i, j)     = 1 if i + j > 2m else 0
    eps_hat(i, j) = 1 if i + j < 2m else 0
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import comb

from .chain import LinkedChain, WDecomp, composite, pushed_frame, structure_decomposition
from .diagnostics import Report
from .errors import DecompositionFailed, DimensionMismatch, GenerationExhausted, IndexOutOfRange, InvalidConfig, NotInvertible
from .linalg import Matrix, SparseEliminator, Subspace, kernel, left_radical, contains
from .scalar import FieldDesc, Scalar


def epsilon(i: int, j: int, two_m: int) -> int:
    return 1 if i + j > two_m else 0


def epsilon_hat(i: int, j: int, two_m: int) -> int:
    return 1 if i + j < two_m else 0


def _first_moves(a: int, i: int, b: int, two_m: int) -> int:
    # first argument a -> i with the second argument held at level b
    if i >= a:
        return sum(epsilon(k, b, two_m) for k in range(a + 1, i + 1))
    return sum(epsilon_hat(k, b, two_m) for k in range(i, a))


def _second_moves(b: int, j: int, a: int, two_m: int) -> int:
    # second argument b -> j with the first argument held at level a
    if j >= b:
        return sum(epsilon(a, l, two_m) for l in range(b + 1, j + 1))
    return sum(epsilon_hat(a, l, two_m) for l in range(j, b))


def exponent(a: int, b: int, i: int, j: int, two_m: int, n: int | None = None) -> int:
    """Power of s relating <f(x), f(y)>_{i,j} to <x, y>_{a,b} for x in E_a, y in E_b.

    Moves the first argument a -> i, then the second b -> j.
    """
    if n is not None and not all(1 <= t <= n for t in (a, b, i, j)):
        raise IndexOutOfRange(f"exponent({a}, {b}, {i}, {j}) with n = {n}")
    return _first_moves(a, i, b, two_m) + _second_moves(b, j, i, two_m)


def exponent_column_first(a: int, b: int, i: int, j: int, two_m: int) -> int:
    """Same exponent along the other path (second argument first)."""
    return _second_moves(b, j, a, two_m) + _first_moves(a, i, j, two_m)


def consistency_failures(n: int, two_m: int) -> list[str]:
    """Check the eight epsilon identity families for all suitable i, j in [1, n]."""
    e, h = (lambda i, j: epsilon(i, j, two_m)), (lambda i, j: epsilon_hat(i, j, two_m))
    bad = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            checks = []
            if i >= 2:
                checks.append(("eps(i,j)+eps_hat(i-1,j)=1", e(i, j) + h(i - 1, j) == 1))
            if i <= n - 1:
                checks.append(("eps(i+1,j)+eps_hat(i,j)=1", e(i + 1, j) + h(i, j) == 1))
            if j >= 2:
                checks.append(("eps(i,j)+eps_hat(i,j-1)=1", e(i, j) + h(i, j - 1) == 1))
            if j <= n - 1:
                checks.append(("eps(i,j+1)+eps_hat(i,j)=1", e(i, j + 1) + h(i, j) == 1))
            if i >= 2 and j >= 2:
                checks.append(("fwd/fwd commute", e(i, j) + e(i - 1, j) == e(i, j) + e(i, j - 1)))
            if i >= 2 and j <= n - 1:
                checks.append(("fwd/bwd commute", e(i, j) + h(i - 1, j) == h(i, j) + e(i, j + 1)))
            if i <= n - 1 and j >= 2:
                checks.append(("bwd/fwd commute", h(i, j) + e(i + 1, j) == e(i, j) + h(i, j - 1)))
            if i <= n - 1 and j <= n - 1:
                checks.append(("bwd/bwd commute", h(i, j) + h(i + 1, j) == h(i, j) + h(i, j + 1)))
            bad.extend(f"{name} at (i={i}, j={j}, 2m={two_m})" for name, ok in checks if not ok)
    return bad


# -- data types ----------------------------------------------------------------


@dataclass(frozen=True)
class LinkedForm:
    two_m: int
    gram: tuple[tuple[Matrix, ...], ...]

    def __post_init__(self):
        gram = tuple(tuple(row) for row in self.gram)
        object.__setattr__(self, "gram", gram)
        n = len(gram)
        if n < 1 or any(len(row) != n for row in gram):
            raise DimensionMismatch("gram must be a square grid")
        if not 2 <= self.two_m <= 2 * n:
            raise InvalidConfig(f"two_m = {self.two_m} outside [2, {2 * n}]")
        d = gram[0][0].nrows
        for row in gram:
            for B in row:
                if B.shape != (d, d):
                    raise DimensionMismatch("Gram matrices must all be d x d")

    @property
    def n(self) -> int:
        return len(self.gram)

    @property
    def d(self) -> int:
        return self.gram[0][0].nrows

    @property
    def field(self) -> FieldDesc:
        return self.gram[0][0].field

    def B(self, i: int, j: int) -> Matrix:
        return self.gram[i - 1][j - 1]

    def fiber(self) -> LinkedForm:
        return LinkedForm(self.two_m, [[B.specialize0() for B in row] for row in self.gram])

    def to_json(self) -> dict:
        return {"two_m": self.two_m, "gram": [[B.to_json() for B in row] for row in self.gram]}

    @classmethod
    def from_json(cls, obj, field: FieldDesc) -> LinkedForm:
        return cls(int(obj["two_m"]), [[Matrix.from_json(B, field) for B in row] for row in obj["gram"]])

    @classmethod
    def zero(cls, n: int, d: int, two_m: int, field: FieldDesc) -> LinkedForm:
        Z = Matrix.zeros(d, d, field)
        return cls(two_m, [[Z] * n for _ in range(n)])


@dataclass(frozen=True)
class RestrictedForm:
    """Gram matrix on the direct sum of the W_a, blocked by the decomposition."""

    decomp: WDecomp
    gram: Matrix

    def block(self, a: int, b: int) -> Matrix:
        off, dims = self.decomp.offsets, self.decomp.dims
        return self.gram.submatrix(off[a - 1], off[a - 1] + dims[a - 1], off[b - 1], off[b - 1] + dims[b - 1])

    def is_alternating(self) -> bool:
        return _is_alternating(self.gram)


def _is_alternating(B: Matrix) -> bool:
    return B == -B.T and all(not B[k, k].num for k in range(B.nrows))


# -- validation ---------------------------------------------------------------------


def check_compatibility(F: LinkedForm, c: LinkedChain) -> Report:
    """The four push identities, exactly, in the chain's mode."""
    report = Report("compatibility")
    if F.n != c.n or F.d != c.d:
        report.fail("shape", f"form is {F.n}x{F.d}, chain is {c.n}x{c.d}")
        return report
    n, m2 = c.n, F.two_m
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            B = F.B(i, j)
            if i >= 2 and c.fwd(i - 1).T @ B != F.B(i - 1, j).scale(c.s_power(epsilon(i, j, m2))):
                report.fail("fwd-first", f"<f_{i - 1} x, y>_({i},{j}) != s^eps <x, y>_({i - 1},{j})")
            if j >= 2 and B @ c.fwd(j - 1) != F.B(i, j - 1).scale(c.s_power(epsilon(i, j, m2))):
                report.fail("fwd-second", f"<x, f_{j - 1} y>_({i},{j}) != s^eps <x, y>_({i},{j - 1})")
            if i <= n - 1 and c.bwd(i).T @ B != F.B(i + 1, j).scale(c.s_power(epsilon_hat(i, j, m2))):
                report.fail("bwd-first", f"<f^{i} x, y>_({i},{j}) != s^eps_hat <x, y>_({i + 1},{j})")
            if j <= n - 1 and B @ c.bwd(j) != F.B(i, j + 1).scale(c.s_power(epsilon_hat(i, j, m2))):
                report.fail("bwd-second", f"<x, f^{j} y>_({i},{j}) != s^eps_hat <x, y>_({i},{j + 1})")
    for clause in ("fwd-first", "fwd-second", "bwd-first", "bwd-second"):
        report.passed(clause)
    return report


def check_alternating(F: LinkedForm) -> Report:
    report = Report("alternating")
    for i in range(1, F.n + 1):
        if not _is_alternating(F.B(i, i)):
            report.fail("diagonal", f"<,>_({i},{i}) is not alternating")
        for j in range(i + 1, F.n + 1):
            if F.B(i, j) != -F.B(j, i).T:
                report.fail("swap", f"<,>_({i},{j}) != -<,>_({j},{i}) o sw")
    report.passed("diagonal")
    report.passed("swap")
    return report


def check_induced_relations(F: LinkedForm, c: LinkedChain) -> Report:
    """Every pairing off the antidiagonal is induced from one nearer to it."""
    report = Report("induced_relations")
    n, m2 = c.n, F.two_m
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            B = F.B(i, j)
            if i + j > m2:
                for l in range(max(1, m2 - i), j):
                    if B != F.B(i, l) @ composite(c, j, l):
                        report.fail("i", f"B({i},{j}) != B({i},{l}) f^({j},{l})")
                for l in range(max(1, m2 - j), i):
                    if B != composite(c, i, l).T @ F.B(l, j):
                        report.fail("iii", f"B({i},{j}) != f^({i},{l})^T B({l},{j})")
            elif i + j < m2:
                for l in range(j + 1, min(n, m2 - i) + 1):
                    if B != F.B(i, l) @ composite(c, j, l):
                        report.fail("ii", f"B({i},{j}) != B({i},{l}) f_({j},{l})")
                for l in range(i + 1, min(n, m2 - j) + 1):
                    if B != composite(c, i, l).T @ F.B(l, j):
                        report.fail("iv", f"B({i},{j}) != f_({i},{l})^T B({l},{j})")
    for clause in ("i", "ii", "iii", "iv"):
        report.passed(clause)
    return report


def _forced_radical(c: LinkedChain, i: int, two_m: int) -> Subspace:
    # <,>_{i,i} always kills ker f_i below the centre and ker f^{i-1} above it
    if 2 * i < two_m and i < c.n:
        return kernel(c.fwd(i))
    if 2 * i > two_m and i > 1:
        return kernel(c.bwd(i - 1))
    return Subspace.zero(c.d, c.field)


def check_symplectic(F: LinkedForm, c: LinkedChain, radical_variant: str = "definition") -> Report:
    """Clauses (I)-(III) of the linked symplectic condition.

    ``radical_variant="proof"`` compares the radical of <,>_{i,1} with the
    kernel of the composite f^{i,2m-1} (and dually f_{i,2m-n}) instead of
    ker f^{i-1} (ker f_i).  The diagonal-radical diagnostic lands in
    ``report.flags`` and never changes the verdict.
    """
    report = Report("symplectic")
    n, m2 = c.n, F.two_m
    full = Subspace.full(c.d, c.field)
    for i in range(max(1, m2 - n), min(n, m2 - 1) + 1):
        j = m2 - i
        det = F.B(i, j).det()
        if c.mode == "fiber":
            ok = not det.is_zero()
        else:
            ok = not det.is_zero() and det.valuation() == 0 and F.B(i, j).min_valuation() >= 0
        report.expect("I", ok, f"<,>_({i},{j}) is degenerate")

    fc, Ff = c.fiber(), F.fiber()
    if m2 < n + 1:
        for i in range(m2, n + 1):
            rad = left_radical(Ff.B(i, 1), full, full)
            target = kernel(fc.bwd(i - 1) if radical_variant == "definition" else composite(fc, i, m2 - 1))
            report.expect("II", rad == target, f"radical of <,>_({i},1) differs from the expected kernel at s = 0")
    if m2 > n + 1:
        for i in range(1, m2 - n):
            rad = left_radical(Ff.B(i, n), full, full)
            target = kernel(fc.fwd(i) if radical_variant == "definition" else composite(fc, i, m2 - n))
            report.expect("III", rad == target, f"radical of <,>_({i},{n}) differs from ker f_{i} at s = 0")

    for i in range(1, n + 1):
        rad = left_radical(Ff.B(i, i), full, full)
        low = _forced_radical(fc, i, m2)
        if rad == low:
            report.notes.append(f"level {i}: radical of <,>_({i},{i}) equals the forced kernel (dim {rad.dim})")
        elif contains(rad, low):
            report.flags.append(
                f"level {i}: radical of <,>_({i},{i}) has dim {rad.dim}, strictly larger than the forced kernel (dim {low.dim})"
            )
        else:
            report.notes.append(f"level {i}: radical of <,>_({i},{i}) (dim {rad.dim}) does not contain the forced kernel")
    return report


# -- extension and restriction ---------------------------------------------------------


def restrict_form(F: LinkedForm, W: WDecomp) -> RestrictedForm:
    n = F.n
    blocks = []
    for a in range(1, n + 1):
        row = []
        for b in range(1, n + 1):
            row.append(W.spaces[a - 1].basis.T @ F.B(a, b) @ W.spaces[b - 1].basis)
        blocks.append(row)
    total = W.total
    rows = []
    for a in range(n):
        for k in range(W.dims[a]):
            rows.append(sum((blocks[a][b].rows[k] for b in range(n)), ()))
    gram = Matrix(rows, F.field, total) if rows else Matrix([], F.field, 0)
    return RestrictedForm(W, gram)


def extend_form(c: LinkedChain, W: WDecomp, A, two_m: int) -> LinkedForm:
    """The unique linked form whose restriction to the W-blocks is A.

    The pairing of the pushed copies of W_a (in E_i) and W_b (in E_j) is
    s^exponent(a, b, i, j) times the block A_{a,b}.
    """
    gram_A = A.gram if isinstance(A, RestrictedForm) else A
    if gram_A.shape != (W.total, W.total) or W.total != c.d:
        raise DimensionMismatch("restricted form does not match the decomposition")
    n = c.n
    offs, dims = W.offsets, W.dims
    owner = [a for a in range(1, n + 1) for _ in range(dims[a - 1])]
    inv = []
    for i in range(1, n + 1):
        try:
            inv.append(pushed_frame(c, W, i).inverse())
        except NotInvertible as exc:
            raise DecompositionFailed(f"pushed W-blocks do not span E_{i}") from exc
    powers = {}
    gram = []
    for i in range(1, n + 1):
        row = []
        for j in range(1, n + 1):
            G = []
            for p in range(c.d):
                a = owner[p]
                Grow = []
                for q in range(c.d):
                    x = gram_A[p, q]
                    if x.num:
                        key = exponent(a, owner[q], i, j, two_m)
                        if key not in powers:
                            powers[key] = c.s_power(key)
                        x = x * powers[key]
                    Grow.append(x)
                G.append(Grow)
            G = Matrix(G, c.field, c.d)
            row.append(inv[i - 1].T @ G @ inv[j - 1])
        gram.append(row)
    return LinkedForm(two_m, gram)


def conjugate_form(F: LinkedForm, gs) -> LinkedForm:
    """Transport a form along the base change of :func:`chain.conjugate`."""
    inv = [g.inverse() for g in gs]
    return LinkedForm(F.two_m, [[inv[i].T @ F.B(i + 1, j + 1) @ inv[j] for j in range(F.n)] for i in range(F.n)])


# -- moduli of forms --------------------------------------------------------------------


def form_space_dimension(c: LinkedChain, two_m: int, variant: str = "bilinear") -> int:
    """Dimension of the space of linked bilinear (or alternating) forms at s = 0.

    Sets up every compatibility identity as a sparse linear equation in the
    n^2 d^2 Gram entries and returns the nullity.
    """
    if variant not in ("bilinear", "alternating"):
        raise ValueError(f"variant must be 'bilinear' or 'alternating', not {variant!r}")
    bil, alt = form_space_dimensions(c, two_m, alternating=variant == "alternating")
    return bil if variant == "bilinear" else alt


def form_space_dimensions(c: LinkedChain, two_m: int, alternating: bool = True) -> tuple[int, int | None]:
    """(bilinear, alternating) dimensions from one elimination; the alternating
    system is the bilinear one plus antisymmetry rows."""
    fc = c.fiber()
    n, d, field = fc.n, fc.d, fc.field
    p = field.modulus
    one = field.coerce(1)
    dd = d * d

    def cols(M):
        # column x of M as its nonzero (t, M[t, x]) pairs
        return [[(t, M[t, x].constant_value()) for t in range(d) if M[t, x].num] for x in range(d)]

    fw = [None] + [cols(fc.fwd(i)) for i in range(1, n)]
    bw = [None] + [cols(fc.bwd(i)) for i in range(1, n)]
    elim = SparseEliminator(field)
    minus = (-one) % p if p else -one

    def left(base, other, f, x, y, hit):
        # sum_t f[t][x] * B[t, y]  (- B'[x, y] when the exponent vanishes)
        row = {base + t * d + y: v for t, v in f[x]}
        if hit:
            key = other + x * d + y
            v = (row.get(key, 0) + minus) % p if p else row.get(key, 0) + minus
            if v:
                row[key] = v
            else:
                row.pop(key, None)
        elim.add(row)

    def right(base, other, f, x, y, hit):
        row = {base + x * d + t: v for t, v in f[y]}
        if hit:
            key = other + x * d + y
            v = (row.get(key, 0) + minus) % p if p else row.get(key, 0) + minus
            if v:
                row[key] = v
            else:
                row.pop(key, None)
        elim.add(row)

    def block(i, j):
        return ((i - 1) * n + (j - 1)) * dd

    for i in range(1, n + 1):
        for j in range(1, n + 1):
            z = epsilon(i, j, two_m) == 0
            zh = epsilon_hat(i, j, two_m) == 0
            b = block(i, j)
            for x in range(d):
                for y in range(d):
                    if i >= 2:  # f_{i-1}^T B_ij = s^eps B_{i-1,j}
                        left(b, block(i - 1, j), fw[i - 1], x, y, z)
                    if j >= 2:  # B_ij f_{j-1} = s^eps B_{i,j-1}
                        right(b, block(i, j - 1), fw[j - 1], x, y, z)
                    if i <= n - 1:  # (f^i)^T B_ij = s^eps_hat B_{i+1,j}
                        left(b, block(i + 1, j), bw[i], x, y, zh)
                    if j <= n - 1:  # B_ij f^j = s^eps_hat B_{i,j+1}
                        right(b, block(i, j + 1), bw[j], x, y, zh)
    total = n * n * dd
    bilinear = total - elim.rank
    if not alternating:
        return bilinear, None
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            for x in range(d):
                for y in range(d):
                    if i == j and x == y:
                        elim.add({block(i, i) + x * d + x: one})
                    elif i < j or x < y:
                        elim.add({block(i, j) + x * d + y: one, block(j, i) + y * d + x: one})
    return bilinear, total - elim.rank


def expected_form_space_dimension(d: int, variant: str) -> int:
    return d * d if variant == "bilinear" else comb(d, 2)


# -- generation ---------------------------------------------------------------------------


def random_alternating(size: int, field: FieldDesc, rng: random.Random) -> Matrix:
    z = Scalar.zero(field)
    rows = [[z] * size for _ in range(size)]
    for p in range(size):
        for q in range(p + 1, size):
            x = Scalar.const(field.random_element(rng), field)
            rows[p][q] = x
            rows[q][p] = -x
    return Matrix(rows, field, size)


def is_symmetric_profile(dims, two_m: int) -> bool:
    n = len(dims)

    def w(a):
        return dims[a - 1] if 1 <= a <= n else 0

    return all(w(a) == w(two_m - a) for a in range(1, n + 1))


def _antidiagonal_screen(W: WDecomp, A: Matrix, two_m: int) -> bool:
    """Clause I at s = 0, read off the W-blocks before extending.

    In the pushed frames B_{i,j}(0) = P_i^{-T} G P_j^{-1} where G keeps the
    blocks of A with exponent 0, so nondegeneracy is det G != 0.
    """
    n = len(W.dims)
    owner = [a for a in range(1, n + 1) for _ in range(W.dims[a - 1])]
    zero = Scalar.zero(A.field)
    for i in range(max(1, two_m - n), min(n, two_m - 1) + 1):
        j = two_m - i
        rows = [
            [A[p, q] if exponent(owner[p], owner[q], i, j, two_m) == 0 else zero for q in range(A.ncols)]
            for p in range(A.nrows)
        ]
        if Matrix(rows, A.field, A.ncols).det().is_zero():
            return False
    return True


def standard_symplectic_form(
    c: LinkedChain, two_m: int, seed, attempts: int = 64, require_symmetric: bool = True
) -> LinkedForm:
    """Rejection-sample a linked symplectic form of central index two_m = n + 1."""
    if two_m != c.n + 1:
        raise InvalidConfig(f"generator needs two_m = n + 1 = {c.n + 1}, got {two_m}")
    W = structure_decomposition(c.fiber())
    if require_symmetric and not is_symmetric_profile(W.dims, two_m):
        raise InvalidConfig(f"W-profile {W.dims} is not symmetric about m = {two_m}/2")
    rng = random.Random(seed)
    reasons = []
    for _ in range(attempts):
        A = random_alternating(c.d, c.field, rng)
        if not _antidiagonal_screen(W, A, two_m):
            reasons.append("I: an antidiagonal pairing is degenerate at s = 0")
            continue
        F = extend_form(c, W, A, two_m)
        report = check_symplectic(F, c)
        if report.ok:
            return F
        reasons.append("; ".join(report.failures))
    raise GenerationExhausted(f"no linked symplectic form after {attempts} draws", attempts, reasons[-3:])
