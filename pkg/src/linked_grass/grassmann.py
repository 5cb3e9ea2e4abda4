"""Points of linked (alternating, symplectic) Grassmannians and their tangent spaces."""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from math import comb

from .chain import LinkedChain, WDecomp, check_s_linked, composite, induced_chain, structure_decomposition
from .diagnostics import Report
from .errors import DimensionMismatch, GenerationExhausted, NotExact, NotIsotropic, NotLinked
from .forms import LinkedForm, check_symplectic, extend_form, form_space_dimension
from .linalg import Matrix, Subspace, complement, kernel, rank, saturate, solve_matrix
from .scalar import FieldDesc, Scalar, random_poly


@dataclass(frozen=True)
class LinkedSubspace:
    """Bases F_i (d x r, full column rank) of subspaces F_i of E_i, one per level."""

    bases: tuple[Matrix, ...]

    def __post_init__(self):
        object.__setattr__(self, "bases", tuple(self.bases))
        shapes = {b.shape for b in self.bases}
        if len(shapes) != 1:
            raise DimensionMismatch(f"inconsistent basis shapes {shapes}")

    @property
    def n(self) -> int:
        return len(self.bases)

    @property
    def r(self) -> int:
        return self.bases[0].ncols

    @property
    def d(self) -> int:
        return self.bases[0].nrows

    @property
    def field(self) -> FieldDesc:
        return self.bases[0].field

    def fiber(self) -> LinkedSubspace:
        return LinkedSubspace([b.specialize0() for b in self.bases])

    def canonical(self) -> LinkedSubspace:
        return LinkedSubspace([Subspace.of_matrix(b).basis if b.ncols else b for b in self.bases])

    def subspaces(self) -> list[Subspace]:
        return [Subspace.of_matrix(b) if b.ncols else Subspace.zero(self.d, self.field) for b in self.bases]

    def to_json(self) -> dict:
        return {"r": self.r, "F": [b.to_json() for b in self.bases]}

    @classmethod
    def from_json(cls, obj, field: FieldDesc) -> LinkedSubspace:
        F = cls([Matrix.from_json(b, field) for b in obj["F"]])
        if int(obj.get("r", F.r)) != F.r:
            raise DimensionMismatch("declared r does not match the bases")
        return F

    @classmethod
    def uniform(cls, n: int, d: int, indices, field: FieldDesc) -> LinkedSubspace:
        """The same coordinate subspace span(e_k : k in indices) at every level (0-based)."""
        return cls([Subspace.coordinate(d, indices, field).basis] * n)


@dataclass(frozen=True)
class TangentReport:
    lg_tangent_dim: int
    form_target_dim: int
    tangent_map_rank: int
    lag_tangent_dim: int
    expected_codim: int
    verdict: bool
    equation_count: int | None = None
    notes: tuple[str, ...] = ()

    def summary(self) -> dict:
        return {
            "lg": self.lg_tangent_dim,
            "target": self.form_target_dim,
            "rank": self.tangent_map_rank,
            "lag": self.lag_tangent_dim,
        }

    def to_json(self) -> dict:
        out = {
            "lg_tangent_dim": str(self.lg_tangent_dim),
            "form_target_dim": str(self.form_target_dim),
            "tangent_map_rank": str(self.tangent_map_rank),
            "lag_tangent_dim": str(self.lag_tangent_dim),
            "expected_codim": str(self.expected_codim),
            "verdict": "pass" if self.verdict else "fail",
        }
        if self.equation_count is not None:
            out["equation_count"] = str(self.equation_count)
        if self.notes:
            out["notes"] = list(self.notes)
        return out


# -- checks --------------------------------------------------------------------------


def _shape_ok(c: LinkedChain, F: LinkedSubspace):
    if F.n != c.n or F.d != c.d:
        raise DimensionMismatch(f"subspace is {F.n} levels in dimension {F.d}; chain is {c.n} x {c.d}")


def check_linked(c: LinkedChain, F: LinkedSubspace) -> Report:
    _shape_ok(c, F)
    report = Report("linked")
    for i, b in enumerate(F.bases, start=1):
        if b.ncols and rank(b) != b.ncols:
            report.fail("rank", f"F_{i} basis is not of full column rank")
    if not report.ok:
        return report
    if F.r == 0:
        report.passed("inclusions")
        return report
    for i in range(1, c.n):
        if solve_matrix(F.bases[i], c.fwd(i) @ F.bases[i - 1]) is None:
            report.fail("inclusions", f"f_{i} F_{i} is not inside F_{i + 1}")
        if solve_matrix(F.bases[i - 1], c.bwd(i) @ F.bases[i]) is None:
            report.fail("inclusions", f"f^{i} F_{i + 1} is not inside F_{i}")
    report.passed("inclusions")
    return report


def check_exact(c: LinkedChain, F: LinkedSubspace) -> Report:
    """Exactness at s = 0: the induced chain on F is s-linked."""
    fc, Ff = c.fiber(), F.fiber()
    linked = check_linked(fc, Ff)
    if not linked.ok:
        raise NotLinked("; ".join(linked.failures))
    report = Report("exact")
    if F.r == 0:
        report.notes.append("zero subspace is trivially exact")
        return report
    inner = check_s_linked(induced_chain(fc, Ff))
    report.failures.extend(inner.failures)
    report.clauses.update(inner.clauses)
    return report


def check_isotropic(F: LinkedSubspace, form: LinkedForm) -> Report:
    report = Report("isotropic")
    if F.r == 0:
        return report
    for i in range(1, form.n + 1):
        for j in range(1, form.n + 1):
            if not (F.bases[i - 1].T @ form.B(i, j) @ F.bases[j - 1]).is_zero():
                report.fail("vanish", f"<F_{i}, F_{j}>_({i},{j}) != 0")
    report.passed("vanish")
    return report


# -- tangent spaces ---------------------------------------------------------------------


@dataclass(frozen=True)
class TangentBasis:
    """Elementary homs phi: (p-th vector of W^F_i) -> (q-th complement vector of F_i)."""

    w_vectors: tuple[Matrix, ...]  # per level, W^F_i as d x w_i in ambient coordinates
    complements: tuple[Matrix, ...]  # per level, d x (d - r) representatives of E_i / F_i
    index: tuple[tuple[int, int, int], ...]  # (level, p, q)

    @property
    def dim(self) -> int:
        return len(self.index)


def _fiber_point(c: LinkedChain, F: LinkedSubspace):
    fc, Ff = c.fiber(), F.fiber()
    if not check_exact(fc, Ff).ok:
        raise NotExact("point is not exact")
    return fc, Ff


def tangent_space(c: LinkedChain, F: LinkedSubspace, W_F: WDecomp | None = None) -> TangentBasis:
    fc, Ff = _fiber_point(c, F)
    d, r = fc.d, Ff.r
    if r == 0:
        comps = tuple(Matrix.identity(d, fc.field) for _ in range(fc.n))
        return TangentBasis(tuple(Matrix([()] * d, fc.field, 0) for _ in range(fc.n)), comps, ())
    if W_F is None:
        W_F = structure_decomposition(induced_chain(fc, Ff))
    wv, comps, index = [], [], []
    for i in range(1, fc.n + 1):
        Fi = Ff.bases[i - 1]
        Wi = W_F.spaces[i - 1]
        wv.append(Fi @ Wi.basis if Wi.dim else Matrix([()] * d, fc.field, 0))
        comps.append(complement(Subspace.of_matrix(Fi)))
        index.extend((i, p, q) for p in range(Wi.dim) for q in range(d - r))
    return TangentBasis(tuple(wv), tuple(comps), tuple(index))


def tangent_form_map(c: LinkedChain, form: LinkedForm, F: LinkedSubspace, W_F: WDecomp | None = None) -> Matrix:
    """Matrix of phi -> <phi(x), y> + <x, phi(y)> on pairs x < y of the W^F basis.

    Rows are the C(r, 2) pairs, columns the r(d - r) elementary tangent vectors.
    """
    fc, Ff = _fiber_point(c, F)
    Bf = form.fiber()
    if not check_isotropic(Ff, Bf).ok:
        raise NotIsotropic("point is not isotropic")
    T = tangent_space(fc, Ff, W_F)
    field = fc.field
    vecs = []  # (level, column tuple)
    start = {}
    for i, Wm in enumerate(T.w_vectors, start=1):
        start[i] = len(vecs)
        vecs.extend((i, col) for col in Wm.columns())
    pairs = [(p, q) for p in range(len(vecs)) for q in range(p + 1, len(vecs))]
    pair_rows = {pq: k for k, pq in enumerate(pairs)}
    zero = Scalar.zero(field)
    cols = []
    for i, p, q in T.index:
        g = start[i] + p
        target = T.complements[i - 1].col(q)
        col = [zero] * len(pairs)
        for h, (b, y) in enumerate(vecs):
            if h == g:
                continue
            if g < h:  # <phi(x_g), x_h>_{i,b}
                val = _pair(target, Bf.B(i, b), y)
                col[pair_rows[(g, h)]] = col[pair_rows[(g, h)]] + val
            else:  # <x_h, phi(x_g)>_{b,i}
                val = _pair(y, Bf.B(b, i), target)
                col[pair_rows[(h, g)]] = col[pair_rows[(h, g)]] + val
        cols.append(col)
    if not pairs:
        return Matrix([], field, len(cols))
    return Matrix.from_columns(cols, len(pairs), field)


def _pair(x, B: Matrix, y) -> Scalar:
    return sum((xi * v for xi, v in zip(x, B.apply(y)) if xi.num), Scalar.zero(B.field))


def verify_point(c: LinkedChain, form: LinkedForm, F: LinkedSubspace) -> TangentReport:
    """Tangent dimensions at an exact isotropic point; pass iff the form map has rank C(r, 2)."""
    fc, Ff = _fiber_point(c, F)
    r, d = Ff.r, fc.d
    expected = comb(r, 2)
    if r == 0:
        return TangentReport(0, 0, 0, 0, 0, True, 0)
    ind = induced_chain(fc, Ff)
    W_F = structure_decomposition(ind)
    T = tangent_space(fc, Ff, W_F)
    M = tangent_form_map(fc, form, Ff, W_F)
    target = M.nrows
    rk = rank(M) if target and M.ncols else 0
    equations = form_space_dimension(ind, form.two_m, "alternating")
    notes = []
    if equations != target:
        notes.append(f"form space on F has dimension {equations}, map target has {target}")
    verdict = rk == expected and equations == target == expected
    return TangentReport(T.dim, target, rk, T.dim - rk, expected, verdict, equations, tuple(notes))


# -- flat limits ------------------------------------------------------------------------------


def _as_matrix(F1, d: int, field: FieldDesc) -> Matrix:
    if isinstance(F1, Subspace):
        return F1.basis
    return F1


def saturated_pushes(c: LinkedChain, F1) -> list[Matrix]:
    """Saturations of f_{1,i} F1 over the valuation ring, one per level."""
    if c.mode != "family":
        raise ValueError("push_and_saturate needs a family-mode chain")
    M1 = _as_matrix(F1, c.d, c.field)
    if M1.ncols == 0:
        return [M1] * c.n
    return [saturate(composite(c, 1, i) @ M1) for i in range(1, c.n + 1)]


def push_and_saturate(c: LinkedChain, F1) -> LinkedSubspace:
    """Flat limit at s = 0 of the subspace generated by F1 at level 1."""
    sat = saturated_pushes(c, F1)
    out = LinkedSubspace([m.specialize0() for m in sat]).canonical()
    report = check_linked(c.fiber(), out)
    if not report.ok:
        raise NotLinked("flat limit is not linked: " + "; ".join(report.failures))
    return out


def sample_exact_isotropic(
    c: LinkedChain,
    form: LinkedForm,
    r: int,
    seed,
    attempts: int = 64,
    degree: int | None = None,
    require_symplectic: bool = True,
) -> tuple[LinkedSubspace, int]:
    """Like :func:`random_exact_isotropic` but also returns the number of draws used."""
    if c.mode != "family":
        raise ValueError("random_exact_isotropic needs a family-mode chain")
    if require_symplectic:
        rep = check_symplectic(form, c)
        if not rep.clauses.get("I", True):
            raise ValueError("form fails the antidiagonal nondegeneracy clause")
    field, d, n = c.field, c.d, c.n
    if r == 0:
        return LinkedSubspace([Matrix([()] * d, field, 0)] * n), 1
    if r > d:
        raise GenerationExhausted(f"r = {r} exceeds d = {d}", 0)
    degree = n if degree is None else degree
    rng = random.Random(seed)
    push = [composite(c, 1, i) for i in range(1, n + 1)]
    pulled = [push[i].T @ form.B(i + 1, j + 1) @ push[j] for i in range(n) for j in range(n)]
    reasons = []
    for attempt in range(1, attempts + 1):
        vecs: list[tuple] = []
        for _ in range(r):
            rows = [tuple(M.T.apply(u)) for u in vecs for M in pulled]
            if rows:
                K = kernel(Matrix(rows, field, d))
            else:
                K = Subspace.full(d, field)
            if K.dim <= len(vecs):
                raise GenerationExhausted(
                    f"isotropic subspaces over k(s) have dimension at most {K.dim} < {r}", attempt, reasons
                )
            while True:
                coeffs = [random_poly(field, rng, degree) for _ in range(K.dim)]
                v = K.basis.apply(coeffs)
                if rank(Matrix.from_columns(vecs + [v], d, field)) == len(vecs) + 1:
                    break
            vecs.append(v)
        F1 = Matrix.from_columns(vecs, d, field)
        point = push_and_saturate(c, F1)
        if not check_exact(c, point).ok:
            reasons.append("flat limit not exact")
            continue
        if not check_isotropic(point, form.fiber()).ok:
            reasons.append("flat limit not isotropic")
            continue
        return point, attempt
    raise GenerationExhausted(f"no exact isotropic point after {attempts} draws", attempts, reasons[-3:])


def random_exact_isotropic(c: LinkedChain, form: LinkedForm, r: int, seed, attempts: int = 64, **kw) -> LinkedSubspace:
    return sample_exact_isotropic(c, form, r, seed, attempts, **kw)[0]


# -- worked examples ------------------------------------------------------------------------------


@dataclass
class ExampleFixture:
    id: str
    chain: LinkedChain
    form: LinkedForm
    printed: dict[str, Matrix]
    points: dict[str, LinkedSubspace]
    expected: dict[str, dict]
    notes: list[str] = dc_field(default_factory=list)


_J4 = [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]]


def _example_51(field: FieldDesc) -> ExampleFixture:
    s = Scalar.s(field)
    s2 = s * s
    z, o = Scalar.zero(field), Scalar.one(field)
    f = Matrix.diag([o, o, s, s], field)
    fd = Matrix.diag([s, s, o, o], field)
    chain = LinkedChain(field, 4, [f, f], [fd, fd], "family")
    printed = {
        "f_1": f,
        "f^1": fd,
        "B_22": Matrix.from_values(_J4, field),
        "B_11": Matrix.from_values([[z, o, z, z], [-o, z, z, z], [z, z, z, s2], [z, z, -s2, z]], field),
        "B_33": Matrix.from_values([[z, s2, z, z], [-s2, z, z, z], [z, z, z, o], [z, z, -o, z]], field),
        "B_13": Matrix.from_values(_J4, field),
    }
    W = structure_decomposition(chain.fiber())
    form = extend_form(chain, W, Matrix.from_values(_J4, field), 4)
    for key in ("B_11", "B_22", "B_33", "B_13"):
        i, j = int(key[2]), int(key[3])
        if form.B(i, j) != printed[key]:
            raise AssertionError(f"extended form disagrees with printed {key}")
    points = {"origin": LinkedSubspace.uniform(3, 4, [0, 2], field)}
    expected = {"origin": {"lg": 4, "target": 1, "rank": 1, "lag": 3, "verdict": True}}
    return ExampleFixture("5.1", chain, form, printed, points, expected)


def chart_point(a1, a2, b1, b2, field: FieldDesc, at_fiber: bool = True) -> LinkedSubspace:
    """The open chart of the rank-2 linked Grassmannian of the 4-dimensional three-level example."""
    a1, a2, b1, b2 = (Scalar.const(x, field) if not isinstance(x, Scalar) else x for x in (a1, a2, b1, b2))
    s = Scalar.zero(field) if at_fiber else Scalar.s(field)
    o, z = Scalar.one(field), Scalar.zero(field)
    cols = [
        ((o, a1, z, a2), (z, s * s * b1, o, b2)),
        ((o, a1, z, s * a2), (z, s * b1, o, b2)),
        ((o, a1, z, s * s * a2), (z, b1, o, b2)),
    ]
    return LinkedSubspace([Matrix.from_columns(pair, 4, field) for pair in cols])


def chart_residuals(fx: ExampleFixture, params, at_fiber: bool = True) -> dict[str, Scalar]:
    """<u, v>_{i,j} for the two chart vectors u in F_i, v in F_j, on the diagonal and at (1,3)."""
    field = fx.chain.field
    F = chart_point(*params, field=field, at_fiber=at_fiber)
    form = fx.form.fiber() if at_fiber else fx.form
    out = {}
    for i, j in ((1, 1), (2, 2), (3, 3), (1, 3)):
        G = F.bases[i - 1].T @ form.B(i, j) @ F.bases[j - 1]
        out[f"{i}{j}"] = G[0, 1]
        out[f"{i}{j}_full"] = G
    return out


def chart_survey(fx: ExampleFixture, points: int = 20, seed=0) -> dict:
    """Evaluate the chart residuals at random parameter points at s = 0.

    Counts the points where every diagonal residual vanishes and where the
    (1,3) residual equals b1 + a2, respectively b1 - a2.
    """
    field = fx.chain.field
    rng = random.Random(seed)
    out = {"points": points, "diagonal_zero": 0, "cross_b1_plus_a2": 0, "cross_b1_minus_a2": 0, "samples": []}
    for _ in range(points):
        a1, a2, b1, b2 = (Scalar.const(field.random_element(rng, bound=50), field) for _ in range(4))
        res = chart_residuals(fx, (a1, a2, b1, b2))
        diag = all(res[k].is_zero() for k in ("11", "22", "33"))
        out["diagonal_zero"] += diag
        out["cross_b1_plus_a2"] += res["13"] == b1 + a2
        out["cross_b1_minus_a2"] += res["13"] == b1 - a2
        out["samples"].append({"a1": str(a1), "a2": str(a2), "b1": str(b1), "b2": str(b2), "cross": str(res["13"])})
    return out


def _example_52(field: FieldDesc) -> ExampleFixture:
    f1 = Matrix.diag([1, 1, 0, 0], field)
    fd1 = Matrix.diag([0, 0, 1, 1], field)
    chain = LinkedChain(field, 4, [f1], [fd1], "fiber")
    B22 = Matrix.from_values([[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]], field)
    # remaining pairings induced from <,>_{2,2} through f_1
    gram = [[f1.T @ B22 @ f1, f1.T @ B22], [B22 @ f1, B22]]
    form = LinkedForm(4, gram)
    printed = {"f_1": f1, "f^1": fd1, "B_22": B22}
    V1 = Subspace.coordinate(4, [0, 1], field).basis
    points = {"V1=span(e1,e2)": LinkedSubspace([V1, f1 @ V1])}
    expected = {"V1=span(e1,e2)": {"lg": 4, "target": 1, "rank": 0, "lag": 4, "verdict": False}}
    return ExampleFixture("5.2", chain, form, printed, points, expected)


def component_point_52(x, y, z, w, field: FieldDesc) -> LinkedSubspace:
    """A point with V_2 = f_1(V_1), V_1 = span(e1 + x e3 + y e4, e2 + z e3 + w e4)."""
    V1 = Matrix.from_values([[1, 0], [0, 1], [x, z], [y, w]], field)
    f1 = Matrix.diag([1, 1, 0, 0], field)
    return LinkedSubspace([V1, f1 @ V1])


def example_fixture(id: str, field: FieldDesc | None = None) -> ExampleFixture:
    field = field or FieldDesc()
    if id == "5.1":
        return _example_51(field)
    if id == "5.2":
        return _example_52(field)
    raise ValueError(f"unknown example {id!r}")

