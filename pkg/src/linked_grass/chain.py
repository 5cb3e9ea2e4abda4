"""s-linked chains E_1, ..., E_n of rank d with maps f_i : E_i -> E_{i+1} and f^i : E_{i+1} -> E_i.

A chain is in ``family`` mode (entries in k(s), s the uniformizer of the
valuation ring) or ``fiber`` mode (constant entries, s = 0).  Levels are
1-based in every public function, matching the usual indexing.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .diagnostics import Report
from .errors import (
    BadProfile,
    DecompositionFailed,
    DimensionMismatch,
    IndexOutOfRange,
    NotInvertible,
    NotLinked,
    UnitDeterminantRequired,
)
from .linalg import Matrix, Subspace, complement, image, intersect, kernel, rank, solve_matrix, subspace_sum
from .scalar import FieldDesc, Scalar

MODES = ("family", "fiber")


@dataclass(frozen=True)
class LinkedChain:
    field: FieldDesc
    d: int
    f: tuple[Matrix, ...]
    fdual: tuple[Matrix, ...]
    mode: str = "family"

    def __post_init__(self):
        object.__setattr__(self, "f", tuple(self.f))
        object.__setattr__(self, "fdual", tuple(self.fdual))
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.d < 1:
            raise DimensionMismatch("rank d must be positive")
        if len(self.f) != len(self.fdual):
            raise DimensionMismatch("f and fdual must have the same length")
        for m in self.f + self.fdual:
            if m.shape != (self.d, self.d):
                raise DimensionMismatch(f"map of shape {m.shape}, expected {(self.d, self.d)}")
            if self.mode == "fiber" and not m.is_constant():
                raise ValueError("fiber-mode chains need constant entries")

    @property
    def n(self) -> int:
        return len(self.f) + 1

    @property
    def s(self) -> Scalar:
        return Scalar.s(self.field) if self.mode == "family" else Scalar.zero(self.field)

    def fwd(self, i: int) -> Matrix:
        """f_i : E_i -> E_{i+1}, 1 <= i < n."""
        if not 1 <= i < self.n:
            raise IndexOutOfRange(f"f_{i} with n = {self.n}")
        return self.f[i - 1]

    def bwd(self, i: int) -> Matrix:
        """f^i : E_{i+1} -> E_i, 1 <= i < n."""
        if not 1 <= i < self.n:
            raise IndexOutOfRange(f"f^{i} with n = {self.n}")
        return self.fdual[i - 1]

    def fiber(self) -> LinkedChain:
        if self.mode == "fiber":
            return self
        return LinkedChain(
            self.field,
            self.d,
            [m.specialize0() for m in self.f],
            [m.specialize0() for m in self.fdual],
            "fiber",
        )

    def s_power(self, e: int) -> Scalar:
        """s^e in this chain's mode (0^0 = 1)."""
        if e == 0:
            return Scalar.one(self.field)
        if self.mode == "fiber":
            return Scalar.zero(self.field)
        return Scalar.s_pow(e, self.field)

    def to_json(self) -> dict:
        return {
            "field": field_to_json(self.field),
            "mode": self.mode,
            "n": self.n,
            "d": self.d,
            "f": [m.to_json() for m in self.f],
            "fdual": [m.to_json() for m in self.fdual],
        }

    @classmethod
    def from_json(cls, obj, field: FieldDesc | None = None) -> LinkedChain:
        field = field_from_json(obj["field"]) if "field" in obj else field
        if field is None:
            raise ValueError("chain has no field")
        c = cls(
            field,
            int(obj["d"]),
            [Matrix.from_json(m, field) for m in obj["f"]],
            [Matrix.from_json(m, field) for m in obj["fdual"]],
            obj.get("mode", "family"),
        )
        if "n" in obj and int(obj["n"]) != c.n:
            raise DimensionMismatch(f"declared n = {obj['n']} but {len(c.f)} maps given")
        return c


def field_to_json(field: FieldDesc) -> dict:
    if field.p is None:
        return {"kind": "rationals"}
    return {"kind": "prime_field", "p": field.p}


def field_from_json(obj) -> FieldDesc:
    if isinstance(obj, str):
        return FieldDesc.parse(obj)
    if obj["kind"] == "rationals":
        return FieldDesc.rationals()
    return FieldDesc("prime_field", int(obj["p"]))


# -- validation ---------------------------------------------------------------


def _fiber_maps(c: LinkedChain, report: Report, clause: str):
    try:
        fc = c.fiber()
    except Exception as exc:  # NegativeValuation
        report.fail(clause, f"maps do not specialize at s = 0 ({exc})")
        return None
    return fc


def check_weakly_linked(c: LinkedChain) -> Report:
    """Clauses (I) and (III)."""
    report = Report("weakly_linked")
    _check_composition(c, report)
    _check_transversality(c, report)
    return report


def check_s_linked(c: LinkedChain) -> Report:
    """Clauses (I), (II), (III)."""
    report = Report("s_linked")
    _check_composition(c, report)
    fc = _fiber_maps(c, report, "II")
    if fc is not None:
        for i in range(1, c.n):
            fi, fdi = fc.fwd(i), fc.bwd(i)
            if kernel(fdi) != image(fi):
                report.fail("II", f"ker f^{i} != im f_{i} at s = 0 (i={i})")
            if kernel(fi) != image(fdi):
                report.fail("II", f"ker f_{i} != im f^{i} at s = 0 (i={i})")
        report.passed("II")
    _check_transversality(c, report)
    return report


def _check_composition(c: LinkedChain, report: Report):
    sid = Matrix.identity(c.d, c.field).scale(c.s)
    for i in range(1, c.n):
        if c.fwd(i) @ c.bwd(i) != sid:
            report.fail("I", f"f_{i} f^{i} != s*id (i={i})")
        if c.bwd(i) @ c.fwd(i) != sid:
            report.fail("I", f"f^{i} f_{i} != s*id (i={i})")
    report.passed("I")


def _check_transversality(c: LinkedChain, report: Report):
    fc = _fiber_maps(c, report, "III")
    if fc is None:
        return
    for i in range(1, c.n - 1):
        if intersect(image(fc.fwd(i)), kernel(fc.fwd(i + 1))).dim:
            report.fail("III", f"im f_{i} meets ker f_{i + 1} at s = 0 (i={i})")
        if intersect(image(fc.bwd(i + 1)), kernel(fc.bwd(i))).dim:
            report.fail("III", f"im f^{i + 1} meets ker f^{i} at s = 0 (i={i})")
    report.passed("III")


# -- composites and ranks ---------------------------------------------------------


def composite(c: LinkedChain, i: int, j: int) -> Matrix:
    """f_{i,j} = f_{j-1}...f_i for i < j, f^{i,j} = f^j...f^{i-1} for i > j, id for i = j."""
    if not (1 <= i <= c.n and 1 <= j <= c.n):
        raise IndexOutOfRange(f"composite({i}, {j}) with n = {c.n}")
    out = Matrix.identity(c.d, c.field)
    if i < j:
        for k in range(i, j):
            out = c.fwd(k) @ out
    elif i > j:
        for k in range(i - 1, j - 1, -1):
            out = c.bwd(k) @ out
    return out


def rank_profile(c: LinkedChain) -> list[int]:
    """[r_0, r_1, ..., r_n] with r_i the rank of f_i at s = 0, r_0 = 0, r_n = d."""
    return [0] + [rank(c.fwd(i).specialize0()) for i in range(1, c.n)] + [c.d]


# -- structure decomposition -----------------------------------------------------------


@dataclass(frozen=True)
class WDecomp:
    ranks: tuple[int, ...]
    spaces: tuple[Subspace, ...]

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(w.dim for w in self.spaces)

    @property
    def offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for w in self.dims:
            out.append(acc)
            acc += w
        return tuple(out)

    @property
    def total(self) -> int:
        return sum(self.dims)


def _kernel_span(c: LinkedChain, i: int) -> Subspace:
    """span(ker f_i, ker f^{i-1}) inside E_i, with the boundary conventions."""
    parts = Subspace.zero(c.d, c.field)
    if i < c.n:
        parts = subspace_sum(parts, kernel(c.fwd(i)))
    if i > 1:
        parts = subspace_sum(parts, kernel(c.bwd(i - 1)))
    return parts


def pushed_frame(c: LinkedChain, W: WDecomp, i: int) -> Matrix:
    """Columns f_{a,i}(W_a) for a <= i and f^{a,i}(W_a) for a > i, in order a = 1..n."""
    blocks = [composite(c, a, i) @ W.spaces[a - 1].basis for a in range(1, c.n + 1)]
    return Matrix.hstack(blocks, nrows=c.d, field=c.field)


def verify_decomposition(c: LinkedChain, W: WDecomp) -> Report:
    report = Report("decomposition")
    if len(W.spaces) != c.n:
        report.fail("shape", f"{len(W.spaces)} subspaces for n = {c.n}")
        return report
    for i in range(1, c.n + 1):
        want = W.ranks[i] - W.ranks[i - 1]
        if W.spaces[i - 1].dim != want:
            report.fail("rank", f"dim W_{i} = {W.spaces[i - 1].dim}, expected {want}")
    for i in range(1, c.n + 1):
        if intersect(W.spaces[i - 1], _kernel_span(c, i)).dim:
            report.fail("i", f"W_{i} meets the kernel span")
    report.passed("i")
    for j in range(1, c.n + 1):
        Wj = W.spaces[j - 1]
        for i in range(1, c.n + 1):
            if i != j and Wj.dim and rank(composite(c, j, i) @ Wj.basis) != Wj.dim:
                report.fail("ii", f"composite from level {j} to {i} is not injective on W_{j}")
    report.passed("ii")
    for i in range(1, c.n + 1):
        P = pushed_frame(c, W, i)
        if P.ncols != c.d or rank(P) != c.d:
            report.fail("iii", f"pushed W-blocks do not decompose E_{i}")
    report.passed("iii")
    return report


def structure_decomposition(c: LinkedChain) -> WDecomp:
    """Subspaces W_i complementing span(ker f_i, ker f^{i-1}); verified after construction."""
    if c.mode != "fiber":
        raise ValueError("structure_decomposition works at the special fiber; pass chain.fiber()")
    linked = check_s_linked(c)
    if not linked.ok:
        raise DecompositionFailed("chain is not s-linked: " + "; ".join(linked.failures))
    ranks = tuple(rank_profile(c))
    spaces = []
    for i in range(1, c.n + 1):
        Wi = Subspace.of_matrix(complement(_kernel_span(c, i)))
        spaces.append(Wi)
    W = WDecomp(ranks, tuple(spaces))
    report = verify_decomposition(c, W)
    if not report.ok:
        raise DecompositionFailed("; ".join(report.failures))
    return W


# -- instance generation ------------------------------------------------------------------


def standard_chain(profile, field: FieldDesc | None = None, mode: str = "family") -> LinkedChain:
    """Block model: f_i is 1 on blocks j <= i and s on blocks j > i; f^i the reverse."""
    field = field or FieldDesc()
    profile = [int(w) for w in profile]
    if not profile or any(w < 0 for w in profile) or sum(profile) < 1:
        raise BadProfile(f"bad profile {profile}")
    n, d = len(profile), sum(profile)
    block = [j for j, w in enumerate(profile, start=1) for _ in range(w)]
    one = Scalar.one(field)
    s = Scalar.s(field) if mode == "family" else Scalar.zero(field)
    f = [Matrix.diag([one if b <= i else s for b in block], field) for i in range(1, n)]
    fdual = [Matrix.diag([s if b <= i else one for b in block], field) for i in range(1, n)]
    return LinkedChain(field, d, f, fdual, mode)


def _check_unit(g: Matrix, mode: str):
    det = g.det()
    if det.is_zero():
        raise NotInvertible("conjugating matrix is singular")
    if mode == "family" and (det.valuation() != 0 or g.min_valuation() < 0):
        raise UnitDeterminantRequired("conjugating matrix must be invertible over the valuation ring")
    if mode == "fiber" and not g.is_constant():
        raise ValueError("fiber-mode conjugation needs constant matrices")


def conjugate(c: LinkedChain, gs) -> LinkedChain:
    """f'_i = g_{i+1} f_i g_i^{-1}, f'^i = g_i f^i g_{i+1}^{-1}."""
    gs = list(gs)
    if len(gs) != c.n:
        raise DimensionMismatch(f"{len(gs)} matrices for n = {c.n}")
    for g in gs:
        if g.shape != (c.d, c.d):
            raise DimensionMismatch("conjugating matrix has the wrong shape")
        _check_unit(g, c.mode)
    inv = [g.inverse() for g in gs]
    f = [gs[i + 1] @ c.f[i] @ inv[i] for i in range(c.n - 1)]
    fd = [gs[i] @ c.fdual[i] @ inv[i + 1] for i in range(c.n - 1)]
    return LinkedChain(c.field, c.d, f, fd, c.mode)


def random_gl(d: int, field: FieldDesc, rng: random.Random, perturb: bool = False) -> Matrix:
    """Random g in GL_d(k); with ``perturb`` add s times a random matrix (still a unit)."""
    while True:
        g = Matrix.from_values([[field.random_element(rng) for _ in range(d)] for _ in range(d)], field)
        if not g.det().is_zero():
            break
    if perturb:
        s = Scalar.s(field)
        h = Matrix.from_values([[field.random_element(rng) for _ in range(d)] for _ in range(d)], field)
        g = g + h.scale(s)
    return g


def induced_chain(c: LinkedChain, F) -> LinkedChain:
    """The rank-r chain on a linked subspace F, with maps written in the F_i bases."""
    bases = F.bases
    if len(bases) != c.n:
        raise DimensionMismatch(f"{len(bases)} subspaces for n = {c.n}")
    r = bases[0].ncols
    if r == 0:
        raise DimensionMismatch("induced chain of the zero subspace has rank 0")
    f, fd = [], []
    for i in range(1, c.n):
        X = solve_matrix(bases[i], c.fwd(i) @ bases[i - 1])
        Y = solve_matrix(bases[i - 1], c.bwd(i) @ bases[i])
        if X is None or Y is None:
            raise NotLinked(f"subspace is not preserved by the maps at level {i}")
        f.append(X)
        fd.append(Y)
    return LinkedChain(c.field, r, f, fd, c.mode)
