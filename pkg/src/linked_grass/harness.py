"""Randomized verification campaigns with deterministic, JSON-serializable reports."""

from __future__ import annotations

import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field as dc_field
from math import comb

from .chain import conjugate, field_to_json, random_gl, standard_chain, structure_decomposition
from .errors import GenerationExhausted, InvalidConfig, LinkedGrassError
from .forms import (
    check_alternating,
    check_compatibility,
    check_induced_relations,
    consistency_failures,
    exponent,
    exponent_column_first,
    extend_form,
    form_space_dimension,
    random_alternating,
    restrict_form,
    standard_symplectic_form,
)
from .grassmann import check_exact, push_and_saturate, sample_exact_isotropic, tangent_space, verify_point
from .linalg import Matrix
from .scalar import FieldDesc, random_poly

THEOREMS = ("formdim", "tangent_dim", "alt_codim", "symp_codim", "epsilon", "roundtrip")
REPORT_SCHEMA = "linked-grass/v1"


@dataclass
class CampaignConfig:
    theorem: str
    n: int = 3
    d: int = 4
    r: int = 2
    two_m: int | None = None  # defaults to n + 1
    profile: list[int] | None = None  # W-block sizes; drawn per trial when None
    field: FieldDesc = dc_field(default_factory=FieldDesc)
    trials: int = 10
    seed: int = 0
    out_path: str | None = None
    attempts: int = 64
    require_symmetric: bool = True
    conjugate: bool = True
    perturb: bool = False  # add s-multiples to the conjugating matrices

    def __post_init__(self):
        if self.two_m is None:
            self.two_m = self.n + 1
        if self.profile is not None:
            self.profile = [int(w) for w in self.profile]

    def validate(self):
        if self.theorem not in THEOREMS:
            raise InvalidConfig(f"theorem must be one of {THEOREMS}")
        if self.n < 1 or self.d < 1:
            raise InvalidConfig("n and d must be positive")
        if self.profile is not None:
            if len(self.profile) != self.n or any(w < 0 for w in self.profile) or sum(self.profile) != self.d:
                raise InvalidConfig(f"profile {self.profile} must have n = {self.n} nonnegative entries summing to d = {self.d}")
        if not 2 <= self.two_m <= 2 * self.n:
            raise InvalidConfig(f"two_m = {self.two_m} outside [2, {2 * self.n}]")
        if not 0 <= self.r <= self.d:
            raise InvalidConfig(f"r = {self.r} outside [0, d]")
        if self.trials < 1:
            raise InvalidConfig("trials must be at least 1")

    def to_json(self) -> dict:
        out = asdict(self)
        out["field"] = field_to_json(self.field)
        out.pop("out_path")
        return _stringify(out)


@dataclass
class CampaignReport:
    config: dict
    trials: list[dict]
    skips: int
    rejections: int
    wall_clock: float = 0.0

    @property
    def run(self) -> int:
        return len(self.trials) - self.skips

    @property
    def skip_rate(self) -> float:
        return self.skips / len(self.trials) if self.trials else 1.0

    @property
    def passed(self) -> bool:
        ran = [t for t in self.trials if t["status"] != "skip"]
        return bool(ran) and all(t["status"] == "pass" for t in ran) and 2 * self.skips <= len(self.trials)

    def to_json(self, with_clock: bool = True) -> dict:
        out = {
            "schema": REPORT_SCHEMA,
            "kind": "campaign",
            "config": self.config,
            "aggregate": {
                "verdict": "pass" if self.passed else "fail",
                "trials": str(len(self.trials)),
                "passed": str(sum(t["status"] == "pass" for t in self.trials)),
                "failed": str(sum(t["status"] == "fail" for t in self.trials)),
                "skipped": str(self.skips),
                "rejections": str(self.rejections),
            },
            "trials": self.trials,
        }
        if with_clock:
            out["wall_clock"] = f"{self.wall_clock:.3f}"
        return out


def _stringify(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, float)):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _stringify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_stringify(v) for v in obj]
    return str(obj)


def trial_rng(seed, index: int) -> random.Random:
    return random.Random(f"linked-grass:{seed}:{index}")


def random_profile(n: int, d: int, rng: random.Random, max_blocks: int | None = None) -> list[int]:
    k = min(n, d) if max_blocks is None else min(n, d, max_blocks)
    k = rng.randint(1, k)
    where = sorted(rng.sample(range(n), k))
    cuts = sorted(rng.sample(range(1, d), k - 1))
    sizes = [b - a for a, b in zip([0] + cuts, cuts + [d])]
    prof = [0] * n
    for w, size in zip(where, sizes):
        prof[w] = size
    return prof


def _chain(cfg: CampaignConfig, rng, profile=None, mode="family"):
    profile = profile or cfg.profile or random_profile(cfg.n, cfg.d, rng)
    c = standard_chain(profile, cfg.field, mode)
    if cfg.conjugate:
        c = conjugate(c, [random_gl(cfg.d, cfg.field, rng, perturb=cfg.perturb and mode == "family") for _ in range(cfg.n)])
    return c, profile


# -- trial bodies ------------------------------------------------------------------------
# each returns (status, detail dict, rejections)


def _formdim(cfg, rng):
    c, prof = _chain(cfg, rng)
    bil = form_space_dimension(c, cfg.two_m, "bilinear")
    alt = form_space_dimension(c, cfg.two_m, "alternating")
    ok = bil == cfg.d**2 and alt == comb(cfg.d, 2)
    return ok, {"profile": prof, "bilinear": bil, "alternating": alt}, 0


def _random_family_subspace(cfg, c, rng):
    vecs = [[random_poly(cfg.field, rng, cfg.n) for _ in range(cfg.d)] for _ in range(cfg.r)]
    return Matrix.from_columns(vecs, cfg.d, cfg.field) if vecs else Matrix([()] * cfg.d, cfg.field, 0)


def _tangent_dim(cfg, rng):
    c, prof = _chain(cfg, rng)
    F = push_and_saturate(c, _random_family_subspace(cfg, c, rng))
    if not check_exact(c, F).ok:
        return None, {"profile": prof, "reason": "flat limit not exact"}, 1
    dim = tangent_space(c, F).dim
    return dim == cfg.r * (cfg.d - cfg.r), {"profile": prof, "lg_tangent_dim": dim}, 0


def _alt_codim(cfg, rng):
    c, prof = _chain(cfg, rng)
    W = structure_decomposition(c.fiber())
    form = extend_form(c, W, random_alternating(cfg.d, cfg.field, rng), cfg.two_m)
    try:
        P, used = sample_exact_isotropic(c, form, cfg.r, rng.random(), cfg.attempts, require_symplectic=False)
    except GenerationExhausted as exc:
        return None, {"profile": prof, "reason": str(exc)}, exc.attempts
    rep = verify_point(c, form, P)
    ok = rep.equation_count == rep.form_target_dim == comb(cfg.r, 2) and rep.tangent_map_rank <= rep.form_target_dim
    return ok, {"profile": prof, **rep.to_json()}, used - 1


def _symp_codim(cfg, rng):
    prof = cfg.profile or random_profile(cfg.n, cfg.d, rng)
    c = standard_chain(prof, cfg.field)
    try:
        form = standard_symplectic_form(c, cfg.two_m, rng.random(), cfg.attempts, cfg.require_symmetric)
    except GenerationExhausted as exc:
        return None, {"profile": prof, "reason": str(exc)}, exc.attempts
    try:
        P, used = sample_exact_isotropic(c, form, cfg.r, rng.random(), cfg.attempts, require_symplectic=False)
    except GenerationExhausted as exc:
        return None, {"profile": prof, "reason": str(exc)}, exc.attempts
    rep = verify_point(c, form, P)
    ok = rep.verdict and rep.lg_tangent_dim == cfg.r * (cfg.d - cfg.r)
    return ok, {"profile": prof, **rep.to_json()}, used - 1


def _roundtrip(cfg, rng):
    c, prof = _chain(cfg, rng)
    W = structure_decomposition(c.fiber())
    A = random_alternating(cfg.d, cfg.field, rng)
    form = extend_form(c, W, A, cfg.two_m)
    back = restrict_form(form, W).gram == A
    checks = {
        "roundtrip": back,
        "compatibility": check_compatibility(form, c).ok,
        "alternating": check_alternating(form).ok,
        "induced_relations": check_induced_relations(form, c).ok,
    }
    return all(checks.values()), {"profile": prof, **checks}, 0


def _epsilon_cases(cfg):
    return [(n, t) for n in range(1, cfg.n + 1) for t in range(2, 2 * n + 1)]


def _epsilon(cfg, index):
    n, two_m = _epsilon_cases(cfg)[index]
    bad = consistency_failures(n, two_m)
    rng_ = range(1, n + 1)
    paths = sum(
        exponent(a, b, i, j, two_m) != exponent_column_first(a, b, i, j, two_m)
        for a in rng_ for b in rng_ for i in rng_ for j in rng_
    )
    return not bad and not paths, {"n": n, "two_m": two_m, "identity_failures": len(bad), "path_mismatches": paths}, 0


_BODIES = {
    "formdim": _formdim,
    "tangent_dim": _tangent_dim,
    "alt_codim": _alt_codim,
    "symp_codim": _symp_codim,
    "roundtrip": _roundtrip,
}


def run_trial(cfg: CampaignConfig, index: int) -> dict:
    if cfg.theorem == "epsilon":
        ok, detail, rej = _epsilon(cfg, index)
    else:
        try:
            ok, detail, rej = _BODIES[cfg.theorem](cfg, trial_rng(cfg.seed, index))
        except LinkedGrassError as exc:
            ok, detail, rej = False, {"error": f"{type(exc).__name__}: {exc}"}, 0
    status = "skip" if ok is None else ("pass" if ok else "fail")
    return {"index": str(index), "status": status, "rejections": str(rej), **_stringify(detail)}


def _run_indexed(args):
    cfg, index = args
    return run_trial(cfg, index)


def worker_count() -> int:
    env = os.environ.get("LINKED_GRASS_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InvalidConfig(f"LINKED_GRASS_THREADS={env!r} is not an integer") from None
    return os.cpu_count() or 1


def run_campaign(cfg: CampaignConfig, workers: int | None = None) -> CampaignReport:
    cfg.validate()
    start = time.perf_counter()
    count = len(_epsilon_cases(cfg)) if cfg.theorem == "epsilon" else cfg.trials
    workers = worker_count() if workers is None else workers
    jobs = [(cfg, i) for i in range(count)]
    if workers > 1 and count > 1:
        with ProcessPoolExecutor(max_workers=min(workers, count)) as pool:
            trials = list(pool.map(_run_indexed, jobs))
    else:
        trials = [_run_indexed(j) for j in jobs]
    report = CampaignReport(
        config=cfg.to_json(),
        trials=trials,
        skips=sum(t["status"] == "skip" for t in trials),
        rejections=sum(int(t["rejections"]) for t in trials),
        wall_clock=time.perf_counter() - start,
    )
    if cfg.out_path:
        from .io import save

        save(cfg.out_path, report.to_json())
    return report
