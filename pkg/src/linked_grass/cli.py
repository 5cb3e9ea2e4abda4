"""Command line: ``linked-grass validate|example|verify|gen``.

Exit codes: 0 everything passed, 1 a check or assertion failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from .chain import conjugate, random_gl, standard_chain, structure_decomposition
from .errors import LinkedGrassError, SchemaError
from .forms import check_symplectic, extend_form, random_alternating, standard_symplectic_form
from .grassmann import chart_survey, example_fixture, push_and_saturate, random_exact_isotropic, verify_point
from .harness import THEOREMS, CampaignConfig, run_campaign
from .io import SCHEMA, Bundle, bundle_to_json, dumps, load_bundle, save, validate
from .linalg import Matrix
from .scalar import FieldDesc, random_poly

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _profile(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"profile must be comma-separated integers, got {text!r}") from None


def _field(text: str) -> FieldDesc:
    try:
        return FieldDesc.parse(text)
    except (ValueError, LinkedGrassError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="linked-grass", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)

    v = sub.add_parser("validate", help="run every applicable checker on a bundle file")
    v.add_argument("--input", required=True)

    e = sub.add_parser("example", help="reproduce a worked example and compare with its expected reports")
    e.add_argument("--id", required=True, choices=["5.1", "5.2"])
    e.add_argument("--field", type=_field, default=FieldDesc())
    e.add_argument("--chart-points", type=int, default=20)
    e.add_argument("--out")

    r = sub.add_parser("verify", help="run a randomized verification campaign")
    r.add_argument("--theorem", required=True, choices=THEOREMS)
    r.add_argument("--n", type=int, default=3)
    r.add_argument("--d", type=int, default=4)
    r.add_argument("--r", type=int, default=2)
    r.add_argument("--two-m", type=int, default=None)
    r.add_argument("--profile", type=_profile, default=None)
    r.add_argument("--field", type=_field, default=FieldDesc())
    r.add_argument("--trials", type=int, default=10)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out")
    r.add_argument("--allow-asymmetric", action="store_true", help="do not require a symmetric profile (symp_codim)")

    g = sub.add_parser("gen", help="generate a chain, form or subspace bundle")
    g.add_argument("--kind", required=True, choices=["chain", "form", "subspace"])
    g.add_argument("--profile", type=_profile, required=True)
    g.add_argument("--field", type=_field, default=FieldDesc())
    g.add_argument("--two-m", type=int, default=None)
    g.add_argument("--r", type=int, default=2)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--symplectic", action="store_true", help="sample a linked symplectic form (two_m = n + 1)")
    g.add_argument("--conjugate", action="store_true", help="conjugate the block model by random invertible matrices")
    g.add_argument("--out")
    return ap


def _emit(obj, out):
    text = dumps(obj)
    if out:
        save(out, obj)
    sys.stdout.write(text)


def cmd_validate(args) -> int:
    bundle = load_bundle(args.input)
    ok, reports = validate(bundle)
    for rep in reports:
        want = bundle.expect.get(rep.check, True)
        tag = "ok" if rep.ok == want else "MISMATCH"
        print(f"[{tag}] {rep}")
    return EXIT_OK if ok else EXIT_FAIL


def example_report(id: str, field: FieldDesc, chart_points: int = 20) -> tuple[bool, dict]:
    fx = example_fixture(id, field)
    ok = True
    points = {}
    for name, P in fx.points.items():
        rep = verify_point(fx.chain, fx.form, P)
        want = fx.expected[name]
        got = {**rep.summary(), "verdict": rep.verdict}
        match = got == want
        ok &= match
        points[name] = {"report": rep.to_json(), "match": match}
    sym = check_symplectic(fx.form, fx.chain)
    out = {
        "schema": SCHEMA,
        "kind": "example",
        "id": id,
        "points": points,
        "symplectic": sym.to_json(),
    }
    if id == "5.1":
        survey = chart_survey(fx, chart_points, seed=0)
        survey.pop("samples")
        out["chart"] = {k: str(v) for k, v in survey.items()}
        ok &= survey["diagonal_zero"] == chart_points
    return ok, out


def cmd_example(args) -> int:
    ok, out = example_report(args.id, args.field, args.chart_points)
    _emit(out, args.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(args) -> int:
    cfg = CampaignConfig(
        theorem=args.theorem,
        n=args.n,
        d=args.d,
        r=args.r,
        two_m=args.two_m,
        profile=args.profile,
        field=args.field,
        trials=args.trials,
        seed=args.seed,
        out_path=args.out,
        require_symmetric=not args.allow_asymmetric,
    )
    rep = run_campaign(cfg)
    agg = rep.to_json()["aggregate"]
    print(json.dumps(agg, sort_keys=True))
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_gen(args) -> int:
    field, prof = args.field, args.profile
    n = len(prof)
    two_m = args.two_m or n + 1
    rng = random.Random(args.seed)
    c = standard_chain(prof, field)
    if args.conjugate:
        c = conjugate(c, [random_gl(c.d, field, rng) for _ in range(n)])
    form = sub = None
    if args.kind in ("form", "subspace"):
        if args.symplectic:
            form = standard_symplectic_form(c, two_m, args.seed)
        else:
            form = extend_form(c, structure_decomposition(c.fiber()), random_alternating(c.d, field, rng), two_m)
    if args.kind == "subspace":
        if form is not None and args.symplectic:
            sub = random_exact_isotropic(c, form, args.r, args.seed)
        else:
            cols = [[random_poly(field, rng, n) for _ in range(c.d)] for _ in range(args.r)]
            sub = push_and_saturate(c, Matrix.from_columns(cols, c.d, field))
            form = None
    expect = {}
    if form is not None and not check_symplectic(form, c).ok:
        expect["symplectic"] = False
    _emit(bundle_to_json(Bundle(field, c, form, sub, expect)), args.out)
    return EXIT_OK


COMMANDS = {"validate": cmd_validate, "example": cmd_example, "verify": cmd_verify, "gen": cmd_gen}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return COMMANDS[args.cmd](args)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except LinkedGrassError as exc:
        # bad shapes, impossible configs and exhausted generators are input problems
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
