"""JSON envelope for chains, forms and subspaces, and the ``validate`` driver."""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from pathlib import Path

from .chain import LinkedChain, check_s_linked, check_weakly_linked, field_from_json, field_to_json
from .diagnostics import Report
from .errors import LinkedGrassError, SchemaError
from .forms import LinkedForm, check_alternating, check_compatibility, check_induced_relations, check_symplectic
from .grassmann import LinkedSubspace, check_exact, check_isotropic, check_linked
from .scalar import FieldDesc

SCHEMA = "linked-grass/v1"


@dataclass
class Bundle:
    field: FieldDesc
    chain: LinkedChain | None = None
    form: LinkedForm | None = None
    subspace: LinkedSubspace | None = None
    expect: dict = dc_field(default_factory=dict)  # check name -> expected pass/fail


def envelope(field: FieldDesc, **payload) -> dict:
    out = {"schema": SCHEMA, "field": field_to_json(field)}
    out.update({k: v for k, v in payload.items() if v is not None})
    return out


def bundle_to_json(b: Bundle) -> dict:
    return envelope(
        b.field,
        chain=b.chain.to_json() if b.chain else None,
        form=b.form.to_json() if b.form else None,
        subspace=b.subspace.to_json() if b.subspace else None,
        expect=dict(b.expect) if b.expect else None,
    )


def bundle_from_json(obj) -> Bundle:
    if not isinstance(obj, dict):
        raise SchemaError("top level must be a JSON object")
    if obj.get("schema") != SCHEMA:
        raise SchemaError(f"schema must be {SCHEMA!r}, got {obj.get('schema')!r}")
    if "field" not in obj:
        raise SchemaError("missing 'field'")
    try:
        field = field_from_json(obj["field"])
        chain = LinkedChain.from_json(obj["chain"], field) if "chain" in obj else None
        form = LinkedForm.from_json(obj["form"], field) if "form" in obj else None
        sub = LinkedSubspace.from_json(obj["subspace"], field) if "subspace" in obj else None
    except LinkedGrassError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed bundle: {exc!r}") from exc
    if chain and form and (form.n, form.d) != (chain.n, chain.d):
        raise SchemaError("form and chain have different shapes")
    if chain and sub and (sub.n, sub.d) != (chain.n, chain.d):
        raise SchemaError("subspace and chain have different shapes")
    expect = obj.get("expect", {})
    if not isinstance(expect, dict) or not all(isinstance(v, bool) for v in expect.values()):
        raise SchemaError("'expect' maps check names to booleans")
    return Bundle(field, chain, form, sub, dict(expect))


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def save(path, obj):
    Path(path).write_text(dumps(obj))


def load_bundle(path) -> Bundle:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc.msg})") from exc
    return bundle_from_json(obj)


def run_checks(b: Bundle) -> list[Report]:
    """Every checker that applies to what the bundle contains."""
    reports = []
    if b.chain is not None:
        reports.append(check_weakly_linked(b.chain))
        reports.append(check_s_linked(b.chain))
    if b.form is not None:
        reports.append(check_alternating(b.form))
        if b.chain is not None:
            reports.append(check_compatibility(b.form, b.chain))
            reports.append(check_induced_relations(b.form, b.chain))
            reports.append(check_symplectic(b.form, b.chain))
    if b.subspace is not None and b.chain is not None:
        # a constant subspace is read as a point of the special fiber
        at_fiber = all(m.is_constant() for m in b.subspace.bases)
        linked = check_linked(b.chain.fiber() if at_fiber else b.chain, b.subspace)
        reports.append(linked)
        if linked.ok:
            reports.append(check_exact(b.chain, b.subspace))
        if b.form is not None:
            reports.append(check_isotropic(b.subspace, b.form.fiber() if at_fiber else b.form))
    return reports


def validate(b: Bundle) -> tuple[bool, list[Report]]:
    """True iff every check agrees with the bundle's expectation (default: pass)."""
    reports = run_checks(b)
    unknown = set(b.expect) - {r.check for r in reports}
    if unknown:
        raise SchemaError(f"expectations for checks that do not apply: {sorted(unknown)}")
    ok = all(r.ok == b.expect.get(r.check, True) for r in reports)
    return ok, reports


def fixture_bundle(id: str, field: FieldDesc | None = None) -> Bundle:
    """Bundle of a worked example: chain, form and its designated point."""
    from .grassmann import example_fixture

    fx = example_fixture(id, field)
    (point,) = fx.points.values()
    return Bundle(fx.chain.field, fx.chain, fx.form, point, {})


def data_path(name: str):
    from importlib.resources import files

    return files("linked_grass") / "data" / name


FIXTURE_FILES = {"5.1": "example_5_1.json", "5.2": "example_5_2.json"}
