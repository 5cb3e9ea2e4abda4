import json
from pathlib import Path

import pytest

from linked_grass.cli import example_report, main
from linked_grass.errors import InvalidConfig, SchemaError
from linked_grass.harness import CampaignConfig, random_profile, run_campaign, trial_rng, worker_count
from linked_grass.io import (
    FIXTURE_FILES,
    bundle_from_json,
    bundle_to_json,
    data_path,
    dumps,
    fixture_bundle,
    load_bundle,
    validate,
)
from linked_grass.scalar import FieldDesc

HERE = Path(__file__).parent
FP = FieldDesc.fp(10007)


# -- io ---------------------------------------------------------------------------------------


@pytest.mark.parametrize("id", ["5.1", "5.2"])
def test_bundle_roundtrip(id):
    b = fixture_bundle(id, FP)
    again = bundle_from_json(json.loads(dumps(bundle_to_json(b))))
    assert again.chain == b.chain and again.form == b.form and again.subspace == b.subspace


@pytest.mark.parametrize("id", sorted(FIXTURE_FILES))
def test_bundled_fixture_files_validate(id):
    ok, reports = validate(load_bundle(data_path(FIXTURE_FILES[id])))
    assert ok, "\n".join(str(r) for r in reports)


def test_bundled_files_match_fixtures():
    for id, name in FIXTURE_FILES.items():
        b = load_bundle(data_path(name))
        ref = fixture_bundle(id, b.field)
        assert b.chain == ref.chain and b.form == ref.form


@pytest.mark.parametrize(
    "obj",
    [
        [],
        {"schema": "other/v0", "field": "fp:7"},
        {"schema": "linked-grass/v1"},
        {"schema": "linked-grass/v1", "field": "fp:7", "chain": {"d": 2}},
        {"schema": "linked-grass/v1", "field": "fp:7", "expect": {"symplectic": "yes"}},
    ],
)
def test_bad_bundles(obj):
    with pytest.raises(SchemaError):
        bundle_from_json(obj)


def test_shape_mismatch_rejected():
    obj = bundle_to_json(fixture_bundle("5.1", FP))
    obj["form"] = bundle_to_json(fixture_bundle("5.2", FP))["form"]
    with pytest.raises(SchemaError):
        bundle_from_json(obj)


# -- campaigns --------------------------------------------------------------------------------


def test_config_validation():
    with pytest.raises(InvalidConfig):
        CampaignConfig("nope").validate()
    with pytest.raises(InvalidConfig):
        CampaignConfig("formdim", n=2, d=3, profile=[1, 1]).validate()
    with pytest.raises(InvalidConfig):
        CampaignConfig("formdim", n=2, two_m=7).validate()
    with pytest.raises(InvalidConfig):
        CampaignConfig("formdim", trials=0).validate()
    assert CampaignConfig("formdim", n=4).two_m == 5


def test_random_profile_shape():
    rng = trial_rng(0, 0)
    for _ in range(50):
        p = random_profile(5, 6, rng, max_blocks=3)
        assert len(p) == 5 and sum(p) == 6 and sum(w > 0 for w in p) <= 3


def test_formdim_single_level():
    rep = run_campaign(CampaignConfig("formdim", n=1, d=4, trials=3), workers=1)
    assert rep.passed and all(t["alternating"] == "6" for t in rep.trials)


def test_epsilon_campaign():
    rep = run_campaign(CampaignConfig("epsilon", n=6, d=6), workers=1)
    assert rep.passed and len(rep.trials) == sum(2 * n - 1 for n in range(1, 7))


def test_symp_codim_small():
    cfg = CampaignConfig("symp_codim", n=3, d=4, r=2, profile=[2, 0, 2], field=FP, trials=5, seed=1)
    rep = run_campaign(cfg, workers=1)
    assert rep.passed and all(t["tangent_map_rank"] == "1" for t in rep.trials)


def test_skips_fail_the_aggregate():
    cfg = CampaignConfig("symp_codim", n=3, d=6, r=2, profile=[3, 0, 3], trials=2, attempts=4)
    rep = run_campaign(cfg, workers=1)
    assert rep.skips == 2 and not rep.passed
    assert rep.to_json()["aggregate"]["verdict"] == "fail"


def test_campaign_determinism_across_workers():
    cfg = CampaignConfig("roundtrip", n=3, d=4, trials=4, seed=42)
    a = run_campaign(cfg, workers=1).to_json(with_clock=False)
    b = run_campaign(cfg, workers=2).to_json(with_clock=False)
    assert dumps(a) == dumps(b)


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("LINKED_GRASS_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("LINKED_GRASS_THREADS", "many")
    with pytest.raises(InvalidConfig):
        worker_count()


# -- cli --------------------------------------------------------------------------------------


@pytest.mark.parametrize("id", ["5.1", "5.2"])
def test_example_golden(id):
    ok, out = example_report(id, FP)
    golden = json.loads((HERE / "golden" / f"example_{id.replace('.', '_')}.json").read_text())
    assert ok and out == golden


def test_cli_example_51(capsys):
    assert main(["example", "--id", "5.1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["points"]["origin"]["report"]["lag_tangent_dim"] == "3"


def test_cli_validate_bad_chain(capsys):
    assert main(["validate", "--input", str(HERE / "data" / "bad_chain.json")]) == 1
    text = capsys.readouterr().out
    assert "I: f_1 f^1 != s*id" in text


def test_cli_validate_fixture():
    assert main(["validate", "--input", str(data_path("example_5_1.json"))]) == 0


def test_cli_input_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["validate", "--input", str(bad)]) == 2
    assert main(["validate", "--input", str(tmp_path / "missing.json")]) == 2
    assert main(["verify", "--theorem", "formdim", "--n", "2", "--d", "3", "--profile", "1,1"]) == 2
    assert main(["frobnicate"]) == 2
    capsys.readouterr()


def test_cli_verify_is_byte_deterministic(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("LINKED_GRASS_THREADS", "1")
    outs = []
    for k in range(2):
        path = tmp_path / f"r{k}.json"
        args = ["verify", "--theorem", "symp_codim", "--n", "3", "--d", "4", "--r", "2", "--profile", "2,0,2"]
        args += ["--trials", "5", "--seed", "42", "--out", str(path)]
        assert main(args) == 0
        obj = json.loads(path.read_text())
        obj.pop("wall_clock")
        outs.append(dumps(obj))
    assert outs[0] == outs[1]
    capsys.readouterr()


@pytest.mark.parametrize(
    "args",
    [
        ["--kind", "chain", "--profile", "1,2,1", "--conjugate"],
        ["--kind", "form", "--profile", "2,0,2", "--symplectic"],
        ["--kind", "form", "--profile", "1,1,1", "--two-m", "3"],
        ["--kind", "subspace", "--profile", "2,0,2", "--symplectic", "--r", "2"],
        ["--kind", "subspace", "--profile", "1,2", "--r", "2", "--conjugate"],
    ],
)
def test_cli_gen_then_validate(tmp_path, capsys, args):
    path = tmp_path / "g.json"
    assert main(["gen", *args, "--seed", "3", "--out", str(path)]) == 0
    assert main(["validate", "--input", str(path)]) == 0
    capsys.readouterr()
