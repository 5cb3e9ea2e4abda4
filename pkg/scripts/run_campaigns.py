#!/usr/bin/env python3
"""Run the standard verification campaigns and write one JSON report per campaign.

    python3 scripts/run_campaigns.py --out-dir reports --trials 100
"""

import argparse
import sys
import time
from pathlib import Path

from linked_grass.harness import CampaignConfig, run_campaign
from linked_grass.scalar import FieldDesc

# (name, config kwargs); trials and seed come from the command line
CAMPAIGNS = [
    ("symp_3_4_2", dict(theorem="symp_codim", n=3, d=4, r=2, profile=[2, 0, 2])),
    ("symp_3_6_2", dict(theorem="symp_codim", n=3, d=6, r=2, profile=[3, 0, 3])),
    ("symp_3_6_3", dict(theorem="symp_codim", n=3, d=6, r=3, profile=[3, 0, 3])),
    ("symp_5_6_2", dict(theorem="symp_codim", n=5, d=6, r=2, profile=[3, 0, 0, 0, 3])),
    ("tangent_5_6_3", dict(theorem="tangent_dim", n=5, d=6, r=3)),
    ("alt_3_5_2", dict(theorem="alt_codim", n=3, d=5, r=2)),
    ("formdim_4_5", dict(theorem="formdim", n=4, d=5)),
    ("roundtrip_3_4", dict(theorem="roundtrip", n=3, d=4)),
    ("epsilon_6", dict(theorem="epsilon", n=6, d=6)),
]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="reports")
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--field", default="fp:10007")
    ap.add_argument("--only", nargs="*", help="campaign names to run (default: all)")
    args = ap.parse_args(argv)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    field = FieldDesc.parse(args.field)
    failed = 0
    for name, kw in CAMPAIGNS:
        if args.only and name not in args.only:
            continue
        cfg = CampaignConfig(field=field, trials=args.trials, seed=args.seed, out_path=str(out / f"{name}.json"), **kw)
        t0 = time.perf_counter()
        rep = run_campaign(cfg)
        agg = rep.to_json()["aggregate"]
        failed += not rep.passed
        print(
            f"{name:16s} {agg['verdict']:4s}  pass {agg['passed']:>4s}  fail {agg['failed']:>4s}  "
            f"skip {agg['skipped']:>4s}  rejections {agg['rejections']:>5s}  {time.perf_counter() - t0:6.1f}s"
        )
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
