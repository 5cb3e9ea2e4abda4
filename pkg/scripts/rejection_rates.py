#!/usr/bin/env python3
"""Which W-profiles admit linked symplectic forms, and how often sampling is rejected.

For each profile the symplectic generator is run with the symmetry requirement
switched off; a profile counts as feasible when some draw passes every clause.
Symplectic codimension campaigns are then run on the feasible ones.
"""

import argparse
import itertools
import json
import sys

from linked_grass.chain import standard_chain
from linked_grass.errors import GenerationExhausted
from linked_grass.forms import is_symmetric_profile, standard_symplectic_form
from linked_grass.harness import CampaignConfig, run_campaign
from linked_grass.scalar import FieldDesc


def profiles(n, d):
    for cuts in itertools.combinations(range(d + n - 1), n - 1):
        # stars and bars
        bounds = (-1,) + cuts + (d + n - 1,)
        yield [bounds[k + 1] - bounds[k] - 1 for k in range(n)]


def feasible(profile, field, attempts, seed):
    c = standard_chain(profile, field)
    try:
        standard_symplectic_form(c, c.n + 1, seed, attempts, require_symmetric=False)
        return True
    except GenerationExhausted:
        return False


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-n", type=int, default=4)
    ap.add_argument("--max-d", type=int, default=6)
    ap.add_argument("--attempts", type=int, default=16)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--field", default="fp:10007")
    ap.add_argument("--json", help="write the table here")
    args = ap.parse_args(argv)
    field = FieldDesc.parse(args.field)

    rows = []
    for n in range(2, args.max_n + 1):
        for d in range(2, args.max_d + 1, 2):
            for prof in profiles(n, d):
                ok = feasible(prof, field, args.attempts, seed=0)
                rows.append({"n": n, "d": d, "profile": prof, "symmetric": is_symmetric_profile(prof, n + 1), "feasible": ok})
    print("feasible profiles (two_m = n + 1):")
    for row in rows:
        if row["feasible"]:
            print(f"  n={row['n']} d={row['d']} {row['profile']}  symmetric={row['symmetric']}")
    sym_d6 = [r for r in rows if r["d"] == 6 and r["symmetric"]]
    print(f"symmetric d=6 profiles: {len(sym_d6)}, feasible: {sum(r['feasible'] for r in sym_d6)}")

    print("\nsymplectic codimension on asymmetric feasible profiles:")
    for prof, r in (([2, 0, 4], 2), ([2, 0, 4], 3), ([4, 0, 2], 2), ([2, 0, 0, 0, 4], 2)):
        n, d = len(prof), sum(prof)
        cfg = CampaignConfig("symp_codim", n=n, d=d, r=r, profile=prof, field=field, trials=args.trials, require_symmetric=False)
        rep = run_campaign(cfg)
        agg = rep.to_json()["aggregate"]
        print(f"  {prof} r={r}: {agg['verdict']} pass {agg['passed']} skip {agg['skipped']} rejections {agg['rejections']}")
        rows.append({"campaign": prof, "r": r, **agg})

    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
