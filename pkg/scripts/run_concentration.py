"""Concentration sweep: median ||A - EA|| / sqrt(d) across (n, d) cells.

Reproduces the dense-regime concentration table and the sparse-regime
comparison between the raw adjacency and its trimmed version.

    python scripts/run_concentration.py --out runs/conc --seed 1729
"""

import argparse
import json

from graphconc.cli import run_command


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="runs/concentration")
    ap.add_argument("--seed", type=int, default=1729)
    ap.add_argument("--trials", type=int, default=5)
    ap.add_argument("--threads", type=int, default=4)
    args = ap.parse_args()

    dense = {"cells": [{"n": 1000, "d": 32.0}, {"n": 4000, "d": 64.0}],
             "scheme": "identity"}
    sparse = {"cells": [{"n": n, "d": 3.0} for n in (2000, 8000, 32000)]}

    for tag, cfg in [
        ("dense_identity", dense),
        ("sparse_identity", {**sparse, "scheme": "identity"}),
        ("sparse_trim", {**sparse, "scheme": "trim", "cap_mult": 2.0}),
    ]:
        rep = run_command("concentration", cfg, args.seed,
                          f"{args.out}/{tag}", trials=args.trials,
                          threads=args.threads)
        meds = {k: round(v["median"], 4) for k, v in rep.summary.items()}
        print(f"{tag}: {json.dumps(meds)}  [{rep.wall_clock_s:.1f}s]")


if __name__ == "__main__":
    main()
