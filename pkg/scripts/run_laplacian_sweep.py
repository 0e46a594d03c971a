"""Tau-regularized Laplacian concentration: sqrt(d) ||L(A_tau) - L(EA_tau)||.

Sweeps n and tau at fixed expected degree and prints the median curve;
curve.csv under the output directory holds the quartiles.

    python scripts/run_laplacian_sweep.py --taus 1 5 25
"""

import argparse

from graphconc.cli import run_command


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="runs/laplacian")
    ap.add_argument("--seed", type=int, default=1729)
    ap.add_argument("--trials", type=int, default=5)
    ap.add_argument("--threads", type=int, default=4)
    ap.add_argument("--d", type=float, default=5.0)
    ap.add_argument("--ns", type=int, nargs="+", default=[1000, 4000])
    ap.add_argument("--taus", type=float, nargs="+", default=[5.0])
    args = ap.parse_args()

    cfg = {"ns": args.ns, "d": args.d, "taus": args.taus}
    rep = run_command("laplacian", cfg, args.seed, args.out,
                      trials=args.trials, threads=args.threads)
    for key, s in sorted(rep.summary.items()):
        print(f"{key}: median {s['median']:.4f} "
              f"(q1 {s['q1']:.4f}, q3 {s['q3']:.4f})")
    print(f"flags: {rep.flags}  [{rep.wall_clock_s:.1f}s]")


if __name__ == "__main__":
    main()
