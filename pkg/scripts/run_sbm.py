"""Two-block SBM recovery via the tau-regularized spectral method.

Runs a signal instance (a > b) and a null instance (a = b) and reports
median misclassification plus the Davis-Kahan diagnostic.

    python scripts/run_sbm.py --n 2000 --a 30 --b 5
"""

import argparse

from graphconc.cli import run_command


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="runs/sbm")
    ap.add_argument("--seed", type=int, default=1729)
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--threads", type=int, default=4)
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--a", type=float, default=30.0)
    ap.add_argument("--b", type=float, default=5.0)
    args = ap.parse_args()

    mean = (args.a + args.b) / 2.0
    runs = [("signal", args.a, args.b), ("null", mean, mean)]
    for tag, a, b in runs:
        cfg = {"n": args.n, "a": a, "b": b}
        rep = run_command("sbm", cfg, args.seed, f"{args.out}/{tag}",
                          trials=args.trials, threads=args.threads)
        print(f"{tag} (a={a:g}, b={b:g}): "
              f"median misclassification {rep.summary['mis']['median']:.4f}, "
              f"gap-valid trials {rep.summary['gap_valid_trials']}, "
              f"DK holds: {rep.flags['dk_holds_every_gap_valid_trial']}")


if __name__ == "__main__":
    main()
