"""Non-secular dipole/Coulomb generator gap versus dressed splitting, printed as a table.

    python scripts/gap_sweep.py --points 9
"""
import argparse

from _common import run_config


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=7)
    ap.add_argument("--no-evolve", action="store_true", help="skip trajectory comparison")
    args = ap.parse_args()
    over = [f"gap_sweep.n_points={args.points}"]
    if args.no_evolve:
        over.append("gap_sweep.evolve=false")
    res = run_config("gap-sweep.yaml", over)
    header, cols = res.tables["gap_sweep.csv"]
    print("  ".join(f"{h:>14s}" for h in header))
    for row in zip(*cols):
        print("  ".join(f"{v:14.6g}" for v in row))
    for c in res.checks:
        print(f"{c.name}: {c.measured:.4f} (tolerance {c.threshold})")


if __name__ == "__main__":
    main()
