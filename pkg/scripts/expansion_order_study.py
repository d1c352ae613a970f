"""Convergence of the corrected-Coulomb wing exponent in the Taylor order of the gauge phase.

    python scripts/expansion_order_study.py --n-modes 80 --orders 1 2 3
"""
import argparse
import warnings

from _common import run_config


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-modes", type=int, default=150)
    ap.add_argument("--orders", type=int, nargs="+", default=[1, 2, 3])
    args = ap.parse_args()
    warnings.simplefilter("ignore")
    print(f"{'order':>5s} {'dipole/corrected exponent':>26s}")
    for order in args.orders:
        res = run_config("gauge-compare-corrected.yaml",
                         [f"bath.n_modes={args.n_modes}", f"emission.expansion_order={order}",
                          "gauge_compare.gauges=[dipole, corrected-coulomb]"])
        print(f"{order:5d} {res.metrics['exponent_dipole_over_corrected-coulomb']:26.4f}")


if __name__ == "__main__":
    main()
