"""Wing exponent of dipole/corrected-Coulomb spectra for bare vs gauge-mapped preparation.

    python scripts/initial_state_study.py --n-modes 80
"""
import argparse
import warnings

from _common import run_config


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-modes", type=int, default=150)
    args = ap.parse_args()
    warnings.simplefilter("ignore")
    print(f"{'initial state':15s} {'dipole/naive':>13s} {'dipole/corrected':>17s}")
    for state in ("bare", "gauge-mapped"):
        res = run_config("gauge-compare-corrected.yaml",
                         [f"bath.n_modes={args.n_modes}", f"emission.initial_state={state}"])
        m = res.metrics
        print(f"{state:15s} {m['exponent_dipole_over_naive-coulomb']:13.4f} "
              f"{m['exponent_dipole_over_corrected-coulomb']:17.4f}")


if __name__ == "__main__":
    main()
