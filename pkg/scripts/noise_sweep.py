"""EI and rate satisfaction versus noise power for every strategy.

    python scripts/noise_sweep.py [config.yaml] [out_dir]
"""

import sys

from ris_emf.harness import dump_config, load_config, run_sweep


def main():
    config = load_config(sys.argv[1] if len(sys.argv) > 1 else None)
    out = sys.argv[2] if len(sys.argv) > 2 else "results/noise"
    _, aggregates = run_sweep(config, out)
    dump_config(config, f"{out}/sweep_config.yaml")
    print("strategy      sigma2_dbm   ei_mean      rate_sat")
    for row in aggregates:
        print(f"{row['strategy']:12s} {row['sigma2_dbm']:10.1f}   {row['ei_mean']:.4e}   "
              f"{row['rate_satisfaction_mean']:.4f}")


if __name__ == "__main__":
    main()
