"""Mean EI of the optimized phases versus RIS elements N and BS antennas M.

Runs only the optimizer strategy at a single noise level unless the
config says otherwise.

    python scripts/array_size_sweep.py [config.yaml] [out_dir]
"""

import sys

from ris_emf.harness import dump_config, load_config, run_elements


def main():
    path = sys.argv[1] if len(sys.argv) > 1 else None
    overrides = {} if path else {"strategies": ["optimized"], "sigma2_dbm": [-95.0], "drops": 50}
    config = load_config(path, **overrides)
    out = sys.argv[2] if len(sys.argv) > 2 else "results/elements"
    _, aggregates = run_elements(config, out)
    dump_config(config, f"{out}/elements_config.yaml")
    for s2 in config.sigma2_dbm:
        for strategy in config.strategies:
            print(f"{strategy} at {s2:g} dBm (rows M, columns N = {config.n_grid})")
            for m in config.m_grid:
                row = {a["n"]: a["ei_mean"] for a in aggregates
                       if a["m"] == m and a["strategy"] == strategy and a["sigma2_dbm"] == s2}
                print(f"  M={m:3d} " + " ".join(f"{row[n]:.4e}" for n in config.n_grid))


if __name__ == "__main__":
    main()
