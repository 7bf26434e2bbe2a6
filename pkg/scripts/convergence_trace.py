"""Per-iteration EI of one optimizer run at each noise level.

    python scripts/convergence_trace.py [drop_index] [out_dir]
"""

import sys

from ris_emf.harness import load_config, run_convergence


def main():
    drop = int(sys.argv[1]) if len(sys.argv) > 1 else 0
    out = sys.argv[2] if len(sys.argv) > 2 else "results/convergence"
    states = run_convergence(load_config(), out, drop_index=drop)
    for s2, st in states.items():
        eis = [t.ei_capped for t in st.trace]
        print(f"{s2:g} dBm: {len(eis) - 1} iterations ({st.stop_reason}), "
              f"EI {eis[0]:.4e} -> {eis[-1]:.4e}, min {min(eis):.4e}")


if __name__ == "__main__":
    main()
