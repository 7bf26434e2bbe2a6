"""Command-line entry point: ``ris-emf {sweep,elements,converge,gradcheck}``."""

import argparse
import logging
import sys

from ris_emf import checks
from ris_emf.harness import ConfigError, dump_config, load_config, run_convergence, run_elements, run_sweep


def _common(p):
    p.add_argument("--config", help="flat YAML key-value config file")
    p.add_argument("--out", default="results", help="output directory (default: results)")
    p.add_argument("--seed", type=int, dest="master_seed", help="master seed")
    p.add_argument("--drops", type=int, help="Monte Carlo drops")
    p.add_argument("--workers", type=int, help="worker processes")
    p.add_argument("--sigma2-dbm", dest="sigma2_dbm", help="comma-separated noise powers in dBm")


def build_parser():
    parser = argparse.ArgumentParser(prog="ris-emf", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="EI and rate satisfaction vs noise power for every strategy")
    _common(p)
    p.add_argument("--strategies", help="comma-separated, e.g. optimized,zero,random,noris,quantized:2")

    p = sub.add_parser("elements", help="EI vs RIS elements N for several BS antenna counts M")
    _common(p)
    p.add_argument("--n-grid", dest="n_grid", help="comma-separated N values")
    p.add_argument("--m-grid", dest="m_grid", help="comma-separated M values")

    p = sub.add_parser("converge", help="per-iteration EI traces for one drop")
    _common(p)
    p.add_argument("--drop", type=int, default=0, help="drop index to trace")

    p = sub.add_parser("gradcheck", help="finite-difference checks of gradient and Hessian")
    p.add_argument("--instances", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")

    if args.command == "gradcheck":
        worst, limits, passed = checks.run_all(count=args.instances, seed=args.seed)
        for key, lim in limits.items():
            print(f"{'PASS' if passed[key] else 'FAIL'} {key:12s} worst={worst[key]:.3e} limit={lim:.0e}")
        print(f"INFO printed-form Hessian worst relative error {worst['hessian_printed']:.3e} (not used)")
        return 0 if all(passed.values()) else 1

    overrides = {k: getattr(args, k, None) for k in
                 ("master_seed", "drops", "workers", "sigma2_dbm", "strategies", "n_grid", "m_grid")}
    try:
        config = load_config(args.config, **overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    if args.command == "converge":
        states = run_convergence(config, args.out, drop_index=args.drop)
        for s2, st in states.items():
            print(f"sigma2={s2:g} dBm: {st.iteration} iterations ({st.stop_reason}), "
                  f"EI {st.trace[0].ei_capped:.4e} -> {st.ei:.4e} W/kg")
        return 0

    run = run_sweep if args.command == "sweep" else run_elements
    _, aggregates = run(config, args.out)
    dump_config(config, f"{args.out}/{args.command}_config.yaml")
    for row in aggregates:
        print(f"{row['strategy']:12s} sigma2={row['sigma2_dbm']:7.2f} N={row['n']:4d} M={row['m']:3d} "
              f"EI={row['ei_mean']:.4e} rate_sat={row['rate_satisfaction_mean']:.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
