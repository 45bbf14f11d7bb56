"""Command-line front end: ``cfthp snr-sweep | csit-sweep | selftest | show-config``."""

import argparse
import logging
import sys

from . import __version__, selftest
from .config import ScenarioConfig, parse_bool
from .errors import CfThpError
from .sweep import run_csit_sweep, run_snr_sweep


def _common(p):
    p.add_argument("--config", help="scenario config file (defaults: the full 128-AP scenario)")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--out", help="output directory (overrides [output] output_dir)")
    p.add_argument("--workers", type=int, default=1, help="worker processes")
    p.add_argument("--square-beta-d", type=parse_bool, metavar="BOOL",
                   help="square beta in the decentralized noise term")
    p.add_argument("--tau-mode", choices=("paper", "consistent"))
    p.add_argument("--beta-mode", choices=("power", "unit", "paper"))
    p.add_argument("--sinr-form", choices=("exact", "paper"))
    p.add_argument("--n-outer", type=int, help="channel estimates per point")
    p.add_argument("--n-inner", type=int, help="error matrices per estimate")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cfthp", description="Cell-free MU-MIMO THP link-level simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("snr-sweep", help="ergodic sum-rate versus SNR"))
    _common(sub.add_parser("csit-sweep", help="ergodic sum-rate versus CSIT error"))
    _common(sub.add_parser("show-config", help="print the effective configuration"))
    st = sub.add_parser("selftest", help="run quick internal consistency checks")
    st.add_argument("--seed", type=int, default=0)
    return parser


def load_config(args):
    config = ScenarioConfig.load(args.config) if args.config else ScenarioConfig()
    overrides = {
        "seed": args.seed,
        "output_dir": args.out,
        "square_beta_d": args.square_beta_d,
        "tau_mode": args.tau_mode,
        "beta_mode": args.beta_mode,
        "sinr_form": args.sinr_form,
        "n_outer": args.n_outer,
        "n_inner": args.n_inner,
    }
    return config.replace(**{k: v for k, v in overrides.items() if v is not None})


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "selftest":
            return 1 if selftest.run(args.seed) else 0
        config = load_config(args)
        if args.command == "show-config":
            sys.stdout.write(config.to_text())
            return 0
        if args.workers < 1:
            raise CfThpError("--workers must be at least 1")
        run = run_snr_sweep if args.command == "snr-sweep" else run_csit_sweep
        result = run(config, workers=args.workers, output_dir=config.output_dir)
    except (CfThpError, OSError) as exc:
        print(f"cfthp: error: {exc}", file=sys.stderr)
        return 2
    for row in result.rows:
        print(f"{row.sweep_value:>8g}  {row.label:<8}  {row.esr:9.4f} +/- {row.esr_stderr:.4f}")
    print(f"results written to {config.output_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
