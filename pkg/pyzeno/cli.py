"""Command-line entry point: one subcommand per experiment"""

__author__ = "pyzeno developers"

import argparse
import logging
import sys

from pyzeno.config import EXPERIMENTS, default_config, load_config
from pyzeno.experiments import run_experiment, summarize, write_csv
from pyzeno.helpers import ConfigError, HorizonError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_HORIZON = 3

HELP = {"detuning-sweep": "Effective memory lifetime against detuning, numeric and analytic",
        "decay-trace": "Memory and control populations against time",
        "dephasing-sweep": "Effective memory lifetime against control dephasing time",
        "wstate": "Overlap of a gradient-wound collective mode with the W state",
        "dfs": "Leakage of dark and bright two-memory states",
        "dispersive": "Dispersive phase error next to the anti-Zeno lifetime"}


def build_parser():
    parser = argparse.ArgumentParser(
        prog = "pyzeno",
        description = "Anti-Zeno relaxation of a memory qubit coupled to a noisy control qubit"
    )
    parser.add_argument("-v", "--verbose", action = "store_true",
                        help = "Log integrator step sizes and fit details")

    sub = parser.add_subparsers(dest = "experiment", metavar = "experiment")
    sub.required = True

    for name in EXPERIMENTS:
        p = sub.add_parser(name, help = HELP[name], description = HELP[name])
        p.add_argument("--config", help = "JSON config file; defaults to the packaged config")
        p.add_argument("--output", help = "CSV path; overrides the config's output")
        p.add_argument("--quiet", action = "store_true",
                       help = "Suppress notices about defaults and the run summary")
        p.add_argument("--cache", action = "store_true",
                       help = "Reuse results from the user cache directory")

    return parser


def main(argv = None):
    """
    Run one experiment and write its CSV

    Returns
    ----------
    int : 0 on success, 2 on an invalid config, 3 when a trace never settles.
    """
    args = build_parser().parse_args(argv)

    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    else:
        level = logging.INFO
    logging.basicConfig(level = level, format = "%(levelname)s %(name)s: %(message)s")

    try:
        if args.config is None:
            if not args.quiet:
                print(f"Using the packaged default config for {args.experiment}")
            cfg = default_config(args.experiment)
        else:
            cfg = load_config(args.config)

        if cfg.experiment != args.experiment:
            raise ConfigError(f"The config describes '{cfg.experiment}', not '{args.experiment}'.")

        output = args.output or cfg.output or f"{args.experiment}.csv"

        frame = run_experiment(cfg, quiet = args.quiet, cache = args.cache)

        try:
            write_csv(frame, output)
        except OSError as e:
            raise ConfigError(f"Could not write {output}: {e}") from e

        if not args.quiet:
            print(f"Wrote {len(frame)} rows to {output}")
            for key, value in summarize(cfg, frame).items():
                print(f"{key}: {value:.6g}")

    except HorizonError as e:
        print(f"pyzeno: {e}", file = sys.stderr)
        return EXIT_HORIZON
    except (ConfigError, ZeroDivisionError) as e:
        # ZeroDivisionError covers DivergenceError and the zero-detuning limits
        print(f"pyzeno: {e}", file = sys.stderr)
        return EXIT_CONFIG

    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
