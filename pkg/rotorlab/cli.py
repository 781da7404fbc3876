"""Command line: ``rotorlab run | sweep | plotdata | list-experiments``."""

import argparse
import logging
import sys

from rotorlab.config import load_config, parse_value
from rotorlab.errors import PartialSweepFailure, RotorlabError
from rotorlab.experiments import list_experiments
from rotorlab.harness import emit_plotdata, run_experiment, sweep

logger = logging.getLogger("rotorlab")


def build_parser():
    parser = argparse.ArgumentParser(prog="rotorlab", description="Kicked-rotor experiments")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="debug logging")
    commands = parser.add_subparsers(dest="command", required=True)

    def add_run_options(sub):
        sub.add_argument("config", help="TOML run config")
        sub.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                         help="override a parameter")
        sub.add_argument("--seed", type=int, default=None)
        sub.add_argument("--out", default=None, help="output directory")
        sub.add_argument("--progress", action="store_true", help="show progress bars")

    run = commands.add_parser("run", help="run one experiment")
    add_run_options(run)

    sw = commands.add_parser("sweep", help="run one experiment over a parameter axis")
    add_run_options(sw)
    sw.add_argument("--axis", required=True, help="parameter to vary")
    sw.add_argument("--values", required=True, help="comma-separated values")
    sw.add_argument("--workers", type=int, default=None, help="parallel children")

    plot = commands.add_parser("plotdata", help="emit plot data for a finished run")
    plot.add_argument("manifest", help="manifest.json or its run directory")
    plot.add_argument("--figure", required=True)
    plot.add_argument("--out", default=None)

    commands.add_parser("list-experiments", help="list experiment ids")
    return parser


def setup_logging(verbose):
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(level=level, format='%(asctime)s - %(levelname)s - %(message)s', stream=sys.stderr)


def parse_values(text):
    return [parse_value(item.strip()) for item in text.split(",") if item.strip()]


def dispatch(args):
    if args.command == "list-experiments":
        for name, summary in list_experiments():
            print(f"{name}\t{summary}")
        return 0

    if args.command == "plotdata":
        bundle = emit_plotdata(args.manifest, args.figure, args.out)
        print(bundle.description)
        return 0

    config = load_config(args.config, args.overrides, args.seed, args.out)
    if args.command == "run":
        manifest = run_experiment(config, progress=args.progress)
        print(manifest.path)
        return 0

    result = sweep(config, args.axis, parse_values(args.values), args.workers, args.progress)
    print(result.table_path)
    if not result.ok:
        raise PartialSweepFailure(f"{len(result.failures)} sweep children failed", failures=result.failures)
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose)
    try:
        return dispatch(args)
    except RotorlabError as exc:
        logger.error("%s", exc)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
