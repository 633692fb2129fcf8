#!/usr/bin/env python
import os

from freqchoice.cli import common
from freqchoice.compare import run_compare


def parse_args(args):
    parser = common.make_parser(
        "compare", "Rank fitted models by AIC, BIC and rho-squared"
    )
    parser.add_argument("fits", nargs="+", help="Fit JSON files from estimate")
    parser.add_argument(
        "--out", "-o", required=True, help='CSV output path ("-" for stdout)'
    )
    return parser.parse_args(args)


def compare(parsed_args):
    common.setup_logging("compare", parsed_args)
    fits = [common.read_fit(path) for path in parsed_args.fits]
    labels = [os.path.basename(path) for path in parsed_args.fits]
    table = run_compare(fits, labels=labels)
    with common.output_stream(parsed_args.out) as stream:
        table.write_csv(stream)
    return table


def main(args):
    parsed_args = parse_args(args)
    common.run_guarded(compare, parsed_args)
