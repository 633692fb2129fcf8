#!/usr/bin/env python
from freqchoice import effects as me
from freqchoice.cli import common


def parse_args(args):
    parser = common.make_parser(
        "plot",
        "Write sample-average marginal effects as long-format bar-chart data",
    )
    parser.add_argument("--fit", "-f", required=True, help="Fit JSON from estimate")
    parser.add_argument("--data", "-d", required=True, help="CSV data file")
    parser.add_argument(
        "--covariate",
        "-c",
        action="append",
        help="Covariate to include; defaults to every covariate in the model",
    )
    parser.add_argument(
        "--out", "-o", required=True, help='CSV output path ("-" for stdout)'
    )
    return parser.parse_args(args)


def plot(parsed_args):
    common.setup_logging("plot", parsed_args)
    fit = common.read_fit(parsed_args.fit)
    dataset = common.read_dataset(parsed_args.data, fit.spec)
    covariates = parsed_args.covariate or fit.spec.columns()
    tables = [
        me.average_marginal_effects(fit, dataset, covariate) for covariate in covariates
    ]
    with common.output_stream(parsed_args.out) as stream:
        me.write_csv(me.long_frame(tables), stream)
    return tables


def main(args):
    parsed_args = parse_args(args)
    common.run_guarded(plot, parsed_args)
