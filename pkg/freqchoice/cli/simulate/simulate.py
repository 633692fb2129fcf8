#!/usr/bin/env python
from freqchoice.cli import common
from freqchoice.config import load_document
from freqchoice.data import dump_dataset
from freqchoice.simulate import SimulationConfig
from freqchoice.simulate import simulate as simulate_dataset


def parse_args(args):
    parser = common.make_parser(
        "simulate", "Draw a synthetic dataset from a model with known parameters"
    )
    parser.add_argument(
        "--config",
        "-c",
        required=True,
        help="Simulation config: spec, true_params, n, seed and covariates",
    )
    parser.add_argument(
        "--out", "-o", required=True, help='CSV output path ("-" for stdout)'
    )
    return parser.parse_args(args)


def simulate(parsed_args):
    common.setup_logging("simulate", parsed_args)
    config = SimulationConfig.from_dict(load_document(parsed_args.config))
    dataset = simulate_dataset(config)
    with common.output_stream(parsed_args.out) as stream:
        dump_dataset(dataset, stream)
    return dataset


def main(args):
    parsed_args = parse_args(args)
    common.run_guarded(simulate, parsed_args)
