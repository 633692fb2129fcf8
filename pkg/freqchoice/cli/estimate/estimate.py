#!/usr/bin/env python
from freqchoice.cli import common
from freqchoice.config import EstimationOptions
from freqchoice.config import load_document
from freqchoice.errors import ConvergenceError
from freqchoice.estimate import default_init
from freqchoice.estimate import dump_fit
from freqchoice.estimate import fit
from freqchoice.params import ParamSet
from freqchoice.spec import load_spec

NOT_CONVERGED = "fit did not converge after {} iterations; results written to {}"


def parse_args(args):
    parser = common.make_parser(
        "estimate", "Fit a frequency-choice model by maximum likelihood"
    )
    parser.add_argument("--data", "-d", required=True, help="CSV data file")
    parser.add_argument("--spec", "-s", required=True, help="Model spec (JSON/YAML)")
    parser.add_argument(
        "--init",
        "-i",
        help="Initial parameters in constrained form; missing blocks use defaults",
    )
    parser.add_argument(
        "--null-ll",
        type=float,
        default=None,
        help="Null log-likelihood for rho-squared instead of fitting the null model",
    )
    parser.add_argument("--starts", type=int, default=1, help="Number of starts")
    parser.add_argument("--seed", type=int, default=0, help="Seed for start jitter")
    parser.add_argument(
        "--max-iter", type=int, default=500, help="Iteration cap per start"
    )
    parser.add_argument(
        "--no-se", action="store_true", help="Skip the Hessian and standard errors"
    )
    parser.add_argument(
        "--out", "-o", required=True, help='Fit JSON output path ("-" for stdout)'
    )
    return parser.parse_args(args)


def estimate(parsed_args):
    logger = common.setup_logging("estimate", parsed_args, seed=parsed_args.seed)
    spec = load_spec(load_document(parsed_args.spec))
    dataset = common.read_dataset(parsed_args.data, spec)
    init = None
    if parsed_args.init:
        init = ParamSet.from_dict(
            spec,
            load_document(parsed_args.init),
            defaults=default_init(dataset, spec),
        )
    options = EstimationOptions(
        max_iter=parsed_args.max_iter,
        starts=parsed_args.starts,
        seed=parsed_args.seed,
        compute_se=not parsed_args.no_se,
    )
    logger.info("estimating", family=spec.family, n=dataset.n)
    result = fit(dataset, spec, init=init, options=options, ll_null=parsed_args.null_ll)
    with common.output_stream(parsed_args.out) as stream:
        dump_fit(result, stream)
    if not result.converged:
        raise ConvergenceError(NOT_CONVERGED.format(result.iterations, parsed_args.out))
    return result


def main(args):
    parsed_args = parse_args(args)
    common.run_guarded(estimate, parsed_args)
