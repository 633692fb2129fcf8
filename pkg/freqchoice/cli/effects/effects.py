#!/usr/bin/env python
import json

from freqchoice import effects as me
from freqchoice.cli import common

CSV = "csv"
JSON = "json"
AVERAGE_AND_DISCRETE = "Use only ONE of `--average` or `--discrete`"


def parse_args(args):
    parser = common.make_parser(
        "effects", "Marginal effects of covariates on category probabilities"
    )
    parser.add_argument("--fit", "-f", required=True, help="Fit JSON from estimate")
    parser.add_argument("--data", "-d", required=True, help="CSV data file")
    parser.add_argument(
        "--covariate",
        "-c",
        required=True,
        action="append",
        help="Covariate to differentiate by; may be repeated",
    )
    parser.add_argument(
        "--average",
        action="store_true",
        help="Average the effects over the sample (needs a converged fit)",
    )
    parser.add_argument(
        "--discrete",
        action="store_true",
        help="Sample-average change in probabilities between x=1 and x=0",
    )
    parser.add_argument("--format", choices=[CSV, JSON], default=CSV)
    parser.add_argument(
        "--out", "-o", required=True, help='Output path ("-" for stdout)'
    )
    parsed_args = parser.parse_args(args)
    if parsed_args.average and parsed_args.discrete:
        parser.error(AVERAGE_AND_DISCRETE)
    return parsed_args


def compute_tables(parsed_args):
    fit = common.read_fit(parsed_args.fit)
    dataset = common.read_dataset(parsed_args.data, fit.spec)
    rows = []
    tables = []
    for covariate in parsed_args.covariate:
        if parsed_args.average:
            tables.append(me.average_marginal_effects(fit, dataset, covariate))
        elif parsed_args.discrete:
            tables.append(me.discrete_change_effects(fit.params, dataset, covariate))
        else:
            matrix = me.effects_for_dataset(fit.params, dataset, covariate)
            for row, values in enumerate(matrix, start=1):
                tables.append(me.make_table(covariate, values, me.AT_OBSERVATION))
                rows.append(row)
    return tables, rows


def effects(parsed_args):
    common.setup_logging("effects", parsed_args)
    tables, rows = compute_tables(parsed_args)
    with common.output_stream(parsed_args.out) as stream:
        if parsed_args.format == JSON:
            documents = [table.to_dict() for table in tables]
            for document, row in zip(documents, rows):
                document["row"] = row
            json.dump(documents, stream, indent=2)
            stream.write("\n")
        else:
            frame = me.effects_frame(tables)
            if rows:
                frame.insert(0, "row", rows)
            me.write_csv(frame, stream)
    return tables


def main(args):
    parsed_args = parse_args(args)
    common.run_guarded(effects, parsed_args)
