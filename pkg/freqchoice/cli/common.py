"""Helpers shared by the sub-commands: argument parsing, I/O, error exits."""
import argparse
import contextlib
import logging
import sys

from freqchoice import log
from freqchoice.data import load_dataset
from freqchoice.errors import EXIT_USAGE
from freqchoice.errors import ConfigError
from freqchoice.errors import FreqChoiceError
from freqchoice.estimate import load_fit

STDIO = "-"
ERROR_FORMAT = "Error: {}"


class ArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors exiting 1 instead of 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def make_parser(command, description):
    parser = ArgumentParser(prog=f"freqchoice {command}", description=description)
    parser.add_argument(
        "--log-level",
        type=str,
        default=None,
        help=(
            "Log level for the JSON log on stderr. Defaults to "
            "FREQCHOICE_LOG_LEVEL, or WARNING when unset"
        ),
    )
    return parser


def setup_logging(command, parsed_args, **context):
    level = log.level_from_environment()
    if parsed_args.log_level:
        level = logging.getLevelName(parsed_args.log_level.upper())
        if not isinstance(level, int):
            raise ConfigError(f'unknown log level "{parsed_args.log_level}"')
    log.setup_root_logger(level=level, stream=sys.stderr)
    log.bind_run_context(command=command, **context)
    logger = log.get_logger(f"freqchoice.cli.{command}")
    logger.debug("command started")
    return logger


@contextlib.contextmanager
def output_stream(path):
    if path == STDIO:
        yield sys.stdout
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as stream:
            yield stream
    except OSError as exc:
        raise ConfigError(str(exc))


def read_dataset(path, spec):
    try:
        with open(path, "rb") as stream:
            return load_dataset(stream, spec)
    except OSError as exc:
        raise ConfigError(str(exc))


def read_fit(path):
    try:
        with open(path, "r", encoding="utf-8") as stream:
            return load_fit(stream)
    except OSError as exc:
        raise ConfigError(str(exc))


def fail(exc):
    """Print a library error and exit with its code."""
    print(ERROR_FORMAT.format(exc), file=sys.stderr)
    sys.exit(exc.exit_code)


def run_guarded(function, *args):
    try:
        return function(*args)
    except FreqChoiceError as exc:
        fail(exc)
