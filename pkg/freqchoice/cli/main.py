import importlib
import sys

from freqchoice.errors import EXIT_OK
from freqchoice.errors import EXIT_USAGE

commands = ["estimate", "simulate", "effects", "compare", "plot"]


def print_help():
    print(f'Available sub-commands: {", ".join(commands)}.')
    print('Use "freqchoice <sub-command> --help" for usage.')


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv:
        print_help()
        sys.exit(EXIT_OK)

    if argv[0] in commands:
        module = importlib.import_module(f"freqchoice.cli.{argv[0]}.{argv[0]}")
        module.main(argv[1:])
        sys.exit(EXIT_OK)

    if argv[0] in ["--help", "-h"]:
        print_help()
        sys.exit(EXIT_OK)
    print(f'"{argv[0]}" is not an available freqchoice sub-command.')
    print_help()
    sys.exit(EXIT_USAGE)
