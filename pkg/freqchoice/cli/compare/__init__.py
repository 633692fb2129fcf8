from freqchoice.cli.compare.compare import main  # noqa
