from freqchoice.cli.estimate.estimate import main  # noqa
