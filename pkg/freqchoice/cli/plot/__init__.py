from freqchoice.cli.plot.plot import main  # noqa
