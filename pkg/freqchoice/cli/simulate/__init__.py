from freqchoice.cli.simulate.simulate import main  # noqa
