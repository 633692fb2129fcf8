from freqchoice.cli.effects.effects import main  # noqa
