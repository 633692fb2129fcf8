from freqchoice import errors  # noqa
from freqchoice import log  # noqa
from freqchoice.__about__ import *  # noqa
