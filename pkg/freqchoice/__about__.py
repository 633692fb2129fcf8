"""freqchoice package attributes and metadata."""

__all__ = (
    "__title__",
    "__summary__",
    "__author__",
    "__email__",
    "__license__",
    "__version__",
    "__copyright__",
    "__url__",
)

__title__ = "freqchoice"
__summary__ = "Maximum-likelihood toolkit for weekly frequency choice models"
__author__ = "freqchoice developers"
__email__ = "freqchoice@users.noreply.github.com"
__version__ = "0.3.0"
__license__ = "Apache License, Version 2.0"
__keywords__ = ["econometrics", "ordered extreme value", "ogev", "count data"]
__copyright__ = "Copyright freqchoice developers 2026"
__url__ = "https://github.com/freqchoice/freqchoice"
