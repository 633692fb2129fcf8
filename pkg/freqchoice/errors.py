EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NOT_CONVERGED = 3


class FreqChoiceError(Exception):
    """Base error. The rendered message is ``"<title> - <detail>"``.

    ``exit_code`` is what the command line exits with when the error reaches
    it unhandled.
    """

    title = "freqchoice error"
    exit_code = EXIT_DATA

    def __init__(self, message=None, row=None):
        self.detail = message
        self.row = row

        error_message = self.title
        if message:
            error_message = f"{error_message} - {message}"
        if row is not None:
            error_message = f"{error_message} (row {row:d})"

        super(FreqChoiceError, self).__init__(error_message)


class SchemaError(FreqChoiceError, ValueError):
    title = "Schema error"


class ParseError(FreqChoiceError, ValueError):
    title = "Parse error"


class DomainError(FreqChoiceError, ValueError):
    title = "Domain error"


class SpecError(FreqChoiceError, ValueError):
    title = "Spec error"


class DimensionError(FreqChoiceError, ValueError):
    title = "Dimension error"


class NumericInputError(FreqChoiceError, ValueError):
    title = "Numeric input error"


class CovariateLookupError(FreqChoiceError, LookupError):
    title = "Covariate not in model"


class EstimationError(FreqChoiceError):
    title = "Estimation error"


class StateError(FreqChoiceError):
    title = "State error"


class StatisticsError(FreqChoiceError, ZeroDivisionError):
    title = "Statistics error"


class ComparisonError(FreqChoiceError, ValueError):
    title = "Comparison error"


class ConfigError(FreqChoiceError, ValueError):
    title = "Config error"


class ConvergenceError(FreqChoiceError):
    title = "Not converged"
    exit_code = EXIT_NOT_CONVERGED
