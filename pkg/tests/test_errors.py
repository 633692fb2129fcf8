import unittest

from freqchoice import errors


class ErrorTests(unittest.TestCase):
    def test_message(self):
        error = errors.DomainError("freq 9 is outside 0..6", row=4)
        self.assertEqual(str(error), "Domain error - freq 9 is outside 0..6 (row 4)")
        self.assertEqual(error.detail, "freq 9 is outside 0..6")
        self.assertEqual(error.row, 4)

    def test_title_only(self):
        self.assertEqual(str(errors.StateError()), "State error")
        self.assertIsNone(errors.StateError().row)

    def test_exit_codes(self):
        self.assertEqual(errors.SchemaError.exit_code, errors.EXIT_DATA)
        self.assertEqual(errors.ConfigError.exit_code, errors.EXIT_DATA)
        self.assertEqual(errors.ConvergenceError.exit_code, errors.EXIT_NOT_CONVERGED)
        self.assertEqual(
            (errors.EXIT_OK, errors.EXIT_USAGE, errors.EXIT_DATA), (0, 1, 2)
        )

    def test_builtin_bases(self):
        self.assertIsInstance(errors.CovariateLookupError("x"), LookupError)
        self.assertIsInstance(errors.StatisticsError(), ZeroDivisionError)
        for error_class in (
            errors.SchemaError,
            errors.ParseError,
            errors.DomainError,
            errors.SpecError,
            errors.DimensionError,
            errors.NumericInputError,
            errors.ComparisonError,
            errors.ConfigError,
        ):
            with self.subTest(error=error_class.__name__):
                self.assertTrue(issubclass(error_class, ValueError))
                self.assertTrue(issubclass(error_class, errors.FreqChoiceError))
