import unittest

from freqchoice import spec as specs
from freqchoice.errors import SpecError

from . import utils


class LoadSpecTests(unittest.TestCase):
    def test_parameter_counts(self):
        cases = [
            (utils.SPEC_OEV, 8),
            (utils.SPEC_SPLIT, 9),
            (utils.SPEC_POISSON, 4),
            (utils.SPEC_NB, 5),
        ]
        for document, k in cases:
            with self.subTest(family=document["family"]):
                spec = specs.load_spec(document)
                self.assertEqual(spec.n_params, k)
                self.assertEqual(spec.parameter_count(), k)

    def test_entry_forms(self):
        spec = specs.load_spec(
            {
                "family": "poisson_ogev",
                "index_covariates": [
                    "x",
                    {"column": "income", "transform": "natural_log"},
                    ["age", "identity"],
                ],
                "count_specific_terms": [
                    {"count": 0},
                    [6, "car"],
                    {"count": 2, "column": "income", "transform": "natural_log"},
                ],
            }
        )
        self.assertEqual(
            spec.index_covariates,
            (
                specs.CovariateTerm("x"),
                specs.CovariateTerm("income", specs.NATURAL_LOG),
                specs.CovariateTerm("age"),
            ),
        )
        self.assertTrue(spec.count_specific_terms[0].is_constant)
        self.assertEqual(spec.count_specific_terms[1].label, "6:car")
        self.assertEqual(spec.count_specific_terms[0].label, "0:const")
        self.assertEqual(spec.columns(), ["x", "income", "age", "car"])
        self.assertEqual(spec.transforms()["income"], specs.NATURAL_LOG)

    def test_round_trip_through_dict(self):
        for document in (
            utils.SPEC_OEV,
            utils.SPEC_SPLIT,
            utils.SPEC_POISSON,
            utils.SPEC_NB,
        ):
            spec = specs.load_spec(document)
            with self.subTest(family=spec.family):
                self.assertEqual(specs.load_spec(specs.spec_to_dict(spec)), spec)

    def test_shape(self):
        spec = specs.load_spec(utils.SPEC_SPLIT)
        self.assertEqual(spec.n_categories, 7)
        self.assertEqual(spec.n_thresholds, 5)
        self.assertEqual(specs.load_spec(utils.SPEC_OEV).n_thresholds, 6)
        self.assertEqual(specs.load_spec(utils.SPEC_NB).n_thresholds, 0)
        self.assertTrue(specs.load_spec(utils.SPEC_NB).has_r)
        self.assertFalse(specs.load_spec(utils.SPEC_POISSON).has_r)

    def test_custom_top_code(self):
        spec = specs.load_spec(dict(utils.SPEC_OEV, top_code=3))
        self.assertEqual((spec.n_categories, spec.n_params), (4, 5))


class InvalidSpecTests(unittest.TestCase):
    def check(self, document):
        with self.assertRaises(SpecError):
            specs.load_spec(document)

    def test_not_an_object(self):
        self.check(["oev_gamma"])

    def test_unknown_or_missing_fields(self):
        self.check(dict(utils.SPEC_OEV, weights="w"))
        self.check({"index_covariates": ["x"]})
        self.check({"family": "probit", "index_covariates": ["x"]})

    def test_top_code(self):
        for top_code in (0, -1, 2.5, True):
            with self.subTest(top_code=top_code):
                self.check(dict(utils.SPEC_OEV, top_code=top_code))
        self.check(dict(utils.SPEC_SPLIT, top_code=1))

    def test_empty_index(self):
        self.check({"family": "oev_gamma", "index_covariates": []})

    def test_blocks_outside_their_family(self):
        self.check(dict(utils.SPEC_OEV, split_covariates=["z"]))
        self.check(dict(utils.SPEC_POISSON, split_intercept=True))
        self.check(dict(utils.SPEC_OEV, rho_covariates=["z"]))
        self.check(dict(utils.SPEC_OEV, count_specific_terms=[{"count": 0}]))
        self.check(dict(utils.SPEC_OEV, index_intercept=True))

    def test_columns(self):
        self.check({"family": "oev_gamma", "index_covariates": ["x", "x"]})
        self.check({"family": "oev_gamma", "index_covariates": ["freq"]})
        self.check({"family": "oev_gamma", "index_covariates": [""]})
        self.check(
            {"family": "oev_gamma", "index_covariates": [["x", "square_root"]]}
        )
        self.check({"family": "oev_gamma", "index_covariates": [{"transform": "x"}]})
        self.check({"family": "oev_gamma", "index_covariates": [3]})

    def test_conflicting_transforms(self):
        self.check(
            dict(
                utils.SPEC_SPLIT,
                split_covariates=[{"column": "x", "transform": "natural_log"}],
            )
        )

    def test_count_terms(self):
        for terms in (
            [{"count": 7}],
            [{"count": -1}],
            [{"count": True}],
            [{"column": "x"}],
            [{"count": 1}, {"count": 1}],
            ["0"],
        ):
            with self.subTest(terms=terms):
                self.check(dict(utils.SPEC_POISSON, count_specific_terms=terms))

    def test_identification(self):
        every_level = [{"count": y} for y in range(7)]
        self.check(dict(utils.SPEC_NB, count_specific_terms=every_level))
        # One free positive level plus the index constant spans the shift.
        self.check(dict(utils.SPEC_NB, count_specific_terms=every_level[:-1]))
        spec = specs.load_spec(
            dict(
                utils.SPEC_NB,
                index_intercept=False,
                count_specific_terms=every_level[:-1],
            )
        )
        self.assertEqual(spec.n_omega, 6)
        document = dict(utils.SPEC_NB, count_specific_terms=every_level[1:])
        spec = specs.load_spec(document)
        self.assertEqual(spec.n_omega, 6)


class NullSpecTests(unittest.TestCase):
    def test_ordered(self):
        null = specs.null_spec(specs.load_spec(utils.SPEC_OEV))
        self.assertTrue(null.null_model)
        self.assertEqual(null.index_covariates, ())
        self.assertEqual(null.n_params, 7)

    def test_split_keeps_a_constant_share(self):
        null = specs.null_spec(specs.load_spec(utils.SPEC_SPLIT))
        self.assertEqual(null.split_covariates, ())
        self.assertTrue(null.split_intercept)
        self.assertEqual(null.n_params, 7)

    def test_count(self):
        spec = specs.load_spec(
            dict(
                utils.SPEC_POISSON,
                count_specific_terms=[
                    {"count": 0},
                    {"count": 3, "column": "x"},
                ],
                rho_covariates=["x"],
            )
        )
        null = specs.null_spec(spec)
        self.assertTrue(null.index_intercept)
        self.assertEqual(null.count_specific_terms, (specs.CountTerm(0, None),))
        self.assertEqual(null.rho_covariates, ())
        self.assertEqual(null.n_params, 3)
        self.assertEqual(null.columns(), [])

    def test_null_round_trip(self):
        null = specs.null_spec(specs.load_spec(utils.SPEC_NB))
        self.assertEqual(specs.load_spec(specs.spec_to_dict(null)), null)
