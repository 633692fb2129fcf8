import unittest

import numpy as np

from freqchoice import model
from freqchoice.errors import CovariateLookupError
from freqchoice.errors import DimensionError
from freqchoice.errors import SchemaError
from freqchoice.params import ParamSet
from freqchoice.spec import CovariateTerm
from freqchoice.spec import load_spec

from . import utils

SPECS = {
    "oev_gamma": utils.SPEC_OEV,
    "split_oev_gamma": utils.SPEC_SPLIT,
    "poisson_ogev": dict(
        utils.SPEC_POISSON,
        count_specific_terms=[
            {"count": 0, "column": None},
            {"count": 4, "column": "z"},
        ],
        rho_covariates=["z"],
    ),
    "nb_ogev": dict(utils.SPEC_NB, rho_covariates=["x"]),
}


class PmfTests(unittest.TestCase):
    def test_every_family_normalizes(self):
        generator = np.random.default_rng(51)
        for family, document in SPECS.items():
            spec = load_spec(document)
            with self.subTest(family=family):
                for _ in range(1000):
                    params = utils.random_params(spec, generator)
                    columns = {
                        name: generator.normal(0.0, 2.0, 1)
                        for name in spec.columns()
                    }
                    probabilities = model.pmf(
                        params, model.build_design(spec, columns, 1)
                    )
                    self.assertTrue(np.all(probabilities >= 0))
                    self.assertLess(abs(probabilities.sum() - 1.0), 1e-12)

    def test_log_pmf_shape(self):
        spec = load_spec(utils.SPEC_SPLIT)
        params = utils.random_params(spec, np.random.default_rng(52))
        design = model.build_design(spec, {"x": np.zeros(4), "z": np.ones(4)}, 4)
        self.assertEqual(model.log_pmf(params, design).shape, (4, 7))

    def test_observed_log_pmf(self):
        spec = load_spec(utils.SPEC_OEV)
        params = utils.random_params(spec, np.random.default_rng(53))
        design = model.build_design(spec, {"x": [0.1, -0.4, 2.0]}, 3)
        table = model.log_pmf(params, design)
        observed = model.observed_log_pmf(params, design, [6, 0, 3])
        np.testing.assert_array_equal(
            observed, [table[0, 6], table[1, 0], table[2, 3]]
        )
        with self.assertRaises(DimensionError):
            model.observed_log_pmf(params, design, [1, 2])


class DesignTests(unittest.TestCase):
    def test_intercepts_and_constants(self):
        spec = load_spec(utils.SPEC_POISSON)
        design = model.build_design(spec, {"x": [1.5, 2.5]}, 2)
        np.testing.assert_array_equal(design.x, [[1.0, 1.5], [1.0, 2.5]])
        np.testing.assert_array_equal(design.b, [[1.0], [1.0]])
        np.testing.assert_array_equal(design.w, [[1.0], [1.0]])
        self.assertEqual(design.z.shape, (2, 0))
        self.assertEqual(design.n, 2)
        np.testing.assert_array_equal(design.take([1]).x, [[1.0, 2.5]])

    def test_missing_covariate(self):
        with self.assertRaises(SchemaError):
            model.build_design(load_spec(utils.SPEC_SPLIT), {"x": [0.0]}, 1)

    def test_dataset_design(self):
        spec = load_spec(utils.SPEC_SPLIT)
        dataset = utils.dataset_from_columns(
            spec, [0, 2], x=[0.5, 1.0], z=[3.0, 4.0]
        )
        design = model.dataset_design(spec, dataset)
        np.testing.assert_array_equal(design.x, [[0.5], [1.0]])
        np.testing.assert_array_equal(design.z, [[1.0, 3.0], [1.0, 4.0]])


class ComponentsTests(unittest.TestCase):
    def test_rho_without_terms_is_one_half(self):
        spec = utils.make_spec("poisson_ogev", index_covariates=(CovariateTerm("x"),))
        params = ParamSet.from_constrained(spec, beta=[0.3])
        parts = model.components(params, model.build_design(spec, {"x": [1.0]}, 1))
        np.testing.assert_array_equal(parts.rho, [0.5])
        np.testing.assert_array_equal(parts.eta, np.zeros((1, 7)))

    def test_count_specific_terms_fill_eta(self):
        spec = load_spec(SPECS["poisson_ogev"])
        params = ParamSet.from_constrained(
            spec, beta=[0.1, 0.2], omega=[0.7, -0.3], theta=[0.0, 0.0]
        )
        design = model.build_design(spec, {"x": [1.0], "z": [2.0]}, 1)
        parts = model.components(params, design)
        expected = np.zeros(7)
        expected[0] = 0.7
        expected[4] = -0.6
        np.testing.assert_allclose(parts.eta[0], expected, rtol=1e-15)
        self.assertAlmostEqual(parts.v[0], 0.3)


class ChannelsTests(unittest.TestCase):
    def test_every_channel(self):
        spec = load_spec(SPECS["poisson_ogev"])
        params = ParamSet.from_constrained(
            spec, beta=[0.1, 0.2], omega=[0.7, -0.3], theta=[0.4, 0.9]
        )
        links = model.channels(params, "z")
        self.assertEqual(links.index, 0.0)
        self.assertEqual(links.rho, 0.9)
        np.testing.assert_array_equal(links.omega, [-0.3])
        np.testing.assert_array_equal(links.levels, [4])
        self.assertEqual(model.channels(params, "x").index, 0.2)

    def test_split_channel(self):
        spec = load_spec(utils.SPEC_SPLIT)
        params = ParamSet.from_constrained(spec, beta=[0.5], gamma=[0.1, -0.8])
        links = model.channels(params, "z")
        self.assertEqual((links.index, links.split), (0.0, -0.8))

    def test_unknown(self):
        params = ParamSet.from_constrained(load_spec(utils.SPEC_OEV), beta=[0.5])
        with self.assertRaises(CovariateLookupError):
            model.channels(params, "income")
