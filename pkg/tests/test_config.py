import os
import shutil
import tempfile
import unittest

from freqchoice import config
from freqchoice.errors import ConfigError


class ParseDocumentTests(unittest.TestCase):
    def test_json(self):
        self.assertEqual(
            config.parse_document('{"r": 1e8, "beta": [0.5]}'),
            {"r": 1e8, "beta": [0.5]},
        )

    def test_yaml(self):
        text = "family: oev_gamma\nindex_covariates:\n  - x\n  - y\n"
        self.assertEqual(
            config.parse_document(text),
            {"family": "oev_gamma", "index_covariates": ["x", "y"]},
        )

    def test_empty(self):
        with self.assertRaises(ConfigError):
            config.parse_document("  \n")

    def test_malformed(self):
        for text in ('{"family": ', "family: [oev"):
            with self.subTest(text=text):
                with self.assertRaises(ConfigError):
                    config.parse_document(text)


class LoadDocumentTests(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.directory)

    def test_file(self):
        path = os.path.join(self.directory, "spec.yaml")
        with open(path, "w") as stream:
            stream.write("family: nb_ogev\n")
        self.assertEqual(config.load_document(path), {"family": "nb_ogev"})

    def test_missing_file(self):
        with self.assertRaises(ConfigError):
            config.load_document(os.path.join(self.directory, "absent.json"))


class ThreadsTests(unittest.TestCase):
    def test_default(self):
        self.assertEqual(config.threads_from_environment({}), 1)
        self.assertEqual(config.threads_from_environment({config.ENV_THREADS: ""}), 1)

    def test_value(self):
        self.assertEqual(
            config.threads_from_environment({config.ENV_THREADS: "8"}), 8
        )

    def test_invalid(self):
        for value in ("many", "0", "-2"):
            with self.subTest(value=value):
                with self.assertRaises(ConfigError):
                    config.threads_from_environment({config.ENV_THREADS: value})


class EstimationOptionsTests(unittest.TestCase):
    def test_defaults(self):
        options = config.EstimationOptions(threads=1)
        self.assertEqual(options.max_iter, 500)
        self.assertEqual(options.gradient_tol, 1e-6)
        self.assertEqual(options.step_tol, 1e-10)
        self.assertTrue(options.compute_se)
        self.assertEqual(options.to_dict()["chunk_size"], 4096)

    def test_replace(self):
        options = config.EstimationOptions(threads=1)
        changed = options.replace(starts=4, seed=9)
        self.assertEqual((changed.starts, changed.seed), (4, 9))
        self.assertEqual(options.starts, 1)

    def test_invalid(self):
        for changes in (
            {"max_iter": 0},
            {"starts": 0},
            {"threads": 0},
            {"chunk_size": 0},
            {"seed": -1},
            {"seed": 2 ** 64},
        ):
            with self.subTest(changes=changes):
                with self.assertRaises(ConfigError):
                    config.EstimationOptions(**dict({"threads": 1}, **changes))
