import math
import os

import numpy as np
from scipy import special

from freqchoice.data import build_dataset
from freqchoice.params import ParamSet
from freqchoice.simulate import SimulationConfig
from freqchoice.simulate import simulate
from freqchoice.spec import ModelSpec
from freqchoice.spec import spec_from_dict
from freqchoice.spec import validate_spec

SLOW = os.environ.get("FREQCHOICE_SLOW_TESTS") == "1"
SLOW_REASON = "set FREQCHOICE_SLOW_TESTS=1 to run Monte Carlo studies"

# Heterogeneity magnitudes of the published ordered and split fits.
ALPHA_OEV = 2.195
ALPHA_SPLIT = 1.578

THRESHOLDS_6 = [-1.0, -0.3, 0.2, 0.6, 1.0, 1.5]
THRESHOLDS_5 = [-0.5, 0.1, 0.5, 1.0, 1.6]

POISSON_PMF_ZERO = 1.0 / sum(1.0 / math.factorial(y) for y in range(7))

SPEC_OEV = {"family": "oev_gamma", "index_covariates": ["x"]}
SPEC_SPLIT = {
    "family": "split_oev_gamma",
    "index_covariates": ["x"],
    "split_covariates": ["z"],
    "split_intercept": True,
}
SPEC_POISSON = {
    "family": "poisson_ogev",
    "index_covariates": ["x"],
    "index_intercept": True,
    "count_specific_terms": [{"count": 0, "column": None}],
    "rho_intercept": True,
}
SPEC_NB = dict(SPEC_POISSON, family="nb_ogev")


def make_spec(family, **fields):
    return validate_spec(ModelSpec(family=family, **fields))


def quadrature_survival(v, alpha, thresholds, nodes=120):
    """S(k) by Gauss-Laguerre quadrature of the Gamma-mixed OEV survival.

    With u ~ Gamma(shape alpha, rate alpha) and x = alpha * u the mixture
    integral is E[exp(-x * D * exp(-v) / alpha)] under the weight
    x**(alpha - 1) * exp(-x).
    """
    x, w = special.roots_genlaguerre(nodes, alpha - 1.0)
    scale = np.exp(np.asarray(thresholds, dtype=float) - v) / alpha
    return np.array([np.sum(w * np.exp(-x * c)) / np.sum(w) for c in scale])


def quadrature_pmf(v, alpha, thresholds):
    survival = np.concatenate([[1.0], quadrature_survival(v, alpha, thresholds), [0.0]])
    return survival[:-1] - survival[1:]


def dataset_from_columns(spec, freq, **columns):
    names = list(columns)
    raw = np.column_stack([np.asarray(columns[name], dtype=float) for name in names])
    return build_dataset(freq, raw, names, spec)


def random_params(spec, generator):
    """Moderate random parameters for property tests."""
    thresholds = None
    if spec.n_thresholds:
        steps = generator.uniform(0.2, 1.0, spec.n_thresholds - 1)
        first = generator.uniform(-1.5, 0.0)
        thresholds = np.cumsum(np.concatenate([[first], steps]))
    return ParamSet.from_constrained(
        spec,
        beta=generator.uniform(-0.8, 0.8, spec.n_beta),
        thresholds=thresholds,
        sigma2=generator.uniform(0.5, 4.0),
        r=generator.uniform(0.5, 5.0),
        gamma=generator.uniform(-1.0, 1.0, spec.n_gamma),
        omega=generator.uniform(-1.0, 1.0, spec.n_omega),
        theta=generator.uniform(-1.0, 1.5, spec.n_theta),
    )


def simulated(spec, true_params, n, seed, covariates=None):
    """Dataset drawn from ``spec`` with standard-normal covariates by default."""
    if covariates is None:
        columns = validate_spec(spec_from_dict(spec)).columns()
        covariates = {
            column: {"distribution": "normal", "mean": 0.0, "sd": 1.0}
            for column in columns
        }
    config = SimulationConfig.from_dict(
        {
            "spec": spec,
            "true_params": true_params,
            "n": n,
            "seed": seed,
            "covariates": covariates,
        }
    )
    return simulate(config)
