"""Synthetic datasets drawn from a known model.

Each row ``i`` gets its own Philox4x64-10 generator keyed by
``seed + i * 2**64``. A row draws its generated columns in declared order
(constant columns draw nothing), then one uniform for the inverse-CDF
frequency draw, so rows never share a stream and the result does not
depend on evaluation order.
"""
import dataclasses
import math
import typing

import numpy as np

from freqchoice import model
from freqchoice.config import parse_document
from freqchoice.data import build_dataset
from freqchoice.errors import ConfigError
from freqchoice.errors import FreqChoiceError
from freqchoice.log import get_logger
from freqchoice.log import logme
from freqchoice.params import ParamSet
from freqchoice.spec import load_spec

NORMAL = "normal"
BERNOULLI = "bernoulli"
LOGNORMAL = "lognormal"
CONSTANT = "constant"

_PARAMETERS = {
    NORMAL: ("mean", "sd"),
    BERNOULLI: ("p",),
    LOGNORMAL: ("mu", "sigma"),
    CONSTANT: ("c",),
}

logger = get_logger(__name__)


class CovariateGenerator(typing.NamedTuple):
    distribution: str
    parameters: typing.Tuple[float, ...]

    def draw(self, generator):
        if self.distribution == NORMAL:
            return generator.normal(*self.parameters)
        if self.distribution == BERNOULLI:
            return float(generator.random() < self.parameters[0])
        if self.distribution == LOGNORMAL:
            return generator.lognormal(*self.parameters)
        return self.parameters[0]


def make_generator(column, document):
    if not isinstance(document, dict) or "distribution" not in document:
        raise ConfigError(f'generator for "{column}" needs a "distribution"')
    distribution = document["distribution"]
    if distribution not in _PARAMETERS:
        raise ConfigError(f'unknown distribution "{distribution}" for "{column}"')
    try:
        values = tuple(float(document[name]) for name in _PARAMETERS[distribution])
    except KeyError as exc:
        raise ConfigError(f'generator for "{column}" is missing {exc}')
    except (TypeError, ValueError):
        raise ConfigError(f'generator for "{column}" has a non-numeric parameter')
    if not all(math.isfinite(value) for value in values):
        raise ConfigError(f'generator for "{column}" has a non-finite parameter')
    if distribution == NORMAL and values[1] <= 0:
        raise ConfigError(f'normal sd for "{column}" must be positive')
    if distribution == LOGNORMAL and values[1] <= 0:
        raise ConfigError(f'lognormal sigma for "{column}" must be positive')
    if distribution == BERNOULLI and not 0 <= values[0] <= 1:
        raise ConfigError(f'bernoulli p for "{column}" must lie in [0, 1]')
    return CovariateGenerator(distribution, values)


def row_generator(seed, row):
    return np.random.Generator(np.random.Philox(key=seed + row * 2 ** 64))


@dataclasses.dataclass(frozen=True)
class SimulationConfig:
    spec: object
    true_params: ParamSet
    n: int
    seed: int
    covariate_generators: typing.Tuple[typing.Tuple[str, CovariateGenerator], ...]

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 0:
            raise ConfigError(f"n must be a non-negative integer, got {self.n!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        declared = [column for column, _ in self.covariate_generators]
        missing = [c for c in self.spec.columns() if c not in declared]
        if missing:
            raise ConfigError(f'no generator for {", ".join(missing)}')

    @property
    def column_names(self):
        return tuple(column for column, _ in self.covariate_generators)

    @classmethod
    def from_dict(cls, document):
        """Read spec, true_params (constrained form), n, seed and covariates."""
        if not isinstance(document, dict):
            raise ConfigError("simulation config must be a mapping")
        for key in ("spec", "true_params", "n", "covariates"):
            if key not in document:
                raise ConfigError(f'simulation config is missing "{key}"')
        spec = load_spec(document["spec"])
        covariates = document["covariates"]
        if not isinstance(covariates, dict):
            raise ConfigError('"covariates" must map columns to generators')
        try:
            true_params = ParamSet.from_dict(spec, document["true_params"])
        except FreqChoiceError as exc:
            raise ConfigError(f"invalid true_params: {exc}")
        return cls(
            spec=spec,
            true_params=true_params,
            n=document["n"],
            seed=document.get("seed", 0),
            covariate_generators=tuple(
                (column, make_generator(column, entry))
                for column, entry in covariates.items()
            ),
        )

    @classmethod
    def from_text(cls, text):
        return cls.from_dict(parse_document(text))


def _draw_rows(config):
    columns = len(config.covariate_generators)
    raw = np.empty((config.n, columns))
    uniforms = np.empty(config.n)
    for row in range(config.n):
        generator = row_generator(config.seed, row)
        for j, (_, covariate) in enumerate(config.covariate_generators):
            raw[row, j] = covariate.draw(generator)
        uniforms[row] = generator.random()
    return raw, uniforms


def draw_categories(probabilities, uniforms):
    """Inverse CDF: the first category whose cumulative mass exceeds u."""
    cumulative = np.cumsum(probabilities, axis=1)
    categories = np.sum(cumulative <= uniforms[:, None], axis=1)
    return np.minimum(categories, probabilities.shape[1] - 1)


@logme()
def simulate(config):
    spec = config.spec
    logger.info("simulation started", family=spec.family, n=config.n, seed=config.seed)
    raw, uniforms = _draw_rows(config)
    placeholder = build_dataset(
        np.zeros(config.n, dtype=int), raw, config.column_names, spec
    )
    probabilities = model.pmf(
        config.true_params, model.dataset_design(spec, placeholder)
    )
    freq = draw_categories(probabilities, uniforms)
    dataset = build_dataset(freq, raw, config.column_names, spec)
    logger.info("simulation finished", n=dataset.n)
    return dataset
