"""Marginal effects of covariates on category probabilities.

Effects are exact derivatives of the implemented pmf with respect to the
covariate as it enters the model, i.e. after its ingestion transform (for a
``natural_log`` column the effect is per unit of the logged value).
"""
import dataclasses
import math

import numpy as np
import pandas as pd

from freqchoice import model
from freqchoice.errors import DomainError
from freqchoice.errors import StateError
from freqchoice.kernels import count
from freqchoice.kernels import ordered
from freqchoice.log import get_logger
from freqchoice.log import logme
from freqchoice.spec import IDENTITY

AT_OBSERVATION = "at_observation"
SAMPLE_AVERAGE = "sample_average"
DISCRETE_CHANGE = "discrete_change"

logger = get_logger(__name__)


@dataclasses.dataclass(frozen=True)
class EffectsTable:
    covariate: str
    per_category: tuple
    scope: str = AT_OBSERVATION

    @property
    def total(self):
        return math.fsum(self.per_category)

    def to_dict(self):
        return {
            "covariate": self.covariate,
            "scope": self.scope,
            "per_category": list(self.per_category),
        }

    def row(self):
        record = {"covariate": self.covariate, "scope": self.scope}
        record.update({f"p{k}": e for k, e in enumerate(self.per_category)})
        return record


def make_table(covariate, values, scope):
    return EffectsTable(covariate, tuple(float(e) for e in values), scope)


def _ordered_rows(params, design, covariate):
    spec = params.spec
    links = model.channels(params, covariate)
    parts = model.components(params, design)
    inputs = ordered.OrderedKernelInput(parts.v, parts.alpha, parts.thresholds)
    if not spec.is_split:
        return ordered.index_derivative(inputs, spec.top_code) * links.index

    latent = ordered.gamma_oev_pmf(inputs, spec.top_code - 1)
    d_latent = ordered.index_derivative(inputs, spec.top_code - 1)
    zero = ordered.logistic(parts.s)[:, None]
    d_zero = zero * (1.0 - zero) * links.split
    positive = -d_zero * latent + (1.0 - zero) * d_latent * links.index
    return np.concatenate([d_zero, positive], axis=1)


def _count_rows(params, design, covariate):
    spec = params.spec
    links = model.channels(params, covariate)
    parts = model.components(params, design)
    slopes = count.index_slopes(parts.v, parts.log_r, spec.family, spec.top_code)
    d_utilities = slopes * links.index
    for level, omega in zip(links.levels, links.omega):
        d_utilities[:, level] += omega
    d_rho = parts.rho * (1.0 - parts.rho) * links.rho
    return count.ogev_differential(
        model.utilities(params, parts), parts.rho, d_utilities, d_rho
    )


def _rows(params, design, covariate):
    if params.spec.is_ordered:
        return _ordered_rows(params, design, covariate)
    return _count_rows(params, design, covariate)


def ordered_marginal_effects(params, obs, covariate):
    design = model.observation_design(params.spec, obs)
    rows = _ordered_rows(params, design, covariate)
    return make_table(covariate, rows[0], AT_OBSERVATION)


def split_marginal_effects(params, obs, covariate):
    return ordered_marginal_effects(params, obs, covariate)


def ogev_marginal_effects(params, obs, covariate, family=None):
    if family is not None and count.resolve_family(family) != params.spec.family:
        raise DomainError(
            f'parameters belong to "{params.spec.family}", not "{family}"'
        )
    design = model.observation_design(params.spec, obs)
    rows = _count_rows(params, design, covariate)
    return make_table(covariate, rows[0], AT_OBSERVATION)


def marginal_effects(params, obs, covariate):
    """Per-observation effects for whichever family ``params`` belongs to."""
    if params.spec.is_count:
        return ogev_marginal_effects(params, obs, covariate)
    return ordered_marginal_effects(params, obs, covariate)


def effects_for_dataset(params, dataset, covariate):
    """Effects for every observation, shape (n, C + 1)."""
    return _rows(params, model.dataset_design(params.spec, dataset), covariate)


def _column_means(matrix):
    n = matrix.shape[0]
    if n == 0:
        raise DomainError("cannot average over an empty dataset")
    return [math.fsum(matrix[:, k]) / n for k in range(matrix.shape[1])]


def _require_converged(fit):
    if not fit.converged:
        raise StateError("effects need a converged fit")


@logme()
def average_marginal_effects(fit, dataset, covariate):
    _require_converged(fit)
    rows = effects_for_dataset(fit.params, dataset, covariate)
    logger.debug("averaged marginal effects", covariate=covariate, n=dataset.n)
    return make_table(covariate, _column_means(rows), SAMPLE_AVERAGE)


def discrete_change_effects(params, dataset, covariate):
    """Sample-average Pr(f = k | x = 1) - Pr(f = k | x = 0).

    Only for untransformed columns: a logged 0 or 1 is not a 0/1 dummy.
    """
    model.channels(params, covariate)
    spec = params.spec
    if spec.transforms()[covariate] != IDENTITY:
        raise DomainError(
            f'discrete change needs an identity column, "{covariate}" is '
            f"{spec.transforms()[covariate]}"
        )
    high = model.pmf(
        params, model.dataset_design(spec, dataset.with_column(covariate, 1.0))
    )
    low = model.pmf(
        params, model.dataset_design(spec, dataset.with_column(covariate, 0.0))
    )
    return make_table(covariate, _column_means(high - low), DISCRETE_CHANGE)


def effects_frame(tables):
    """Wide CSV layout: one row per table, categories as p0..pC columns."""
    return pd.DataFrame([table.row() for table in tables])


def long_frame(tables):
    """covariate, category, effect rows for bar-chart plotting."""
    records = [
        {"covariate": table.covariate, "category": k, "effect": effect}
        for table in tables
        for k, effect in enumerate(table.per_category)
    ]
    return pd.DataFrame(records, columns=["covariate", "category", "effect"])


def write_csv(frame, stream):
    frame.to_csv(stream, index=False, lineterminator="\n", float_format="%.17g")
