"""Design matrices and the per-observation family pmf.

The estimator, the effects module and the simulator all evaluate a model
the same way: build a :class:`Design` from covariate columns once, then map
a :class:`~freqchoice.params.ParamSet` to per-row kernel inputs.
"""
import typing

import numpy as np
from scipy import special

from freqchoice.errors import CovariateLookupError
from freqchoice.errors import DimensionError
from freqchoice.errors import SchemaError
from freqchoice.kernels import count
from freqchoice.kernels import ordered


class Design(typing.NamedTuple):
    x: np.ndarray
    z: np.ndarray
    b: np.ndarray
    w: np.ndarray

    @property
    def n(self):
        return self.x.shape[0]

    def take(self, rows):
        return Design(*(matrix[rows] for matrix in self))


class Components(typing.NamedTuple):
    """Per-row model functions. Unused entries are None."""

    v: np.ndarray
    alpha: typing.Optional[float] = None
    thresholds: typing.Optional[np.ndarray] = None
    s: typing.Optional[np.ndarray] = None
    log_r: typing.Optional[float] = None
    eta: typing.Optional[np.ndarray] = None
    rho: typing.Optional[np.ndarray] = None


def _lookup(columns, name, n):
    try:
        values = columns[name]
    except KeyError:
        raise SchemaError(f'missing covariate "{name}"')
    return np.broadcast_to(np.asarray(values, dtype=float), (n,))


def _matrix(columns, terms, intercept, n):
    blocks = [np.ones(n)] if intercept else []
    blocks.extend(_lookup(columns, term.column, n) for term in terms)
    if not blocks:
        return np.zeros((n, 0))
    return np.column_stack(blocks)


def build_design(spec, columns, n):
    """Design matrices from a mapping of transformed column values."""
    b_blocks = [
        np.ones(n) if term.is_constant else _lookup(columns, term.column, n)
        for term in spec.count_specific_terms
    ]
    return Design(
        x=_matrix(columns, spec.index_covariates, spec.index_intercept, n),
        z=_matrix(columns, spec.split_covariates, spec.split_intercept, n),
        b=np.column_stack(b_blocks) if b_blocks else np.zeros((n, 0)),
        w=_matrix(columns, spec.rho_covariates, spec.rho_intercept, n),
    )


def dataset_design(spec, dataset):
    columns = {name: dataset.column(name) for name in dataset.column_names}
    return build_design(spec, columns, dataset.n)


def observation_design(spec, observation):
    columns = {name: [value] for name, value in observation.covariates.items()}
    return build_design(spec, columns, 1)


def count_levels(spec):
    return np.array([term.count for term in spec.count_specific_terms], dtype=int)


def components(params, design):
    spec = params.spec
    v = design.x @ params.beta
    if spec.is_ordered:
        return Components(
            v=v,
            alpha=params.sigma2,
            thresholds=params.thresholds,
            s=design.z @ params.gamma if spec.is_split else None,
        )
    eta = np.zeros((design.n, spec.n_categories))
    for j, level in enumerate(count_levels(spec)):
        eta[:, level] += params.omega[j] * design.b[:, j]
    return Components(
        v=v,
        log_r=params.log_r if spec.has_r else None,
        eta=eta,
        rho=special.expit(design.w @ params.theta),
    )


def utilities(params, parts):
    """V_y + eta_y for the count families, from log(lambda) = v."""
    spec = params.spec
    if spec.has_r:
        base = count.nb_log_utilities(parts.v, parts.log_r, spec.top_code)
    else:
        base = count.poisson_log_utilities(parts.v, spec.top_code)
    return base + parts.eta


def log_pmf(params, design):
    """log Pr(f = k) for every row and category, shape (n, C + 1)."""
    spec = params.spec
    parts = components(params, design)
    if spec.is_ordered:
        inputs = ordered.OrderedKernelInput(parts.v, parts.alpha, parts.thresholds)
        if spec.is_split:
            return ordered.split_oev_log_pmf(parts.s, inputs, spec.top_code)
        return ordered.gamma_oev_log_pmf(inputs, spec.top_code)
    return count.ogev_log_pmf(utilities(params, parts), parts.rho)


def pmf(params, design):
    return np.exp(log_pmf(params, design))


def observed_log_pmf(params, design, freq):
    table = log_pmf(params, design)
    freq = np.asarray(freq, dtype=int)
    if table.shape[0] != freq.shape[0]:
        raise DimensionError("design and frequencies have different row counts")
    return np.take_along_axis(table, freq[:, None], axis=1)[:, 0]


class Channels(typing.NamedTuple):
    """Where a covariate enters the model and with which coefficients."""

    index: float
    split: float
    omega: np.ndarray
    levels: np.ndarray
    rho: float


def channels(params, covariate):
    """Coefficients on ``covariate`` in each model function.

    Raises CovariateLookupError when the covariate is not in the model.
    """
    spec = params.spec

    def coefficient(terms, coefficients, intercept):
        for j, term in enumerate(terms):
            if term.column == covariate:
                return float(coefficients[j + int(intercept)])
        return None

    index = coefficient(spec.index_covariates, params.beta, spec.index_intercept)
    split = coefficient(spec.split_covariates, params.gamma, spec.split_intercept)
    rho = coefficient(spec.rho_covariates, params.theta, spec.rho_intercept)
    mask = np.array(
        [term.column == covariate for term in spec.count_specific_terms], dtype=bool
    )
    omega = params.omega[mask] if mask.size else np.zeros(0)
    levels = count_levels(spec)[mask] if mask.size else np.zeros(0, dtype=int)

    if index is None and split is None and rho is None and not omega.size:
        raise CovariateLookupError(f'"{covariate}" does not enter the model')
    return Channels(
        index=index or 0.0,
        split=split or 0.0,
        omega=omega,
        levels=levels,
        rho=rho or 0.0,
    )
