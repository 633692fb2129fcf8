"""Ordered extreme-value kernels with Gamma heterogeneity.

With index ``v``, heterogeneity ``alpha`` and baseline ``D_k = exp(delta_k)``
the survival function is::

    S(k) = Pr(f > k - 1) = (1 + D_k * exp(-v) / alpha) ** -alpha

and ``log S(k) = -alpha * log1p(exp(t_k))`` with
``t_k = delta_k - v - log(alpha)``. Everything below works on ``log S`` and
only exponentiates at the end, so large ``|v|`` or ``alpha`` up to 1e8 do
not overflow.
"""
import typing

import numpy as np
from scipy import special

from freqchoice.errors import DimensionError
from freqchoice.errors import DomainError
from freqchoice.errors import NumericInputError


class OrderedKernelInput(typing.NamedTuple):
    v: typing.Any
    alpha: typing.Any
    thresholds: typing.Any

    @property
    def baseline(self):
        return np.exp(np.asarray(self.thresholds, dtype=float))


def _finite(value, name):
    value = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(value)):
        raise NumericInputError(f"{name} must be finite")
    return value


def _prepare(inputs):
    v = _finite(inputs.v, "v")
    alpha = _finite(inputs.alpha, "alpha")
    thresholds = _finite(inputs.thresholds, "thresholds")
    if np.any(alpha <= 0):
        raise DomainError("alpha must be positive")
    if thresholds.ndim == 0 or thresholds.shape[-1] == 0:
        raise DimensionError("at least one threshold is needed")
    if np.any(np.diff(thresholds, axis=-1) <= 0):
        raise DomainError("thresholds must be strictly increasing")
    return v, alpha, thresholds


def _check_count(thresholds, expected):
    if thresholds.shape[-1] != expected:
        raise DimensionError(
            f"expected {expected} thresholds, got {thresholds.shape[-1]}"
        )


def _shifted(inputs):
    v, alpha, thresholds = _prepare(inputs)
    t = thresholds - v[..., None] - np.log(alpha)[..., None]
    return t, alpha[..., None]


def log1mexp(x):
    """log(1 - exp(x)) for x <= 0."""
    x = np.minimum(np.asarray(x, dtype=float), 0.0)
    with np.errstate(divide="ignore"):
        return np.where(
            x > -np.log(2.0), np.log(-np.expm1(x)), np.log1p(-np.exp(x))
        )


def log_survival(inputs):
    """log S(k) for k = 1..C along the last axis."""
    t, alpha = _shifted(inputs)
    return -alpha * np.logaddexp(0.0, t)


def gamma_oev_survival(k, inputs):
    thresholds = np.asarray(inputs.thresholds, dtype=float)
    if not 1 <= k <= thresholds.shape[-1]:
        raise DimensionError(
            f"category {k} is outside 1..{thresholds.shape[-1]}"
        )
    return np.exp(log_survival(inputs)[..., k - 1])


def _log_pmf_from_survival(log_s):
    """Telescoped pmf from log S(1..C): Pr(k) = S(k) - S(k + 1)."""
    shape = log_s.shape[:-1] + (1,)
    upper = np.concatenate([np.zeros(shape), log_s], axis=-1)
    lower = np.concatenate([log_s, np.full(shape, -np.inf)], axis=-1)
    with np.errstate(invalid="ignore"):
        gap = np.where(np.isneginf(upper), -np.inf, lower - upper)
    return np.where(np.isneginf(upper), -np.inf, upper + log1mexp(gap))


def gamma_oev_log_pmf(inputs, top_code):
    log_s = log_survival(inputs)
    _check_count(log_s, top_code)
    return _log_pmf_from_survival(log_s)


def gamma_oev_pmf(inputs, top_code):
    """Probabilities of categories 0..C; thresholds must hold C entries."""
    return np.exp(gamma_oev_log_pmf(inputs, top_code))


def oev_pmf(v, thresholds, top_code):
    """OEV pmf without heterogeneity: S(k) = exp(-D_k * exp(-v))."""
    v = _finite(v, "v")
    thresholds = _finite(thresholds, "thresholds")
    _check_count(thresholds, top_code)
    log_s = -np.exp(thresholds - v[..., None])
    return np.exp(_log_pmf_from_survival(log_s))


def logistic(s):
    return special.expit(_finite(s, "s"))


def log_logistic(s):
    return special.log_expit(_finite(s, "s"))


def split_oev_log_pmf(s, inputs, top_code):
    """Hurdle pmf: zeros from the logit, positives from the latent OEV.

    ``inputs.thresholds`` holds the C - 1 cut points among categories 1..C.
    """
    if top_code < 2:
        raise DimensionError("the split pmf needs a top code of at least 2")
    latent = gamma_oev_log_pmf(inputs, top_code - 1)
    s = _finite(s, "s")
    zero = log_logistic(s)[..., None]
    positive = log_logistic(-s)[..., None] + latent
    zero = np.broadcast_to(zero, positive.shape[:-1] + (1,))
    return np.concatenate([zero, positive], axis=-1)


def split_oev_pmf(s, inputs, top_code):
    return np.exp(split_oev_log_pmf(s, inputs, top_code))


def baseline_increments(thresholds):
    """D_k - D_(k-1) with D_0 = 0."""
    baseline = np.exp(_finite(thresholds, "thresholds"))
    return np.diff(baseline, axis=-1, prepend=0.0)


def survival_derivative(inputs):
    """dS(k)/dv for k = 1..C."""
    t, alpha = _shifted(inputs)
    survival = np.exp(-alpha * np.logaddexp(0.0, t))
    return survival * alpha * special.expit(t)


def index_derivative(inputs, top_code):
    """d Pr(k) / dv over categories 0..C."""
    ds = survival_derivative(inputs)
    _check_count(ds, top_code)
    shape = ds.shape[:-1] + (1,)
    upper = np.concatenate([np.zeros(shape), ds], axis=-1)
    lower = np.concatenate([ds, np.zeros(shape)], axis=-1)
    return upper - lower


def mixture_variance(alpha):
    """Variance of the unit-mean Gamma mixing term, 1 / alpha."""
    alpha = _finite(alpha, "alpha")
    if np.any(alpha <= 0):
        raise DomainError("alpha must be positive")
    return 1.0 / alpha
