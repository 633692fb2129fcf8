"""Count-choice kernels: NB and Poisson utilities and the ordered GEV pmf.

The ordered GEV model nests every adjacent pair of alternatives. Nest n
(n = 0..C+1) holds alternatives n-1 and n, where alternatives outside 0..C
carry zero weight, so the two end nests have a single member. With
``a_y = U_y / rho`` and nest inclusive value ``L_n = log(e^a_(n-1) + e^a_n)``::

    Pr(y) = e^a_y * (e^((rho-1) L_y) + e^((rho-1) L_(y+1))) / sum_n e^(rho L_n)

Utilities are shifted by their maximum before use; the pmf is invariant to
a common shift.
"""
import typing

import numpy as np
from scipy import special

from freqchoice.errors import DimensionError
from freqchoice.errors import DomainError
from freqchoice.errors import NumericInputError
from freqchoice.spec import NB_OGEV
from freqchoice.spec import POISSON_OGEV

NB = "nb"
POISSON = "poisson"
_FAMILY_ALIASES = {NB: NB_OGEV, POISSON: POISSON_OGEV}


class CountUtilityInput(typing.NamedTuple):
    lam: typing.Any
    r: typing.Any
    eta: typing.Any
    rho: typing.Any


def _finite(value, name):
    value = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(value)):
        raise NumericInputError(f"{name} must be finite")
    return value


def _positive(value, name):
    value = _finite(value, name)
    if np.any(value <= 0):
        raise NumericInputError(f"{name} must be positive")
    return value


def _count(y):
    if isinstance(y, bool) or not isinstance(y, (int, np.integer)) or y < 0:
        raise DomainError(f"count must be a non-negative integer, got {y!r}")
    return int(y)


def resolve_family(family):
    family = _FAMILY_ALIASES.get(family, family)
    if family not in (NB_OGEV, POISSON_OGEV):
        raise DomainError(f'unknown count family "{family}"')
    return family


def nb_log_utilities(log_lam, log_r, top_code):
    """NB utilities V_0..V_C from log(lambda) and log(r).

    V_y = sum_(j<y) log1p(j/r) - log(y!) + y log(lambda) - y log1p(lambda/r)
    """
    log_lam = np.asarray(log_lam, dtype=float)[..., None]
    log_r = np.asarray(log_r, dtype=float)[..., None]
    y = np.arange(top_code + 1, dtype=float)
    steps = np.log1p(y[:-1] * np.exp(-log_r))
    growth = np.concatenate(
        [np.zeros(steps.shape[:-1] + (1,)), np.cumsum(steps, axis=-1)], axis=-1
    )
    return (
        growth
        - special.gammaln(y + 1)
        + y * log_lam
        - y * np.logaddexp(0.0, log_lam - log_r)
    )


def poisson_log_utilities(log_lam, top_code):
    log_lam = np.asarray(log_lam, dtype=float)[..., None]
    y = np.arange(top_code + 1, dtype=float)
    return y * log_lam - special.gammaln(y + 1)


def nb_systematic_utility(y, lam, r):
    y = _count(y)
    lam = _positive(lam, "lambda")
    r = _positive(r, "r")
    return nb_log_utilities(np.log(lam), np.log(r), y)[..., y]


def poisson_systematic_utility(y, lam):
    y = _count(y)
    lam = _positive(lam, "lambda")
    return poisson_log_utilities(np.log(lam), y)[..., y]


def index_slopes(log_lam, log_r, family, top_code):
    """dV_y / d log(lambda): y r / (r + lambda) for NB, y for Poisson."""
    y = np.arange(top_code + 1, dtype=float)
    log_lam = np.asarray(log_lam, dtype=float)[..., None]
    if resolve_family(family) == POISSON_OGEV:
        return np.broadcast_to(y, log_lam.shape[:-1] + y.shape).copy()
    log_r = np.asarray(log_r, dtype=float)[..., None]
    return y * special.expit(log_r - log_lam)


def softmax(utilities):
    return special.softmax(_finite(utilities, "utilities"), axis=-1)


def _check_rho(rho):
    rho = _finite(rho, "rho")
    if np.any((rho <= 0) | (rho > 1)):
        raise DomainError("rho must lie in (0, 1]")
    return rho


class _Nests(typing.NamedTuple):
    a: np.ndarray
    padded: np.ndarray
    inclusive: np.ndarray
    log_denominator: np.ndarray
    rho: np.ndarray


def _nests(utilities, rho):
    utilities = _finite(utilities, "utilities")
    rho = _check_rho(rho)[..., None]
    shifted = utilities - np.max(utilities, axis=-1, keepdims=True)
    a = shifted / rho
    edge = np.full(a.shape[:-1] + (1,), -np.inf)
    padded = np.concatenate([edge, a, edge], axis=-1)
    inclusive = np.logaddexp(padded[..., :-1], padded[..., 1:])
    log_denominator = special.logsumexp(rho * inclusive, axis=-1, keepdims=True)
    return _Nests(a, padded, inclusive, log_denominator, rho)


def ogev_log_pmf(utilities, rho):
    nests = _nests(utilities, rho)
    scaled = (nests.rho - 1.0) * nests.inclusive
    return (
        nests.a
        + np.logaddexp(scaled[..., :-1], scaled[..., 1:])
        - nests.log_denominator
    )


def ogev_pmf(utilities, rho):
    return np.exp(ogev_log_pmf(utilities, rho))


def _within(nests):
    """Within-nest shares of the left (n-1) and right (n) members."""
    left = np.exp(nests.padded[..., :-1] - nests.inclusive)
    right = np.exp(nests.padded[..., 1:] - nests.inclusive)
    nest_share = np.exp(nests.rho * nests.inclusive - nests.log_denominator)
    return left, right, nest_share


def ogev_differential(utilities, rho, d_utilities, d_rho=0.0):
    """Directional derivative of ogev_pmf along (d_utilities, d_rho)."""
    nests = _nests(utilities, rho)
    d_utilities = _finite(d_utilities, "d_utilities")
    d_rho = _finite(d_rho, "d_rho")[..., None]
    left, right, nest_share = _within(nests)

    d_a = (d_utilities - nests.a * d_rho) / nests.rho
    zero = np.zeros(d_a.shape[:-1] + (1,))
    d_padded = np.concatenate([zero, d_a, zero], axis=-1)
    d_inclusive = left * d_padded[..., :-1] + right * d_padded[..., 1:]
    d_rho_inclusive = d_rho * nests.inclusive + nests.rho * d_inclusive
    mean = np.sum(nest_share * d_rho_inclusive, axis=-1, keepdims=True)
    g = d_rho_inclusive - mean - d_inclusive

    weight_right = nest_share * right
    weight_left = nest_share * left
    probability = weight_right[..., :-1] + weight_left[..., 1:]
    return (
        weight_right[..., :-1] * g[..., :-1]
        + weight_left[..., 1:] * g[..., 1:]
        + probability * d_a
    )


def ogev_jacobian(utilities, rho):
    """J[..., y, j] = d Pr(y) / d U_j."""
    utilities = _finite(utilities, "utilities")
    size = utilities.shape[-1]
    columns = [
        ogev_differential(utilities, rho, np.broadcast_to(unit, utilities.shape))
        for unit in np.eye(size)
    ]
    return np.stack(columns, axis=-1)


def cluster_own_effect(utilities, rho):
    """d Pr(y) / d U_y summed over the two nests that contain y.

    Each nest contributes Pr(n) Pr(y|n) [(1 - Pr(y|n)) / rho + Pr(y|n) - Pr(y)].
    """
    nests = _nests(utilities, rho)
    left, right, nest_share = _within(nests)
    within_lower = right[..., :-1]
    within_upper = left[..., 1:]
    probability = (
        nest_share[..., :-1] * within_lower + nest_share[..., 1:] * within_upper
    )

    def term(share, within):
        return share * within * ((1.0 - within) / nests.rho + within - probability)

    return term(nest_share[..., :-1], within_lower) + term(
        nest_share[..., 1:], within_upper
    )


def count_utilities(inputs, family, top_code):
    """V_y + eta_y for y = 0..C."""
    family = resolve_family(family)
    lam = _positive(inputs.lam, "lambda")
    eta = _finite(inputs.eta, "eta")
    if eta.shape[-1] != top_code + 1:
        raise DimensionError(
            f"eta needs {top_code + 1} entries, got {eta.shape[-1]}"
        )
    if family == NB_OGEV:
        r = _positive(inputs.r, "r")
        base = nb_log_utilities(np.log(lam), np.log(r), top_code)
    else:
        base = poisson_log_utilities(np.log(lam), top_code)
    return base + eta


def count_choice_log_pmf(inputs, family, top_code):
    return ogev_log_pmf(count_utilities(inputs, family, top_code), inputs.rho)


def count_choice_pmf(inputs, family, top_code):
    return np.exp(count_choice_log_pmf(inputs, family, top_code))
