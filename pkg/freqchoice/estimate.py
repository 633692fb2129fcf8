"""Maximum-likelihood estimation, standard errors and fit statistics.

The optimizer works on the unconstrained vector of
:mod:`freqchoice.params`. Gradients and Hessians are central finite
differences of the log-likelihood. The log-likelihood itself is summed over
fixed-size row chunks with ``math.fsum``, so the total does not depend on
how many worker threads evaluated the chunks.
"""
import concurrent.futures
import dataclasses
import json
import math
import typing

import numpy as np
from scipy import optimize

from freqchoice import model
from freqchoice.config import EstimationOptions
from freqchoice.errors import ConfigError
from freqchoice.errors import DimensionError
from freqchoice.errors import DomainError
from freqchoice.errors import EstimationError
from freqchoice.errors import FreqChoiceError
from freqchoice.errors import StatisticsError
from freqchoice.kernels import ordered
from freqchoice.log import get_logger
from freqchoice.log import logme
from freqchoice.params import ParamSet
from freqchoice.params import constrained_names
from freqchoice.params import parameter_names
from freqchoice.spec import load_spec
from freqchoice.spec import null_spec
from freqchoice.spec import spec_to_dict
from freqchoice.spec import validate_spec

LOG_FLOOR = math.log(np.finfo(float).tiny)
MIN_THRESHOLD_STEP = 1e-2
SHARE_CLIP = 1e-4

DIVERGENCE = "divergence"
ITERATION_LIMIT = "iteration_limit"
HESSIAN = "hessian_not_negative_definite"
STATISTICS = "statistics_unavailable"

logger = get_logger(__name__)


class FitWarning(typing.NamedTuple):
    code: str
    message: str


@dataclasses.dataclass(frozen=True)
class FitStats:
    aic: float
    bic: float
    rho_squared: float

    def to_dict(self):
        return {
            "aic": _json_float(self.aic),
            "bic": _json_float(self.bic),
            "rho_squared": _json_float(self.rho_squared),
        }

    @classmethod
    def from_dict(cls, document):
        keys = ("aic", "bic", "rho_squared")
        return cls(*(_float(document.get(key)) for key in keys))


def _json_float(value):
    if value is None or not math.isfinite(value):
        return None
    return float(value)


def _float(value):
    return math.nan if value is None else float(value)


class StandardErrors(typing.NamedTuple):
    se: np.ndarray
    t_stats: np.ndarray
    constrained_se: np.ndarray
    max_eigenvalue: float

    @property
    def available(self):
        return bool(np.all(np.isfinite(self.se)))


class HessianResult(typing.NamedTuple):
    hessian: np.ndarray
    covariance: typing.Optional[np.ndarray]
    max_eigenvalue: float


@dataclasses.dataclass(frozen=True, eq=False)
class FitResult:
    spec: object
    params: ParamSet
    unconstrained: np.ndarray
    ll_convergence: float
    ll_null: float
    ll_init: float
    se: np.ndarray
    t_stats: np.ndarray
    constrained_se: np.ndarray
    k: int
    n: int
    stats: FitStats
    converged: bool
    iterations: int
    gradient_norm: float
    warnings: typing.Tuple[FitWarning, ...] = ()
    start_index: int = 0
    hessian_eigenvalue: typing.Optional[float] = None

    @property
    def names(self):
        return parameter_names(self.spec)

    @property
    def constrained(self):
        return self.params.constrained_vector()

    @property
    def mixture_variance(self):
        """1 / sigma2, the variance of the Gamma mixing term."""
        if not self.spec.has_sigma2:
            return None
        return float(ordered.mixture_variance(self.params.sigma2))

    def to_dict(self):
        parameters = [
            {
                "name": name,
                "estimate": float(value),
                "se": _json_float(se),
                "t_stat": _json_float(t),
            }
            for name, value, se, t in zip(
                self.names, self.unconstrained, self.se, self.t_stats
            )
        ]
        constrained = [
            {"name": name, "estimate": float(value), "se": _json_float(se)}
            for name, value, se in zip(
                constrained_names(self.spec), self.constrained, self.constrained_se
            )
        ]
        document = {
            "spec": spec_to_dict(self.spec),
            "n": self.n,
            "k": self.k,
            "converged": self.converged,
            "iterations": self.iterations,
            "gradient_norm": _json_float(self.gradient_norm),
            "start_index": self.start_index,
            "log_likelihood": {
                "convergence": self.ll_convergence,
                "null": _json_float(self.ll_null),
                "init": self.ll_init,
            },
            "stats": self.stats.to_dict(),
            "parameters": parameters,
            "constrained": constrained,
            "estimates": self.params.to_dict(),
            "warnings": [w._asdict() for w in self.warnings],
            "hessian_eigenvalue": _json_float(self.hessian_eigenvalue),
        }
        if self.spec.has_sigma2:
            document["mixture_variance"] = self.mixture_variance
        if self.spec.is_ordered:
            increments = ordered.baseline_increments(self.params.thresholds)
            document["baseline_increments"] = increments.tolist()
        return document

    @classmethod
    def from_dict(cls, document):
        try:
            spec = load_spec(document["spec"])
            parameters = document["parameters"]
            unconstrained = np.array(
                [p["estimate"] for p in parameters], dtype=float
            )
            lls = document["log_likelihood"]
            return cls(
                spec=spec,
                params=ParamSet.from_vector(spec, unconstrained),
                unconstrained=unconstrained,
                ll_convergence=float(lls["convergence"]),
                ll_null=_float(lls.get("null")),
                ll_init=float(lls["init"]),
                se=np.array([_float(p.get("se")) for p in parameters]),
                t_stats=np.array([_float(p.get("t_stat")) for p in parameters]),
                constrained_se=np.array(
                    [_float(p.get("se")) for p in document["constrained"]]
                ),
                k=int(document["k"]),
                n=int(document["n"]),
                stats=FitStats.from_dict(document["stats"]),
                converged=bool(document["converged"]),
                iterations=int(document["iterations"]),
                gradient_norm=_float(document.get("gradient_norm")),
                warnings=tuple(
                    FitWarning(w["code"], w["message"])
                    for w in document.get("warnings", ())
                ),
                start_index=int(document.get("start_index", 0)),
                hessian_eigenvalue=document.get("hessian_eigenvalue"),
            )
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"fit document is missing {exc}")


def dump_fit(fit, stream):
    json.dump(fit.to_dict(), stream, indent=2, sort_keys=True)
    stream.write("\n")


def load_fit(stream):
    try:
        document = json.load(stream)
    except ValueError as exc:
        raise ConfigError(f"malformed fit document: {exc}")
    return FitResult.from_dict(document)


def fit_statistics(ll_convergence, ll_null, k, n):
    if n < 1 or k < 0:
        raise DomainError(
            f"fit statistics need n >= 1 and k >= 0, got n={n}, k={k}"
        )
    if ll_null == 0:
        raise StatisticsError("the null log-likelihood is zero")
    return FitStats(
        aic=2.0 * k - 2.0 * ll_convergence,
        bic=-2.0 * ll_convergence + k * math.log(n),
        rho_squared=1.0 - ll_convergence / ll_null,
    )


def _chunks(n, size):
    return [slice(start, min(start + size, n)) for start in range(0, n, size)]


def _observation_terms(params, design, freq, options):
    """log Pr(observed category) per row, evaluated in fixed row chunks."""

    def evaluate(rows):
        return model.observed_log_pmf(params, design.take(rows), freq[rows])

    chunks = _chunks(design.n, options.chunk_size)
    if options.threads > 1 and len(chunks) > 1:
        with concurrent.futures.ThreadPoolExecutor(options.threads) as pool:
            parts = list(pool.map(evaluate, chunks))
    else:
        parts = [evaluate(rows) for rows in chunks]
    return np.concatenate(parts) if parts else np.zeros(0)


def _align(spec, params):
    if params.spec.parameter_count() != spec.parameter_count():
        raise DimensionError(
            f"parameters have {params.spec.parameter_count()} entries, "
            f"the spec needs {spec.parameter_count()}"
        )
    return ParamSet.from_vector(spec, params.to_vector())


def log_likelihood(dataset, spec, params, options=None):
    """Sum of log Pr(observed category); underflow is an EstimationError."""
    options = options or EstimationOptions()
    params = _align(spec, params)
    terms = _observation_terms(
        params, model.dataset_design(spec, dataset), dataset.freq, options
    )
    bad = np.flatnonzero(~np.isfinite(terms))
    if bad.size:
        raise EstimationError(
            "observed category has zero probability", row=int(bad[0]) + 1
        )
    return math.fsum(terms)


class _Objective(object):
    """Log-likelihood in unconstrained space, floored for the optimizer."""

    def __init__(self, dataset, spec, options):
        self.spec = spec
        self.options = options
        self.design = model.dataset_design(spec, dataset)
        self.freq = dataset.freq
        self._gradients = {}

    def terms(self, vector):
        params = ParamSet.from_vector(self.spec, vector)
        return _observation_terms(params, self.design, self.freq, self.options)

    def log_likelihood(self, vector):
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                terms = self.terms(vector)
        except FreqChoiceError:
            return -math.inf
        return math.fsum(np.fmax(terms, LOG_FLOOR))

    def __call__(self, vector):
        return -self.log_likelihood(vector)

    def gradient(self, vector):
        """Gradient of the log-likelihood, cached per point."""
        key = np.asarray(vector, dtype=float).tobytes()
        if key not in self._gradients:
            if len(self._gradients) > 16:
                self._gradients.clear()
            self._gradients[key] = central_gradient(
                self.log_likelihood, vector, self.options.gradient_step
            )
        return self._gradients[key].copy()

    def descent_gradient(self, vector):
        return -self.gradient(vector)


def central_gradient(function, x, relative_step):
    x = np.asarray(x, dtype=float)
    gradient = np.empty_like(x)
    for i in range(x.size):
        h = relative_step * max(1.0, abs(x[i]))
        up = x.copy()
        down = x.copy()
        up[i] += h
        down[i] -= h
        gradient[i] = (function(up) - function(down)) / (up[i] - down[i])
    return gradient


def finite_difference_hessian(function, x, relative_step):
    x = np.asarray(x, dtype=float)
    k = x.size
    steps = relative_step * np.maximum(1.0, np.abs(x))
    hessian = np.empty((k, k))
    center = function(x)

    def shifted(*moves):
        point = x.copy()
        for index, sign in moves:
            point[index] += sign * steps[index]
        return function(point)

    for i in range(k):
        curvature = shifted((i, 1)) - 2.0 * center + shifted((i, -1))
        hessian[i, i] = curvature / steps[i] ** 2
        for j in range(i):
            value = (
                shifted((i, 1), (j, 1))
                - shifted((i, 1), (j, -1))
                - shifted((i, -1), (j, 1))
                + shifted((i, -1), (j, -1))
            ) / (4.0 * steps[i] * steps[j])
            hessian[i, j] = hessian[j, i] = value
    return hessian


def hessian_covariance(function, x, relative_step=1e-4):
    """Inverse negative Hessian of ``function`` (a log-likelihood) at ``x``.

    The covariance is None when the Hessian is not negative-definite;
    ``max_eigenvalue`` is then the offending (non-negative) eigenvalue.
    """
    hessian = finite_difference_hessian(function, x, relative_step)
    if not np.all(np.isfinite(hessian)):
        return HessianResult(hessian, None, math.nan)
    max_eigenvalue = float(np.max(np.linalg.eigvalsh(hessian))) if x.size else -1.0
    if max_eigenvalue >= 0:
        return HessianResult(hessian, None, max_eigenvalue)
    return HessianResult(hessian, np.linalg.inv(-hessian), max_eigenvalue)


def _standard_errors(objective, x, options):
    k = x.size
    result = hessian_covariance(objective.log_likelihood, x, options.hessian_step)
    if result.covariance is None:
        missing = np.full(k, math.nan)
        return StandardErrors(
            missing, missing.copy(), missing.copy(), result.max_eigenvalue
        )
    se = np.sqrt(np.diag(result.covariance))
    jacobian = ParamSet.from_vector(objective.spec, x).constrained_jacobian()
    constrained = jacobian @ result.covariance @ jacobian.T
    return StandardErrors(
        se=se,
        t_stats=x / se,
        constrained_se=np.sqrt(np.diag(constrained)),
        max_eigenvalue=result.max_eigenvalue,
    )


def standard_errors(dataset, spec, params, options=None):
    """Hessian-based standard errors at ``params``.

    Unavailable entries are NaN, which happens for all of them when the
    Hessian is not negative-definite.
    """
    options = options or EstimationOptions()
    params = _align(spec, params)
    objective = _Objective(dataset, spec, options)
    return _standard_errors(objective, params.to_vector(), options)


def _increasing(values):
    """Force a strictly increasing sequence with at least the minimum step."""
    offsets = MIN_THRESHOLD_STEP * np.arange(values.size)
    return np.maximum.accumulate(values - offsets) + offsets


def default_init(dataset, spec):
    """Zero coefficients, unit sigma2 and r, thresholds from observed shares.

    With v = 0 and alpha = 1 the survival is 1 / (1 + exp(delta_k)), so each
    threshold is the log-odds of not reaching its category.
    """
    thresholds = None
    if spec.is_ordered:
        freq = np.asarray(dataset.freq)
        first = 1
        if spec.is_split:
            freq = freq[freq > 0]
            first = 2
        if freq.size:
            levels = np.arange(first, spec.top_code + 1)
            shares = np.array([np.mean(freq >= level) for level in levels])
            shares = np.clip(shares, SHARE_CLIP, 1.0 - SHARE_CLIP)
            thresholds = _increasing(np.log(1.0 / shares - 1.0))
    return ParamSet.from_constrained(spec, thresholds=thresholds)


class _Run(typing.NamedTuple):
    x: np.ndarray
    ll: float
    iterations: int
    converged: bool
    gradient: np.ndarray
    warnings: typing.Tuple[FitWarning, ...]


def _has_converged(gradient, ll, step, options):
    if not np.all(np.isfinite(gradient)):
        return False
    tolerance = options.gradient_tol * max(1.0, abs(ll))
    if np.max(np.abs(gradient), initial=0.0) < tolerance:
        return True
    return step < options.step_tol


def _maximize(objective, start, options, names):
    state = {
        "x": start,
        "ll": objective.log_likelihood(start),
        "converged": False,
        "diverged": set(),
    }

    def callback(intermediate_result):
        x = np.array(intermediate_result.x, dtype=float)
        ll = -float(intermediate_result.fun)
        step = float(np.linalg.norm(x - state["x"]))
        if ll > state["ll"]:
            for i in np.flatnonzero(np.abs(x) > options.divergence_bound):
                state["diverged"].add(int(i))
        state["x"], state["ll"] = x, ll
        if _has_converged(objective.gradient(x), ll, step, options):
            state["converged"] = True
            raise StopIteration

    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        result = optimize.minimize(
            objective,
            start,
            jac=objective.descent_gradient,
            method="BFGS",
            callback=callback,
            options={"maxiter": options.max_iter, "gtol": 0.0},
        )

    x = np.array(result.x, dtype=float)
    ll = objective.log_likelihood(x)
    start_ll = objective.log_likelihood(start)
    if not ll >= start_ll:
        x, ll = np.array(start, dtype=float), start_ll
    gradient = objective.gradient(x)
    converged = state["converged"] or _has_converged(gradient, ll, math.inf, options)

    warnings = []
    for i in sorted(state["diverged"]):
        warnings.append(
            FitWarning(
                DIVERGENCE,
                f"{names[i]} exceeded {options.divergence_bound:g} in magnitude "
                "while the log-likelihood was still improving",
            )
        )
    if not converged and result.nit >= options.max_iter:
        warnings.append(
            FitWarning(
                ITERATION_LIMIT, f"stopped after {result.nit} iterations"
            )
        )
    return _Run(x, ll, int(result.nit), converged, gradient, tuple(warnings))


def _starts(x0, options):
    yield x0
    for index in range(1, options.starts):
        generator = np.random.Generator(
            np.random.Philox(key=options.seed + index * 2 ** 64)
        )
        yield x0 + options.start_jitter * generator.standard_normal(x0.size)


def _separation_warning(objective, x, options):
    terms = objective.terms(x)
    if terms.size and np.all(terms > math.log1p(-options.separation_tol)):
        return FitWarning(
            DIVERGENCE,
            "every observed category has probability above "
            f"1 - {options.separation_tol:g}; the estimates are separating",
        )
    return None


@logme()
def fit(dataset, spec, init=None, options=None, ll_null=None):
    """Maximize the log-likelihood of ``spec`` on ``dataset``.

    Non-convergence is reported through ``converged`` and ``warnings``,
    never raised. ``ll_null`` overrides the null model fit used for the
    rho-squared statistic.
    """
    options = options or EstimationOptions()
    spec = validate_spec(spec)
    k, n = spec.n_params, dataset.n
    if n < max(k, 1):
        raise EstimationError(
            f"{k} parameters need at least {k} observations, got {n}"
        )
    init = default_init(dataset, spec) if init is None else _align(spec, init)
    names = parameter_names(spec)

    ll_init = log_likelihood(dataset, spec, init, options)
    if not math.isfinite(ll_init):
        raise EstimationError("log-likelihood is not finite at the initial point")
    logger.info("fit started", family=spec.family, n=n, k=k, ll_init=ll_init)

    objective = _Objective(dataset, spec, options)
    x0 = init.to_vector()
    best = None
    best_index = 0
    for index, start in enumerate(_starts(x0, options)):
        if not math.isfinite(objective.log_likelihood(start)):
            logger.warning("start skipped", start_index=index)
            continue
        run = _maximize(objective, start, options, names)
        logger.info(
            "start finished",
            start_index=index,
            log_likelihood=run.ll,
            iterations=run.iterations,
            converged=run.converged,
        )
        if best is None or run.ll > best.ll:
            best, best_index = run, index

    warnings = list(best.warnings)
    separation = _separation_warning(objective, best.x, options)
    if separation is not None:
        warnings.append(separation)

    k_vector = best.x.size
    missing = np.full(k_vector, math.nan)
    errors = StandardErrors(missing, missing.copy(), missing.copy(), math.nan)
    if options.compute_se:
        errors = _standard_errors(objective, best.x, options)
        if not errors.available:
            warnings.append(
                FitWarning(
                    HESSIAN,
                    "standard errors unavailable; Hessian eigenvalue "
                    f"{errors.max_eigenvalue:.6g} is not negative",
                )
            )

    if ll_null is None:
        if spec.null_model:
            ll_null = best.ll
        else:
            ll_null = fit_null(dataset, spec, options).ll_convergence
    try:
        stats = fit_statistics(best.ll, ll_null, k, n)
    except StatisticsError as exc:
        warnings.append(FitWarning(STATISTICS, exc.detail))
        stats = FitStats(
            aic=2.0 * k - 2.0 * best.ll,
            bic=-2.0 * best.ll + k * math.log(n),
            rho_squared=math.nan,
        )

    for warning in warnings:
        logger.warning(warning.message, code=warning.code)
    logger.info(
        "fit finished",
        family=spec.family,
        log_likelihood=best.ll,
        converged=best.converged,
        start_index=best_index,
    )
    return FitResult(
        spec=spec,
        params=ParamSet.from_vector(spec, best.x),
        unconstrained=best.x,
        ll_convergence=best.ll,
        ll_null=float(ll_null),
        ll_init=ll_init,
        se=errors.se,
        t_stats=errors.t_stats,
        constrained_se=errors.constrained_se,
        k=k,
        n=n,
        stats=stats,
        converged=best.converged,
        iterations=best.iterations,
        gradient_norm=float(np.max(np.abs(best.gradient), initial=0.0)),
        warnings=tuple(warnings),
        start_index=best_index,
        hessian_eigenvalue=(
            None if math.isnan(errors.max_eigenvalue) else errors.max_eigenvalue
        ),
    )


def fit_null(dataset, spec, options=None):
    """Constants-only model of the same family; standard errors are skipped."""
    options = (options or EstimationOptions()).replace(compute_se=False)
    return fit(dataset, null_spec(spec), options=options)
