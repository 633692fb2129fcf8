"""Free parameters in constrained and unconstrained form.

Unconstrained layout (the optimizer's vector), block by block:

    beta        mean/index coefficients, constant first when present
    thresholds  first cut point, then log of each positive increment
    log_sigma2  Gamma heterogeneity (ordered families)
    gamma       split logit coefficients, constant first
    log_r       NB dispersion
    omega       count-specific utility coefficients
    theta       rho logit coefficients, constant first

Thresholds are increasing and sigma2, r are positive by construction.
"""
import dataclasses

import numpy as np

from freqchoice.errors import DimensionError
from freqchoice.errors import DomainError
from freqchoice.spec import OEV_GAMMA

CONST = "const"


def _vector(values, size, name):
    array = np.zeros(size) if values is None else np.asarray(values, dtype=float)
    array = array.reshape(-1)
    if array.shape[0] != size:
        raise DimensionError(f"{name} needs {size} entries, got {array.shape[0]}")
    if not np.all(np.isfinite(array)):
        raise DomainError(f"{name} has non-finite entries")
    return array


def thresholds_to_params(thresholds):
    thresholds = np.asarray(thresholds, dtype=float).reshape(-1)
    if thresholds.size == 0:
        return thresholds
    steps = np.diff(thresholds)
    if np.any(steps <= 0):
        raise DomainError("thresholds must be strictly increasing")
    return np.concatenate([thresholds[:1], np.log(steps)])


def params_to_thresholds(threshold_params):
    threshold_params = np.asarray(threshold_params, dtype=float)
    if threshold_params.size == 0:
        return threshold_params
    steps = np.exp(threshold_params[1:])
    return np.cumsum(np.concatenate([threshold_params[:1], steps]))


def default_thresholds(size):
    return np.arange(size, dtype=float)


def _labels(prefix, intercept, terms):
    labels = [f"{prefix}[{CONST}]"] if intercept else []
    return labels + [f"{prefix}[{t.column}]" for t in terms]


@dataclasses.dataclass(frozen=True, eq=False)
class ParamSet:
    spec: object
    beta: np.ndarray
    threshold_params: np.ndarray
    log_sigma2: float
    gamma: np.ndarray
    log_r: float
    omega: np.ndarray
    theta: np.ndarray

    @property
    def thresholds(self):
        return params_to_thresholds(self.threshold_params)

    @property
    def sigma2(self):
        return float(np.exp(self.log_sigma2))

    @property
    def r(self):
        return float(np.exp(self.log_r))

    @property
    def index_beta(self):
        """Coefficients of the index covariates (the constant excluded)."""
        return self.beta[int(self.spec.index_intercept):]

    @property
    def index_constant(self):
        return float(self.beta[0]) if self.spec.index_intercept else 0.0

    @classmethod
    def from_constrained(
        cls,
        spec,
        beta=None,
        thresholds=None,
        sigma2=1.0,
        r=1.0,
        gamma=None,
        omega=None,
        theta=None,
    ):
        if thresholds is None:
            thresholds = default_thresholds(spec.n_thresholds)
        thresholds = _vector(thresholds, spec.n_thresholds, "thresholds")
        if sigma2 <= 0 or r <= 0:
            raise DomainError("sigma2 and r must be positive")
        return cls(
            spec=spec,
            beta=_vector(beta, spec.n_beta, "beta"),
            threshold_params=thresholds_to_params(thresholds),
            log_sigma2=float(np.log(sigma2)) if spec.has_sigma2 else 0.0,
            gamma=_vector(gamma, spec.n_gamma, "gamma"),
            log_r=float(np.log(r)) if spec.has_r else 0.0,
            omega=_vector(omega, spec.n_omega, "omega"),
            theta=_vector(theta, spec.n_theta, "theta"),
        )

    @classmethod
    def from_vector(cls, spec, vector):
        vector = np.asarray(vector, dtype=float).reshape(-1)
        if vector.shape[0] != spec.parameter_count():
            raise DimensionError(
                f"parameter vector needs {spec.parameter_count()} entries, "
                f"got {vector.shape[0]}"
            )
        blocks = {}
        offset = 0
        for name, size in _layout(spec):
            blocks[name] = vector[offset:offset + size].copy()
            offset += size
        return cls(
            spec=spec,
            beta=blocks["beta"],
            threshold_params=blocks["thresholds"],
            log_sigma2=float(blocks["log_sigma2"][0]) if spec.has_sigma2 else 0.0,
            gamma=blocks["gamma"],
            log_r=float(blocks["log_r"][0]) if spec.has_r else 0.0,
            omega=blocks["omega"],
            theta=blocks["theta"],
        )

    @classmethod
    def from_dict(cls, spec, document, defaults=None):
        """Read constrained values; missing blocks come from ``defaults``."""
        base = defaults if defaults is not None else cls.from_constrained(spec)
        document = document or {}

        def pick(key, current):
            return document[key] if document.get(key) is not None else current

        if "log_sigma2" in document and "sigma2" not in document:
            document = dict(document, sigma2=float(np.exp(document["log_sigma2"])))
        if "log_r" in document and "r" not in document:
            document = dict(document, r=float(np.exp(document["log_r"])))
        return cls.from_constrained(
            spec,
            beta=pick("beta", base.beta),
            thresholds=pick("thresholds", base.thresholds),
            sigma2=pick("sigma2", base.sigma2),
            r=pick("r", base.r),
            gamma=pick("gamma", base.gamma),
            omega=pick("omega", base.omega),
            theta=pick("theta", base.theta),
        )

    def to_vector(self):
        parts = {
            "beta": self.beta,
            "thresholds": self.threshold_params,
            "log_sigma2": [self.log_sigma2],
            "gamma": self.gamma,
            "log_r": [self.log_r],
            "omega": self.omega,
            "theta": self.theta,
        }
        return _concat(parts, self.spec)

    def constrained_vector(self):
        parts = {
            "beta": self.beta,
            "thresholds": self.thresholds,
            "log_sigma2": [self.sigma2],
            "gamma": self.gamma,
            "log_r": [self.r],
            "omega": self.omega,
            "theta": self.theta,
        }
        return _concat(parts, self.spec)

    def constrained_jacobian(self):
        """d(constrained vector) / d(unconstrained vector)."""
        k = self.spec.parameter_count()
        jacobian = np.eye(k)
        offset = 0
        for name, size in _layout(self.spec):
            if name == "thresholds" and size:
                block = np.zeros((size, size))
                block[:, 0] = 1.0
                steps = np.exp(self.threshold_params[1:])
                for row in range(1, size):
                    block[row, 1:row + 1] = steps[:row]
                jacobian[offset:offset + size, offset:offset + size] = block
            elif name == "log_sigma2" and size:
                jacobian[offset, offset] = self.sigma2
            elif name == "log_r" and size:
                jacobian[offset, offset] = self.r
            offset += size
        return jacobian

    def to_dict(self):
        spec = self.spec
        document = {"beta": self.beta.tolist()}
        if spec.is_ordered:
            document["thresholds"] = self.thresholds.tolist()
            document["sigma2"] = self.sigma2
        if spec.is_split:
            document["gamma"] = self.gamma.tolist()
        if spec.has_r:
            document["r"] = self.r
        if spec.is_count:
            document["omega"] = self.omega.tolist()
            document["theta"] = self.theta.tolist()
        return document


def _layout(spec):
    return [
        ("beta", spec.n_beta),
        ("thresholds", spec.n_thresholds),
        ("log_sigma2", int(spec.has_sigma2)),
        ("gamma", spec.n_gamma),
        ("log_r", int(spec.has_r)),
        ("omega", spec.n_omega),
        ("theta", spec.n_theta),
    ]


def parameter_names(spec):
    """Labels of the unconstrained vector entries."""
    first = 1 if spec.family == OEV_GAMMA else 2
    names = _labels("beta", spec.index_intercept, spec.index_covariates)
    if spec.n_thresholds:
        names.append(f"delta[{first}]")
        names.extend(
            f"log_step[{k}]" for k in range(first + 1, first + spec.n_thresholds)
        )
    if spec.has_sigma2:
        names.append("log_sigma2")
    names.extend(_labels("gamma", spec.split_intercept, spec.split_covariates))
    if spec.has_r:
        names.append("log_r")
    names.extend(f"omega[{t.label}]" for t in spec.count_specific_terms)
    names.extend(_labels("theta", spec.rho_intercept, spec.rho_covariates))
    return names


def constrained_names(spec):
    names = []
    for name in parameter_names(spec):
        if name.startswith("log_step["):
            names.append(f"delta[{name[len('log_step['):-1]}]")
        elif name == "log_sigma2":
            names.append("sigma2")
        elif name == "log_r":
            names.append("r")
        else:
            names.append(name)
    return names


def _concat(parts, spec):
    blocks = [
        np.asarray(parts[name], dtype=float) for name, size in _layout(spec) if size
    ]
    return np.concatenate(blocks) if blocks else np.zeros(0)
