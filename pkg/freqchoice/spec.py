"""Model specifications: which columns enter which model function.

A :class:`ModelSpec` is immutable. :func:`validate_spec` checks the family
rules and attaches the free-parameter count ``n_params``; the unconstrained
vector used by the estimator always has exactly that many entries.
"""
import dataclasses
import typing

from freqchoice.errors import SpecError

OEV_GAMMA = "oev_gamma"
SPLIT_OEV_GAMMA = "split_oev_gamma"
NB_OGEV = "nb_ogev"
POISSON_OGEV = "poisson_ogev"

FAMILIES = (OEV_GAMMA, SPLIT_OEV_GAMMA, NB_OGEV, POISSON_OGEV)
ORDERED_FAMILIES = (OEV_GAMMA, SPLIT_OEV_GAMMA)
COUNT_FAMILIES = (NB_OGEV, POISSON_OGEV)

IDENTITY = "identity"
NATURAL_LOG = "natural_log"
TRANSFORMS = (IDENTITY, NATURAL_LOG)

DEFAULT_TOP_CODE = 6
FREQ_COLUMN = "freq"


class CovariateTerm(typing.NamedTuple):
    column: str
    transform: str = IDENTITY


class CountTerm(typing.NamedTuple):
    """A count-specific utility term. ``column=None`` is a constant."""

    count: int
    column: typing.Optional[str]
    transform: str = IDENTITY

    @property
    def is_constant(self):
        return self.column is None

    @property
    def label(self):
        return f"{self.count}:{'const' if self.column is None else self.column}"


@dataclasses.dataclass(frozen=True)
class ModelSpec:
    family: str
    top_code: int = DEFAULT_TOP_CODE
    index_covariates: typing.Tuple[CovariateTerm, ...] = ()
    index_intercept: bool = False
    split_covariates: typing.Tuple[CovariateTerm, ...] = ()
    split_intercept: bool = False
    count_specific_terms: typing.Tuple[CountTerm, ...] = ()
    rho_covariates: typing.Tuple[CovariateTerm, ...] = ()
    rho_intercept: bool = False
    null_model: bool = False
    n_params: typing.Optional[int] = dataclasses.field(default=None, compare=False)

    @property
    def is_ordered(self):
        return self.family in ORDERED_FAMILIES

    @property
    def is_split(self):
        return self.family == SPLIT_OEV_GAMMA

    @property
    def is_count(self):
        return self.family in COUNT_FAMILIES

    @property
    def n_categories(self):
        return self.top_code + 1

    @property
    def n_thresholds(self):
        if self.family == OEV_GAMMA:
            return self.top_code
        if self.family == SPLIT_OEV_GAMMA:
            return self.top_code - 1
        return 0

    @property
    def n_beta(self):
        return len(self.index_covariates) + int(self.index_intercept)

    @property
    def n_gamma(self):
        return len(self.split_covariates) + int(self.split_intercept)

    @property
    def n_omega(self):
        return len(self.count_specific_terms)

    @property
    def n_theta(self):
        return len(self.rho_covariates) + int(self.rho_intercept)

    @property
    def has_sigma2(self):
        return self.is_ordered

    @property
    def has_r(self):
        return self.family == NB_OGEV

    def parameter_count(self):
        return (
            self.n_beta
            + self.n_thresholds
            + int(self.has_sigma2)
            + self.n_gamma
            + int(self.has_r)
            + self.n_omega
            + self.n_theta
        )

    def terms(self):
        """Every column term in the spec, in parameter order."""
        yield from self.index_covariates
        yield from self.split_covariates
        for term in self.count_specific_terms:
            if not term.is_constant:
                yield CovariateTerm(term.column, term.transform)
        yield from self.rho_covariates

    def transforms(self):
        """Map of column name to its ingestion transform."""
        return {term.column: term.transform for term in self.terms()}

    def columns(self):
        return list(self.transforms())


def _covariate_terms(entries, field):
    terms = []
    for entry in entries or ():
        if isinstance(entry, str):
            terms.append(CovariateTerm(entry))
        elif isinstance(entry, dict):
            if "column" not in entry:
                raise SpecError(f'every entry of "{field}" needs a "column"')
            terms.append(
                CovariateTerm(entry["column"], entry.get("transform") or IDENTITY)
            )
        elif isinstance(entry, (list, tuple)) and len(entry) in (1, 2):
            terms.append(CovariateTerm(*entry))
        else:
            raise SpecError(f'cannot read entry {entry!r} of "{field}"')
    return tuple(terms)


def _count_terms(entries):
    terms = []
    for entry in entries or ():
        if isinstance(entry, dict):
            if "count" not in entry:
                raise SpecError('every count-specific term needs a "count"')
            terms.append(
                CountTerm(
                    entry["count"],
                    entry.get("column"),
                    entry.get("transform") or IDENTITY,
                )
            )
        elif isinstance(entry, (list, tuple)) and len(entry) in (2, 3):
            terms.append(CountTerm(*entry))
        else:
            raise SpecError(f"cannot read count-specific term {entry!r}")
    return tuple(terms)


def spec_from_dict(document):
    """Build a ModelSpec from its JSON form (not yet validated)."""
    if not isinstance(document, dict):
        raise SpecError("model spec must be a JSON object")
    known = {
        "family",
        "top_code",
        "index_covariates",
        "index_intercept",
        "split_covariates",
        "split_intercept",
        "count_specific_terms",
        "rho_covariates",
        "rho_intercept",
        "null_model",
    }
    unknown = sorted(set(document) - known)
    if unknown:
        raise SpecError(f'unknown fields {", ".join(unknown)}')
    if "family" not in document:
        raise SpecError('missing "family"')
    return ModelSpec(
        family=document["family"],
        top_code=document.get("top_code", DEFAULT_TOP_CODE),
        index_covariates=_covariate_terms(
            document.get("index_covariates"), "index_covariates"
        ),
        index_intercept=bool(document.get("index_intercept", False)),
        split_covariates=_covariate_terms(
            document.get("split_covariates"), "split_covariates"
        ),
        split_intercept=bool(document.get("split_intercept", False)),
        count_specific_terms=_count_terms(document.get("count_specific_terms")),
        rho_covariates=_covariate_terms(
            document.get("rho_covariates"), "rho_covariates"
        ),
        rho_intercept=bool(document.get("rho_intercept", False)),
        null_model=bool(document.get("null_model", False)),
    )


def spec_to_dict(spec):
    document = {
        "family": spec.family,
        "top_code": spec.top_code,
        "index_covariates": [t._asdict() for t in spec.index_covariates],
    }
    if spec.is_count:
        document["index_intercept"] = spec.index_intercept
        document["count_specific_terms"] = [
            t._asdict() for t in spec.count_specific_terms
        ]
        document["rho_covariates"] = [t._asdict() for t in spec.rho_covariates]
        document["rho_intercept"] = spec.rho_intercept
    if spec.is_split:
        document["split_covariates"] = [t._asdict() for t in spec.split_covariates]
        document["split_intercept"] = spec.split_intercept
    if spec.null_model:
        document["null_model"] = True
    return document


def load_spec(document):
    return validate_spec(spec_from_dict(document))


def _is_identified(spec):
    """Count-level constants must not span the all-ones utility direction.

    The OGEV kernel is invariant to adding a constant to every utility. With
    F the levels carrying no constant, that direction is reachable when F is
    empty, or when the mean-index constant (which adds y * beta_0) is present
    and F is a single positive level.
    """
    constant_levels = {t.count for t in spec.count_specific_terms if t.is_constant}
    free = set(range(spec.top_code + 1)) - constant_levels
    if not free:
        return False
    if spec.index_intercept and len(free) == 1 and free != {0}:
        return False
    return True


def _check_terms(terms, field):
    seen = set()
    for term in terms:
        if not isinstance(term.column, str) or not term.column:
            raise SpecError(f'"{field}" has an entry without a column name')
        if term.column == FREQ_COLUMN:
            raise SpecError(f'"{FREQ_COLUMN}" cannot be used as a covariate')
        if term.transform not in TRANSFORMS:
            raise SpecError(
                f'unknown transform "{term.transform}" for column "{term.column}"'
            )
        if term.column in seen:
            raise SpecError(f'column "{term.column}" appears twice in "{field}"')
        seen.add(term.column)


def validate_spec(spec):
    """Check a ModelSpec and return it with ``n_params`` attached."""
    if spec.family not in FAMILIES:
        raise SpecError(
            f'unknown family "{spec.family}", expected one of {", ".join(FAMILIES)}'
        )
    if (
        not isinstance(spec.top_code, int)
        or isinstance(spec.top_code, bool)
        or spec.top_code < 1
    ):
        raise SpecError(f"top_code must be an integer >= 1, got {spec.top_code!r}")
    if not spec.index_covariates and not spec.null_model:
        raise SpecError("index_covariates must not be empty")

    if not spec.is_split and (spec.split_covariates or spec.split_intercept):
        raise SpecError(f'split_covariates are not valid for family "{spec.family}"')
    if not spec.is_count:
        if spec.count_specific_terms:
            raise SpecError(
                f'count_specific_terms are not valid for family "{spec.family}"'
            )
        if spec.rho_covariates or spec.rho_intercept:
            raise SpecError(f'rho_covariates are not valid for family "{spec.family}"')
        if spec.index_intercept:
            raise SpecError(
                "index_intercept is not valid for ordered families; "
                "the thresholds absorb the constant"
            )
    if spec.is_split and spec.top_code < 2:
        raise SpecError("split_oev_gamma needs top_code >= 2")

    _check_terms(spec.index_covariates, "index_covariates")
    _check_terms(spec.split_covariates, "split_covariates")
    _check_terms(spec.rho_covariates, "rho_covariates")

    seen = set()
    for term in spec.count_specific_terms:
        if (
            not isinstance(term.count, int)
            or isinstance(term.count, bool)
            or not 0 <= term.count <= spec.top_code
        ):
            raise SpecError(
                f"count-specific term level {term.count!r} "
                f"is outside 0..{spec.top_code}"
            )
        if not term.is_constant:
            _check_terms(
                [CovariateTerm(term.column, term.transform)], "count_specific_terms"
            )
        if (term.count, term.column) in seen:
            raise SpecError(f"count-specific term {term.label} appears twice")
        seen.add((term.count, term.column))
    if spec.is_count and not _is_identified(spec):
        raise SpecError(
            "count_specific_terms leave no count level without a free constant; "
            "the model is not identified"
        )

    transforms = {}
    for term in spec.terms():
        previous = transforms.setdefault(term.column, term.transform)
        if previous != term.transform:
            raise SpecError(
                f'column "{term.column}" is used with both "{previous}" and '
                f'"{term.transform}" transforms'
            )

    return dataclasses.replace(spec, n_params=spec.parameter_count())


def null_spec(spec):
    """The constants-only model of the same family."""
    if spec.is_ordered:
        null = dataclasses.replace(
            spec,
            index_covariates=(),
            split_covariates=(),
            split_intercept=spec.is_split,
            null_model=True,
        )
    else:
        null = dataclasses.replace(
            spec,
            index_covariates=(),
            index_intercept=True,
            count_specific_terms=tuple(
                t for t in spec.count_specific_terms if t.is_constant
            ),
            rho_covariates=(),
            null_model=True,
        )
        if not _is_identified(null):
            null = dataclasses.replace(null, index_intercept=False)
    return validate_spec(null)
