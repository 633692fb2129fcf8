import dataclasses
import math
import typing

import pandas as pd

from freqchoice.errors import ComparisonError

COLUMNS = [
    "rank",
    "label",
    "family",
    "n",
    "k",
    "ll_convergence",
    "ll_null",
    "aic",
    "bic",
    "rho_squared",
    "best_aic",
    "best_bic",
    "best_rho_squared",
    "aic_tie",
]


@dataclasses.dataclass(frozen=True)
class ComparisonRow:
    rank: int
    label: str
    family: str
    n: int
    k: int
    ll_convergence: float
    ll_null: float
    aic: float
    bic: float
    rho_squared: float
    best_aic: bool = False
    best_bic: bool = False
    best_rho_squared: bool = False
    aic_tie: bool = False


@dataclasses.dataclass(frozen=True)
class ComparisonTable:
    rows: typing.Tuple[ComparisonRow, ...]

    @property
    def winner(self):
        return self.rows[0]

    def frame(self):
        return pd.DataFrame(
            [dataclasses.asdict(row) for row in self.rows], columns=COLUMNS
        )

    def write_csv(self, stream):
        self.frame().to_csv(
            stream, index=False, lineterminator="\n", float_format="%.17g"
        )


def _first_best(values, better):
    best = None
    for index, value in enumerate(values):
        if math.isnan(value):
            continue
        if best is None or better(value, values[best]):
            best = index
    return best


def run_compare(fits, labels=None):
    """Rank fits by AIC (stable), flagging the AIC, BIC and rho-squared winners."""
    fits = list(fits)
    if len(fits) < 2:
        raise ComparisonError("at least two fits are needed")
    sizes = sorted({fit.n for fit in fits})
    if len(sizes) > 1:
        raise ComparisonError(
            f'fits use different numbers of observations: {", ".join(map(str, sizes))}'
        )
    labels = list(labels) if labels is not None else [f.spec.family for f in fits]
    if len(labels) != len(fits):
        raise ComparisonError("one label per fit is needed")

    order = sorted(range(len(fits)), key=lambda i: fits[i].stats.aic)
    ranked = [fits[i] for i in order]
    aics = [fit.stats.aic for fit in ranked]
    best_aic = _first_best(aics, lambda a, b: a < b)
    best_bic = _first_best([f.stats.bic for f in ranked], lambda a, b: a < b)
    best_rho = _first_best(
        [f.stats.rho_squared for f in ranked], lambda a, b: a > b
    )

    rows = []
    for position, (index, fit) in enumerate(zip(order, ranked)):
        rows.append(
            ComparisonRow(
                rank=position + 1,
                label=labels[index],
                family=fit.spec.family,
                n=fit.n,
                k=fit.k,
                ll_convergence=fit.ll_convergence,
                ll_null=fit.ll_null,
                aic=fit.stats.aic,
                bic=fit.stats.bic,
                rho_squared=fit.stats.rho_squared,
                best_aic=position == best_aic,
                best_bic=position == best_bic,
                best_rho_squared=position == best_rho,
                aic_tie=aics.count(fit.stats.aic) > 1,
            )
        )
    return ComparisonTable(tuple(rows))
