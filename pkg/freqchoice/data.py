"""Observations, datasets and CSV ingestion.

A Dataset keeps two views of its covariates: the raw source values, which
are what :func:`dump_dataset` writes, and the transformed values the model
functions consume. Both are read-only arrays.
"""
import dataclasses
import io
import math
import re
import types
import typing

import numpy as np
import pandas as pd

from freqchoice.errors import DomainError
from freqchoice.errors import ParseError
from freqchoice.errors import SchemaError
from freqchoice.spec import FREQ_COLUMN
from freqchoice.spec import IDENTITY
from freqchoice.spec import NATURAL_LOG


@dataclasses.dataclass(frozen=True)
class Observation:
    freq: int
    covariates: typing.Mapping[str, float]


def _readonly(array):
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclasses.dataclass(frozen=True, eq=False)
class Dataset:
    freq: np.ndarray
    values: np.ndarray
    raw: np.ndarray
    column_names: typing.Tuple[str, ...]
    top_code: int

    @property
    def n(self):
        return int(self.freq.shape[0])

    def __len__(self):
        return self.n

    def observation(self, row):
        covariates = dict(zip(self.column_names, (float(v) for v in self.values[row])))
        return Observation(int(self.freq[row]), types.MappingProxyType(covariates))

    def column(self, name):
        try:
            return self.values[:, self.column_names.index(name)]
        except ValueError:
            raise SchemaError(f'column "{name}" is not in the dataset')

    def take(self, rows):
        rows = np.asarray(rows, dtype=int)
        return Dataset(
            freq=_readonly(self.freq[rows]),
            values=_readonly(self.values[rows]),
            raw=_readonly(self.raw[rows]),
            column_names=self.column_names,
            top_code=self.top_code,
        )

    def concat(self, other):
        if other.column_names != self.column_names:
            raise SchemaError("datasets have different columns")
        return Dataset(
            freq=_readonly(np.concatenate([self.freq, other.freq])),
            values=_readonly(np.vstack([self.values, other.values])),
            raw=_readonly(np.vstack([self.raw, other.raw])),
            column_names=self.column_names,
            top_code=max(self.top_code, other.top_code),
        )

    def with_column(self, name, value):
        """Copy of the dataset with a transformed covariate set to ``value``."""
        values = np.array(self.values, copy=True)
        values[:, self.column_names.index(name)] = value
        return dataclasses.replace(self, values=_readonly(values))


def apply_transform(values, transform, column, first_row=1):
    values = np.asarray(values, dtype=float)
    if transform == IDENTITY:
        return values
    if transform == NATURAL_LOG:
        bad = np.flatnonzero(values <= 0)
        if bad.size:
            raise DomainError(
                f'natural_log of non-positive value {values[bad[0]]!r} in "{column}"',
                row=int(bad[0]) + first_row,
            )
        return np.log(values)
    raise DomainError(f'unknown transform "{transform}"')


def build_dataset(freq, raw, column_names, spec):
    """Validate frequencies, apply the spec transforms, freeze the arrays."""
    freq = np.asarray(freq, dtype=int).reshape(-1)
    raw = np.asarray(raw, dtype=float).reshape(freq.shape[0], len(column_names))
    out_of_range = np.flatnonzero((freq < 0) | (freq > spec.top_code))
    if out_of_range.size:
        row = int(out_of_range[0])
        raise DomainError(
            f"freq {freq[row]} is outside 0..{spec.top_code}", row=row + 1
        )
    nonfinite = np.argwhere(~np.isfinite(raw))
    if nonfinite.size:
        row, col = nonfinite[0]
        raise ParseError(
            f'missing or non-finite value in "{column_names[col]}"', row=int(row) + 1
        )
    transforms = spec.transforms()
    values = np.empty_like(raw)
    for j, name in enumerate(column_names):
        values[:, j] = apply_transform(raw[:, j], transforms.get(name, IDENTITY), name)
    return Dataset(
        freq=_readonly(freq),
        values=_readonly(values),
        raw=_readonly(raw),
        column_names=tuple(column_names),
        top_code=spec.top_code,
    )


def _parse_float(cell, column, row):
    try:
        value = float(cell)
    except (TypeError, ValueError):
        raise ParseError(f'non-numeric value "{cell}" in "{column}"', row=row)
    if not math.isfinite(value):
        raise ParseError(f'missing or non-finite value "{cell}" in "{column}"', row=row)
    return value


def _parse_freq(cell, row):
    try:
        return int(cell)
    except (TypeError, ValueError):
        try:
            value = float(cell)
        except (TypeError, ValueError):
            value = math.nan
        if math.isfinite(value) and value == int(value):
            return int(value)
        raise ParseError(f'non-integer frequency "{cell}"', row=row)


def load_dataset(source, spec):
    """Read an RFC-4180 CSV stream (bytes or text) into a Dataset.

    Only the ``freq`` column and the columns the spec references are kept.
    Rows are numbered from 1 (the first data row) in error messages.
    """
    if isinstance(source, str):
        source = source.encode("utf-8")
    if isinstance(source, bytes):
        source = io.BytesIO(source)
    try:
        frame = pd.read_csv(
            source, dtype=str, keep_default_na=False, encoding="utf-8"
        )
    except pd.errors.EmptyDataError:
        raise SchemaError("CSV has no header row")
    except pd.errors.ParserError as exc:
        # pandas counts file lines from 1 with the header on line 1
        line = re.search(r"\bline (\d+)", str(exc))
        row = int(line.group(1)) - 1 if line else None
        raise ParseError(f"malformed CSV: {str(exc).strip()}", row=row)
    except UnicodeDecodeError as exc:
        raise ParseError(f"CSV is not valid UTF-8: {exc.reason}")
    frame.columns = [str(c).strip() for c in frame.columns]

    if FREQ_COLUMN not in frame.columns:
        raise SchemaError(f'missing column "{FREQ_COLUMN}"')
    wanted = spec.columns()
    for column in wanted:
        if column not in frame.columns:
            raise SchemaError(f'missing column "{column}"')
    column_names = [c for c in frame.columns if c in set(wanted)]

    freq = np.array(
        [_parse_freq(cell, i + 1) for i, cell in enumerate(frame[FREQ_COLUMN])],
        dtype=int,
    )
    raw = np.empty((len(frame), len(column_names)))
    for j, column in enumerate(column_names):
        raw[:, j] = [
            _parse_float(cell, column, i + 1) for i, cell in enumerate(frame[column])
        ]
    return build_dataset(freq, raw, column_names, spec)


def dump_dataset(dataset, stream):
    """Write the raw columns as CSV; floats use shortest round-trip repr."""
    frame = pd.DataFrame(
        {
            name: [repr(float(v)) for v in dataset.raw[:, j]]
            for j, name in enumerate(dataset.column_names)
        }
    )
    frame.insert(0, FREQ_COLUMN, [str(int(f)) for f in dataset.freq])
    frame.to_csv(stream, index=False, lineterminator="\n")
