"""Right-censored survival data: containers, validation, risk sets, CSV I/O.

Conventions used throughout the package:

* observation (row) indices are 0-based,
* covariate indices are 1-based (``1..p``), matching the usual "variable j"
  language of screening output,
* at tied follow-up times, events sort before censorings.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CSVParseError, ValidationError


@dataclass(frozen=True)
class Observation:
    """A single subject: follow-up time, event indicator and covariate row."""

    time: float
    status: int
    covariates: np.ndarray

    def __post_init__(self):
        if not math.isfinite(self.time) or self.time < 0:
            raise ValidationError(f"time must be finite and >= 0, got {self.time}")
        if self.status not in (0, 1):
            raise ValidationError(f"status must be 0 or 1, got {self.status}")
        if not np.all(np.isfinite(self.covariates)):
            raise ValidationError("covariates contain non-finite values")


class SurvivalDataset:
    """Immutable container for n right-censored observations on p covariates."""

    def __init__(self, time, status, covariates, covariate_names=None):
        time = np.asarray(time, dtype=float)
        status_arr = np.asarray(status, dtype=float)
        covariates = np.asarray(covariates, dtype=float)
        if covariates.ndim != 2:
            raise ValidationError("covariates must be a 2-d array (n rows, p columns)")
        n, p = covariates.shape
        if n < 2:
            raise ValidationError(f"need at least 2 observations, got {n}")
        if p < 1:
            raise ValidationError("need at least 1 covariate column")
        if time.shape != (n,) or status_arr.shape != (n,):
            raise ValidationError("time/status length does not match covariate rows")
        if not np.all(np.isfinite(time)) or np.any(time < 0):
            bad = int(np.argmax(~np.isfinite(time) | (time < 0)))
            raise ValidationError(f"time at row {bad} must be finite and >= 0")
        if not np.all(np.isin(status_arr, (0.0, 1.0))):
            bad = int(np.argmax(~np.isin(status_arr, (0.0, 1.0))))
            raise ValidationError(f"status at row {bad} must be 0 or 1, got {status_arr[bad]}")
        if not np.all(np.isfinite(covariates)):
            r, c = np.argwhere(~np.isfinite(covariates))[0]
            raise ValidationError(f"non-finite covariate at row {r}, column {c + 1}")
        if covariate_names is None:
            covariate_names = [f"z{j}" for j in range(1, p + 1)]
        covariate_names = list(covariate_names)
        if len(covariate_names) != p:
            raise ValidationError("covariate_names length does not match p")

        self.time = time
        self.status = status_arr.astype(np.int8)
        self.covariates = covariates
        self.covariate_names = covariate_names
        for a in (self.time, self.status, self.covariates):
            a.setflags(write=False)
        # ascending time; events (status 1) before censorings at ties
        self.sorted_index = np.lexsort((1 - self.status, self.time))
        self.sorted_index.setflags(write=False)
        self._sorted_cache = None

    @property
    def n(self):
        return self.time.shape[0]

    @property
    def p(self):
        return self.covariates.shape[1]

    def observation(self, i):
        return Observation(float(self.time[i]), int(self.status[i]), self.covariates[i])

    def column(self, j):
        """Covariate column by 1-based index j."""
        if not 1 <= j <= self.p:
            raise ValidationError(f"covariate index {j} out of range [1, {self.p}]")
        return self.covariates[:, j - 1]

    def __eq__(self, other):
        if not isinstance(other, SurvivalDataset):
            return NotImplemented
        return (
            np.array_equal(self.time, other.time)
            and np.array_equal(self.status, other.status)
            and np.array_equal(self.covariates, other.covariates)
            and self.covariate_names == other.covariate_names
        )


@dataclass(frozen=True)
class ConditioningSet:
    """Ordered set of 1-based covariate indices conditioned on during screening."""

    indices: tuple = ()

    def __post_init__(self):
        idx = tuple(int(j) for j in self.indices)
        if len(set(idx)) != len(idx):
            raise ValidationError(f"conditioning indices must be distinct: {idx}")
        if any(j < 1 for j in idx):
            raise ValidationError("conditioning indices are 1-based and must be >= 1")
        object.__setattr__(self, "indices", idx)

    @property
    def q(self):
        return len(self.indices)

    def check_against(self, dataset: SurvivalDataset):
        for j in self.indices:
            if j > dataset.p:
                raise ValidationError(f"conditioning index {j} exceeds p={dataset.p}")
        if self.q >= dataset.n:
            raise ValidationError(f"conditioning set size {self.q} must be < n={dataset.n}")

    def complement(self, p):
        return [j for j in range(1, p + 1) if j not in set(self.indices)]


@dataclass(frozen=True)
class RiskSetView:
    """Distinct event times, tie multiplicities and the at-risk sets at each."""

    event_times: np.ndarray
    event_counts: np.ndarray
    risk_membership: list  # one 0-based observation-index array per event time


@dataclass(frozen=True)
class ValidationReport:
    n: int
    p: int
    events: int
    censored: int
    constant_columns: list = field(default_factory=list)  # 1-based
    duplicate_times: int = 0


@dataclass(frozen=True)
class ScalingInfo:
    means: np.ndarray
    scales: np.ndarray


def validate(dataset: SurvivalDataset) -> ValidationReport:
    """Summarize a dataset and reject degenerate inputs (no events)."""
    events = int(np.sum(dataset.status))
    if events == 0:
        raise ValidationError("no events: all observations are censored")
    col_range = dataset.covariates.max(axis=0) - dataset.covariates.min(axis=0)
    constant = [int(j) + 1 for j in np.nonzero(col_range == 0.0)[0]]
    uniq, counts = np.unique(dataset.time, return_counts=True)
    return ValidationReport(
        n=dataset.n,
        p=dataset.p,
        events=events,
        censored=dataset.n - events,
        constant_columns=constant,
        duplicate_times=int(np.sum(counts > 1)),
    )


def build_risk_sets(dataset: SurvivalDataset) -> RiskSetView:
    """Risk sets {i : X_i >= t} at each distinct event time t."""
    event_mask = dataset.status == 1
    event_times = np.unique(dataset.time[event_mask])
    counts = np.array(
        [int(np.sum(event_mask & (dataset.time == t))) for t in event_times], dtype=int
    )
    membership = [np.nonzero(dataset.time >= t)[0] for t in event_times]
    return RiskSetView(event_times=event_times, event_counts=counts, risk_membership=membership)


def standardize(dataset: SurvivalDataset):
    """Center each covariate column to mean 0 and scale to sample variance 1 (n-1)."""
    means = dataset.covariates.mean(axis=0)
    scales = dataset.covariates.std(axis=0, ddof=1)
    zero = np.nonzero(scales == 0.0)[0]
    if zero.size:
        name = dataset.covariate_names[zero[0]]
        raise ValidationError(f"constant column cannot be standardized: {name}")
    z = (dataset.covariates - means) / scales
    out = SurvivalDataset(dataset.time, dataset.status, z, dataset.covariate_names)
    return out, ScalingInfo(means=means, scales=scales)


@dataclass(frozen=True)
class ColumnSchema:
    time_col: str = "time"
    status_col: str = "status"
    covariate_cols: list | None = None  # None means "all remaining columns"


def _parse_cell(text, row, col_name):
    try:
        value = float(text)
    except ValueError:
        raise CSVParseError(f"row {row}, column '{col_name}': cannot parse '{text}'") from None
    if not math.isfinite(value):
        raise CSVParseError(f"row {row}, column '{col_name}': non-finite value '{text}'")
    return value


def read_csv(path, schema: ColumnSchema = ColumnSchema()) -> SurvivalDataset:
    """Load a dataset from a comma-separated UTF-8 file with a header row."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CSVParseError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        for required in (schema.time_col, schema.status_col):
            if required not in header:
                raise CSVParseError(f"{path}: missing required column '{required}'")
        if schema.covariate_cols is None:
            cov_names = [h for h in header if h not in (schema.time_col, schema.status_col)]
        else:
            cov_names = list(schema.covariate_cols)
            for name in cov_names:
                if name not in header:
                    raise CSVParseError(f"{path}: missing covariate column '{name}'")
        if not cov_names:
            raise CSVParseError(f"{path}: no covariate columns")
        pos = {name: header.index(name) for name in header}

        times, statuses, rows = [], [], []
        for row_num, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise CSVParseError(f"{path}: row {row_num} has {len(row)} cells, expected {len(header)}")
            times.append(_parse_cell(row[pos[schema.time_col]], row_num, schema.time_col))
            statuses.append(_parse_cell(row[pos[schema.status_col]], row_num, schema.status_col))
            rows.append([_parse_cell(row[pos[name]], row_num, name) for name in cov_names])

    if len(rows) < 2:
        raise ValidationError(f"{path}: need at least 2 data rows, got {len(rows)}")
    return SurvivalDataset(times, statuses, np.array(rows, dtype=float), cov_names)


def write_csv(dataset: SurvivalDataset, path, schema: ColumnSchema = ColumnSchema()):
    """Write a dataset; floats use repr so read_csv round-trips values exactly."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([schema.time_col, schema.status_col, *dataset.covariate_names])
        for i in range(dataset.n):
            writer.writerow(
                [repr(float(dataset.time[i])), int(dataset.status[i])]
                + [repr(float(v)) for v in dataset.covariates[i]]
            )
