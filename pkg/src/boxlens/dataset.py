"""CSV ingestion, feature typing, mean/mode imputation, and sweep grids.

The :class:`Dataset` produced here is the immutable table every other module
reads: an N x F float matrix with per-cell missing flags, binary outcome
labels, and per-feature metadata (kind, observed range, declared feasible
values, grid size). Missing markers are the empty string and the literal
``"NA"`` only; no locale guessing.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

NUMERIC = "numeric"
BINARY = "binary"

MISSING_MARKERS = ("", "NA")

DEFAULT_GRID_SIZE = 25


class IngestionError(ValueError):
    """A CSV file or schema violates the input contract."""


@dataclass(frozen=True)
class Feasible:
    """Declared allowed values for a feature: an interval or an explicit list.

    In schema files, a two-element ascending list is read as an interval
    ``[lo, hi]``; any other length is read as an explicit value list.
    """

    lo: float | None = None
    hi: float | None = None
    values: tuple[float, ...] | None = None

    @classmethod
    def interval(cls, lo: float, hi: float) -> "Feasible":
        lo, hi = float(lo), float(hi)
        if not (np.isfinite(lo) and np.isfinite(hi)) or lo > hi:
            raise ValueError(f"feasible interval must be finite and ascending, got [{lo}, {hi}]")
        return cls(lo=lo, hi=hi)

    @classmethod
    def of_values(cls, values: Sequence[float]) -> "Feasible":
        vals = sorted({float(v) for v in values})
        if not vals or not all(np.isfinite(v) for v in vals):
            raise ValueError("feasible value list must be non-empty and finite")
        return cls(values=tuple(vals))

    @classmethod
    def from_schema(cls, raw: Sequence[float]) -> "Feasible":
        if not isinstance(raw, (list, tuple)) or not raw:
            raise IngestionError(f"feasible declaration must be a non-empty list, got {raw!r}")
        if len(raw) == 2:
            return cls.interval(raw[0], raw[1])
        return cls.of_values(raw)

    def contains(self, value: float) -> bool:
        if self.values is not None:
            return float(value) in self.values
        # tolerate linspace rounding at interval boundaries
        eps = 1e-9 * max(1.0, abs(self.lo), abs(self.hi))
        return self.lo - eps <= value <= self.hi + eps

    def to_schema(self) -> list[float]:
        if self.values is not None:
            return list(self.values)
        return [self.lo, self.hi]


@dataclass(frozen=True)
class FeatureMeta:
    """Per-feature metadata: column kind, observed range, and sweep grid size."""

    name: str
    index: int
    kind: str
    observed_min: float | None = None
    observed_max: float | None = None
    feasible: Feasible | None = None
    grid_size: int = DEFAULT_GRID_SIZE

    def __post_init__(self) -> None:
        if self.kind not in (NUMERIC, BINARY):
            raise ValueError(f"unknown feature kind {self.kind!r}")
        if self.grid_size < 1:
            raise ValueError("grid_size must be positive")
        if (
            self.observed_min is not None
            and self.observed_max is not None
            and self.observed_min > self.observed_max
        ):
            raise ValueError(f"feature {self.name!r}: observed_min > observed_max")


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable table of rows, missing flags, labels, and feature metadata.

    All arrays are locked read-only after construction; transformations
    return new instances. ``imputed_value`` is ``None`` until
    :func:`impute_missing` runs, then maps feature index -> fill value for
    every feature that ever had a missing cell.
    """

    rows: np.ndarray
    missing: np.ndarray
    labels: np.ndarray
    features: tuple[FeatureMeta, ...]
    imputed_value: Mapping[int, float] | None = None

    def __post_init__(self) -> None:
        rows = np.ascontiguousarray(self.rows, dtype=np.float64)
        missing = np.ascontiguousarray(self.missing, dtype=bool)
        labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        if rows.ndim != 2 or rows.shape[0] < 1 or rows.shape[1] < 1:
            raise ValueError("rows must be a non-empty N x F matrix")
        if missing.shape != rows.shape:
            raise ValueError("missing flags must match the row matrix shape")
        if labels.shape != (rows.shape[0],):
            raise ValueError("labels must have one entry per row")
        if not np.isin(labels, (0, 1)).all():
            raise ValueError("labels must be 0 or 1")
        if len(self.features) != rows.shape[1]:
            raise ValueError("need one FeatureMeta per column")
        for arr in (rows, missing, labels):
            arr.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "missing", missing)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "features", tuple(self.features))

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]

    @property
    def n_features(self) -> int:
        return self.rows.shape[1]

    @property
    def has_missing(self) -> bool:
        return bool(self.missing.any())

    def feature_named(self, name: str) -> FeatureMeta:
        for meta in self.features:
            if meta.name == name:
                return meta
        raise ValueError(f"unknown feature {name!r}")

    def fingerprint(self) -> str:
        """SHA-256 over rows, missing flags, and labels; detects any mutation."""
        digest = hashlib.sha256()
        digest.update(self.rows.tobytes())
        digest.update(self.missing.tobytes())
        digest.update(self.labels.tobytes())
        return digest.hexdigest()

    @classmethod
    def from_arrays(
        cls,
        rows: np.ndarray,
        labels: Sequence[int],
        kinds: Sequence[str] | None = None,
        names: Sequence[str] | None = None,
        missing: np.ndarray | None = None,
        feasible: Mapping[str, Feasible] | None = None,
        grid_size: int = DEFAULT_GRID_SIZE,
    ) -> "Dataset":
        """Build a Dataset from in-memory arrays (tests, synthetic fixtures)."""
        rows = np.asarray(rows, dtype=np.float64)
        if rows.ndim != 2:
            raise ValueError("rows must be 2-D")
        n, f = rows.shape
        if missing is None:
            missing = np.zeros((n, f), dtype=bool)
        if kinds is None:
            kinds = [NUMERIC] * f
        if names is None:
            names = [f"x{i}" for i in range(f)]
        feasible = feasible or {}
        metas = []
        for i in range(f):
            metas.append(
                _make_meta(
                    str(names[i]),
                    i,
                    kinds[i],
                    rows[:, i],
                    np.asarray(missing)[:, i],
                    feasible.get(str(names[i])),
                    grid_size,
                )
            )
        return cls(rows=rows, missing=missing, labels=np.asarray(labels), features=tuple(metas))


def _make_meta(
    name: str,
    index: int,
    kind: str,
    column: np.ndarray,
    col_missing: np.ndarray,
    feasible: Feasible | None,
    grid_size: int,
) -> FeatureMeta:
    observed = column[~col_missing]
    if kind == BINARY:
        bad = observed[~np.isin(observed, (0.0, 1.0))]
        if bad.size:
            row = int(np.where(~col_missing & ~np.isin(column, (0.0, 1.0)))[0][0])
            raise IngestionError(
                f"binary column {name!r} holds {bad[0]!r} at data row {row}; only 0 and 1 are allowed"
            )
        if feasible is not None and feasible.values is not None:
            if not set(feasible.values) <= {0.0, 1.0}:
                raise IngestionError(f"feasible values for binary column {name!r} must be within {{0, 1}}")
    lo = float(observed.min()) if observed.size else None
    hi = float(observed.max()) if observed.size else None
    return FeatureMeta(
        name=name,
        index=index,
        kind=kind,
        observed_min=lo,
        observed_max=hi,
        feasible=feasible,
        grid_size=grid_size,
    )


def load_schema(path: str) -> dict:
    """Read a schema file: JSON mapping column name -> {"kind", optional "feasible"}."""
    with open(path, "r", encoding="utf-8") as fh:
        schema = json.load(fh)
    if not isinstance(schema, dict):
        raise IngestionError(f"schema file {path} must hold a JSON object")
    return schema


def load_csv(
    path: str,
    schema: Mapping[str, Mapping],
    label_column: str,
    grid_size: int = DEFAULT_GRID_SIZE,
) -> Dataset:
    """Ingest a comma-separated UTF-8 file with a header row.

    Feature order follows the header minus the label column. Cells equal to
    ``""`` or ``"NA"`` are flagged missing; anything else must parse as a
    number. Binary columns admit only 0 and 1; the label column must be 0 or
    1 in every row.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestionError(f"{path}: empty file, expected a header row") from None
        if label_column not in header:
            raise IngestionError(f"{path}: label column {label_column!r} not in header {header}")
        feature_names = [h for h in header if h != label_column]
        if not feature_names:
            raise IngestionError(f"{path}: no feature columns besides the label")
        for name in feature_names:
            if name not in schema:
                raise IngestionError(f"{path}: column {name!r} missing from schema")
        for name in schema:
            if name not in feature_names and name != label_column:
                raise IngestionError(f"schema declares unknown column {name!r}")
        label_pos = header.index(label_column)
        positions = [header.index(n) for n in feature_names]
        kinds = []
        feasibles = []
        for name in feature_names:
            entry = schema[name]
            kind = entry.get("kind")
            if kind not in (NUMERIC, BINARY):
                raise IngestionError(f"schema for {name!r}: kind must be 'numeric' or 'binary', got {kind!r}")
            kinds.append(kind)
            feasibles.append(
                Feasible.from_schema(entry["feasible"]) if "feasible" in entry else None
            )

        data: list[list[float]] = []
        miss: list[list[bool]] = []
        labels: list[int] = []
        for line_no, record in enumerate(reader, start=2):
            if len(record) != len(header):
                raise IngestionError(
                    f"{path}: row at line {line_no} has {len(record)} cells, expected {len(header)}"
                )
            label_cell = record[label_pos]
            if label_cell in MISSING_MARKERS:
                raise IngestionError(f"{path}: missing label at line {line_no}")
            try:
                label_val = float(label_cell)
            except ValueError:
                raise IngestionError(
                    f"{path}: label {label_cell!r} at line {line_no} is not a number"
                ) from None
            if label_val not in (0.0, 1.0):
                raise IngestionError(f"{path}: label {label_cell!r} at line {line_no} is not 0 or 1")
            labels.append(int(label_val))

            row_vals: list[float] = []
            row_miss: list[bool] = []
            for name, kind, pos in zip(feature_names, kinds, positions):
                cell = record[pos]
                if cell in MISSING_MARKERS:
                    row_vals.append(np.nan)
                    row_miss.append(True)
                    continue
                try:
                    value = float(cell)
                except ValueError:
                    raise IngestionError(
                        f"{path}: cell {cell!r} in column {name!r} at line {line_no} is not a number"
                    ) from None
                if kind == BINARY and value not in (0.0, 1.0):
                    raise IngestionError(
                        f"{path}: binary column {name!r} holds {cell!r} at line {line_no}"
                    )
                row_vals.append(value)
                row_miss.append(False)
            data.append(row_vals)
            miss.append(row_miss)

    if not data:
        raise IngestionError(f"{path}: no data rows")
    rows = np.asarray(data, dtype=np.float64)
    missing = np.asarray(miss, dtype=bool)
    metas = tuple(
        _make_meta(name, i, kinds[i], rows[:, i], missing[:, i], feasibles[i], grid_size)
        for i, name in enumerate(feature_names)
    )
    return Dataset(rows=rows, missing=missing, labels=np.asarray(labels), features=metas)


def impute_missing(d: Dataset) -> Dataset:
    """Fill missing cells: column mean for numeric, mode for binary (tie -> 0).

    Pure: returns a new Dataset, the input is untouched. Idempotent:
    already-recorded fill values carry over, so a second application is a
    no-op.
    """
    rows = d.rows.copy()
    fills = dict(d.imputed_value or {})
    for meta in d.features:
        col_missing = d.missing[:, meta.index]
        if not col_missing.any():
            continue
        observed = d.rows[~col_missing, meta.index]
        if observed.size == 0:
            raise ValueError(f"feature {meta.name!r} has no observed values to impute from")
        if meta.kind == BINARY:
            ones = int(np.count_nonzero(observed))
            fill = 1.0 if ones > observed.size - ones else 0.0
        else:
            fill = float(np.mean(observed))
        rows[col_missing, meta.index] = fill
        fills[meta.index] = fill
    return Dataset(
        rows=rows,
        missing=np.zeros_like(d.missing),
        labels=d.labels,
        features=d.features,
        imputed_value=fills,
    )


def feature_grid(meta: FeatureMeta) -> np.ndarray:
    """Sweep grid for one feature: strictly ascending, feasibility-filtered.

    Numeric features get ``grid_size`` evenly spaced values spanning the
    observed range (a single point when the range is degenerate); binary
    features get ``[0, 1]``. Declared-infeasible grid points are dropped;
    an explicit feasible value list becomes the grid itself, clipped to the
    observed range.
    """
    if meta.kind == BINARY:
        vals = [0.0, 1.0]
        if meta.feasible is not None:
            vals = [v for v in vals if meta.feasible.contains(v)]
        return np.asarray(vals, dtype=np.float64)
    lo, hi = meta.observed_min, meta.observed_max
    if lo is None or hi is None:
        raise ValueError(f"feature {meta.name!r} has no observed range; was the column all-missing?")
    feas = meta.feasible
    if feas is not None and feas.values is not None:
        vals = [v for v in feas.values if lo <= v <= hi] or list(feas.values)
        return np.asarray(sorted(vals), dtype=np.float64)
    grid = np.asarray([lo]) if lo == hi else np.linspace(lo, hi, meta.grid_size)
    if feas is not None:
        kept = grid[[feas.contains(v) for v in grid]]
        if kept.size:
            return kept
        return np.asarray([snap_value(meta, 0.5 * (lo + hi))])
    return grid


def snap_value(meta: FeatureMeta, value: float) -> float:
    """Snap a requested value to the nearest feasible one (ties -> smaller).

    The allowed region is the declared feasible set intersected with the
    observed range; without a declaration it is the observed range itself
    (``{0, 1}`` for binary features).
    """
    value = float(value)
    if not np.isfinite(value):
        raise ValueError(f"feature {meta.name!r}: value must be finite, got {value!r}")
    feas = meta.feasible
    if meta.kind == BINARY:
        allowed = [0.0, 1.0] if feas is None else [v for v in (0.0, 1.0) if feas.contains(v)]
        if not allowed:
            raise ValueError(f"feature {meta.name!r} has no feasible binary values")
        return _nearest(allowed, value)
    lo, hi = meta.observed_min, meta.observed_max
    if lo is None or hi is None:
        raise ValueError(f"feature {meta.name!r} has no observed range")
    if feas is None:
        return float(min(max(value, lo), hi))
    if feas.values is not None:
        cands = [v for v in feas.values if lo <= v <= hi] or list(feas.values)
        return _nearest(sorted(cands), value)
    flo, fhi = max(feas.lo, lo), min(feas.hi, hi)
    if flo > fhi:
        flo, fhi = feas.lo, feas.hi
    return float(min(max(value, flo), fhi))


def _nearest(sorted_vals: Sequence[float], value: float) -> float:
    best = sorted_vals[0]
    best_dist = abs(value - best)
    for v in sorted_vals[1:]:
        dist = abs(value - v)
        if dist < best_dist:
            best, best_dist = v, dist
    return float(best)


@dataclass(frozen=True, eq=False)
class Histogram:
    """Per-feature data distribution: bin edges plus counts summing to N."""

    feature: int
    bin_edges: np.ndarray
    counts: np.ndarray

    def __post_init__(self) -> None:
        edges = np.asarray(self.bin_edges, dtype=np.float64)
        counts = np.asarray(self.counts, dtype=np.int64)
        if edges.size < 2 or (np.diff(edges) <= 0).any():
            raise ValueError("bin edges must be strictly ascending")
        if (counts < 0).any():
            raise ValueError("counts must be non-negative")
        object.__setattr__(self, "bin_edges", edges)
        object.__setattr__(self, "counts", counts)


def histogram(d: Dataset, f: int, bins: int) -> Histogram:
    """Equal-width histogram over the observed range; last bin right-inclusive.

    Binary features report the tallies at 0 and 1 directly.
    """
    if bins <= 0:
        raise ValueError("bins must be positive")
    if d.has_missing:
        raise ValueError("histogram requires an imputed dataset")
    meta = d.features[f]
    col = d.rows[:, f]
    if meta.kind == BINARY:
        ones = int(np.count_nonzero(col))
        return Histogram(feature=f, bin_edges=np.asarray([0.0, 1.0]), counts=np.asarray([col.size - ones, ones]))
    lo, hi = meta.observed_min, meta.observed_max
    if lo == hi:
        edges = np.linspace(lo - 0.5, hi + 0.5, bins + 1)
    else:
        edges = np.linspace(lo, hi, bins + 1)
    counts, _ = np.histogram(col, bins=edges)
    return Histogram(feature=f, bin_edges=edges, counts=counts)
