"""Typed columnar datasets: CSV ingestion, schema typing, standardization.

A ``Dataset`` stores numeric columns as float arrays and categorical
(nominal/ordinal) columns as integer codes into an ordered level list.
Level order is first-occurrence order in the source, so re-loading the
same file always yields an identical schema. Rows containing any missing
cell (empty string) are dropped at ingestion and counted.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    DegenerateColumnError,
    IngestError,
    LabelArityError,
    SchemaError,
)

NUMERIC = "numeric"
ORDINAL = "ordinal"
NOMINAL = "nominal"


@dataclass(frozen=True)
class ColumnSchema:
    name: str
    kind: str  # numeric | ordinal | nominal
    levels: tuple[str, ...] = ()
    range: tuple[float, float] | None = None

    @property
    def is_categorical(self) -> bool:
        return self.kind in (ORDINAL, NOMINAL)

    def to_json(self) -> dict:
        out = {"name": self.name, "kind": self.kind}
        if self.is_categorical:
            out["levels"] = list(self.levels)
        else:
            out["range"] = list(self.range) if self.range else None
        return out


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable typed table. ``columns`` maps name -> float values for
    numeric columns, integer level codes for categorical ones."""

    schema: tuple[ColumnSchema, ...]
    columns: dict[str, np.ndarray]
    label_column: str
    seed: int = 0
    n_dropped_rows: int = 0
    _by_name: dict[str, ColumnSchema] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_by_name", {c.name: c for c in self.schema})
        for c in self.schema:
            self.columns[c.name].setflags(write=False)

    @property
    def n_rows(self) -> int:
        return len(self.columns[self.schema[0].name])

    @property
    def column_names(self) -> list[str]:
        return [c.name for c in self.schema]

    def column_schema(self, name: str) -> ColumnSchema:
        try:
            return self._by_name[name]
        except KeyError:
            raise SchemaError(f"unknown column {name!r}")

    def values(self, name: str) -> np.ndarray:
        """Raw stored values: floats for numeric, level codes otherwise."""
        self.column_schema(name)
        return self.columns[name]

    def codes(self, name: str) -> np.ndarray:
        col = self.column_schema(name)
        if not col.is_categorical:
            raise SchemaError(f"column {name!r} is numeric, has no codes")
        return self.columns[name]

    def labels(self, name: str) -> list[str]:
        col = self.column_schema(name)
        lv = np.asarray(col.levels, dtype=object)
        return list(lv[self.columns[name]])

    def cell_text(self, name: str, row: int) -> str:
        col = self.column_schema(name)
        v = self.columns[name][row]
        return col.levels[int(v)] if col.is_categorical else format_number(float(v))

    def with_columns(self, new_columns: dict[str, np.ndarray], seed: int | None = None) -> "Dataset":
        """Copy of this dataset with some columns replaced; numeric ranges
        in the schema are recomputed for replaced columns."""
        cols = dict(self.columns)
        schema = list(self.schema)
        for name, vals in new_columns.items():
            idx = self.column_names.index(name)
            c = schema[idx]
            arr = np.asarray(vals)
            if c.kind == NUMERIC:
                arr = arr.astype(float)
                schema[idx] = replace(c, range=(float(arr.min()), float(arr.max())))
            else:
                arr = arr.astype(np.int64)
            cols[name] = arr
        return Dataset(
            schema=tuple(schema),
            columns=cols,
            label_column=self.label_column,
            seed=self.seed if seed is None else seed,
            n_dropped_rows=self.n_dropped_rows,
        )


def format_number(x: float) -> str:
    """Shortest decimal text that round-trips to the same float; integral
    values are written without a fractional part."""
    if x == int(x) and abs(x) < 2**53:
        return str(int(x))
    return repr(x)


def _validate_label(levels: tuple[str, ...], name: str) -> None:
    if len(levels) != 2:
        raise LabelArityError(
            f"label column {name!r} must have exactly 2 levels, found {len(levels)}"
        )


def load_csv(
    path_or_bytes,
    label: str,
    nominal: list[str] | None = None,
    ordinal: list[str] | None = None,
) -> Dataset:
    """Ingest an RFC-4180 CSV (UTF-8, header row mandatory).

    Columns not listed under ``nominal``/``ordinal`` are numeric when every
    non-missing cell parses as a float, nominal otherwise. The label column
    is always treated as nominal and must be binary. Rows with any missing
    (empty) cell are dropped; the count is recorded on the dataset.
    """
    nominal = list(nominal or [])
    ordinal = list(ordinal or [])

    if isinstance(path_or_bytes, bytes):
        text = path_or_bytes.decode("utf-8")
    elif isinstance(path_or_bytes, str) and (
        not path_or_bytes or "\n" in path_or_bytes or "," in path_or_bytes
    ):
        text = path_or_bytes
    else:
        with open(path_or_bytes, "r", encoding="utf-8", newline="") as fh:
            text = fh.read()

    reader = csv.reader(io.StringIO(text))
    rows = [r for r in reader if r]
    if not rows:
        raise IngestError("empty CSV: no header row")
    header = rows[0]
    if len(set(header)) != len(header):
        raise IngestError("duplicate column names in header")
    body = rows[1:]
    if not body:
        raise IngestError("CSV has a header but no data rows")

    for name in [label, *nominal, *ordinal]:
        if name not in header:
            raise SchemaError(f"unknown column {name!r}")

    width = len(header)
    kept, dropped = [], 0
    for r in body:
        if len(r) != width:
            raise IngestError(f"row with {len(r)} cells, expected {width}")
        if any(cell == "" for cell in r):
            dropped += 1
        else:
            kept.append(r)
    if not kept:
        raise IngestError("all rows contained missing cells")

    raw = {name: [r[j] for r in kept] for j, name in enumerate(header)}

    schema: list[ColumnSchema] = []
    columns: dict[str, np.ndarray] = {}
    for name in header:
        cells = raw[name]
        forced_cat = name in nominal or name in ordinal or name == label
        numeric_vals = None
        if not forced_cat:
            try:
                numeric_vals = np.array([float(c) for c in cells])
            except ValueError:
                numeric_vals = None
        if numeric_vals is not None:
            schema.append(
                ColumnSchema(name, NUMERIC, range=(float(numeric_vals.min()), float(numeric_vals.max())))
            )
            columns[name] = numeric_vals
        else:
            levels: list[str] = []
            index: dict[str, int] = {}
            codes = np.empty(len(cells), dtype=np.int64)
            for i, c in enumerate(cells):
                if c not in index:
                    index[c] = len(levels)
                    levels.append(c)
                codes[i] = index[c]
            kind = ORDINAL if name in ordinal and name != label else NOMINAL
            if name != label and len(levels) < 2:
                raise SchemaError(f"categorical column {name!r} has a single level")
            if name == label:
                _validate_label(tuple(levels), name)
            schema.append(ColumnSchema(name, kind, levels=tuple(levels)))
            columns[name] = codes

    return Dataset(
        schema=tuple(schema),
        columns=columns,
        label_column=label,
        n_dropped_rows=dropped,
    )


def write_csv(dataset: Dataset, path=None) -> str:
    """Serialize to RFC-4180 CSV text; numeric cells use the shortest
    round-trip decimal. Returns the text; also writes to ``path`` if given."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    names = dataset.column_names
    writer.writerow(names)
    cats = {c.name: np.asarray(c.levels, dtype=object) for c in dataset.schema if c.is_categorical}
    rendered = {}
    for name in names:
        if name in cats:
            rendered[name] = cats[name][dataset.columns[name]]
        else:
            rendered[name] = [format_number(float(v)) for v in dataset.columns[name]]
    for i in range(dataset.n_rows):
        writer.writerow([rendered[name][i] for name in names])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def standardize(values) -> tuple[np.ndarray, float, float]:
    """Z-score a numeric column using the population std (divide by n).

    Returns (standardized values, mean, std). Raises DegenerateColumnError
    when the column is constant.
    """
    arr = np.asarray(values, dtype=float)
    mean = float(arr.mean())
    std = float(arr.std())
    if std == 0.0:
        raise DegenerateColumnError("cannot standardize a constant column")
    return (arr - mean) / std, mean, std
