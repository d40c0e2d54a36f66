"""Fairness, utility and distortion metrics plus fourfold counts.

Group rates are compared as absolute differences in percentage points.
Row distances use the Gower metric: numeric gaps normalized by the column
range of the original data, categorical cells a 0/1 mismatch, averaged
over columns. The evaluation classifier averages three seeded 50:50
holdouts, always dropping the sensitive column(s) from the features; for
a debiased dataset, the original labels act as the ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data import Dataset
from .errors import EmptyGroupError, ParameterError, SchemaError
from .regress import LogisticClassifier

DEFAULT_K = 10
N_FOLDS = 3


@dataclass(frozen=True)
class Selection:
    """One conjunct of a custom group: either categorical levels or a
    closed numeric bin [lo, hi]."""

    column: str
    levels: tuple[str, ...] = ()
    bin: tuple[float, float] | None = None

    def mask(self, data: Dataset) -> np.ndarray:
        col = data.column_schema(self.column)
        if col.is_categorical:
            if not self.levels:
                raise SchemaError(f"selection on {self.column!r} needs levels")
            codes = data.codes(self.column)
            wanted = [col.levels.index(lv) for lv in self.levels]
            return np.isin(codes, wanted)
        if self.bin is None:
            raise SchemaError(f"selection on numeric {self.column!r} needs a bin")
        lo, hi = self.bin
        vals = data.values(self.column)
        return (vals >= lo) & (vals <= hi)

    def to_json(self) -> dict:
        out = {"column": self.column}
        if self.levels:
            out["levels"] = list(self.levels)
        if self.bin is not None:
            out["bin"] = list(self.bin)
        return out

    @classmethod
    def from_json(cls, doc: dict) -> "Selection":
        return cls(
            column=doc["column"],
            levels=tuple(doc.get("levels", ())),
            bin=tuple(doc["bin"]) if doc.get("bin") is not None else None,
        )


@dataclass(frozen=True)
class GroupSpec:
    """Either a binary sensitive column (group A = privileged level) or a
    pair of custom conjunctive selections."""

    column: str | None = None
    privileged_level: str | None = None
    group_a: tuple[Selection, ...] = ()
    group_b: tuple[Selection, ...] = ()

    @classmethod
    def simple(cls, column: str, privileged_level: str) -> "GroupSpec":
        return cls(column=column, privileged_level=privileged_level)

    @classmethod
    def custom(cls, group_a, group_b) -> "GroupSpec":
        return cls(group_a=tuple(group_a), group_b=tuple(group_b))

    @property
    def is_simple(self) -> bool:
        return self.column is not None

    def sensitive_columns(self) -> tuple[str, ...]:
        if self.is_simple:
            return (self.column,)
        return tuple(sorted({s.column for s in self.group_a + self.group_b}))

    def masks(self, data: Dataset) -> tuple[np.ndarray, np.ndarray, bool]:
        """(mask_a, mask_b, overlap_flag); raises EmptyGroupError when a
        side selects no rows."""
        if self.is_simple:
            col = data.column_schema(self.column)
            if len(col.levels) != 2:
                raise SchemaError(f"sensitive column {self.column!r} must be binary")
            code = col.levels.index(self.privileged_level)
            a = data.codes(self.column) == code
            b = ~a
            overlap = False
        else:

            def conj(sels):
                m = np.ones(data.n_rows, dtype=bool)
                for s in sels:
                    m &= s.mask(data)
                return m

            a, b = conj(self.group_a), conj(self.group_b)
            overlap = bool((a & b).any())
        if not a.any() or not b.any():
            raise EmptyGroupError("a group selects no rows")
        return a, b, overlap

    def to_json(self) -> dict:
        if self.is_simple:
            return {"column": self.column, "privileged_level": self.privileged_level}
        return {
            "group_a": [s.to_json() for s in self.group_a],
            "group_b": [s.to_json() for s in self.group_b],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "GroupSpec":
        if doc.get("column") is not None:
            return cls.simple(doc["column"], doc["privileged_level"])
        return cls.custom(
            [Selection.from_json(s) for s in doc["group_a"]],
            [Selection.from_json(s) for s in doc["group_b"]],
        )


def _favorable_code(data: Dataset, favorable: str | None) -> int:
    col = data.column_schema(data.label_column)
    if favorable is None:
        return 1  # second level in schema order
    return col.levels.index(favorable)


def statistical_parity_diff(data: Dataset, groups: GroupSpec, favorable: str | None = None) -> float:
    """|P(label = favorable | A) - P(label = favorable | B)| in points."""
    a, b, _ = groups.masks(data)
    fav = data.codes(data.label_column) == _favorable_code(data, favorable)
    return abs(float(fav[a].mean()) - float(fav[b].mean())) * 100.0


def _column_span(ds: Dataset, name: str) -> float:
    rng = ds.column_schema(name).range
    return (rng[1] - rng[0]) if rng else 0.0


def gower_distortion(original: Dataset, debiased: Dataset) -> float:
    """Mean row-wise Gower distance between paired rows. A numeric column's
    scale is the wider of the two datasets' ranges, which keeps the metric
    symmetric while staying anchored to the original data's spread;
    per-cell contributions are capped at 1 so the result lives in [0, 1]."""
    if original.n_rows != debiased.n_rows or original.column_names != debiased.column_names:
        raise SchemaError("datasets must share shape and column order")
    d = np.zeros(original.n_rows)
    n_cols = len(original.schema)
    for c in original.schema:
        x, y = original.values(c.name), debiased.values(c.name)
        if c.is_categorical:
            d += (x != y).astype(float)
        else:
            span = max(_column_span(original, c.name), _column_span(debiased, c.name))
            if span == 0.0:
                d += (x != y).astype(float)
            else:
                d += np.minimum(np.abs(x.astype(float) - y.astype(float)) / span, 1.0)
    return float((d / n_cols).mean())


def _gower_neighbor_matrix(data: Dataset, block: int = 512):
    """Yield (row slice, distance block to all rows) under Gower, computed
    over feature columns only (the label never defines similarity)."""
    numeric, categorical = [], []
    for c in data.schema:
        if c.name == data.label_column:
            continue
        vals = data.values(c.name)
        if c.is_categorical:
            categorical.append(vals)
        else:
            span = (c.range[1] - c.range[0]) if c.range else 0.0
            numeric.append((vals.astype(float), span))
    n = data.n_rows
    n_cols = len(numeric) + len(categorical)
    for start in range(0, n, block):
        stop = min(start + block, n)
        d = np.zeros((stop - start, n))
        for vals, span in numeric:
            gap = np.abs(vals[start:stop, None] - vals[None, :])
            d += gap / span if span > 0 else (gap > 0).astype(float)
        for vals in categorical:
            d += (vals[start:stop, None] != vals[None, :]).astype(float)
        yield slice(start, stop), d / n_cols


def individual_bias(data: Dataset, k: int = DEFAULT_K) -> float:
    """Mean percentage of each row's k nearest Gower neighbors (self
    excluded, ties broken by row index) whose label differs."""
    n = data.n_rows
    if n <= k:
        raise ParameterError(f"need more than k={k} rows, have {n}")
    labels = data.codes(data.label_column)
    total = 0.0
    for rows, dists in _gower_neighbor_matrix(data):
        idx = np.arange(rows.start, rows.stop)
        dists[np.arange(len(idx)), idx] = np.inf  # exclude self
        # stable sort realizes (distance, row index) tie-breaking
        nearest = np.argsort(dists, axis=1, kind="stable")[:, :k]
        differs = labels[nearest] != labels[idx][:, None]
        total += float(differs.mean(axis=1).sum())
    return total / n * 100.0


def fourfold(data: Dataset, groups: GroupSpec, favorable: str | None = None) -> dict:
    """Quadrant counts and per-group percentages: favorable/unfavorable
    label within each group."""
    a, b, _ = groups.masks(data)
    fav = data.codes(data.label_column) == _favorable_code(data, favorable)
    quads = {
        "a_favorable": int((a & fav).sum()),
        "a_unfavorable": int((a & ~fav).sum()),
        "b_favorable": int((b & fav).sum()),
        "b_unfavorable": int((b & ~fav).sum()),
    }
    n_a, n_b = int(a.sum()), int(b.sum())
    pct = {
        "a_favorable": quads["a_favorable"] / n_a * 100.0,
        "a_unfavorable": quads["a_unfavorable"] / n_a * 100.0,
        "b_favorable": quads["b_favorable"] / n_b * 100.0,
        "b_unfavorable": quads["b_unfavorable"] / n_b * 100.0,
    }
    return {"counts": quads, "percent": pct, "group_sizes": {"a": n_a, "b": n_b}}


def _rates(y_true, y_pred, fav_code):
    """(accuracy, fnr, fpr); fnr/fpr are NaN when undefined."""
    acc = float((y_true == y_pred).mean())
    pos = y_true == fav_code
    neg = ~pos
    fnr = float((y_pred[pos] != fav_code).mean()) if pos.any() else np.nan
    fpr = float((y_pred[neg] == fav_code).mean()) if neg.any() else np.nan
    return acc, fnr, fpr


def _f1(y_true, y_pred, fav_code) -> float:
    tp = float(((y_pred == fav_code) & (y_true == fav_code)).sum())
    fp = float(((y_pred == fav_code) & (y_true != fav_code)).sum())
    fn = float(((y_pred != fav_code) & (y_true == fav_code)).sum())
    denom = 2 * tp + fp + fn
    return 2 * tp / denom if denom > 0 else 0.0


def classifier_fairness(
    data: Dataset,
    groups: GroupSpec,
    classifier: str = "logistic",
    seed: int = 0,
    favorable: str | None = None,
    truth: Dataset | None = None,
) -> dict:
    """Three seeded 50:50 holdouts: train without the sensitive column(s),
    report mean absolute per-group differences plus mean accuracy and F1.

    Group-difference metrics (accuracy/FNR/FPR diffs) are measured against
    the evaluated dataset's own labels: they describe how evenly a model
    trained on *this* data treats the two groups. Utility metrics use
    ``truth`` labels when given (the original dataset when evaluating a
    debiased one), so accuracy/F1 stay comparable across debias rounds.
    """
    if classifier != "logistic":
        raise ParameterError(f"unsupported classifier {classifier!r}")
    masks_a, masks_b, _ = groups.masks(data)
    fav_code = _favorable_code(data, favorable)
    sensitive = groups.sensitive_columns()
    own_labels = data.codes(data.label_column)
    truth_labels = (truth or data).codes(data.label_column)

    n = data.n_rows
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    per_fold = {"accuracy": [], "f1": [], "accuracy_diff": [], "fnr_diff": [], "fpr_diff": []}
    warnings = []
    for fold in range(N_FOLDS):
        perm = rng.permutation(n)
        train_idx, test_idx = perm[: n // 2], perm[n // 2 :]
        clf = LogisticClassifier().fit(data, rows=train_idx, exclude=sensitive)
        pred = clf.predict(data, rows=test_idx)
        y_truth = truth_labels[test_idx]
        y_own = own_labels[test_idx]
        ga, gb = masks_a[test_idx], masks_b[test_idx]
        if not ga.any() or not gb.any():
            warnings.append(f"fold {fold}: empty group on the held-out half; skipped")
            continue
        per_fold["accuracy"].append(float((y_truth == pred).mean()))
        per_fold["f1"].append(_f1(y_truth, pred, fav_code))
        acc_a, fnr_a, fpr_a = _rates(y_own[ga], pred[ga], fav_code)
        acc_b, fnr_b, fpr_b = _rates(y_own[gb], pred[gb], fav_code)
        per_fold["accuracy_diff"].append(abs(acc_a - acc_b) * 100.0)
        if not (np.isnan(fnr_a) or np.isnan(fnr_b)):
            per_fold["fnr_diff"].append(abs(fnr_a - fnr_b) * 100.0)
        if not (np.isnan(fpr_a) or np.isnan(fpr_b)):
            per_fold["fpr_diff"].append(abs(fpr_a - fpr_b) * 100.0)
    if not per_fold["accuracy"]:
        raise EmptyGroupError("every fold had an empty group")
    out = {m: float(np.mean(v)) if v else 0.0 for m, v in per_fold.items()}
    out["warnings"] = warnings
    return out


@dataclass(frozen=True)
class MetricsReport:
    parity_diff: float
    individual_bias: float
    accuracy_diff: float
    fnr_diff: float
    fpr_diff: float
    accuracy: float
    f1: float
    distortion: float
    fourfold: dict
    warnings: tuple[str, ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "parity_diff": self.parity_diff,
            "individual_bias": self.individual_bias,
            "accuracy_diff": self.accuracy_diff,
            "fnr_diff": self.fnr_diff,
            "fpr_diff": self.fpr_diff,
            "accuracy": self.accuracy,
            "f1": self.f1,
            "distortion": self.distortion,
            "fourfold": self.fourfold,
            "warnings": list(self.warnings),
        }


def evaluate(
    original: Dataset,
    debiased: Dataset,
    groups: GroupSpec,
    classifier: str = "logistic",
    k: int = DEFAULT_K,
    seed: int = 0,
    favorable: str | None = None,
) -> dict:
    """Full original-vs-debiased comparison. The original side doubles as
    the baseline strategy (sensitive attribute dropped from features)."""
    _, _, overlap = groups.masks(original)
    reports = {}
    for name, ds, truth in (("original", original, None), ("debiased", debiased, original)):
        clf = classifier_fairness(
            ds, groups, classifier=classifier, seed=seed, favorable=favorable, truth=truth
        )
        reports[name] = MetricsReport(
            parity_diff=statistical_parity_diff(ds, groups, favorable),
            individual_bias=individual_bias(ds, k=k),
            accuracy_diff=clf["accuracy_diff"],
            fnr_diff=clf["fnr_diff"],
            fpr_diff=clf["fpr_diff"],
            accuracy=clf["accuracy"],
            f1=clf["f1"],
            distortion=0.0 if name == "original" else gower_distortion(original, ds),
            fourfold=fourfold(ds, groups, favorable),
            warnings=tuple(clf["warnings"]),
        ).to_json()
    return {
        "original": reports["original"],
        "debiased": reports["debiased"],
        "group_overlap_warning": overlap,
    }
