"""Regression engines behind SEM fitting, CI testing, and evaluation.

Parents enter every regression as one z-scored design column each:
numeric/ordinal values directly, categorical columns as their integer
level codes. Linear targets are kept in raw units, so a linear beta is
the change in the target per standard deviation of the parent. The
multinomial logit fixes class 0 as the reference (coefficient row zero)
and is fitted by Newton's method with an L2 ridge for conditioning.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2

from .data import Dataset, NOMINAL
from .errors import (
    ConstantLabelError,
    InsufficientDataError,
    SchemaError,
)

_RIDGE_LINEAR = 1e-8
_RIDGE_LOGIT = 1e-6
_VAR_FLOOR = 1e-30
_SEPARATION_BOUND = 15.0


def _raw_column(data: Dataset, name: str) -> np.ndarray:
    return data.values(name).astype(float)


def _zscore_matrix(X: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    means = X.mean(axis=0) if X.size else np.zeros(X.shape[1])
    stds = X.std(axis=0) if X.size else np.ones(X.shape[1])
    stds = np.where(stds == 0.0, 1.0, stds)
    return (X - means) / stds, means, stds


def design_matrix(data: Dataset, parents: tuple[str, ...]) -> np.ndarray:
    if not parents:
        return np.empty((data.n_rows, 0))
    return np.column_stack([_raw_column(data, p) for p in parents])


@dataclass(frozen=True, eq=False)
class LinearFit:
    target: str
    parents: tuple[str, ...]
    betas: np.ndarray
    intercept: float
    residual_std: float
    log_likelihood: float
    n: int
    k: int
    parent_means: np.ndarray
    parent_stds: np.ndarray
    target_mean: float
    target_std: float
    ridge_fallback: bool = False

    def predict(self, X_raw: np.ndarray) -> np.ndarray:
        if len(self.parents) == 0:
            return np.full(X_raw.shape[0], self.intercept)
        Z = (X_raw - self.parent_means) / self.parent_stds
        return Z @ self.betas + self.intercept

    def standardized_betas(self) -> np.ndarray:
        if self.target_std == 0.0:
            return np.zeros_like(self.betas)
        return self.betas / self.target_std


@dataclass(frozen=True, eq=False)
class LogitFit:
    target: str
    parents: tuple[str, ...]
    classes: tuple[str, ...]
    coef: np.ndarray  # (C, p); reference row 0 is identically zero
    intercepts: np.ndarray  # (C,); entry 0 is zero
    log_likelihood: float
    n: int
    k: int
    parent_means: np.ndarray
    parent_stds: np.ndarray
    converged: bool = True
    separation_flag: bool = False

    def scores(self, X_raw: np.ndarray) -> np.ndarray:
        n = X_raw.shape[0]
        if len(self.parents) == 0:
            return np.tile(self.intercepts, (n, 1))
        Z = (X_raw - self.parent_means) / self.parent_stds
        return Z @ self.coef.T + self.intercepts

    def predict_proba(self, X_raw: np.ndarray) -> np.ndarray:
        return _softmax(self.scores(X_raw))


def _softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def _gaussian_loglik(resid: np.ndarray) -> tuple[float, float]:
    n = len(resid)
    sigma2 = max(float(resid @ resid) / n, _VAR_FLOOR)
    ll = -0.5 * n * (np.log(2.0 * np.pi * sigma2) + 1.0)
    return ll, float(np.sqrt(sigma2))


def fit_linear(data: Dataset, target: str, parents) -> LinearFit:
    """Least squares of a raw-unit target on z-scored parents, with a tiny
    ridge fallback when the design is rank-deficient."""
    parents = tuple(parents)
    col = data.column_schema(target)
    if col.kind == NOMINAL:
        raise SchemaError(f"linear target {target!r} must be numeric or ordinal")
    if len(set(parents)) != len(parents) or target in parents:
        raise SchemaError("parents must be distinct and exclude the target")
    n = data.n_rows
    p = len(parents)
    k = p + 2  # betas + intercept + noise variance
    if n <= k:
        raise InsufficientDataError(f"n={n} rows cannot support k={k} parameters")

    y = _raw_column(data, target)
    X = design_matrix(data, parents)
    Z, means, stds = _zscore_matrix(X)
    A = np.column_stack([np.ones(n), Z])

    ridge_used = False
    coefs, _, rank, _ = np.linalg.lstsq(A, y, rcond=None)
    if rank < A.shape[1]:
        ridge_used = True
        G = A.T @ A + _RIDGE_LINEAR * np.eye(A.shape[1])
        coefs = np.linalg.solve(G, A.T @ y)

    resid = y - A @ coefs
    ll, sigma = _gaussian_loglik(resid)
    return LinearFit(
        target=target,
        parents=parents,
        betas=coefs[1:],
        intercept=float(coefs[0]),
        residual_std=sigma,
        log_likelihood=ll,
        n=n,
        k=k,
        parent_means=means,
        parent_stds=stds,
        target_mean=float(y.mean()),
        target_std=float(y.std()),
        ridge_fallback=ridge_used,
    )


def _newton_multinomial(
    Z: np.ndarray,
    codes: np.ndarray,
    n_classes: int,
    max_iter: int = 200,
    tol: float = 1e-8,
    ridge: float = _RIDGE_LOGIT,
) -> tuple[np.ndarray, float, bool]:
    """Fit class scores s_c = Z w_c + b_c (class 0 pinned at zero) by
    damped Newton steps on the ridge-penalized log-likelihood.

    Returns (W, unpenalized log-likelihood, converged). W has shape
    (C-1, p+1) with the intercept in the last column.
    """
    n, p = Z.shape
    A = np.column_stack([Z, np.ones(n)])
    d = p + 1
    m = n_classes - 1
    W = np.zeros((m, d))
    Y = np.zeros((n, n_classes))
    Y[np.arange(n), codes] = 1.0

    def probs(Wc):
        scores = np.column_stack([np.zeros(n), A @ Wc.T])
        return _softmax(scores)

    def penalized_ll(Wc):
        P = probs(Wc)
        ll = float(np.log(np.clip(P[np.arange(n), codes], 1e-300, None)).sum())
        return ll - 0.5 * ridge * float((Wc * Wc).sum())

    obj = penalized_ll(W)
    converged = False
    for _ in range(max_iter):
        P = probs(W)
        grad = np.empty(m * d)
        for c in range(m):
            grad[c * d : (c + 1) * d] = A.T @ (P[:, c + 1] - Y[:, c + 1]) + ridge * W[c]
        if np.max(np.abs(grad)) < tol:
            converged = True
            break
        H = np.empty((m * d, m * d))
        for c in range(m):
            for e in range(c, m):
                w = P[:, c + 1] * ((1.0 if c == e else 0.0) - P[:, e + 1])
                block = (A * w[:, None]).T @ A
                if c == e:
                    block = block + ridge * np.eye(d)
                H[c * d : (c + 1) * d, e * d : (e + 1) * d] = block
                if e != c:
                    H[e * d : (e + 1) * d, c * d : (c + 1) * d] = block.T
        try:
            step = np.linalg.solve(H, grad).reshape(m, d)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(H, grad, rcond=None)[0].reshape(m, d)
        scale = 1.0
        for _half in range(30):
            W_new = W - scale * step
            if penalized_ll(W_new) >= obj - 1e-12:
                break
            scale *= 0.5
        W = W - scale * step
        obj = penalized_ll(W)

    P = probs(W)
    ll = float(np.log(np.clip(P[np.arange(n), codes], 1e-300, None)).sum())
    return W, ll, converged


def fit_logit(data: Dataset, target: str, parents, max_iter: int = 200, tol: float = 1e-8) -> LogitFit:
    """Multinomial logit of a categorical target on z-scored parents."""
    parents = tuple(parents)
    col = data.column_schema(target)
    if not col.is_categorical:
        raise SchemaError(f"logit target {target!r} must be categorical")
    if len(set(parents)) != len(parents) or target in parents:
        raise SchemaError("parents must be distinct and exclude the target")
    n = data.n_rows
    C = len(col.levels)
    p = len(parents)
    k = (C - 1) * (p + 1)
    if n <= k:
        raise InsufficientDataError(f"n={n} rows cannot support k={k} parameters")

    codes = data.codes(target)
    X = design_matrix(data, parents)
    Z, means, stds = _zscore_matrix(X)
    W, ll, converged = _newton_multinomial(Z, codes, C, max_iter=max_iter, tol=tol)

    coef = np.zeros((C, p))
    intercepts = np.zeros(C)
    coef[1:] = W[:, :p]
    intercepts[1:] = W[:, p]
    return LogitFit(
        target=target,
        parents=parents,
        classes=col.levels,
        coef=coef,
        intercepts=intercepts,
        log_likelihood=ll,
        n=n,
        k=k,
        parent_means=means,
        parent_stds=stds,
        converged=converged,
        separation_flag=bool(np.max(np.abs(W)) > _SEPARATION_BOUND) if W.size else False,
    )


def bic(fit) -> float:
    """k ln(n) - 2 logL; lower is a better fit per parameter."""
    return fit.k * np.log(fit.n) - 2.0 * fit.log_likelihood


def _onehot_design(data: Dataset, names: tuple[str, ...]) -> np.ndarray:
    """CI-test design: numeric/ordinal columns enter as one z-scored column,
    nominal columns as L-1 z-scored dummies (first level dropped). Unlike
    the single-code SEM encoding, this is invariant to level reordering."""
    blocks = []
    n = data.n_rows
    for name in names:
        col = data.column_schema(name)
        if col.kind == NOMINAL:
            codes = data.codes(name)
            for j in range(1, len(col.levels)):
                blocks.append((codes == j).astype(float))
        else:
            blocks.append(data.values(name).astype(float))
    if not blocks:
        return np.empty((n, 0))
    X = np.column_stack(blocks)
    return _zscore_matrix(X)[0]


def _design_width(data: Dataset, name: str) -> int:
    col = data.column_schema(name)
    return len(col.levels) - 1 if col.kind == NOMINAL else 1


def _linear_loglik(Z: np.ndarray, y: np.ndarray) -> float:
    A = np.column_stack([np.ones(len(y)), Z])
    coefs, _, rank, _ = np.linalg.lstsq(A, y, rcond=None)
    if rank < A.shape[1]:
        G = A.T @ A + _RIDGE_LINEAR * np.eye(A.shape[1])
        coefs = np.linalg.solve(G, A.T @ y)
    return _gaussian_loglik(y - A @ coefs)[0]


class RegressionCache:
    """Memoizes directional log-likelihoods on one dataset so PC's repeated
    conditional-independence tests do not refit identical models."""

    def __init__(self, data: Dataset):
        self.data = data
        self._loglik: dict[tuple, float] = {}

    def loglik(self, target: str, regressors: tuple[str, ...]) -> float:
        """Maximized log-likelihood of ``target`` on the one-hot design of
        ``regressors`` (order-insensitive)."""
        key = (target, tuple(sorted(regressors)))
        if key in self._loglik:
            return self._loglik[key]
        col = self.data.column_schema(target)
        Z = _onehot_design(self.data, key[1])
        if col.kind == NOMINAL:
            _, ll, _ = _newton_multinomial(Z, self.data.codes(target), len(col.levels))
        else:
            ll = _linear_loglik(Z, self.data.values(target).astype(float))
        self._loglik[key] = ll
        return ll


def _is_degenerate(data: Dataset, name: str) -> bool:
    return np.unique(data.values(name)).size < 2


@dataclass(frozen=True)
class CIResult:
    independent: bool
    p_value: float
    warning: str | None = None


def ci_test(data: Dataset, x: str, y: str, given=(), p_threshold: float = 0.01,
            cache: RegressionCache | None = None) -> CIResult:
    """Symmetric mixed-type conditional independence test.

    Runs two directional likelihood-ratio tests (x on Z vs Z+{y}, and y on
    Z vs Z+{x}; Gaussian LR for numeric/ordinal targets, multinomial-logit
    LR for nominal ones) and combines them by taking the maximum p-value,
    which is symmetric in x and y and conservative.
    """
    if x == y:
        raise SchemaError("ci_test requires two distinct columns")
    given = tuple(sorted(set(given)))
    if x in given or y in given:
        raise SchemaError("conditioning set must exclude x and y")
    if _is_degenerate(data, x) or _is_degenerate(data, y):
        return CIResult(True, 1.0, warning="degenerate column treated as independent")

    cache = cache or RegressionCache(data)

    def directional_p(target: str, other: str) -> float:
        ll0 = cache.loglik(target, given)
        ll1 = cache.loglik(target, given + (other,))
        lr = max(2.0 * (ll1 - ll0), 0.0)
        t_classes = len(data.column_schema(target).levels)
        df = _design_width(data, other) * (t_classes - 1 if data.column_schema(target).kind == NOMINAL else 1)
        return float(chi2.sf(lr, df))

    p = max(directional_p(x, y), directional_p(y, x))
    return CIResult(independent=p > p_threshold, p_value=p)


class LogisticClassifier:
    """Binary logistic classifier for utility evaluation. Nominal features
    are one-hot encoded (first level dropped); numeric and ordinal features
    are z-scored with training statistics only."""

    def __init__(self, ridge: float = _RIDGE_LOGIT, max_iter: int = 200, tol: float = 1e-8):
        self.ridge = ridge
        self.max_iter = max_iter
        self.tol = tol
        self._fitted = False

    def _encode(self, data: Dataset, rows: np.ndarray) -> np.ndarray:
        blocks = []
        for name, kind, levels in self._features:
            vals = data.values(name)[rows]
            if kind == NOMINAL:
                onehot = np.zeros((len(rows), len(levels) - 1))
                for j in range(1, len(levels)):
                    onehot[:, j - 1] = vals == j
                blocks.append(onehot)
            else:
                blocks.append(vals.astype(float)[:, None])
        if not blocks:
            return np.empty((len(rows), 0))
        return np.hstack(blocks)

    def fit(self, data: Dataset, rows=None, exclude=()):
        rows = np.arange(data.n_rows) if rows is None else np.asarray(rows)
        label = data.label_column
        self.label_levels = data.column_schema(label).levels
        self._features = [
            (c.name, c.kind, c.levels)
            for c in data.schema
            if c.name != label and c.name not in set(exclude)
        ]
        y = data.codes(label)[rows]
        if np.unique(y).size < 2:
            raise ConstantLabelError("training label has a single class")
        X = self._encode(data, rows)
        self._numeric_mask = np.array(
            [kind != NOMINAL for name, kind, levels in self._features for _ in
             (range(1) if kind != NOMINAL else range(len(levels) - 1))],
            dtype=bool,
        ) if self._features else np.zeros(0, dtype=bool)
        means = np.zeros(X.shape[1])
        stds = np.ones(X.shape[1])
        if self._numeric_mask.any():
            sub = X[:, self._numeric_mask]
            means[self._numeric_mask] = sub.mean(axis=0)
            s = sub.std(axis=0)
            stds[self._numeric_mask] = np.where(s == 0.0, 1.0, s)
        self._means, self._stds = means, stds
        Z = (X - means) / stds
        self._W, self._ll, self._converged = _newton_multinomial(
            Z, y, 2, max_iter=self.max_iter, tol=self.tol, ridge=self.ridge
        )
        self._fitted = True
        return self

    def predict_proba(self, data: Dataset, rows=None) -> np.ndarray:
        assert self._fitted, "classifier not fitted"
        rows = np.arange(data.n_rows) if rows is None else np.asarray(rows)
        Z = (self._encode(data, rows) - self._means) / self._stds
        A = np.column_stack([Z, np.ones(len(rows))])
        scores = np.column_stack([np.zeros(len(rows)), A @ self._W.T])
        return _softmax(scores)

    def predict(self, data: Dataset, rows=None) -> np.ndarray:
        return np.argmax(self.predict_proba(data, rows), axis=1)


def train_logistic_classifier(data: Dataset, label: str | None = None, exclude=()) -> LogisticClassifier:
    if label is not None and label != data.label_column:
        raise SchemaError("classifier label must be the dataset label column")
    return LogisticClassifier().fit(data, exclude=exclude)
