"""Debiased-dataset generation.

Nodes touched by debias-stage edits (and their descendants) are
re-simulated from the fitted structural equations; everything else is
copied verbatim from the original dataset. A numeric node is the sum of
three terms: the alpha-scaled linear combination of its parents, the
fitted intercept, and one noise term per edited parent edge whose draw
matches the node's original distribution. Categorical nodes perturb their
per-class scores the same way, pass through a softmax, and the resulting
probability matrix is iteratively rescaled toward the original level
distribution before taking the argmax. Simulated numeric columns are then
restored to the original mean and population standard deviation.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .data import Dataset, NOMINAL, ORDINAL
from .errors import DegenerateColumnError, EditError, SimulationOrderError
from .graphutil import topological_sort
from .model import (
    DEBIAS,
    CausalModel,
    affected_nodes,
    edit_script_hash,
)
from .regress import LinearFit, LogitFit, _softmax, design_matrix


@dataclass(frozen=True)
class SimulationPlan:
    simulated: tuple[str, ...]  # topological order over the directed graph
    copied: tuple[str, ...]  # dataset column order


def build_simulation_plan(model: CausalModel, data: Dataset) -> SimulationPlan:
    v_sim = set(affected_nodes(model))
    topo = topological_sort(model.nodes, model.directed)
    simulated = tuple(v for v in topo if v in v_sim)
    copied = tuple(c for c in data.column_names if c not in v_sim)
    return SimulationPlan(simulated=simulated, copied=copied)


def _node_rng(seed: int, node: str) -> np.random.Generator:
    """Counter-based generator keyed by (seed, node) so per-node draws do
    not depend on simulation order."""
    digest = hashlib.sha256(node.encode()).digest()
    node_key = int.from_bytes(digest[:8], "big")
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, node_key], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _parent_values(partial: dict, parents, node: str) -> np.ndarray:
    missing = [p for p in parents if p not in partial]
    if missing:
        raise SimulationOrderError(f"node {node!r} simulated before parents {missing}")
    return np.column_stack([np.asarray(partial[p], dtype=float) for p in parents])


def simulate_numeric_node(
    model: CausalModel,
    data: Dataset,
    partial: dict,
    node: str,
    seed: int,
    noise_per_row: bool = False,
) -> np.ndarray:
    """Three-term simulation of a numeric/ordinal node (pre-rescale)."""
    fit = model.fits[node]
    assert isinstance(fit, LinearFit), f"{node} has no linear fit"
    X = _parent_values(partial, fit.parents, node)
    Z = (X - fit.parent_means) / fit.parent_stds
    alphas = np.array([model.alpha(p, node) for p in fit.parents])
    values = Z @ (alphas * fit.betas) + fit.intercept

    edited = np.flatnonzero(alphas != 1.0)
    if edited.size:
        y = data.values(node).astype(float)
        mu, sigma = float(y.mean()), float(y.std())
        rng = _node_rng(seed, node)
        n = Z.shape[0]
        if noise_per_row:
            r = rng.normal(mu, sigma, size=(n, 1)).repeat(edited.size, axis=1)
        else:
            r = rng.normal(mu, sigma, size=(n, edited.size))
        weights = (1.0 - alphas[edited]) * fit.betas[edited]
        values = values + r @ weights
    return values


def simulate_categorical_node(
    model: CausalModel,
    data: Dataset,
    partial: dict,
    node: str,
    seed: int,
    noise_per_row: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-class score simulation followed by softmax. Returns (argmax
    codes, probability matrix); the matrix feeds the categorical rescale."""
    fit = model.fits[node]
    assert isinstance(fit, LogitFit), f"{node} has no logit fit"
    X = _parent_values(partial, fit.parents, node)
    Z = (X - fit.parent_means) / fit.parent_stds
    n = Z.shape[0]
    C = len(fit.classes)
    alphas = np.array([model.alpha(p, node) for p in fit.parents])
    scores = Z @ (alphas * fit.coef).T + fit.intercepts

    edited = np.flatnonzero(alphas != 1.0)
    if edited.size:
        # moments of each class's unedited linear predictor on the original data
        S_orig = fit.scores(design_matrix(data, fit.parents))
        mu = S_orig.mean(axis=0)
        sigma = S_orig.std(axis=0)
        rng = _node_rng(seed, node)
        if noise_per_row:
            z = rng.standard_normal(size=(n, 1, 1)).repeat(edited.size, 1).repeat(C - 1, 2)
        else:
            z = rng.standard_normal(size=(n, edited.size, C - 1))
        r = mu[1:] + sigma[1:] * z  # (n, T, C-1)
        w = (1.0 - alphas[edited])[:, None] * fit.coef[1:, edited].T  # (T, C-1)
        scores[:, 1:] += (r * w[None, :, :]).sum(axis=1)
    probs = _softmax(scores)
    return np.argmax(probs, axis=1), probs


def rescale_numeric(values, target_mean: float, target_std: float) -> np.ndarray:
    """Affine map onto the requested mean and population std."""
    arr = np.asarray(values, dtype=float)
    mu, sd = arr.mean(), arr.std()
    if sd == 0.0:
        raise DegenerateColumnError("cannot rescale a zero-variance column")
    return target_mean + (arr - mu) / sd * target_std


def _level_distribution(codes: np.ndarray, n_levels: int, floor: float) -> np.ndarray:
    counts = np.bincount(codes, minlength=n_levels).astype(float)
    dist = counts / counts.sum()
    return np.where(dist == 0.0, floor, dist)


def rescale_categorical(
    prob_mat: np.ndarray,
    original_codes: np.ndarray,
    lr: float = 0.1,
    max_iter: int = 50,
) -> np.ndarray:
    """Iteratively scale per-class probabilities toward the original level
    distribution; stop once the L1 relative gap would increase (the
    worsening scale is discarded) or after ``max_iter`` iterations.
    Returns argmax level codes, ties resolved to the lowest level index.
    """
    mat = np.asarray(prob_mat, dtype=float).copy()
    n, n_levels = mat.shape
    floor = 1.0 / (2.0 * n)
    dist_ori = _level_distribution(np.asarray(original_codes), n_levels, floor)

    dist_deb = _level_distribution(np.argmax(mat, axis=1), n_levels, floor)
    diff = float(np.abs((dist_ori - dist_deb) / dist_deb).sum())
    iterations = 0
    while True:
        scale = 1.0 + lr * (dist_ori - dist_deb) / dist_deb
        candidate = mat * scale
        new_dist = _level_distribution(np.argmax(candidate, axis=1), n_levels, floor)
        new_diff = float(np.abs((dist_ori - new_dist) / new_dist).sum())
        if new_diff > diff:
            break
        mat, dist_deb, diff = candidate, new_dist, new_diff
        if iterations >= max_iter:
            break
        iterations += 1
    return np.argmax(mat, axis=1)


def generate_debiased(
    model: CausalModel,
    data: Dataset,
    seed: int,
    noise_per_row: bool = False,
) -> tuple[Dataset, dict]:
    """Run the four debiasing phases and return (debiased dataset, run
    info). Columns outside the affected set are copied bit-identically."""
    if model.stage != DEBIAS:
        raise EditError("debiased generation requires the debias stage")

    # phase 1: retrain heads of edges added during debias
    fits = dict(model.fits)
    for _, head in sorted(model.added_in_debias):
        from .model import _fit_node

        fits[head] = _fit_node(data, head, model.parents_of(head))
    model = CausalModel(
        nodes=model.nodes,
        directed=model.directed,
        undirected=model.undirected,
        fits=fits,
        alphas=model.alphas,
        added_in_debias=model.added_in_debias,
        stage=model.stage,
        log=model.log,
        initial=model.initial,
    )

    # phase 2: affected nodes and simulation order
    plan = build_simulation_plan(model, data)

    # phase 3: simulate in topological order, copy the rest
    partial: dict[str, np.ndarray] = {c: data.values(c) for c in plan.copied}
    prob_mats: dict[str, np.ndarray] = {}
    for node in plan.simulated:
        try:
            kind = data.column_schema(node).kind
            if kind == NOMINAL:
                codes, probs = simulate_categorical_node(
                    model, data, partial, node, seed, noise_per_row
                )
                partial[node] = codes
                prob_mats[node] = probs
            else:
                partial[node] = simulate_numeric_node(
                    model, data, partial, node, seed, noise_per_row
                )
        except Exception as exc:
            raise type(exc)(f"simulation phase, node {node!r}: {exc}") from exc

    # phase 4: rescale simulated columns toward the original distributions
    new_columns: dict[str, np.ndarray] = {}
    for node in plan.simulated:
        try:
            col = data.column_schema(node)
            if col.kind == NOMINAL:
                new_columns[node] = rescale_categorical(prob_mats[node], data.codes(node))
            elif col.kind == ORDINAL:
                y = data.values(node).astype(float)
                rescaled = rescale_numeric(partial[node], float(y.mean()), float(y.std()))
                snapped = np.clip(np.rint(rescaled), 0, len(col.levels) - 1)
                new_columns[node] = snapped.astype(np.int64)
            else:
                y = data.values(node)
                new_columns[node] = rescale_numeric(
                    partial[node], float(y.mean()), float(y.std())
                )
        except Exception as exc:
            raise type(exc)(f"rescale phase, node {node!r}: {exc}") from exc

    debiased = data.with_columns(new_columns, seed=seed)
    info = {
        "seed": seed,
        "affected_nodes": list(plan.simulated),
        "edit_log_hash": edit_script_hash(model.log),
    }
    return debiased, info
