"""Synthetic tabular data generator driven by a JSON-editable spec.

A spec lists nodes in generation order. Exogenous categorical nodes draw
from a binomial over level indices (optionally skewed by a per-level
``sampling_bias``); exogenous numeric nodes draw uniform(a, b). Endogenous
nodes compute a linear score over z-scored parent columns plus Gaussian
noise: numeric nodes emit ``offset + score`` directly, categorical nodes
are cut into levels at the score's rank quantiles so level proportions hit
``rates`` exactly. Latent nodes participate as parents but are dropped
from the output. Generation is a pure function of (spec, seed).

Spec JSON schema::

    {
      "n_rows": 4000,
      "label": "job",
      "sampling_bias": {"gender": [0.4, 0.6]},
      "nodes": [
        {"name": "gender", "kind": "nominal", "levels": ["Female", "Male"],
         "exogenous": {"dist": "binomial", "p": 0.5}},
        {"name": "age", "kind": "numeric",
         "exogenous": {"dist": "uniform", "a": 22, "b": 60}},
        {"name": "aptitude", "kind": "numeric", "latent": true,
         "exogenous": {"dist": "uniform", "a": 0, "b": 1}},
        {"name": "sat", "kind": "numeric",
         "endogenous": {"parents": ["aptitude"], "weights": [160.0],
                         "noise_std": 60.0, "offset": 1100.0}},
        {"name": "job", "kind": "nominal", "levels": ["no", "yes"],
         "endogenous": {"parents": ["gender", "sat"], "weights": [0.3, 0.9],
                         "noise_std": 1.0, "rates": [0.8, 0.2]}}
      ]
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .data import NUMERIC, ColumnSchema, Dataset
from .errors import CycleError, SchemaError

_HIRING_FIXTURE = "hiring_default.json"


@dataclass(frozen=True)
class NodeSpec:
    name: str
    kind: str
    levels: tuple[str, ...] = ()
    latent: bool = False
    exogenous: dict | None = None
    endogenous: dict | None = None

    @property
    def parents(self) -> tuple[str, ...]:
        if self.endogenous is None:
            return ()
        return tuple(self.endogenous["parents"])


@dataclass(frozen=True)
class SyntheticSpec:
    n_rows: int
    nodes: tuple[NodeSpec, ...]
    label: str
    sampling_bias: dict[str, list[float]] = field(default_factory=dict)

    @classmethod
    def from_json(cls, doc: str | dict) -> "SyntheticSpec":
        if isinstance(doc, str):
            doc = json.loads(doc)
        nodes = tuple(
            NodeSpec(
                name=n["name"],
                kind=n["kind"],
                levels=tuple(n.get("levels", ())),
                latent=bool(n.get("latent", False)),
                exogenous=n.get("exogenous"),
                endogenous=n.get("endogenous"),
            )
            for n in doc["nodes"]
        )
        return cls(
            n_rows=int(doc["n_rows"]),
            nodes=nodes,
            label=doc["label"],
            sampling_bias={k: list(v) for k, v in doc.get("sampling_bias", {}).items()},
        )

    def to_json(self) -> dict:
        nodes = []
        for n in self.nodes:
            d = {"name": n.name, "kind": n.kind}
            if n.levels:
                d["levels"] = list(n.levels)
            if n.latent:
                d["latent"] = True
            if n.exogenous is not None:
                d["exogenous"] = n.exogenous
            if n.endogenous is not None:
                d["endogenous"] = n.endogenous
            nodes.append(d)
        return {
            "n_rows": self.n_rows,
            "label": self.label,
            "sampling_bias": self.sampling_bias,
            "nodes": nodes,
        }

    def true_edges(self) -> set[tuple[str, str]]:
        """Directed parent->child links between non-latent nodes."""
        latent = {n.name for n in self.nodes if n.latent}
        edges = set()
        for n in self.nodes:
            if n.latent:
                continue
            for p in n.parents:
                if p not in latent:
                    edges.add((p, n.name))
        return edges


def _generation_order(spec: SyntheticSpec) -> list[NodeSpec]:
    by_name = {n.name: n for n in spec.nodes}
    for n in spec.nodes:
        for p in n.parents:
            if p not in by_name:
                raise SchemaError(f"node {n.name!r} has unknown parent {p!r}")
    order, done, visiting = [], set(), set()

    def visit(node: NodeSpec):
        if node.name in done:
            return
        if node.name in visiting:
            raise CycleError(f"node dependencies contain a cycle through {node.name!r}")
        visiting.add(node.name)
        for p in node.parents:
            visit(by_name[p])
        visiting.discard(node.name)
        done.add(node.name)
        order.append(node)

    for n in spec.nodes:
        visit(n)
    return order


def _zscore(values: np.ndarray) -> np.ndarray:
    std = values.std()
    if std == 0.0:
        return np.zeros_like(values, dtype=float)
    return (values - values.mean()) / std


def _cut_by_rank(score: np.ndarray, rates: list[float]) -> np.ndarray:
    """Assign level codes so the realized proportions match ``rates``
    exactly; ties broken by row order via stable sort."""
    n = len(score)
    bounds = np.rint(np.cumsum(rates) * n).astype(int)
    bounds[-1] = n
    order = np.argsort(score, kind="stable")
    codes = np.empty(n, dtype=np.int64)
    start = 0
    for level, stop in enumerate(bounds):
        codes[order[start:stop]] = level
        start = stop
    return codes


def generate_synthetic(spec: SyntheticSpec, seed: int) -> Dataset:
    """Materialize the spec into a Dataset; latent columns are dropped."""
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    n = spec.n_rows
    generated: dict[str, np.ndarray] = {}

    for node in _generation_order(spec):
        if node.exogenous is not None:
            dist = node.exogenous
            if dist["dist"] == "binomial":
                n_levels = max(len(node.levels), 2) if node.kind != NUMERIC else 2
                trials = int(dist.get("n", n_levels - 1))
                base = np.array(
                    [_binom_pmf(k, trials, float(dist["p"])) for k in range(trials + 1)]
                )
                skew = spec.sampling_bias.get(node.name)
                if skew is not None:
                    base = base * np.asarray(skew, dtype=float)
                    base = base / base.sum()
                generated[node.name] = rng.choice(trials + 1, size=n, p=base).astype(np.int64)
            elif dist["dist"] == "uniform":
                generated[node.name] = rng.uniform(float(dist["a"]), float(dist["b"]), size=n)
            else:
                raise SchemaError(f"unknown distribution {dist['dist']!r}")
        else:
            endo = node.endogenous
            score = np.zeros(n)
            for parent, w in zip(endo["parents"], endo["weights"]):
                score += float(w) * _zscore(generated[parent].astype(float))
            score += rng.normal(0.0, 1.0, size=n) * float(endo.get("noise_std", 0.0))
            if node.kind == NUMERIC:
                generated[node.name] = score + float(endo.get("offset", 0.0))
            else:
                generated[node.name] = _cut_by_rank(score, endo["rates"])

    schema: list[ColumnSchema] = []
    columns: dict[str, np.ndarray] = {}
    for node in spec.nodes:
        if node.latent:
            continue
        vals = generated[node.name]
        if node.kind == NUMERIC:
            schema.append(
                ColumnSchema(node.name, NUMERIC, range=(float(vals.min()), float(vals.max())))
            )
        else:
            schema.append(ColumnSchema(node.name, node.kind, levels=node.levels))
        columns[node.name] = vals
    return Dataset(
        schema=tuple(schema), columns=columns, label_column=spec.label, seed=seed
    )


def _binom_pmf(k: int, trials: int, p: float) -> float:
    from math import comb

    return comb(trials, k) * p**k * (1 - p) ** (trials - k)


def default_hiring_spec() -> SyntheticSpec:
    """The bundled hiring-scenario fixture (4000 rows, 9 output columns)."""
    text = resources.files("causal_debias.fixtures").joinpath(_HIRING_FIXTURE).read_text()
    return SyntheticSpec.from_json(text)


def generate_synthetic_hiring(spec: SyntheticSpec | None = None, seed: int = 1) -> Dataset:
    return generate_synthetic(spec or default_hiring_spec(), seed)
