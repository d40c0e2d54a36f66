"""Editable causal-model sessions: structure edits, fits, scale factors.

A model starts in the refine stage, where structural edits (add, delete,
reverse, direct) change the directed graph and refit affected nodes,
reporting the change in total BIC. In the debias stage, delete/reweight
only set the per-edge scale factor alpha (the edge keeps its fitted
coefficient; simulation decides what alpha means), while add refits the
head node. Every accepted edit is logged; replaying the log against a
freshly built model reproduces the current state exactly.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace

import numpy as np

from .causal import Pdag
from .data import Dataset, NOMINAL
from .errors import CycleError, EditError
from .graphutil import creates_cycle, descendants, simple_directed_paths
from .regress import LinearFit, LogitFit, bic, fit_linear, fit_logit

REFINE = "refine"
DEBIAS = "debias"

_STRUCTURAL_OPS = ("add", "delete", "reverse", "direct")


@dataclass(frozen=True)
class Edit:
    op: str  # add | delete | reverse | direct | reweight | stage
    src: str | None = None
    dst: str | None = None
    weight_percent: int | None = None
    stage: str = REFINE  # stage at edit time; target stage for op == "stage"

    def to_json(self) -> dict:
        out = {"op": self.op, "stage": self.stage}
        if self.src is not None:
            out["src"] = self.src
            out["dst"] = self.dst
        if self.weight_percent is not None:
            out["weight_percent"] = self.weight_percent
        return out

    @classmethod
    def from_json(cls, doc: dict) -> "Edit":
        return cls(
            op=doc["op"],
            src=doc.get("src"),
            dst=doc.get("dst"),
            weight_percent=doc.get("weight_percent"),
            stage=doc.get("stage", REFINE),
        )


@dataclass(frozen=True, eq=False)
class CausalModel:
    nodes: tuple[str, ...]
    directed: frozenset  # structural directed edges, including alpha=0 ones
    undirected: frozenset  # inert during fitting and simulation
    fits: dict  # node -> LinearFit | LogitFit
    alphas: dict  # (src, dst) -> float, only entries != 1 are stored
    added_in_debias: frozenset
    stage: str
    log: tuple[Edit, ...]
    initial: Pdag

    @property
    def total_bic(self) -> float:
        return float(sum(bic(f) for f in self.fits.values()))

    def alpha(self, src: str, dst: str) -> float:
        return self.alphas.get((src, dst), 1.0)

    def parents_of(self, node: str) -> tuple[str, ...]:
        return tuple(sorted(src for src, dst in self.directed if dst == node))

    def modified_in_debias(self) -> frozenset:
        """E_m: edges deleted, weakened or strengthened during debias."""
        return frozenset(e for e, a in self.alphas.items() if a != 1.0)

    def deleted_in_debias(self) -> frozenset:
        return frozenset(e for e, a in self.alphas.items() if a == 0.0)


def _fit_node(data: Dataset, node: str, parents: tuple[str, ...]):
    try:
        if data.column_schema(node).kind == NOMINAL:
            return fit_logit(data, node, parents)
        return fit_linear(data, node, parents)
    except Exception as exc:
        raise type(exc)(f"fitting node {node!r}: {exc}") from exc


def build_model(data: Dataset, pdag: Pdag) -> CausalModel:
    """Fit a structural equation for every node with at least one directed
    parent; undirected edges contribute to no fit. Starts in refine stage."""
    directed = frozenset(pdag.directed)
    fits = {}
    for node in pdag.nodes:
        parents = tuple(sorted(src for src, dst in directed if dst == node))
        if parents:
            fits[node] = _fit_node(data, node, parents)
    return CausalModel(
        nodes=tuple(pdag.nodes),
        directed=directed,
        undirected=frozenset(pdag.undirected),
        fits=fits,
        alphas={},
        added_in_debias=frozenset(),
        stage=REFINE,
        log=(),
        initial=pdag,
    )


def set_stage(model: CausalModel, stage: str) -> CausalModel:
    """Toggle refine/debias. Leaving debias resets every alpha to 1 and
    empties the debias bookkeeping; edges added during debias stay in the
    graph as ordinary structural edges."""
    if stage not in (REFINE, DEBIAS):
        raise EditError(f"unknown stage {stage!r}")
    if stage == model.stage:
        return model
    entry = Edit(op="stage", stage=stage)
    if stage == REFINE:
        return replace(
            model,
            stage=REFINE,
            alphas={},
            added_in_debias=frozenset(),
            log=model.log + (entry,),
        )
    return replace(model, stage=DEBIAS, log=model.log + (entry,))


def _check_nodes(model: CausalModel, *names):
    for n in names:
        if n not in model.nodes:
            raise EditError(f"unknown node {n!r}")


def _undirected_key(a: str, b: str) -> tuple[str, str]:
    return (min(a, b), max(a, b))


def _refit(model: CausalModel, data: Dataset, directed: frozenset, nodes_to_refit) -> dict:
    fits = dict(model.fits)
    for node in nodes_to_refit:
        parents = tuple(sorted(src for src, dst in directed if dst == node))
        if parents:
            fits[node] = _fit_node(data, node, parents)
        else:
            fits.pop(node, None)
    return fits


def apply_edit(model: CausalModel, data: Dataset, edit: Edit) -> tuple[CausalModel, float]:
    """Apply one edit, returning the new model and the BIC delta. Rejected
    edits raise and leave the input model untouched."""
    op = edit.op
    if op == "stage":
        return set_stage(model, edit.stage), 0.0
    if op not in (*_STRUCTURAL_OPS, "reweight"):
        raise EditError(f"unknown op {op!r}")
    src, dst = edit.src, edit.dst
    if src is None or dst is None or src == dst:
        raise EditError("edit needs two distinct endpoint nodes")
    _check_nodes(model, src, dst)

    old_bic = model.total_bic
    ukey = _undirected_key(src, dst)
    has_any = (src, dst) in model.directed or (dst, src) in model.directed or ukey in model.undirected

    logged = replace(edit, stage=model.stage)
    if model.stage == REFINE:
        if op == "reweight":
            raise EditError("reweight is only valid in the debias stage")
        if op == "add":
            if has_any:
                raise EditError(f"edge between {src!r} and {dst!r} already exists")
            if creates_cycle(model.nodes, model.directed, (src, dst)):
                raise CycleError(f"adding {src}->{dst} would close a directed cycle")
            directed = model.directed | {(src, dst)}
            fits = _refit(model, data, directed, [dst])
            new = replace(model, directed=directed, fits=fits, log=model.log + (logged,))
        elif op == "delete":
            if (src, dst) in model.directed:
                directed = model.directed - {(src, dst)}
                fits = _refit(model, data, directed, [dst])
                new = replace(model, directed=directed, fits=fits, log=model.log + (logged,))
            elif ukey in model.undirected:
                new = replace(model, undirected=model.undirected - {ukey}, log=model.log + (logged,))
            else:
                raise EditError(f"no edge between {src!r} and {dst!r}")
        elif op == "reverse":
            if (src, dst) not in model.directed:
                raise EditError(f"reverse requires an existing directed edge {src}->{dst}")
            directed = model.directed - {(src, dst)}
            if creates_cycle(model.nodes, directed, (dst, src)):
                raise CycleError(f"reversing to {dst}->{src} would close a directed cycle")
            directed = directed | {(dst, src)}
            fits = _refit(model, data, directed, [src, dst])
            new = replace(model, directed=directed, fits=fits, log=model.log + (logged,))
        elif op == "direct":
            if ukey not in model.undirected:
                raise EditError(f"direct requires an undirected edge between {src!r} and {dst!r}")
            if creates_cycle(model.nodes, model.directed, (src, dst)):
                raise CycleError(f"directing {src}->{dst} would close a directed cycle")
            directed = model.directed | {(src, dst)}
            fits = _refit(model, data, directed, [dst])
            new = replace(
                model,
                directed=directed,
                undirected=model.undirected - {ukey},
                fits=fits,
                log=model.log + (logged,),
            )
        return new, new.total_bic - old_bic

    # debias stage: delete/reweight are pure alpha changes, add refits
    if op in ("reverse", "direct"):
        raise EditError(f"{op} is a refine-stage operation; switch stages first")
    if op == "add":
        if has_any:
            raise EditError(f"edge between {src!r} and {dst!r} already exists")
        if creates_cycle(model.nodes, model.directed, (src, dst)):
            raise CycleError(f"adding {src}->{dst} would close a directed cycle")
        directed = model.directed | {(src, dst)}
        fits = _refit(model, data, directed, [dst])
        new = replace(
            model,
            directed=directed,
            fits=fits,
            added_in_debias=model.added_in_debias | {(src, dst)},
            log=model.log + (logged,),
        )
        return new, new.total_bic - old_bic
    if op == "reweight":
        wp = edit.weight_percent
        if wp is None or not -100 <= int(wp) <= 100:
            raise EditError("weight_percent must be an integer in [-100, 100]")
        if (src, dst) not in model.directed:
            raise EditError(f"reweight requires a directed edge {src}->{dst}")
        if int(wp) == -100:
            logged = replace(logged, op="delete", weight_percent=None)
            op = "delete"
        else:
            alphas = dict(model.alphas)
            a = 1.0 + int(wp) / 100.0
            if a == 1.0:
                alphas.pop((src, dst), None)
            else:
                alphas[(src, dst)] = a
            new = replace(model, alphas=alphas, log=model.log + (logged,))
            return new, 0.0
    if op == "delete":
        if (src, dst) in model.added_in_debias:
            # true inverse of a debias-stage add: remove it outright
            directed = model.directed - {(src, dst)}
            fits = _refit(model, data, directed, [dst])
            alphas = dict(model.alphas)
            alphas.pop((src, dst), None)
            new = replace(
                model,
                directed=directed,
                fits=fits,
                alphas=alphas,
                added_in_debias=model.added_in_debias - {(src, dst)},
                log=model.log + (logged,),
            )
            return new, new.total_bic - old_bic
        if (src, dst) not in model.directed:
            raise EditError(f"no directed edge {src}->{dst} to delete")
        alphas = dict(model.alphas)
        alphas[(src, dst)] = 0.0
        new = replace(model, alphas=alphas, log=model.log + (logged,))
        return new, 0.0
    raise EditError(f"unsupported op {op!r} in debias stage")


def find_paths(model: CausalModel, source: str, target: str) -> list[list[str]]:
    """All simple directed paths source -> target over structural edges
    (undirected edges are never traversed), lexicographically ordered."""
    if source == target:
        raise EditError("source and target must differ")
    _check_nodes(model, source, target)
    return simple_directed_paths(model.nodes, model.directed, source, target)


def affected_nodes(model: CausalModel) -> tuple[str, ...]:
    """V_sim: heads of debias-touched edges plus all their descendants on
    the current directed graph."""
    heads = {dst for _, dst in model.added_in_debias | model.modified_in_debias()}
    out = set()
    for h in sorted(heads):
        out.add(h)
        out |= descendants(model.nodes, model.directed, h)
    return tuple(sorted(out))


def edit_log_view(model: CausalModel) -> dict:
    """Read-only projection of the log: debias-stage additions, deletions
    and reweights plus the affected-node set."""
    entries = [e.to_json() for e in model.log]
    modified = []
    for (src, dst) in sorted(model.modified_in_debias()):
        a = model.alpha(src, dst)
        kind = "deleted" if a == 0.0 else ("weakened" if a < 1.0 else "strengthened")
        modified.append({"src": src, "dst": dst, "alpha": a, "kind": kind})
    return {
        "entries": entries,
        "added": [{"src": s, "dst": d} for s, d in sorted(model.added_in_debias)],
        "modified": modified,
        "affected_nodes": list(affected_nodes(model)),
        "stage": model.stage,
    }


def display_weight(model: CausalModel, src: str, dst: str):
    """Signed standardized coefficient for edge width/color; multi-class
    targets report the mean absolute coefficient (sign undefined)."""
    fit = model.fits.get(dst)
    if fit is None or src not in fit.parents:
        return None, False
    idx = fit.parents.index(src)
    if isinstance(fit, LinearFit):
        return float(fit.standardized_betas()[idx]), False
    assert isinstance(fit, LogitFit)
    if len(fit.classes) == 2:
        return float(fit.coef[1, idx]), False
    return float(np.mean(np.abs(fit.coef[1:, idx]))), True


def _fit_summary(fit) -> dict:
    base = {
        "target": fit.target,
        "parents": list(fit.parents),
        "n": fit.n,
        "k": fit.k,
        "log_likelihood": fit.log_likelihood,
        "bic": bic(fit),
    }
    if isinstance(fit, LinearFit):
        base.update(
            kind="linear",
            betas=[float(b) for b in fit.betas],
            standardized_betas=[float(b) for b in fit.standardized_betas()],
            intercept=fit.intercept,
            residual_std=fit.residual_std,
        )
    else:
        base.update(
            kind="logit",
            classes=list(fit.classes),
            coefficients=[[float(v) for v in row] for row in fit.coef],
            intercepts=[float(v) for v in fit.intercepts],
            converged=fit.converged,
        )
    return base


def graph_json(model: CausalModel, data: Dataset | None = None) -> dict:
    """Serializable view of the current graph: edges with direction,
    alpha, display weight, per-node fit summaries and the total BIC."""
    edges = []
    for src, dst in sorted(model.directed):
        w, multi = display_weight(model, src, dst)
        alpha = model.alpha(src, dst)
        edges.append(
            {
                "src": src,
                "dst": dst,
                "directed": True,
                "alpha": alpha,
                "weight": w,
                "effective_weight": None if w is None else alpha * w,
                "multi_class": multi,
                "added_in_debias": (src, dst) in model.added_in_debias,
                "deleted_in_debias": alpha == 0.0,
            }
        )
    for a, b in sorted(model.undirected):
        edges.append(
            {
                "src": a,
                "dst": b,
                "directed": False,
                "alpha": None,
                "weight": None,
                "effective_weight": None,
                "multi_class": False,
                "added_in_debias": False,
                "deleted_in_debias": False,
            }
        )
    nodes = []
    for n in model.nodes:
        entry = {"name": n}
        if data is not None:
            col = data.column_schema(n)
            entry["kind"] = col.kind
            entry["is_label"] = n == data.label_column
        nodes.append(entry)
    return {
        "nodes": nodes,
        "edges": edges,
        "fits": {node: _fit_summary(f) for node, f in sorted(model.fits.items())},
        "total_bic": model.total_bic,
        "stage": model.stage,
    }


def model_to_json(model: CausalModel) -> dict:
    """Replayable persistent form: the discovery-time graph plus the log."""
    return {
        "format_version": 1,
        "initial_pdag": model.initial.to_json(),
        "edits": [e.to_json() for e in model.log],
        "stage": model.stage,
    }


def model_from_json(doc: dict, data: Dataset) -> CausalModel:
    """Rebuild by replaying the edit log against a fresh build. The replay
    is deterministic, so two loads of the same document are identical."""
    pdag = Pdag.from_json(doc["initial_pdag"])
    model = build_model(data, pdag)
    for edoc in doc.get("edits", []):
        edit = Edit.from_json(edoc)
        if edit.op != "stage" and edit.stage != model.stage:
            model = set_stage(model, edit.stage)
        model, _ = apply_edit(model, data, edit)
    if model.stage != doc.get("stage", model.stage):
        model = set_stage(model, doc["stage"])
    return model


def edit_script_hash(edits) -> str:
    doc = json.dumps([e.to_json() for e in edits], sort_keys=True)
    return hashlib.sha256(doc.encode()).hexdigest()
