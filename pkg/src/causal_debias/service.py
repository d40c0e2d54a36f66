"""HTTP session service exposing the refine -> debias -> evaluate loop.

Sessions are held in memory behind per-session locks; every mutation
invalidates the cached debiased dataset and metrics. Optional JSON
snapshots make scripted demos reproducible. Error contract: 404 unknown
ids, 400 malformed bodies, 409 invalid edits (cycles included), 422
metric preconditions.
"""

from __future__ import annotations

import itertools
import json
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Query, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .causal import pc_discover
from .data import Dataset, load_csv, write_csv
from .debias import generate_debiased
from .errors import (
    CausalDebiasError,
    CycleError,
    EditError,
    EmptyGroupError,
    DegenerateColumnError,
    InsufficientDataError,
    ParameterError,
    SchemaError,
)
from .metrics import DEFAULT_K, GroupSpec, evaluate
from .model import (
    CausalModel,
    Edit,
    apply_edit,
    build_model,
    edit_log_view,
    find_paths,
    graph_json,
    model_to_json,
    set_stage,
)

_EDIT_ERRORS = (CycleError, EditError)
_PRECONDITION_ERRORS = (
    EmptyGroupError,
    ParameterError,
    DegenerateColumnError,
    InsufficientDataError,
    SchemaError,
)


@dataclass
class Session:
    id: str
    dataset_id: str
    dataset: Dataset
    model: CausalModel
    debiased: Dataset | None = None
    debias_seed: int | None = None
    debias_info: dict | None = None
    metrics_cache: dict = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)

    def invalidate(self):
        self.debiased = None
        self.debias_seed = None
        self.debias_info = None
        self.metrics_cache.clear()


def create_app(snapshot_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="causal-debias service", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    datasets: dict[str, Dataset] = {}
    dataset_args: dict[str, dict] = {}
    sessions: dict[str, Session] = {}
    counter = itertools.count(1)

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": "malformed request", "detail": exc.errors()})

    def fail(status: int, exc: Exception) -> JSONResponse:
        return JSONResponse(
            status_code=status,
            content={"error": type(exc).__name__, "message": str(exc)},
        )

    def get_session(session_id: str) -> Session:
        if session_id not in sessions:
            raise KeyError(session_id)
        return sessions[session_id]

    def snapshot(sess: Session):
        if snapshot_dir is None:
            return
        path = Path(snapshot_dir) / f"{sess.id}.json"
        doc = {
            "session_id": sess.id,
            "dataset_id": sess.dataset_id,
            "model": model_to_json(sess.model),
            "debias_seed": sess.debias_seed,
        }
        path.write_text(json.dumps(doc, sort_keys=True, indent=2))

    @app.post("/datasets")
    async def post_dataset(
        request: Request,
        label: str = Query(...),
        nominal: str = Query(""),
        ordinal: str = Query(""),
    ):
        body = await request.body()
        nom = [c for c in nominal.split(",") if c]
        orde = [c for c in ordinal.split(",") if c]
        try:
            ds = load_csv(body, label=label, nominal=nom, ordinal=orde)
        except CausalDebiasError as exc:
            return fail(400, exc)
        dataset_id = f"d{next(counter)}"
        datasets[dataset_id] = ds
        dataset_args[dataset_id] = {"label": label, "nominal": nom, "ordinal": orde}
        return {
            "dataset_id": dataset_id,
            "n_rows": ds.n_rows,
            "n_dropped_rows": ds.n_dropped_rows,
            "columns": [c.to_json() for c in ds.schema],
            "label": ds.label_column,
        }

    @app.post("/sessions")
    def post_session(body: dict):
        dataset_id = body.get("dataset_id")
        if dataset_id not in datasets:
            return fail(404, KeyError(f"unknown dataset {dataset_id!r}"))
        ds = datasets[dataset_id]
        try:
            pdag = pc_discover(
                ds,
                p_threshold=float(body.get("p_threshold", 0.01)),
                exclude_label=bool(body.get("exclude_label", False)),
                max_depth=int(body.get("max_depth", 3)),
            )
            model = build_model(ds, pdag)
        except _PRECONDITION_ERRORS as exc:
            return fail(422, exc)
        sess = Session(id=str(uuid.uuid4()), dataset_id=dataset_id, dataset=ds, model=model)
        sessions[sess.id] = sess
        snapshot(sess)
        return {"session_id": sess.id, "pdag": pdag.to_json(), "model": graph_json(model, ds)}

    @app.get("/sessions/{session_id}/model")
    def get_model(session_id: str):
        try:
            sess = get_session(session_id)
        except KeyError as exc:
            return fail(404, exc)
        return graph_json(sess.model, sess.dataset)

    @app.post("/sessions/{session_id}/stage")
    def post_stage(session_id: str, body: dict):
        try:
            sess = get_session(session_id)
        except KeyError as exc:
            return fail(404, exc)
        stage = body.get("stage")
        with sess.lock:
            try:
                new_model = set_stage(sess.model, stage)
            except _EDIT_ERRORS as exc:
                return fail(409, exc)
            if new_model is not sess.model:
                sess.model = new_model
                sess.invalidate()
                snapshot(sess)
        return {"ok": True, "stage": sess.model.stage}

    @app.post("/sessions/{session_id}/edits")
    def post_edit(session_id: str, body: dict):
        try:
            sess = get_session(session_id)
        except KeyError as exc:
            return fail(404, exc)
        try:
            edit = Edit(
                op=body["op"],
                src=body.get("src"),
                dst=body.get("dst"),
                weight_percent=body.get("weight_percent"),
            )
        except KeyError as exc:
            return fail(400, exc)
        with sess.lock:
            try:
                new_model, bic_delta = apply_edit(sess.model, sess.dataset, edit)
            except _EDIT_ERRORS as exc:
                return fail(409, exc)
            except CausalDebiasError as exc:
                return fail(422, exc)
            sess.model = new_model
            sess.invalidate()
            snapshot(sess)
            return {"bic_delta": bic_delta, "model": graph_json(sess.model, sess.dataset)}

    @app.get("/sessions/{session_id}/paths")
    def get_paths(session_id: str, source: str = Query(...), target: str = Query(...)):
        try:
            sess = get_session(session_id)
        except KeyError as exc:
            return fail(404, exc)
        try:
            paths = find_paths(sess.model, source, target)
        except _EDIT_ERRORS as exc:
            return fail(409, exc)
        return {"source": source, "target": target, "paths": paths}

    def _numeric_summary(vals: np.ndarray, edges: np.ndarray) -> dict:
        counts, _ = np.histogram(vals, bins=edges)
        return {"bin_edges": [float(e) for e in edges], "counts": [int(c) for c in counts]}

    def _node_summary(ds: Dataset, node: str, edges: np.ndarray | None) -> dict:
        col = ds.column_schema(node)
        if col.is_categorical:
            counts = np.bincount(ds.codes(node), minlength=len(col.levels))
            return {"type": "bars", "levels": list(col.levels), "counts": [int(c) for c in counts]}
        return {"type": "histogram", **_numeric_summary(ds.values(node), edges)}

    def _edge_summary(ds: Dataset, a: str, b: str, sample_rows: np.ndarray) -> dict:
        ca, cb = ds.column_schema(a), ds.column_schema(b)
        if ca.is_categorical and cb.is_categorical:
            mat = np.zeros((len(ca.levels), len(cb.levels)), dtype=int)
            np.add.at(mat, (ds.codes(a), ds.codes(b)), 1)
            return {
                "type": "grouped_bars",
                "a": a, "b": b,
                "a_levels": list(ca.levels), "b_levels": list(cb.levels),
                "counts": mat.tolist(),
            }
        if not ca.is_categorical and not cb.is_categorical:
            xs, ys = ds.values(a)[sample_rows], ds.values(b)[sample_rows]
            return {
                "type": "scatter",
                "a": a, "b": b,
                "points": [[float(x), float(y)] for x, y in zip(xs, ys)],
            }
        cat, num = (a, b) if ca.is_categorical else (b, a)
        levels = ds.column_schema(cat).levels
        codes, vals = ds.codes(cat), ds.values(num)
        means, stds = [], []
        for i in range(len(levels)):
            sel = vals[codes == i]
            means.append(float(sel.mean()) if sel.size else 0.0)
            stds.append(float(sel.std()) if sel.size else 0.0)
        return {
            "type": "error_bars",
            "category": cat, "numeric": num,
            "levels": list(levels), "means": means, "stds": stds,
        }

    @app.get("/sessions/{session_id}/distributions")
    def get_distributions(session_id: str, node: str | None = None, edge: str | None = None):
        try:
            sess = get_session(session_id)
        except KeyError as exc:
            return fail(404, exc)
        orig = sess.dataset
        deb = sess.debiased if sess.debiased is not None else orig
        try:
            if node is not None:
                edges = None
                if not orig.column_schema(node).is_categorical:
                    edges = np.histogram_bin_edges(orig.values(node), bins=20)
                return {
                    "kind": "node",
                    "name": node,
                    "original": _node_summary(orig, node, edges),
                    "debiased": _node_summary(deb, node, edges),
                    "debiased_available": sess.debiased is not None,
                }
            if edge is not None:
                a, _, b = edge.partition(",")
                if not b:
                    return fail(400, ValueError("edge must be 'src,dst'"))
                n = orig.n_rows
                stride = max(1, n // 400)
                sample_rows = np.arange(0, n, stride)
                return {
                    "kind": "edge",
                    "original": _edge_summary(orig, a, b, sample_rows),
                    "debiased": _edge_summary(deb, a, b, sample_rows),
                    "debiased_available": sess.debiased is not None,
                }
        except SchemaError as exc:
            return fail(422, exc)
        return fail(400, ValueError("pass ?node=X or ?edge=A,B"))

    @app.post("/sessions/{session_id}/debias")
    def post_debias(session_id: str, body: dict):
        try:
            sess = get_session(session_id)
        except KeyError as exc:
            return fail(404, exc)
        seed = int(body.get("seed", 0))
        with sess.lock:
            try:
                model = set_stage(sess.model, "debias")
                debiased, info = generate_debiased(model, sess.dataset, seed=seed)
            except _EDIT_ERRORS as exc:
                return fail(409, exc)
            except CausalDebiasError as exc:
                return fail(422, exc)
            sess.model = model
            sess.debiased = debiased
            sess.debias_seed = seed
            sess.debias_info = info
            sess.metrics_cache.clear()
            snapshot(sess)
            return {"run_id": f"{sess.id}:{seed}", "seed": seed, "affected_nodes": info["affected_nodes"]}

    @app.post("/sessions/{session_id}/evaluate")
    def post_evaluate(session_id: str, body: dict):
        try:
            sess = get_session(session_id)
        except KeyError as exc:
            return fail(404, exc)
        try:
            groups = GroupSpec.from_json(body["groups"])
        except (KeyError, TypeError, ValueError) as exc:
            return fail(400, exc)
        classifier = body.get("classifier", "logistic")
        k = int(body.get("k", DEFAULT_K))
        seed = int(body.get("seed", 0))
        favorable = body.get("favorable")
        with sess.lock:
            cache_key = json.dumps(
                [groups.to_json(), classifier, k, seed, favorable, sess.debias_seed], sort_keys=True
            )
            if cache_key in sess.metrics_cache:
                return sess.metrics_cache[cache_key]
            if sess.debiased is None:
                try:
                    model = set_stage(sess.model, "debias")
                    debiased, info = generate_debiased(model, sess.dataset, seed=seed)
                except CausalDebiasError as exc:
                    return fail(422, exc)
                sess.model = model
                sess.debiased, sess.debias_seed, sess.debias_info = debiased, seed, info
            try:
                report = evaluate(
                    sess.dataset,
                    sess.debiased,
                    groups,
                    classifier=classifier,
                    k=k,
                    seed=seed,
                    favorable=favorable,
                )
            except _PRECONDITION_ERRORS as exc:
                return fail(422, exc)
            sess.metrics_cache[cache_key] = report
            return report

    @app.get("/sessions/{session_id}/debiased.csv")
    def get_debiased_csv(session_id: str):
        try:
            sess = get_session(session_id)
        except KeyError as exc:
            return fail(404, exc)
        with sess.lock:
            if sess.debiased is None:
                try:
                    model = set_stage(sess.model, "debias")
                    debiased, info = generate_debiased(model, sess.dataset, seed=0)
                except CausalDebiasError as exc:
                    return fail(422, exc)
                sess.model = model
                sess.debiased, sess.debias_seed, sess.debias_info = debiased, 0, info
            text = write_csv(sess.debiased)
        return Response(
            content=text,
            media_type="text/csv",
            headers={"Content-Disposition": "attachment; filename=debiased.csv"},
        )

    @app.get("/sessions/{session_id}/logs")
    def get_logs(session_id: str):
        try:
            sess = get_session(session_id)
        except KeyError as exc:
            return fail(404, exc)
        view = edit_log_view(sess.model)
        if sess.debias_info is not None:
            view["last_debias"] = sess.debias_info
        return view

    return app


app = create_app()


def main():  # pragma: no cover
    import uvicorn

    uvicorn.run(app, host="127.0.0.1", port=8000)


if __name__ == "__main__":  # pragma: no cover
    main()
