"""Batch front-end: discovery, edit scripts, debiasing, evaluation, synth.

All commands exit 0 on success and nonzero with a machine-readable JSON
error on stderr otherwise. Outputs are deterministic for fixed flags; the
edit-script JSON schema is the same one the HTTP service accepts, so UI
sessions can be exported and replayed headlessly.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from .causal import pc_discover
from .data import load_csv, write_csv
from .debias import generate_debiased
from .errors import CausalDebiasError
from .metrics import DEFAULT_K, GroupSpec, evaluate
from .model import (
    Edit,
    apply_edit,
    build_model,
    model_from_json,
    model_to_json,
    set_stage,
)
from .synth import SyntheticSpec, default_hiring_spec, generate_synthetic

SEED_ENV = "CAUSAL_DEBIAS_SEED"


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _die(exc: Exception):
    sys.stderr.write(canonical_json({"error": type(exc).__name__, "message": str(exc)}))
    sys.exit(1)


def _default_seed() -> int:
    return int(os.environ.get(SEED_ENV, "0"))


def _load_dataset(path: str, label: str, nominal: str, ordinal: str):
    nom = [c for c in nominal.split(",") if c]
    orde = [c for c in ordinal.split(",") if c]
    return load_csv(path, label=label, nominal=nom, ordinal=orde), {
        "label": label,
        "nominal": nom,
        "ordinal": orde,
    }


def _load_model_doc(path: str):
    doc = json.loads(Path(path).read_text())
    return doc


def _dataset_from_model_doc(doc: dict, data_path: str):
    args = doc.get("data_args", {})
    if "label" not in args:
        raise CausalDebiasError("model file lacks data_args; cannot reload the dataset")
    return load_csv(
        data_path,
        label=args["label"],
        nominal=args.get("nominal", []),
        ordinal=args.get("ordinal", []),
    )


@click.group()
def main():
    """Causal data-debiasing toolkit."""


@main.command()
@click.option("--data", "data_path", required=True, type=click.Path(exists=True))
@click.option("--label", required=True)
@click.option("--nominal", default="", help="comma-separated nominal columns")
@click.option("--ordinal", default="", help="comma-separated ordinal columns")
@click.option("--p", "p_threshold", default=0.01, show_default=True)
@click.option("--max-depth", default=3, show_default=True)
@click.option("--exclude-label", is_flag=True, default=False)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--json", "json_out", is_flag=True, default=False, help="structured stdout")
def discover(data_path, label, nominal, ordinal, p_threshold, max_depth, exclude_label, out_path, json_out):
    """Run structure discovery and write a replayable model file."""
    try:
        data, data_args = _load_dataset(data_path, label, nominal, ordinal)
        pdag = pc_discover(
            data, p_threshold=p_threshold, exclude_label=exclude_label, max_depth=max_depth
        )
        model = build_model(data, pdag)
        doc = model_to_json(model)
        doc["data_args"] = data_args
        Path(out_path).write_text(canonical_json(doc))
    except CausalDebiasError as exc:
        _die(exc)
    summary = {
        "nodes": len(pdag.nodes),
        "directed_edges": len(pdag.directed),
        "undirected_edges": len(pdag.undirected),
        "total_bic": model.total_bic,
        "out": str(out_path),
    }
    click.echo(canonical_json(summary) if json_out else
               f"pdag: {summary['directed_edges']} directed, {summary['undirected_edges']} undirected "
               f"edges over {summary['nodes']} nodes; total BIC {model.total_bic:.2f} -> {out_path}")


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--data", "data_path", required=True, type=click.Path(exists=True))
@click.option("--script", "script_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--json", "json_out", is_flag=True, default=False)
def edit(model_path, data_path, script_path, out_path, json_out):
    """Apply an edit script, printing the BIC delta of every edit."""
    try:
        doc = _load_model_doc(model_path)
        data = _dataset_from_model_doc(doc, data_path)
        model = model_from_json(doc, data)
        script = json.loads(Path(script_path).read_text())
        edits = [Edit.from_json(e) for e in script.get("edits", script if isinstance(script, list) else [])]
        deltas = []
        for e in edits:
            if e.op != "stage" and e.stage != model.stage:
                model = set_stage(model, e.stage)
            model, delta = apply_edit(model, data, e)
            deltas.append({"edit": e.to_json(), "bic_delta": delta})
        out_doc = model_to_json(model)
        out_doc["data_args"] = doc.get("data_args", {})
        Path(out_path).write_text(canonical_json(out_doc))
    except CausalDebiasError as exc:
        _die(exc)
    if json_out:
        click.echo(canonical_json({"deltas": deltas, "total_bic": model.total_bic, "out": str(out_path)}))
    else:
        for d in deltas:
            e = d["edit"]
            label = f"{e['op']} {e.get('src','')}->{e.get('dst','')}".strip()
            click.echo(f"{label}: bic_delta {d['bic_delta']:+.4f}")
        click.echo(f"total BIC {model.total_bic:.2f} -> {out_path}")


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--data", "data_path", required=True, type=click.Path(exists=True))
@click.option("--seed", default=None, type=int, help=f"defaults to ${SEED_ENV} or 0")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--json", "json_out", is_flag=True, default=False)
def debias(model_path, data_path, seed, out_path, json_out):
    """Generate the debiased CSV plus a metadata sidecar."""
    seed = _default_seed() if seed is None else seed
    try:
        doc = _load_model_doc(model_path)
        data = _dataset_from_model_doc(doc, data_path)
        model = set_stage(model_from_json(doc, data), "debias")
        debiased, info = generate_debiased(model, data, seed=seed)
        write_csv(debiased, out_path)
        sidecar = Path(str(out_path) + ".meta.json")
        sidecar.write_text(canonical_json(info))
    except CausalDebiasError as exc:
        _die(exc)
    if json_out:
        click.echo(canonical_json({"out": str(out_path), **info}))
    else:
        click.echo(f"debiased {len(info['affected_nodes'])} column(s) {info['affected_nodes']} -> {out_path}")


@main.command()
@click.option("--original", "original_path", required=True, type=click.Path(exists=True))
@click.option("--debiased", "debiased_path", required=True, type=click.Path(exists=True))
@click.option("--label", required=True)
@click.option("--nominal", default="")
@click.option("--ordinal", default="")
@click.option("--group-col", default=None, help="binary sensitive column")
@click.option("--privileged", default=None, help="privileged level of --group-col")
@click.option("--custom-groups", "custom_path", default=None, type=click.Path(exists=True),
              help="JSON file with group_a/group_b selections")
@click.option("--classifier", default="logistic", show_default=True)
@click.option("--k", default=DEFAULT_K, show_default=True)
@click.option("--seed", default=None, type=int)
@click.option("--favorable", default=None, help="favorable label level (default: second level)")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--json", "json_out", is_flag=True, default=False)
def evaluate_cmd(original_path, debiased_path, label, nominal, ordinal, group_col, privileged,
                 custom_path, classifier, k, seed, favorable, out_path, json_out):
    """Compare original vs debiased datasets on fairness/utility/distortion."""
    seed = _default_seed() if seed is None else seed
    try:
        original, _ = _load_dataset(original_path, label, nominal, ordinal)
        debiased, _ = _load_dataset(debiased_path, label, nominal, ordinal)
        if custom_path is not None:
            groups = GroupSpec.from_json(json.loads(Path(custom_path).read_text()))
        elif group_col and privileged is not None:
            groups = GroupSpec.simple(group_col, privileged)
        else:
            raise CausalDebiasError("pass --group-col/--privileged or --custom-groups")
        report = evaluate(
            original, debiased, groups, classifier=classifier, k=k, seed=seed, favorable=favorable
        )
        Path(out_path).write_text(canonical_json(report))
    except CausalDebiasError as exc:
        _die(exc)
    if json_out:
        click.echo(canonical_json(report))
    else:
        o, d = report["original"], report["debiased"]
        click.echo(
            f"parity {o['parity_diff']:.2f} -> {d['parity_diff']:.2f} | "
            f"accuracy {o['accuracy']*100:.1f} -> {d['accuracy']*100:.1f} | "
            f"distortion {d['distortion']*100:.1f}% -> {out_path}"
        )


main.add_command(evaluate_cmd, name="evaluate")


@main.command()
@click.option("--spec", "spec_path", default=None, type=click.Path(exists=True),
              help="synthetic spec JSON; defaults to the bundled hiring fixture")
@click.option("--seed", default=None, type=int)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--dump-spec", default=None, type=click.Path(),
              help="also write the effective spec JSON here")
@click.option("--json", "json_out", is_flag=True, default=False)
def synth(spec_path, seed, out_path, dump_spec, json_out):
    """Generate a synthetic dataset from a spec."""
    seed = _default_seed() if seed is None else (seed if seed is not None else 1)
    try:
        if spec_path is None:
            spec = default_hiring_spec()
        else:
            spec = SyntheticSpec.from_json(Path(spec_path).read_text())
        ds = generate_synthetic(spec, seed=seed)
        write_csv(ds, out_path)
        if dump_spec:
            Path(dump_spec).write_text(canonical_json(spec.to_json()))
    except CausalDebiasError as exc:
        _die(exc)
    if json_out:
        click.echo(canonical_json({"rows": ds.n_rows, "columns": len(ds.schema), "out": str(out_path)}))
    else:
        click.echo(f"{ds.n_rows} rows x {len(ds.schema)} columns -> {out_path}")


if __name__ == "__main__":  # pragma: no cover
    main()
