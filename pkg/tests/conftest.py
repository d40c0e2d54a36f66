import numpy as np
import pytest

from causal_debias.data import ColumnSchema, Dataset, NOMINAL, NUMERIC
from causal_debias.synth import default_hiring_spec, generate_synthetic

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line.rstrip())


def make_dataset(columns: dict, label: str, kinds: dict | None = None,
                 levels: dict | None = None, seed: int = 0) -> Dataset:
    """Assemble an in-memory Dataset. Numeric columns pass float arrays;
    categorical columns pass integer codes plus a levels entry."""
    kinds = kinds or {}
    levels = levels or {}
    schema = []
    cols = {}
    for name, vals in columns.items():
        arr = np.asarray(vals)
        if name in levels:
            kind = kinds.get(name, NOMINAL)
            schema.append(ColumnSchema(name, kind, levels=tuple(levels[name])))
            cols[name] = arr.astype(np.int64)
        else:
            arr = arr.astype(float)
            schema.append(ColumnSchema(name, NUMERIC, range=(float(arr.min()), float(arr.max()))))
            cols[name] = arr
    return Dataset(schema=tuple(schema), columns=cols, label_column=label, seed=seed)


def with_binary_label(columns: dict, rng=None, **kw) -> Dataset:
    """Attach an unrelated binary label so the dataset is well-formed."""
    rng = rng or np.random.default_rng(99)
    n = len(next(iter(columns.values())))
    columns = dict(columns)
    columns["_label"] = (rng.random(n) > 0.5).astype(np.int64)
    levels = dict(kw.pop("levels", {}))
    levels["_label"] = ("a", "b")
    return make_dataset(columns, label="_label", levels=levels, **kw)


@pytest.fixture(scope="session")
def hiring_spec():
    return default_hiring_spec()


@pytest.fixture(scope="session")
def hiring(hiring_spec):
    return generate_synthetic(hiring_spec, seed=1)


TRUE_HIRING_EDGES = frozenset(
    [
        ("gender", "major"),
        ("sat", "college_rank"),
        ("age", "work_exp"),
        ("gender", "job"),
        ("major", "job"),
        ("college_rank", "job"),
        ("gpa", "job"),
        ("work_exp", "job"),
    ]
)


def refined_hiring_model(data):
    """Model over the generating mechanism's graph, as an analyst would
    refine it."""
    from causal_debias.causal import Pdag
    from causal_debias.model import build_model

    pdag = Pdag(
        nodes=tuple(sorted(data.column_names)),
        directed=TRUE_HIRING_EDGES,
        undirected=frozenset(),
    )
    return build_model(data, pdag)
