"""Constraint-based structure discovery producing a partially directed graph.

Adjacency search follows the stable variant: each depth level tests
conditioning sets drawn from the previous level's frozen adjacencies, so
results do not depend on the order edges happen to be removed. After the
skeleton is found, colliders are oriented from the recorded separating
sets and the standard orientation rules are applied to closure. All
iteration orders derive from sorted node names, which makes the output
invariant to row shuffling and column reordering of the input.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .data import Dataset
from .errors import CausalDebiasError, ParameterError
from .graphutil import creates_cycle
from .regress import RegressionCache, ci_test

DEFAULT_P_THRESHOLD = 0.01
DEFAULT_MAX_DEPTH = 3


@dataclass(frozen=True)
class Pdag:
    nodes: tuple[str, ...]
    directed: frozenset  # of (src, dst)
    undirected: frozenset  # of (a, b) with a < b
    sepsets: dict = field(default_factory=dict, compare=False)
    notes: tuple[str, ...] = field(default=(), compare=False)

    def adjacent(self, a: str, b: str) -> bool:
        key = (min(a, b), max(a, b))
        return key in self.undirected or (a, b) in self.directed or (b, a) in self.directed

    def undirected_neighbors(self, v: str) -> list[str]:
        out = [b if a == v else a for a, b in self.undirected if v in (a, b)]
        return sorted(out)

    def parents(self, v: str) -> list[str]:
        return sorted(src for src, dst in self.directed if dst == v)

    def to_json(self) -> dict:
        edges = [
            {"src": a, "dst": b, "directed": True} for a, b in sorted(self.directed)
        ] + [
            {"src": a, "dst": b, "directed": False} for a, b in sorted(self.undirected)
        ]
        return {"nodes": list(self.nodes), "edges": edges}

    @classmethod
    def from_json(cls, doc: dict) -> "Pdag":
        directed, undirected = set(), set()
        for e in doc["edges"]:
            if e.get("directed", True):
                directed.add((e["src"], e["dst"]))
            else:
                undirected.add((min(e["src"], e["dst"]), max(e["src"], e["dst"])))
        return cls(
            nodes=tuple(sorted(doc["nodes"])),
            directed=frozenset(directed),
            undirected=frozenset(undirected),
        )


def pc_discover(
    data: Dataset,
    p_threshold: float = DEFAULT_P_THRESHOLD,
    excluded=(),
    exclude_label: bool = False,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> Pdag:
    """Skeleton search plus orientation on the dataset's columns.

    The label column participates by default; pass ``exclude_label=True``
    to discover structure among the features only. Conditioning sets are
    capped at ``max_depth`` to bound runtime on wide tables.
    """
    if not 0.0 < p_threshold < 1.0:
        raise ParameterError("p_threshold must be inside (0, 1)")
    if data.n_rows < 3:
        raise ParameterError("need at least 3 rows for discovery")
    drop = set(excluded)
    if exclude_label:
        drop.add(data.label_column)
    nodes = tuple(sorted(n for n in data.column_names if n not in drop))

    adj: dict[str, set[str]] = {v: set(nodes) - {v} for v in nodes}
    sepsets: dict = {}
    notes: list[str] = []
    cache = RegressionCache(data)

    depth = 0
    while depth <= max_depth:
        frozen = {v: sorted(adj[v]) for v in nodes}
        if all(len(frozen[v]) - 1 < depth for v in nodes):
            break
        for a, b in combinations(nodes, 2):
            if b not in adj[a]:
                continue
            pool_a = [v for v in frozen[a] if v != b]
            pool_b = [v for v in frozen[b] if v != a]
            cands = set()
            if len(pool_a) >= depth:
                cands.update(combinations(pool_a, depth))
            if len(pool_b) >= depth:
                cands.update(combinations(pool_b, depth))
            for cond in sorted(cands):
                try:
                    res = ci_test(data, a, b, cond, p_threshold, cache=cache)
                except CausalDebiasError as exc:
                    notes.append(f"kept {a}--{b}: test failed on {list(cond)}: {exc}")
                    continue
                if res.warning:
                    notes.append(f"{a}--{b} given {list(cond)}: {res.warning}")
                if res.independent:
                    adj[a].discard(b)
                    adj[b].discard(a)
                    sepsets[frozenset((a, b))] = frozenset(cond)
                    break
        depth += 1

    skeleton = Pdag(
        nodes=nodes,
        directed=frozenset(),
        undirected=frozenset((min(a, b), max(a, b)) for a in nodes for b in adj[a] if a < b),
        sepsets=sepsets,
        notes=tuple(notes),
    )
    return apply_meek_rules(orient_v_structures(skeleton))


def orient_v_structures(pdag: Pdag, sepsets: dict | None = None) -> Pdag:
    """Orient a->c<-b for every nonadjacent pair (a, b) whose separating
    set omits their common neighbor c. Conflicting proposals leave the
    edge undirected with a recorded note; already-directed edges are never
    re-oriented. Idempotent."""
    sepsets = pdag.sepsets if sepsets is None else sepsets
    proposals: dict[tuple[str, str], set[tuple[str, str]]] = {}
    for a, b in combinations(pdag.nodes, 2):
        if pdag.adjacent(a, b):
            continue
        sep = sepsets.get(frozenset((a, b)))
        if sep is None:
            continue
        for c in pdag.nodes:
            if c in (a, b) or c in sep:
                continue
            if pdag.adjacent(a, c) and pdag.adjacent(b, c):
                for tail in (a, b):
                    key = (min(tail, c), max(tail, c))
                    proposals.setdefault(key, set()).add((tail, c))

    directed = set(pdag.directed)
    undirected = set(pdag.undirected)
    notes = list(pdag.notes)
    for key in sorted(proposals):
        dirs = proposals[key]
        if len(dirs) > 1:
            if key in undirected:
                notes.append(f"conflicting collider orientations on {key[0]}--{key[1]}; left undirected")
            continue
        (src, dst) = next(iter(dirs))
        if (src, dst) in directed:
            continue
        if (dst, src) in directed:
            notes.append(f"collider wants {src}->{dst} but edge already directed; kept")
            continue
        if key not in undirected:
            continue
        if creates_cycle(pdag.nodes, directed, (src, dst)):
            notes.append(f"collider orientation {src}->{dst} would close a cycle; skipped")
            continue
        undirected.discard(key)
        directed.add((src, dst))
    return Pdag(
        nodes=pdag.nodes,
        directed=frozenset(directed),
        undirected=frozenset(undirected),
        sepsets=pdag.sepsets,
        notes=tuple(notes),
    )


def apply_meek_rules(pdag: Pdag) -> Pdag:
    """Propagate orientations to closure with the three sepset-free rules:

    1. a->b, b--c, a and c nonadjacent        =>  b->c
    2. a->c->b, a--b                          =>  a->b
    3. a--b, a--c, a--d, c->b, d->b, c,d n.a. =>  a->b

    Never re-orients a directed edge and never closes a directed cycle.
    """
    directed = set(pdag.directed)
    undirected = set(pdag.undirected)
    notes = list(pdag.notes)
    nodes = pdag.nodes

    def adjacent(a, b):
        key = (min(a, b), max(a, b))
        return key in undirected or (a, b) in directed or (b, a) in directed

    def orient(src, dst, rule):
        key = (min(src, dst), max(src, dst))
        if key not in undirected:
            return False
        if creates_cycle(nodes, directed, (src, dst)):
            notes.append(f"rule {rule} orientation {src}->{dst} would close a cycle; skipped")
            return False
        undirected.discard(key)
        directed.add((src, dst))
        return True

    changed = True
    while changed:
        changed = False
        for a, b in sorted(undirected):
            for pair in ((a, b), (b, a)):
                tail, head = pair
                # rule 1: some z->tail with z nonadjacent to head
                if any((z, tail) in directed and not adjacent(z, head) for z in nodes if z not in pair):
                    if orient(tail, head, 1):
                        changed = True
                        break
                # rule 2: directed two-step tail->z->head
                if any((tail, z) in directed and (z, head) in directed for z in nodes if z not in pair):
                    if orient(tail, head, 2):
                        changed = True
                        break
                # rule 3: two nonadjacent undirected neighbors of tail both point at head
                cands = [
                    z for z in nodes
                    if z not in pair
                    and (min(tail, z), max(tail, z)) in undirected
                    and (z, head) in directed
                ]
                if any(
                    not adjacent(c, d)
                    for i, c in enumerate(cands)
                    for d in cands[i + 1:]
                ):
                    if orient(tail, head, 3):
                        changed = True
                        break
            if changed:
                break
    return Pdag(
        nodes=nodes,
        directed=frozenset(directed),
        undirected=frozenset(undirected),
        sepsets=pdag.sepsets,
        notes=tuple(notes),
    )
