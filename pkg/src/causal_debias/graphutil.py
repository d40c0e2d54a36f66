"""Small directed-graph helpers shared by discovery, editing, simulation."""

from __future__ import annotations

from .errors import CycleError


def children_map(nodes, directed_edges) -> dict[str, list[str]]:
    out = {v: [] for v in nodes}
    for src, dst in directed_edges:
        out[src].append(dst)
    for v in out:
        out[v].sort()
    return out


def creates_cycle(nodes, directed_edges, new_edge) -> bool:
    """True if adding new_edge=(src,dst) to the directed edges closes a cycle,
    i.e. dst already reaches src."""
    src, dst = new_edge
    return src in descendants(nodes, directed_edges, dst) or src == dst


def has_cycle(nodes, directed_edges) -> bool:
    adj = children_map(nodes, directed_edges)
    state = {v: 0 for v in nodes}  # 0 unseen, 1 on stack, 2 done

    def visit(v) -> bool:
        state[v] = 1
        for w in adj[v]:
            if state[w] == 1 or (state[w] == 0 and visit(w)):
                return True
        state[v] = 2
        return False

    return any(state[v] == 0 and visit(v) for v in sorted(nodes))


def descendants(nodes, directed_edges, start) -> set[str]:
    adj = children_map(nodes, directed_edges)
    seen: set[str] = set()
    stack = list(adj.get(start, []))
    while stack:
        v = stack.pop()
        if v not in seen:
            seen.add(v)
            stack.extend(adj[v])
    return seen


def topological_sort(nodes, directed_edges) -> list[str]:
    """Deterministic Kahn ordering; ties broken by node name."""
    indeg = {v: 0 for v in nodes}
    adj = children_map(nodes, directed_edges)
    for _, dst in directed_edges:
        indeg[dst] += 1
    ready = sorted(v for v in nodes if indeg[v] == 0)
    order = []
    while ready:
        v = ready.pop(0)
        order.append(v)
        inserted = False
        for w in adj[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
                inserted = True
        if inserted:
            ready.sort()
    if len(order) != len(list(nodes)):
        raise CycleError("graph contains a directed cycle")
    return order


def simple_directed_paths(nodes, directed_edges, source, target) -> list[list[str]]:
    """All simple directed paths source -> target, lexicographic by node
    sequence (DFS explores children in sorted order)."""
    adj = children_map(nodes, directed_edges)
    paths: list[list[str]] = []
    path = [source]
    on_path = {source}

    def dfs(v):
        if v == target:
            paths.append(list(path))
            return
        for w in adj.get(v, []):
            if w not in on_path:
                path.append(w)
                on_path.add(w)
                dfs(w)
                path.pop()
                on_path.discard(w)

    dfs(source)
    return paths
