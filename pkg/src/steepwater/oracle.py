"""Exhaustive reference computations on small graphs.

Everything here enumerates simple drainage paths explicitly, so the cost is
exponential; it exists to check the iterative algorithms, never to replace
them.  Nothing in this module calls the erosion/propagation code.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .graph_core import WeightedGraph

__all__ = [
    "OracleSizeError",
    "SteepestResult",
    "Catchments",
    "drainage_arcs",
    "minimum_labels",
    "enumerate_drainage_paths",
    "enumerate_catchments",
    "steepest_profiles",
]

DEFAULT_MAX_NODES = 100
DEFAULT_MAX_PATHS = 2_000_000


class OracleSizeError(ValueError):
    pass


@dataclass(frozen=True)
class SteepestResult:
    """Per node: tied minimum labels, one steepest profile and its path."""

    tied: tuple
    profiles: tuple
    paths: tuple

    def path_length(self, node: int) -> int:
        """Number of nodes on the steepest path from ``node``."""
        return len(self.paths[node])


class Catchments(NamedTuple):
    memberships: tuple
    restricted: tuple
    watershed_zone: tuple


def _check_size(graph: WeightedGraph, max_nodes: int) -> None:
    if graph.node_count == 0:
        raise ValueError("empty input")
    if graph.node_count > max_nodes:
        raise OracleSizeError(f"graph has {graph.node_count} nodes, oracle cap is {max_nodes}")


def minimum_labels(graph: WeightedGraph) -> list[int]:
    """Label regional minima 1..M by smallest node index, 0 elsewhere.

    Uses a plain flood over equal weights; independent of graph_core.
    """
    w = graph.weights
    n = graph.node_count
    zone = [-1] * n
    zones: list[list[int]] = []
    for s in range(n):
        if zone[s] >= 0:
            continue
        zone[s] = len(zones)
        stack, members = [s], []
        while stack:
            u = stack.pop()
            members.append(u)
            for v in graph.neighbors[u]:
                if zone[v] < 0 and w[v] == w[s]:
                    zone[v] = zone[s]
                    stack.append(v)
        zones.append(members)
    labels = [0] * n
    count = 0
    for members in zones:  # zones are discovered in order of their smallest node
        if all(w[v] >= w[u] for u in members for v in graph.neighbors[u]):
            count += 1
            for u in members:
                labels[u] = count
    return labels


def drainage_arcs(graph: WeightedGraph) -> list[set[int]]:
    """Arcs of the unpruned drainage graph, built directly from the definition."""
    w = graph.weights
    mins = minimum_labels(graph)
    arcs: list[set[int]] = []
    for i in range(graph.node_count):
        out: set[int] = set()
        if not mins[i]:
            low = min(w[j] for j in graph.neighbors[i])
            for j in graph.neighbors[i]:
                if w[j] == low:
                    out.add(j)
                if w[j] == w[i] and not mins[j]:
                    out.add(j)
        arcs.append(out)
    return arcs


def enumerate_drainage_paths(graph: WeightedGraph, start: int, *, max_paths: int = DEFAULT_MAX_PATHS):
    """Yield every simple drainage path from ``start`` ending in a regional minimum."""
    arcs = drainage_arcs(graph)
    mins = minimum_labels(graph)
    yield from _paths_from(start, arcs, mins, max_paths)


def _paths_from(start, arcs, mins, max_paths):
    count = 0
    path = [start]
    on_path = {start}
    # explicit stack of iterators keeps deep plateaus away from the recursion limit
    stack = [iter(sorted(arcs[start]))]
    if mins[start]:
        yield (start,)
        return
    while stack:
        nxt = next(stack[-1], None)
        if nxt is None:
            stack.pop()
            on_path.discard(path.pop())
            continue
        if nxt in on_path:
            continue
        path.append(nxt)
        if mins[nxt]:
            count += 1
            if count > max_paths:
                raise OracleSizeError(f"more than {max_paths} drainage paths from node {start}")
            yield tuple(path)
            path.pop()
            continue
        on_path.add(nxt)
        stack.append(iter(sorted(arcs[nxt])))


def _profile_key(profile: tuple, rule: str, pad_to: int):
    if rule == "shorter-first":
        # an ended profile sorts before any continuation of it
        return tuple((1, v) for v in profile) + ((0,),)
    if rule == "pad-last":
        return tuple(profile) + (profile[-1],) * (pad_to - len(profile))
    raise ValueError(f"unknown prefix rule {rule!r}")


def steepest_profiles(
    graph: WeightedGraph,
    *,
    prefix_rule: str = "shorter-first",
    unlabeled_minima: frozenset = frozenset(),
    max_nodes: int = DEFAULT_MAX_NODES,
    max_paths: int = DEFAULT_MAX_PATHS,
) -> SteepestResult:
    """Tied minimum labels reached by the steepest drainage paths of each node.

    Every simple drainage path is enumerated and the lexicographically
    smallest weight profiles are kept.  See ``lexicographic_compare`` for the
    meaning of ``prefix_rule``.

    ``unlabeled_minima`` lists minimum labels that carry no label at the
    start.  Such a minimum never ends a path: its altitude stays in place,
    so a path into it compares as if padded with that altitude forever
    (under ``"shorter-first"``) and loses to any continuation that goes
    lower or that reaches a labeled minimum at the same depth.
    """
    _check_size(graph, max_nodes)
    w = graph.weights
    arcs = drainage_arcs(graph)
    mins = minimum_labels(graph)
    n = graph.node_count
    tied, profiles, paths = [], [], []
    for s in range(n):
        best_key = None
        best_labels: set[int] = set()
        best_path: tuple = ()
        for p in _paths_from(s, arcs, mins, max_paths):
            prof = tuple(w[u] for u in p)
            if mins[p[-1]] in unlabeled_minima and prefix_rule == "shorter-first":
                key = tuple((1, v) for v in prof) + ((1, prof[-1]),) * (n + 1 - len(prof))
            else:
                key = _profile_key(prof, prefix_rule, n)
            if best_key is None or key < best_key:
                best_key, best_labels, best_path = key, {mins[p[-1]]}, p
            elif key == best_key:
                best_labels.add(mins[p[-1]])
        tied.append(frozenset(best_labels))
        paths.append(best_path)
        profiles.append(tuple(w[u] for u in best_path))
    return SteepestResult(tuple(tied), tuple(profiles), tuple(paths))


def enumerate_catchments(
    graph: WeightedGraph,
    *,
    steepest_only: bool = False,
    prefix_rule: str = "shorter-first",
    max_nodes: int = DEFAULT_MAX_NODES,
    max_paths: int = DEFAULT_MAX_PATHS,
) -> Catchments:
    """Catchment memberships, restricted-basin and watershed-zone flags.

    With ``steepest_only`` the memberships come from the steepest paths
    alone, i.e. the catchments of the fully pruned drainage graph.
    """
    _check_size(graph, max_nodes)
    if steepest_only:
        memberships = steepest_profiles(
            graph, prefix_rule=prefix_rule, max_nodes=max_nodes, max_paths=max_paths
        ).tied
    else:
        arcs = drainage_arcs(graph)
        mins = minimum_labels(graph)
        memberships = tuple(
            frozenset(mins[p[-1]] for p in _paths_from(s, arcs, mins, max_paths))
            for s in range(graph.node_count)
        )
    restricted = tuple(len(m) == 1 for m in memberships)
    zone = tuple(len(m) >= 2 for m in memberships)
    return Catchments(memberships, restricted, zone)
