"""Node-weighted graphs, drainage graphs and the steepest watershed on graphs.

A drainage graph holds, for every node outside a regional minimum, arcs
towards its lowest neighbours.  Repeated erosion of the weights along the
arcs, combined with cutting every arc that no longer reaches the lowest
eroded value, removes all drainage paths which are not the steepest ones.
Labels of the minima travel upstream along the surviving arcs.

All steps are synchronous: each one reads the previous snapshot only, so
the result does not depend on the order in which nodes are visited.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

__all__ = [
    "WeightedGraph",
    "FlatZone",
    "RegionalMinimum",
    "DrainageGraph",
    "DrainagePath",
    "Steepness",
    "IterationOverflow",
    "GraphWatershedResult",
    "find_flat_zones",
    "find_regional_minima",
    "build_drainage_graph",
    "lexicographic_compare",
    "erode_and_prune",
    "propagate_labels_once",
    "steepest_watershed_graph",
    "iterate_to_fixpoint",
    "node_weights_from_edge_weights",
]


class IterationOverflow(RuntimeError):
    """Raised when an iterative watershed exceeds its fail-safe iteration cap."""


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph with one altitude per node.

    ``edges`` holds unordered pairs normalised to ``(min, max)``.
    """

    weights: tuple
    edges: frozenset
    neighbors: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.weights)
        adjacency: list[list[int]] = [[] for _ in range(n)]
        for i, j in self.edges:
            adjacency[i].append(j)
            adjacency[j].append(i)
        object.__setattr__(self, "neighbors", tuple(tuple(sorted(a)) for a in adjacency))

    @classmethod
    def from_edges(cls, weights: Sequence, edges: Iterable[tuple[int, int]]) -> "WeightedGraph":
        """Build a graph, rejecting self-loops, duplicates and bad indices."""
        weights = tuple(weights)
        n = len(weights)
        seen: set[tuple[int, int]] = set()
        for i, j in edges:
            i, j = int(i), int(j)
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i}, {j}) references a node outside 0..{n - 1}")
            if i == j:
                raise ValueError(f"self-loop at node {i}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
        return cls(weights, frozenset(seen))

    @classmethod
    def path(cls, weights: Sequence) -> "WeightedGraph":
        """Path graph ``0 - 1 - ... - n-1``."""
        return cls.from_edges(weights, [(i, i + 1) for i in range(len(weights) - 1)])

    @property
    def node_count(self) -> int:
        return len(self.weights)


@dataclass(frozen=True)
class FlatZone:
    nodes: frozenset
    altitude: object


@dataclass(frozen=True)
class RegionalMinimum:
    label: int
    nodes: frozenset
    altitude: object


@dataclass(frozen=True)
class DrainagePath:
    nodes: tuple
    weight_profile: tuple


@dataclass(frozen=True)
class DrainageGraph:
    """Immutable snapshot of a drainage graph.

    Attributes
    ----------
    graph : WeightedGraph
        The original graph; its weights are never modified.
    weights : tuple
        Current (possibly eroded) weight of every node.
    arcs : tuple of frozenset
        ``arcs[i]`` is the set of arc targets of node ``i``.
    labels : tuple of int
        Basin label per node, 0 for unlabeled.
    minimum_membership : tuple of int
        Label of the regional minimum containing the node, 0 otherwise.
    """

    graph: WeightedGraph
    weights: tuple
    arcs: tuple
    labels: tuple
    minimum_membership: tuple

    @property
    def node_count(self) -> int:
        return self.graph.node_count

    def arc_set(self) -> frozenset:
        return frozenset((i, j) for i, targets in enumerate(self.arcs) for j in targets)

    def all_labeled(self) -> bool:
        return all(self.labels)


class Steepness(enum.Enum):
    STEEPER = -1
    EQUAL = 0
    FLATTER = 1


class GraphWatershedResult(NamedTuple):
    labels: tuple
    drainage: DrainageGraph
    iterations: int


def _require_nonempty(graph: WeightedGraph) -> None:
    if graph.node_count == 0:
        raise ValueError("empty input")


def find_flat_zones(graph: WeightedGraph) -> list[FlatZone]:
    """Maximal connected sets of equal-weight nodes, ordered by smallest node."""
    _require_nonempty(graph)
    w = graph.weights
    seen = [False] * graph.node_count
    zones = []
    for start in range(graph.node_count):
        if seen[start]:
            continue
        seen[start] = True
        members = [start]
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in graph.neighbors[u]:
                if not seen[v] and w[v] == w[start]:
                    seen[v] = True
                    members.append(v)
                    queue.append(v)
        zones.append(FlatZone(frozenset(members), w[start]))
    return zones


def find_regional_minima(graph: WeightedGraph) -> list[RegionalMinimum]:
    """Flat zones whose outside neighbours are all strictly higher.

    Labels run 1..M in order of the smallest node index of each minimum.
    """
    w = graph.weights
    minima = []
    for zone in find_flat_zones(graph):
        has_lower = any(
            w[v] < zone.altitude for u in zone.nodes for v in graph.neighbors[u]
        )
        if not has_lower:
            minima.append(RegionalMinimum(len(minima) + 1, zone.nodes, zone.altitude))
    return minima


def build_drainage_graph(graph: WeightedGraph) -> DrainageGraph:
    """Initial drainage graph: arcs to the lowest neighbours, minima labeled.

    Equal-weight neighbours that both lie outside the minima are linked in
    both directions.  Members of a regional minimum carry its label and
    have no out-arcs.
    """
    _require_nonempty(graph)
    n = graph.node_count
    w = graph.weights
    membership = [0] * n
    for m in find_regional_minima(graph):
        for u in m.nodes:
            membership[u] = m.label

    arcs = []
    for i in range(n):
        if membership[i]:
            arcs.append(frozenset())
            continue
        nbrs = graph.neighbors[i]
        # a node outside every minimum always has a neighbour no higher than itself
        lowest = min(w[j] for j in nbrs)
        targets = {j for j in nbrs if w[j] == lowest}
        targets.update(j for j in nbrs if w[j] == w[i] and not membership[j])
        arcs.append(frozenset(targets))

    return DrainageGraph(graph, tuple(w), tuple(arcs), tuple(membership), tuple(membership))


def _check_descent(profile: Sequence) -> None:
    if len(profile) == 0:
        raise ValueError("not a descent profile: empty")
    for a, b in zip(profile, profile[1:]):
        if b > a:
            raise ValueError("not a descent profile")


def lexicographic_compare(a: Sequence, b: Sequence, *, prefix_rule: str = "pad-last") -> Steepness:
    """Compare two non-increasing weight profiles by steepness.

    Profiles are compared position by position; the first position holding a
    lower value wins.  ``prefix_rule`` decides what happens when one profile
    is a prefix of the other:

    ``"pad-last"``
        the shorter profile is extended by repeating its final value, so
        ``[5, 3]`` and ``[5, 3, 3]`` are equal.
    ``"shorter-first"``
        a profile that has already ended beats any continuation of it.
        This is the order realised by the erosion / label-propagation loop,
        where a node is labeled as soon as one of its surviving arcs reaches
        a labeled node.
    """
    _check_descent(a)
    _check_descent(b)
    for x, y in zip(a, b):
        if x < y:
            return Steepness.STEEPER
        if x > y:
            return Steepness.FLATTER
    if len(a) == len(b):
        return Steepness.EQUAL
    if prefix_rule == "shorter-first":
        return Steepness.STEEPER if len(a) < len(b) else Steepness.FLATTER
    if prefix_rule != "pad-last":
        raise ValueError(f"unknown prefix rule {prefix_rule!r}")
    if len(a) < len(b):
        tail, last, sign = b[len(a):], a[-1], Steepness.FLATTER
    else:
        tail, last, sign = a[len(b):], b[-1], Steepness.STEEPER
    for y in tail:
        if y < last:
            return sign
    return Steepness.EQUAL


def erode_and_prune(dg: DrainageGraph) -> DrainageGraph:
    """One synchronous erosion of the weights along the arcs, then pruning.

    A node with out-arcs takes the lowest weight among its arc targets and
    keeps only the arcs reaching that weight.  Nodes without arcs are left
    unchanged.  Every read uses the weights of the incoming snapshot.
    """
    w = dg.weights
    new_w = list(w)
    new_arcs = list(dg.arcs)
    for i, targets in enumerate(dg.arcs):
        if not targets:
            continue
        low = min(w[j] for j in targets)
        new_w[i] = low
        new_arcs[i] = frozenset(j for j in targets if w[j] == low)
    return DrainageGraph(dg.graph, tuple(new_w), tuple(new_arcs), dg.labels, dg.minimum_membership)


def propagate_labels_once(dg: DrainageGraph) -> DrainageGraph:
    """Unlabeled nodes with an arc to a labeled node take the highest such label.

    A node that receives a label loses all its out-arcs.
    """
    labels = dg.labels
    new_labels = list(labels)
    new_arcs = list(dg.arcs)
    for i, targets in enumerate(dg.arcs):
        if labels[i] or not targets:
            continue
        best = max(labels[j] for j in targets)
        if best:
            new_labels[i] = best
            new_arcs[i] = frozenset()
    return DrainageGraph(dg.graph, dg.weights, tuple(new_arcs), tuple(new_labels), dg.minimum_membership)


def iterate_to_fixpoint(dg: DrainageGraph, max_iterations: int | None = None) -> GraphWatershedResult:
    """Alternate erosion/pruning and label propagation until nothing changes.

    Stops early once every node is labeled.  The returned drainage graph
    holds, for each labeled node, the arcs it had just before receiving its
    label; unlabeled nodes keep their current arcs.
    """
    n = dg.node_count
    cap = n if max_iterations is None else max_iterations
    recorded = list(dg.arcs)
    iterations = 0
    while not dg.all_labeled():
        eroded = erode_and_prune(dg)
        nxt = propagate_labels_once(eroded)
        if nxt == dg:
            break
        iterations += 1
        if iterations > cap:
            raise IterationOverflow(f"iteration overflow: more than {cap} iterations")
        for i in range(n):
            if nxt.labels[i] and not eroded.labels[i]:
                recorded[i] = eroded.arcs[i]
            elif not nxt.labels[i]:
                if not nxt.arcs[i] and not nxt.minimum_membership[i] and dg.arcs[i]:
                    raise AssertionError(f"unlabeled node {i} lost all its arcs")
                recorded[i] = nxt.arcs[i]
        dg = nxt
    final = DrainageGraph(dg.graph, dg.weights, tuple(recorded), dg.labels, dg.minimum_membership)
    return GraphWatershedResult(dg.labels, final, iterations)


def steepest_watershed_graph(graph: WeightedGraph) -> GraphWatershedResult:
    """Steepest watershed of a node-weighted graph.

    Returns
    -------
    GraphWatershedResult
        ``labels`` per node, the steepest drainage graph (arcs recorded just
        before each node got its label) and the number of erosion/propagation
        iterations performed.
    """
    result = iterate_to_fixpoint(build_drainage_graph(graph))
    if not all(result.labels):
        raise AssertionError("watershed reached a fixpoint with unlabeled nodes")
    return result


def node_weights_from_edge_weights(node_count: int, edge_weights: dict) -> tuple:
    """Weight each node by the smallest weight among its incident edges.

    Isolated nodes get ``None``.
    """
    out: list = [None] * node_count
    for (i, j), value in edge_weights.items():
        for u in (i, j):
            if out[u] is None or value < out[u]:
                out[u] = value
    return tuple(out)
