"""Relational graph model and the iterative growth procedure.

A graph starts from a single root node.  Each growth iteration scans the
nodes present at the start of the iteration; for every node v and every
relation r in the growth set, if no edge (v', r, v) exists yet, the task
engine attempts to realize a fresh node v_r (possibly with auxiliary
nodes) so that "v_r is the r of v" holds.  Every new node is then related
to all existing nodes by the engine's deduction, so the edge set stays
closed under deduction at all times.

Absence checks run against the live graph, not a frozen snapshot: a node
realized earlier in the same iteration already satisfies later checks,
which both avoids duplicate attachments and keeps spatial growth free of
coincident placements.

Completed graphs are immutable and safe to share across threads.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .kinship import KinshipEngine
from .spatial import SpatialEngine

Engine = Union[KinshipEngine, SpatialEngine]


@dataclass(frozen=True)
class Triple:
    """Directed labeled edge: "subject is the <relation> of object"."""

    subject: int
    relation: str
    object: int

    def as_list(self) -> list:
        return [self.subject, self.relation, self.object]


@dataclass(frozen=True)
class GrowthConfig:
    iterations: int
    seed: int = 0
    growth_set: Optional[Sequence[str]] = None
    root_gender: Optional[str] = None  # kinship only; None draws from the seed

    def __post_init__(self) -> None:
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if self.growth_set is not None and not self.growth_set:
            raise ValueError("growth set must be nonempty")


class RelationalGraph:
    """Nodes, directed relation-labeled edges, and the engine that owns the
    ground facts behind them."""

    def __init__(self, engine: Engine) -> None:
        self.engine = engine
        self.task: str = engine.task
        self.nodes: list[int] = []
        self.edges: dict[tuple[int, int], str] = {}
        self.adjacency: dict[int, set[int]] = {}
        self.incoming: dict[int, set[str]] = {}
        self.growth_log: list[tuple[int, str, str]] = []
        self._outgoing: Optional[dict[int, list[tuple[int, str]]]] = None

    def __contains__(self, node: int) -> bool:
        return node in self.adjacency

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def add_node(self, node: int) -> None:
        if node in self.adjacency:
            raise ValueError(f"duplicate node {node}")
        self.nodes.append(node)
        self.adjacency[node] = set()
        self.incoming[node] = set()

    def add_edge(self, subject: int, relation: str, object: int) -> None:
        if subject not in self.adjacency or object not in self.adjacency:
            raise KeyError("edge endpoints must be graph nodes")
        if subject == object and relation != "overlaps":
            raise ValueError("self-edges are only allowed for overlaps")
        key = (subject, object)
        if key in self.edges:
            if self.edges[key] != relation:
                raise ValueError(f"conflicting relation for pair {key}")
            return
        self.edges[key] = relation
        self.adjacency[subject].add(object)
        self.adjacency[object].add(subject)
        self.incoming[object].add(relation)

    def edge_between(self, subject: int, object: int) -> Optional[str]:
        return self.edges.get((subject, object))

    def outgoing(self) -> dict[int, list[tuple[int, str]]]:
        """node -> [(object, relation), ...], built once per graph."""
        if self._outgoing is None:
            table: dict[int, list[tuple[int, str]]] = {n: [] for n in self.nodes}
            for (s, o), r in self.edges.items():
                table[s].append((o, r))
            self._outgoing = table
        return self._outgoing

    def triples(self) -> list[Triple]:
        return [Triple(s, r, o) for (s, o), r in sorted(
            self.edges.items(), key=lambda kv: (kv[0][0], kv[1], kv[0][1]))]


def has_incoming_relation(graph: RelationalGraph, node: int, relation: str) -> bool:
    """True iff some edge (v', relation, node) exists."""
    if node not in graph:
        raise KeyError(f"unknown node {node}")
    return relation in graph.incoming[node]


def relation_between(graph: RelationalGraph, u: int, v: int) -> Optional[str]:
    """Engine-deduced label of "u is <r> of v", or None."""
    if u not in graph or v not in graph:
        raise KeyError("unknown node")
    return graph.engine.derive(u, v)


def _attach(graph: RelationalGraph, node: int) -> None:
    """Add a node and every deducible edge between it and existing nodes."""
    derive_pair = graph.engine.derive_pair
    existing = [n for n in graph.nodes]
    graph.add_node(node)
    for other in existing:
        forward, backward = derive_pair(node, other)
        if forward is not None:
            graph.add_edge(node, forward, other)
        if backward is not None:
            graph.add_edge(other, backward, node)


def grow_graph(engine: Engine, config: GrowthConfig) -> RelationalGraph:
    """Run the iterative construction and return the closed graph."""
    rng = random.Random(config.seed)
    graph = RelationalGraph(engine)
    if engine.task == "kinship":
        root = engine.new_root(rng, gender=config.root_gender)
    else:
        root = engine.new_root(rng)
    graph.add_node(root)

    growth_set = tuple(config.growth_set or engine.default_growth)
    for label in growth_set:
        if label not in engine.labels:
            raise ValueError(f"{label!r} is not a {engine.task} relation")

    for _ in range(config.iterations):
        snapshot = sorted(graph.nodes)
        for node in snapshot:
            for relation in growth_set:
                if has_incoming_relation(graph, node, relation):
                    continue
                realized = engine.realize(node, relation, rng)
                if realized is None:
                    graph.growth_log.append((node, relation, "unrealizable"))
                    continue
                subject, created = realized
                for fresh in created:
                    _attach(graph, fresh)
                if graph.edge_between(subject, node) != relation:
                    raise AssertionError(
                        f"realized {relation} edge missing for ({subject}, {node})")
    return graph


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------

def graph_to_dict(graph: RelationalGraph) -> dict:
    nodes = [graph.engine.node_attrs(n) for n in sorted(graph.nodes)]
    edges = sorted(([s, r, o] for (s, o), r in graph.edges.items()))
    return {"task": graph.task, "nodes": nodes, "edges": edges}


def graph_to_json(graph: RelationalGraph) -> str:
    return json.dumps(graph_to_dict(graph))


def graph_from_dict(data: dict) -> RelationalGraph:
    """Rebuild a graph from its serialized form.

    Spatial graphs recover their full ground truth from the coordinates;
    kinship graphs recover genders and edges only (the genealogy primitives
    stay with the process that grew the graph), so engine deduction is not
    available on them.
    """
    task = data["task"]
    if task == "spatial":
        engine: Engine = SpatialEngine()
        graph = RelationalGraph(engine)
        for attrs in data["nodes"]:
            node = attrs["id"]
            xy = tuple(attrs["xy"])
            engine.pos[node] = xy
            engine.occupied[xy] = node
            engine._next_id = max(engine._next_id, node + 1)
            graph.add_node(node)
    elif task == "kinship":
        engine = KinshipEngine()
        graph = RelationalGraph(engine)
        for attrs in data["nodes"]:
            node = attrs["id"]
            engine.genealogy.gender[node] = attrs["gender"]
            engine.genealogy._next_id = max(engine.genealogy._next_id, node + 1)
            graph.add_node(node)
    else:
        raise ValueError(f"unknown task {task!r}")
    for s, r, o in data["edges"]:
        graph.add_edge(s, r, o)
    return graph


def graph_from_json(text: str) -> RelationalGraph:
    return graph_from_dict(json.loads(text))
