"""Reasoning-chain sampling by non-repeating random walk.

A chain is a walk of l+1 distinct nodes plus the l graph edges between
consecutive nodes.  The walk starts at a uniformly drawn node and at each
step moves to a uniformly drawn unvisited neighbor (edges are traversed in
either direction).  A walk that dead-ends before reaching the requested
length is abandoned and retried with fresh draws, up to a bounded number
of attempts, so sampling always terminates.

Edges are recorded exactly as stored in the graph; when the walk traverses
an edge against its stored direction the step carries a reversed flag so
later stages can verbalize the stored fact and still reason head-to-tail.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .relgraph import RelationalGraph, Triple


class SamplingExhausted(Exception):
    """No valid walk found within the attempt budget."""


@dataclass(frozen=True)
class SamplerConfig:
    length: int
    seed: int = 0
    max_attempts: int = 1000

    def __post_init__(self) -> None:
        if self.length < 1:
            raise ValueError("walk length must be >= 1")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")


@dataclass(frozen=True)
class ChainStep:
    """One hop: the stored edge plus its orientation along the walk.

    reversed is True when the stored triple runs walk[i+1] -> walk[i].
    """

    triple: Triple
    reversed: bool = False


@dataclass
class ReasoningChain:
    walk: list[int]
    steps: list[ChainStep]

    @property
    def hop(self) -> int:
        return len(self.steps)

    @property
    def head(self) -> int:
        return self.walk[0]

    @property
    def tail(self) -> int:
        return self.walk[-1]

    def node_set(self) -> frozenset[int]:
        return frozenset(self.walk)


def transition_distribution(
    graph: RelationalGraph, current: int, visited: frozenset[int] | set[int]
) -> dict[int, float]:
    """Uniform distribution over unvisited neighbors of current.

    An empty dict is a legitimate result meaning the walk is stuck.
    """
    if current not in graph:
        raise KeyError(f"unknown node {current}")
    candidates = sorted(n for n in graph.adjacency[current] if n not in visited)
    if not candidates:
        return {}
    p = 1.0 / len(candidates)
    return {n: p for n in candidates}


def _step_for(graph: RelationalGraph, a: int, b: int) -> ChainStep:
    r = graph.edge_between(a, b)
    if r is not None:
        return ChainStep(Triple(a, r, b), reversed=False)
    r = graph.edge_between(b, a)
    if r is None:
        raise AssertionError(f"no edge between {a} and {b}")
    return ChainStep(Triple(b, r, a), reversed=True)


def sample_chain(graph: RelationalGraph, config: SamplerConfig) -> ReasoningChain:
    """Draw one chain of the configured length.

    Deterministic for a fixed (graph, config).  Raises SamplingExhausted
    when every attempt dead-ends (or the graph is too small to begin with).
    """
    rng = random.Random(config.seed)
    nodes = sorted(graph.nodes)
    if len(nodes) < config.length + 1:
        raise SamplingExhausted(
            f"graph has {len(nodes)} nodes; need {config.length + 1}")

    for _ in range(config.max_attempts):
        walk = [rng.choice(nodes)]
        visited = {walk[0]}
        while len(walk) <= config.length:
            dist = transition_distribution(graph, walk[-1], visited)
            if not dist:
                break
            nxt = rng.choice(sorted(dist))
            walk.append(nxt)
            visited.add(nxt)
        if len(walk) == config.length + 1:
            steps = [_step_for(graph, walk[i], walk[i + 1])
                     for i in range(config.length)]
            return ReasoningChain(walk=walk, steps=steps)
    raise SamplingExhausted(
        f"no walk of length {config.length} in {config.max_attempts} attempts")


def oriented_labels(chain: ReasoningChain, graph: RelationalGraph) -> list[str]:
    """Per-step labels read in walk direction: element i is the relation of
    walk[i] to walk[i+1], inverting steps stored against the walk."""
    engine = graph.engine
    labels = []
    for i, step in enumerate(chain.steps):
        if not step.reversed:
            labels.append(step.triple.relation)
        else:
            gender = None
            if graph.task == "kinship":
                gender = engine.genealogy.gender[chain.walk[i]]
            labels.append(engine.invert_label(step.triple.relation, gender))
    return labels
