"""End-to-end dataset assembly: corrupt, verbalize, and package chains.

Every example is generated by a pure function of (dataset seed, task, hop,
index, attempt), so generation parallelizes without changing output and
identical specs produce byte-identical datasets.  An example is emitted
only when the withheld head-to-tail relation is entailed by the story
triples themselves (for kinship, the composition fold must reach a unique
vocabulary label and agree with the ground-truth derivation), which is what
lets an independent verifier reconstruct every answer from the triples
alone.  Chains whose walk dead-ends, whose label falls outside the
vocabulary, or whose fold is ambiguous are resampled with a fresh attempt
seed.

Within a hop bucket, near-duplicate examples (same stored label sequence,
answer, and augmentation record) are resampled a bounded number of times;
when the combinatorial space is too small to avoid repeats the first valid
candidate is accepted instead.
"""

from __future__ import annotations

import hashlib
import json
import random
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional

from . import kinship, spatial
from .augment import (AugmentedChain, NoiseUnavailable, add_edge_noise,
                      flip_edges, no_augment, permute)
from .kinship import KinshipEngine
from .oracle import (InconsistentWorld, coordinate_relation,
                     genealogy_relation, kinship_world_from_triples,
                     spatial_world_from_triples)
from .relgraph import GrowthConfig, RelationalGraph, Triple, grow_graph
from .sampler import (ChainStep, ReasoningChain, SamplerConfig,
                      SamplingExhausted, oriented_labels, sample_chain)
from .spatial import SpatialEngine
from .verbalizer import (TemplatePool, assign_names, name_gender_lookup,
                         render_query, verbalize_story)

JSONL_FIELDS = ("id", "task", "hop", "triples", "distractors", "story",
                "query", "answer", "gold_triples", "augmentation", "seed")

DEFAULT_AUGMENTATION_MIX = (
    {"kind": "permutation", "weight": 1},
    {"kind": "edge-noise", "k": 1, "weight": 1},
    {"kind": "direction-flip", "count": 1, "weight": 1},
)

DEFAULT_GRAPH_ITERATIONS = {"kinship": 1, "spatial": 2}


class GenerationExhausted(Exception):
    def __init__(self, hop: int, index: int, attempts: int) -> None:
        super().__init__(
            f"hop {hop}: no valid example for index {index} in {attempts} attempts")
        self.hop = hop


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from a tuple of atoms (no ambient entropy)."""
    data = "\x1f".join(str(p) for p in parts).encode()
    return int.from_bytes(hashlib.blake2b(data, digest_size=8).digest(), "big")


@dataclass(frozen=True)
class DatasetSpec:
    task: str
    counts: tuple[tuple[int, int], ...]  # (hop, count) pairs
    seed: int = 0
    graph_iterations: Optional[int] = None
    growth_set: Optional[tuple[str, ...]] = None
    augmentation_mix: tuple = DEFAULT_AUGMENTATION_MIX
    graphs_per_hop: int = 0  # 0 grows a fresh graph per example
    max_attempts: int = 400
    dedup_window: int = 25

    def __post_init__(self) -> None:
        if self.task not in ("kinship", "spatial"):
            raise ValueError(f"unknown task {self.task!r}")
        for hop, count in self.counts:
            if hop < 1 or count < 0:
                raise ValueError(f"bad bucket ({hop}, {count})")
        if not self.augmentation_mix:
            raise ValueError("augmentation mix must be nonempty")
        if sum(entry.get("weight", 1) for entry in self.augmentation_mix) <= 0:
            raise ValueError("augmentation weights must sum to a positive value")

    @classmethod
    def make(cls, task: str, counts: dict[int, int], **kwargs) -> "DatasetSpec":
        ordered = tuple(sorted((int(h), int(c)) for h, c in counts.items()))
        mix = kwargs.pop("augmentation_mix", None)
        if mix is not None:
            kwargs["augmentation_mix"] = tuple(dict(e) for e in mix)
        return cls(task=task, counts=ordered, **kwargs)

    @property
    def iterations(self) -> int:
        if self.graph_iterations is not None:
            return self.graph_iterations
        return DEFAULT_GRAPH_ITERATIONS[self.task]


@dataclass
class Example:
    id: str
    task: str
    hop: int
    triples: list[list[str]]
    distractors: list[list[str]]
    story: str
    query: str
    answer: str
    gold_triples: list[list[str]]
    augmentation: dict
    seed: list[int]

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in JSONL_FIELDS}

    @classmethod
    def from_dict(cls, data: dict) -> "Example":
        return cls(**{name: data[name] for name in JSONL_FIELDS})


# --------------------------------------------------------------------------
# corruption
# --------------------------------------------------------------------------

def corrupt(chain: ReasoningChain, graph: RelationalGraph) -> Optional[str]:
    """Withheld label: the relation of the chain head to the chain tail.

    Spatial chains are resolved by summing per-step offsets; kinship chains
    by ground-truth derivation.  None signals an out-of-vocabulary relation
    and asks the caller to resample.
    """
    if graph.task == "spatial":
        return spatial.chain_relation(oriented_labels(chain, graph))
    return graph.engine.derive(chain.head, chain.tail)


def entailed_relation(chain: ReasoningChain, graph: RelationalGraph) -> Optional[str]:
    """Head-to-tail label forced by the step relations alone (the reader's
    view), or None when the steps do not pin down a unique label."""
    labels = oriented_labels(chain, graph)
    if graph.task == "spatial":
        return spatial.chain_relation(labels)
    return kinship.chain_relation(labels)


# --------------------------------------------------------------------------
# per-example generation
# --------------------------------------------------------------------------

@lru_cache(maxsize=128)
def _cached_graph(task: str, iterations: int, growth_set: Optional[tuple[str, ...]],
                  seed: int) -> RelationalGraph:
    engine = KinshipEngine() if task == "kinship" else SpatialEngine()
    return grow_graph(engine, GrowthConfig(
        iterations=iterations, seed=seed, growth_set=growth_set))


def _graph_for(spec: DatasetSpec, hop: int, index: int, attempt: int) -> RelationalGraph:
    if spec.task == "spatial":
        seed = 0  # spatial growth draws nothing from the rng
    elif spec.graphs_per_hop > 0:
        seed = derive_seed(spec.seed, spec.task, "graph", hop,
                           index % spec.graphs_per_hop)
    else:
        # fresh graph per example; retries regrow because a deep walk that
        # fails exhaustively fails for every seed on the same graph.  At low
        # hops walks rarely fail and retries mostly serve deduplication, so
        # a few walk seeds share each grown graph.
        regrow = attempt if hop >= 9 else attempt // 3
        seed = derive_seed(spec.seed, spec.task, "graph", hop, index, regrow)
    return _cached_graph(spec.task, spec.iterations, spec.growth_set, seed)


def _apply_augmentation(
    chain: ReasoningChain, graph: RelationalGraph, entry: dict, seed: int
) -> AugmentedChain:
    kind = entry["kind"]
    if kind == "none":
        return no_augment(chain)
    if kind == "permutation":
        return permute(chain, seed)
    if kind == "edge-noise":
        return add_edge_noise(chain, graph, int(entry.get("k", 1)), seed)
    if kind == "direction-flip":
        count = min(int(entry.get("count", 1)), chain.hop)
        return flip_edges(chain, graph, count, seed)
    raise ValueError(f"unknown augmentation kind {kind!r}")


_POOLS: dict[str, TemplatePool] = {}


def _pool(task: str) -> TemplatePool:
    if task not in _POOLS:
        _POOLS[task] = TemplatePool.for_task(task)
    return _POOLS[task]


def _sample_entailed_chain(
    graph: RelationalGraph, length: int, seed: int, expansion_budget: int = 1200
) -> ReasoningChain:
    """Kinship walk that keeps the composition fold alive at every step.

    Same flavor as the public sampler (random start, random step among
    candidates, no revisits), but a neighbor is a candidate only when the
    step keeps the head-to-current relation uniquely labeled, and dead ends
    backtrack instead of abandoning the walk.  A blind walk almost never
    survives the fold beyond a few hops, so searching within the fold is
    what makes long entailed chains reachable at all; the answers
    themselves are unchanged, being ground-truth derivations that the fold
    must agree with.
    """
    rng = random.Random(seed)
    nodes = sorted(graph.nodes)
    if len(nodes) < length + 1:
        raise SamplingExhausted(f"graph has {len(nodes)} nodes; need {length + 1}")
    edges = graph.edges
    outgoing = graph.outgoing()
    by_acc = kinship.COMPOSE_BY_ACC
    empty: dict[str, str] = {}
    budget = expansion_budget
    rng.shuffle(nodes)

    for start in nodes:
        if budget <= 0:
            break
        walk = [start]
        on_walk = {start}

        def frontier(current: int, acc: Optional[str]) -> list[tuple[int, str]]:
            if acc is None:
                out = [(nb, label) for nb, label in outgoing[current]
                       if nb not in on_walk]
            else:
                row = by_acc.get(acc, empty)
                out = [(nb, row[step_label])
                       for nb, step_label in outgoing[current]
                       if step_label in row and nb not in on_walk]
            rng.shuffle(out)
            return out

        stack = [frontier(start, None)]
        while stack and budget > 0:
            if len(walk) == length + 1:
                steps = [ChainStep(Triple(walk[i], edges[(walk[i], walk[i + 1])],
                                          walk[i + 1]))
                         for i in range(length)]
                return ReasoningChain(walk=walk, steps=steps)
            if not stack[-1]:
                stack.pop()
                on_walk.discard(walk.pop())
                continue
            budget -= 1
            nb, acc = stack[-1].pop()
            walk.append(nb)
            on_walk.add(nb)
            stack.append(frontier(nb, acc))
    raise SamplingExhausted(f"no entailed walk of length {length} found")


def generate_candidate(
    spec: DatasetSpec, hop: int, index: int, attempt: int
) -> Optional[Example]:
    """One fully assembled example, or None when this attempt is unusable."""
    graph = _graph_for(spec, hop, index, attempt)
    base = (spec.seed, spec.task, hop, index, attempt)
    try:
        if spec.task == "kinship":
            # ten-hop entailed walks are scarce; deep search beats regrowing
            budget = 3500 if hop >= 10 else 800
            chain = _sample_entailed_chain(
                graph, hop, derive_seed(*base, "walk"), expansion_budget=budget)
        else:
            chain = sample_chain(graph, SamplerConfig(
                length=hop, seed=derive_seed(*base, "walk"), max_attempts=200))
    except SamplingExhausted:
        return None

    mix = spec.augmentation_mix
    kind_rng = random.Random(derive_seed(*base, "kind"))
    entry = kind_rng.choices(mix, weights=[e.get("weight", 1) for e in mix])[0]
    try:
        aug = _apply_augmentation(chain, graph, entry, derive_seed(*base, "augment"))
    except NoiseUnavailable:
        return None

    answer = corrupt(aug.chain, graph)
    if answer is None:
        return None
    if graph.task == "kinship" and entailed_relation(aug.chain, graph) != answer:
        # story triples alone do not force the ground-truth label; resample
        return None

    walk = aug.chain.walk
    named_nodes = list(walk) + [t.object for t, _ in aug.distractors]
    genders = graph.engine.genealogy.gender if spec.task == "kinship" else None
    names = assign_names(named_nodes, spec.task, derive_seed(*base, "names"),
                         genders=genders)
    pool = _pool(spec.task)
    story = verbalize_story(aug, names, pool, derive_seed(*base, "story"))

    def named(t) -> list[str]:
        return [names[t.subject], t.relation, names[t.object]]

    return Example(
        id=f"{spec.task}-{hop}-{index}",
        task=spec.task,
        hop=hop,
        triples=[named(t) for t in aug.core_story_triples()],
        distractors=[named(t) for t, _ in aug.distractors],
        story=story,
        query=render_query(names[walk[0]], names[walk[-1]], spec.task),
        answer=answer,
        gold_triples=[named(s.triple) for s in aug.chain.steps],
        augmentation=aug.record,
        seed=[spec.seed, index],
    )


def _dedup_key(example: Example) -> tuple:
    return (
        example.hop,
        tuple(t[1] for t in example.gold_triples),
        example.answer,
        json.dumps(example.augmentation, sort_keys=True),
    )


def _candidate_batch(spec: DatasetSpec, hop: int, index: int,
                     attempts: int) -> list[Optional[Example]]:
    return [generate_candidate(spec, hop, index, a) for a in range(attempts)]


# --------------------------------------------------------------------------
# dataset assembly
# --------------------------------------------------------------------------

def build_dataset(spec: DatasetSpec, workers: int = 1) -> list[Example]:
    """Generate all buckets, exactly meeting the per-hop counts.

    A worker pool only precomputes candidate attempts; acceptance runs in
    index order, so any worker count yields byte-identical output.
    """
    examples: list[Example] = []
    if workers <= 1:
        for hop, count in spec.counts:
            examples.extend(_build_bucket(spec, hop, count, prefetched=None))
        return examples

    with ProcessPoolExecutor(max_workers=workers) as pool:
        for hop, count in spec.counts:
            futures = [
                pool.submit(_candidate_batch, spec, hop, index, spec.dedup_window)
                for index in range(count)
            ]
            examples.extend(_build_bucket(
                spec, hop, count, prefetched=[f.result() for f in futures]))
    return examples


def _build_bucket(
    spec: DatasetSpec, hop: int, count: int,
    prefetched: Optional[list[list[Optional[Example]]]],
) -> list[Example]:
    bucket: list[Example] = []
    seen: set[tuple] = set()
    for index in range(count):
        ready = prefetched[index] if prefetched is not None else None
        accepted = None
        first_valid = None
        for attempt in range(spec.max_attempts):
            if ready is not None and attempt < len(ready):
                candidate = ready[attempt]
            else:
                candidate = generate_candidate(spec, hop, index, attempt)
            if candidate is None:
                continue
            if _dedup_key(candidate) not in seen:
                accepted = candidate
                break
            if first_valid is None:
                first_valid = candidate
            if attempt + 1 >= spec.dedup_window:
                break  # small combinatorial space; settle for a repeat
        if accepted is None:
            accepted = first_valid
        if accepted is None:
            raise GenerationExhausted(hop, index, spec.max_attempts)
        seen.add(_dedup_key(accepted))
        bucket.append(accepted)
    return bucket


def write_jsonl(examples: Iterable[Example], path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for example in examples:
            handle.write(json.dumps(example.to_dict()) + "\n")


def read_jsonl(path) -> list[Example]:
    examples = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                examples.append(Example.from_dict(json.loads(line)))
    return examples


# --------------------------------------------------------------------------
# verification
# --------------------------------------------------------------------------

_QUERY_PATTERNS = {
    "kinship": r"What is the relationship of (\S+) to (\S+)\?",
    "spatial": r"What is the relation of the agent (\S+) to the agent (\S+)\?",
}


def query_endpoints(query: str, task: str) -> tuple[str, str]:
    m = re.fullmatch(_QUERY_PATTERNS[task], query)
    if not m:
        raise ValueError(f"unparseable query: {query!r}")
    return m.group(1), m.group(2)


@dataclass
class VerificationReport:
    total: int = 0
    mismatches: list[dict] = field(default_factory=list)
    hop_histogram: dict[int, int] = field(default_factory=dict)
    label_distribution: dict[str, int] = field(default_factory=dict)

    @property
    def mismatch_count(self) -> int:
        return len(self.mismatches)

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "mismatch_count": self.mismatch_count,
            "mismatches": self.mismatches,
            "hop_histogram": {str(k): v for k, v in sorted(self.hop_histogram.items())},
            "label_distribution": dict(sorted(self.label_distribution.items())),
        }


def verify_dataset(examples: Iterable[Example]) -> VerificationReport:
    """Re-derive every answer from the structured triples via the oracle.

    Kinship genders come from the shipped name pools, exactly the cue a
    reader of the story has.  Mismatches are reported, never raised.
    """
    report = VerificationReport()
    genders = name_gender_lookup()
    for example in examples:
        report.total += 1
        report.hop_histogram[example.hop] = report.hop_histogram.get(example.hop, 0) + 1
        report.label_distribution[example.answer] = (
            report.label_distribution.get(example.answer, 0) + 1)
        head, tail = query_endpoints(example.query, example.task)
        triples = [tuple(t) for t in example.triples + example.distractors]
        derived: Optional[str]
        if example.task == "kinship":
            try:
                world = kinship_world_from_triples(triples, genders)
                derived = genealogy_relation(world, head, tail)
            except InconsistentWorld as exc:
                derived = f"<inconsistent: {exc}>"
        else:
            sworld = spatial_world_from_triples(triples)
            derived = coordinate_relation(sworld, head, tail)
            if not sworld.consistent:
                derived = "<inconsistent placement>"
        if derived != example.answer:
            report.mismatches.append(
                {"id": example.id, "expected": example.answer, "derived": derived})
    return report
