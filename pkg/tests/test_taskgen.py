import json

import pytest

from reasonforge.kinship import KinshipEngine
from reasonforge.relgraph import GrowthConfig, RelationalGraph, Triple, grow_graph
from reasonforge.sampler import ChainStep, ReasoningChain
from reasonforge.spatial import SpatialEngine
from reasonforge.taskgen import (JSONL_FIELDS, DatasetSpec, Example,
                                 GenerationExhausted, build_dataset, corrupt,
                                 entailed_relation, query_endpoints,
                                 read_jsonl, verify_dataset, write_jsonl)

SMALL = {h: 12 for h in (2, 3, 4)}


@pytest.fixture(scope="module")
def small_kinship():
    return build_dataset(DatasetSpec.make("kinship", SMALL, seed=5))


@pytest.fixture(scope="module")
def small_spatial():
    return build_dataset(DatasetSpec.make("spatial", SMALL, seed=5))


# -- corrupt ---------------------------------------------------------------------

def test_corrupt_one_hop_degenerate():
    eng = KinshipEngine()
    root = eng.genealogy.new_person("f")
    father = eng.genealogy.add_parent(root, "m")
    g = RelationalGraph(eng)
    g.add_node(root)
    g.add_node(father)
    g.add_edge(father, "father", root)
    chain = ReasoningChain(walk=[father, root],
                           steps=[ChainStep(Triple(father, "father", root))])
    assert corrupt(chain, g) == "father"


def test_corrupt_spatial_uses_offset_sum():
    g = grow_graph(SpatialEngine(), GrowthConfig(iterations=1))
    at = {xy: node for node, xy in g.engine.pos.items()}
    # walk right then up: (0,0) <- (1,0) <- (1,1) read head-first
    chain = ReasoningChain(
        walk=[at[(1, 1)], at[(1, 0)], at[(0, 0)]],
        steps=[ChainStep(Triple(at[(1, 1)], "above", at[(1, 0)])),
               ChainStep(Triple(at[(1, 0)], "right", at[(0, 0)]))])
    assert corrupt(chain, g) == "upper-right"


def test_corrupt_kinship_daughter_sister_niece():
    eng = KinshipEngine()
    g = grow_graph(eng, GrowthConfig(iterations=1, seed=2,
                                     growth_set=("sister",), root_gender="f"))
    root = 0
    sister = next(n for n in g.nodes if g.edge_between(n, root) == "sister")
    daughter = eng.genealogy.add_child(sister, "f")
    from reasonforge.relgraph import _attach
    _attach(g, daughter)
    chain = ReasoningChain(
        walk=[daughter, sister, root],
        steps=[ChainStep(Triple(daughter, "daughter", sister)),
               ChainStep(Triple(sister, "sister", root))])
    assert corrupt(chain, g) == "niece"
    assert entailed_relation(chain, g) == "niece"


# -- build_dataset ----------------------------------------------------------------

def test_counts_met_exactly(small_kinship, small_spatial):
    for dataset in (small_kinship, small_spatial):
        per_hop = {}
        for e in dataset:
            per_hop[e.hop] = per_hop.get(e.hop, 0) + 1
        assert per_hop == SMALL


def test_empty_spec_gives_empty_dataset():
    assert build_dataset(DatasetSpec.make("spatial", {h: 0 for h in range(2, 11)},
                                          seed=1)) == []


def test_ids_and_seed_lineage(small_kinship):
    for i, e in enumerate(x for x in small_kinship if x.hop == 2):
        assert e.id == f"kinship-2-{i}"
        assert e.seed == [5, i]


def test_hop_equals_core_triples(small_kinship, small_spatial):
    for e in small_kinship + small_spatial:
        assert e.hop == len(e.triples) == len(e.gold_triples)
        assert e.answer in {t for t in __vocab(e.task)}


def __vocab(task):
    if task == "kinship":
        from reasonforge.kinship import KINSHIP_LABELS as labels
    else:
        from reasonforge.spatial import SPATIAL_LABELS as labels
    return labels


def test_gold_triples_are_story_triples_in_reasoning_order(small_spatial):
    for e in small_spatial:
        assert sorted(map(tuple, e.gold_triples)) == sorted(map(tuple, e.triples))
        if e.augmentation["kind"] == "permutation":
            order = e.augmentation["order"]
            assert [e.gold_triples[i] for i in order] == e.triples


def test_determinism_byte_identical(tmp_path, small_kinship):
    again = build_dataset(DatasetSpec.make("kinship", SMALL, seed=5))
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    write_jsonl(small_kinship, a)
    write_jsonl(again, b)
    assert a.read_bytes() == b.read_bytes()


def test_different_seed_changes_data():
    other = build_dataset(DatasetSpec.make("kinship", {2: 5}, seed=6))
    base = build_dataset(DatasetSpec.make("kinship", {2: 5}, seed=7))
    assert [e.story for e in other] != [e.story for e in base]


def test_jsonl_field_order(tmp_path, small_spatial):
    path = tmp_path / "d.jsonl"
    write_jsonl(small_spatial, path)
    first = path.read_text().splitlines()[0]
    assert list(json.loads(first)) == list(JSONL_FIELDS)
    assert read_jsonl(path) == small_spatial


def test_no_leakage_in_stories(small_kinship, small_spatial):
    from reasonforge.verbalizer import TemplatePool
    for dataset, task in ((small_kinship, "kinship"), (small_spatial, "spatial")):
        pool = TemplatePool.for_task(task)
        for e in dataset:
            head, tail = query_endpoints(e.query, task)
            recovered = pool.extract(e.story)
            assert (head, e.answer, tail) not in recovered
            assert sorted(recovered) == sorted(
                tuple(t) for t in e.triples + e.distractors)


def test_distractors_never_join_chain_nodes(small_spatial):
    for e in small_spatial:
        chain_nodes = {t[0] for t in e.gold_triples} | {t[2] for t in e.gold_triples}
        for s, _, o in e.distractors:
            assert s in chain_nodes
            assert o not in chain_nodes


def test_verify_dataset_clean_and_faulty(small_kinship):
    report = verify_dataset(small_kinship)
    assert report.mismatch_count == 0
    assert report.total == len(small_kinship)
    assert report.hop_histogram == SMALL

    broken = [Example.from_dict(e.to_dict()) for e in small_kinship]
    broken[0].answer = "uncle" if broken[0].answer != "uncle" else "aunt"
    faulty = verify_dataset(broken)
    assert faulty.mismatch_count == 1
    assert faulty.mismatches[0]["id"] == broken[0].id


def test_verify_empty():
    report = verify_dataset([])
    assert report.total == 0
    assert report.mismatch_count == 0


def test_generation_exhausted_names_hop():
    # a 10-hop walk cannot exist in a 9-node spatial graph
    spec = DatasetSpec.make("spatial", {10: 1}, seed=0, graph_iterations=1,
                            max_attempts=5)
    with pytest.raises(GenerationExhausted) as err:
        build_dataset(spec)
    assert err.value.hop == 10


def test_diversity_within_bucket():
    dataset = build_dataset(DatasetSpec.make("kinship", {6: 120}, seed=9))
    keys = set()
    for e in dataset:
        key = (tuple(t[1] for t in e.gold_triples), e.answer,
               json.dumps(e.augmentation, sort_keys=True))
        assert key not in keys
        keys.add(key)


def test_parallel_equals_sequential():
    spec = DatasetSpec.make("spatial", {h: 25 for h in (2, 5, 8)}, seed=4)
    assert build_dataset(spec, workers=4) == build_dataset(spec, workers=1)


def test_graphs_per_hop_reuse():
    spec = DatasetSpec.make("kinship", {3: 10}, seed=2, graphs_per_hop=2)
    dataset = build_dataset(spec)
    assert len(dataset) == 10
    assert verify_dataset(dataset).mismatch_count == 0


def test_query_endpoints_roundtrip(small_kinship, small_spatial):
    for e in small_kinship + small_spatial:
        head, tail = query_endpoints(e.query, e.task)
        assert e.gold_triples[0][0] in (head, e.gold_triples[0][0])
        assert head != tail
