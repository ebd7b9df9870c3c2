import pytest

from reasonforge.promptkit import (FewShotConfig, draw_shots,
                                   load_prompt_asset, parse_response,
                                   render_prompt, render_target)
from reasonforge.taskgen import DatasetSpec, build_dataset

KINSHIP_OPENING = ("You are given a narrative describing the familial "
                   "relationships between several individuals.")
SPATIAL_OPENING = ("You are given a narrative describing the spatial "
                   "relationships between several individuals.")
KINSHIP_LABEL_LIST = ("['aunt', 'brother', 'daughter', 'daughter-in-law', "
                      "'father', 'father-in-law', 'granddaughter', "
                      "'grandfather', 'grandmother', 'grandson', 'mother', "
                      "'mother-in-law', 'nephew', 'niece', 'sister', 'son', "
                      "'son-in-law', 'uncle']")
SPATIAL_LABEL_LIST = ('["above", "below", "left", "lower-left", "lower-right", '
                      '"right", "upper-left", "upper-right", "overlaps"]')


@pytest.fixture(scope="module")
def kinship_examples():
    return build_dataset(DatasetSpec.make("kinship", {2: 8, 5: 8}, seed=21))


@pytest.fixture(scope="module")
def spatial_examples():
    return build_dataset(DatasetSpec.make("spatial", {2: 8, 5: 8}, seed=21))


def test_assets_carry_verbatim_instructions():
    for style in ("std-p", "eta-p"):
        kin = load_prompt_asset("kinship", style)
        assert kin.startswith(KINSHIP_OPENING)
        assert KINSHIP_LABEL_LIST in kin
        spa = load_prompt_asset("spatial", style)
        assert spa.startswith(SPATIAL_OPENING)
        assert SPATIAL_LABEL_LIST in spa
    assert "First break down the narrative into ordered structured triples" \
        in load_prompt_asset("kinship", "eta-p")
    assert "First break down the narrative into ordered structured triples" \
        in load_prompt_asset("spatial", "eta-p")
    assert "Analyze the narrative and determine the familial relationship" \
        in load_prompt_asset("kinship", "std-p")


def test_zero_shot_prompt_structure(kinship_examples, spatial_examples):
    e = kinship_examples[0]
    prompt = render_prompt(e, "std-p")
    assert prompt.startswith(KINSHIP_OPENING)
    assert prompt.count("### Story:") == 1
    assert e.story in prompt
    assert e.query in prompt
    assert prompt.rstrip().endswith("### Output:")

    s = spatial_examples[0]
    eta = render_prompt(s, "eta-p")
    assert SPATIAL_LABEL_LIST in eta
    assert eta.count("### Story:") == 1
    assert eta.rstrip().endswith("### Output:")


def test_five_shot_prompt_structure(kinship_examples):
    e = kinship_examples[0]
    shots = draw_shots(kinship_examples, FewShotConfig(k=5, seed=3), e.id)
    assert len(shots) == 5
    assert all(s.id != e.id for s in shots)
    prompt = render_prompt(e, "eta-p", shots)
    assert prompt.count("### Story:") == 6
    assert prompt.count("### Output:") == 6
    assert prompt.count("Therefore,") == 5  # shots completed, query open
    body = prompt[len(load_prompt_asset("kinship", "eta-p").split("### Story:")[0]):]
    assert body.rstrip().endswith("### Output:")


def test_shot_overlap_rejected(kinship_examples):
    e = kinship_examples[0]
    with pytest.raises(ValueError):
        render_prompt(e, "std-p", [e])


def test_draw_shots_needs_enough_pool(kinship_examples):
    with pytest.raises(ValueError):
        draw_shots(kinship_examples[:3], FewShotConfig(k=5, seed=0),
                   kinship_examples[0].id)


def test_prompt_byte_stability(kinship_examples):
    e = kinship_examples[1]
    shots = draw_shots(kinship_examples, FewShotConfig(k=2, seed=9), e.id)
    assert render_prompt(e, "eta-p", shots) == render_prompt(e, "eta-p", shots)


def test_render_target_styles(spatial_examples):
    e = spatial_examples[0]
    std = render_target(e, "std-p")
    assert "\n" not in std
    eta = render_target(e, "eta-p")
    assert eta.startswith("The ordered structured triples are:\n")
    assert "\nTherefore, " in eta
    assert eta.count("\n") == e.hop + 1
    assert eta.endswith(std)


# -- parsing -------------------------------------------------------------------

CASE_RESPONSES = [
    # style, task, response, expected relation
    ("eta-p", "kinship",
     "The ordered structured triples are:\nBrittney is the sister of "
     "Elizabeth.\nFrances is the daughter of Morgan.\n\nTherefore,\n"
     "Brittney is the niece of Morgan", "niece"),
    ("std-p", "kinship", "Evelyn is the grandmother of Nichole", "grandmother"),
    ("eta-p", "spatial", "Therefore,\nM is directly to the left of O.", "left"),
    ("eta-p", "spatial", "Therefore, M is to the lower-left of O.", "lower-left"),
    ("eta-p", "spatial", "Therefore,\nS is to the upper-left of T.", "upper-left"),
]


@pytest.mark.parametrize("style,task,response,expected", CASE_RESPONSES)
def test_parse_reference_responses(style, task, response, expected):
    assert parse_response(response, style, task).relation == expected


def test_parse_prefers_text_after_last_therefore():
    text = ("Therefore, X is the brother of Y.\nMore thoughts.\n"
            "Therefore, X is the uncle of Z.")
    assert parse_response(text, "std-p", "kinship").relation == "uncle"


def test_parse_longest_match_wins():
    for diagonal in ("upper-left", "upper-right", "lower-left", "lower-right"):
        text = f"Therefore, A is to the {diagonal} of B."
        assert parse_response(text, "std-p", "spatial").relation == diagonal
    assert parse_response("Therefore, A is the mother-in-law of B.",
                          "std-p", "kinship").relation == "mother-in-law"


def test_parse_unparseable():
    parsed = parse_response("I don't know", "std-p", "kinship")
    assert parsed.unparseable
    assert parsed.relation is None


def test_parse_extracts_triples_under_eta_p():
    response = ("The ordered structured triples are:\n"
                "1. Evelyn is the mother of Sean.\n"
                "- Sean is the brother of Pennie.\n"
                "Therefore, Evelyn is the mother of Pennie")
    parsed = parse_response(response, "eta-p", "kinship")
    assert parsed.relation == "mother"
    assert parsed.triples == [["Evelyn", "mother", "Sean"],
                              ["Sean", "brother", "Pennie"]]


def test_round_trip_parse_of_targets(kinship_examples, spatial_examples):
    for dataset in (kinship_examples, spatial_examples):
        for e in dataset:
            for style in ("std-p", "eta-p"):
                parsed = parse_response(render_target(e, style), style, e.task)
                assert parsed.relation == e.answer
                if style == "eta-p":
                    assert parsed.triples == e.gold_triples
