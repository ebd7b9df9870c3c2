"""Rule-based verbalization: structured triples to stories, queries, answers.

Templates are deliberately plain and extraction-invertible: every rendered
sentence can be parsed back into the triple that produced it by the pool's
own extraction regexes, which is what the round-trip checks and response
parsing rely on.  The first template of each relation is the canonical form
used for gold triple listings and answers.

Kinship nodes get gender-consistent first names from fixed curated pools;
spatial nodes get single capital letters.
"""

from __future__ import annotations

import json
import os
import random
import re
import string
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .augment import AugmentedChain

# Answer phrasing per spatial label; axis directions read "directly ...",
# diagonals read "to the ...".
SPATIAL_ANSWER_PHRASES = {
    "above": "is directly above",
    "below": "is directly below",
    "left": "is directly to the left of",
    "right": "is directly to the right of",
    "upper-left": "is to the upper-left of",
    "upper-right": "is to the upper-right of",
    "lower-left": "is to the lower-left of",
    "lower-right": "is to the lower-right of",
    "overlaps": "overlaps with",
}


def data_dir() -> Path:
    """Directory holding template, name, prompt, and preset assets.

    REASONFORGE_DATA_DIR overrides the packaged data.
    """
    override = os.environ.get("REASONFORGE_DATA_DIR")
    if override:
        return Path(override)
    return Path(os.fspath(resources.files("reasonforge"))) / "data"


def _load_json(name: str) -> dict:
    return json.loads((data_dir() / name).read_text(encoding="utf-8"))


class TemplatePool:
    """Relation -> sentence templates with {A}/{B} slots, plus extraction."""

    def __init__(self, templates: dict[str, list[str]], name_pattern: str) -> None:
        for relation, forms in templates.items():
            if len(forms) < 2:
                raise ValueError(f"{relation}: need at least 2 templates")
            for form in forms:
                if "{A}" not in form or "{B}" not in form:
                    raise ValueError(f"{relation}: template missing slots: {form}")
        self.templates = templates
        self.name_pattern = name_pattern
        self._matchers = [
            (relation, re.compile(
                re.escape(form)
                .replace(r"\{A\}", f"(?P<A>{name_pattern})")
                .replace(r"\{B\}", f"(?P<B>{name_pattern})")))
            for relation, forms in templates.items()
            for form in forms
        ]

    @classmethod
    def for_task(cls, task: str) -> "TemplatePool":
        data = _load_json(f"templates_{task}.json")
        return cls(data["templates"], data["name_pattern"])

    def canonical(self, relation: str, a: str, b: str) -> str:
        return self.templates[relation][0].format(A=a, B=b)

    def render(self, relation: str, a: str, b: str, rng: random.Random) -> str:
        return rng.choice(self.templates[relation]).format(A=a, B=b)

    def extract(self, text: str) -> list[tuple[str, str, str]]:
        """Recover (subject, relation, object) triples in order of mention."""
        found: dict[int, tuple[str, str, str]] = {}
        for relation, matcher in self._matchers:
            for m in matcher.finditer(text):
                found.setdefault(m.start(), (m.group("A"), relation, m.group("B")))
        return [found[pos] for pos in sorted(found)]


def load_name_pools() -> dict[str, list[str]]:
    return _load_json("names.json")


def name_gender_lookup() -> dict[str, str]:
    pools = load_name_pools()
    lookup: dict[str, str] = {}
    for gender, names in pools.items():
        for name in names:
            lookup[name] = gender
    return lookup


def assign_names(
    nodes: Sequence[int],
    task: str,
    seed: int,
    genders: Optional[dict[int, str]] = None,
) -> dict[int, str]:
    """Injective node -> name table; kinship names match node gender."""
    rng = random.Random(seed)
    table: dict[int, str] = {}
    if task == "spatial":
        letters = rng.sample(string.ascii_uppercase, len(nodes))
        for node, letter in zip(nodes, letters):
            table[node] = letter
        return table
    pools = load_name_pools()
    needed = {g: sum(1 for n in nodes if genders[n] == g) for g in pools}
    drawn = {g: rng.sample(pools[g], needed[g]) for g in sorted(pools)}
    for node in nodes:
        table[node] = drawn[genders[node]].pop()
    return table


def verbalize_story(
    aug: AugmentedChain,
    names: dict[int, str],
    pool: TemplatePool,
    seed: int,
) -> str:
    """One sentence per triple in story order, distractors interleaved."""
    items = aug.story_items()
    if not items:
        raise ValueError("cannot verbalize an empty chain")
    rng = random.Random(seed)
    sentences = []
    for _, triple in items:
        if triple.subject not in names or triple.object not in names:
            raise KeyError(f"no name for nodes of {triple}")
        sentences.append(
            pool.render(triple.relation, names[triple.subject], names[triple.object], rng))
    return " ".join(sentences)


def render_query(head: str, tail: str, task: str) -> str:
    if task == "kinship":
        return f"What is the relationship of {head} to {tail}?"
    return f"What is the relation of the agent {head} to the agent {tail}?"


def render_answer(head: str, tail: str, relation: str, task: str) -> str:
    if task == "kinship":
        return f"{head} is the {relation} of {tail}"
    return f"{head} {SPATIAL_ANSWER_PHRASES[relation]} {tail}."


def render_triple_sentences(
    triples: Iterable[tuple[str, str, str]], pool: TemplatePool
) -> list[str]:
    """Canonical one-line form of each (subject, relation, object)."""
    return [pool.canonical(r, a, b) for a, r, b in triples]
