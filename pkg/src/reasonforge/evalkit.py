"""Exact-match scoring with per-hop breakdown, plus dataset count tables.

Predictions arrive as JSONL records {id, response} so any inference stack
can produce them.  A response whose parse yields no vocabulary relation is
counted incorrect and tallied separately, keeping parser failures visible
next to genuinely wrong answers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .promptkit import parse_response
from .taskgen import Example
from .verbalizer import TemplatePool

HOP_RANGE = tuple(range(2, 11))


@dataclass
class PredictionRecord:
    id: str
    response: str
    parsed: Optional[str] = None
    gold: Optional[str] = None
    hop: Optional[int] = None

    @property
    def correct(self) -> bool:
        return self.parsed is not None and self.parsed == self.gold


@dataclass
class ScoreReport:
    per_hop: dict[int, dict] = field(default_factory=dict)
    total: int = 0
    correct: int = 0
    unparseable: int = 0

    @property
    def overall_accuracy(self) -> float:
        return self.correct / self.total if self.total else 0.0

    def to_dict(self) -> dict:
        return {
            "per_hop": {str(h): self.per_hop[h] for h in sorted(self.per_hop)},
            "total": self.total,
            "correct": self.correct,
            "unparseable": self.unparseable,
            "overall_accuracy": self.overall_accuracy,
        }

    def to_text(self) -> str:
        lines = [f"{'Hop':<6}{'n':>6}{'correct':>9}{'accuracy':>10}"]
        for hop in sorted(self.per_hop):
            row = self.per_hop[hop]
            lines.append(f"{hop:<6}{row['n']:>6}{row['correct']:>9}"
                         f"{row['accuracy']:>10.3f}")
        lines.append(f"{'Total':<6}{self.total:>6}{self.correct:>9}"
                     f"{self.overall_accuracy:>10.3f}")
        lines.append(f"unparseable: {self.unparseable}")
        return "\n".join(lines)


def read_predictions(path) -> list[dict]:
    records = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                records.append(json.loads(line))
    return records


def score(
    predictions: Iterable[dict],
    gold: Sequence[Example],
    style: str,
    task: Optional[str] = None,
) -> ScoreReport:
    """Exact label match per prediction, aggregated by hop.

    Every prediction id must name a unique gold example; unknown or
    duplicate ids are errors, not skips.
    """
    by_id = {e.id: e for e in gold}
    task = task or (gold[0].task if gold else "kinship")
    pool = TemplatePool.for_task(task)

    report = ScoreReport()
    seen: set[str] = set()
    records: list[PredictionRecord] = []
    for item in predictions:
        pid = item["id"]
        if pid in seen:
            raise ValueError(f"duplicate prediction id {pid}")
        seen.add(pid)
        example = by_id.get(pid)
        if example is None:
            raise KeyError(f"prediction id {pid} not in gold dataset")
        parsed = parse_response(item["response"], style, task, pool=pool)
        records.append(PredictionRecord(
            id=pid, response=item["response"], parsed=parsed.relation,
            gold=example.answer, hop=example.hop))

    for record in sorted(records, key=lambda r: r.id):
        row = report.per_hop.setdefault(
            record.hop, {"n": 0, "correct": 0, "accuracy": 0.0})
        row["n"] += 1
        report.total += 1
        if record.parsed is None:
            report.unparseable += 1
        if record.correct:
            row["correct"] += 1
            report.correct += 1
    for row in report.per_hop.values():
        row["accuracy"] = row["correct"] / row["n"] if row["n"] else 0.0
    return report


def stats_table(examples: Sequence[Example]) -> str:
    """Per-hop dataset counts in the standard row layout (hops 2-10, Total)."""
    counts: dict[int, int] = {}
    for example in examples:
        counts[example.hop] = counts.get(example.hop, 0) + 1
    hops = sorted(set(HOP_RANGE) | set(counts))
    lines = [f"{'Hop':<7}{'count':>7}"]
    for hop in hops:
        lines.append(f"{hop:<7}{counts.get(hop, 0):>7}")
    lines.append(f"{'Total':<7}{sum(counts.values()):>7}")
    return "\n".join(lines)
