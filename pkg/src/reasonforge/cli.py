"""Command-line entry point: gen, render, score, verify, stats.

All randomness flows from --seed; identical invocations write byte-identical
files.  Config files are plain JSON mirroring the flag names, with explicit
flags taking precedence.  Template, prompt, and preset assets resolve
through REASONFORGE_DATA_DIR when set.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .evalkit import read_predictions, score, stats_table
from .promptkit import FewShotConfig, draw_shots, render_prompt, render_target
from .taskgen import (DatasetSpec, GenerationExhausted, build_dataset,
                      derive_seed, read_jsonl, verify_dataset, write_jsonl)
from .verbalizer import TemplatePool, data_dir

TASK_ALIASES = {"clutrr": "kinship", "stepgame": "spatial",
                "kinship": "kinship", "spatial": "spatial"}
PRESET_FILES = {"kinship": "clutrr_{name}.json", "spatial": "stepgame_{name}.json"}

AUG_KINDS = {"permute": "permutation", "noise": "edge-noise",
             "flip": "direction-flip", "none": "none"}


class ConfigError(Exception):
    pass


def parse_hops(text: str) -> list[int]:
    if ":" in text:
        lo, hi = text.split(":", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(h) for h in text.split(",")]


def parse_counts(text: str) -> dict[int, int]:
    counts = {}
    for part in text.split(","):
        hop, _, n = part.partition("=")
        counts[int(hop)] = int(n)
    return counts


def parse_aug(text: str, noise_k: int, flip_count: int) -> tuple[dict, ...]:
    """--aug values: none | permute | noise:k | flip:n | mix=kind:w,kind:w."""

    def entry(kind: str, weight: float = 1.0, param: int | None = None) -> dict:
        if kind not in AUG_KINDS:
            raise ConfigError(f"unknown augmentation kind {kind!r}")
        out: dict = {"kind": AUG_KINDS[kind], "weight": weight}
        if kind == "noise":
            out["k"] = noise_k if param is None else param
        elif kind == "flip":
            out["count"] = flip_count if param is None else param
        return out

    if text.startswith("mix="):
        entries = []
        for part in text[len("mix="):].split(","):
            kind, _, weight = part.partition(":")
            entries.append(entry(kind.strip(), float(weight) if weight else 1.0))
        return tuple(entries)
    kind, _, param = text.partition(":")
    return (entry(kind, 1.0, int(param) if param else None),)


def load_preset(task: str, name: str) -> dict:
    path = data_dir() / "presets" / PRESET_FILES[task].format(name=name)
    if not path.exists():
        raise ConfigError(f"no preset {name!r} for task {task}")
    return json.loads(path.read_text(encoding="utf-8"))


def build_spec(args) -> DatasetSpec:
    config = {}
    if args.config:
        config = json.loads(Path(args.config).read_text(encoding="utf-8"))

    task_name = args.task or config.get("task")
    if not task_name or task_name not in TASK_ALIASES:
        raise ConfigError("choose a task: clutrr or stepgame")
    task = TASK_ALIASES[task_name]

    preset = load_preset(task, args.preset) if args.preset else {}

    counts: dict[int, int] | None = None
    for source in (preset.get("counts"), config.get("counts")):
        if source is not None:
            counts = {int(h): int(n) for h, n in source.items()}
    if args.counts:
        counts = parse_counts(args.counts)
    if args.count is not None:
        hops = parse_hops(args.hops or config.get("hops", "2:10"))
        counts = {h: args.count for h in hops}
    if counts is None:
        raise ConfigError("no per-hop counts given (use --preset, --counts, "
                          "or --hops with --count)")

    seed = args.seed if args.seed is not None else config.get("seed", 0)
    graph_iterations = (args.graph_iters if args.graph_iters is not None
                        else config.get("graph_iters",
                                        preset.get("graph_iterations")))
    noise_k = args.noise_k if args.noise_k is not None else config.get("noise_k", 1)
    flip_count = (args.flip_count if args.flip_count is not None
                  else config.get("flip_count", 1))

    mix = preset.get("augmentation_mix")
    aug_text = args.aug or config.get("aug")
    if aug_text:
        mix = parse_aug(aug_text, noise_k, flip_count)
    kwargs = {}
    if mix is not None:
        kwargs["augmentation_mix"] = tuple(dict(e) for e in mix)
    growth_set = config.get("growth_set", preset.get("growth_set"))
    if growth_set is not None:
        kwargs["growth_set"] = tuple(growth_set)

    return DatasetSpec.make(
        task,
        counts,
        seed=seed,
        graph_iterations=graph_iterations,
        graphs_per_hop=(args.graphs_per_hop if args.graphs_per_hop is not None
                        else config.get("graphs_per_hop", 0)),
        **kwargs,
    )


def cmd_gen(args) -> int:
    try:
        spec = build_spec(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        examples = build_dataset(spec, workers=args.workers)
    except GenerationExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    write_jsonl(examples, args.output)
    print(f"wrote {len(examples)} examples to {args.output}")
    print(stats_table(examples))
    return 0


def cmd_render(args) -> int:
    try:
        examples = read_jsonl(args.dataset)
    except OSError as exc:
        print(f"error: cannot read dataset: {exc}", file=sys.stderr)
        return 1
    shots_pool = None
    if args.shots > 0:
        if not args.shots_file:
            print("error: --shots-file is required when -k > 0", file=sys.stderr)
            return 2
        shots_pool = read_jsonl(args.shots_file)
    pool = TemplatePool.for_task(examples[0].task) if examples else None
    with open(args.output, "w", encoding="utf-8") as handle:
        for example in examples:
            shots = []
            if shots_pool is not None:
                config = FewShotConfig(k=args.shots,
                                       seed=derive_seed(args.seed, example.id))
                shots = draw_shots(shots_pool, config, example.id)
            record = {
                "id": example.id,
                "prompt": render_prompt(example, args.style, shots, pool=pool),
                "target": render_target(example, args.style, pool=pool),
            }
            handle.write(json.dumps(record) + "\n")
    print(f"wrote {len(examples)} prompts to {args.output}")
    return 0


def cmd_score(args) -> int:
    gold = read_jsonl(args.gold)
    predictions = read_predictions(args.predictions)
    try:
        report = score(predictions, gold, args.style)
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(report.to_text())
    report_path = args.report or f"{args.predictions}.report.json"
    Path(report_path).write_text(
        json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")
    print(f"report written to {report_path}")
    return 0


def cmd_verify(args) -> int:
    examples = read_jsonl(args.dataset)
    report = verify_dataset(examples)
    print(f"{report.total} examples, {report.mismatch_count} mismatches")
    for mismatch in report.mismatches[:20]:
        print(f"  {mismatch['id']}: expected {mismatch['expected']}, "
              f"derived {mismatch['derived']}")
    print("hop histogram:", json.dumps(report.to_dict()["hop_histogram"]))
    return 1 if report.mismatches else 0


def cmd_stats(args) -> int:
    print(stats_table(read_jsonl(args.dataset)))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="reasonforge",
        description="Generate, render, verify, and score graph-based "
                    "synthetic reasoning datasets.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a dataset JSONL")
    gen.add_argument("--task", choices=sorted(TASK_ALIASES))
    gen.add_argument("--preset", help="named preset, e.g. 'paper'")
    gen.add_argument("--config", help="JSON config file (flags override)")
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--hops", help="hop range lo:hi or comma list")
    gen.add_argument("--count", type=int, default=None,
                     help="examples per hop bucket")
    gen.add_argument("--counts", help="explicit hop=count pairs, comma separated")
    gen.add_argument("--aug", help="none | permute | noise:k | flip:n | "
                                   "mix=kind:weight,...")
    gen.add_argument("--noise-k", type=int, default=None)
    gen.add_argument("--flip-count", type=int, default=None)
    gen.add_argument("--graph-iters", type=int, default=None)
    gen.add_argument("--graphs-per-hop", type=int, default=None,
                     help="reuse this many graphs per hop (0 = fresh each)")
    gen.add_argument("--workers", type=int, default=1)
    gen.add_argument("-o", "--output", required=True)
    gen.set_defaults(func=cmd_gen)

    render = sub.add_parser("render", help="render prompts and gold targets")
    render.add_argument("--dataset", required=True)
    render.add_argument("--style", choices=("std-p", "eta-p"), required=True)
    render.add_argument("-k", "--shots", type=int, default=0)
    render.add_argument("--shots-file", help="dataset JSONL to draw shots from")
    render.add_argument("--seed", type=int, default=0)
    render.add_argument("-o", "--output", required=True)
    render.set_defaults(func=cmd_render)

    scorer = sub.add_parser("score", help="score model predictions")
    scorer.add_argument("--predictions", required=True,
                        help="JSONL of {id, response}")
    scorer.add_argument("--gold", required=True, help="dataset JSONL")
    scorer.add_argument("--style", choices=("std-p", "eta-p"), default="eta-p")
    scorer.add_argument("--report", help="path for the JSON report")
    scorer.set_defaults(func=cmd_score)

    verify = sub.add_parser("verify", help="re-derive answers with the oracle")
    verify.add_argument("--dataset", required=True)
    verify.set_defaults(func=cmd_verify)

    stats = sub.add_parser("stats", help="per-hop count table")
    stats.add_argument("--dataset", required=True)
    stats.set_defaults(func=cmd_stats)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
