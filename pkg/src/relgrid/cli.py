"""Command-line entry points: generate, split, stats, evaluate, solve, validate."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

from .commands import Pattern
from .distractors import GeneratorConfig, generate_corpus
from .harness import compute_stats, evaluate, random_predictions
from .io import (
    DatasetIOError,
    read_dataset,
    read_predictions,
    validate_file,
    worker_count,
    write_dataset,
    write_predictions,
)
from .planner import plan
from .splits import SplitKind, SplitSpec, audit, make_split, split_generalization

log = logging.getLogger("relgrid")

PATTERN_CHOICES = {
    "simple": (Pattern.SIMPLE,),
    "1rel": (Pattern.ONE_REL,),
    "2rel": (Pattern.TWO_REL,),
    "all": (Pattern.SIMPLE, Pattern.ONE_REL, Pattern.TWO_REL),
    "c1": (Pattern.THREE_REL,),
    "c2": (Pattern.NESTED_REL,),
}


def _ratios(text: str) -> tuple:
    try:
        vals = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad ratios {text!r}") from None
    if len(vals) != 3 or abs(sum(vals) - 1) > 1e-6:
        raise argparse.ArgumentTypeError("ratios must be three comma-separated numbers summing to 1")
    return vals


def _forbid(text: str) -> tuple:
    try:
        color, shape = text.split(":")
    except ValueError:
        raise argparse.ArgumentTypeError("use COLOR:SHAPE, for example red:square") from None
    from .domain import Color, Shape
    return (Color(color), Shape(shape))


def _config(args, patterns) -> GeneratorConfig:
    return GeneratorConfig(
        n_commands=args.commands or 0,
        worlds_per_command=args.worlds,
        seed=args.seed,
        patterns=patterns,
        distractors=args.distractors,
        forbid_target=tuple(args.forbid_target or ()),
    )


def _config_dict(cfg: GeneratorConfig) -> dict:
    d = asdict(cfg)
    d["patterns"] = [p.value for p in cfg.patterns]
    d["forbid_target"] = [[c.value, s.value] for c, s in cfg.forbid_target]
    d["object_count"] = list(cfg.object_count)
    return d


def cmd_generate(args) -> int:
    patterns = PATTERN_CHOICES[args.pattern]
    cfg = _config(args, patterns)
    workers = args.workers or worker_count()
    examples, failures = [], []
    for p in patterns:
        if not args.commands and p is not Pattern.SIMPLE:
            raise SystemExit(f"--commands is required for pattern {p.value}")
        ex, fail = generate_corpus(p, cfg, args.commands or None, workers)
        examples += ex
        failures += fail
    manifest = write_dataset(examples, args.out, seed=args.seed, config=_config_dict(cfg))
    manifest_note = f"{manifest['count']} examples"
    if failures:
        manifest_note += f", {len(failures)} worlds skipped after exhausting retries"
    print(f"wrote {args.out}: {manifest_note}")
    return 0


def cmd_split(args) -> int:
    examples = read_dataset(args.input)
    kind = SplitKind(args.kind)
    if kind in (SplitKind.C1, SplitKind.C2) and args.commands:
        cfg = GeneratorConfig(worlds_per_command=args.worlds, seed=args.seed)
        split = split_generalization(kind, examples, args.commands, cfg)
    else:
        split = make_split(SplitSpec(kind, args.ratios, args.seed, args.holdout), examples)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, part in split.parts.items():
        write_dataset(part, out / f"{name}.jsonl", seed=args.seed)
    summary = {"kind": kind.value, "ids": split.ids(), "discarded": split.discarded,
               "held_out": [list(p) for p in split.held_out]}
    if kind not in (SplitKind.RANDOM, SplitKind.RD_ABLATION):
        a = audit(split)
        summary["audit"] = {"test_rate": a.test_rate, "train_rate": a.train_rate,
                            "necessity_rate": a.necessity_rate, "passed": a.passed, "notes": list(a.notes)}
    with open(out / "split.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    sizes = ", ".join(f"{k}={len(v)}" for k, v in split.parts.items())
    print(f"{kind.value} split: {sizes}")
    if "audit" in summary and not summary["audit"]["passed"]:
        print("split audit failed", file=sys.stderr)
        return 1
    return 0


def cmd_stats(args) -> int:
    stats = compute_stats(read_dataset(args.input))
    print(stats.to_json() if args.json else stats.to_text())
    return 0


def cmd_evaluate(args) -> int:
    gold = read_dataset(args.gold)
    if args.pred:
        preds = read_predictions(args.pred)
    elif args.random_baseline:
        preds = random_predictions(gold, args.seed)
    else:
        raise SystemExit("give --pred PATH or --random-baseline")
    report = evaluate(gold, preds)
    print(report.to_json() if args.json else report.to_text())
    return 0


def cmd_solve(args) -> int:
    examples = read_dataset(args.input)
    preds = {ex.id: plan(ex.command, ex.world) for ex in examples}
    if args.out:
        write_predictions(preds, args.out)
    else:
        from .planner import format_actions
        for eid, tokens in preds.items():
            print(json.dumps({"example_id": eid, "action_tokens": format_actions(tokens)}))
    return 0


def cmd_validate(args) -> int:
    report = validate_file(args.input)
    for eid, problems in report.failures.items():
        for p in problems:
            print(f"{eid}: {p}", file=sys.stderr)
    print(f"checked {report.checked} records, {len(report.failures)} invalid")
    return 0 if report.ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="relgrid", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a dataset")
    g.add_argument("--pattern", choices=sorted(PATTERN_CHOICES), default="simple")
    g.add_argument("--commands", type=int, default=0, help="commands per pattern (0: all Simple commands)")
    g.add_argument("--worlds", type=int, default=180, help="worlds per command")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--distractors", choices=("full", "random-only"), default="full")
    g.add_argument("--forbid-target", type=_forbid, action="append", metavar="COLOR:SHAPE",
                   help="never use this attribute pair for a target (the A2 training pool)")
    g.add_argument("--workers", type=int, default=0, help="worker processes (default: RELGRID_WORKERS or 1)")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("split", help="build a random or compositional split")
    s.add_argument("--kind", choices=[k.value for k in SplitKind], required=True)
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out-dir", required=True)
    s.add_argument("--ratios", type=_ratios, default=(0.94, 0.05, 0.01))
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--holdout", type=float, default=0.1, help="B1: fraction of NP pairs held out")
    s.add_argument("--commands", type=int, default=0, help="C1/C2: generate a test set of this many commands")
    s.add_argument("--worlds", type=int, default=180)
    s.set_defaults(func=cmd_split)

    st = sub.add_parser("stats", help="corpus statistics")
    st.add_argument("--in", dest="input", required=True)
    st.add_argument("--json", action="store_true")
    st.set_defaults(func=cmd_stats)

    e = sub.add_parser("evaluate", help="exact match of predictions against gold")
    e.add_argument("--gold", required=True)
    e.add_argument("--pred")
    e.add_argument("--random-baseline", action="store_true", help="score uniformly random actions instead")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--json", action="store_true")
    e.set_defaults(func=cmd_evaluate)

    so = sub.add_parser("solve", help="emit oracle actions for every record")
    so.add_argument("--in", dest="input", required=True)
    so.add_argument("--out")
    so.set_defaults(func=cmd_solve)

    v = sub.add_parser("validate", help="re-verify every record of a dataset")
    v.add_argument("--in", dest="input", required=True)
    v.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (DatasetIOError, ValueError) as exc:
        print(f"relgrid: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
