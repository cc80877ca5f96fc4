"""JSON-lines serialization of examples, manifests and the record validator."""
from __future__ import annotations

import json
import os
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Optional

from .commands import ParseError, ground_determiners, parse, render, rule_filter, strip_determiners
from .distractors import DistractorAnnotation, DistractorKind, Example
from .domain import Color, Direction, Shape, parse_enum
from .matching import referent_ids
from .planner import format_actions, parse_actions, plan, replay_ok
from .world import World, WorldError, WorldObject, validate

FORMAT_VERSION = 1


class DatasetIOError(OSError):
    pass


def to_record(ex: Example) -> dict:
    w = ex.world
    t = w.target
    return {
        "format_version": FORMAT_VERSION,
        "id": ex.id,
        "command": render(ex.command),
        "pattern": ex.pattern.value,
        "grid_size": w.grid_size,
        "agent": {"row": w.agent[0], "col": w.agent[1], "direction": w.agent_dir.value},
        "objects": [
            {"id": o.id, "shape": o.shape.value, "color": o.color.value, "size": o.size,
             "row": o.row, "col": o.col, "is_box": o.is_box}
            for o in w.objects
        ],
        "target": {"id": t.id, "row": t.row, "col": t.col},
        "mentioned": list(ex.mentioned),
        "action_tokens": format_actions(ex.actions),
        "distractors": [{"id": a.object_id, "kind": a.kind.value, "note": a.note} for a in ex.annotations],
        "split": ex.split,
    }


def from_record(rec: dict) -> Example:
    version = rec.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported format_version {version!r}")
    objects = tuple(
        WorldObject(o["id"], parse_enum(Shape, o["shape"]), parse_enum(Color, o["color"]), o["size"], o["row"], o["col"])
        for o in rec["objects"]
    )
    a = rec["agent"]
    world = World(objects, rec["grid_size"], (a["row"], a["col"]), parse_enum(Direction, a["direction"]),
                  rec["target"]["id"])
    annotations = tuple(DistractorAnnotation(d["id"], DistractorKind(d["kind"]), d.get("note", ""))
                        for d in rec.get("distractors", ()))
    return Example(rec["id"], parse(rec["command"]), world, tuple(parse_actions(rec["action_tokens"])),
                   annotations, tuple(rec.get("mentioned", ())), rec.get("split"))


def dumps(ex: Example) -> str:
    return json.dumps(to_record(ex), ensure_ascii=False, separators=(",", ":"))


def write_dataset(examples: Iterable[Example], path, seed: Optional[int] = None, config: Optional[dict] = None) -> dict:
    """Write one record per line and a ``<path>.manifest.json`` next to it; returns the manifest."""
    path = Path(path)
    splits, patterns = Counter(), Counter()
    n = 0
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for ex in examples:
                fh.write(dumps(ex) + "\n")
                n += 1
                splits[ex.split or "unsplit"] += 1
                patterns[ex.pattern.value] += 1
        manifest = {
            "format_version": FORMAT_VERSION,
            "file": path.name,
            "count": n,
            "splits": dict(sorted(splits.items())),
            "patterns": dict(sorted(patterns.items())),
            "seed": seed,
            "config": config or {},
        }
        with open(manifest_path(path), "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise DatasetIOError(f"{path}: {exc}") from exc
    return manifest


def manifest_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".manifest.json")


def iter_records(path) -> Iterator[dict]:
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if line.strip():
                    try:
                        yield json.loads(line)
                    except json.JSONDecodeError as exc:
                        raise DatasetIOError(f"{path}:{lineno}: {exc}") from exc
    except OSError as exc:
        raise DatasetIOError(f"{path}: {exc}") from exc


def read_dataset(path) -> list[Example]:
    return [from_record(r) for r in iter_records(path)]


def read_predictions(path) -> dict:
    """``{example_id: [tokens]}`` from JSON lines of ``{example_id, action_tokens}``."""
    out = {}
    for rec in iter_records(path):
        tokens = rec["action_tokens"]
        out[rec["example_id"]] = parse_actions(tokens) if isinstance(tokens, str) else parse_actions(",".join(tokens))
    return out


def write_predictions(predictions: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for eid, tokens in predictions.items():
            fh.write(json.dumps({"example_id": eid, "action_tokens": format_actions(tokens)}) + "\n")


# ---------------------------------------------------------------------------
# validation


def check_example(ex: Example) -> list[str]:
    """Every problem found when re-deriving the example from its command and world alone."""
    problems = []
    command, world = ex.command, ex.world
    reason = rule_filter(strip_determiners(command))
    if reason:
        problems.append(f"command breaks rule {reason}")
    try:
        validate(world, command)
    except WorldError as exc:
        problems.append(str(exc))
        return problems
    refs = referent_ids(command, world)
    if refs != {world.target_id}:
        problems.append(f"referents {sorted(refs)} != target {world.target_id}")
        return problems
    if ground_determiners(command, world) != command:
        problems.append("determiners disagree with the world")
    gold = plan(command, world)
    if tuple(gold) != tuple(ex.actions):
        problems.append("stored actions differ from the planner")
    if not replay_ok(world, ex.actions, command.verb):
        problems.append("stored actions do not replay to the target")
    mentioned = set(ex.mentioned)
    annotated = [a.object_id for a in ex.annotations]
    if len(annotated) != len(set(annotated)):
        problems.append("an object carries several distractor annotations")
    others = {o.id for o in world.objects} - mentioned
    if set(annotated) != others:
        problems.append("distractor annotations do not cover exactly the unmentioned objects")
    return problems


def check_record(rec: dict) -> list[str]:
    try:
        ex = from_record(rec)
    except (KeyError, TypeError, ValueError, ParseError) as exc:
        return [f"malformed record: {exc}"]
    problems = check_example(ex)
    if ex.pattern.value != rec.get("pattern"):
        problems.append(f"pattern tag {rec.get('pattern')!r} != {ex.pattern.value!r}")
    t = rec["target"]
    if (t["row"], t["col"]) != ex.world.target.cell:
        problems.append("target position disagrees with its object")
    return problems


@dataclass
class ValidationReport:
    checked: int
    failures: dict  # record id -> problems

    @property
    def ok(self) -> bool:
        return not self.failures


def validate_file(path) -> ValidationReport:
    failures = {}
    n = 0
    for rec in iter_records(path):
        n += 1
        problems = check_record(rec)
        if problems:
            failures[rec.get("id", f"line-{n}")] = problems
    return ValidationReport(n, failures)


def worker_count(default: int = 1) -> int:
    """Worker processes for generation, from ``RELGRID_WORKERS``."""
    raw = os.environ.get("RELGRID_WORKERS")
    if not raw:
        return default
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"RELGRID_WORKERS must be an integer, got {raw!r}") from None
