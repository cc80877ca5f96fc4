"""Exact-match evaluation, the random-action baseline and corpus statistics."""
from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import asdict, dataclass, field, fields
from typing import Iterable, Mapping, Sequence

from .domain import ActionToken


def exact_match(pred: Sequence, gold: Sequence) -> bool:
    return len(pred) == len(gold) and all(p == g for p, g in zip(pred, gold))


VOCABULARY = tuple(ActionToken)


def random_baseline(gold: Sequence, rng: random.Random) -> list[ActionToken]:
    """Uniform i.i.d. tokens over the action vocabulary, as long as ``gold``."""
    if not gold:
        raise ValueError("gold sequence must be non-empty")
    return [rng.choice(VOCABULARY) for _ in range(len(gold))]


@dataclass
class EvalReport:
    exact_match_percent: float
    count: int
    per_pattern: dict = field(default_factory=dict)  # pattern -> (percent, count)
    missing: int = 0

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [f"{'pattern':<10} {'count':>8} {'exact%':>8}"]
        for pat, (pct, n) in sorted(self.per_pattern.items()):
            lines.append(f"{pat:<10} {n:>8} {pct:>8.2f}")
        lines.append(f"{'all':<10} {self.count:>8} {self.exact_match_percent:>8.2f}")
        if self.missing:
            lines.append(f"missing predictions: {self.missing}")
        return "\n".join(lines)


def evaluate(gold: Iterable, predictions: Mapping[str, Sequence]) -> EvalReport:
    """Score ``predictions`` (example id -> tokens) against gold examples.

    An example without a prediction counts as wrong.
    """
    hits, totals = Counter(), Counter()
    missing = 0
    for ex in gold:
        pat = ex.pattern.value
        totals[pat] += 1
        pred = predictions.get(ex.id)
        if pred is None:
            missing += 1
            continue
        hits[pat] += exact_match(list(pred), list(ex.actions))
    n = sum(totals.values())
    per = {p: (100.0 * hits[p] / totals[p], totals[p]) for p in totals}
    pct = 100.0 * sum(hits.values()) / n if n else 0.0
    return EvalReport(pct, n, per, missing)


def random_predictions(gold: Iterable, seed: int = 0) -> dict:
    rng = random.Random(f"baseline:{seed}")
    return {ex.id: random_baseline(ex.actions, rng) for ex in gold}


# ---------------------------------------------------------------------------
# statistics


def relative_quadrant(agent, target) -> int:
    """Quadrant 1..4 of the target seen from the agent (x east, y north).

    Quadrants are half-open and turn into each other under a quarter rotation,
    so a rotation-symmetric corpus spreads evenly over them.
    """
    x = target[1] - agent[1]
    y = agent[0] - target[0]
    if x > 0 and y >= 0:
        return 1
    if x <= 0 and y > 0:
        return 2
    if x < 0 and y <= 0:
        return 3
    if x >= 0 and y < 0:
        return 4
    raise ValueError("agent and target share a cell")


@dataclass
class CorpusStats:
    count: int = 0
    action_lengths: Counter = field(default_factory=Counter)
    verbs: Counter = field(default_factory=Counter)
    adverbs: Counter = field(default_factory=Counter)  # "none" for no adverb
    command_colors: Counter = field(default_factory=Counter)
    command_shapes: Counter = field(default_factory=Counter)
    command_sizes: Counter = field(default_factory=Counter)
    relations: Counter = field(default_factory=Counter)
    world_colors: Counter = field(default_factory=Counter)
    world_shapes: Counter = field(default_factory=Counter)
    world_sizes: Counter = field(default_factory=Counter)
    distractor_presence: Counter = field(default_factory=Counter)  # kind -> examples containing it
    relative_directions: Counter = field(default_factory=Counter)
    patterns: Counter = field(default_factory=Counter)

    def rate(self, counter_name: str, key) -> float:
        return getattr(self, counter_name)[key] / self.count if self.count else 0.0

    def shares(self, counter_name: str) -> dict:
        c = getattr(self, counter_name)
        total = sum(c.values())
        return {k: v / total for k, v in c.items()} if total else {}

    def to_dict(self) -> dict:
        out = {"count": self.count}
        for f in fields(self):
            if f.name != "count":
                value = getattr(self, f.name)
                out[f.name] = {str(k): v for k, v in sorted(value.items(), key=lambda kv: str(kv[0]))}
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        d = self.to_dict()
        lines = [f"examples: {self.count}"]
        for name in ("patterns", "verbs", "adverbs", "command_colors", "relations", "distractor_presence",
                     "relative_directions", "world_sizes", "world_shapes"):
            counts = d[name]
            denom = self.count if name == "distractor_presence" else (sum(counts.values()) or 1)
            cells = ", ".join(f"{k}={100 * v / denom:.1f}%" for k, v in counts.items())
            lines.append(f"{name}: {cells}")
        return "\n".join(lines)


def compute_stats(corpus: Iterable) -> CorpusStats:
    s = CorpusStats()
    for ex in corpus:
        s.count += 1
        cmd = ex.command
        s.patterns[ex.pattern.value] += 1
        s.action_lengths[len(ex.actions)] += 1
        s.verbs[cmd.verb.value] += 1
        s.adverbs[cmd.adverb.value if cmd.adverb else "none"] += 1
        for ref in cmd.nodes():
            spec = ref.spec
            if spec.color is not None:
                s.command_colors[spec.color.value] += 1
            s.command_shapes[spec.shape.value if spec.shape else "object"] += 1
            if spec.size_mod is not None:
                s.command_sizes[spec.size_mod.value] += 1
            if ref.relation is not None:
                s.relations[ref.relation.name] += 1
        for o in ex.world.objects:
            s.world_colors[o.color.value] += 1
            s.world_shapes[o.shape.value] += 1
            s.world_sizes[o.size] += 1
        for kind in ex.kinds():
            s.distractor_presence[kind.value] += 1
        s.relative_directions[relative_quadrant(ex.world.agent, ex.world.target.cell)] += 1
    return s
