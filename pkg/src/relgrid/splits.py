"""Random and compositional train/dev/test splits, with audits of their defining predicates."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Iterable, Optional, Sequence

from .commands import Command, ExhaustionError, ObjectSpec, Pattern
from .domain import POSITIONAL, Color, Relation, Shape, SizeModifier
from .distractors import Example, GeneratorConfig, generate_corpus
from .matching import referent_ids


class SplitKind(str, Enum):
    RANDOM = "random"
    A1 = "a1"
    A2 = "a2"
    A3 = "a3"
    B1 = "b1"
    B2 = "b2"
    C1 = "c1"
    C2 = "c2"
    RD_ABLATION = "rd"


@dataclass(frozen=True)
class SplitSpec:
    kind: SplitKind
    ratios: tuple = (0.94, 0.05, 0.01)
    seed: int = 0
    # B1: fraction of NP co-occurrence pairs held out
    holdout_fraction: float = 0.1
    params: dict = field(default_factory=dict)


@dataclass
class Split:
    kind: SplitKind
    parts: dict  # name -> list[Example]
    held_out: tuple = ()
    discarded: int = 0

    def __getitem__(self, name: str) -> list:
        return self.parts[name]

    def ids(self) -> dict:
        return {name: [e.id for e in exs] for name, exs in self.parts.items()}


def _tag(examples: Iterable[Example], name: str) -> list:
    return [replace(e, split=name) for e in examples]


# ---------------------------------------------------------------------------
# random


def split_random(examples: Sequence[Example], ratios=(0.94, 0.05, 0.01), seed: int = 0,
                 by_pattern: bool = False) -> Split:
    """Deterministic shuffle-and-cut into train/dev/test."""
    if abs(sum(ratios) - 1) > 1e-9 or len(ratios) != 3:
        raise ValueError(f"ratios must be three numbers summing to 1, got {ratios}")
    groups = {}
    for e in examples:
        groups.setdefault(e.pattern.value if by_pattern else "", []).append(e)
    parts = {"train": [], "dev": [], "test": []}
    for key in sorted(groups):
        pool = sorted(groups[key], key=lambda e: e.id)
        random.Random(f"split:{seed}:{key}").shuffle(pool)
        n_train = round(ratios[0] * len(pool))
        n_dev = round(ratios[1] * len(pool))
        parts["train"] += _tag(pool[:n_train], "train")
        parts["dev"] += _tag(pool[n_train:n_train + n_dev], "dev")
        parts["test"] += _tag(pool[n_train + n_dev:], "test")
    return Split(SplitKind.RANDOM, parts)


# ---------------------------------------------------------------------------
# predicates


def _np_has(command: Command, pred: Callable[[ObjectSpec], bool]) -> list[int]:
    return [r.index for r in command.nodes() if pred(r.spec)]


def yellow_square(spec: ObjectSpec) -> bool:
    return spec.color is Color.YELLOW and spec.shape is Shape.SQUARE


def red_square(spec: ObjectSpec) -> bool:
    return spec.color is Color.RED and spec.shape is Shape.SQUARE


def small_cylinder(spec: ObjectSpec) -> bool:
    return spec.size_mod is SizeModifier.SMALL and spec.shape is Shape.CYLINDER


def relations_of(command: Command) -> frozenset:
    return frozenset(r.relation for r in command.nodes()[1:])


def np_key(spec: ObjectSpec) -> str:
    return str(replace(spec, determiner=type(spec.determiner).UNSET))


def np_pairs(command: Command) -> set:
    keys = sorted({np_key(r.spec) for r in command.nodes()})
    return set(itertools.combinations(keys, 2))


def target_is_red_square(example: Example) -> bool:
    t = example.world.target
    return t.color is Color.RED and t.shape is Shape.SQUARE


def is_c1(example: Example) -> bool:
    return example.pattern is Pattern.THREE_REL and len(example.command.root.clauses) == 3


def is_c2(example: Example) -> bool:
    refs = example.command.nodes()
    chain = len(refs) == 3 and all(r.parent == r.index - 1 for r in refs[1:])
    return chain and relations_of(example.command) <= set(POSITIONAL)


def _b2(example: Example) -> bool:
    rels = relations_of(example.command)
    return Relation.SAME_SIZE in rels and Relation.INSIDE_OF in rels


TEST_PREDICATES: dict = {
    SplitKind.A1: lambda e: bool(_np_has(e.command, yellow_square)),
    SplitKind.A2: target_is_red_square,
    SplitKind.A3: lambda e: bool(_np_has(e.command, small_cylinder)),
    SplitKind.B2: _b2,
    SplitKind.C1: is_c1,
    SplitKind.C2: is_c2,
}


# ---------------------------------------------------------------------------
# necessity


def modifier_necessity(example: Example, drop: str, node: Optional[int] = None) -> bool:
    """Whether deleting descriptor ``drop`` ("size_mod", "color" or "shape") breaks uniqueness.

    ``node`` selects one NP (preorder index); by default the descriptor is dropped
    from every NP that specifies it. Determiners are irrelevant to matching.
    """
    if drop not in ("size_mod", "color", "shape"):
        raise ValueError(f"unknown descriptor {drop!r}")
    from .commands import map_specs

    def fn(i, spec):
        if node is not None and i != node:
            return spec
        return replace(spec, **{drop: None})

    weakened = map_specs(example.command, fn)
    return len(referent_ids(weakened, example.world)) != 1


def _necessary_pair(example: Example, pred, attrs) -> bool:
    nodes = _np_has(example.command, pred)
    return any(all(modifier_necessity(example, a, i) for a in attrs) for i in nodes)


# ---------------------------------------------------------------------------
# compositional splits


def _check_size(split: Split) -> Split:
    for name, part in split.parts.items():
        if not part:
            raise ExhaustionError(f"{split.kind.value} split has an empty {name} set")
    return split


def _attribute_split(kind: SplitKind, examples, pred, attrs) -> Split:
    train, test, dropped = [], [], 0
    for e in examples:
        if _np_has(e.command, pred):
            if _necessary_pair(e, pred, attrs):
                test.append(e)
            else:
                dropped += 1
        else:
            train.append(e)
    return _check_size(Split(kind, {"train": _tag(train, "train"), "test": _tag(test, "test")}, discarded=dropped))


def split_a1(examples: Sequence[Example]) -> Split:
    """Hold out every command with a "yellow square" NP where both words are needed."""
    return _attribute_split(SplitKind.A1, examples, yellow_square, ("color", "shape"))


def split_a3(examples: Sequence[Example]) -> Split:
    """Hold out every command with a "small cylinder" NP where both words are needed."""
    return _attribute_split(SplitKind.A3, examples, small_cylinder, ("size_mod", "shape"))


def split_a2(examples: Sequence[Example]) -> Split:
    """Red squares are test targets only; training never mentions a red square anywhere.

    Generating the training pool with ``forbid_target=(("red", "square"),)``
    keeps it large; this filter then only removes the commands that mention one.
    """
    train, test, dropped = [], [], 0
    for e in examples:
        if target_is_red_square(e):
            test.append(e)
        elif _np_has(e.command, red_square):
            dropped += 1
        else:
            train.append(e)
    return _check_size(Split(SplitKind.A2, {"train": _tag(train, "train"), "test": _tag(test, "test")},
                             discarded=dropped))


def split_b1(examples: Sequence[Example], holdout_fraction: float = 0.1, seed: int = 0) -> Split:
    """Hold out NP pairs: test commands combine NPs never seen together in training."""
    commands = {}
    for e in examples:
        if e.command.root.clauses:
            commands.setdefault(e.command.key(), e.command)
    pairs = sorted(set().union(*(np_pairs(c) for c in commands.values())) if commands else ())
    rng = random.Random(f"b1:{seed}")
    held = set(rng.sample(pairs, round(holdout_fraction * len(pairs)))) if pairs else set()

    train, candidates = [], []
    for e in examples:
        (candidates if np_pairs(e.command) & held else train).append(e)
    seen_nps = {np_key(r.spec) for e in train for r in e.command.nodes()}
    seen_rels = {relations_of(e.command) for e in train}
    test, dropped = [], 0
    for e in candidates:
        if {np_key(r.spec) for r in e.command.nodes()} <= seen_nps and relations_of(e.command) in seen_rels:
            test.append(e)
        else:
            dropped += 1
    split = Split(SplitKind.B1, {"train": _tag(train, "train"), "test": _tag(test, "test")},
                  held_out=tuple(sorted(held)), discarded=dropped)
    return _check_size(split)


def split_b2(examples: Sequence[Example]) -> Split:
    """Hold out commands where "same size as" and "inside of" co-occur."""
    train = [e for e in examples if not _b2(e)]
    test = [e for e in examples if _b2(e)]
    return _check_size(Split(SplitKind.B2, {"train": _tag(train, "train"), "test": _tag(test, "test")}))


def split_generalization(kind: SplitKind, train_pool: Sequence[Example], n_commands: int,
                         cfg: GeneratorConfig) -> Split:
    """C1 (a third conjoined clause) or C2 (a nested chain): freshly generated test sets."""
    kind = SplitKind(kind)
    pattern = {SplitKind.C1: Pattern.THREE_REL, SplitKind.C2: Pattern.NESTED_REL}[kind]
    train = [e for e in train_pool if e.pattern in (Pattern.SIMPLE, Pattern.ONE_REL, Pattern.TWO_REL)]
    test, _ = generate_corpus(pattern, cfg, n_commands)
    return _check_size(Split(kind, {"train": _tag(train, "train"), "test": _tag(test, "test")}))


def make_split(spec: SplitSpec, examples: Sequence[Example]) -> Split:
    kind = SplitKind(spec.kind)
    if kind is SplitKind.RANDOM or kind is SplitKind.RD_ABLATION:
        return split_random(examples, spec.ratios, spec.seed, by_pattern=spec.params.get("by_pattern", False))
    if kind is SplitKind.A1:
        return split_a1(examples)
    if kind is SplitKind.A2:
        return split_a2(examples)
    if kind is SplitKind.A3:
        return split_a3(examples)
    if kind is SplitKind.B1:
        return split_b1(examples, spec.holdout_fraction, spec.seed)
    if kind is SplitKind.B2:
        return split_b2(examples)
    # C1/C2 over an existing corpus: the test set is every example with the held-out structure
    pred = TEST_PREDICATES[kind]
    train = [e for e in examples if e.pattern in (Pattern.SIMPLE, Pattern.ONE_REL, Pattern.TWO_REL)]
    test = [e for e in examples if pred(e)]
    return _check_size(Split(kind, {"train": _tag(train, "train"), "test": _tag(test, "test")}))


# ---------------------------------------------------------------------------
# audits


@dataclass(frozen=True)
class SplitAudit:
    kind: SplitKind
    test_rate: float  # fraction of test examples satisfying the held-out predicate
    train_rate: float  # fraction of training examples satisfying it
    necessity_rate: Optional[float] = None
    notes: tuple = ()

    @property
    def passed(self) -> bool:
        ok = self.test_rate == 1.0 and self.train_rate == 0.0
        return ok and (self.necessity_rate is None or self.necessity_rate == 1.0)


def _rate(examples, pred) -> float:
    return sum(1 for e in examples if pred(e)) / len(examples) if examples else 0.0


def audit(split: Split) -> SplitAudit:
    """Re-check a compositional split from scratch (nothing is taken from how it was built)."""
    kind = split.kind
    train, test = split.parts["train"], split.parts["test"]
    necessity = None
    notes = []
    if kind is SplitKind.B1:
        held = set(split.held_out)
        pred = lambda e: bool(np_pairs(e.command) & held)
        seen_nps = {np_key(r.spec) for e in train for r in e.command.nodes()}
        seen_rels = {relations_of(e.command) for e in train}
        unseen = sum(1 for e in test if not ({np_key(r.spec) for r in e.command.nodes()} <= seen_nps
                                             and relations_of(e.command) in seen_rels))
        notes.append(f"test examples with an unseen NP or relation set: {unseen}")
        test_rate = _rate(test, pred) if not unseen else 0.0
        return SplitAudit(kind, test_rate, _rate(train, pred), None, tuple(notes))
    if kind is SplitKind.A2:
        mentions = lambda e: target_is_red_square(e) or bool(_np_has(e.command, red_square))
        return SplitAudit(kind, _rate(test, target_is_red_square), _rate(train, mentions))
    pred = TEST_PREDICATES[kind]
    if kind is SplitKind.A1:
        necessity = _rate(test, lambda e: _necessary_pair(e, yellow_square, ("color", "shape")))
    elif kind is SplitKind.A3:
        necessity = _rate(test, lambda e: _necessary_pair(e, small_cylinder, ("size_mod", "shape")))
    elif kind is SplitKind.B2:
        with_inside = sum(1 for e in train if Relation.INSIDE_OF in relations_of(e.command))
        notes.append(f"training examples with inside-of alongside other relations: {with_inside}")
    return SplitAudit(kind, _rate(test, pred), _rate(train, pred), necessity, tuple(notes))
