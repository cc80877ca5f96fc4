"""World generation with adversarial distractors and uniqueness validation.

Every distractor is added by *realizing a reading* of the command: a variant
command (a clause subset, an attribute perturbation, or an attribute swap
between clause NPs) is instantiated in the world with a fresh head object,
reusing existing objects where the variant agrees with the original. A
candidate addition is kept only if the original command still resolves to the
target alone and the variant resolves as intended.
"""
from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Optional

from .commands import (
    Command,
    ObjectNode,
    ObjectSpec,
    Pattern,
    ground_determiners,
    is_valid,
    map_specs,
    prune,
    sample_commands,
)
from .domain import (
    ITEM_SHAPES,
    POSITIONAL,
    SIZES,
    Color,
    Relation,
    Shape,
    SizeModifier,
)
from .graphs import candidate_mask
from .matching import referent_ids
from .planner import plan
from .world import (
    GRID_SIZE,
    MAX_BOXES,
    MAX_OBJECTS,
    PlacementError,
    World,
    WorldError,
    WorldObject,
    box_anchors,
    place_agent,
    place_mentioned,
    size_pairs,
    validate,
)

log = logging.getLogger(__name__)


class DistractorKind(str, Enum):
    ATTRIBUTE = "attribute"
    ISOMORPHISM = "isomorphism"
    RELATION = "relation"
    RANDOM = "random"


@dataclass(frozen=True)
class DistractorAnnotation:
    object_id: int
    kind: DistractorKind
    note: str = ""


@dataclass(frozen=True)
class GeneratorConfig:
    n_commands: int = 0  # 0 means the whole population for Simple
    worlds_per_command: int = 180
    grid_size: int = GRID_SIZE
    max_objects: int = MAX_OBJECTS
    seed: int = 0
    patterns: tuple = (Pattern.SIMPLE, Pattern.ONE_REL, Pattern.TWO_REL)
    distractors: str = "full"  # or "random-only"
    # random distractors top the world up to a count drawn uniformly from this range
    object_count: tuple = (6, 12)
    world_attempts: int = 100
    stage_attempts: int = 8
    # (color, shape) pairs the target may never have
    forbid_target: tuple = ()


@dataclass(frozen=True)
class Example:
    id: str
    command: Command
    world: World
    actions: tuple
    annotations: tuple = ()
    mentioned: tuple = ()
    split: Optional[str] = None

    @property
    def pattern(self) -> Pattern:
        return self.command.pattern

    def kinds(self) -> set:
        return {a.kind for a in self.annotations}


class GenerationFailure(RuntimeError):
    def __init__(self, command: Command, reason: str):
        super().__init__(f"{reason}: {command}")
        self.command = command
        self.reason = reason


# ---------------------------------------------------------------------------
# realization of a reading


@dataclass
class _State:
    command: Command
    world: World
    rng: random.Random
    size_pair: Optional[tuple]
    max_objects: int
    stage_attempts: int = 8
    annotations: dict = field(default_factory=dict)

    def target_unique(self, world: World) -> bool:
        return referent_ids(self.command, world) == {self.world.target_id}

    def within_budget(self, world: World) -> bool:
        return len(world.objects) <= self.max_objects and len(world.boxes()) <= MAX_BOXES

    def commit(self, world: World, new_ids, kind: DistractorKind, note: str) -> None:
        self.world = world
        for i in new_ids:
            self.annotations[i] = DistractorAnnotation(i, kind, note)

    def random_size(self) -> int:
        return self.rng.choice(self.size_pair or SIZES)


def _spec_size(state: _State, spec: ObjectSpec) -> Optional[int]:
    if spec.size_mod is None:
        return None
    if state.size_pair is None:
        return None
    return state.size_pair[0] if spec.size_mod is SizeModifier.SMALL else state.size_pair[1]


def _shared(rel: Relation) -> Optional[str]:
    return {Relation.SAME_COLOR: "color", Relation.SAME_SHAPE: "shape", Relation.SAME_SIZE: "size"}.get(rel)


def realize(state: _State, reading: Command, reuse: dict, kind: DistractorKind, note: str,
            purpose: Callable[[World, int], bool]) -> bool:
    """Try to add objects realizing ``reading`` with a fresh head object.

    ``reuse`` maps reading node indices to existing object ids; the other nodes
    get new objects. Returns whether a candidate passed both checks.
    """
    refs = reading.nodes()
    children = {r.index: [] for r in refs}
    for r in refs[1:]:
        children[r.parent].append(r)
    for _ in range(state.stage_attempts):
        world = state.world
        placed: dict[int, WorldObject] = {i: world.get(oid) for i, oid in reuse.items()}
        new_ids = []
        ok = True
        for ref in refs:
            if ref.index in placed:
                continue
            # neighbours already fixed: the parent and any reused children
            links = []
            if ref.parent >= 0:
                links.append(("object", ref.relation, placed[ref.parent]))
            for ch in children[ref.index]:
                if ch.index in placed:
                    links.append(("owner", ch.relation, placed[ch.index]))
            obj = _new_object(world, ref.spec, links, state, world.next_id())
            if obj is None:
                ok = False
                break
            world = world.add(obj)
            placed[ref.index] = obj
            new_ids.append(obj.id)
        if not ok or not state.within_budget(world):
            continue
        if not state.target_unique(world):
            continue
        if not purpose(world, placed[0].id):
            continue
        state.commit(world, new_ids, kind, note)
        return True
    return False


def _new_object(world: World, spec: ObjectSpec, links, state: _State, new_id: int) -> Optional[WorldObject]:
    rng = state.rng
    color, shape, size = spec.color, spec.shape, _spec_size(state, spec)
    for _, rel, other in links:
        attr = _shared(rel)
        if attr == "color":
            color = other.color
        elif attr == "shape":
            shape = other.shape
        elif attr == "size":
            size = other.size
    if color is None:
        color = rng.choice(tuple(Color))
    if shape is None:
        shape = rng.choice(ITEM_SHAPES)
    if size is None:
        size = state.random_size()
    if state.size_pair is not None and size not in state.size_pair:
        return None

    if shape is Shape.BOX:
        if len(world.boxes()) >= MAX_BOXES:
            return None
        containing = None
        for role, rel, other in links:
            if role == "object" and rel is Relation.INSIDE_OF:
                containing = other.cell
            elif rel in POSITIONAL:
                return None
        options = box_anchors(world, size, containing)
    else:
        options = world.free_cells()
        for role, rel, other in links:
            if rel is Relation.SAME_ROW:
                options = [c for c in options if c[0] == other.row]
            elif rel is Relation.SAME_COLUMN:
                options = [c for c in options if c[1] == other.col]
            elif rel is Relation.INSIDE_OF:
                if role != "owner":
                    return None
                options = [c for c in options if other.covers(c)]
    if not options:
        return None
    r, c = rng.choice(options)
    return WorldObject(new_id, shape, color, size, r, c)


# ---------------------------------------------------------------------------
# strategies


def _ancestors(refs, index: int) -> set[int]:
    out = set()
    while index >= 0:
        out.add(index)
        index = refs[index].parent
    return out


def _descendants(refs, index: int) -> set[int]:
    out = {index}
    for r in refs:
        if r.parent in out:
            out.add(r.index)
    return out


def relaxed_subsets(command: Command) -> list[frozenset]:
    """Proper ancestor-closed clause subsets (as kept child-node indices), single clauses first."""
    refs = command.nodes()
    edges = [r.index for r in refs[1:]]
    subsets = []
    for k in range(len(edges) - 1, -1, -1):
        for combo in itertools.combinations(edges, k):
            kept = set(combo)
            if all(refs[i].parent == 0 or refs[i].parent in kept for i in kept):
                subsets.append(frozenset(kept))
    subsets.sort(key=lambda s: (len(s) != 1, -len(s)))
    return subsets


def add_relation_distractors(state: _State) -> int:
    """For each proper clause subset, an object satisfying the head NP and only that subset."""
    command = state.command
    refs = command.nodes()
    mentioned = {r.index: r.index for r in refs}  # mentioned object ids equal NP indices
    added = 0
    for kept in relaxed_subsets(command):
        reading = prune(command, kept)
        order = sorted({0} | kept)
        reuse = {}
        for k, orig in enumerate(order):
            if k == 0:
                continue
            if _descendants(refs, orig) <= kept:
                reuse[k] = mentioned[orig]
        note = "kept clauses " + (",".join(str(i) for i in sorted(kept)) or "none")

        def purpose(world, head, reading=reading):
            return head in referent_ids(reading, world)

        added += realize(state, reading, reuse, DistractorKind.RELATION, note, purpose)
    return added


def attribute_perturbations(command: Command) -> list[tuple[int, str, object]]:
    """Every (NP index, attribute, replacement value) that changes one specified descriptor."""
    out = []
    for ref in command.nodes():
        spec = ref.spec
        if spec.size_mod is not None:
            other = SizeModifier.BIG if spec.size_mod is SizeModifier.SMALL else SizeModifier.SMALL
            out.append((ref.index, "size_mod", other))
        if spec.color is not None:
            out.extend((ref.index, "color", c) for c in Color if c is not spec.color)
        if spec.shape is not None and spec.shape is not Shape.BOX:
            out.extend((ref.index, "shape", s) for s in ITEM_SHAPES if s is not spec.shape)
    return out


def _perturbed(command: Command, index: int, attr: str, value) -> Command:
    return map_specs(command, lambda i, s: replace(s, **{attr: value}) if i == index else s)


def _unique_head(reading: Command):
    def purpose(world, head):
        return referent_ids(reading, world) == {head}
    return purpose


def _try_perturbation(state: _State, index: int, attr: str, value, fresh_copy: bool = False) -> bool:
    command = state.command
    refs = command.nodes()
    reading = _perturbed(command, index, attr, value)
    fresh = set(range(len(refs))) if fresh_copy else _ancestors(refs, index)
    reuse = {r.index: r.index for r in refs if r.index not in fresh}
    note = f"{attr} of NP {index} -> {value.value}"
    return realize(state, reading, reuse, DistractorKind.ATTRIBUTE, note, _unique_head(reading))


def add_size_contrast(state: _State) -> bool:
    """Make every size-modified NP's comparison class contain both world sizes."""
    ok = True
    for ref in state.command.nodes():
        if ref.spec.size_mod is None or _has_contrast(state.world, ref.spec):
            continue
        other = SizeModifier.BIG if ref.spec.size_mod is SizeModifier.SMALL else SizeModifier.SMALL
        if _try_perturbation(state, ref.index, "size_mod", other):
            continue
        # fall back to a lone object of the other size in the same class
        reading = Command(state.command.verb, ObjectNode(replace(ref.spec, size_mod=other)))
        note = f"size contrast for NP {ref.index}"
        if not realize(state, reading, {}, DistractorKind.ATTRIBUTE, note, lambda w, h: True):
            ok = False
    return ok


def _has_contrast(world: World, spec: ObjectSpec) -> bool:
    unsized = replace(spec, size_mod=None)
    mask = candidate_mask(unsized, world)
    sizes = {o.size for i, o in enumerate(world.objects) if (mask >> i) & 1}
    return len(sizes) >= 2


def add_attribute_distractors(state: _State) -> int:
    """At least one perturbed-attribute competitor; one per specified attribute for clause-free commands."""
    command = state.command
    options = attribute_perturbations(command)
    rng = state.rng
    added = 0
    if command.pattern is Pattern.SIMPLE:
        by_attr: dict = {}
        for opt in options:
            by_attr.setdefault(opt[1], []).append(opt)
        for attr in ("size_mod", "color", "shape"):
            choices = by_attr.get(attr, [])
            rng.shuffle(choices)
            for opt in choices[:2]:
                if _try_perturbation(state, *opt):
                    added += 1
                    break
        return added
    rng.shuffle(options)
    for opt in options[:2]:
        if _try_perturbation(state, *opt):
            return 1
    return 0


def attribute_swaps(command: Command) -> list[Command]:
    """Rule-valid commands obtained by swapping one attribute between two clause NPs."""
    refs = command.nodes()
    out = []
    for a, b in itertools.combinations(range(1, len(refs)), 2):
        sa, sb = refs[a].spec, refs[b].spec
        for attr in ("size_mod", "color", "shape"):
            va, vb = getattr(sa, attr), getattr(sb, attr)
            if va == vb:
                continue

            def swap(i, s, a=a, b=b, attr=attr, va=va, vb=vb):
                if i == a:
                    return replace(s, **{attr: vb})
                if i == b:
                    return replace(s, **{attr: va})
                return s

            swapped = map_specs(command, swap)
            if is_valid(swapped):
                out.append((a, b, attr, swapped))
    return out


def add_isomorphism_distractors(state: _State) -> int:
    """A competitor that becomes the referent when attributes of two clause NPs trade places."""
    command = state.command
    refs = command.nodes()
    swaps = attribute_swaps(command)
    state.rng.shuffle(swaps)
    for a, b, attr, swapped in swaps[:2]:
        if referent_ids(swapped, state.world) - {state.world.target_id}:
            return 0  # the swapped reading already has a competitor
        fresh = _ancestors(refs, a) | _ancestors(refs, b)
        reuse = {r.index: r.index for r in refs if r.index not in fresh}
        note = f"swap {attr} of NP {a} and NP {b}"
        if realize(state, swapped, reuse, DistractorKind.ISOMORPHISM, note, _unique_head(swapped)):
            return 1
    return 0


def add_random_distractors(state: _State, up_to: int) -> int:
    """Uniformly random items on free cells until ``up_to`` objects or the attempts run out."""
    rng = state.rng
    added = 0
    misses = 0
    while len(state.world.objects) < min(up_to, state.max_objects) and misses < 4 * state.stage_attempts:
        free = state.world.free_cells()
        if not free:
            break
        r, c = rng.choice(free)
        obj = WorldObject(state.world.next_id(), rng.choice(ITEM_SHAPES), rng.choice(tuple(Color)),
                          state.random_size(), r, c)
        world = state.world.add(obj)
        if state.target_unique(world):
            state.commit(world, [obj.id], DistractorKind.RANDOM, "")
            added += 1
        else:
            misses += 1
    return added


# ---------------------------------------------------------------------------
# the generation loop


def _build_world(command: Command, cfg: GeneratorConfig, rng: random.Random) -> Optional[_State]:
    size_pair = rng.choice(size_pairs()) if command.has_size_modifier() else None
    try:
        world = place_mentioned(command, rng, size_pair, cfg.grid_size, cfg.forbid_target)
    except PlacementError:
        return None
    state = _State(command, world, rng, size_pair, cfg.max_objects, cfg.stage_attempts)
    if not state.target_unique(world):
        return None
    target_count = rng.randint(*cfg.object_count)
    if cfg.distractors == "full":
        add_relation_distractors(state)
        add_attribute_distractors(state)
        if not add_size_contrast(state):
            return None
        add_isomorphism_distractors(state)
    elif cfg.distractors != "random-only":
        raise ValueError(f"unknown distractor mode {cfg.distractors!r}")
    add_random_distractors(state, target_count)
    try:
        validate(state.world, command)
    except WorldError:
        return None
    return state


def generate_example(command: Command, cfg: GeneratorConfig, rng: random.Random, example_id: str = "") -> Example:
    """Generate one validated example for ``command``; raises :class:`GenerationFailure`."""
    if not is_valid(command):
        raise GenerationFailure(command, "command breaks the sampling rules")
    for _ in range(cfg.world_attempts):
        state = _build_world(command, cfg, rng)
        if state is None:
            continue
        try:
            world = place_agent(state.world, rng)
        except PlacementError:
            continue
        grounded = ground_determiners(command, world)
        actions = tuple(plan(grounded, world))
        n_mentioned = len(command.nodes())
        annotations = tuple(state.annotations[o.id] for o in world.objects if o.id >= n_mentioned)
        return Example(example_id, grounded, world, actions, annotations, tuple(range(n_mentioned)))
    raise GenerationFailure(command, f"no valid world in {cfg.world_attempts} attempts")


def example_rng(seed: int, pattern: Pattern, command_index: int, world_index: int) -> random.Random:
    """Per-example RNG: derived from master seed, pattern, command index and world index."""
    return random.Random(f"world:{seed}:{Pattern(pattern).value}:{command_index}:{world_index}")


def example_id(pattern: Pattern, command_index: int, world_index: int) -> str:
    return f"{Pattern(pattern).value}-{command_index:05d}-{world_index:03d}"


def generate_for_command(command: Command, command_index: int, cfg: GeneratorConfig,
                         pattern: Optional[Pattern] = None):
    """All worlds for one command: ``(examples, failures)``."""
    pattern = pattern or command.pattern
    examples, failures = [], []
    for j in range(cfg.worlds_per_command):
        rng = example_rng(cfg.seed, pattern, command_index, j)
        eid = example_id(pattern, command_index, j)
        try:
            examples.append(generate_example(command, cfg, rng, eid))
        except GenerationFailure as exc:
            log.debug("skipped %s: %s", eid, exc)
            failures.append((eid, exc.reason))
    return examples, failures


def _command_job(args):
    command, index, cfg, pattern = args
    return generate_for_command(command, index, cfg, pattern)


def generate_corpus(pattern: Pattern, cfg: GeneratorConfig, n_commands: Optional[int] = None,
                    workers: int = 1):
    """Sample commands for ``pattern`` and generate their worlds.

    Returns ``(examples, failures)`` in command-index order regardless of the
    worker count, so output is identical for any ``workers``.
    """
    pattern = Pattern(pattern)
    n = cfg.n_commands if n_commands is None else n_commands
    if not n:
        from .commands import population_size
        if pattern is not Pattern.SIMPLE:
            raise ValueError("n_commands must be given for clause-bearing patterns")
        n = population_size(pattern)
    commands = sample_commands(n, pattern, cfg.seed)
    jobs = [(c, i, cfg, pattern) for i, c in enumerate(commands)]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_command_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        results = [_command_job(j) for j in jobs]
    examples, failures = [], []
    for e, f in results:
        examples.extend(e)
        failures.extend(f)
    return examples, failures
