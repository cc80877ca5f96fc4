"""Grid worlds: objects, relation semantics, validation and placement of mentioned objects."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, replace
from typing import Iterable, Optional

from .domain import (
    ITEM_SHAPES,
    POSITIONAL,
    SIZES,
    Color,
    ContractError,
    Direction,
    Relation,
    Shape,
    SizeModifier,
)

GRID_SIZE = 6
MAX_OBJECTS = 16
MAX_BOXES = 2
PLACEMENT_ATTEMPTS = 100

Cell = tuple[int, int]


class UnsupportedRelationError(ContractError):
    pass


class PlacementError(RuntimeError):
    """Placement stayed infeasible for the whole retry budget."""


class WorldError(ValueError):
    pass


@dataclass(frozen=True)
class WorldObject:
    id: int
    shape: Shape
    color: Color
    size: int
    row: int
    col: int

    @property
    def is_box(self) -> bool:
        return self.shape is Shape.BOX

    @property
    def cell(self) -> Cell:
        return (self.row, self.col)

    def extent(self) -> list[Cell]:
        """Cells covered: the anchor for items, the s-by-s block for a box."""
        if not self.is_box:
            return [self.cell]
        return [(self.row + dr, self.col + dc) for dr in range(self.size) for dc in range(self.size)]

    def covers(self, cell: Cell) -> bool:
        r, c = cell
        if not self.is_box:
            return cell == self.cell
        return self.row <= r < self.row + self.size and self.col <= c < self.col + self.size


@dataclass(frozen=True)
class World:
    objects: tuple[WorldObject, ...] = ()
    grid_size: int = GRID_SIZE
    agent: Optional[Cell] = None
    agent_dir: Direction = Direction.EAST
    target_id: Optional[int] = None

    def get(self, obj_id: int) -> WorldObject:
        for o in self.objects:
            if o.id == obj_id:
                return o
        raise KeyError(obj_id)

    @property
    def target(self) -> WorldObject:
        return self.get(self.target_id)

    def add(self, *objs: WorldObject) -> "World":
        return replace(self, objects=self.objects + tuple(objs))

    def without(self, ids: Iterable[int]) -> "World":
        drop = set(ids)
        return replace(self, objects=tuple(o for o in self.objects if o.id not in drop))

    def next_id(self) -> int:
        return max((o.id for o in self.objects), default=-1) + 1

    def item_cells(self) -> set[Cell]:
        return {o.cell for o in self.objects if not o.is_box}

    def boxes(self) -> list[WorldObject]:
        return [o for o in self.objects if o.is_box]

    def free_cells(self) -> list[Cell]:
        taken = self.item_cells()
        n = self.grid_size
        return [(r, c) for r in range(n) for c in range(n) if (r, c) not in taken]

    def item_at(self, cell: Cell) -> Optional[WorldObject]:
        for o in self.objects:
            if not o.is_box and o.cell == cell:
                return o
        return None

    def in_grid(self, cell: Cell) -> bool:
        return 0 <= cell[0] < self.grid_size and 0 <= cell[1] < self.grid_size


def holds(rel: Relation, a: WorldObject, b: WorldObject) -> bool:
    """Whether ``a REL b`` is true (``a`` is the clause owner, ``b`` the clause object)."""
    if a.id == b.id:
        raise ContractError("relations are only defined between distinct objects")
    if rel in POSITIONAL:
        if a.is_box or b.is_box:
            raise UnsupportedRelationError(f"{rel.name} is undefined for boxes")
        return a.row == b.row if rel is Relation.SAME_ROW else a.col == b.col
    if rel is Relation.SAME_COLOR:
        return a.color == b.color
    if rel is Relation.SAME_SHAPE:
        return a.shape == b.shape
    if rel is Relation.SAME_SIZE:
        return a.size == b.size
    return b.is_box and not a.is_box and b.covers(a.cell)


def validate(world: World, command=None) -> None:
    """Raise :class:`WorldError` listing every broken world invariant."""
    problems = []
    n = world.grid_size
    objs = world.objects
    if len(objs) > MAX_OBJECTS:
        problems.append(f"{len(objs)} objects exceeds {MAX_OBJECTS}")
    if len({o.id for o in objs}) != len(objs):
        problems.append("duplicate object ids")
    for o in objs:
        if o.size not in SIZES:
            problems.append(f"object {o.id} has size {o.size}")
        if not all(0 <= r < n and 0 <= c < n for r, c in o.extent()):
            problems.append(f"object {o.id} extends outside the grid")
    cells = [o.cell for o in objs if not o.is_box]
    if len(set(cells)) != len(cells):
        problems.append("two items share a cell")
    boxes = world.boxes()
    if len(boxes) > MAX_BOXES:
        problems.append(f"{len(boxes)} boxes exceeds {MAX_BOXES}")
    for b1, b2 in itertools.combinations(boxes, 2):
        if set(b1.extent()) & set(b2.extent()):
            problems.append(f"boxes {b1.id} and {b2.id} overlap")
    if world.agent is not None:
        if not world.in_grid(world.agent):
            problems.append("agent outside the grid")
        if world.agent in set(cells):
            problems.append("agent stands on an item")
        if world.agent_dir is not Direction.EAST:
            problems.append("agent must start facing east")
    if world.target_id is not None:
        try:
            if world.target.is_box:
                problems.append("target is a box")
        except KeyError:
            problems.append(f"target {world.target_id} not in world")
    if command is not None and command.has_size_modifier():
        sizes = {o.size for o in objs}
        if len(sizes) != 2:
            problems.append(f"size-modified command needs exactly two sizes, world has {sorted(sizes)}")
    if problems:
        raise WorldError("; ".join(problems))


# ---------------------------------------------------------------------------
# placement


def size_pairs() -> list[tuple[int, int]]:
    return list(itertools.combinations(SIZES, 2))


def box_anchors(world: World, size: int, containing: Optional[Cell] = None) -> list[Cell]:
    """Top-left anchors for a new box that fit the grid and overlap no existing box."""
    n = world.grid_size
    taken = {cell for b in world.boxes() for cell in b.extent()}
    out = []
    for r in range(n - size + 1):
        for c in range(n - size + 1):
            if containing is not None:
                cr, cc = containing
                if not (r <= cr < r + size and c <= cc < c + size):
                    continue
            if any((r + dr, c + dc) in taken for dr in range(size) for dc in range(size)):
                continue
            out.append((r, c))
    return out


class _Groups:
    """Union-find over NP indices for attribute sharing."""

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            i = self.parent[i]
        return i

    def union(self, a: int, b: int) -> None:
        self.parent[self.find(a)] = self.find(b)


def assign_attributes(nodes, rng: random.Random, size_pair=None, forbid_root=()) -> list[tuple]:
    """Concrete (shape, color, size) per NP, honouring descriptors and attribute clauses."""
    groups = {attr: _Groups(len(nodes)) for attr in ("color", "shape", "size")}
    for ref in nodes[1:]:
        rel = ref.relation
        if rel is Relation.SAME_COLOR:
            groups["color"].union(ref.index, ref.parent)
        elif rel is Relation.SAME_SHAPE:
            groups["shape"].union(ref.index, ref.parent)
        elif rel is Relation.SAME_SIZE:
            groups["size"].union(ref.index, ref.parent)

    for _ in range(PLACEMENT_ATTEMPTS):
        color_of, shape_of, size_of = {}, {}, {}
        out = []
        for ref in nodes:
            spec = ref.spec
            if spec.color is not None:
                color = spec.color
            else:
                g = groups["color"].find(ref.index)
                color = color_of.setdefault(g, rng.choice(tuple(Color)))
            if spec.shape is not None:
                shape = spec.shape
            else:
                g = groups["shape"].find(ref.index)
                shape = shape_of.setdefault(g, rng.choice(ITEM_SHAPES))
            if spec.size_mod is not None:
                if size_pair is None:
                    raise ContractError("size modifier without a size pair")
                size = size_pair[0] if spec.size_mod is SizeModifier.SMALL else size_pair[1]
            else:
                g = groups["size"].find(ref.index)
                size = size_of.setdefault(g, rng.choice(size_pair or SIZES))
            out.append((shape, color, size))
        if (out[0][1], out[0][0]) not in forbid_root:
            return out
    raise PlacementError("could not avoid the forbidden target attributes")


def constrained_cells(world: World, anchor: WorldObject, rel: Relation) -> list[Cell]:
    """Free item cells whose occupant would satisfy ``new REL anchor`` positionally."""
    free = world.free_cells()
    if rel is Relation.SAME_ROW:
        return [c for c in free if c[0] == anchor.row and c != anchor.cell]
    if rel is Relation.SAME_COLUMN:
        return [c for c in free if c[1] == anchor.col and c != anchor.cell]
    if rel is Relation.INSIDE_OF:
        return [c for c in free if anchor.covers(c)]
    return free


def place_mentioned(command, rng: random.Random, size_pair=None, grid_size: int = GRID_SIZE,
                    forbid_root=()) -> World:
    """One object per NP (ids follow NP preorder) positioned so every clause holds.

    The root NP's object becomes the target. Raises :class:`PlacementError` once
    the retry budget is spent.
    """
    nodes = command.nodes()
    for _ in range(PLACEMENT_ATTEMPTS):
        attrs = assign_attributes(nodes, rng, size_pair, forbid_root)
        world = World(grid_size=grid_size, target_id=0)
        ok = True
        for ref, (shape, color, size) in zip(nodes, attrs):
            parent = world.get(ref.parent) if ref.parent >= 0 else None
            if shape is Shape.BOX:
                if len(world.boxes()) >= MAX_BOXES:
                    ok = False
                    break
                containing = parent.cell if ref.relation is Relation.INSIDE_OF else None
                options = box_anchors(world, size, containing)
            elif parent is not None and ref.relation in POSITIONAL:
                options = constrained_cells(world, parent, ref.relation)
            else:
                options = world.free_cells()
            if not options:
                ok = False
                break
            r, c = rng.choice(options)
            world = world.add(WorldObject(ref.index, shape, color, size, r, c))
        if ok:
            for ref in nodes[1:]:
                assert holds(ref.relation, world.get(ref.parent), world.get(ref.index))
            return world
    raise PlacementError(f"could not place the objects of '{command}'")


def place_agent(world: World, rng: random.Random) -> World:
    """Agent on a uniformly chosen cell free of items, facing east."""
    options = world.free_cells()
    if world.target_id is not None:
        tcell = world.target.cell
        options = [c for c in options if c != tcell]
    if not options:
        raise PlacementError("no free cell for the agent")
    return replace(world, agent=rng.choice(options), agent_dir=Direction.EAST)
