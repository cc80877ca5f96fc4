"""Multi-edge relation graphs for worlds and commands, and NP predicate evaluation."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

from . import kernels
from .commands import Command, ObjectSpec
from .domain import RELATIONS, Color, Relation, Shape, SizeModifier
from .world import World, WorldObject

_COLOR_CODE = {c: i for i, c in enumerate(Color)}
_SHAPE_CODE = {s: i for i, s in enumerate(Shape)}


def _intrinsic(spec: ObjectSpec, obj: WorldObject) -> bool:
    if spec.color is not None and obj.color is not spec.color:
        return False
    if spec.shape is None:
        return not obj.is_box
    return obj.shape is spec.shape


def candidate_mask(spec: ObjectSpec, world: World) -> int:
    """Bitmask (over ``world.objects`` order) of objects an NP describes.

    ``small``/``big`` pick the minimal/maximal size among the objects that match
    the NP's color and shape, so the same object can be small in one world and
    big in another.
    """
    idx = [i for i, o in enumerate(world.objects) if _intrinsic(spec, o)]
    if spec.size_mod is not None and idx:
        sizes = [world.objects[i].size for i in idx]
        want = min(sizes) if spec.size_mod is SizeModifier.SMALL else max(sizes)
        idx = [i for i in idx if world.objects[i].size == want]
    mask = 0
    for i in idx:
        mask |= 1 << i
    return mask


def node_matches(spec: ObjectSpec, obj: WorldObject, world: World) -> bool:
    i = next(k for k, o in enumerate(world.objects) if o.id == obj.id)
    return bool((candidate_mask(spec, world) >> i) & 1)


@dataclass(frozen=True)
class RelationGraph:
    """World graph: node per object, one edge per (src, dst, relation) that holds."""

    ids: tuple[int, ...]
    labels: tuple[tuple[Shape, str, int], ...]
    matrix: bytes = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.ids)

    def relations(self, src: int, dst: int) -> set[Relation]:
        """Relations on the (src, dst) edge bundle, addressed by object id."""
        i, j = self.ids.index(src), self.ids.index(dst)
        m = self.matrix[i * self.n + j]
        return {r for r in RELATIONS if m & r.bit}

    @cached_property
    def edges(self) -> frozenset:
        out = set()
        n = self.n
        for i in range(n):
            for j in range(n):
                m = self.matrix[i * n + j]
                for r in RELATIONS:
                    if m & r.bit:
                        out.add((self.ids[i], self.ids[j], r))
        return frozenset(out)

    def to_text(self) -> str:
        lines = [f"node {i} {shape.value} {color} {size}" for i, (shape, color, size) in zip(self.ids, self.labels)]
        lines += [f"edge {a} {b} {r.name}" for a, b, r in sorted(self.edges, key=lambda e: (e[0], e[1], e[2].bit))]
        return "\n".join(lines) + "\n"


def world_to_graph(world: World) -> RelationGraph:
    objs = world.objects
    rows = bytes(o.row for o in objs)
    cols = bytes(o.col for o in objs)
    colors = bytes(_COLOR_CODE[o.color] for o in objs)
    shapes = bytes(_SHAPE_CODE[o.shape] for o in objs)
    sizes = bytes(o.size for o in objs)
    boxes = bytes(o.is_box for o in objs)
    matrix = kernels.relation_matrix(rows, cols, colors, shapes, sizes, boxes)
    return RelationGraph(
        tuple(o.id for o in objs),
        tuple((o.shape, o.color.value, o.size) for o in objs),
        matrix,
    )


@dataclass(frozen=True)
class CommandGraph:
    """Command graph: node per NP (preorder, root first), edge per relative clause."""

    nodes: tuple[ObjectSpec, ...]
    parent: tuple[int, ...]
    edges: tuple[tuple[int, int, Relation], ...]
    root: int = 0

    @property
    def is_star(self) -> bool:
        return all(p == self.root for p in self.parent[1:])

    @property
    def edge_bits(self) -> tuple[int, ...]:
        bits = [0] * len(self.nodes)
        for _, dst, rel in self.edges:
            bits[dst] = rel.bit
        return tuple(bits)

    def to_text(self) -> str:
        lines = [f"node {i} {spec}" + (" root" if i == self.root else "") for i, spec in enumerate(self.nodes)]
        lines += [f"edge {a} {b} {r.name}" for a, b, r in self.edges]
        return "\n".join(lines) + "\n"


def command_to_graph(command: Command) -> CommandGraph:
    refs = command.nodes()
    return CommandGraph(
        tuple(r.spec for r in refs),
        tuple(r.parent for r in refs),
        tuple((r.parent, r.index, r.relation) for r in refs[1:]),
    )


def candidate_masks(gc: CommandGraph, world: World) -> tuple[int, ...]:
    return tuple(candidate_mask(spec, world) for spec in gc.nodes)


def read_graph_text(text: str) -> tuple[list, list]:
    """Parse the adjacency text format back into (nodes, edges) lists of strings."""
    nodes, edges = [], []
    for line in text.splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "node":
            nodes.append(parts[1:])
        elif parts[0] == "edge":
            edges.append((parts[1], parts[2], Relation[parts[3]]))
        else:
            raise ValueError(f"unrecognised graph line: {line!r}")
    return nodes, edges
