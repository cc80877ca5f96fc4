"""Shared vocabulary: attribute values, relations, verbs, adverbs, actions, headings."""
from __future__ import annotations

from enum import Enum


class Color(str, Enum):
    RED = "red"
    GREEN = "green"
    BLUE = "blue"
    YELLOW = "yellow"


class Shape(str, Enum):
    CIRCLE = "circle"
    SQUARE = "square"
    CYLINDER = "cylinder"
    BOX = "box"


#: Surface form of the shape wildcard. In ASTs the wildcard is ``shape=None``.
WILDCARD = "object"

#: Shapes a free-standing (non-container) object can take.
ITEM_SHAPES = (Shape.CIRCLE, Shape.SQUARE, Shape.CYLINDER)

SIZES = (1, 2, 3, 4)


def is_heavy(size: int) -> bool:
    if size not in SIZES:
        raise ValueError(f"size must be one of {SIZES}, got {size!r}")
    return size >= 3


class SizeModifier(str, Enum):
    SMALL = "small"
    BIG = "big"


class Relation(str, Enum):
    SAME_ROW = "in the same row as"
    SAME_COLUMN = "in the same column as"
    SAME_COLOR = "in the same color as"
    SAME_SHAPE = "in the same shape as"
    SAME_SIZE = "in the same size as"
    INSIDE_OF = "inside of"

    @property
    def bit(self) -> int:
        return 1 << RELATIONS.index(self)

    @property
    def symmetric(self) -> bool:
        return self is not Relation.INSIDE_OF


RELATIONS = tuple(Relation)
POSITIONAL = (Relation.SAME_ROW, Relation.SAME_COLUMN)
# relation -> the attribute it shares (Rules 1A-1C forbid that descriptor on both sides)
SHARED_ATTRIBUTE = {
    Relation.SAME_COLOR: "color",
    Relation.SAME_SHAPE: "shape",
    Relation.SAME_SIZE: "size_mod",
}


class Verb(str, Enum):
    WALK_TO = "walk to"
    PUSH = "push"
    PULL = "pull"


class Adverb(str, Enum):
    WHILE_ZIGZAGGING = "while zigzagging"
    WHILE_SPINNING = "while spinning"
    CAUTIOUSLY = "cautiously"
    HESITANTLY = "hesitantly"


class ActionToken(str, Enum):
    WALK = "walk"
    PUSH = "push"
    PULL = "pull"
    STAY = "stay"
    L_TURN = "L_turn"
    R_TURN = "R_turn"


class Direction(str, Enum):
    # clockwise order; R_turn advances one step
    EAST = "east"
    SOUTH = "south"
    WEST = "west"
    NORTH = "north"

    @property
    def delta(self) -> tuple[int, int]:
        return _DELTAS[self]

    def opposite(self) -> "Direction":
        return _CLOCKWISE[(_CLOCKWISE.index(self) + 2) % 4]


_CLOCKWISE = tuple(Direction)
_DELTAS = {
    Direction.EAST: (0, 1),
    Direction.SOUTH: (1, 0),
    Direction.WEST: (0, -1),
    Direction.NORTH: (-1, 0),
}


class ContractError(ValueError):
    """An operation was called outside its precondition."""


def rotate(d: Direction, token: ActionToken) -> Direction:
    """Heading after one turn token (row 0 top, so South is clockwise from East)."""
    i = _CLOCKWISE.index(d)
    if token is ActionToken.R_TURN:
        return _CLOCKWISE[(i + 1) % 4]
    if token is ActionToken.L_TURN:
        return _CLOCKWISE[(i - 1) % 4]
    raise ContractError(f"rotate expects a turn token, got {token!r}")


def parse_enum(enum_cls, text: str):
    """Look up an enum member by its serialized string (value or member name)."""
    try:
        return enum_cls(text)
    except ValueError:
        key = text.upper().replace(" ", "_")
        if key in enum_cls.__members__:
            return enum_cls.__members__[key]
        raise
