"""Oracle action sequences: navigation, push/pull, adverbs; plus a replay simulator."""
from __future__ import annotations

from typing import Iterable, Optional, Sequence

from .domain import ActionToken, Adverb, Direction, Verb, is_heavy, rotate
from .world import Cell, World, WorldObject

WALK, PUSH, PULL, STAY, LEFT, RIGHT = (
    ActionToken.WALK, ActionToken.PUSH, ActionToken.PULL,
    ActionToken.STAY, ActionToken.L_TURN, ActionToken.R_TURN,
)
SPIN = (LEFT, LEFT, LEFT, LEFT)
LOOK_BOTH_WAYS = (LEFT, RIGHT, RIGHT, LEFT)


class PlanningError(RuntimeError):
    pass


def turns_between(start: Direction, goal: Direction) -> list[ActionToken]:
    """Fewest turn tokens from ``start`` to ``goal``; a half turn is two right turns."""
    order = list(Direction)
    steps = (order.index(goal) - order.index(start)) % 4
    return {0: [], 1: [RIGHT], 2: [RIGHT, RIGHT], 3: [LEFT]}[steps]


def _headings(agent: Cell, target: Cell):
    dr, dc = target[0] - agent[0], target[1] - agent[1]
    horizontal = (Direction.EAST if dc > 0 else Direction.WEST, abs(dc)) if dc else None
    vertical = (Direction.SOUTH if dr > 0 else Direction.NORTH, abs(dr)) if dr else None
    return horizontal, vertical


def _segments(agent: Cell, facing: Direction, target: Cell) -> list[tuple[Direction, int]]:
    horizontal, vertical = _headings(agent, target)
    legs = [leg for leg in (horizontal, vertical) if leg]
    if len(legs) == 2:
        h_first = len(turns_between(facing, horizontal[0])) + 1
        v_first = len(turns_between(facing, vertical[0])) + 1
        if v_first < h_first:
            legs.reverse()
    return legs


def _steps(agent: Cell, facing: Direction, target: Cell, adverb: Optional[Adverb]) -> list[Direction]:
    """Heading for each unit step from ``agent`` to ``target``."""
    if adverb is Adverb.WHILE_ZIGZAGGING:
        horizontal, vertical = _headings(agent, target)
        h = horizontal[1] if horizontal else 0
        v = vertical[1] if vertical else 0
        out = []
        while h or v:
            if h:
                out.append(horizontal[0])
                h -= 1
            if v:
                out.append(vertical[0])
                v -= 1
        return out
    return [d for d, length in _segments(agent, facing, target) for _ in range(length)]


def plan_walk(agent: Cell, facing: Direction, target: Cell, world: Optional[World] = None,
              adverb: Optional[Adverb] = None) -> tuple[list[ActionToken], Direction]:
    """Tokens that bring the agent onto ``target`` and the heading it arrives with.

    Items do not block walking, so every cell is reachable. Without an adverb the
    path takes the axis order needing fewer turns (horizontal first on ties).
    """
    if world is not None and not (world.in_grid(agent) and world.in_grid(target)):
        raise PlanningError(f"cannot plan between {agent} and {target}")
    tokens: list[ActionToken] = []
    heading = facing
    for step in _steps(agent, facing, target, adverb):
        tokens.extend(turns_between(heading, step))
        heading = step
        if adverb is Adverb.WHILE_SPINNING:
            tokens.extend(SPIN)
        elif adverb is Adverb.CAUTIOUSLY:
            tokens.extend(LOOK_BOTH_WAYS)
        tokens.append(WALK)
        if adverb is Adverb.HESITANTLY:
            tokens.append(STAY)
    return tokens, heading


def free_run(world: World, obj: WorldObject, direction: Direction) -> int:
    """Cells ``obj`` can slide along ``direction`` before a wall or another item."""
    dr, dc = direction.delta
    r, c = obj.cell
    k = 0
    while True:
        nxt = (r + dr * (k + 1), c + dc * (k + 1))
        if not world.in_grid(nxt):
            return k
        other = world.item_at(nxt)
        if other is not None and other.id != obj.id:
            return k
        k += 1


def plan_manipulate(verb: Verb, facing: Direction, target: WorldObject, world: World,
                    adverb: Optional[Adverb] = None) -> list[ActionToken]:
    if verb is Verb.WALK_TO:
        return []
    token = PUSH if verb is Verb.PUSH else PULL
    direction = facing if verb is Verb.PUSH else facing.opposite()
    per_cell = 2 if is_heavy(target.size) else 1
    tokens = []
    for _ in range(free_run(world, target, direction) * per_cell):
        tokens.append(token)
        if adverb is Adverb.HESITANTLY:
            tokens.append(STAY)
    return tokens


def plan(command, world: World) -> list[ActionToken]:
    """Gold action sequence for ``command`` in ``world`` (target and agent taken from the world)."""
    if world.agent is None or world.target_id is None:
        raise PlanningError("world has no agent or target")
    target = world.target
    walk, heading = plan_walk(world.agent, world.agent_dir, target.cell, world, command.adverb)
    return walk + plan_manipulate(command.verb, heading, target, world, command.adverb)


# ---------------------------------------------------------------------------
# serialization


def format_actions(tokens: Iterable[ActionToken]) -> str:
    return ",".join(t.value for t in tokens)


def parse_actions(text: str) -> list[ActionToken]:
    return [ActionToken(t) for t in text.split(",")] if text else []


# ---------------------------------------------------------------------------
# replay


class SimulationError(RuntimeError):
    pass


def simulate(world: World, tokens: Sequence[ActionToken], verb: Verb):
    """Execute ``tokens`` and return ``(agent_cell, heading, target_cell, moved_direction)``.

    Illegal moves (walking off the grid, pushing or pulling into a wall or an
    item, manipulating without standing on the target) raise SimulationError.
    """
    pos = world.agent
    heading = world.agent_dir
    target = world.target
    tpos = target.cell
    blocked = {o.cell for o in world.objects if not o.is_box and o.id != target.id}
    heavy = is_heavy(target.size)
    pending = 0
    moved = None
    n = world.grid_size
    for t in tokens:
        if t in (LEFT, RIGHT):
            heading = rotate(heading, t)
        elif t is STAY:
            pass
        elif t is WALK:
            dr, dc = heading.delta
            pos = (pos[0] + dr, pos[1] + dc)
            if not (0 <= pos[0] < n and 0 <= pos[1] < n):
                raise SimulationError("walked off the grid")
        elif t in (PUSH, PULL):
            if (t is PUSH) != (verb is Verb.PUSH) or verb is Verb.WALK_TO:
                raise SimulationError(f"{t.value} token with verb {verb.value!r}")
            if pos != tpos:
                raise SimulationError("manipulating without standing on the target")
            d = heading if t is PUSH else heading.opposite()
            if moved is not None and d is not moved:
                raise SimulationError("direction changed mid-manipulation")
            pending += 1
            if pending == (2 if heavy else 1):
                pending = 0
                dr, dc = d.delta
                nxt = (tpos[0] + dr, tpos[1] + dc)
                if not (0 <= nxt[0] < n and 0 <= nxt[1] < n) or nxt in blocked:
                    raise SimulationError("object cannot move further")
                tpos = nxt
                pos = nxt
                moved = d
        else:
            raise SimulationError(f"unknown token {t!r}")
    if pending:
        raise SimulationError("incomplete heavy-object move")
    return pos, heading, tpos, moved


def replay_ok(world: World, tokens: Sequence[ActionToken], verb: Verb) -> bool:
    """Whether ``tokens`` reach the target (walk) or slide it as far as it goes (push/pull)."""
    try:
        pos, heading, tpos, moved = simulate(world, tokens, verb)
    except SimulationError:
        return False
    if verb is Verb.WALK_TO:
        return pos == world.target.cell
    if pos != tpos:
        return False
    # the heading on arrival fixes the direction; replaying it must leave the object stuck
    d = heading if verb is Verb.PUSH else heading.opposite()
    dr, dc = d.delta
    nxt = (tpos[0] + dr, tpos[1] + dc)
    blocked = {o.cell for o in world.objects if not o.is_box and o.id != world.target_id}
    return not world.in_grid(nxt) or nxt in blocked
