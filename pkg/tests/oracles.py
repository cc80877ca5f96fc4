"""Independent reference implementations used to check the package.

Nothing here touches the kernels or the graph code: predicates are evaluated
object by object and relations through ``world.holds``.
"""
import itertools
import random
from collections import deque

from relgrid.domain import ITEM_SHAPES, SIZES, ActionToken, Color, ContractError, Direction, Shape, SizeModifier
from relgrid.world import World, WorldObject, holds


def np_objects(spec, world):
    """Ids of the objects an NP picks out, with small/big relative to the NP's class."""
    pool = [
        o for o in world.objects
        if (spec.color is None or o.color == spec.color)
        and (o.shape == spec.shape if spec.shape is not None else o.shape != Shape.BOX)
    ]
    if spec.size_mod is not None and pool:
        pick = min if spec.size_mod == SizeModifier.SMALL else max
        want = pick(o.size for o in pool)
        pool = [o for o in pool if o.size == want]
    return {o.id for o in pool}


def _holds(rel, a, b):
    try:
        return holds(rel, a, b)
    except ContractError:
        return False


def brute_referents(command, world):
    """Referents by trying every injective assignment of objects to NPs."""
    nodes = command.nodes()
    allowed = [np_objects(r.spec, world) for r in nodes]
    found = set()
    for combo in itertools.permutations(world.objects, len(nodes)):
        if any(o.id not in allowed[i] for i, o in enumerate(combo)):
            continue
        if all(_holds(r.relation, combo[r.parent], combo[r.index]) for r in nodes[1:]):
            found.add(combo[0].id)
    return found


def bfs_walk_cost(n, start, facing, goal):
    """Fewest tokens (walk, L_turn, R_turn) to stand on ``goal`` in an n x n grid."""
    order = list(Direction)
    seen = {(start, facing): 0}
    queue = deque([(start, facing)])
    while queue:
        cell, d = queue.popleft()
        cost = seen[(cell, d)]
        if cell == goal:
            return cost
        i = order.index(d)
        nxt = [(cell, order[(i + 1) % 4]), (cell, order[(i - 1) % 4])]
        dr, dc = d.delta
        step = (cell[0] + dr, cell[1] + dc)
        if 0 <= step[0] < n and 0 <= step[1] < n:
            nxt.append((step, d))
        for state in nxt:
            if state not in seen:
                seen[state] = cost + 1
                queue.append(state)
    raise AssertionError("goal unreachable")


def walk_replay(start, facing, tokens):
    pos, order, d = start, list(Direction), facing
    for t in tokens:
        if t == ActionToken.WALK:
            pos = (pos[0] + d.delta[0], pos[1] + d.delta[1])
        elif t == ActionToken.R_TURN:
            d = order[(order.index(d) + 1) % 4]
        elif t == ActionToken.L_TURN:
            d = order[(order.index(d) - 1) % 4]
    return pos, d


def random_world(rng: random.Random, n_items: int, n_boxes: int = 0, grid: int = 6, sizes=SIZES):
    """Random items on distinct cells plus non-overlapping boxes; no agent."""
    objs = []
    taken_box = set()
    for _ in range(n_boxes):
        for _ in range(50):
            s = rng.choice(sizes)
            r, c = rng.randrange(grid - s + 1), rng.randrange(grid - s + 1)
            ext = {(r + i, c + j) for i in range(s) for j in range(s)}
            if not ext & taken_box:
                taken_box |= ext
                objs.append(WorldObject(len(objs), Shape.BOX, rng.choice(list(Color)), s, r, c))
                break
    cells = rng.sample([(r, c) for r in range(grid) for c in range(grid)], n_items)
    for r, c in cells:
        objs.append(WorldObject(len(objs), rng.choice(ITEM_SHAPES), rng.choice(list(Color)),
                                rng.choice(sizes), r, c))
    return World(tuple(objs), grid)
