import random

import pytest
from hypothesis import given, strategies as st

from oracles import bfs_walk_cost, walk_replay
from relgrid.domain import ActionToken as A, Adverb, Color, Direction, Shape, Verb
from relgrid.planner import (
    free_run,
    format_actions,
    parse_actions,
    plan_manipulate,
    plan_walk,
    replay_ok,
    simulate,
    turns_between,
)
from relgrid.world import World, WorldObject

cells = st.tuples(st.integers(0, 5), st.integers(0, 5))


def test_turns():
    assert turns_between(Direction.EAST, Direction.SOUTH) == [A.R_TURN]
    assert turns_between(Direction.EAST, Direction.NORTH) == [A.L_TURN]
    assert turns_between(Direction.EAST, Direction.WEST) == [A.R_TURN, A.R_TURN]
    assert turns_between(Direction.WEST, Direction.WEST) == []


def test_walk_east_then_south():
    tokens, heading = plan_walk((0, 0), Direction.EAST, (2, 3))
    assert tokens == [A.WALK] * 3 + [A.R_TURN] + [A.WALK] * 2
    assert heading is Direction.SOUTH


def test_walk_prefers_fewer_turns():
    # facing south, target south-west: going south first saves a turn
    tokens, _ = plan_walk((0, 3), Direction.SOUTH, (2, 1))
    assert tokens == [A.WALK, A.WALK, A.R_TURN, A.WALK, A.WALK]


@given(cells, cells, st.sampled_from(list(Direction)))
def test_walk_is_shortest(start, goal, facing):
    tokens, heading = plan_walk(start, facing, goal)
    assert len(tokens) == bfs_walk_cost(6, start, facing, goal)
    assert walk_replay(start, facing, tokens) == (goal, heading)


@given(cells, cells, st.sampled_from(list(Adverb)))
def test_adverbs_still_reach_the_target(start, goal, adverb):
    tokens, heading = plan_walk(start, Direction.EAST, goal, adverb=adverb)
    assert walk_replay(start, Direction.EAST, tokens) == (goal, heading)
    walks = tokens.count(A.WALK)
    assert walks == abs(start[0] - goal[0]) + abs(start[1] - goal[1])
    if adverb is Adverb.HESITANTLY:
        assert tokens.count(A.STAY) == walks
    if adverb is Adverb.WHILE_SPINNING:
        assert tokens.count(A.L_TURN) >= 4 * walks


def test_zigzag_alternates():
    tokens, _ = plan_walk((0, 0), Direction.EAST, (2, 2), adverb=Adverb.WHILE_ZIGZAGGING)
    assert tokens == [A.WALK, A.R_TURN, A.WALK, A.L_TURN, A.WALK, A.R_TURN, A.WALK]


def test_cautious_looks_before_each_step():
    tokens, _ = plan_walk((0, 0), Direction.EAST, (0, 2), adverb=Adverb.CAUTIOUSLY)
    look = [A.L_TURN, A.R_TURN, A.R_TURN, A.L_TURN]
    assert tokens == look + [A.WALK] + look + [A.WALK]


def _world(target, *others, agent=(0, 0)):
    return World((target,) + others, agent=agent, agent_dir=Direction.EAST, target_id=target.id)


def test_push_light_and_heavy():
    light = WorldObject(0, Shape.CIRCLE, Color.RED, 2, 0, 2)
    heavy = WorldObject(0, Shape.CIRCLE, Color.RED, 3, 0, 2)
    assert plan_manipulate(Verb.PUSH, Direction.EAST, light, _world(light)) == [A.PUSH] * 3
    assert plan_manipulate(Verb.PUSH, Direction.EAST, heavy, _world(heavy)) == [A.PUSH] * 6


def test_push_stops_at_items_not_boxes():
    target = WorldObject(0, Shape.CIRCLE, Color.RED, 1, 0, 2)
    blocker = WorldObject(1, Shape.SQUARE, Color.RED, 1, 0, 4)
    box = WorldObject(2, Shape.BOX, Color.RED, 2, 0, 3)
    w = _world(target, blocker, box)
    assert free_run(w, target, Direction.EAST) == 1
    assert free_run(w, target, Direction.WEST) == 2


def test_pull_moves_backwards_and_hesitant_pauses():
    target = WorldObject(0, Shape.CIRCLE, Color.RED, 1, 0, 2)
    w = _world(target)
    assert plan_manipulate(Verb.PULL, Direction.EAST, target, w, Adverb.HESITANTLY) == [A.PULL, A.STAY] * 2


def test_against_the_wall_means_no_push_tokens():
    target = WorldObject(0, Shape.CIRCLE, Color.RED, 1, 0, 5)
    assert plan_manipulate(Verb.PUSH, Direction.EAST, target, _world(target)) == []


def test_replay_and_illegal_sequences():
    target = WorldObject(0, Shape.CIRCLE, Color.RED, 1, 0, 2)
    w = _world(target)
    gold = [A.WALK, A.WALK, A.PUSH, A.PUSH, A.PUSH]
    assert replay_ok(w, gold, Verb.PUSH)
    assert not replay_ok(w, gold[:-1], Verb.PUSH)
    assert not replay_ok(w, gold + [A.PUSH], Verb.PUSH)
    assert not replay_ok(w, [A.WALK, A.PUSH], Verb.PUSH)
    assert not replay_ok(w, gold, Verb.PULL)
    assert simulate(w, gold, Verb.PUSH)[2] == (0, 5)


def test_action_text_roundtrip():
    tokens = [A.WALK, A.L_TURN, A.STAY, A.PULL]
    assert parse_actions(format_actions(tokens)) == tokens
    assert parse_actions("") == []
