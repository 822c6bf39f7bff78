"""Robot controllers: forage FSM, grid movement, random walk.

Three controller kinds share one body:

* ``UTILITY`` -- maps the world, broadcasts its best-known block cell.
* ``RCS``     -- same body, but broadcasts a uniformly random known cell.
* ``CRW``     -- memoryless random walker; no belief map, no packets.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .belief import (BeliefMap, CellState, select_cell_nearest,
                     select_cell_random)


class Controller(Enum):
    UTILITY = "utility"
    RCS = "rcs"
    CRW = "crw"


class FsmState(Enum):
    EXPLORING = "exploring"
    MOVING_TO_TARGET = "moving_to_target"
    RETURNING_TO_NEST = "returning_to_nest"


# Member aliases for hot loops (enum attribute access is slow on 3.10).
_CRW = Controller.CRW
_RCS = Controller.RCS
_UTILITY = Controller.UTILITY
_EXPLORING = FsmState.EXPLORING
_MOVING = FsmState.MOVING_TO_TARGET
_RETURNING = FsmState.RETURNING_TO_NEST
_HAS_BLOCK = int(CellState.HAS_BLOCK)


@dataclass
class Robot:
    id: int
    pos: tuple
    controller: Controller
    belief: BeliefMap | None = None
    carrying: bool = False
    fsm: FsmState = FsmState.EXPLORING
    target: tuple | None = None


def move_toward(pos, target):
    """One greedy 8-neighborhood step toward ``target`` (identity at target)."""
    x, y = pos
    tx, ty = target
    dx = (tx > x) - (tx < x)
    dy = (ty > y) - (ty < y)
    return (x + dx, y + dy)


def random_walk_step(pos, rng, width, height):
    """Uniform step onto one of the in-grid 8-neighbors of ``pos``."""
    x, y = pos
    candidates = [(x + dx, y + dy)
                  for dy in (-1, 0, 1) for dx in (-1, 0, 1)
                  if (dx or dy) and 0 <= x + dx < width and 0 <= y + dy < height]
    return candidates[rng.integers(len(candidates))]


def _nest_center_cell(arena):
    cx, cy = arena.nest.center()
    return (int(round(cx)), int(round(cy)))


def _pick_target(robot, rng):
    """Navigation target from the robot's own belief.

    Utility robots head for the closest believed block; RCS robots head
    for a uniformly random known cell (their selection policy governs
    navigation as well as messaging).
    """
    if robot.controller is _RCS:
        return select_cell_random(robot.belief, rng)
    return select_cell_nearest(robot.belief, robot.pos)


def step_robot(robot, arena, rng, events=None):
    """Advance one robot by one action tick (move / pickup / deposit).

    Sensing and communication have already run this tick; this phase
    only moves the robot and mutates the arena. Pickup races between
    robots resolve by the engine stepping robots in ascending id order.
    """
    if robot.controller is _CRW:
        _step_crw(robot, arena, rng, events)
        return

    if robot.fsm is _EXPLORING:
        target = _pick_target(robot, rng)
        if target is None:
            robot.pos = random_walk_step(robot.pos, rng, arena.width, arena.height)
            return
        robot.target = target
        robot.fsm = _MOVING

    if robot.fsm is _MOVING:
        tx, ty = robot.target
        if (robot.controller is _UTILITY
                and robot.belief.state[ty, tx] != _HAS_BLOCK):
            # Target invalidated (believed gone): re-plan immediately.
            target = _pick_target(robot, rng)
            if target is None:
                robot.fsm = _EXPLORING
                robot.target = None
                robot.pos = random_walk_step(robot.pos, rng, arena.width, arena.height)
                return
            robot.target = target
        if robot.pos != robot.target:
            robot.pos = move_toward(robot.pos, robot.target)
        if arena.has_block(robot.pos):
            # Any block underfoot is grabbed, target or not.
            _attempt_pickup(robot, arena, events)
        elif robot.pos == robot.target:
            robot.fsm = _EXPLORING
            robot.target = None
        return

    if robot.fsm is _RETURNING:
        if not arena.nest.contains(*robot.pos):
            robot.pos = move_toward(robot.pos, _nest_center_cell(arena))
        if arena.nest.contains(*robot.pos):
            _deposit(robot, arena, events)


def _attempt_pickup(robot, arena, events):
    if arena.pickup_block(robot.pos):
        robot.carrying = True
        robot.fsm = _RETURNING
        if robot.belief is not None:
            # The picker knows it emptied the cell; don't keep advertising it.
            robot.belief.integrate_observation(robot.pos, CellState.EMPTY)
        if events is not None:
            events.append({"robot": robot.id, "event": "pickup",
                           "x": robot.pos[0], "y": robot.pos[1]})
    else:
        robot.fsm = _EXPLORING
    robot.target = None


def _deposit(robot, arena, events):
    arena.deposit_at_nest(robot.pos)
    robot.carrying = False
    robot.fsm = _EXPLORING
    if events is not None:
        events.append({"robot": robot.id, "event": "deposit",
                       "x": robot.pos[0], "y": robot.pos[1]})


def _step_crw(robot, arena, rng, events):
    """Memoryless walker: grab a block underfoot, else wander; home when loaded."""
    if robot.carrying:
        if not arena.nest.contains(*robot.pos):
            robot.pos = move_toward(robot.pos, _nest_center_cell(arena))
        if arena.nest.contains(*robot.pos):
            _deposit(robot, arena, events)
        return
    if arena.has_block(robot.pos) and arena.pickup_block(robot.pos):
        robot.carrying = True
        robot.fsm = _RETURNING
        if events is not None:
            events.append({"robot": robot.id, "event": "pickup",
                           "x": robot.pos[0], "y": robot.pos[1]})
        return
    robot.pos = random_walk_step(robot.pos, rng, arena.width, arena.height)
