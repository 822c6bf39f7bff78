"""Deterministic tick loop: phase ordering, seeded substreams, metrics.

Every tick runs fixed phases in robot-id order: pheromone decay,
sensing (view-entry inaccuracy accounting + observation integration),
communication (consume last tick's inbox, fan out new packets for the
next tick), robot actions, block respawn, and metric sampling. One seed
drives keyed substreams per (purpose, robot id), so identical configs
replay bit-identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .agent import Controller, Robot, step_robot
from .belief import BeliefMap
from .comm import CommConfig, communicate_step
from .world import ArenaConfig, ConfigError, build_arena

# Substream keys: changing the robot count must not reshuffle other draws.
_STREAM_WORLD = 0
_STREAM_MOVE = 1
_STREAM_COMM = 2


def substream(seed, *key):
    """Independent generator keyed by (seed, *key)."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


@dataclass(frozen=True)
class SimConfig:
    arena: ArenaConfig
    n_robots: int
    controller: Controller
    comm: CommConfig = CommConfig()
    rho: float = 0.001
    decay_form: str = "rate"
    ticks: int = 5000
    metrics_interval: int = 1000
    seed: int = 0

    def validate(self):
        self.arena.validate()
        self.comm.validate()
        if self.ticks <= 0:
            raise ConfigError("ticks must be > 0")
        if self.metrics_interval <= 0:
            raise ConfigError("metrics_interval must be > 0")
        if self.n_robots <= 0:
            raise ConfigError("n_robots must be > 0")
        if not (0.0 <= self.rho <= 1.0):
            raise ConfigError("rho must be in [0, 1]")
        if self.decay_form not in ("rate", "literal"):
            raise ConfigError(f"unknown decay_form: {self.decay_form!r}")
        retention = 1.0 - self.rho if self.decay_form == "rate" else self.rho
        if retention >= 1.0:
            raise ConfigError("effective decay rate must be positive (tau_max finite)")
        spawnable = self.arena.width * self.arena.height - self.arena.source.area
        if self.n_robots > spawnable:
            raise ConfigError(
                f"{self.n_robots} robots cannot start on {spawnable} non-source cells")


def performance(blocks, inaccuracies):
    """Blocks per inaccuracy; NaN when no inaccuracy was ever recorded."""
    if inaccuracies > 0:
        return blocks / inaccuracies
    return math.nan


@dataclass
class RunMetrics:
    blocks_collected: int
    inaccuracies: int
    inaccuracy_series: list = field(default_factory=list)

    @property
    def performance(self):
        return performance(self.blocks_collected, self.inaccuracies)


class Simulation:
    """One seeded run. Strictly single-threaded; instances are independent."""

    def __init__(self, cfg, trace=None):
        cfg.validate()
        self.cfg = cfg
        self.trace = trace  # callable(dict) for the optional event log
        self.tick_index = 0
        self.inaccuracies = 0
        self.series = []

        world_rng = substream(cfg.seed, _STREAM_WORLD)
        self.world_rng = world_rng
        self.arena = build_arena(cfg.arena, world_rng)
        self.nest_dist = self.arena.nest_distance_grid(floor=1.0)

        h, w = cfg.arena.height, cfg.arena.width
        has_belief = cfg.controller is not Controller.CRW
        if has_belief:
            # All robots' maps live in shared stacks so decay is one multiply.
            self._state_stack = np.zeros((cfg.n_robots, h, w), np.uint8)
            self._ph_stack = np.zeros((cfg.n_robots, h, w))
            self._view_stack = np.zeros((cfg.n_robots, h, w), bool)

        start_cells = self._draw_start_cells(world_rng)
        self.robots = []
        for i in range(cfg.n_robots):
            belief = None
            if has_belief:
                belief = BeliefMap(w, h, rho=cfg.rho, decay_form=cfg.decay_form,
                                   state=self._state_stack[i],
                                   pheromone=self._ph_stack[i],
                                   in_view=self._view_stack[i])
            self.robots.append(Robot(id=i, pos=start_cells[i],
                                     controller=cfg.controller, belief=belief))
        self._retention = self.robots[0].belief.retention if has_belief else None
        self.move_rngs = [substream(cfg.seed, _STREAM_MOVE, i) for i in range(cfg.n_robots)]
        self.comm_rngs = [substream(cfg.seed, _STREAM_COMM, i) for i in range(cfg.n_robots)]
        self.inboxes = [[] for _ in range(cfg.n_robots)]

    def _draw_start_cells(self, rng):
        """Random distinct starting cells outside the source region."""
        a = self.arena
        free = ~np.zeros((a.height, a.width), bool)
        free[a.source.y0:a.source.y1, a.source.x0:a.source.x1] = False
        candidates = np.flatnonzero(free.ravel())
        chosen = rng.choice(candidates, size=self.cfg.n_robots, replace=False)
        return [(int(f % a.width), int(f // a.width)) for f in chosen]

    def tick(self):
        cfg = self.cfg
        arena = self.arena
        radius = cfg.arena.sense_radius
        has_belief = cfg.controller is not Controller.CRW
        self.tick_index += 1

        # 1: pheromone decay on every belief map.
        if has_belief:
            self._ph_stack *= self._retention

        # 2: sensing -- view-entry inaccuracy accounting, then integration.
        if has_belief:
            for robot in self.robots:
                x, y = robot.pos
                x0, x1 = max(0, x - radius), min(arena.width, x + radius + 1)
                y0, y1 = max(0, y - radius), min(arena.height, y + radius + 1)
                occ = arena.occupancy[y0:y1, x0:x1]
                self.inaccuracies += robot.belief.observe_window(x0, y0, x1, y1, occ)

        # 3: communication -- consume last tick's inboxes, queue for next tick.
        if has_belief:
            next_inboxes = [[] for _ in self.robots]
            # Pairwise in-range matrix, computed once per tick; row i lists
            # who hears robot i (inclusive radius, never the sender itself).
            pos = np.array([r.pos for r in self.robots])
            diff = pos[:, None, :] - pos[None, :, :]
            within = (diff * diff).sum(-1) <= cfg.comm.r_k * cfg.comm.r_k
            np.fill_diagonal(within, False)
            for robot in self.robots:
                pkt = communicate_step(robot, self.inboxes[robot.id],
                                       self.comm_rngs[robot.id], cfg.comm,
                                       self.nest_dist)
                if pkt is None:
                    continue
                if self.trace is not None:
                    self.trace({"tick": self.tick_index, "robot": robot.id,
                                "event": "send", "x": pkt.x, "y": pkt.y,
                                "state": pkt.state_code, "pheromone_q": pkt.pheromone_q})
                for rid in np.flatnonzero(within[robot.id]):
                    next_inboxes[rid].append(pkt)
            self.inboxes = next_inboxes

        # 4: actions in id order (pickup races resolve to the lowest id).
        events = [] if self.trace is not None else None
        for robot in self.robots:
            step_robot(robot, arena, self.move_rngs[robot.id], events)
        if events:
            for ev in events:
                self.trace({"tick": self.tick_index, **ev})

        # 5: keep the source stocked.
        arena.respawn_blocks(self.world_rng)

        # 6: metric sampling.
        if self.tick_index % cfg.metrics_interval == 0:
            self.series.append(self.inaccuracies)

    def run(self):
        for _ in range(self.cfg.ticks):
            self.tick()
        return RunMetrics(blocks_collected=self.arena.collected_total,
                          inaccuracies=self.inaccuracies,
                          inaccuracy_series=list(self.series))


def run_simulation(cfg, trace=None):
    """Execute one full seeded run and return its metrics."""
    return Simulation(cfg, trace=trace).run()
