"""Ground-truth arena: grid geometry, nest, block placement and respawn.

The arena is a flat, obstacle-less cell grid with a rectangular nest on
one side and a rectangular source region (where blocks live) on the
other. Coordinates are (x, y) cell indices; each dimension must fit in
one byte because the wire format encodes coordinates as single bytes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .belief import CellState

# One-byte packet coordinates cap the grid size.
MAX_DIM = 256


class ConfigError(ValueError):
    """Raised for invalid arena/simulation configuration."""


@dataclass(frozen=True)
class Rect:
    """Half-open cell rectangle [x0, x1) x [y0, y1)."""

    x0: int
    y0: int
    x1: int
    y1: int

    @property
    def width(self):
        return self.x1 - self.x0

    @property
    def height(self):
        return self.y1 - self.y0

    @property
    def area(self):
        return self.width * self.height

    def contains(self, x, y):
        return self.x0 <= x < self.x1 and self.y0 <= y < self.y1

    def center(self):
        """Center of the region as a (possibly fractional) cell point."""
        return ((self.x0 + self.x1 - 1) / 2.0, (self.y0 + self.y1 - 1) / 2.0)

    def overlaps(self, other):
        return not (self.x1 <= other.x0 or other.x1 <= self.x0
                    or self.y1 <= other.y0 or other.y1 <= self.y0)


@dataclass(frozen=True)
class ArenaConfig:
    width: int
    height: int
    nest: Rect
    source: Rect
    block_count: int
    sense_radius: int = 2

    def validate(self):
        if not (0 < self.width <= MAX_DIM and 0 < self.height <= MAX_DIM):
            raise ConfigError(
                f"arena dimensions {self.width}x{self.height} must be in 1..{MAX_DIM}")
        grid = Rect(0, 0, self.width, self.height)
        for name, r in (("nest", self.nest), ("source", self.source)):
            inside = (0 <= r.x0 < r.x1 <= self.width
                      and 0 <= r.y0 < r.y1 <= self.height)
            if not inside:
                raise ConfigError(f"{name} region {r} not inside {grid}")
        if self.nest.overlaps(self.source):
            raise ConfigError("nest and source regions must be disjoint")
        if self.block_count < 0 or self.block_count > self.source.area:
            raise ConfigError(
                f"block_count {self.block_count} exceeds source capacity {self.source.area}")
        if self.sense_radius < 0:
            raise ConfigError("sense_radius must be >= 0")


class Arena:
    """Mutable world state: block occupancy grid plus the collected counter."""

    def __init__(self, config):
        config.validate()
        self.config = config
        self.width = config.width
        self.height = config.height
        self.nest = config.nest
        self.source = config.source
        self.target_block_count = config.block_count
        self.occupancy = np.zeros((self.height, self.width), bool)
        self.collected_total = 0
        # Flat indices of all source cells, row-major (for placement draws).
        ys, xs = np.mgrid[self.source.y0:self.source.y1, self.source.x0:self.source.x1]
        self._source_flat = (ys * self.width + xs).ravel()

    @property
    def blocks(self):
        """Current block cells as a set of (x, y) tuples."""
        ys, xs = np.nonzero(self.occupancy)
        return {(int(x), int(y)) for x, y in zip(xs, ys)}

    @property
    def block_count(self):
        return int(self.occupancy.sum())

    def has_block(self, coord):
        x, y = coord
        return bool(self.occupancy[y, x])

    def sense(self, pos, radius):
        """All in-grid cells within Chebyshev distance ``radius`` of ``pos``.

        Returns [((x, y), content)] in row-major order, content being
        EMPTY or HAS_BLOCK. Nest cells always report EMPTY.
        """
        px, py = pos
        out = []
        for y in range(max(0, py - radius), min(self.height, py + radius + 1)):
            for x in range(max(0, px - radius), min(self.width, px + radius + 1)):
                occupied = self.occupancy[y, x] and not self.nest.contains(x, y)
                out.append(((x, y), CellState.HAS_BLOCK if occupied else CellState.EMPTY))
        return out

    def pickup_block(self, coord):
        """Remove the block at ``coord`` if present; False if there is none."""
        x, y = coord
        if not self.occupancy[y, x]:
            return False
        self.occupancy[y, x] = False
        return True

    def deposit_at_nest(self, pos):
        """Deposit a carried block; succeeds only inside the nest region."""
        x, y = pos
        if not self.nest.contains(x, y):
            return False
        self.collected_total += 1
        return True

    def respawn_blocks(self, rng):
        """Top the source region back up to the target block count.

        Spawns on uniformly chosen free source cells; returns the number
        spawned (limited by free capacity).
        """
        deficit = self.target_block_count - self.block_count
        if deficit <= 0:
            return 0
        free = self._source_flat[~self.occupancy.flat[self._source_flat]]
        n = min(deficit, free.size)
        if n == 0:
            return 0
        chosen = rng.choice(free, size=n, replace=False) if n < free.size else free
        self.occupancy.flat[chosen] = True
        return n

    def distance_to_nest(self, coord):
        """Euclidean distance from ``coord``'s cell center to the nest center."""
        cx, cy = self.nest.center()
        x, y = coord
        return float(np.hypot(x - cx, y - cy))

    def nest_distance_grid(self, floor=None):
        """Per-cell distance-to-nest-center grid; optionally floored."""
        cx, cy = self.nest.center()
        ys, xs = np.mgrid[0:self.height, 0:self.width]
        d = np.hypot(xs - cx, ys - cy)
        if floor is not None:
            d = np.maximum(d, floor)
        return d


def build_arena(config, rng):
    """Construct an arena with blocks placed uniformly in the source region."""
    arena = Arena(config)
    if config.block_count > 0:
        chosen = rng.choice(arena._source_flat, size=config.block_count, replace=False)
        arena.occupancy.flat[chosen] = True
    return arena
