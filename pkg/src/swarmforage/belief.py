"""Per-robot belief map: content state + pheromone layers over the arena grid.

Each robot privately tracks, for every cell, what it believes the cell
contains and a pheromone level encoding how recent/relevant that belief
is. Pheromone decays every tick and is re-deposited on block sightings;
incoming messages are accepted or rejected by comparing pheromone levels.
"""

from __future__ import annotations

from enum import IntEnum

import numpy as np

# Amount of pheromone deposited per block sighting per tick (m = 1).
DEPOSIT = 1.0


class CellState(IntEnum):
    """Tri-valued content belief; values double as the wire codes."""

    UNKNOWN = 0
    EMPTY = 1
    HAS_BLOCK = 2


# Plain-int aliases for hot loops (enum attribute access is slow on 3.10).
_UNKNOWN = int(CellState.UNKNOWN)
_HAS_BLOCK = int(CellState.HAS_BLOCK)


class BeliefMap:
    """Two-layer grid belief: ``state`` (CellState codes) and ``pheromone``.

    ``decay_form`` selects how the decay parameter ``rho`` is applied:

    * ``"rate"``    -- retention factor (1 - rho) per tick (default)
    * ``"literal"`` -- retention factor rho per tick

    ``tau_max`` is the steady-state ceiling DEPOSIT / (effective decay rate),
    used to clamp deposits and to scale the one-byte wire quantization.
    """

    def __init__(self, width, height, rho=0.001, decay_form="rate",
                 state=None, pheromone=None, in_view=None):
        if decay_form not in ("rate", "literal"):
            raise ValueError(f"unknown decay_form: {decay_form!r}")
        self.width = width
        self.height = height
        self.rho = rho
        self.decay_form = decay_form
        if decay_form == "rate":
            self.retention = 1.0 - rho
        else:
            self.retention = rho
        decay_rate = 1.0 - self.retention
        self.tau_max = DEPOSIT / decay_rate if decay_rate > 0 else np.inf
        # Arrays may be caller-provided views (the engine stacks all robots'
        # maps into shared arrays); shapes are (height, width), indexed [y, x].
        self.state = state if state is not None else np.zeros((height, width), np.uint8)
        self.pheromone = pheromone if pheromone is not None else np.zeros((height, width))
        self.in_view = in_view if in_view is not None else np.zeros((height, width), bool)

    # -- per-tick updates ---------------------------------------------------

    def decay_all(self):
        """Apply one tick of pheromone decay to every cell."""
        self.pheromone *= self.retention

    def integrate_observation(self, coord, actual):
        """Fold one sensed cell into the belief.

        A block sighting deposits pheromone (clamped to tau_max); a
        confirmed-empty cell has its pheromone reset to zero.
        """
        x, y = coord
        self.state[y, x] = actual
        if actual == CellState.HAS_BLOCK:
            self.pheromone[y, x] = min(self.pheromone[y, x] + DEPOSIT, self.tau_max)
        else:
            self.pheromone[y, x] = 0.0

    def detect_inaccuracy(self, coord, actual, newly_in_view):
        """Return 1 iff a committed belief is contradicted on view entry.

        Unknown cells never count: absence of information is not
        misinformation. Must be called before integrate_observation.
        """
        if not newly_in_view:
            return 0
        x, y = coord
        s = self.state[y, x]
        if s == CellState.UNKNOWN:
            return 0
        return 1 if s != actual else 0

    def observe_window(self, x0, y0, x1, y1, occupied):
        """Batch sense a rectangular window (half-open bounds).

        ``occupied`` is the ground-truth block mask for the window.
        Equivalent to detect_inaccuracy + integrate_observation per cell,
        plus maintenance of the view-entry flags. Returns the number of
        inaccuracies recorded.
        """
        sl = (slice(y0, y1), slice(x0, x1))
        state = self.state[sl]
        actual = np.add(occupied, 1, dtype=np.uint8)  # EMPTY=1 / HAS_BLOCK=2
        newly = ~self.in_view[sl]
        mismatch = newly & (state != _UNKNOWN) & (state != actual)
        count = int(np.count_nonzero(mismatch))
        state[...] = actual
        ph = self.pheromone[sl]
        ph[...] = np.where(occupied, np.minimum(ph + DEPOSIT, self.tau_max), 0.0)
        self.in_view[...] = False
        self.in_view[sl] = True
        return count

    # -- communication ------------------------------------------------------

    def integrate_message(self, coord, state, tau):
        """Accept or reject a communicated cell claim.

        Rejected iff the incoming pheromone is strictly lower than the
        local level for that cell (equality accepts). On accept the claim
        overwrites the local cell as if self-observed.
        """
        x, y = coord
        if tau < self.pheromone[y, x]:
            return False
        self.state[y, x] = state
        self.pheromone[y, x] = tau
        return True


def select_cell_utility(bmap, nest_dist):
    """Pick the believed-block cell maximizing 1/dist * tau.

    ``nest_dist`` is the per-cell Euclidean distance to the nest center,
    floored at 1 cell to avoid division by zero. Ties break row-major
    (lowest y, then lowest x). Returns (x, y) or None if no cell is
    believed to hold a block.
    """
    util = np.where(bmap.state == _HAS_BLOCK,
                    bmap.pheromone / nest_dist, -1.0)
    flat = int(np.argmax(util))
    if util.flat[flat] < 0.0:
        return None
    y, x = divmod(flat, bmap.width)
    return (x, y)


def select_cell_nearest(bmap, pos):
    """Closest believed-block cell to ``pos`` (navigation target).

    Euclidean distance to the robot; ties break row-major. Returns
    (x, y) or None. Using the robot's own position here keeps robots
    spread across different block cells instead of mobbing a single
    argmax of the communication utility.
    """
    ys, xs = np.nonzero(bmap.state == _HAS_BLOCK)
    if xs.size == 0:
        return None
    x, y = pos
    d2 = (xs - x) ** 2 + (ys - y) ** 2
    i = int(np.argmin(d2))
    return (int(xs[i]), int(ys[i]))


def select_cell_random(bmap, rng):
    """Uniform choice among all non-Unknown cells; None if all Unknown."""
    known = np.flatnonzero(bmap.state != _UNKNOWN)
    if known.size == 0:
        return None
    flat = int(known[rng.integers(known.size)])
    y, x = divmod(flat, bmap.width)
    return (x, y)
