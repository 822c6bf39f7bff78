"""Arena construction, sensing, pickup/deposit, respawn, distances."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swarmforage.belief import CellState
from swarmforage.world import Arena, ArenaConfig, ConfigError, Rect, build_arena


def small_config(block_count=24, width=24, height=12, sense_radius=2):
    return ArenaConfig(width=width, height=height,
                       nest=Rect(0, 0, 2, height),
                       source=Rect(width - 4, 0, width, height),
                       block_count=block_count, sense_radius=sense_radius)


def rng(seed=0):
    return np.random.default_rng(seed)


class TestRect:
    def test_contains_half_open(self):
        r = Rect(2, 3, 5, 7)
        assert r.contains(2, 3)
        assert r.contains(4, 6)
        assert not r.contains(5, 3)
        assert not r.contains(2, 7)

    def test_center_of_single_cell(self):
        assert Rect(4, 4, 5, 5).center() == (4.0, 4.0)

    def test_center_of_even_span_is_fractional(self):
        assert Rect(0, 0, 2, 2).center() == (0.5, 0.5)

    def test_overlaps(self):
        assert Rect(0, 0, 4, 4).overlaps(Rect(3, 3, 6, 6))
        assert not Rect(0, 0, 4, 4).overlaps(Rect(4, 0, 8, 4))


class TestBuildArena:
    def test_blocks_all_inside_source(self):
        arena = build_arena(small_config(), rng())
        assert len(arena.blocks) == 24
        assert all(x >= 20 for x, _ in arena.blocks)

    def test_zero_blocks(self):
        arena = build_arena(small_config(block_count=0), rng())
        assert arena.blocks == set()

    def test_width_over_byte_limit_rejected(self):
        cfg = ArenaConfig(width=300, height=12, nest=Rect(0, 0, 2, 12),
                          source=Rect(296, 0, 300, 12), block_count=4)
        with pytest.raises(ConfigError):
            build_arena(cfg, rng())

    def test_overlapping_regions_rejected(self):
        cfg = ArenaConfig(width=24, height=12, nest=Rect(0, 0, 8, 12),
                          source=Rect(6, 0, 12, 12), block_count=4)
        with pytest.raises(ConfigError):
            cfg.validate()

    def test_block_count_over_capacity_rejected(self):
        with pytest.raises(ConfigError):
            small_config(block_count=4 * 12 + 1).validate()

    def test_collected_counter_starts_at_zero(self):
        assert build_arena(small_config(), rng()).collected_total == 0

    def test_placement_is_seed_deterministic(self):
        a = build_arena(small_config(), rng(7))
        b = build_arena(small_config(), rng(7))
        assert a.blocks == b.blocks


class TestSense:
    def test_full_neighborhood_on_empty_grid(self):
        arena = build_arena(small_config(block_count=0), rng())
        cells = arena.sense((2, 2), 1)
        assert len(cells) == 9
        assert all(content == CellState.EMPTY for _, content in cells)

    def test_corner_clipping(self):
        arena = build_arena(small_config(block_count=0), rng())
        assert len(arena.sense((0, 0), 1)) == 4

    def test_reports_adjacent_block(self):
        arena = build_arena(small_config(block_count=0), rng())
        arena.occupancy[5, 21] = True
        reported = dict(arena.sense((20, 5), 1))
        assert reported[(21, 5)] == CellState.HAS_BLOCK

    def test_row_major_order(self):
        arena = build_arena(small_config(block_count=0), rng())
        coords = [c for c, _ in arena.sense((5, 5), 1)]
        assert coords == sorted(coords, key=lambda c: (c[1], c[0]))

    def test_nest_cells_report_empty(self):
        arena = build_arena(small_config(block_count=0), rng())
        arena.occupancy[3, 1] = True  # inside the nest columns
        reported = dict(arena.sense((1, 3), 0))
        assert reported[(1, 3)] == CellState.EMPTY

    def test_sense_is_pure(self):
        arena = build_arena(small_config(), rng())
        assert arena.sense((21, 5), 2) == arena.sense((21, 5), 2)


class TestPickupDeposit:
    def test_pickup_present_block(self):
        arena = build_arena(small_config(), rng())
        coord = next(iter(arena.blocks))
        before = arena.block_count
        assert arena.pickup_block(coord)
        assert arena.block_count == before - 1

    def test_pickup_empty_cell_fails(self):
        arena = build_arena(small_config(block_count=0), rng())
        assert not arena.pickup_block((5, 5))
        assert arena.block_count == 0

    def test_second_pickup_of_same_cell_fails(self):
        arena = build_arena(small_config(), rng())
        coord = next(iter(arena.blocks))
        assert arena.pickup_block(coord)
        assert not arena.pickup_block(coord)

    def test_deposit_inside_nest(self):
        arena = build_arena(small_config(), rng())
        assert arena.deposit_at_nest((1, 4))
        assert arena.collected_total == 1

    def test_deposit_outside_nest_fails(self):
        arena = build_arena(small_config(), rng())
        assert not arena.deposit_at_nest((10, 4))
        assert arena.collected_total == 0

    def test_nest_capacity_unbounded(self):
        arena = build_arena(small_config(), rng())
        for _ in range(1000):
            assert arena.deposit_at_nest((0, 0))
        assert arena.collected_total == 1000


class TestRespawn:
    def test_noop_at_target_count(self):
        arena = build_arena(small_config(), rng())
        assert arena.respawn_blocks(rng(1)) == 0

    def test_refills_one_collected_block(self):
        arena = build_arena(small_config(), rng())
        arena.pickup_block(next(iter(arena.blocks)))
        assert arena.respawn_blocks(rng(1)) == 1
        assert arena.block_count == 24
        assert all(arena.source.contains(x, y) for x, y in arena.blocks)

    def test_spawn_limited_by_free_capacity(self):
        # Source fully saturated: 48 cells, target wants 24 but all free.
        cfg = small_config(block_count=48)
        arena = Arena(cfg)
        arena.target_block_count = 48
        for x, y in [(20, 0), (21, 0)]:
            arena.occupancy[y, x] = True
        spawned = arena.respawn_blocks(rng(1))
        assert spawned == 46
        assert arena.block_count == 48
        # A second call has nowhere left to spawn.
        arena.target_block_count = 60
        assert arena.respawn_blocks(rng(2)) == 0

    def test_never_two_blocks_per_cell(self):
        arena = build_arena(small_config(), rng())
        for step in range(50):
            arena.pickup_block(next(iter(arena.blocks)))
            arena.respawn_blocks(rng(step))
            assert arena.block_count == 24  # bool grid cannot double-stack


class TestDistance:
    def test_zero_at_nest_center(self):
        cfg = ArenaConfig(width=24, height=12, nest=Rect(4, 4, 5, 5),
                          source=Rect(20, 0, 24, 12), block_count=0)
        arena = build_arena(cfg, rng())
        assert arena.distance_to_nest((4, 4)) == 0.0

    def test_three_four_five_triangle(self):
        cfg = ArenaConfig(width=24, height=12, nest=Rect(4, 4, 5, 5),
                          source=Rect(20, 0, 24, 12), block_count=0)
        arena = build_arena(cfg, rng())
        assert arena.distance_to_nest((7, 8)) == pytest.approx(5.0)

    @given(x=st.integers(0, 23), y=st.integers(0, 11))
    @settings(max_examples=200, deadline=None)
    def test_matches_direct_formula(self, x, y):
        arena = build_arena(small_config(block_count=0), rng())
        cx, cy = arena.nest.center()
        expected = ((x - cx) ** 2 + (y - cy) ** 2) ** 0.5
        assert arena.distance_to_nest((x, y)) == pytest.approx(expected)

    def test_distance_grid_matches_pointwise(self):
        arena = build_arena(small_config(block_count=0), rng())
        grid = arena.nest_distance_grid()
        for x, y in [(0, 0), (5, 3), (23, 11)]:
            assert grid[y, x] == pytest.approx(arena.distance_to_nest((x, y)))


@given(seed=st.integers(0, 2**32 - 1), picks=st.integers(0, 24))
@settings(max_examples=50, deadline=None)
def test_block_conservation(seed, picks):
    """blocks_before - pickups + respawns = blocks_after, every step."""
    arena = build_arena(small_config(), rng(seed))
    r = rng(seed + 1)
    for _ in range(picks):
        before = arena.block_count
        removed = 1 if arena.pickup_block(next(iter(arena.blocks))) else 0
        spawned = arena.respawn_blocks(r)
        assert arena.block_count == before - removed + spawned
