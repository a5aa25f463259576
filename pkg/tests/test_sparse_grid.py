"""Testes da grade esparsa estilo VDB."""

from __future__ import annotations

import sys
import unittest
from pathlib import Path

# O pacote mod_vdbedt resolve a partir do diretório pai do repo
# (package-dir mapeia o pacote para a raiz do repo).
sys.path.insert(0, str(Path(__file__).resolve().parents[2]))

from mod_vdbedt.exceptions import ConfigurationError, DomainError, GridStateError
from mod_vdbedt.grid.sparse_grid import (
    COORD_MAX,
    COORD_MIN,
    NODE_HEADER_BYTES,
    RECORD_BYTES,
    ROOT_ENTRY_BYTES,
    SLOT_BYTES,
    SparseGrid,
    TreeConfig,
    dense_equivalent_bytes,
    pack_coord,
)
from mod_vdbedt.scenarios.prng import Xorshift64Star

BG = ("bg",)


def make_grid(log2_dims=(3, 4, 5), background=BG) -> SparseGrid:
    return SparseGrid.create(TreeConfig(log2_dims=log2_dims, background=background))


def random_coords(seed: int, count: int, span: int = 200):
    rng = Xorshift64Star(seed)
    return [
        (rng.randint(-span, span), rng.randint(-span, span), rng.randint(-span, span))
        for _ in range(count)
    ]


class TreeConfigTests(unittest.TestCase):
    def test_rejects_invalid_exponents(self) -> None:
        for dims in ((3,), (), (3, 0), (3, -1), (11, 10, 10)):
            with self.subTest(dims=dims):
                with self.assertRaises(ConfigurationError):
                    TreeConfig(log2_dims=dims)

    def test_accepts_default_and_two_level(self) -> None:
        self.assertEqual(TreeConfig().log2_dims, (3, 4, 5))
        self.assertEqual(TreeConfig(log2_dims=[2, 2]).log2_dims, (2, 2))


class CreateAndGetTests(unittest.TestCase):
    def test_empty_tree_reads_background(self) -> None:
        grid = make_grid()
        self.assertEqual(grid.get((17, -3, 1000)), BG)
        self.assertEqual(grid.stats().active_voxels, 0)
        self.assertEqual(grid.stats().leaf_count, 0)

    def test_read_your_write(self) -> None:
        grid = make_grid()
        grid.set((1, 2, 3), "r")
        self.assertEqual(grid.get((1, 2, 3)), "r")
        self.assertEqual(grid.get((1, 2, 4)), BG)

    def test_two_level_tree_allocation_counts(self) -> None:
        grid = make_grid((2, 2))
        grid.set((5, 5, 5), "r")
        stats = grid.stats()
        self.assertEqual(stats.node_count, (1, 1))
        self.assertEqual(stats.root_entries, 1)
        leaf = NODE_HEADER_BYTES + 64 * RECORD_BYTES + 64 // 8
        internal = NODE_HEADER_BYTES + 64 * SLOT_BYTES + 2 * (64 // 8)
        self.assertEqual(stats.estimated_bytes, ROOT_ENTRY_BYTES + leaf + internal)

    def test_domain_errors(self) -> None:
        grid = make_grid()
        for c in ((COORD_MAX + 1, 0, 0), (0, COORD_MIN - 1, 0)):
            with self.subTest(c=c):
                with self.assertRaises(DomainError):
                    grid.get(c)
                with self.assertRaises(DomainError):
                    grid.set(c, "r")

    def test_domain_corners_are_addressable(self) -> None:
        grid = make_grid()
        for c in ((COORD_MIN, COORD_MIN, COORD_MIN), (COORD_MAX, COORD_MAX, COORD_MAX)):
            grid.set(c, c)
        self.assertEqual(grid.get((COORD_MIN,) * 3), (COORD_MIN,) * 3)
        self.assertEqual(grid.get((COORD_MAX,) * 3), (COORD_MAX,) * 3)
        self.assertEqual(pack_coord((COORD_MIN, 0, COORD_MAX)), (0, 1 << 30, (1 << 31) - 1))

    def test_randomized_round_trip(self) -> None:
        grid = make_grid()
        expected = {}
        for i, c in enumerate(random_coords(7, 10_000)):
            grid.set(c, i)
            expected[c] = i
        reader = grid.accessor()
        for c, value in expected.items():
            self.assertEqual(reader.get(c), value)
        self.assertEqual(grid.stats().active_voxels, len(expected))
        grid.validate()


class AccessorCacheTests(unittest.TestCase):
    def test_leaf_cache_hit_on_second_get(self) -> None:
        grid = make_grid()
        grid.set((0, 0, 0), "a")
        grid.set((1, 1, 1), "b")
        accessor = grid.accessor()
        accessor.get((0, 0, 0))
        self.assertEqual(accessor.hits[0], 0)
        accessor.get((1, 1, 1))
        self.assertEqual(accessor.hits[0], 1)
        self.assertEqual(accessor.root_lookups, 1)

    def test_cache_transparency(self) -> None:
        coords = random_coords(11, 2000, span=40)
        grids = []
        for cache in (True, False):
            grid = make_grid()
            accessor = grid.accessor(cache=cache)
            for i, c in enumerate(coords):
                accessor.set(c, i % 17)
            grids.append(grid)
        cached, uncached = grids
        lookups = random_coords(12, 2000, span=45)
        fresh = cached.accessor()
        plain = uncached.accessor(cache=False)
        for c in lookups:
            self.assertEqual(fresh.get(c), plain.get(c))
        self.assertEqual(list(cached.iter_active()), list(uncached.iter_active()))


class SetBackgroundTests(unittest.TestCase):
    def test_second_background_wins_on_empty_grid(self) -> None:
        grid = make_grid()
        grid.set_background("x")
        grid.set_background("y")
        self.assertEqual(grid.get((9, 9, 9)), "y")

    def test_rejected_after_a_write(self) -> None:
        grid = make_grid()
        grid.set((0, 0, 0), "r")
        with self.assertRaises(GridStateError):
            grid.set_background("z")

    def test_setting_background_value_keeps_reading_background(self) -> None:
        grid = make_grid()
        grid.set((3, 3, 3), BG)
        self.assertEqual(grid.get((3, 3, 3)), BG)


class TileDensificationTests(unittest.TestCase):
    def test_write_inside_tile_preserves_neighbours(self) -> None:
        grid = make_grid((2, 2))
        self.assertEqual(grid.resolve_level((0, 0, 0)), 2)
        grid.set((0, 0, 0), "r")
        self.assertEqual(grid.resolve_level((0, 0, 0)), 0)
        # (4, 0, 0) cai em outro slot do mesmo nó de topo: continua tile.
        self.assertEqual(grid.resolve_level((4, 0, 0)), 1)
        self.assertEqual(grid.resolve_level((1, 0, 0)), 0)
        for c in ((1, 0, 0), (3, 3, 3), (4, 0, 0), (15, 15, 15)):
            self.assertEqual(grid.get(c), BG)
        grid.validate()


class StatsTests(unittest.TestCase):
    def test_voxels_in_one_leaf(self) -> None:
        grid = make_grid()
        for c in ((0, 0, 0), (7, 7, 7), (3, 1, 6)):
            grid.set(c, "r")
        self.assertEqual(grid.stats().leaf_count, 1)

    def test_voxels_in_distinct_leaves(self) -> None:
        grid = make_grid()
        coords = [(8 * k, 0, 0) for k in range(5)]
        for c in coords:
            grid.set(c, "r")
        self.assertEqual(grid.stats().leaf_count, 5)

    def test_memory_is_order_independent_and_monotone(self) -> None:
        coords = random_coords(3, 500, span=100)
        forward, backward = make_grid(), make_grid()
        previous = 0
        for c in coords:
            forward.set(c, "r")
            current = forward.stats().estimated_bytes
            self.assertGreaterEqual(current, previous)
            previous = current
        for c in reversed(coords):
            backward.set(c, "r")
        self.assertEqual(forward.stats(), backward.stats())

    def test_dense_equivalent_bytes(self) -> None:
        self.assertEqual(dense_equivalent_bytes((2, 3, 4)), 24 * RECORD_BYTES)


class IterActiveTests(unittest.TestCase):
    def test_empty_and_counts(self) -> None:
        grid = make_grid()
        self.assertEqual(list(grid.iter_active()), [])
        for c in ((0, 0, 0), (100, -5, 7), (-300, 2, 2)):
            grid.set(c, c)
        items = list(grid.iter_active())
        self.assertEqual(len(items), 3)
        self.assertEqual({c for c, _ in items}, {(0, 0, 0), (100, -5, 7), (-300, 2, 2)})
        for c, value in items:
            self.assertEqual(c, value)

    def test_order_is_deterministic(self) -> None:
        coords = random_coords(5, 300)
        orders = []
        for _ in range(2):
            grid = make_grid()
            for c in coords:
                grid.set(c, 1)
            orders.append([c for c, _ in grid.iter_active()])
        self.assertEqual(orders[0], orders[1])
        self.assertEqual(len(orders[0]), len(set(coords)))


if __name__ == "__main__":
    unittest.main()
