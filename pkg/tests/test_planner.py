"""Testes do planejador de caminho com custo de comprimento + folga."""

from __future__ import annotations

import math
import sys
import unittest
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[2]))

from mod_vdbedt.edt.cell import NEIGHBOR_OFFSETS
from mod_vdbedt.edt.field import EdtField
from mod_vdbedt.exceptions import ConfigurationError, GridStateError, NoPathError
from mod_vdbedt.grid.region import Region
from mod_vdbedt.planner.planner import PathQuery, clearance, path_cost, plan_path, turn_angle
from mod_vdbedt.scenarios.generator import corridor_map

STRAIGHT, DIAGONAL, CORNER = 1.0, math.sqrt(2), math.sqrt(3)


def transformed(obstacles, dmax_sq: int = 9) -> EdtField:
    field_ = EdtField.initialize(dmax_sq)
    field_.set_obstacles(obstacles)
    field_.distance_transform()
    return field_


def corridor_field():
    obstacle_map = corridor_map()
    field_ = EdtField.initialize(obstacle_map.header.dmax_sq)
    field_.global_transform(obstacle_map.obstacles)
    return field_, obstacle_map.header.region


def exhaustive_best(field_, region, start, goal, alpha) -> float:
    """Menor custo sobre todos os caminhos simples (poda por custo parcial)."""
    free = {c for c in region.cells() if field_.distance(c) > 0}
    best = math.inf

    def visit(cell, visited, cost):
        nonlocal best
        if cost >= best:
            return
        if cell == goal:
            best = cost
            return
        for offset in NEIGHBOR_OFFSETS:
            nxt = (cell[0] + offset[0], cell[1] + offset[1], cell[2] + offset[2])
            if nxt in free and nxt not in visited:
                length = math.sqrt(sum(v * v for v in offset))
                visited.add(nxt)
                visit(nxt, visited, cost + alpha * length + (1.0 - alpha) * clearance(field_, nxt))
                visited.remove(nxt)

    visit(start, {start}, (1.0 - alpha) * clearance(field_, start))
    return best


def bounded_walk_best(field_, region, start, goal, alpha, theta=None) -> float:
    """Menor custo sobre todas as caminhadas de até ``limit`` passos, passo a passo.

    Com ``theta`` o estado inclui a direção de chegada e o limite cobre
    todos os pares (célula, direção).
    """
    free = {c for c in region.cells() if field_.distance(c) > 0}
    limit = len(free) * (len(NEIGHBOR_OFFSETS) if theta is not None else 1)
    frontier = {(start, None): (1.0 - alpha) * clearance(field_, start)}
    best = frontier[(start, None)] if start == goal else math.inf
    for _ in range(limit):
        reached = {}
        for (cell, direction), cost in frontier.items():
            for offset in NEIGHBOR_OFFSETS:
                if theta is not None and direction is not None and not turn_angle(direction, offset) < theta:
                    continue
                nxt = (cell[0] + offset[0], cell[1] + offset[1], cell[2] + offset[2])
                if nxt not in free:
                    continue
                step = cost + alpha * math.sqrt(sum(v * v for v in offset)) + (1.0 - alpha) * clearance(field_, nxt)
                if step >= best:
                    continue
                key = (nxt, offset if theta is not None else None)
                if step < reached.get(key, math.inf):
                    reached[key] = step
        for (cell, _), cost in reached.items():
            if cell == goal:
                best = min(best, cost)
        frontier = {state: cost for state, cost in reached.items() if cost < best}
        if not frontier:
            break
    return best


class PathQueryTests(unittest.TestCase):
    def test_parameter_ranges(self) -> None:
        for kwargs in (dict(alpha=-0.1), dict(alpha=1.5), dict(alpha=math.nan), dict(theta=0.0), dict(theta=4.0)):
            with self.subTest(kwargs=kwargs):
                with self.assertRaises(ConfigurationError):
                    PathQuery((0, 0, 0), (1, 0, 0), **kwargs)
        query = PathQuery([0, 0, 0], [1, 2, 3], alpha=0.0, theta=math.pi)
        self.assertEqual(query.goal, (1, 2, 3))


class PathCostTests(unittest.TestCase):
    def test_cost_terms(self) -> None:
        field_ = transformed([(0, 0, 0)], dmax_sq=4)
        path = path_cost(field_, [(1, 0, 0), (2, 1, 0)], 0.5)
        self.assertAlmostEqual(path.length_cost, DIAGONAL)
        # clr(1,0,0) = 2 - 1; clr(2,1,0) = 2 - 2 (truncado em dmax)
        self.assertAlmostEqual(path.clearance_cost, 1.0)
        self.assertAlmostEqual(path.total_cost, 0.5 * DIAGONAL + 0.5)
        self.assertEqual(path.distances, (1, 4))
        self.assertAlmostEqual(path.min_distance, 1.0)

    def test_invalid_paths(self) -> None:
        field_ = transformed([(0, 0, 0)])
        with self.assertRaises(ConfigurationError):
            path_cost(field_, [], 0.5)
        with self.assertRaises(ConfigurationError):
            path_cost(field_, [(1, 0, 0), (3, 0, 0)], 0.5)
        with self.assertRaises(ConfigurationError):
            path_cost(field_, [(1, 0, 0), (0, 0, 0)], 0.5)

    def test_turn_angle(self) -> None:
        self.assertAlmostEqual(turn_angle((1, 0, 0), (1, 0, 0)), 0.0)
        self.assertAlmostEqual(turn_angle((1, 0, 0), (1, 1, 0)), math.pi / 4)
        self.assertAlmostEqual(turn_angle((1, 0, 0), (-1, 0, 0)), math.pi)


class PlanPathTests(unittest.TestCase):
    def test_pure_length_is_grid_geodesic(self) -> None:
        field_ = transformed([])
        path = plan_path(field_, PathQuery((0, 0, 0), (5, 3, 1), alpha=1.0))
        self.assertAlmostEqual(path.total_cost, CORNER + 2 * DIAGONAL + 2 * STRAIGHT)
        self.assertEqual(path.cells[0], (0, 0, 0))
        self.assertEqual(path.cells[-1], (5, 3, 1))
        self.assertEqual(len(path.cells), 6)

    def test_start_equals_goal(self) -> None:
        field_ = transformed([(2, 0, 0)], dmax_sq=9)
        path = plan_path(field_, PathQuery((0, 0, 0), (0, 0, 0), alpha=0.25))
        self.assertEqual(path.cells, ((0, 0, 0),))
        self.assertAlmostEqual(path.length_cost, 0.0)
        self.assertAlmostEqual(path.total_cost, 0.75 * (3.0 - 2.0))

    def test_clearance_term_keeps_path_off_the_bump(self) -> None:
        field_, region = corridor_field()
        start, goal = (2, 4, 0), (29, 4, 0)
        shortest = plan_path(field_, PathQuery(start, goal, alpha=1.0, region=region))
        balanced = plan_path(field_, PathQuery(start, goal, alpha=0.5, region=region))
        self.assertAlmostEqual(shortest.length_cost, 27.0)
        self.assertAlmostEqual(shortest.min_distance, 1.0)
        self.assertGreater(balanced.min_distance, 1.0)
        self.assertGreaterEqual(balanced.length_cost, shortest.length_cost)
        self.assertLessEqual(balanced.total_cost, path_cost(field_, shortest.cells, 0.5).total_cost + 1e-9)

    def test_matches_exhaustive_search_on_small_maps(self) -> None:
        region = Region((0, 0, 0), (4, 3, 1))
        layouts = [
            [],
            [(1, 1, 0)],
            [(1, 0, 0), (1, 1, 0)],
            [(2, 1, 0), (1, 2, 0)],
            [(1, 1, 0), (2, 1, 0)],
        ]
        start, goal = (0, 0, 0), (3, 2, 0)
        for obstacles in layouts:
            field_ = transformed(obstacles, dmax_sq=4)
            for alpha in (0.0, 0.3, 0.7, 1.0):
                with self.subTest(obstacles=obstacles, alpha=alpha):
                    path = plan_path(field_, PathQuery(start, goal, alpha=alpha, region=region))
                    self.assertAlmostEqual(path.total_cost, exhaustive_best(field_, region, start, goal, alpha), places=9)
                    self.assertTrue(all(region.contains(c) for c in path.cells))

    def test_matches_walk_enumeration_on_volumetric_maps(self) -> None:
        cube = Region((0, 0, 0), (3, 3, 3))
        wall = [(x, y, 1) for x in range(3) for y in range(3) if (x, y) != (2, 0)]
        cases = [
            (cube, [(1, 1, 1)], (0, 0, 0), (2, 2, 2), (0.0, 0.4, 1.0)),
            (cube, wall, (0, 0, 0), (0, 0, 2), (0.0, 0.4, 1.0)),
        ]
        for region, obstacles, start, goal, alphas in cases:
            field_ = transformed(obstacles, dmax_sq=4)
            for alpha in alphas:
                with self.subTest(obstacles=len(obstacles), alpha=alpha):
                    path = plan_path(field_, PathQuery(start, goal, alpha=alpha, region=region))
                    expected = bounded_walk_best(field_, region, start, goal, alpha)
                    self.assertAlmostEqual(path.total_cost, expected, places=9)
        # O único furo da parede obriga a passar por (2, 0, 1).
        field_ = transformed(wall, dmax_sq=4)
        self.assertIn((2, 0, 1), plan_path(field_, PathQuery((0, 0, 0), (0, 0, 2), region=cube)).cells)

    def test_matches_walk_enumeration_on_largest_fixture(self) -> None:
        region = Region((0, 0, 0), (8, 8, 8))
        hole = {(6, 6), (6, 7), (7, 6), (7, 7)}
        wall = [(4, y, z) for y in range(8) for z in range(8) if (y, z) not in hole]
        field_ = transformed(wall, dmax_sq=4)
        for alpha in (0.5, 1.0):
            with self.subTest(alpha=alpha):
                path = plan_path(field_, PathQuery((0, 0, 0), (7, 0, 0), alpha=alpha, region=region))
                expected = bounded_walk_best(field_, region, (0, 0, 0), (7, 0, 0), alpha)
                self.assertAlmostEqual(path.total_cost, expected, places=9)
                self.assertIn(next(c for c in path.cells if c[0] == 4)[1:], hole)

    def test_unreachable_goal(self) -> None:
        field_ = transformed([(2, 0, 0)])
        with self.assertRaises(NoPathError):
            plan_path(field_, PathQuery((0, 0, 0), (4, 0, 0), region=Region((0, 0, 0), (5, 1, 1))))

    def test_invalid_endpoints(self) -> None:
        field_ = transformed([(0, 0, 0)])
        with self.assertRaises(ConfigurationError):
            plan_path(field_, PathQuery((0, 0, 0), (3, 0, 0)))
        with self.assertRaises(ConfigurationError):
            plan_path(field_, PathQuery((1, 0, 0), (9, 0, 0), region=Region((0, 0, 0), (5, 5, 1))))

    def test_pending_transform(self) -> None:
        field_ = EdtField.initialize(9)
        field_.set_obstacle((0, 0, 0))
        with self.assertRaises(GridStateError):
            plan_path(field_, PathQuery((2, 0, 0), (4, 0, 0)))


class TurnConstraintTests(unittest.TestCase):
    def test_every_turn_is_below_theta(self) -> None:
        field_, region = corridor_field()
        theta = math.pi / 4 + 1e-6
        free = plan_path(field_, PathQuery((2, 4, 0), (29, 4, 0), alpha=0.5, region=region))
        constrained = plan_path(field_, PathQuery((2, 4, 0), (29, 4, 0), alpha=0.5, theta=theta, region=region))
        steps = [tuple(q - p for p, q in zip(a, b)) for a, b in zip(constrained.cells, constrained.cells[1:])]
        for incoming, outgoing in zip(steps, steps[1:]):
            self.assertLess(turn_angle(incoming, outgoing), theta)
        self.assertGreaterEqual(constrained.total_cost, free.total_cost - 1e-9)

    def test_turn_bound_matches_walk_enumeration(self) -> None:
        region = Region((0, 0, 0), (3, 3, 2))
        field_ = transformed([(1, 1, 0)], dmax_sq=4)
        for theta in (math.pi / 4 + 1e-6, math.pi / 2 + 1e-6):
            for alpha in (0.5, 1.0):
                with self.subTest(theta=theta, alpha=alpha):
                    query = PathQuery((0, 0, 0), (2, 2, 1), alpha=alpha, theta=theta, region=region)
                    expected = bounded_walk_best(field_, region, (0, 0, 0), (2, 2, 1), alpha, theta)
                    self.assertAlmostEqual(plan_path(field_, query).total_cost, expected, places=9)

    def test_straight_only(self) -> None:
        field_ = transformed([])
        with self.assertRaises(NoPathError):
            plan_path(field_, PathQuery((0, 0, 0), (3, 1, 0), alpha=1.0, theta=0.1))
        path = plan_path(field_, PathQuery((0, 0, 0), (3, 3, 0), alpha=1.0, theta=0.1))
        self.assertEqual(path.cells, ((0, 0, 0), (1, 1, 0), (2, 2, 0), (3, 3, 0)))


if __name__ == "__main__":
    unittest.main()
