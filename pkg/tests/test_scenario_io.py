"""Testes do formato de cenário ``vdbedt/1`` e dos arquivos embutidos."""

from __future__ import annotations

import sys
import tempfile
import unittest
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[2]))

from mod_vdbedt.exceptions import ScenarioParseError, ScenarioValidationError
from mod_vdbedt.grid.region import Region
from mod_vdbedt.scenarios.generator import corridor_map, wave_interaction_scenario
from mod_vdbedt.scenarios.prng import Xorshift64Star
from mod_vdbedt.scenarios.scenario_io import (
    FORMAT_TAG,
    Event,
    EventKind,
    ObstacleMap,
    Scenario,
    ScenarioHeader,
    bundled_names,
    dumps_scenario,
    load_obstacle_map,
    load_scenario,
    loads_scenario,
    resolve_path,
    save_obstacle_map,
    save_scenario,
    scenario_from_obstacles,
)

HEADER = "vdbedt/1\nres 0.2\ndmax 3\nseed 0\nregion 0 0 0 4 4 4\n"


class ParseTests(unittest.TestCase):
    def test_minimal_scenario(self) -> None:
        scenario = loads_scenario(HEADER + "A 1 2 3\nT\nC\n")
        self.assertEqual(scenario.header.resolution, 0.2)
        self.assertEqual(scenario.header.dmax_cells, 3)
        self.assertEqual(scenario.header.dmax_sq, 9)
        self.assertEqual(scenario.header.region, Region((0, 0, 0), (4, 4, 4)))
        self.assertEqual(
            scenario.events,
            (Event(EventKind.ADD, (1, 2, 3)), Event(EventKind.TRANSFORM), Event(EventKind.CHECK)),
        )

    def test_comments_and_blank_lines_are_ignored(self) -> None:
        text = "# gerado à mão\n\nvdbedt/1\nres 0.2\n# meio\ndmax 3\nseed 0\nregion 0 0 0 4 4 4\n\n  A 0 0 0  \nT\n"
        scenario = loads_scenario(text)
        self.assertEqual(len(scenario.events), 2)

    def test_parse_errors_carry_line_numbers(self) -> None:
        cases = {
            "res 0.2\n": 1,
            HEADER + "A 1 2\n": 6,
            HEADER + "A 1 2 x\n": 6,
            HEADER + "T\nX 1 1 1\n": 7,
            HEADER + "T 1\n": 6,
            "vdbedt/1\nres 0.2\nA 0 0 0\n": 3,
            "vdbedt/1\nres 0.2\nres 0.3\n": 3,
            HEADER + "A 0 0 0\nseed 4\n": 7,
            "vdbedt/1\nres abc\n": 2,
            "vdbedt/1\nregion 0 0 0 0 1 1\n": 2,
        }
        for text, line in cases.items():
            with self.subTest(text=text):
                with self.assertRaises(ScenarioParseError) as ctx:
                    loads_scenario(text)
                self.assertEqual(ctx.exception.line, line)
                self.assertIn(f"line {line}", str(ctx.exception))

    def test_missing_tag_and_incomplete_header(self) -> None:
        with self.assertRaises(ScenarioParseError):
            loads_scenario("")
        with self.assertRaises(ScenarioParseError):
            loads_scenario("vdbedt/1\nres 0.2\ndmax 3\n")

    def test_coordinate_outside_region_is_rejected(self) -> None:
        with self.assertRaises(ScenarioValidationError):
            loads_scenario(HEADER + "A 4 0 0\nT\n")
        with self.assertRaises(ScenarioValidationError):
            loads_scenario(HEADER + "R -1 0 0\nT\n")

    def test_invalid_header_values(self) -> None:
        with self.assertRaises(ScenarioValidationError):
            loads_scenario("vdbedt/1\nres 0\ndmax 3\nseed 0\nregion 0 0 0 4 4 4\n")
        with self.assertRaises(ScenarioValidationError):
            loads_scenario("vdbedt/1\nres 0.2\ndmax 0\nseed 0\nregion 0 0 0 4 4 4\n")

    def test_event_kind_and_coordinate_must_agree(self) -> None:
        with self.assertRaises(ScenarioValidationError):
            Event(EventKind.TRANSFORM, (1, 2, 3))
        with self.assertRaises(ScenarioValidationError):
            Event(EventKind.ADD)


class RoundTripTests(unittest.TestCase):
    def test_canonical_form(self) -> None:
        scenario = loads_scenario("# x\n" + HEADER + "\nA 1 1 1\nT\n")
        self.assertEqual(dumps_scenario(scenario), HEADER + "A 1 1 1\nT\n")
        self.assertTrue(dumps_scenario(scenario).startswith(FORMAT_TAG + "\n"))

    def test_random_scenarios_survive_dump_and_load(self) -> None:
        rng = Xorshift64Star(2024)
        kinds = list(EventKind)
        for _ in range(1000):
            region = Region(
                tuple(rng.randint(-50, 50) for _ in range(3)),
                tuple(rng.randint(1, 12) for _ in range(3)),
            )
            header = ScenarioHeader(rng.randint(1, 40) / 20, rng.randint(1, 9), rng.randint(0, 1 << 40), region)
            events = []
            for _ in range(rng.randint(0, 30)):
                kind = kinds[rng.below(len(kinds))]
                coord = None
                if kind.has_coord:
                    coord = tuple(o + rng.below(d) for o, d in zip(region.origin, region.dims))
                events.append(Event(kind, coord))
            scenario = Scenario(header, tuple(events))
            self.assertEqual(loads_scenario(dumps_scenario(scenario)), scenario)

    def test_save_and_load_files(self) -> None:
        scenario = wave_interaction_scenario()
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "wave.vdbedt"
            save_scenario(scenario, path)
            self.assertEqual(load_scenario(path), scenario)
            self.assertEqual(load_scenario(str(path)), scenario)


class FrameTests(unittest.TestCase):
    def test_frames_split_on_markers(self) -> None:
        scenario = loads_scenario(HEADER + "A 0 0 0\nT\nC\nR 0 0 0\nG\nA 1 1 1\n")
        frames = scenario.frames()
        self.assertEqual(scenario.frame_count, 2)
        self.assertEqual(len(frames), 3)
        self.assertEqual([e.kind for e in frames[0]], [EventKind.ADD, EventKind.TRANSFORM])
        self.assertEqual([e.kind for e in frames[1]], [EventKind.CHECK, EventKind.REMOVE, EventKind.GLOBAL_TRANSFORM])
        self.assertEqual(frames[2], [Event(EventKind.ADD, (1, 1, 1))])

    def test_empty_scenario_has_no_frames(self) -> None:
        scenario = loads_scenario(HEADER)
        self.assertEqual(scenario.events, ())
        self.assertEqual(scenario.frames(), [])
        self.assertEqual(scenario.frame_count, 0)

    def test_scenario_from_obstacles(self) -> None:
        header = ScenarioHeader(0.2, 3, 0, Region((0, 0, 0), (4, 4, 4)))
        scenario = scenario_from_obstacles(header, [(0, 0, 0), (1, 1, 1)])
        self.assertEqual(scenario.frame_count, 1)
        self.assertEqual(scenario.events[-1].kind, EventKind.TRANSFORM)


class ObstacleMapTests(unittest.TestCase):
    def test_map_round_trip(self) -> None:
        obstacle_map = corridor_map()
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "corridor.vdbedt"
            save_obstacle_map(obstacle_map, path)
            loaded = load_obstacle_map(path)
        self.assertEqual(loaded, obstacle_map)
        self.assertEqual(len(loaded.obstacle_set), 65)

    def test_map_rejects_other_events(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "bad.vdbedt"
            path.write_text(HEADER + "A 0 0 0\nT\n", encoding="utf-8")
            with self.assertRaises(ScenarioValidationError):
                load_obstacle_map(path)

    def test_map_equality_uses_header(self) -> None:
        header = ScenarioHeader(0.2, 3, 0, Region((0, 0, 0), (4, 4, 4)))
        self.assertNotEqual(ObstacleMap(header, ((0, 0, 0),)), ObstacleMap(header, ((1, 0, 0),)))


class BundledDataTests(unittest.TestCase):
    def test_bundled_names(self) -> None:
        self.assertEqual(bundled_names(), ["corridor", "wave_interaction"])

    def test_bundled_files_match_builders(self) -> None:
        self.assertEqual(load_scenario("bundled:wave_interaction"), wave_interaction_scenario())
        self.assertEqual(load_obstacle_map("bundled:corridor"), corridor_map())

    def test_bundled_files_are_canonical(self) -> None:
        path = resolve_path("bundled:wave_interaction")
        self.assertEqual(path.read_text(encoding="utf-8"), dumps_scenario(wave_interaction_scenario()))

    def test_unknown_bundled_name(self) -> None:
        with self.assertRaises(ScenarioValidationError) as ctx:
            resolve_path("bundled:nope")
        self.assertIn("wave_interaction", str(ctx.exception))

    def test_plain_paths_pass_through(self) -> None:
        self.assertEqual(resolve_path("some/file.vdbedt"), Path("some/file.vdbedt"))


if __name__ == "__main__":
    unittest.main()
