"""Interface de linha de comando do vdbedt."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import replace
from typing import Any, NoReturn

from mod_vdbedt import __version__
from mod_vdbedt.bench.ablation import (
    DEFAULT_PRESET,
    PRESETS,
    AblationAxis,
    run_ablation,
    write_ablation_csv,
)
from mod_vdbedt.bench.runner import run_scenario, verify_scenario, write_frames_csv
from mod_vdbedt.edt.field import EdtField, ScheduleMode
from mod_vdbedt.exceptions import CalculationError, InputValidationError
from mod_vdbedt.planner.planner import DEFAULT_ALPHA, PathQuery, plan_path
from mod_vdbedt.scenarios.export import SliceFormat, export_slice
from mod_vdbedt.scenarios.generator import GeneratorSpec, generate_scenario
from mod_vdbedt.scenarios.scenario_io import load_obstacle_map, load_scenario, save_scenario

logger = logging.getLogger("mod_vdbedt.cli")

SCHEMA_VERSION = "1.0"
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MISMATCH = 2

DEFAULT_REPEATS = 3
DEFAULT_SEED = 0
DEFAULT_DMAX_CELLS = 4
DEFAULT_RANGE_CELLS = 32
DEFAULT_OBSTACLES = 100
DEFAULT_CHURN = 0.5
DEFAULT_FRAMES = 5


class _Parser(argparse.ArgumentParser):
    """``ArgumentParser`` que sai com o código de uso do projeto (1)."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def main(argv: list[str] | None = None) -> int:
    """Executa a interface de linha de comando do vdbedt."""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )

    if not hasattr(args, "handler"):
        parser.print_help()
        return EXIT_OK

    try:
        payload = args.handler(args)
    except (InputValidationError, CalculationError, OSError) as exc:
        print(f"vdbedt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if args.json:
        print(json.dumps(payload, sort_keys=True, ensure_ascii=False))
    else:
        print(_format_text(payload))
    result = payload["result"]
    if isinstance(result, dict) and result.get("ok") is False:
        return EXIT_MISMATCH
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="vdbedt",
        description="Incremental truncated Euclidean distance transform on a sparse VDB-style grid.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="Log at DEBUG level on stderr.")
    commands = parser.add_subparsers(dest="command", metavar="command")
    _add_transform_command(commands)
    _add_verify_command(commands)
    _add_ablate_command(commands)
    _add_slice_command(commands)
    _add_plan_command(commands)
    _add_generate_command(commands)
    return parser


def _add_transform_command(commands: argparse._SubParsersAction) -> None:
    parser = commands.add_parser("transform", help="Replay a scenario, timing every frame.")
    _add_output_arg(parser)
    _add_scenario_arg(parser)
    _add_mode_arg(parser)
    parser.add_argument("--out", default=None, help="Write the per-frame CSV here.")
    parser.add_argument(
        "--no-checks",
        dest="checks",
        action="store_false",
        help="Skip oracle comparisons at C events.",
    )
    parser.set_defaults(handler=_handle_transform)


def _add_verify_command(commands: argparse._SubParsersAction) -> None:
    parser = commands.add_parser(
        "verify", help="Run both schedules against the brute-force oracle and against each other."
    )
    _add_output_arg(parser)
    _add_scenario_arg(parser)
    parser.add_argument(
        "--every-frame",
        action="store_true",
        help="Check after every transform marker, not only at C events.",
    )
    parser.set_defaults(handler=_handle_verify)


def _add_ablate_command(commands: argparse._SubParsersAction) -> None:
    parser = commands.add_parser("ablate", help="Sweep one experiment axis and tabulate both schedules.")
    _add_output_arg(parser)
    parser.add_argument("axis", choices=[a.value for a in AblationAxis], help="Axis to sweep.")
    parser.add_argument("--preset", choices=sorted(PRESETS), default=DEFAULT_PRESET, help="Fixed values and sweeps.")
    parser.add_argument(
        "--values",
        type=_number_list,
        default=None,
        help="Comma-separated sweep values overriding the preset (e.g. 16,32,48).",
    )
    parser.add_argument("--repeats", type=int, default=DEFAULT_REPEATS, help="Repeats per sweep value.")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Base seed; repeats use seed, seed+1, ...")
    parser.add_argument("--dmax-cells", type=int, default=None, help="Override the preset's fixed threshold.")
    parser.add_argument("--range-cells", type=int, default=None, help="Override the preset's fixed range.")
    parser.add_argument("--out", default=None, help="Write the ablation CSV here.")
    parser.set_defaults(handler=_handle_ablate)


def _add_slice_command(commands: argparse._SubParsersAction) -> None:
    parser = commands.add_parser("slice", help="Replay a scenario and export one z slice.")
    _add_output_arg(parser)
    _add_scenario_arg(parser)
    _add_mode_arg(parser)
    parser.add_argument("--z", type=int, default=0, help="Slice plane.")
    _add_format_arg(parser)
    parser.add_argument("--out", required=True, help="Output file.")
    parser.set_defaults(handler=_handle_slice)


def _add_plan_command(commands: argparse._SubParsersAction) -> None:
    parser = commands.add_parser("plan", help="Plan a length + clearance path on an obstacle map.")
    _add_output_arg(parser)
    parser.add_argument("map", help="Obstacle-map file or bundled:<name>.")
    parser.add_argument("--start", type=int, nargs=3, required=True, metavar=("X", "Y", "Z"))
    parser.add_argument("--goal", type=int, nargs=3, required=True, metavar=("X", "Y", "Z"))
    parser.add_argument(
        "--alpha",
        type=float,
        default=DEFAULT_ALPHA,
        help="Length weight in [0, 1]; 1 ignores clearance.",
    )
    parser.add_argument(
        "--theta",
        type=float,
        default=None,
        help="Maximum turning angle in radians (disabled when omitted).",
    )
    parser.add_argument("--slice-out", default=None, help="Export the start cell's z slice with the path overlaid.")
    _add_format_arg(parser)
    parser.set_defaults(handler=_handle_plan)


def _add_generate_command(commands: argparse._SubParsersAction) -> None:
    parser = commands.add_parser("generate", help="Write a seeded random churn scenario.")
    _add_output_arg(parser)
    parser.add_argument("--range-cells", type=int, default=DEFAULT_RANGE_CELLS, help="Side of the obstacle cube.")
    parser.add_argument("--obstacles", type=int, default=DEFAULT_OBSTACLES, help="Obstacles per frame.")
    parser.add_argument("--churn", type=float, default=DEFAULT_CHURN, help="Fraction replaced per frame, in [0, 1].")
    parser.add_argument(
        "--added", type=int, default=None, help="Cells added per frame; replaces --churn with separate counts."
    )
    parser.add_argument(
        "--removal-ratio", type=float, default=1.0, help="Removals per addition, in [0, 1]; used with --added."
    )
    parser.add_argument("--frames", type=int, default=DEFAULT_FRAMES, help="Frames including the initial one.")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="PRNG seed.")
    parser.add_argument("--dmax-cells", type=int, default=DEFAULT_DMAX_CELLS, help="Truncation threshold in cells.")
    parser.add_argument("--resolution", type=float, default=0.2, help="Meters per cell (header only).")
    parser.add_argument("--clustered", action="store_true", help="Keep each frame's changes near a moving seed point.")
    parser.add_argument("--cluster-radius", type=int, default=5, help="Radius of the clustered changes, in cells.")
    parser.add_argument("--checks", action="store_true", help="Emit a C after every transform marker.")
    parser.add_argument("--global", dest="global_frames", action="store_true", help="Emit G instead of T.")
    parser.add_argument("--out", required=True, help="Scenario file to write.")
    parser.set_defaults(handler=_handle_generate)


def _add_output_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--json", action="store_true", help="Print a deterministic JSON payload.")


def _add_scenario_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("scenario", help="Scenario file or bundled:<name> (e.g. bundled:wave_interaction).")


def _add_mode_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--mode",
        choices=[m.value for m in ScheduleMode],
        default=ScheduleMode.OPTIMIZED.value,
        help="Wave scheduling mode.",
    )


def _add_format_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--format",
        dest="fmt",
        choices=[f.value for f in SliceFormat],
        default=SliceFormat.CSV.value,
        help="Slice export format.",
    )


def _number_list(text: str) -> list[float | int]:
    values: list[float | int] = []
    for token in text.split(","):
        token = token.strip()
        try:
            values.append(int(token))
        except ValueError:
            try:
                values.append(float(token))
            except ValueError:
                raise argparse.ArgumentTypeError(f"not a number: {token!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty value list")
    return values


def _payload(args: argparse.Namespace, result: dict[str, Any]) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": args.command,
        "inputs": _public_inputs(args),
        "result": result,
    }


def _handle_transform(args: argparse.Namespace) -> dict[str, Any]:
    scenario = load_scenario(args.scenario)
    result = run_scenario(scenario, args.mode, run_checks=args.checks)
    if args.out:
        write_frames_csv([result], args.out)
    body = result.as_dict()
    body["ok"] = result.ok
    return _payload(args, body)


def _handle_verify(args: argparse.Namespace) -> dict[str, Any]:
    scenario = load_scenario(args.scenario)
    report = verify_scenario(scenario, every_frame=args.every_frame)
    return _payload(args, report.as_dict())


def _handle_ablate(args: argparse.Namespace) -> dict[str, Any]:
    preset = PRESETS[args.preset]
    overrides: dict[str, int] = {}
    if args.dmax_cells is not None:
        overrides["fixed_threshold"] = args.dmax_cells
    if args.range_cells is not None:
        overrides["fixed_range"] = args.range_cells
    if overrides:
        preset = replace(preset, **overrides)
    rows = run_ablation(args.axis, preset, values=args.values, repeats=args.repeats, seed=args.seed)
    if args.out:
        write_ablation_csv(rows, args.out)
    return _payload(args, {"preset": preset.name, "rows": [row.as_dict() for row in rows]})


def _handle_slice(args: argparse.Namespace) -> dict[str, Any]:
    scenario = load_scenario(args.scenario)
    field_ = run_scenario(scenario, args.mode, run_checks=False).final_field
    distances = export_slice(field_, args.z, args.out, args.fmt, scenario.header.region)
    return _payload(
        args,
        {
            "path": str(args.out),
            "width": int(distances.shape[1]),
            "height": int(distances.shape[0]),
            "min": int(distances.min()),
            "max": int(distances.max()),
        },
    )


def _handle_plan(args: argparse.Namespace) -> dict[str, Any]:
    obstacle_map = load_obstacle_map(args.map)
    header = obstacle_map.header
    field_ = EdtField.initialize(header.dmax_sq)
    field_.global_transform(obstacle_map.obstacles)
    query = PathQuery(
        start=tuple(args.start),
        goal=tuple(args.goal),
        alpha=args.alpha,
        theta=args.theta,
        region=header.region,
    )
    path = plan_path(field_, query)
    if args.slice_out:
        export_slice(field_, query.start[2], args.slice_out, args.fmt, header.region, overlay=path.cells)
    return _payload(args, path.as_dict())


def _handle_generate(args: argparse.Namespace) -> dict[str, Any]:
    spec = GeneratorSpec(
        range_cells=args.range_cells,
        n_obstacles=args.obstacles,
        churn_fraction=args.churn,
        added_count=args.added,
        removal_ratio=args.removal_ratio,
        frames=args.frames,
        seed=args.seed,
        dmax_cells=args.dmax_cells,
        resolution=args.resolution,
        clustered=args.clustered,
        cluster_radius=args.cluster_radius,
        checks=args.checks,
        global_frames=args.global_frames,
    )
    scenario = generate_scenario(spec)
    save_scenario(scenario, args.out)
    return _payload(
        args,
        {"path": str(args.out), "events": len(scenario.events), "frames": scenario.frame_count},
    )


def _public_inputs(args: argparse.Namespace) -> dict[str, Any]:
    excluded = {"handler", "json", "command", "verbose"}
    aliases = {"fmt": "format", "global_frames": "global"}
    inputs: dict[str, Any] = {}
    for key, value in vars(args).items():
        if key in excluded or value is None:
            continue
        if isinstance(value, float) and not math.isfinite(value):
            value = str(value)
        inputs[aliases.get(key, key)] = value
    return inputs


def _format_text(payload: dict[str, Any]) -> str:
    result = payload["result"]
    command = payload["command"]
    if command == "transform":
        totals = result["totals"]
        status = "ok" if result["ok"] else f"{len(result['failed_checks'])} failed checks"
        details = ", ".join(f"{failure['frame']}: {failure['summary']}" for failure in result["failed_checks"])
        line = (
            f"transform ({result['mode']}): frames={result['frames']} changed={totals['changed']} "
            f"lowered={totals['lowered']} raised={totals['raised']} "
            f"neighbor_queries={totals['neighbor_queries']} wall_ms={result['total_wall_ms']} [{status}]"
        )
        return f"{line}\n{details}" if details else line
    if command == "verify":
        line = (
            f"verify: {'pass' if result['ok'] else 'FAIL'} checks={result['checks']} "
            f"neighbor_queries optimized={result['optimized_neighbor_queries']} "
            f"baseline={result['baseline_neighbor_queries']}"
        )
        lines = [line]
        for failure in result["failures"]:
            lines.append(
                f"frame {failure['frame']}: optimized {failure['optimized']}; "
                f"baseline {failure['baseline']}; modes {failure['modes']}"
            )
        return "\n".join(lines)
    if command == "ablate":
        lines = [f"ablate ({result['preset']}):"]
        for row in result["rows"]:
            lines.append("  " + ", ".join(f"{key}={val}" for key, val in row.items()))
        return "\n".join(lines)
    if command == "plan":
        cells = " ".join(f"({x},{y},{z})" for x, y, z in result["cells"])
        return (
            f"plan: total_cost={result['total_cost']} length_cost={result['length_cost']} "
            f"clearance_cost={result['clearance_cost']} min_distance={result['min_distance']}\n{cells}"
        )
    details = ", ".join(f"{key}={val}" for key, val in result.items())
    return f"{command}: {details}"


if __name__ == "__main__":
    raise SystemExit(main())
