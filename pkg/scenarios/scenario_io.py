"""
Formato de cenário ``vdbedt/1``: texto por linhas, fácil de diffar.

Exemplo::

    vdbedt/1
    res 0.2
    dmax 4
    seed 7
    region -4 -4 -4 24 24 24
    A 3 5 1
    R 2 2 2
    T
    C

Cabeçalho: ``res <metros/célula>``, ``dmax <células>``, ``seed <int>``,
``region <ox oy oz dx dy dz>``, cada um exatamente uma vez e antes do
primeiro evento. Eventos: ``A x y z`` (adiciona obstáculo), ``R x y z``
(remove), ``T`` (transformada incremental), ``G`` (transformada global),
``C`` (confere contra o oráculo). Linhas vazias e iniciadas por ``#`` são
ignoradas na leitura; a escrita é canônica, então ``load(save(s)) == s``.

O mapa de obstáculos usa a mesma sintaxe, só com eventos ``A``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from mod_vdbedt.exceptions import (
    ConfigurationError,
    DomainError,
    ScenarioParseError,
    ScenarioValidationError,
)
from mod_vdbedt.grid.region import Region
from mod_vdbedt.grid.sparse_grid import Coord

FORMAT_TAG: str = "vdbedt/1"

PathLike = Union[str, Path]


class EventKind(enum.Enum):
    ADD = "A"
    REMOVE = "R"
    TRANSFORM = "T"
    GLOBAL_TRANSFORM = "G"
    CHECK = "C"

    @property
    def has_coord(self) -> bool:
        return self in (EventKind.ADD, EventKind.REMOVE)

    @property
    def ends_frame(self) -> bool:
        return self in (EventKind.TRANSFORM, EventKind.GLOBAL_TRANSFORM)


@dataclass(frozen=True)
class Event:
    kind: EventKind
    coord: Optional[Coord] = None

    def __post_init__(self) -> None:
        if self.kind.has_coord != (self.coord is not None):
            raise ScenarioValidationError(
                f"Event {self.kind.value} {'needs' if self.kind.has_coord else 'takes no'} coordinate."
            )
        if self.coord is not None:
            object.__setattr__(self, "coord", tuple(int(v) for v in self.coord))

    def to_line(self) -> str:
        if self.coord is None:
            return self.kind.value
        x, y, z = self.coord
        return f"{self.kind.value} {x} {y} {z}"


@dataclass(frozen=True)
class ScenarioHeader:
    resolution: float
    dmax_cells: int
    seed: int
    region: Region

    @property
    def dmax_sq(self) -> int:
        return self.dmax_cells * self.dmax_cells


@dataclass(frozen=True)
class Scenario:
    header: ScenarioHeader
    events: Tuple[Event, ...]

    def frames(self) -> List[List[Event]]:
        """Agrupa eventos em quadros; cada quadro termina num ``T`` ou ``G``.

        Eventos depois do último marcador formam um quadro final incompleto.
        """
        frames: List[List[Event]] = []
        current: List[Event] = []
        for event in self.events:
            current.append(event)
            if event.kind.ends_frame:
                frames.append(current)
                current = []
        if current:
            frames.append(current)
        return frames

    @property
    def frame_count(self) -> int:
        return sum(1 for e in self.events if e.kind.ends_frame)


@dataclass(frozen=True)
class ObstacleMap:
    header: ScenarioHeader
    obstacles: Tuple[Coord, ...]

    @property
    def obstacle_set(self) -> FrozenSet[Coord]:
        return frozenset(self.obstacles)


def validate_header(header: ScenarioHeader) -> None:
    """Raises:
        ScenarioValidationError: Resolução não positiva/finita ou ``dmax < 1``.
    """
    if not math.isfinite(header.resolution) or header.resolution <= 0:
        raise ScenarioValidationError(f"res must be a finite value > 0. Received: {header.resolution}.")
    if header.dmax_cells < 1:
        raise ScenarioValidationError(f"dmax must be >= 1 cell. Received: {header.dmax_cells}.")


def validate_scenario(scenario: Scenario) -> None:
    """Confere cabeçalho e que toda coordenada de evento está na região."""
    validate_header(scenario.header)
    region = scenario.header.region
    for index, event in enumerate(scenario.events):
        if event.coord is not None and not region.contains(event.coord):
            raise ScenarioValidationError(
                f"event {index} ({event.to_line()}) lies outside region "
                f"origin={region.origin} dims={region.dims}."
            )


def _header_lines(header: ScenarioHeader) -> List[str]:
    ox, oy, oz = header.region.origin
    dx, dy, dz = header.region.dims
    return [
        FORMAT_TAG,
        f"res {header.resolution!r}",
        f"dmax {header.dmax_cells}",
        f"seed {header.seed}",
        f"region {ox} {oy} {oz} {dx} {dy} {dz}",
    ]


def dumps_scenario(scenario: Scenario) -> str:
    validate_scenario(scenario)
    lines = _header_lines(scenario.header) + [event.to_line() for event in scenario.events]
    return "\n".join(lines) + "\n"


def save_scenario(scenario: Scenario, path: PathLike) -> None:
    Path(path).write_text(dumps_scenario(scenario), encoding="utf-8")


def _ints(tokens: Sequence[str], count: int, line_no: int, what: str) -> List[int]:
    if len(tokens) != count:
        raise ScenarioParseError(line_no, f"'{what}' expects {count} integers, got {len(tokens)}.")
    try:
        return [int(tok) for tok in tokens]
    except ValueError:
        raise ScenarioParseError(line_no, f"'{what}' expects integers, got {' '.join(tokens)!r}.") from None


def loads_scenario(text: str) -> Scenario:
    """Lê um cenário do texto.

    Raises:
        ScenarioParseError: Linha malformada (com o número da linha).
        ScenarioValidationError: Coordenada fora da região ou cabeçalho inválido.
    """
    header_values: dict = {}
    events: List[Event] = []
    saw_tag = False
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not saw_tag:
            if line != FORMAT_TAG:
                raise ScenarioParseError(line_no, f"expected format tag '{FORMAT_TAG}', got {line!r}.")
            saw_tag = True
            continue
        tokens = line.split()
        op = tokens[0]
        if op in ("res", "dmax", "seed", "region"):
            if events:
                raise ScenarioParseError(line_no, f"header key '{op}' after the first event.")
            if op in header_values:
                raise ScenarioParseError(line_no, f"duplicate header key '{op}'.")
            if op == "res":
                if len(tokens) != 2:
                    raise ScenarioParseError(line_no, "'res' expects one number.")
                try:
                    header_values[op] = float(tokens[1])
                except ValueError:
                    raise ScenarioParseError(line_no, f"'res' expects a number, got {tokens[1]!r}.") from None
            elif op == "region":
                values = _ints(tokens[1:], 6, line_no, op)
                try:
                    header_values[op] = Region(tuple(values[:3]), tuple(values[3:]))
                except (ConfigurationError, DomainError) as exc:
                    raise ScenarioParseError(line_no, str(exc)) from None
            else:
                header_values[op] = _ints(tokens[1:], 1, line_no, op)[0]
            continue
        try:
            kind = EventKind(op)
        except ValueError:
            raise ScenarioParseError(line_no, f"unknown op token {op!r}.") from None
        if kind.has_coord:
            coord = tuple(_ints(tokens[1:], 3, line_no, op))
        else:
            if len(tokens) != 1:
                raise ScenarioParseError(line_no, f"'{op}' takes no arguments.")
            coord = None
        if not header_values.keys() >= {"res", "dmax", "seed", "region"}:
            missing = sorted({"res", "dmax", "seed", "region"} - header_values.keys())
            raise ScenarioParseError(line_no, f"event before complete header (missing {', '.join(missing)}).")
        region = header_values["region"]
        if coord is not None and not region.contains(coord):
            raise ScenarioValidationError(
                f"line {line_no}: {line!r} lies outside region origin={region.origin} dims={region.dims}."
            )
        events.append(Event(kind, coord))
    if not saw_tag:
        raise ScenarioParseError(1, f"missing format tag '{FORMAT_TAG}'.")
    missing = sorted({"res", "dmax", "seed", "region"} - header_values.keys())
    if missing:
        raise ScenarioParseError(line_no if text else 1, f"incomplete header (missing {', '.join(missing)}).")
    header = ScenarioHeader(
        resolution=header_values["res"],
        dmax_cells=header_values["dmax"],
        seed=header_values["seed"],
        region=header_values["region"],
    )
    scenario = Scenario(header, tuple(events))
    validate_scenario(scenario)
    return scenario


def load_scenario(path: PathLike) -> Scenario:
    return loads_scenario(resolve_path(path).read_text(encoding="utf-8"))


def save_obstacle_map(obstacle_map: ObstacleMap, path: PathLike) -> None:
    events = tuple(Event(EventKind.ADD, c) for c in obstacle_map.obstacles)
    save_scenario(Scenario(obstacle_map.header, events), path)


def load_obstacle_map(path: PathLike) -> ObstacleMap:
    """Lê um mapa de obstáculos (cenário só com ``A``).

    Raises:
        ScenarioValidationError: Se houver qualquer evento que não seja ``A``.
    """
    scenario = load_scenario(path)
    for event in scenario.events:
        if event.kind is not EventKind.ADD:
            raise ScenarioValidationError(
                f"obstacle maps hold only 'A' events; found {event.to_line()!r}."
            )
    return ObstacleMap(scenario.header, tuple(e.coord for e in scenario.events))


def scenario_from_obstacles(header: ScenarioHeader, obstacles: Iterable[Coord]) -> Scenario:
    """Cenário de um quadro: adiciona todos os obstáculos e transforma."""
    events = [Event(EventKind.ADD, c) for c in obstacles]
    events.append(Event(EventKind.TRANSFORM))
    return Scenario(header, tuple(events))


BUNDLED_PREFIX = "bundled:"
DATA_DIR = Path(__file__).resolve().parent / "data"


def bundled_names() -> List[str]:
    return sorted(p.stem for p in DATA_DIR.glob("*.vdbedt"))


def resolve_path(name: PathLike) -> Path:
    """Aceita um caminho ou ``bundled:<nome>`` para os arquivos que vêm com o pacote.

    Raises:
        ScenarioValidationError: Nome embutido desconhecido.
    """
    text = str(name)
    if not text.startswith(BUNDLED_PREFIX):
        return Path(text)
    stem = text[len(BUNDLED_PREFIX):]
    path = DATA_DIR / f"{stem}.vdbedt"
    if not path.is_file():
        raise ScenarioValidationError(
            f"Unknown bundled scenario {stem!r}; available: {', '.join(bundled_names())}."
        )
    return path
