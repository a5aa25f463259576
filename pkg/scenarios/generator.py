"""
Geração determinística de cenários de benchmark.

Quadro 0 adiciona ``n_obstacles`` células distintas sorteadas no cubo
``[dmax_cells, dmax_cells + range_cells)^3`` (a região do cenário começa na
origem e tem folga de ``dmax_cells`` em volta do cubo). Cada quadro seguinte remove
``k = round(churn_fraction * n_obstacles)`` obstáculos atuais e adiciona
``k`` células novas (que não são obstáculo nem acabaram de ser removidas),
terminando com ``T`` (ou ``G``) e, opcionalmente, ``C``.

Com ``added_count`` as contagens se separam: cada quadro adiciona
``added_count`` células e remove ``round(removal_ratio * added_count)``
obstáculos, e a população cresce de quadro em quadro.

No modo agrupado as mudanças de cada quadro ficam perto de um ponto-semente
que passeia pelo cubo, imitando um objeto em movimento.

Mesma ``GeneratorSpec`` (semente incluída) gera byte a byte o mesmo cenário.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Set, Tuple

from mod_vdbedt.edt.cell import sqdist
from mod_vdbedt.exceptions import ConfigurationError
from mod_vdbedt.grid.region import Region
from mod_vdbedt.grid.sparse_grid import Coord
from mod_vdbedt.scenarios.prng import Xorshift64Star
from mod_vdbedt.scenarios.scenario_io import (
    Event,
    EventKind,
    ObstacleMap,
    Scenario,
    ScenarioHeader,
    validate_scenario,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GeneratorSpec:
    """Parâmetros de geração.

    Attributes:
        range_cells: Lado do cubo onde os obstáculos vivem.
        n_obstacles: Obstáculos no quadro 0 (e em todos os outros).
        churn_fraction: Fração trocada por quadro, em ``[0, 1]``.
        frames: Total de quadros, contando o inicial.
        seed: Semente do PRNG, gravada no cabeçalho.
        dmax_cells: Limiar de truncamento em células.
        resolution: Metros por célula.
        clustered: Concentra as mudanças de cada quadro numa bola.
        cluster_radius: Raio (células) da bola do modo agrupado.
        checks: Emite ``C`` depois de cada marcador de transformada.
        global_frames: Usa ``G`` em vez de ``T`` (recomputação completa).
        added_count: Adições por quadro; quando dado, ``churn_fraction`` deixa
            de valer e as remoções seguem ``removal_ratio``.
        removal_ratio: Remoções por adição, em ``[0, 1]``, usado com
            ``added_count``.
    """

    range_cells: int
    n_obstacles: int
    churn_fraction: float = 0.5
    frames: int = 5
    seed: int = 0
    dmax_cells: int = 4
    resolution: float = 0.2
    clustered: bool = False
    cluster_radius: int = 5
    checks: bool = False
    global_frames: bool = False
    added_count: Optional[int] = None
    removal_ratio: float = 1.0

    def __post_init__(self) -> None:
        _validate_generator_spec(self)

    @property
    def churn_count(self) -> int:
        """``round(churn_fraction * n_obstacles)`` com meio arredondado para cima."""
        scaled = Fraction(repr(self.churn_fraction)) * self.n_obstacles
        return math.floor(scaled + Fraction(1, 2))

    @property
    def frame_counts(self) -> Tuple[int, int]:
        """``(removidos, adicionados)`` em cada quadro depois do inicial."""
        if self.added_count is None:
            return self.churn_count, self.churn_count
        scaled = Fraction(repr(self.removal_ratio)) * self.added_count
        return math.floor(scaled + Fraction(1, 2)), self.added_count

    @property
    def cube_volume(self) -> int:
        return self.range_cells ** 3

    @property
    def region(self) -> Region:
        """Cubo com folga de ``dmax_cells`` em toda volta, a partir da origem.

        Manter a região num só octante evita alocar um nó de topo por octante.
        """
        side = self.range_cells + 2 * self.dmax_cells
        return Region((0, 0, 0), (side, side, side))

    @property
    def cube_origin(self) -> int:
        return self.dmax_cells

    def header(self) -> ScenarioHeader:
        return ScenarioHeader(self.resolution, self.dmax_cells, self.seed, self.region)


def _validate_generator_spec(spec: GeneratorSpec) -> None:
    if spec.range_cells < 1:
        raise ConfigurationError(f"range_cells must be >= 1. Received: {spec.range_cells}.")
    if spec.n_obstacles < 0:
        raise ConfigurationError(f"n_obstacles must be >= 0. Received: {spec.n_obstacles}.")
    if not 0.0 <= spec.churn_fraction <= 1.0:
        raise ConfigurationError(f"churn_fraction must be in [0, 1]. Received: {spec.churn_fraction}.")
    if spec.frames < 1:
        raise ConfigurationError(f"frames must be >= 1. Received: {spec.frames}.")
    if spec.dmax_cells < 1:
        raise ConfigurationError(f"dmax_cells must be >= 1. Received: {spec.dmax_cells}.")
    if spec.cluster_radius < 1:
        raise ConfigurationError(f"cluster_radius must be >= 1. Received: {spec.cluster_radius}.")
    if not math.isfinite(spec.resolution) or spec.resolution <= 0:
        raise ConfigurationError(f"resolution must be a finite value > 0. Received: {spec.resolution}.")
    if spec.added_count is not None and spec.added_count < 0:
        raise ConfigurationError(f"added_count must be >= 0. Received: {spec.added_count}.")
    if not 0.0 <= spec.removal_ratio <= 1.0:
        raise ConfigurationError(f"removal_ratio must be in [0, 1]. Received: {spec.removal_ratio}.")
    removes, adds = spec.frame_counts
    if removes > spec.n_obstacles:
        raise ConfigurationError(
            f"Cannot remove {removes} obstacles per frame from {spec.n_obstacles}."
        )
    # O último quadro precisa de ``adds`` células livres além da população anterior.
    needed = spec.n_obstacles + max(0, spec.frames - 2) * (adds - removes) + adds
    if needed > spec.cube_volume:
        raise ConfigurationError(
            f"Peak obstacles plus additions ({needed}) exceed the {spec.range_cells}^3 cube "
            f"({spec.cube_volume} cells)."
        )


class _CubeSampler:
    """Sorteia células distintas no cubo ``[0, side)^3``."""

    def __init__(self, rng: Xorshift64Star, side: int) -> None:
        self.rng = rng
        self.side = side

    def cell(self) -> Coord:
        below = self.rng.below
        return (below(self.side), below(self.side), below(self.side))

    def distinct(self, k: int, forbidden: Set[Coord]) -> List[Coord]:
        """``k`` células fora de ``forbidden``; usa rejeição ou enumeração conforme a ocupação."""
        volume = self.side ** 3
        free = volume - len(forbidden)
        if k > free:
            raise ConfigurationError(f"Cannot place {k} cells; only {free} free cells left.")
        if 2 * (len(forbidden) + k) <= volume:
            picked: List[Coord] = []
            taken = set(forbidden)
            while len(picked) < k:
                c = self.cell()
                if c not in taken:
                    taken.add(c)
                    picked.append(c)
            return picked
        side = self.side
        pool = [
            (x, y, z)
            for x in range(side)
            for y in range(side)
            for z in range(side)
            if (x, y, z) not in forbidden
        ]
        return self.rng.sample(pool, k)

    def ball(self, center: Coord, radius: int) -> List[Coord]:
        """Células do cubo com ``sqdist(c, center) <= radius^2``, em ordem lexicográfica."""
        lo = [max(0, v - radius) for v in center]
        hi = [min(self.side - 1, v + radius) for v in center]
        r_sq = radius * radius
        return [
            (x, y, z)
            for x in range(lo[0], hi[0] + 1)
            for y in range(lo[1], hi[1] + 1)
            for z in range(lo[2], hi[2] + 1)
            if sqdist((x, y, z), center) <= r_sq
        ]


def _step_seed(sampler: _CubeSampler, seed_point: Coord, radius: int) -> Coord:
    rng = sampler.rng
    top = sampler.side - 1
    return tuple(min(top, max(0, v + rng.randint(-radius, radius))) for v in seed_point)


def _uniform_churn(
    sampler: _CubeSampler, current: Set[Coord], removes: int, adds: int
) -> Tuple[List[Coord], List[Coord]]:
    removed = sampler.rng.sample(sorted(current), removes)
    added = sampler.distinct(adds, current)
    return removed, added


def _clustered_churn(
    sampler: _CubeSampler,
    current: Set[Coord],
    removes: int,
    adds: int,
    old_seed: Coord,
    new_seed: Coord,
    radius: int,
) -> Tuple[List[Coord], List[Coord]]:
    rng = sampler.rng
    r_sq = radius * radius
    near = sorted(c for c in current if sqdist(c, old_seed) <= r_sq)
    if len(near) >= removes:
        removed = rng.sample(near, removes)
    else:
        # Completa com os obstáculos mais próximos da semente antiga.
        far = sorted((c for c in current if sqdist(c, old_seed) > r_sq), key=lambda c: (sqdist(c, old_seed), c))
        removed = near + far[: removes - len(near)]
    blocked = current | set(removed)
    room = [c for c in sampler.ball(new_seed, radius) if c not in blocked]
    if len(room) >= adds:
        added = rng.sample(room, adds)
    else:
        added = room + sampler.distinct(adds - len(room), blocked | set(room))
    return removed, added


def generate_scenario(spec: GeneratorSpec) -> Scenario:
    """Gera o cenário descrito por ``spec``.

    Returns:
        Scenario: Cabeçalho com semente/região e a lista de eventos.

    Raises:
        ConfigurationError: Se ``spec`` for inconsistente.
    """
    rng = Xorshift64Star(spec.seed)
    sampler = _CubeSampler(rng, spec.range_cells)
    marker = Event(EventKind.GLOBAL_TRANSFORM if spec.global_frames else EventKind.TRANSFORM)
    check = Event(EventKind.CHECK)
    events: List[Event] = []
    base = spec.cube_origin

    def emit(kind: EventKind, cells: List[Coord]) -> None:
        # O sorteio trabalha em [0, range); o arquivo usa coordenadas da região.
        events.extend(Event(kind, (x + base, y + base, z + base)) for x, y, z in cells)

    initial = sampler.distinct(spec.n_obstacles, set())
    current: Set[Coord] = set(initial)
    emit(EventKind.ADD, initial)
    events.append(marker)
    if spec.checks:
        events.append(check)

    seed_point = sampler.cell()
    removes, adds = spec.frame_counts
    for _ in range(1, spec.frames):
        if spec.clustered:
            new_seed = _step_seed(sampler, seed_point, spec.cluster_radius)
            removed, added = _clustered_churn(
                sampler, current, removes, adds, seed_point, new_seed, spec.cluster_radius
            )
            seed_point = new_seed
        else:
            removed, added = _uniform_churn(sampler, current, removes, adds)
        current.difference_update(removed)
        current.update(added)
        emit(EventKind.REMOVE, removed)
        emit(EventKind.ADD, added)
        events.append(marker)
        if spec.checks:
            events.append(check)

    scenario = Scenario(spec.header(), tuple(events))
    validate_scenario(scenario)
    logger.debug(
        "generated %d events over %d frames (-%d/+%d per frame, clustered=%s)",
        len(events), spec.frames, removes, adds, spec.clustered,
    )
    return scenario


def wave_interaction_scenario() -> Scenario:
    """Um obstáculo que se desloca duas células em x entre dois quadros.

    No segundo quadro a onda de elevação do obstáculo removido e a de
    rebaixamento do novo se cruzam; é o caso mínimo em que roubar a frente
    de elevação economiza trabalho.
    """
    header = ScenarioHeader(0.2, 3, 0, Region((-4, -4, -4), (11, 9, 9)))
    add, rem = EventKind.ADD, EventKind.REMOVE
    events = (
        Event(add, (0, 0, 0)),
        Event(EventKind.TRANSFORM),
        Event(EventKind.CHECK),
        Event(rem, (0, 0, 0)),
        Event(add, (2, 0, 0)),
        Event(EventKind.TRANSFORM),
        Event(EventKind.CHECK),
    )
    return Scenario(header, events)


def corridor_map() -> ObstacleMap:
    """Corredor plano 32 x 9 com paredes em ``y = 0`` e ``y = 8`` e um ressalto em ``(15, 3, 0)``."""
    header = ScenarioHeader(0.2, 5, 0, Region((0, 0, 0), (32, 9, 1)))
    cells: List[Coord] = []
    for x in range(32):
        cells.append((x, 0, 0))
        if x == 15:
            cells.append((15, 3, 0))
        cells.append((x, 8, 0))
    return ObstacleMap(header, tuple(cells))


def moving_block_scenario(
    side: int = 1, steps: int = 4, stride: int = 1, dmax_cells: int = 3
) -> Scenario:
    """Bloco cúbico de ``side`` células que anda ``stride`` células em x por quadro."""
    if side < 1 or steps < 1 or stride < 1:
        raise ConfigurationError(
            f"side, steps and stride must be >= 1. Received: {side}, {steps}, {stride}."
        )

    def block(x0: int) -> Set[Coord]:
        return {(x0 + i, j, k) for i in range(side) for j in range(side) for k in range(side)}

    margin = dmax_cells + 1
    length = side + steps * stride
    region = Region((-margin, -margin, -margin), (length + 2 * margin, side + 2 * margin, side + 2 * margin))
    header = ScenarioHeader(0.2, dmax_cells, 0, region)
    events: List[Event] = [Event(EventKind.ADD, c) for c in sorted(block(0))]
    events.append(Event(EventKind.TRANSFORM))
    for step in range(1, steps + 1):
        old, new = block((step - 1) * stride), block(step * stride)
        events.extend(Event(EventKind.REMOVE, c) for c in sorted(old - new))
        events.extend(Event(EventKind.ADD, c) for c in sorted(new - old))
        events.append(Event(EventKind.TRANSFORM))
    return Scenario(header, tuple(events))
