"""
Busca de caminho com custo de comprimento + folga sobre o campo.

Custo de um caminho ``x_0 .. x_N``::

    (1 - alpha) * clr(x_0) + soma_i [alpha * |x_i - x_{i-1}| + (1 - alpha) * clr(x_i)]

com ``clr(c) = max(0, dmax - d(c))`` em unidades de célula (raízes dos
valores quadráticos guardados). Os pesos de aresta são não negativos, então
Dijkstra (``heapq``) devolve o ótimo exato do grafo de 26-vizinhança sobre as
células livres da região de busca. Empates são resolvidos pela ordem da
tupla ``(custo, célula, direção)``.

Com ``theta`` ligado, o estado vira ``(célula, direção de chegada)`` e um
passo só é aceito se o ângulo entre a direção de chegada e a de saída for
menor que ``theta``.
"""

from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from mod_vdbedt.edt.cell import NEIGHBOR_OFFSETS
from mod_vdbedt.edt.field import EdtField
from mod_vdbedt.exceptions import ConfigurationError, GridStateError, NoPathError
from mod_vdbedt.grid.region import Region
from mod_vdbedt.grid.sparse_grid import Coord

logger = logging.getLogger(__name__)

Direction = Optional[Coord]

DEFAULT_ALPHA = 0.5

_OFFSET_SET = frozenset(NEIGHBOR_OFFSETS)


@dataclass(frozen=True)
class PathQuery:
    """Consulta de caminho.

    Attributes:
        start: Célula de partida (livre).
        goal: Célula de chegada (livre).
        alpha: Peso do comprimento em ``[0, 1]``; ``1`` ignora a folga.
        theta: Ângulo máximo de curva em radianos, ou ``None`` (desligado).
        region: Caixa de busca; por padrão envolve início e fim com folga
            de ``dmax + 2`` células.
    """

    start: Coord
    goal: Coord
    alpha: float = DEFAULT_ALPHA
    theta: Optional[float] = None
    region: Optional[Region] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "start", tuple(int(v) for v in self.start))
        object.__setattr__(self, "goal", tuple(int(v) for v in self.goal))
        if not (math.isfinite(self.alpha) and 0.0 <= self.alpha <= 1.0):
            raise ConfigurationError(f"alpha must be in [0, 1]. Received: {self.alpha}.")
        if self.theta is not None and not (math.isfinite(self.theta) and 0.0 < self.theta <= math.pi):
            raise ConfigurationError(f"theta must be in (0, pi] radians. Received: {self.theta}.")


@dataclass(frozen=True)
class PlannedPath:
    """Caminho e seus custos.

    ``length_cost`` e ``clearance_cost`` são as somas sem peso;
    ``total_cost = alpha * length_cost + (1 - alpha) * clearance_cost``.
    """

    cells: Tuple[Coord, ...]
    distances: Tuple[int, ...]
    alpha: float
    length_cost: float
    clearance_cost: float
    total_cost: float

    @property
    def min_distance(self) -> float:
        """Menor distância (em células) até um obstáculo ao longo do caminho."""
        return math.sqrt(min(self.distances))

    def as_dict(self) -> Dict[str, object]:
        return {
            "cells": [list(c) for c in self.cells],
            "alpha": self.alpha,
            "length_cost": round(self.length_cost, 6),
            "clearance_cost": round(self.clearance_cost, 6),
            "total_cost": round(self.total_cost, 6),
            "min_distance": round(self.min_distance, 6),
        }


def clearance(field_: EdtField, c: Coord) -> float:
    """``max(0, dmax - d(c))`` em células."""
    return max(0.0, math.sqrt(field_.dmax_sq) - math.sqrt(field_.distance(c)))


def step_length(a: Coord, b: Coord) -> float:
    return math.sqrt(sum((p - q) ** 2 for p, q in zip(a, b)))


def turn_angle(incoming: Coord, outgoing: Coord) -> float:
    """Ângulo entre dois vetores de passo, em radianos."""
    dot = sum(p * q for p, q in zip(incoming, outgoing))
    norm = math.sqrt(sum(p * p for p in incoming) * sum(q * q for q in outgoing))
    return math.acos(max(-1.0, min(1.0, dot / norm)))


def path_cost(field_: EdtField, cells: Sequence[Sequence[int]], alpha: float) -> PlannedPath:
    """Avalia o custo de um caminho arbitrário.

    Raises:
        ConfigurationError: Caminho vazio, passo que não é 26-adjacente ou
            célula ocupada.
    """
    cells = tuple(tuple(int(v) for v in c) for c in cells)
    if not cells:
        raise ConfigurationError("A path needs at least one cell.")
    distances = tuple(field_.distance(c) for c in cells)
    for c, d in zip(cells, distances):
        if d == 0:
            raise ConfigurationError(f"Path crosses obstacle cell {c}.")
    length = 0.0
    for a, b in zip(cells, cells[1:]):
        delta = tuple(q - p for p, q in zip(a, b))
        if delta not in _OFFSET_SET:
            raise ConfigurationError(f"Cells {a} and {b} are not 26-adjacent.")
        length += step_length(a, b)
    clear = sum(clearance(field_, c) for c in cells)
    return PlannedPath(
        cells=cells,
        distances=distances,
        alpha=alpha,
        length_cost=length,
        clearance_cost=clear,
        total_cost=alpha * length + (1.0 - alpha) * clear,
    )


def _search_region(field_: EdtField, query: PathQuery) -> Region:
    if query.region is not None:
        return query.region
    return Region.around([query.start, query.goal], math.isqrt(field_.dmax_sq) + 2)


def _validate_endpoints(field_: EdtField, query: PathQuery, region: Region) -> None:
    for name, c in (("start", query.start), ("goal", query.goal)):
        if not region.contains(c):
            raise ConfigurationError(f"{name} {c} lies outside the search region.")
        if field_.distance(c) == 0:
            raise ConfigurationError(f"{name} {c} is an obstacle cell.")


def plan_path(field_: EdtField, query: PathQuery) -> PlannedPath:
    """Caminho de custo mínimo entre ``query.start`` e ``query.goal``.

    Args:
        field_ (EdtField): Campo quiescente.
        query (PathQuery): Consulta.

    Returns:
        PlannedPath: Caminho ótimo e custos.

    Raises:
        GridStateError: Se o campo tiver transformada pendente.
        ConfigurationError: Extremos fora da região ou ocupados.
        NoPathError: Se o objetivo não for alcançável.
    """
    if not field_.is_quiescent:
        raise GridStateError("Planning needs a quiescent field; run distance_transform() first.")
    region = _search_region(field_, query)
    _validate_endpoints(field_, query, region)
    alpha = query.alpha
    theta = query.theta
    reader = field_.grid.accessor()
    dmax = math.sqrt(field_.dmax_sq)
    clr_cache: Dict[Coord, float] = {}

    def clr(c: Coord) -> float:
        value = clr_cache.get(c)
        if value is None:
            value = max(0.0, dmax - math.sqrt(reader.get(c).dist))
            clr_cache[c] = value
        return value

    steps = [(offset, math.sqrt(sum(v * v for v in offset))) for offset in NEIGHBOR_OFFSETS]
    start_state: Tuple[Coord, Direction] = (query.start, None)
    best: Dict[Tuple[Coord, Direction], float] = {start_state: (1.0 - alpha) * clr(query.start)}
    parent: Dict[Tuple[Coord, Direction], Tuple[Coord, Direction]] = {}
    heap: List[Tuple[float, Coord, Tuple[int, ...]]] = [(best[start_state], query.start, ())]
    expanded = 0
    found: Optional[Tuple[Coord, Direction]] = None

    while heap:
        cost, cell, dir_key = heapq.heappop(heap)
        direction: Direction = dir_key or None
        state = (cell, direction)
        if cost > best.get(state, math.inf):
            continue
        expanded += 1
        if cell == query.goal:
            found = state
            break
        for offset, length in steps:
            if theta is not None and direction is not None and not turn_angle(direction, offset) < theta:
                continue
            nxt = (cell[0] + offset[0], cell[1] + offset[1], cell[2] + offset[2])
            if not region.contains(nxt) or reader.get(nxt).dist == 0:
                continue
            next_state = (nxt, offset if theta is not None else None)
            next_cost = cost + alpha * length + (1.0 - alpha) * clr(nxt)
            if next_cost < best.get(next_state, math.inf):
                best[next_state] = next_cost
                parent[next_state] = state
                heapq.heappush(heap, (next_cost, nxt, next_state[1] or ()))

    if found is None:
        raise NoPathError(f"No path from {query.start} to {query.goal} inside the search region.")
    cells: List[Coord] = [found[0]]
    state = found
    while state in parent:
        state = parent[state]
        cells.append(state[0])
    cells.reverse()
    logger.debug("plan_path expanded %d states for a %d-cell path", expanded, len(cells))
    return path_cost(field_, cells, alpha)
