"""
Transformada de distância truncada por força bruta.

Para cada célula da região, o mínimo de ``sqdist`` sobre todos os
obstáculos, truncado em ``dmax_sq``. Custo O(células × obstáculos), sem
nenhuma ideia de propagação: o oráculo tem de continuar burro e obviamente
correto. A única coisa compartilhada com o núcleo é ``sqdist``, e mesmo
ela é reconferida aqui por uma rederivação local.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, List, NamedTuple, Sequence

import numpy as np

from mod_vdbedt.edt.cell import sqdist
from mod_vdbedt.edt.field import EdtField
from mod_vdbedt.exceptions import ConfigurationError, InvariantViolationError, ResourceLimitError
from mod_vdbedt.grid.region import Region
from mod_vdbedt.grid.sparse_grid import Coord

logger = logging.getLogger(__name__)

MAX_ORACLE_CELLS: int = 1 << 24


@dataclass(frozen=True)
class DenseField:
    """Campo denso de distâncias quadráticas indexado por ``[x, y, z]`` relativo à origem."""

    region: Region
    values: np.ndarray
    obstacles: FrozenSet[Coord]
    dmax_sq: int

    @property
    def origin(self) -> Coord:
        return self.region.origin

    @property
    def dims(self):
        return self.region.dims

    def value_at(self, c: Sequence[int]) -> int:
        ox, oy, oz = self.region.origin
        return int(self.values[c[0] - ox, c[1] - oy, c[2] - oz])


class Mismatch(NamedTuple):
    coord: Coord
    expected: int
    actual: int


@dataclass
class CompareReport:
    """Resultado da comparação célula a célula.

    ``index_violations`` lista células com ``dist < dmax_sq`` cujo ``obst``
    não é um obstáculo atual ou não realiza ``dist``.
    """

    mismatches: List[Mismatch] = field(default_factory=list)
    index_violations: List[Coord] = field(default_factory=list)
    max_abs_error: int = 0
    cells_checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.mismatches and not self.index_violations

    @property
    def mismatch_count(self) -> int:
        return len(self.mismatches)

    def summary(self, limit: int = 10) -> str:
        if self.ok:
            return f"ok ({self.cells_checked} cells)"
        shown = ", ".join(
            f"{m.coord}: expected {m.expected}, got {m.actual}" for m in self.mismatches[:limit]
        )
        parts = [f"{len(self.mismatches)} mismatching cells (max abs error {self.max_abs_error})"]
        if shown:
            parts.append(shown)
        if self.index_violations:
            parts.append(
                f"{len(self.index_violations)} index violations: "
                + ", ".join(str(c) for c in self.index_violations[:limit])
            )
        return "; ".join(parts)


def _sqdist_inline(a: Sequence[int], b: Sequence[int]) -> int:
    return sum((int(p) - int(q)) ** 2 for p, q in zip(a, b))


def brute_force_edt(obstacles: Iterable[Sequence[int]], region: Region, dmax_sq: int) -> DenseField:
    """Calcula o campo truncado exaustivamente sobre ``region``.

    Args:
        obstacles: Obstáculos atuais (podem estar fora da região).
        region (Region): Caixa avaliada.
        dmax_sq (int): Limiar de truncamento.

    Returns:
        DenseField: Valores ``min(dmax_sq, min_o sqdist(c, o))``.

    Raises:
        ResourceLimitError: Se a região passar de ``MAX_ORACLE_CELLS`` células.
        InvariantViolationError: Se ``sqdist`` divergir da rederivação local.
    """
    if dmax_sq < 1:
        raise ConfigurationError(f"dmax_sq must be >= 1. Received: {dmax_sq}.")
    if region.volume > MAX_ORACLE_CELLS:
        raise ResourceLimitError(
            f"Oracle region has {region.volume} cells; the limit is {MAX_ORACLE_CELLS}."
        )
    obstacle_set = frozenset((int(o[0]), int(o[1]), int(o[2])) for o in obstacles)
    ox, oy, oz = region.origin
    dx, dy, dz = region.dims
    xs = np.arange(ox, ox + dx, dtype=np.int64).reshape(-1, 1, 1)
    ys = np.arange(oy, oy + dy, dtype=np.int64).reshape(1, -1, 1)
    zs = np.arange(oz, oz + dz, dtype=np.int64).reshape(1, 1, -1)
    values = np.full(region.dims, dmax_sq, dtype=np.int64)
    for o in sorted(obstacle_set):
        d = (xs - o[0]) ** 2 + (ys - o[1]) ** 2 + (zs - o[2]) ** 2
        expected = _sqdist_inline(region.origin, o)
        if int(d[0, 0, 0]) != expected or sqdist(region.origin, o) != expected:
            raise InvariantViolationError(f"sqdist disagrees with its re-derivation for obstacle {o}.")
        np.minimum(values, d, out=values)
    return DenseField(region=region, values=values, obstacles=obstacle_set, dmax_sq=dmax_sq)


def compare(field_: EdtField, dense: DenseField) -> CompareReport:
    """Compara um ``EdtField`` com o oráculo em todas as células da região.

    Raises:
        ConfigurationError: Se os limiares de truncamento diferirem.
    """
    if field_.dmax_sq != dense.dmax_sq:
        raise ConfigurationError(
            f"dmax_sq differs: field {field_.dmax_sq}, oracle {dense.dmax_sq}."
        )
    report = CompareReport()
    reader = field_.grid.accessor()
    dmax_sq = dense.dmax_sq
    obstacles = dense.obstacles
    ox, oy, oz = dense.region.origin
    values = dense.values
    for c in dense.region.cells():
        rec = reader.get(c)
        expected = int(values[c[0] - ox, c[1] - oy, c[2] - oz])
        report.cells_checked += 1
        if rec.dist != expected:
            report.mismatches.append(Mismatch(c, expected, rec.dist))
            report.max_abs_error = max(report.max_abs_error, abs(rec.dist - expected))
        if rec.dist < dmax_sq and (rec.obst not in obstacles or sqdist(c, rec.obst) != rec.dist):
            report.index_violations.append(c)
    if not report.ok:
        logger.info("oracle comparison failed: %s", report.summary(limit=5))
    return report


def compare_fields(expected: EdtField, actual: EdtField, region: Region) -> CompareReport:
    """Compara as distâncias de dois campos na região (equivalência entre modos)."""
    report = CompareReport()
    left = expected.grid.accessor()
    right = actual.grid.accessor()
    for c in region.cells():
        a = left.get(c).dist
        b = right.get(c).dist
        report.cells_checked += 1
        if a != b:
            report.mismatches.append(Mismatch(c, a, b))
            report.max_abs_error = max(report.max_abs_error, abs(a - b))
    return report


def field_distances(field_: EdtField, region: Region) -> np.ndarray:
    """Copia as distâncias de ``field_`` na região para um array denso."""
    accessor = field_.grid.accessor()
    ox, oy, oz = region.origin
    out = np.empty(region.dims, dtype=np.int64)
    for c in region.cells():
        out[c[0] - ox, c[1] - oy, c[2] - oz] = accessor.get(c).dist
    return out
