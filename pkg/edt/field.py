"""
Campo de distância incremental sobre a grade VDB.

``EdtField`` mantém a grade de ``CellRecord``, a fila de ondas e os
contadores. O ciclo de uso é: registrar mudanças com :meth:`set_obstacle` /
:meth:`remove_obstacle` e depois drenar a fila com
:meth:`distance_transform`. Entre as duas etapas o campo fica
desatualizado (uma célula recém-liberada já lê ``dmax_sq``, as vizinhas
ainda não).

Dois modos de agendamento:

``OPTIMIZED``
    O status de elevação guarda o raio da onda (``raise = dist``) e uma onda
    de rebaixamento pode "roubar" uma frente de elevação quando chega com
    distância menor ou igual ao raio dela, convertendo-a na hora em frente
    de rebaixamento.

``BASELINE``
    Agendamento convencional: o status é só uma flag (``raise = 0``) e
    frentes de elevação nunca são interrompidas por rebaixamento.

Os dois modos produzem o mesmo campo de distâncias; diferem só nos
contadores.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, fields
from typing import Dict, Iterable, NamedTuple, Optional, Sequence, Set, Union

from mod_vdbedt.edt.cell import (
    EMPTY,
    NOT_RAISE,
    CellRecord,
    adj26,
    background_record,
)
from mod_vdbedt.exceptions import ConfigurationError, InvariantViolationError
from mod_vdbedt.grid.sparse_grid import (
    DEFAULT_LOG2_DIMS,
    Coord,
    GridStats,
    SparseGrid,
    TreeConfig,
)
from mod_vdbedt.queues.wave_queue import WaveQueue
from mod_vdbedt.utils import meters_to_cells

logger = logging.getLogger(__name__)


class ScheduleMode(enum.Enum):
    OPTIMIZED = "optimized"
    BASELINE = "baseline"


@dataclass
class TransformMetrics:
    """Contadores por quadro, no espírito das colunas Changed/Lowered/Raised.

    ``stale_pops`` conta entradas descartadas porque a célula já tinha sido
    processada (``pops == lowered + raised + stale_pops``).
    """

    changed: int = 0
    lowered: int = 0
    raised: int = 0
    neighbor_queries: int = 0
    pops: int = 0
    stale_pops: int = 0

    def copy(self) -> "TransformMetrics":
        return TransformMetrics(**self.as_dict())

    def as_dict(self) -> Dict[str, int]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def __add__(self, other: "TransformMetrics") -> "TransformMetrics":
        return TransformMetrics(**{k: v + getattr(other, k) for k, v in self.as_dict().items()})

    def __sub__(self, other: "TransformMetrics") -> "TransformMetrics":
        return TransformMetrics(**{k: v - getattr(other, k) for k, v in self.as_dict().items()})

    @property
    def processed_cells(self) -> int:
        return self.lowered + self.raised

    @property
    def work(self) -> int:
        """Custo de agendamento comparável entre modos: chamadas + leituras de vizinhos."""
        return self.lowered + self.raised + self.neighbor_queries


class DistanceQuery(NamedTuple):
    value: int
    stale: bool


def meters_to_dmax_sq(d_max_m: float, resolution: float) -> int:
    """Converte um limiar em metros para distância quadrática em células.

    ``dmax_cells = ceil(d_max_m / resolution)`` e ``dmax_sq = dmax_cells²``.
    """
    cells = meters_to_cells(d_max_m, resolution)
    return cells * cells


def _as_coord(c: Sequence[int]) -> Coord:
    x, y, z = c
    return int(x), int(y), int(z)


def _validate_dmax_sq(dmax_sq: int) -> None:
    if isinstance(dmax_sq, bool) or not isinstance(dmax_sq, int) or dmax_sq < 1:
        raise ConfigurationError(f"dmax_sq must be an integer >= 1. Received: {dmax_sq!r}.")


class EdtField:
    """Campo de distância truncado e incremental.

    Use :meth:`initialize` para criar. Mutação e transformada são de
    contexto único; um campo quiescente (fila vazia) pode ser lido em
    paralelo com accessors independentes (``field.grid.accessor()``).

    Attributes:
        grid: Grade VDB de ``CellRecord``.
        queue: Fila de ondas.
        dmax_sq: Limiar de truncamento (distância quadrática em células).
        mode: Modo de agendamento.
        metrics: Contadores acumulados desde a criação.
    """

    def __init__(
        self,
        dmax_sq: int,
        tree_config: Union[TreeConfig, Sequence[int], None] = None,
        mode: ScheduleMode = ScheduleMode.OPTIMIZED,
        debug_checks: bool = False,
    ) -> None:
        _validate_dmax_sq(dmax_sq)
        mode = ScheduleMode(mode)
        if tree_config is None:
            log2_dims = DEFAULT_LOG2_DIMS
        elif isinstance(tree_config, TreeConfig):
            log2_dims = tree_config.log2_dims
        else:
            log2_dims = tuple(tree_config)
        self.dmax_sq = dmax_sq
        self.mode = mode
        self.debug_checks = debug_checks
        self.background = background_record(dmax_sq)
        self.grid = SparseGrid.create(TreeConfig(log2_dims=log2_dims))
        self.grid.set_background(self.background)
        self.queue = WaveQueue(dmax_sq)
        self.metrics = TransformMetrics()
        self._acc = self.grid.accessor()
        # Accessor próprio para validar obstáculos indexados, fora do cache da frente.
        self._obst_acc = self.grid.accessor()

    @classmethod
    def initialize(
        cls,
        dmax_sq: int,
        tree_config: Union[TreeConfig, Sequence[int], None] = None,
        mode: ScheduleMode = ScheduleMode.OPTIMIZED,
        debug_checks: bool = False,
    ) -> "EdtField":
        """Cria um campo vazio: tudo no background ``(EMPTY, dmax_sq, NOT_RAISE, NotQueued)``.

        Args:
            dmax_sq (int): Limiar de truncamento, ``>= 1``.
            tree_config: ``TreeConfig`` ou expoentes folha-primeiro; o
                background dele é substituído pelo registro do Initialize.
            mode (ScheduleMode): ``OPTIMIZED`` ou ``BASELINE``.
            debug_checks (bool): Confere quiescência ao fim de cada transformada.

        Raises:
            ConfigurationError: Se ``dmax_sq`` for menor que 1 ou a
                configuração da árvore for inválida.
        """
        return cls(dmax_sq, tree_config, mode, debug_checks)

    # -- consultas -------------------------------------------------------

    @property
    def is_quiescent(self) -> bool:
        return self.queue.is_empty()

    def record(self, c: Sequence[int]) -> CellRecord:
        return self._acc.get(_as_coord(c))

    def is_obstacle(self, c: Optional[Sequence[int]]) -> bool:
        """``c`` é obstáculo sse o registro dele tem ``dist == 0`` e ``obst == c``."""
        if c is None:
            return False
        return self._is_live(_as_coord(c))

    def _is_live(self, o: Optional[Coord]) -> bool:
        if o is None:
            return False
        rec = self._obst_acc.get(o)
        return rec.dist == 0 and rec.obst == o

    def query_distance(self, c: Sequence[int]) -> DistanceQuery:
        """Distância quadrática truncada em ``c``.

        Consultar no meio de uma transformada devolve o valor atual marcado
        como ``stale``.
        """
        stale = not self.queue.is_empty()
        if stale:
            logger.warning("query_distance(%s) on a field with %d queued entries", c, len(self.queue))
        return DistanceQuery(self._acc.get(_as_coord(c)).dist, stale)

    def distance(self, c: Sequence[int]) -> int:
        return self._acc.get(_as_coord(c)).dist

    def obstacles(self) -> Set[Coord]:
        """Conjunto dos obstáculos atuais, lido dos voxels ativos."""
        return {c for c, rec in self.grid.iter_active() if rec.dist == 0 and rec.obst == c}

    def stats(self) -> GridStats:
        return self.grid.stats()

    # -- mudanças no mapa ------------------------------------------------

    def set_obstacle(self, s: Sequence[int]) -> bool:
        """Marca ``s`` como obstáculo e agenda a onda de rebaixamento.

        Returns:
            bool: ``False`` se ``s`` já é obstáculo ou está na fila.

        Raises:
            DomainError: Se ``s`` estiver fora do domínio.
        """
        s = _as_coord(s)
        rec = self._acc.get(s)
        if (rec.dist == 0 and rec.obst == s) or rec.queued:
            return False
        self._acc.set(s, CellRecord(s, 0, NOT_RAISE, True))
        self.queue.push(0, s)
        self.metrics.changed += 1
        return True

    def remove_obstacle(self, s: Sequence[int]) -> bool:
        """Libera o obstáculo ``s`` e agenda a onda de elevação.

        Returns:
            bool: ``False`` se ``s`` não é obstáculo ou está na fila.

        Raises:
            DomainError: Se ``s`` estiver fora do domínio.
        """
        s = _as_coord(s)
        rec = self._acc.get(s)
        if not (rec.dist == 0 and rec.obst == s) or rec.queued:
            return False
        self._acc.set(s, CellRecord(EMPTY, self.dmax_sq, 0, True))
        self.queue.push(0, s)
        self.metrics.changed += 1
        return True

    def set_obstacles(self, coords: Iterable[Sequence[int]]) -> int:
        return sum(1 for c in coords if self.set_obstacle(c))

    def remove_obstacles(self, coords: Iterable[Sequence[int]]) -> int:
        return sum(1 for c in coords if self.remove_obstacle(c))

    # -- transformada ----------------------------------------------------

    def distance_transform(self) -> TransformMetrics:
        """Drena a fila aplicando Raise/Lower até o campo ficar completo.

        Returns:
            TransformMetrics: Delta dos contadores nesta chamada.
        """
        before = self.metrics.copy()
        queue = self.queue
        acc = self._acc
        metrics = self.metrics
        while queue:
            entry = queue.pop()
            metrics.pops += 1
            s = entry.coord
            rec = acc.get(s)
            if not rec.queued:
                metrics.stale_pops += 1
                continue
            if rec.raise_status >= 0:
                metrics.raised += 1
                self._raise(s, rec)
            else:
                metrics.lowered += 1
                self._lower(s, rec)
        if self.debug_checks:
            self.check_quiescent()
        delta = self.metrics - before
        logger.debug("distance_transform (%s): %s", self.mode.value, delta.as_dict())
        return delta

    def global_transform(self, obstacles: Iterable[Sequence[int]]) -> TransformMetrics:
        """Recalcula o campo inteiro só com ondas de rebaixamento.

        Zera os voxels ativos para o background, esvazia a fila, semeia cada
        obstáculo e roda :meth:`distance_transform`.
        """
        before = self.metrics.copy()
        background = self.background
        stale = [c for c, rec in self.grid.iter_active() if rec != background]
        for c in stale:
            self._acc.set(c, background)
        self.queue.clear()
        for o in sorted(_as_coord(o) for o in obstacles):
            self.set_obstacle(o)
        self.distance_transform()
        return self.metrics - before

    def check_quiescent(self) -> None:
        """Confere que nenhuma célula ficou na fila ou com status de elevação.

        Raises:
            InvariantViolationError: Na primeira célula inconsistente.
        """
        if not self.queue.is_empty():
            raise InvariantViolationError(f"Queue still holds {len(self.queue)} entries.")
        for c, rec in self.grid.iter_active():
            if rec.queued or rec.raise_status >= 0:
                raise InvariantViolationError(f"Cell {c} left queued/raising after transform: {rec}.")
            if rec.dist > self.dmax_sq or (rec.obst is None and rec.dist != self.dmax_sq):
                raise InvariantViolationError(f"Cell {c} holds an inconsistent record: {rec}.")

    def _raise(self, s: Coord, srec: CellRecord) -> None:
        get = self._acc.get
        set_ = self._acc.set
        push = self.queue.push
        dmax = self.dmax_sq
        optimized = self.mode is ScheduleMode.OPTIMIZED
        is_live = self._is_live
        neighbors = adj26(s)
        self.metrics.neighbor_queries += len(neighbors)
        for n in neighbors:
            rec = get(n)
            if rec.obst is None:
                continue
            if not is_live(rec.obst):
                # No modo otimizado o status guarda o raio da onda.
                radius = rec.dist if optimized else 0
                set_(n, CellRecord(EMPTY, dmax, radius, True))
                push(rec.dist, n)
            elif not rec.queued:
                set_(n, CellRecord(rec.obst, rec.dist, rec.raise_status, True))
                push(rec.dist, n)
        set_(s, CellRecord(srec.obst, srec.dist, NOT_RAISE, False))

    def _lower(self, s: Coord, srec: CellRecord) -> None:
        obst = srec.obst
        if obst is None:
            raise InvariantViolationError(f"Lowering front {s} carries no indexed obstacle: {srec}.")
        get = self._acc.get
        set_ = self._acc.set
        push = self.queue.push
        dmax = self.dmax_sq
        steal = self.mode is ScheduleMode.OPTIMIZED
        is_live = self._is_live
        ox, oy, oz = obst
        neighbors = adj26(s)
        self.metrics.neighbor_queries += len(neighbors)
        for n in neighbors:
            rec = get(n)
            dx = n[0] - ox
            dy = n[1] - oy
            dz = n[2] - oz
            d_new = dx * dx + dy * dy + dz * dz
            if d_new > dmax:
                d_new = dmax
            status = rec.raise_status
            if status >= 0:
                if steal and status >= d_new:
                    # Roubo: a frente de elevação vira frente de rebaixamento.
                    set_(n, CellRecord(obst, d_new, NOT_RAISE, True))
                    push(d_new, n)
                continue
            ndist = rec.dist
            if d_new < ndist or (d_new == ndist and not is_live(rec.obst)):
                if d_new < dmax:
                    set_(n, CellRecord(obst, d_new, NOT_RAISE, True))
                    push(d_new, n)
                else:
                    set_(n, CellRecord(obst, d_new, NOT_RAISE, rec.queued))
        set_(s, CellRecord(srec.obst, srec.dist, NOT_RAISE, False))
