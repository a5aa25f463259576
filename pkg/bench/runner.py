"""
Reprodução de cenários quadro a quadro.

Cada quadro junta os eventos ``A``/``R`` até o próximo marcador ``T``/``G``;
o tempo medido cobre aplicar esses eventos e drenar a fila (ou recomputar
tudo, no ``G``). Parsing, oráculo e escrita de CSV ficam fora do relógio.

Colunas do CSV por quadro (nessa ordem)::

    mode, frame, marker, changed, lowered, raised, neighbor_queries, pops,
    stale_pops, queue_pushes, leaf_nodes, internal_nodes, root_entries,
    active_voxels, estimated_bytes, dense_bytes, wall_ms

A primeira linha do arquivo é ``# vdbedt/1``.
"""

from __future__ import annotations

import csv
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Set, Union

from mod_vdbedt.edt.field import EdtField, ScheduleMode, TransformMetrics
from mod_vdbedt.exceptions import GridStateError
from mod_vdbedt.grid.sparse_grid import Coord, GridStats, TreeConfig, dense_equivalent_bytes
from mod_vdbedt.oracle.brute_force import CompareReport, brute_force_edt, compare, compare_fields
from mod_vdbedt.scenarios.scenario_io import FORMAT_TAG, Event, EventKind, Scenario, ScenarioHeader

logger = logging.getLogger(__name__)

FieldFactory = Callable[..., EdtField]

FRAME_COLUMNS = (
    "mode",
    "frame",
    "marker",
    "changed",
    "lowered",
    "raised",
    "neighbor_queries",
    "pops",
    "stale_pops",
    "queue_pushes",
    "leaf_nodes",
    "internal_nodes",
    "root_entries",
    "active_voxels",
    "estimated_bytes",
    "dense_bytes",
    "wall_ms",
)


@dataclass(frozen=True)
class FrameRow:
    mode: ScheduleMode
    frame: int
    marker: EventKind
    metrics: TransformMetrics
    queue_pushes: int
    stats: GridStats
    dense_bytes: int
    wall_ms: float

    def as_row(self) -> tuple:
        m = self.metrics
        return (
            self.mode.value,
            self.frame,
            self.marker.value,
            m.changed,
            m.lowered,
            m.raised,
            m.neighbor_queries,
            m.pops,
            m.stale_pops,
            self.queue_pushes,
            self.stats.leaf_count,
            sum(self.stats.node_count[1:]),
            self.stats.root_entries,
            self.stats.active_voxels,
            self.stats.estimated_bytes,
            self.dense_bytes,
            f"{self.wall_ms:.3f}",
        )

    def as_dict(self) -> Dict[str, object]:
        row = dict(zip(FRAME_COLUMNS, self.as_row()))
        row["wall_ms"] = round(self.wall_ms, 3)
        return row


@dataclass(frozen=True)
class CheckResult:
    frame: int
    report: CompareReport


@dataclass
class BenchResult:
    """Linhas por quadro, conferências ``C`` e agregados de uma execução."""

    mode: ScheduleMode
    header: ScenarioHeader
    rows: List[FrameRow] = field(default_factory=list)
    checks: List[CheckResult] = field(default_factory=list)
    final_stats: Optional[GridStats] = None
    final_field: Optional[EdtField] = field(default=None, repr=False, compare=False)

    @property
    def totals(self) -> TransformMetrics:
        total = TransformMetrics()
        for row in self.rows:
            total = total + row.metrics
        return total

    @property
    def total_wall_ms(self) -> float:
        return sum(row.wall_ms for row in self.rows)

    @property
    def failed_checks(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.report.ok]

    @property
    def ok(self) -> bool:
        return not self.failed_checks

    def as_dict(self) -> Dict[str, object]:
        totals = self.totals
        return {
            "mode": self.mode.value,
            "frames": len(self.rows),
            "totals": {**totals.as_dict(), "processed_cells": totals.processed_cells, "work": totals.work},
            "total_wall_ms": round(self.total_wall_ms, 3),
            "checks": len(self.checks),
            "failed_checks": [
                {"frame": c.frame, "summary": c.report.summary(limit=10)} for c in self.failed_checks
            ],
            "estimated_bytes": self.final_stats.estimated_bytes if self.final_stats else 0,
            "dense_bytes": dense_equivalent_bytes(self.header.region.dims),
            "rows": [row.as_dict() for row in self.rows],
        }


class ScenarioReplay:
    """Aplica os eventos de um cenário a um campo e mantém o conjunto de obstáculos aceitos."""

    def __init__(
        self,
        header: ScenarioHeader,
        mode: ScheduleMode,
        field_factory: FieldFactory = EdtField.initialize,
        tree_config: Optional[TreeConfig] = None,
    ) -> None:
        self.header = header
        self.mode = ScheduleMode(mode)
        self.field = field_factory(header.dmax_sq, tree_config, self.mode)
        self.obstacles: Set[Coord] = set()
        self.frame = 0
        self._dense_bytes = dense_equivalent_bytes(header.region.dims)

    def run_frame(self, changes: Sequence[Event], marker: EventKind) -> FrameRow:
        field_ = self.field
        before = field_.metrics.copy()
        pushes = field_.queue.pushes
        start = time.perf_counter()
        if marker is EventKind.GLOBAL_TRANSFORM:
            for event in changes:
                if event.kind is EventKind.ADD:
                    self.obstacles.add(event.coord)
                else:
                    self.obstacles.discard(event.coord)
            field_.global_transform(self.obstacles)
        else:
            for event in changes:
                if event.kind is EventKind.ADD:
                    if field_.set_obstacle(event.coord):
                        self.obstacles.add(event.coord)
                    else:
                        logger.debug("frame %d: ignored %s", self.frame, event.to_line())
                elif field_.remove_obstacle(event.coord):
                    self.obstacles.discard(event.coord)
                else:
                    logger.debug("frame %d: ignored %s", self.frame, event.to_line())
            field_.distance_transform()
        wall_ms = (time.perf_counter() - start) * 1000.0
        row = FrameRow(
            mode=self.mode,
            frame=self.frame,
            marker=marker,
            metrics=field_.metrics - before,
            queue_pushes=field_.queue.pushes - pushes,
            stats=field_.stats(),
            dense_bytes=self._dense_bytes,
            wall_ms=wall_ms,
        )
        self.frame += 1
        return row

    def check(self) -> CompareReport:
        """Compara o campo com o oráculo na região do cabeçalho."""
        dense = brute_force_edt(self.obstacles, self.header.region, self.header.dmax_sq)
        return compare(self.field, dense)


def _iter_frames(scenario: Scenario):
    """Gera ``(mudanças, evento)`` para cada marcador ou ``C``, na ordem do arquivo.

    Raises:
        GridStateError: Se um ``C`` vier com mudanças ainda não transformadas.
    """
    pending: List[Event] = []
    for event in scenario.events:
        if event.kind.has_coord:
            pending.append(event)
        elif event.kind is EventKind.CHECK:
            if pending:
                raise GridStateError(
                    f"Check event with {len(pending)} untransformed changes; add a T or G before C."
                )
            yield (), event
        else:
            yield pending, event
            pending = []
    if pending:
        logger.warning("%d trailing change events without a transform marker were not applied", len(pending))


def run_scenario(
    scenario: Scenario,
    mode: Union[ScheduleMode, str] = ScheduleMode.OPTIMIZED,
    run_checks: bool = True,
    field_factory: FieldFactory = EdtField.initialize,
    tree_config: Optional[TreeConfig] = None,
) -> BenchResult:
    """Reproduz ``scenario`` num modo, medindo cada quadro.

    Args:
        scenario (Scenario): Cenário validado.
        mode: Modo de agendamento.
        run_checks (bool): Executa o oráculo nos eventos ``C``.
        field_factory: Construtor do campo ``(dmax_sq, tree_config, mode)``.
        tree_config: Configuração opcional da árvore.

    Returns:
        BenchResult: Linhas por quadro e conferências.
    """
    replay = ScenarioReplay(scenario.header, ScheduleMode(mode), field_factory, tree_config)
    result = BenchResult(mode=replay.mode, header=scenario.header)
    for changes, event in _iter_frames(scenario):
        if event.kind is EventKind.CHECK:
            if run_checks:
                report = replay.check()
                result.checks.append(CheckResult(replay.frame - 1, report))
                if not report.ok:
                    logger.warning("frame %d check failed: %s", replay.frame - 1, report.summary(limit=5))
            continue
        row = replay.run_frame(changes, event.kind)
        result.rows.append(row)
        logger.info(
            "frame %d (%s, %s): changed=%d lowered=%d raised=%d %.3f ms",
            row.frame, row.mode.value, row.marker.value,
            row.metrics.changed, row.metrics.lowered, row.metrics.raised, row.wall_ms,
        )
    result.final_stats = replay.field.stats()
    result.final_field = replay.field
    return result


@dataclass(frozen=True)
class VerifyCheck:
    frame: int
    optimized: CompareReport
    baseline: CompareReport
    modes: CompareReport

    @property
    def ok(self) -> bool:
        return self.optimized.ok and self.baseline.ok and self.modes.ok


@dataclass
class VerifyReport:
    checks: List[VerifyCheck] = field(default_factory=list)
    optimized_totals: TransformMetrics = field(default_factory=TransformMetrics)
    baseline_totals: TransformMetrics = field(default_factory=TransformMetrics)

    @property
    def ok(self) -> bool:
        return all(check.ok for check in self.checks)

    @property
    def failures(self) -> List[VerifyCheck]:
        return [check for check in self.checks if not check.ok]

    def as_dict(self) -> Dict[str, object]:
        failures = []
        for check in self.failures:
            failures.append(
                {
                    "frame": check.frame,
                    "optimized": check.optimized.summary(limit=10),
                    "baseline": check.baseline.summary(limit=10),
                    "modes": check.modes.summary(limit=10),
                }
            )
        return {
            "ok": self.ok,
            "checks": len(self.checks),
            "failures": failures,
            "optimized_neighbor_queries": self.optimized_totals.neighbor_queries,
            "baseline_neighbor_queries": self.baseline_totals.neighbor_queries,
            "optimized_processed_cells": self.optimized_totals.processed_cells,
            "baseline_processed_cells": self.baseline_totals.processed_cells,
        }


def verify_scenario(
    scenario: Scenario,
    every_frame: bool = False,
    field_factory: FieldFactory = EdtField.initialize,
    tree_config: Optional[TreeConfig] = None,
) -> VerifyReport:
    """Roda os dois modos lado a lado e confere ambos contra o oráculo e entre si.

    As conferências acontecem em cada ``C`` (ou em todo quadro, com
    ``every_frame``) e sempre ao final do cenário.
    """
    optimized = ScenarioReplay(scenario.header, ScheduleMode.OPTIMIZED, field_factory, tree_config)
    baseline = ScenarioReplay(scenario.header, ScheduleMode.BASELINE, field_factory, tree_config)
    report = VerifyReport()
    region = scenario.header.region

    def check_both() -> None:
        dense = brute_force_edt(optimized.obstacles, region, scenario.header.dmax_sq)
        check = VerifyCheck(
            frame=optimized.frame - 1,
            optimized=compare(optimized.field, dense),
            baseline=compare(baseline.field, dense),
            modes=compare_fields(optimized.field, baseline.field, region),
        )
        if not check.ok:
            logger.warning("verification failed at frame %d", check.frame)
        report.checks.append(check)

    checked_last = False
    for changes, event in _iter_frames(scenario):
        if event.kind is EventKind.CHECK:
            check_both()
            checked_last = True
            continue
        report.optimized_totals = report.optimized_totals + optimized.run_frame(changes, event.kind).metrics
        report.baseline_totals = report.baseline_totals + baseline.run_frame(changes, event.kind).metrics
        checked_last = False
        if every_frame:
            check_both()
            checked_last = True
    if not checked_last:
        check_both()
    return report


def write_frames_csv(results: Sequence[BenchResult], path: Union[str, Path]) -> None:
    """Grava as linhas por quadro de uma ou mais execuções."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        handle.write(f"# {FORMAT_TAG}\n")
        writer = csv.writer(handle)
        writer.writerow(FRAME_COLUMNS)
        for result in results:
            for row in result.rows:
                writer.writerow(row.as_row())
