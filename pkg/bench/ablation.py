"""
Ablações: varrem um eixo, repetem com sementes consecutivas e agregam.

Eixos ``range``, ``threshold`` e ``changes`` rodam cada cenário nos dois
modos e reportam média e variância populacional do tempo por quadro
dinâmico (quadros depois do inicial), células processadas, razão de
aceleração (baseline / otimizado) e razão de memória (VDB / denso).

O eixo ``global`` fixa ``global_obstacles`` obstáculos e ``global_added``
adições e varre a razão remoções/adições; para cada razão compara o custo do
quadro de mudança feito incrementalmente contra a recomputação global. A
coluna ``global_raised`` tem de ser zero.
"""

from __future__ import annotations

import csv
import enum
import logging
import statistics
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from mod_vdbedt.bench.runner import BenchResult, run_scenario
from mod_vdbedt.edt.field import ScheduleMode
from mod_vdbedt.exceptions import ConfigurationError
from mod_vdbedt.scenarios.generator import GeneratorSpec, generate_scenario
from mod_vdbedt.scenarios.scenario_io import FORMAT_TAG

logger = logging.getLogger(__name__)


class AblationAxis(enum.Enum):
    RANGE = "range"
    THRESHOLD = "threshold"
    CHANGES = "changes"
    GLOBAL = "global"


@dataclass(frozen=True)
class AblationPreset:
    """Valores fixos e varreduras de uma família de ablações.

    Attributes:
        range_sweep: Lados de cubo (células) para o eixo ``range``.
        threshold_sweep: Limiares (células) para o eixo ``threshold``.
        changes_sweep: Contagens de obstáculos para o eixo ``changes``.
        change_ratios: Razões remoções/adições para o eixo ``global``.
        fixed_range: Lado do cubo quando o eixo não é ``range``.
        fixed_threshold: Limiar quando o eixo não é ``threshold``.
        obstacles: Obstáculos quando o eixo não é ``changes``.
        churn: Fração trocada por quadro.
        frames: Quadros por cenário (inicial incluso).
        global_obstacles: Obstáculos iniciais do eixo ``global``.
        global_added: Adições no quadro de mudança do eixo ``global``.
    """

    name: str
    range_sweep: Tuple[int, ...]
    threshold_sweep: Tuple[int, ...]
    changes_sweep: Tuple[int, ...]
    change_ratios: Tuple[float, ...]
    fixed_range: int
    fixed_threshold: int
    obstacles: int
    churn: float = 0.5
    frames: int = 3
    global_obstacles: int = 80
    global_added: int = 40

    def sweep(self, axis: AblationAxis) -> Tuple[Union[int, float], ...]:
        return {
            AblationAxis.RANGE: self.range_sweep,
            AblationAxis.THRESHOLD: self.threshold_sweep,
            AblationAxis.CHANGES: self.changes_sweep,
            AblationAxis.GLOBAL: self.change_ratios,
        }[axis]


PRESETS: Dict[str, AblationPreset] = {
    "desk": AblationPreset(
        name="desk",
        range_sweep=(16, 24, 32, 48),
        threshold_sweep=(2, 3, 4, 5),
        changes_sweep=(20, 40, 60, 80),
        change_ratios=(0.1, 0.25, 0.5),
        fixed_range=32,
        fixed_threshold=3,
        obstacles=60,
        churn=0.5,
        frames=3,
        global_obstacles=80,
        global_added=40,
    ),
    "full": AblationPreset(
        name="full",
        range_sweep=(25, 50, 75, 100),
        threshold_sweep=(3, 5, 10, 15),
        changes_sweep=(100, 250, 500, 750, 1000),
        change_ratios=(0.1, 0.25, 0.5),
        fixed_range=100,
        fixed_threshold=10,
        obstacles=500,
        churn=0.5,
        frames=5,
        global_obstacles=800,
        global_added=400,
    ),
}

DEFAULT_PRESET = "desk"

SWEEP_COLUMNS = (
    "axis",
    "value",
    "repeats",
    "optimized_ms_mean",
    "optimized_ms_var",
    "baseline_ms_mean",
    "baseline_ms_var",
    "optimized_processed_mean",
    "baseline_processed_mean",
    "optimized_work_mean",
    "baseline_work_mean",
    "acceleration",
    "work_ratio",
    "estimated_bytes_mean",
    "dense_bytes",
    "memory_ratio",
)

CROSSOVER_COLUMNS = (
    "axis",
    "value",
    "removed",
    "added",
    "repeats",
    "incremental_ms_mean",
    "incremental_ms_var",
    "global_ms_mean",
    "global_ms_var",
    "incremental_processed_mean",
    "global_processed_mean",
    "global_raised",
)


@dataclass(frozen=True)
class SweepRow:
    axis: AblationAxis
    value: Union[int, float]
    repeats: int
    optimized_ms_mean: float
    optimized_ms_var: float
    baseline_ms_mean: float
    baseline_ms_var: float
    optimized_processed_mean: float
    baseline_processed_mean: float
    optimized_work_mean: float
    baseline_work_mean: float
    estimated_bytes_mean: float
    dense_bytes: int

    @property
    def acceleration(self) -> float:
        return _ratio(self.baseline_ms_mean, self.optimized_ms_mean)

    @property
    def work_ratio(self) -> float:
        return _ratio(self.baseline_work_mean, self.optimized_work_mean)

    @property
    def memory_ratio(self) -> float:
        return _ratio(self.estimated_bytes_mean, self.dense_bytes)

    def as_dict(self) -> Dict[str, object]:
        return {
            "axis": self.axis.value,
            "value": self.value,
            "repeats": self.repeats,
            "optimized_ms_mean": round(self.optimized_ms_mean, 4),
            "optimized_ms_var": round(self.optimized_ms_var, 6),
            "baseline_ms_mean": round(self.baseline_ms_mean, 4),
            "baseline_ms_var": round(self.baseline_ms_var, 6),
            "optimized_processed_mean": self.optimized_processed_mean,
            "baseline_processed_mean": self.baseline_processed_mean,
            "optimized_work_mean": self.optimized_work_mean,
            "baseline_work_mean": self.baseline_work_mean,
            "acceleration": round(self.acceleration, 4),
            "work_ratio": round(self.work_ratio, 4),
            "estimated_bytes_mean": self.estimated_bytes_mean,
            "dense_bytes": self.dense_bytes,
            "memory_ratio": round(self.memory_ratio, 4),
        }


@dataclass(frozen=True)
class CrossoverRow:
    value: float
    removed: int
    added: int
    repeats: int
    incremental_ms_mean: float
    incremental_ms_var: float
    global_ms_mean: float
    global_ms_var: float
    incremental_processed_mean: float
    global_processed_mean: float
    global_raised: int
    axis: AblationAxis = AblationAxis.GLOBAL

    def as_dict(self) -> Dict[str, object]:
        return {
            "axis": self.axis.value,
            "value": self.value,
            "removed": self.removed,
            "added": self.added,
            "repeats": self.repeats,
            "incremental_ms_mean": round(self.incremental_ms_mean, 4),
            "incremental_ms_var": round(self.incremental_ms_var, 6),
            "global_ms_mean": round(self.global_ms_mean, 4),
            "global_ms_var": round(self.global_ms_var, 6),
            "incremental_processed_mean": self.incremental_processed_mean,
            "global_processed_mean": self.global_processed_mean,
            "global_raised": self.global_raised,
        }


AblationRow = Union[SweepRow, CrossoverRow]


def _ratio(numerator: float, denominator: float) -> float:
    return numerator / denominator if denominator else 0.0


def _dynamic_rows(result: BenchResult):
    """Quadros depois do inicial; o próprio inicial quando só há um."""
    return result.rows[1:] or result.rows


def frame_ms(result: BenchResult) -> float:
    rows = _dynamic_rows(result)
    return statistics.fmean(row.wall_ms for row in rows)


def frame_processed(result: BenchResult) -> float:
    rows = _dynamic_rows(result)
    return statistics.fmean(row.metrics.processed_cells for row in rows)


def frame_work(result: BenchResult) -> float:
    rows = _dynamic_rows(result)
    return statistics.fmean(row.metrics.work for row in rows)


def _validate_run(repeats: int, values: Sequence[Union[int, float]]) -> None:
    if repeats < 1:
        raise ConfigurationError(f"repeats must be >= 1. Received: {repeats}.")
    if not values:
        raise ConfigurationError("Ablation needs at least one sweep value.")


def spec_for(
    axis: AblationAxis, value: Union[int, float], preset: AblationPreset, seed: int
) -> GeneratorSpec:
    """Monta a ``GeneratorSpec`` de um ponto da varredura."""
    base = GeneratorSpec(
        range_cells=preset.fixed_range,
        n_obstacles=preset.obstacles,
        churn_fraction=preset.churn,
        frames=preset.frames,
        seed=seed,
        dmax_cells=preset.fixed_threshold,
    )
    if axis is AblationAxis.RANGE:
        return replace(base, range_cells=int(value))
    if axis is AblationAxis.THRESHOLD:
        return replace(base, dmax_cells=int(value))
    if axis is AblationAxis.CHANGES:
        return replace(base, n_obstacles=int(value))
    return replace(
        base,
        n_obstacles=preset.global_obstacles,
        added_count=preset.global_added,
        removal_ratio=float(value),
        frames=2,
    )


def _mean_var(samples: Sequence[float]) -> Tuple[float, float]:
    return statistics.fmean(samples), statistics.pvariance(samples)


def _sweep_point(
    axis: AblationAxis, value: Union[int, float], preset: AblationPreset, repeats: int, seed: int
) -> SweepRow:
    opt_ms, base_ms = [], []
    opt_proc, base_proc = [], []
    opt_work, base_work = [], []
    est_bytes = []
    dense_bytes = 0
    for rep in range(repeats):
        scenario = generate_scenario(spec_for(axis, value, preset, seed + rep))
        optimized = run_scenario(scenario, ScheduleMode.OPTIMIZED, run_checks=False)
        baseline = run_scenario(scenario, ScheduleMode.BASELINE, run_checks=False)
        opt_ms.append(frame_ms(optimized))
        base_ms.append(frame_ms(baseline))
        opt_proc.append(frame_processed(optimized))
        base_proc.append(frame_processed(baseline))
        opt_work.append(frame_work(optimized))
        base_work.append(frame_work(baseline))
        est_bytes.append(optimized.final_stats.estimated_bytes)
        dense_bytes = optimized.rows[-1].dense_bytes
    opt_mean, opt_var = _mean_var(opt_ms)
    base_mean, base_var = _mean_var(base_ms)
    return SweepRow(
        axis=axis,
        value=value,
        repeats=repeats,
        optimized_ms_mean=opt_mean,
        optimized_ms_var=opt_var,
        baseline_ms_mean=base_mean,
        baseline_ms_var=base_var,
        optimized_processed_mean=statistics.fmean(opt_proc),
        baseline_processed_mean=statistics.fmean(base_proc),
        optimized_work_mean=statistics.fmean(opt_work),
        baseline_work_mean=statistics.fmean(base_work),
        estimated_bytes_mean=statistics.fmean(est_bytes),
        dense_bytes=dense_bytes,
    )


def _crossover_point(value: float, preset: AblationPreset, repeats: int, seed: int) -> CrossoverRow:
    inc_ms, glob_ms = [], []
    inc_proc, glob_proc = [], []
    raised = 0
    removed, added = spec_for(AblationAxis.GLOBAL, value, preset, seed).frame_counts
    for rep in range(repeats):
        spec = spec_for(AblationAxis.GLOBAL, value, preset, seed + rep)
        incremental = run_scenario(generate_scenario(spec), ScheduleMode.OPTIMIZED, run_checks=False)
        rebuilt = run_scenario(
            generate_scenario(replace(spec, global_frames=True)), ScheduleMode.OPTIMIZED, run_checks=False
        )
        inc_ms.append(frame_ms(incremental))
        glob_ms.append(frame_ms(rebuilt))
        inc_proc.append(frame_processed(incremental))
        glob_proc.append(frame_processed(rebuilt))
        raised += rebuilt.totals.raised
    inc_mean, inc_var = _mean_var(inc_ms)
    glob_mean, glob_var = _mean_var(glob_ms)
    return CrossoverRow(
        value=value,
        removed=removed,
        added=added,
        repeats=repeats,
        incremental_ms_mean=inc_mean,
        incremental_ms_var=inc_var,
        global_ms_mean=glob_mean,
        global_ms_var=glob_var,
        incremental_processed_mean=statistics.fmean(inc_proc),
        global_processed_mean=statistics.fmean(glob_proc),
        global_raised=raised,
    )


def run_ablation(
    axis: Union[AblationAxis, str],
    preset: Union[AblationPreset, str] = DEFAULT_PRESET,
    values: Optional[Sequence[Union[int, float]]] = None,
    repeats: int = 3,
    seed: int = 0,
) -> List[AblationRow]:
    """Executa uma ablação completa.

    Args:
        axis: ``range``, ``threshold``, ``changes`` ou ``global``.
        preset: Nome em ``PRESETS`` ou um ``AblationPreset``.
        values: Substitui a varredura do preset.
        repeats (int): Repetições por ponto (sementes ``seed .. seed+repeats-1``).
        seed (int): Semente base.

    Returns:
        list: Uma linha por valor da varredura.

    Raises:
        ConfigurationError: Preset desconhecido, varredura vazia ou
            ``repeats < 1``.
    """
    axis = AblationAxis(axis)
    if isinstance(preset, str):
        if preset not in PRESETS:
            raise ConfigurationError(f"Unknown preset {preset!r}; choose from {sorted(PRESETS)}.")
        preset = PRESETS[preset]
    sweep = tuple(values) if values is not None else preset.sweep(axis)
    _validate_run(repeats, sweep)
    rows: List[AblationRow] = []
    for value in sweep:
        logger.info("ablation %s=%s (%s preset, %d repeats)", axis.value, value, preset.name, repeats)
        if axis is AblationAxis.GLOBAL:
            rows.append(_crossover_point(float(value), preset, repeats, seed))
        else:
            rows.append(_sweep_point(axis, value, preset, repeats, seed))
    return rows


def write_ablation_csv(rows: Sequence[AblationRow], path: Union[str, Path]) -> None:
    columns = CROSSOVER_COLUMNS if rows and isinstance(rows[0], CrossoverRow) else SWEEP_COLUMNS
    with open(path, "w", newline="", encoding="utf-8") as handle:
        handle.write(f"# {FORMAT_TAG}\n")
        writer = csv.writer(handle)
        writer.writerow(columns)
        for row in rows:
            record = row.as_dict()
            writer.writerow([record[c] for c in columns])
