"""
Exportação de uma fatia ``z = const`` do campo para inspeção.

CSV: primeira linha ``# vdbedt/1``; depois uma linha por ``y`` crescente,
com as distâncias quadráticas inteiras por ``x`` crescente. Células de
sobreposição (por exemplo um caminho planejado) saem como ``-1``.

PGM binário (P5), 8 bits: ``valor = round(255 * dist / dmax_sq)`` com meio
para cima, feito em inteiros; linha 0 da imagem é o menor ``y``.
Sobreposições saem pretas (0).
"""

from __future__ import annotations

import enum
import logging
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from mod_vdbedt.edt.field import EdtField
from mod_vdbedt.exceptions import ConfigurationError, GridStateError
from mod_vdbedt.grid.region import Region
from mod_vdbedt.scenarios.scenario_io import FORMAT_TAG

logger = logging.getLogger(__name__)


class SliceFormat(enum.Enum):
    CSV = "csv"
    PGM = "pgm"


def slice_distances(field_: EdtField, z: int, region: Region) -> np.ndarray:
    """Distâncias da fatia ``z`` como array ``[y, x]``.

    Raises:
        GridStateError: Se o campo tiver transformada pendente.
        ConfigurationError: Se ``z`` estiver fora da região.
    """
    if not field_.is_quiescent:
        raise GridStateError("Slice export needs a quiescent field; run distance_transform() first.")
    oz, dz = region.origin[2], region.dims[2]
    if not oz <= z < oz + dz:
        raise ConfigurationError(f"Slice z={z} is outside region z range [{oz}, {oz + dz}).")
    ox, oy = region.origin[0], region.origin[1]
    dx, dy = region.dims[0], region.dims[1]
    reader = field_.grid.accessor()
    out = np.empty((dy, dx), dtype=np.int64)
    for j in range(dy):
        for i in range(dx):
            out[j, i] = reader.get((ox + i, oy + j, z)).dist
    return out


def to_gray(distances: np.ndarray, dmax_sq: int) -> np.ndarray:
    """Escala ``[0, dmax_sq]`` para ``[0, 255]`` arredondando meio para cima."""
    scaled = (510 * distances.astype(np.int64) + dmax_sq) // (2 * dmax_sq)
    return np.clip(scaled, 0, 255).astype(np.uint8)


def export_slice(
    field_: EdtField,
    z: int,
    path: Union[str, Path],
    fmt: Union[SliceFormat, str],
    region: Region,
    overlay: Optional[Iterable[Sequence[int]]] = None,
) -> np.ndarray:
    """Grava a fatia ``z`` de ``region`` em ``path``.

    Args:
        field_ (EdtField): Campo quiescente.
        z (int): Plano exportado.
        path: Arquivo de saída.
        fmt: ``csv`` ou ``pgm``.
        region (Region): Extensão em x/y (e faixa válida de z).
        overlay: Células a destacar; as de outro ``z`` são ignoradas.

    Returns:
        np.ndarray: As distâncias gravadas, ``[y, x]``.
    """
    fmt = SliceFormat(fmt)
    distances = slice_distances(field_, z, region)
    marks = np.zeros(distances.shape, dtype=bool)
    ox, oy = region.origin[0], region.origin[1]
    for c in overlay or ():
        if c[2] == z and region.contains(c):
            marks[c[1] - oy, c[0] - ox] = True
    path = Path(path)
    if fmt is SliceFormat.CSV:
        table = np.where(marks, -1, distances)
        lines = [f"# {FORMAT_TAG}"] + [",".join(str(int(v)) for v in row) for row in table]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    else:
        gray = to_gray(distances, field_.dmax_sq)
        gray[marks] = 0
        height, width = gray.shape
        header = f"P5\n# {FORMAT_TAG}\n{width} {height}\n255\n".encode("ascii")
        path.write_bytes(header + gray.tobytes())
    logger.info("exported z=%d slice (%dx%d, %s) to %s", z, distances.shape[1], distances.shape[0], fmt.value, path)
    return distances
