"""
Registro por célula da transformada e geometria de vizinhança.

Cada célula guarda quatro campos:

- ``obst``: coordenada do obstáculo indexado como mais próximo, ou ``EMPTY``
  (``None``) quando nenhum obstáculo está indexado. Pode apontar para um
  obstáculo já removido (índice inválido) até a onda de elevação passar.
- ``dist``: distância quadrática em células, truncada em ``dmax_sq``.
- ``raise_status``: ``NOT_RAISE`` (-1) ou o raio quadrático com que a célula
  entrou numa onda de elevação.
- ``queued``: se a célula está agendada na fila.

Distâncias são inteiras e quadráticas; nada de float no núcleo, o que deixa
truncamento e empates exatos.
"""

from __future__ import annotations

from typing import List, NamedTuple, Optional, Tuple

from mod_vdbedt.grid.sparse_grid import COORD_MAX, COORD_MIN, Coord, in_domain

NOT_RAISE: int = -1
EMPTY = None

# Ordem documentada: dx, dy, dz em (-1, 0, 1), lexicográfica, sem (0, 0, 0).
NEIGHBOR_OFFSETS: Tuple[Coord, ...] = tuple(
    (dx, dy, dz)
    for dx in (-1, 0, 1)
    for dy in (-1, 0, 1)
    for dz in (-1, 0, 1)
    if (dx, dy, dz) != (0, 0, 0)
)


class CellRecord(NamedTuple):
    obst: Optional[Coord]
    dist: int
    raise_status: int
    queued: bool


def background_record(dmax_sq: int) -> CellRecord:
    """Registro do Initialize: sem obstáculo, distância ``dmax_sq``, fora da fila."""
    return CellRecord(EMPTY, dmax_sq, NOT_RAISE, False)


def sqdist(a: Coord, b: Coord) -> int:
    """Distância euclidiana quadrática exata entre duas coordenadas."""
    dx = a[0] - b[0]
    dy = a[1] - b[1]
    dz = a[2] - b[2]
    return dx * dx + dy * dy + dz * dz


def adj26(c: Coord) -> List[Coord]:
    """Vizinhos de Chebyshev 1 na ordem de ``NEIGHBOR_OFFSETS``.

    Vizinhos fora do domínio são omitidos, então células na borda do domínio
    têm menos de 26 vizinhos.
    """
    x, y, z = c
    if COORD_MIN < x < COORD_MAX and COORD_MIN < y < COORD_MAX and COORD_MIN < z < COORD_MAX:
        return [(x + dx, y + dy, z + dz) for dx, dy, dz in NEIGHBOR_OFFSETS]
    return [
        n
        for n in ((x + dx, y + dy, z + dz) for dx, dy, dz in NEIGHBOR_OFFSETS)
        if in_domain(n)
    ]
