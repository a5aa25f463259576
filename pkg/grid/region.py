"""
Caixa alinhada aos eixos em coordenadas de célula (origem + dimensões).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence, Tuple

from mod_vdbedt.exceptions import ConfigurationError
from mod_vdbedt.grid.sparse_grid import Coord, pack_coord


@dataclass(frozen=True)
class Region:
    """Região ``[origin, origin + dims)`` por eixo.

    Raises:
        ConfigurationError: Se alguma dimensão não for positiva.
        DomainError: Se os cantos saírem do domínio da árvore.
    """

    origin: Coord
    dims: Tuple[int, int, int]

    def __post_init__(self) -> None:
        origin = tuple(int(v) for v in self.origin)
        dims = tuple(int(v) for v in self.dims)
        if len(origin) != 3 or len(dims) != 3:
            raise ConfigurationError(f"Region needs 3-D origin and dims. Received: {self.origin}, {self.dims}.")
        if any(d <= 0 for d in dims):
            raise ConfigurationError(f"Region dims must be positive. Received: {dims}.")
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "dims", dims)
        pack_coord(origin)
        pack_coord(self.upper)

    @classmethod
    def around(cls, cells: Sequence[Coord], margin: int) -> "Region":
        """Menor caixa que contém ``cells`` com ``margin`` células de folga."""
        lo = [min(c[axis] for c in cells) - margin for axis in range(3)]
        hi = [max(c[axis] for c in cells) + margin for axis in range(3)]
        return cls(tuple(lo), tuple(h - l + 1 for l, h in zip(lo, hi)))

    @property
    def upper(self) -> Coord:
        """Canto superior inclusivo."""
        return tuple(o + d - 1 for o, d in zip(self.origin, self.dims))

    @property
    def volume(self) -> int:
        dx, dy, dz = self.dims
        return dx * dy * dz

    def contains(self, c: Sequence[int]) -> bool:
        return all(o <= v < o + d for v, o, d in zip(c, self.origin, self.dims))

    def cells(self) -> Iterator[Coord]:
        """Todas as células em ordem x, y, z (z varia mais rápido)."""
        ox, oy, oz = self.origin
        dx, dy, dz = self.dims
        for x in range(ox, ox + dx):
            for y in range(oy, oy + dy):
                for z in range(oz, oz + dz):
                    yield (x, y, z)
