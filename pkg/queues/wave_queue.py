"""
Fila de prioridade em baldes para agendar ondas de rebaixamento e elevação.

As prioridades são distâncias quadráticas inteiras em ``[0, max_priority]``
(o ``dmax_sq`` do campo), então um balde por prioridade basta. Dentro do
balde a ordem é FIFO pela sequência de inserção, o que deixa os traços
reproduzíveis: a ordem de saída é prioridade crescente, empate por ``seq``
crescente.

A mesma coordenada pode entrar várias vezes; a fila não guarda cópia do
registro e quem consome decide se a entrada ainda vale (flag ``state``).
"""

from __future__ import annotations

from collections import deque
from typing import Deque, List, NamedTuple, Tuple

from mod_vdbedt.exceptions import ConfigurationError, InvariantViolationError

Coord = Tuple[int, int, int]


class QueueEntry(NamedTuple):
    priority: int
    seq: int
    coord: Coord


class WaveQueue:
    """Fila mínima em baldes com desempate FIFO.

    Args:
        max_priority (int): Maior prioridade aceita (inclusiva).
    """

    def __init__(self, max_priority: int) -> None:
        if max_priority < 0:
            raise ConfigurationError(f"max_priority must be >= 0. Received: {max_priority}.")
        self._buckets: List[Deque[Tuple[int, Coord]]] = [deque() for _ in range(max_priority + 1)]
        self._cursor = 0
        self._size = 0
        self._seq = 0
        self.pushes = 0

    def __len__(self) -> int:
        return self._size

    def is_empty(self) -> bool:
        return self._size == 0

    @property
    def max_priority(self) -> int:
        return len(self._buckets) - 1

    def push(self, priority: int, coord: Coord) -> None:
        if not 0 <= priority < len(self._buckets):
            raise InvariantViolationError(
                f"Queue priority {priority} outside [0, {self.max_priority}] for {coord}."
            )
        self._buckets[priority].append((self._seq, coord))
        self._seq += 1
        self._size += 1
        self.pushes += 1
        if priority < self._cursor:
            self._cursor = priority

    def pop(self) -> QueueEntry:
        if self._size == 0:
            raise IndexError("pop from an empty WaveQueue")
        buckets = self._buckets
        cursor = self._cursor
        while not buckets[cursor]:
            cursor += 1
        self._cursor = cursor
        seq, coord = buckets[cursor].popleft()
        self._size -= 1
        return QueueEntry(cursor, seq, coord)

    def clear(self) -> None:
        for bucket in self._buckets:
            bucket.clear()
        self._cursor = 0
        self._size = 0
