"""
Gerador pseudoaleatório documentado para cenários reproduzíveis.

xorshift64* (Vigna): estado de 64 bits, deslocamentos ``12, 25, 27`` e
multiplicador de saída ``0x2545F4914F6CDD1D``. A semente passa antes por
um passo de SplitMix64 (incremento ``0x9E3779B97F4A7C15``, multiplicadores
``0xBF58476D1CE4E5B9`` e ``0x94D049BB133111EB``), o que evita o estado zero
e espalha sementes pequenas. ``below(n)`` usa multiplicação-deslocamento
(``(u64 * n) >> 64``), sem rejeição. Tudo é aritmética inteira, então a
sequência é idêntica em qualquer plataforma ou implementação.
"""

from __future__ import annotations

from typing import List, Sequence, TypeVar

T = TypeVar("T")

_MASK64: int = (1 << 64) - 1
_GOLDEN: int = 0x9E3779B97F4A7C15


def splitmix64(seed: int) -> int:
    z = (seed + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class Xorshift64Star:
    """xorshift64* semeado por SplitMix64."""

    def __init__(self, seed: int) -> None:
        self._state = splitmix64(seed & _MASK64) or _GOLDEN

    def next_u64(self) -> int:
        x = self._state
        x ^= x >> 12
        x ^= (x << 25) & _MASK64
        x ^= x >> 27
        self._state = x
        return (x * 0x2545F4914F6CDD1D) & _MASK64

    def below(self, n: int) -> int:
        """Inteiro em ``[0, n)``."""
        if n <= 0:
            raise ValueError(f"below() needs n > 0. Received: {n}.")
        return (self.next_u64() * n) >> 64

    def randint(self, lo: int, hi: int) -> int:
        """Inteiro em ``[lo, hi]`` (inclusivo)."""
        return lo + self.below(hi - lo + 1)

    def sample(self, population: Sequence[T], k: int) -> List[T]:
        """``k`` elementos distintos por Fisher-Yates parcial, na ordem sorteada."""
        pool = list(population)
        if not 0 <= k <= len(pool):
            raise ValueError(f"sample size {k} outside [0, {len(pool)}].")
        for i in range(k):
            j = i + self.below(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]
