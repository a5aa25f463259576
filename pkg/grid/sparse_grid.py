"""
Contêiner esparso hierárquico no estilo VDB: coordenada inteira 3-D -> registro.

A árvore tem uma tabela hash na raiz, um ou mais níveis internos e folhas.
Os expoentes de ramificação são dados folha-primeiro em ``TreeConfig``: o
padrão ``(3, 4, 5)`` é folha 8³, interno 16³ e interno 32³ (o nó de topo
cobre 4096³ células).

Cada slot de um nó interno guarda **ou** a referência ao filho **ou** um
valor de tile que cobre todo o subdomínio do slot; o bit em ``child_mask``
decide qual das duas leituras vale. As folhas guardam os registros
diretamente e marcam em ``value_mask`` os voxels escritos.

Coordenadas assinadas são deslocadas por ``2**30`` para virar inteiros sem
sinal antes da extração dos prefixos; o domínio válido é ``[-2**30, 2**30)``
por eixo.

Estimativa de memória (``GridStats.estimated_bytes``), por nó::

    folha   = NODE_HEADER_BYTES + slots * RECORD_BYTES + slots / 8
    interno = NODE_HEADER_BYTES + slots * SLOT_BYTES + 2 * slots / 8
    raiz    = entradas * ROOT_ENTRY_BYTES

com ``slots = 2 ** (3 * log2_dim)`` do nível. ``RECORD_BYTES`` é o tamanho
do CellRecord empacotado (obst 3×int32, dist uint32, raise int32, state
uint8, alinhado a 24 bytes); o slot interno é a união filho/tile, logo tem
o tamanho do maior dos dois.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from typing import Any, Iterator, List, Optional, Tuple

from mod_vdbedt.exceptions import ConfigurationError, DomainError, GridStateError, InvariantViolationError

logger = logging.getLogger(__name__)

Coord = Tuple[int, int, int]

DEFAULT_LOG2_DIMS: Tuple[int, ...] = (3, 4, 5)

COORD_OFFSET: int = 1 << 30
COORD_MIN: int = -COORD_OFFSET
COORD_MAX: int = COORD_OFFSET - 1
_COORD_BITS: int = 31

RECORD_BYTES: int = 24
SLOT_BYTES: int = 24
NODE_HEADER_BYTES: int = 16
ROOT_ENTRY_BYTES: int = 8 + SLOT_BYTES

_MASK64: int = (1 << 64) - 1
_FIBONACCI_MIX: int = 0x9E3779B97F4A7C15


def in_domain(c: Coord) -> bool:
    """Indica se a coordenada cabe no domínio empacotável."""
    x, y, z = c
    return COORD_MIN <= x <= COORD_MAX and COORD_MIN <= y <= COORD_MAX and COORD_MIN <= z <= COORD_MAX


def pack_coord(c: Coord) -> Coord:
    """Desloca a coordenada assinada para o intervalo sem sinal ``[0, 2**31)``.

    Raises:
        DomainError: Se algum componente estiver fora de ``[-2**30, 2**30)``.
    """
    x, y, z = c
    if not (COORD_MIN <= x <= COORD_MAX and COORD_MIN <= y <= COORD_MAX and COORD_MIN <= z <= COORD_MAX):
        raise DomainError(
            f"Coordinate outside the packable domain [{COORD_MIN}, {COORD_MAX}]. Received: {c}."
        )
    return x + COORD_OFFSET, y + COORD_OFFSET, z + COORD_OFFSET


def dense_equivalent_bytes(dims: Tuple[int, int, int]) -> int:
    """Bytes de um array denso de CellRecords cobrindo ``dims`` células."""
    dx, dy, dz = dims
    return dx * dy * dz * RECORD_BYTES


@dataclass(frozen=True)
class TreeConfig:
    """Configuração da árvore: expoentes por nível (folha primeiro) e background.

    Attributes:
        log2_dims: Expoentes log2 da ramificação por eixo, da folha para o
            topo. Pelo menos dois níveis, todos ``>= 1``.
        background: Registro devolvido por toda região não alocada.
    """

    log2_dims: Tuple[int, ...] = DEFAULT_LOG2_DIMS
    background: Any = None

    def __post_init__(self) -> None:
        dims = tuple(self.log2_dims)
        object.__setattr__(self, "log2_dims", dims)
        if len(dims) < 2:
            raise ConfigurationError(
                f"TreeConfig needs at least two levels (leaf + internal). Received: {dims}."
            )
        for exponent in dims:
            if not isinstance(exponent, int) or isinstance(exponent, bool) or exponent < 1:
                raise ConfigurationError(
                    f"Every branching exponent must be an integer >= 1. Received: {dims}."
                )
        if sum(dims) > _COORD_BITS - 1:
            raise ConfigurationError(
                f"Branching exponents cover {sum(dims)} bits; at most {_COORD_BITS - 1} fit the domain."
            )


@dataclass(frozen=True)
class GridStats:
    """Contagens determinísticas da estrutura alocada.

    ``node_count`` é folha-primeiro (``node_count[0]`` são as folhas);
    ``root_entries`` conta as entradas da tabela hash da raiz.
    """

    node_count: Tuple[int, ...]
    root_entries: int
    active_voxels: int
    estimated_bytes: int

    @property
    def leaf_count(self) -> int:
        return self.node_count[0]

    @property
    def total_nodes(self) -> int:
        return sum(self.node_count) + self.root_entries


class TreeNode:
    """Nó da árvore. Em folhas (``level == 0``) a tabela guarda registros."""

    __slots__ = ("level", "tag", "table", "child_mask", "value_mask")

    def __init__(self, level: int, tag: Coord, slots: int, fill: Any) -> None:
        self.level = level
        self.tag = tag
        self.table: List[Any] = [fill] * slots
        self.child_mask = 0
        self.value_mask = 0


class RootTable:
    """Tabela hash de endereçamento aberto para os nós de topo.

    A chave é o prefixo ``(px, py, pz)`` empacotado em um inteiro; o slot é
    o mix multiplicativo de Fibonacci ``(key * 0x9E3779B97F4A7C15) mod 2**64``
    tomando os ``bits`` mais altos. Sondagem linear; a capacidade dobra
    quando a ocupação passa de metade.
    """

    def __init__(self, prefix_bits: int) -> None:
        self._prefix_bits = prefix_bits
        self._bits = 3
        self._keys: List[Optional[int]] = [None] * 8
        self._nodes: List[Optional[TreeNode]] = [None] * 8
        self._count = 0

    def __len__(self) -> int:
        return self._count

    def pack_key(self, px: int, py: int, pz: int) -> int:
        b = self._prefix_bits
        return (px << (2 * b)) | (py << b) | pz

    def _slot(self, key: int) -> int:
        return ((key * _FIBONACCI_MIX) & _MASK64) >> (64 - self._bits)

    def get(self, key: int) -> Optional[TreeNode]:
        keys = self._keys
        mask = len(keys) - 1
        i = self._slot(key)
        while True:
            stored = keys[i]
            if stored is None:
                return None
            if stored == key:
                return self._nodes[i]
            i = (i + 1) & mask

    def insert(self, key: int, node: TreeNode) -> None:
        if (self._count + 1) * 2 > len(self._keys):
            self._grow()
        self._place(key, node)
        self._count += 1

    def _place(self, key: int, node: TreeNode) -> None:
        keys = self._keys
        mask = len(keys) - 1
        i = self._slot(key)
        while keys[i] is not None:
            if keys[i] == key:
                raise InvariantViolationError(f"Root key {key} inserted twice.")
            i = (i + 1) & mask
        keys[i] = key
        self._nodes[i] = node

    def _grow(self) -> None:
        entries = list(self.items())
        self._bits += 1
        self._keys = [None] * (1 << self._bits)
        self._nodes = [None] * (1 << self._bits)
        for key, node in entries:
            self._place(key, node)

    def items(self) -> Iterator[Tuple[int, TreeNode]]:
        for key, node in zip(self._keys, self._nodes):
            if key is not None:
                yield key, node


class SparseGrid:
    """Árvore VDB mapeando ``Coord`` -> registro com background configurável.

    Mutação é de escritor único; leituras concorrentes exigem um
    ``Accessor`` por contexto. Nós nunca são podados: as estatísticas
    refletem a estrutura de pico.
    """

    def __init__(self, config: TreeConfig) -> None:
        if not isinstance(config, TreeConfig):
            raise ConfigurationError(f"Expected a TreeConfig. Received: {type(config).__name__}.")
        self.config = config
        self.background = config.background
        self.log2_dims = config.log2_dims
        self.depth = len(self.log2_dims)
        # shifts[i]: bits cobertos por um slot do nível i; totals[i]: bits do nó inteiro.
        self.shifts: Tuple[int, ...] = tuple(sum(self.log2_dims[:i]) for i in range(self.depth))
        self.totals: Tuple[int, ...] = tuple(sum(self.log2_dims[: i + 1]) for i in range(self.depth))
        self.slot_counts: Tuple[int, ...] = tuple(1 << (3 * d) for d in self.log2_dims)
        self._root = RootTable(_COORD_BITS - self.totals[-1])
        self._default_accessor: Optional[Accessor] = None

    @classmethod
    def create(cls, config: TreeConfig) -> "SparseGrid":
        """Cria uma grade vazia: só a raiz, tudo lê o background."""
        return cls(config)

    # -- endereçamento -------------------------------------------------

    def slot_index(self, level: int, ux: int, uy: int, uz: int) -> int:
        d = self.log2_dims[level]
        s = self.shifts[level]
        m = (1 << d) - 1
        return (((ux >> s) & m) << (2 * d)) | (((uy >> s) & m) << d) | ((uz >> s) & m)

    def root_key(self, ux: int, uy: int, uz: int) -> int:
        t = self.totals[-1]
        return self._root.pack_key(ux >> t, uy >> t, uz >> t)

    def new_node(self, level: int, ux: int, uy: int, uz: int, fill: Any) -> TreeNode:
        t = self.totals[level]
        return TreeNode(level, (ux >> t, uy >> t, uz >> t), self.slot_counts[level], fill)

    # -- API de alto nível ------------------------------------------------

    def accessor(self, cache: bool = True) -> "Accessor":
        """Cria um accessor novo (cache vazio) sobre esta grade."""
        return Accessor(self, cache=cache)

    def get(self, c: Coord) -> Any:
        if self._default_accessor is None:
            self._default_accessor = Accessor(self)
        return self._default_accessor.get(c)

    def set(self, c: Coord, record: Any) -> None:
        if self._default_accessor is None:
            self._default_accessor = Accessor(self)
        self._default_accessor.set(c, record)

    def is_empty(self) -> bool:
        return len(self._root) == 0

    def set_background(self, record: Any) -> None:
        """Troca o background de uma grade ainda vazia.

        Raises:
            GridStateError: Se algum voxel já foi escrito.
        """
        if not self.is_empty():
            raise GridStateError("set_background requires an empty grid (no voxel writes yet).")
        self.background = record

    def resolve_level(self, c: Coord) -> int:
        """Nível em que ``c`` se resolve: 0 = voxel de folha, ``i`` = tile do
        nível ``i``, ``depth`` = background da raiz."""
        ux, uy, uz = pack_coord(c)
        node = self._root.get(self.root_key(ux, uy, uz))
        if node is None:
            return self.depth
        while node.level > 0:
            idx = self.slot_index(node.level, ux, uy, uz)
            if not (node.child_mask >> idx) & 1:
                return node.level
            node = node.table[idx]
        return 0

    def _nodes_level_order(self) -> Iterator[TreeNode]:
        pending = deque(node for _, node in sorted(self._root.items(), key=lambda item: item[0]))
        while pending:
            node = pending.popleft()
            yield node
            if node.level > 0:
                mask = node.child_mask
                while mask:
                    low = mask & -mask
                    pending.append(node.table[low.bit_length() - 1])
                    mask ^= low

    def iter_active(self) -> Iterator[Tuple[Coord, Any]]:
        """Percorre os voxels ativos (bit em ``value_mask``) uma vez cada.

        Ordem: nós em ordem de nível a partir das entradas da raiz (ordenadas
        pela chave empacotada), filhos na ordem do índice de slot; dentro de
        cada folha, ordem crescente do índice de slot.
        """
        d = self.log2_dims[0]
        m = (1 << d) - 1
        t = self.totals[0]
        for node in self._nodes_level_order():
            if node.level != 0:
                continue
            tx, ty, tz = node.tag
            mask = node.value_mask
            while mask:
                low = mask & -mask
                idx = low.bit_length() - 1
                mask ^= low
                c = (
                    ((tx << t) | (idx >> (2 * d))) - COORD_OFFSET,
                    ((ty << t) | ((idx >> d) & m)) - COORD_OFFSET,
                    ((tz << t) | (idx & m)) - COORD_OFFSET,
                )
                yield c, node.table[idx]

    def stats(self) -> GridStats:
        counts = [0] * self.depth
        active = 0
        for node in self._nodes_level_order():
            counts[node.level] += 1
            if node.level == 0:
                active += bin(node.value_mask).count("1")
        estimated = len(self._root) * ROOT_ENTRY_BYTES
        for level, count in enumerate(counts):
            slots = self.slot_counts[level]
            if level == 0:
                per_node = NODE_HEADER_BYTES + slots * RECORD_BYTES + slots // 8
            else:
                per_node = NODE_HEADER_BYTES + slots * SLOT_BYTES + 2 * (slots // 8)
            estimated += count * per_node
        return GridStats(
            node_count=tuple(counts),
            root_entries=len(self._root),
            active_voxels=active,
            estimated_bytes=estimated,
        )

    def validate(self) -> None:
        """Confere a exclusividade filho/tile em todos os nós.

        Raises:
            InvariantViolationError: Se um bit de ``child_mask`` não
                corresponder a um filho no slot (ou vice-versa).
        """
        for node in self._nodes_level_order():
            if node.level == 0:
                if node.child_mask:
                    raise InvariantViolationError(f"Leaf {node.tag} has a non-empty child_mask.")
                continue
            for idx, payload in enumerate(node.table):
                has_bit = bool((node.child_mask >> idx) & 1)
                if has_bit != isinstance(payload, TreeNode):
                    raise InvariantViolationError(
                        f"Level {node.level} node {node.tag}: slot {idx} child bit and payload disagree."
                    )
                if has_bit and (node.value_mask >> idx) & 1:
                    raise InvariantViolationError(
                        f"Level {node.level} node {node.tag}: slot {idx} is both child and active tile."
                    )


class Accessor:
    """Cache de nós visitados recentemente, um por nível.

    Cada entrada vale apenas se o prefixo da coordenada consultada naquele
    nível bater com a etiqueta do nó; senão a busca sobe de nível até a
    raiz. O cache muda só o desempenho, nunca o resultado.

    Attributes:
        hits: Acertos de cache por nível (folha primeiro).
        root_lookups: Consultas que precisaram partir da raiz.
    """

    def __init__(self, grid: SparseGrid, cache: bool = True) -> None:
        self._grid = grid
        self._cache = cache
        self._nodes: List[Optional[TreeNode]] = [None] * grid.depth
        self._tags: List[Optional[Coord]] = [None] * grid.depth
        self.hits: List[int] = [0] * grid.depth
        self.root_lookups = 0
        # Folha em cache desmontada em inteiros para o caminho rápido.
        self._leaf: Optional[TreeNode] = None
        self._leaf_tag: Coord = (-1, -1, -1)
        self._leaf_bits = grid.totals[0]
        self._leaf_dim = grid.log2_dims[0]

    @property
    def grid(self) -> SparseGrid:
        return self._grid

    def clear(self) -> None:
        self._nodes = [None] * self._grid.depth
        self._tags = [None] * self._grid.depth
        self._leaf = None
        self._leaf_tag = (-1, -1, -1)

    def _cached(self, ux: int, uy: int, uz: int) -> Optional[TreeNode]:
        totals = self._grid.totals
        for level in range(self._grid.depth):
            node = self._nodes[level]
            if node is None:
                continue
            t = totals[level]
            if self._tags[level] == (ux >> t, uy >> t, uz >> t):
                self.hits[level] += 1
                return node
        return None

    def _remember(self, node: TreeNode) -> None:
        if self._cache:
            self._nodes[node.level] = node
            self._tags[node.level] = node.tag
            if node.level == 0:
                self._leaf = node
                self._leaf_tag = node.tag

    def _leaf_slot(self, c: Coord) -> int:
        """Slot de ``c`` na folha em cache, ou ``-1`` se ``c`` estiver fora dela.

        Uma coordenada fora do domínio nunca cai numa folha alocada, então o
        acerto dispensa a checagem de ``pack_coord``.
        """
        if self._leaf is None:
            return -1
        x, y, z = c
        ux, uy, uz = x + COORD_OFFSET, y + COORD_OFFSET, z + COORD_OFFSET
        t = self._leaf_bits
        tx, ty, tz = self._leaf_tag
        if ux >> t != tx or uy >> t != ty or uz >> t != tz:
            return -1
        d = self._leaf_dim
        m = (1 << d) - 1
        return ((ux & m) << (2 * d)) | ((uy & m) << d) | (uz & m)

    def get(self, c: Coord) -> Any:
        """Lê o registro em ``c`` (voxel, tile ou background). Nunca aloca.

        Raises:
            DomainError: Se ``c`` estiver fora do domínio empacotável.
        """
        idx = self._leaf_slot(c)
        if idx >= 0:
            self.hits[0] += 1
            return self._leaf.table[idx]
        ux, uy, uz = pack_coord(c)
        grid = self._grid
        node = self._cached(ux, uy, uz) if self._cache else None
        if node is None:
            self.root_lookups += 1
            node = grid._root.get(grid.root_key(ux, uy, uz))
            if node is None:
                return grid.background
        while True:
            self._remember(node)
            idx = grid.slot_index(node.level, ux, uy, uz)
            if node.level == 0 or not (node.child_mask >> idx) & 1:
                return node.table[idx]
            node = node.table[idx]

    def set(self, c: Coord, record: Any) -> None:
        """Escreve ``record`` em ``c``, alocando os nós do caminho.

        Um slot coberto por tile é densificado: o filho nasce preenchido com
        o valor do tile, então o resto da região continua lendo o valor antigo.

        Raises:
            DomainError: Se ``c`` estiver fora do domínio empacotável.
        """
        idx = self._leaf_slot(c)
        if idx >= 0:
            self.hits[0] += 1
            leaf = self._leaf
            leaf.table[idx] = record
            leaf.value_mask |= 1 << idx
            return
        ux, uy, uz = pack_coord(c)
        grid = self._grid
        node = self._cached(ux, uy, uz) if self._cache else None
        if node is None:
            self.root_lookups += 1
            key = grid.root_key(ux, uy, uz)
            node = grid._root.get(key)
            if node is None:
                node = grid.new_node(grid.depth - 1, ux, uy, uz, grid.background)
                grid._root.insert(key, node)
                logger.debug("allocated top node %s", node.tag)
        while True:
            self._remember(node)
            idx = grid.slot_index(node.level, ux, uy, uz)
            if node.level == 0:
                node.table[idx] = record
                node.value_mask |= 1 << idx
                return
            if (node.child_mask >> idx) & 1:
                node = node.table[idx]
                continue
            child = grid.new_node(node.level - 1, ux, uy, uz, node.table[idx])
            node.table[idx] = child
            node.child_mask |= 1 << idx
            node.value_mask &= ~(1 << idx)
            node = child
