"""Index-less indexed flash code.

Memory is cut into blocks of k cells, one bit per block. The bit value is the
block parity; which bit a block holds is encoded in the cyclic order in which
its cells are filled, starting from the cell whose position equals the bit
index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

from .core import ERASE, CellVector, ContractError, CorruptStateError, check_q

Block = Tuple[int, ...]

FULL, EMPTY, ACTIVE = "full", "empty", "active"


def block_status(b: Sequence[int], q: int) -> str:
    top = q - 1
    if all(lv == top for lv in b):
        return FULL
    if all(lv == 0 for lv in b):
        return EMPTY
    return ACTIVE


def _zero_run(b: Sequence[int]):
    """Start and length of the single cyclic run of zeros, or None if no zeros."""
    k = len(b)
    zeros = sum(1 for lv in b if lv == 0)
    if zeros == 0:
        return None
    starts = [j for j in range(k) if b[j] == 0 and b[j - 1] != 0]
    if len(starts) != 1:
        raise CorruptStateError(f"zeros of block {tuple(b)} are not one cyclic run")
    return starts[0], zeros


def _unique_partial(b: Sequence[int], q: int) -> int:
    partial = [j for j, lv in enumerate(b) if lv < q - 1]
    if len(partial) != 1:
        raise CorruptStateError(f"block {tuple(b)} has no unique partial cell")
    return partial[0]


def read_index(b: Sequence[int], q: int) -> int:
    """Bit index held by an active block."""
    if block_status(b, q) != ACTIVE:
        raise ContractError(f"read_index needs an active block, got {tuple(b)}")
    k = len(b)
    run = _zero_run(b)
    if run is None:
        return (_unique_partial(b, q) + 1) % k
    j, length = run
    return (j + length) % k


def block_write(b: Sequence[int], q: int) -> Block:
    """Advance an active block by one level along its cell-writing order."""
    status = block_status(b, q)
    if status != ACTIVE:
        raise ContractError(f"block_write needs an active block, got {status}")
    y = list(b)
    run = _zero_run(y)
    if run is None:
        y[_unique_partial(y, q)] += 1
        return tuple(y)
    j, _ = run
    prev = (j - 1) % len(y)
    if y[prev] < q - 1:
        y[prev] += 1
    else:
        y[j] = 1
    return tuple(y)


def block_write_new(i: int, b: Sequence[int], q: int) -> Block:
    if block_status(b, q) != EMPTY:
        raise ContractError("block_write_new needs an empty block")
    if not 0 <= i < len(b):
        raise ContractError(f"bit index {i} outside block of {len(b)} cells")
    y = list(b)
    y[i] = 1
    return tuple(y)


@dataclass(frozen=True)
class IndexlessConfig:
    """``k`` public bits on ``n`` cells.

    When k is odd and q even, blocks are built for k+1 bits with the extra bit
    never written, so that a full block still has parity zero.
    """

    n: int
    k: int
    q: int

    def __post_init__(self):
        check_q(self.q)
        if self.k < 1:
            raise ContractError("k must be positive")
        if self.m < self.block_size:
            raise ContractError(
                f"need at least {self.block_size} blocks of {self.block_size} cells, "
                f"n={self.n} gives {self.m}; minimum n is {self.min_n}"
            )

    @property
    def block_size(self) -> int:
        if self.k % 2 == 1 and self.q % 2 == 0:
            return self.k + 1
        return self.k

    @property
    def m(self) -> int:
        return self.n // self.block_size

    @property
    def min_n(self) -> int:
        return self.block_size * self.block_size

    def initial(self) -> CellVector:
        return CellVector.zeros(self.n, self.q)

    def blocks(self, x: CellVector):
        s = self.block_size
        return [x.levels[j * s:(j + 1) * s] for j in range(self.m)]


def _check_shape(cfg: IndexlessConfig, x: CellVector):
    if len(x) != cfg.n or x.q != cfg.q:
        raise ContractError("cell vector does not match configuration")


def decode0(cfg: IndexlessConfig, x: CellVector):
    _check_shape(cfg, x)
    v = [0] * cfg.block_size
    seen = set()
    for b in cfg.blocks(x):
        if block_status(b, cfg.q) != ACTIVE:
            continue
        i = read_index(b, cfg.q)
        if i in seen:
            raise CorruptStateError(f"two active blocks hold bit {i}")
        seen.add(i)
        v[i] = sum(b) % 2
    return tuple(v[: cfg.k])


def encode0(cfg: IndexlessConfig, x: CellVector, i: int):
    _check_shape(cfg, x)
    if not 0 <= i < cfg.k:
        raise ContractError(f"bit index {i} outside [0, {cfg.k - 1}]")
    s, q = cfg.block_size, cfg.q
    blocks = cfg.blocks(x)
    for j, b in enumerate(blocks):
        if block_status(b, q) == ACTIVE and read_index(b, q) == i:
            return _put(x, j * s, block_write(b, q))
    for j, b in enumerate(blocks):
        if block_status(b, q) == EMPTY:
            return _put(x, j * s, block_write_new(i, b, q))
    return ERASE


def _put(x: CellVector, offset: int, block: Block) -> CellVector:
    levels = list(x.levels)
    levels[offset:offset + len(block)] = block
    return x.with_levels(levels)


def aux_deficiency_bound(k: int, q: int) -> int:
    return (k - 1) * ((k + 1) * (q - 1) - 1)
