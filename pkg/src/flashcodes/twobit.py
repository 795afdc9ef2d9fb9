"""Two-bit flash code.

Bit 1 grows cells from the left end, bit 2 from the right end. Once a single
non-full cell is left, that cell stores both bits in its residue mod 4:
residues 0, 1, 2, 3 mean (v1, v2) = (0,0), (1,0), (0,1), (1,1).

For even q the full cells carry odd levels, so the bits are read as parities
of the cell prefix/suffix instead, and the last cell is kept below q-1 so the
single-cell phase stays recognisable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .core import ERASE, CellVector, ContractError, UnsupportedError, check_q


@dataclass(frozen=True)
class TwoBitConfig:
    n: int
    q: int

    def __post_init__(self):
        check_q(self.q)
        if self.n < 1:
            raise ContractError("two-bit code needs n >= 1")
        if self.q < 3:
            raise ContractError("two-bit code needs q >= 3")

    @property
    def q_odd(self) -> bool:
        return self.q % 2 == 1

    def initial(self) -> CellVector:
        return CellVector.zeros(self.n, self.q)


def frontier_left(x: CellVector) -> Optional[int]:
    top = x.q - 1
    for i, lv in enumerate(x.levels):
        if lv < top:
            return i
    return None


def frontier_right(x: CellVector) -> Optional[int]:
    top = x.q - 1
    for i in range(len(x) - 1, -1, -1):
        if x.levels[i] < top:
            return i
    return None


def _residue_bits(y: int):
    return y % 2, (y % 4) // 2


def decode_two_bit(cfg: TwoBitConfig, x: CellVector):
    i1, i2 = frontier_left(x), frontier_right(x)
    n = len(x)
    if cfg.q_odd:
        if i1 is None:
            return _residue_bits(cfg.q - 1)
        if i1 == i2:
            return _residue_bits(x[i1])
        return x[i1] % 2, x[i2] % 2
    if i1 is None:
        # unreachable for even q; the encoder never fills the last cell
        return sum(x.levels) % 2, sum(x.levels) % 2
    if i1 == i2:
        y = x[i1]
        return (i1 + y) % 2, ((n - 1 - i1) + (y % 4) // 2) % 2
    return sum(x.levels[: i1 + 1]) % 2, sum(x.levels[i2:]) % 2


def _single_cell_target(cfg: TwoBitConfig, pos: int, v1: int, v2: int) -> int:
    """Residue mod 4 the surviving cell at ``pos`` must have to read (v1, v2)."""
    if cfg.q_odd:
        return v1 + 2 * v2
    n = cfg.n
    return (v1 - pos) % 2 + 2 * ((v2 - (n - 1 - pos)) % 2)


def encode_two_bit(cfg: TwoBitConfig, x: CellVector, j: int):
    """Record a flip of bit ``j`` (1 or 2); return the new state or ERASE."""
    if j not in (1, 2):
        raise ContractError(f"two-bit code writes bit 1 or 2, got {j}")
    i1, i2 = frontier_left(x), frontier_right(x)
    if i1 is None:
        return ERASE
    top = cfg.q - 1
    # the last cell may reach q-1 only when q is odd
    ceiling = top if cfg.q_odd else top - 1
    v = list(decode_two_bit(cfg, x))
    v[j - 1] ^= 1

    if i1 == i2:
        y = x[i1]
        step = (_single_cell_target(cfg, i1, *v) - y) % 4
        if y + step > ceiling:
            return ERASE
        return x.replace({i1: y + step})

    pos = i1 if j == 1 else i2
    y = x.replace({pos: x[pos] + 1})
    if y[pos] == top and i2 - i1 == 1:
        # entering the single-cell phase: align the survivor's residue
        other = i2 if j == 1 else i1
        lv = y[other]
        step = (_single_cell_target(cfg, other, *v) - lv) % 4
        if lv + step > ceiling:
            return ERASE
        y = y.replace({other: lv + step})
    return y


def guaranteed_writes_two_bit(n: int, q: int) -> int:
    if q % 2 == 0:
        raise UnsupportedError("no closed-form write guarantee for even q")
    return (n - 1) * (q - 1) + (q - 1) // 2
