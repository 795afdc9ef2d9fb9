"""Constant-rate flash code (binary phases).

The first n-k cells form the index group, cut into blocks of s_idx cells; the
last k cells form the parity group. Writing runs in q-1 phases. In phase p
each bit flip appends ``i + 1`` in binary, on levels p-1 and p, to the next
unused index block. When the blocks of a phase are used up, the bits are
copied into the parity group (cell j := p-1 + v_j), every index cell is
raised to p, and the pending flip opens phase p+1.

Index blocks hold ``i + 1`` rather than ``i`` so that a used block always has
a cell at the phase level; this needs ceil(log2(k+1)) cells per block.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    ERASE,
    CellVector,
    ContractError,
    CorruptStateError,
    UnsupportedError,
    ceil_log,
    check_q,
    format_cells,
    parse_cells,
    parse_header,
)


@dataclass(frozen=True)
class ConstRateConfig:
    n: int
    k: int
    q: int
    alphabet: int = 2

    def __post_init__(self):
        check_q(self.q)
        if self.alphabet != 2:
            raise UnsupportedError(
                f"only the binary-phase scheme is provided, not alphabet {self.alphabet}"
            )
        if self.k < 1 or self.n <= self.k:
            raise ContractError("constant-rate code needs 1 <= k < n")
        if self.m < 1:
            raise ContractError(
                f"index group of {self.n - self.k} cells holds no block of {self.s_idx} cells"
            )

    @property
    def s_idx(self) -> int:
        return ceil_log(2, self.k + 1)

    @property
    def m(self) -> int:
        return (self.n - self.k) // self.s_idx

    @property
    def index_size(self) -> int:
        return self.n - self.k

    def initial(self) -> CellVector:
        return CellVector.zeros(self.n, self.q)


def _check(cfg: ConstRateConfig, x: CellVector):
    if len(x) != cfg.n or x.q != cfg.q:
        raise ContractError("cell vector does not match configuration")


def _phase(cfg: ConstRateConfig, x: CellVector) -> int:
    return max(1, max(x.levels[: cfg.index_size]))


def _used_blocks(cfg: ConstRateConfig, x: CellVector, p: int):
    """Bit indices recorded in phase ``p``, in write order."""
    s = cfg.s_idx
    recorded = []
    finished = False
    for b in range(cfg.m):
        cells = x.levels[b * s:(b + 1) * s]
        value = 0
        for lv in cells:
            if lv not in (p - 1, p):
                raise CorruptStateError(f"index cell level {lv} outside phase {p}")
            value = 2 * value + (lv - (p - 1))
        if value == 0:
            finished = True
            continue
        if finished or value > cfg.k:
            raise CorruptStateError(f"index block {b} holds invalid value {value}")
        recorded.append(value - 1)
    return recorded


def _base_bits(cfg: ConstRateConfig, x: CellVector, p: int):
    if p == 1:
        return [0] * cfg.k
    bits = []
    for lv in x.levels[cfg.index_size:]:
        bit = lv - (p - 2)
        if bit not in (0, 1):
            raise CorruptStateError(f"parity cell level {lv} does not fit phase {p}")
        bits.append(bit)
    return bits


def cr_decode(cfg: ConstRateConfig, x: CellVector):
    _check(cfg, x)
    p = _phase(cfg, x)
    v = _base_bits(cfg, x, p)
    for i in _used_blocks(cfg, x, p):
        v[i] ^= 1
    return tuple(v)


def _record(cfg: ConstRateConfig, levels, slot: int, p: int, i: int):
    s = cfg.s_idx
    value = i + 1
    for pos in range(slot * s + s - 1, slot * s - 1, -1):
        levels[pos] = (p - 1) + value % 2
        value //= 2


def cr_encode(cfg: ConstRateConfig, x: CellVector, i: int):
    _check(cfg, x)
    if not 0 <= i < cfg.k:
        raise ContractError(f"bit index {i} outside [0, {cfg.k - 1}]")
    p = _phase(cfg, x)
    used = len(_used_blocks(cfg, x, p))
    levels = list(x.levels)
    if used < cfg.m:
        _record(cfg, levels, used, p, i)
        return x.with_levels(levels)
    if p + 1 > cfg.q - 1:
        return ERASE
    v = cr_decode(cfg, x)
    for j in range(cfg.k):
        pos = cfg.index_size + j
        new = (p - 1) + v[j]
        if new < levels[pos]:
            raise ContractError("parity snapshot would lower a cell level")
        levels[pos] = new
    for pos in range(cfg.index_size):
        levels[pos] = p
    _record(cfg, levels, 0, p + 1, i)
    return x.with_levels(levels)


def guaranteed_writes_constrate(cfg: ConstRateConfig) -> int:
    return cfg.m * (cfg.q - 1)


def format_state(cfg: ConstRateConfig, x: CellVector) -> str:
    index = CellVector(cfg.q, x.levels[: cfg.index_size])
    parity = CellVector(cfg.q, x.levels[cfg.index_size:])
    return "\n".join([
        f"scheme=constrate n={cfg.n} k={cfg.k} q={cfg.q}",
        format_cells(index),
        format_cells(parity),
    ])


def parse_state(text: str):
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if len(lines) != 3:
        raise ValueError("constrate state needs a header and two cell lines")
    head = parse_header(lines[0])
    if head.get("scheme") != "constrate":
        raise ValueError(f"not a constrate state header: {lines[0]!r}")
    cfg = ConstRateConfig(int(head["n"]), int(head["k"]), int(head["q"]))
    index, parity = parse_cells(lines[1]), parse_cells(lines[2])
    x = CellVector(cfg.q, index.levels + parity.levels)
    _check(cfg, x)
    return cfg, x
