"""Multi-stage flash code built on the index-less code.

Stage 0 is the index-less code on blocks of k cells. When it runs out, the
parity region is re-cut into blocks of half the size and a batch of index
blocks records which bit each surviving block holds. Every further stage
halves the blocks again and uses the next index batch, for s = ceil(log2 k)
stages in total.

Two index layouts are provided:

``per-stage``
    every batch has its own cells; an index value is written in base q.
``stacked``
    batches share cells; an index value is written in binary on one pair of
    adjacent levels, and up to q-1 batches are stacked in the same cells.

The state is self-describing: the current stage is the highest batch with a
cell above that batch's base level.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

from .core import (
    ERASE,
    CellVector,
    ContractError,
    CorruptStateError,
    check_q,
    ceil_log,
    format_levels,
    parse_header,
    parse_levels_line,
)
from .indexless import IndexlessConfig, decode0, encode0

PER_STAGE = "per-stage"
STACKED = "stacked"
VARIANTS = (PER_STAGE, STACKED)


@dataclass(frozen=True)
class StagedConfig:
    """``n`` is the size of the parity region; index cells come on top of it."""

    n: int
    k: int
    q: int
    variant: str = PER_STAGE

    def __post_init__(self):
        check_q(self.q)
        if self.variant not in VARIANTS:
            raise ContractError(f"unknown variant {self.variant!r}; expected one of {VARIANTS}")
        if self.k < 1:
            raise ContractError("k must be positive")
        if self.n < self.min_n:
            raise ContractError(
                f"parity region of {self.n} cells is too small for k={self.k}; "
                f"minimum n is {self.min_n}"
            )

    @property
    def kb(self) -> int:
        """Bits the blocks are laid out for: k rounded up to a power of two, at least 2."""
        return max(2, 1 << ceil_log(2, self.k))

    @property
    def s(self) -> int:
        return ceil_log(2, self.kb)

    @property
    def min_n(self) -> int:
        return self.kb * self.kb

    @property
    def m(self) -> int:
        return self.n // self.kb

    @property
    def batches(self) -> int:
        return self.s - 1

    @property
    def blocks_per_batch(self) -> int:
        return 2 * (self.kb - 1)

    @property
    def radix(self) -> int:
        return self.q if self.variant == PER_STAGE else 2

    @property
    def mu(self) -> int:
        """Cells per index block."""
        return ceil_log(self.radix, self.kb + 2)

    @property
    def groups(self) -> int:
        if self.variant == PER_STAGE:
            return self.batches
        return -(-self.batches // (self.q - 1))

    @property
    def index_cells(self) -> int:
        return self.groups * self.blocks_per_batch * self.mu

    @property
    def total_cells(self) -> int:
        return self.n + self.index_cells

    @property
    def u_full(self) -> int:
        return self.radix ** self.mu - 1

    def batch_layout(self, b: int):
        """``(offset, base)`` of batch ``b`` (1-based) inside the index region."""
        if not 1 <= b <= self.batches:
            raise ContractError(f"no index batch {b}")
        span = self.blocks_per_batch * self.mu
        if self.variant == PER_STAGE:
            return (b - 1) * span, 0
        group, layer = divmod(b - 1, self.q - 1)
        return group * span, layer

    def indexless(self) -> IndexlessConfig:
        return IndexlessConfig(self.n, self.kb, self.q)

    def initial(self) -> "StagedState":
        return StagedState(self.q, (0,) * self.n, (0,) * self.index_cells)


@dataclass(frozen=True)
class StagedState:
    q: int
    parity: Tuple[int, ...]
    index: Tuple[int, ...]

    def __post_init__(self):
        check_q(self.q)
        object.__setattr__(self, "parity", tuple(self.parity))
        object.__setattr__(self, "index", tuple(self.index))
        top = self.q - 1
        for lv in self.parity + self.index:
            if not 0 <= lv <= top:
                raise ContractError(f"level {lv} outside [0, {top}]")

    @property
    def cells(self) -> Tuple[int, ...]:
        return self.parity + self.index


def _check_state(cfg: StagedConfig, state: StagedState):
    if (state.q != cfg.q or len(state.parity) != cfg.n
            or len(state.index) != cfg.index_cells):
        raise ContractError("state does not match configuration")


# index blocks

def _read_u(cfg: StagedConfig, index, b: int, slot: int) -> int:
    offset, base = cfg.batch_layout(b)
    start = offset + slot * cfg.mu
    u = 0
    for lv in index[start:start + cfg.mu]:
        digit = lv - base
        if not 0 <= digit < cfg.radix:
            raise CorruptStateError(f"index cell level {lv} outside batch {b} layer")
        u = u * cfg.radix + digit
    return u


def _write_u(cfg: StagedConfig, index: List[int], b: int, slot: int, u: int):
    offset, base = cfg.batch_layout(b)
    start = offset + slot * cfg.mu
    for pos in range(start + cfg.mu - 1, start - 1, -1):
        lv = base + u % cfg.radix
        u //= cfg.radix
        if lv < index[pos]:
            raise ContractError("index update would lower a cell level")
        index[pos] = lv


def current_stage(cfg: StagedConfig, state: StagedState) -> int:
    span = cfg.blocks_per_batch * cfg.mu
    for b in range(cfg.batches, 0, -1):
        offset, base = cfg.batch_layout(b)
        if any(lv > base for lv in state.index[offset:offset + span]):
            return b
    return 0


# parity blocks

def _block_bounds(cfg: StagedConfig, r: int):
    size = cfg.kb >> r
    return [(j * size, (j + 1) * size) for j in range(cfg.m << r)]


def _is_full(levels, q) -> bool:
    return all(lv == q - 1 for lv in levels)


def _increment(parity: List[int], lo: int, hi: int, q: int):
    for pos in range(lo, hi):
        if parity[pos] < q - 1:
            parity[pos] += 1
            return
    raise ContractError("increment on a full block")


def _live_pairs(cfg: StagedConfig, state: StagedState, r: int):
    """Walk live parity blocks and live index blocks of batch ``r`` in lockstep.

    Yields ``(lo, hi, slot, u)`` for each pair.
    """
    q = cfg.q
    slot = 0
    for lo, hi in _block_bounds(cfg, r):
        if _is_full(state.parity[lo:hi], q):
            continue
        while slot < cfg.blocks_per_batch and _read_u(cfg, state.index, r, slot) == cfg.u_full:
            slot += 1
        if slot == cfg.blocks_per_batch:
            raise CorruptStateError(f"stage {r} has more live parity blocks than index blocks")
        yield lo, hi, slot, _read_u(cfg, state.index, r, slot)
        slot += 1


def decode_r(cfg: StagedConfig, state: StagedState, r: int):
    v = [0] * cfg.kb
    for lo, hi, _, u in _live_pairs(cfg, state, r):
        if u == 0:
            continue
        if u > cfg.kb:
            raise CorruptStateError(f"index value {u} names no bit")
        v[u - 1] = sum(state.parity[lo:hi]) % 2
    return tuple(v)


def _decode_padded(cfg: StagedConfig, state: StagedState):
    r = current_stage(cfg, state)
    if r == 0:
        return decode0(cfg.indexless(), CellVector(cfg.q, state.parity))
    return decode_r(cfg, state, r)


def decode(cfg: StagedConfig, state: StagedState):
    _check_state(cfg, state)
    return _decode_padded(cfg, state)[: cfg.k]


def encode_r(cfg: StagedConfig, state: StagedState, r: int, i: int):
    q = cfg.q
    pairs = list(_live_pairs(cfg, state, r))
    for lo, hi, slot, u in pairs:
        if u == i + 1:
            parity, index = list(state.parity), list(state.index)
            _increment(parity, lo, hi, q)
            if _is_full(parity[lo:hi], q):
                _write_u(cfg, index, r, slot, cfg.u_full)
            return StagedState(q, parity, index)
    for lo, hi, slot, u in pairs:
        if u == 0:
            # no live block holds bit i, so it reads 0 and must become 1
            parity, index = list(state.parity), list(state.index)
            _write_u(cfg, index, r, slot, i + 1)
            if sum(parity[lo:hi]) % 2 != 1:
                _increment(parity, lo, hi, q)
            if _is_full(parity[lo:hi], q):
                _write_u(cfg, index, r, slot, cfg.u_full)
            return StagedState(q, parity, index)
    return ERASE


def transition(cfg: StagedConfig, state: StagedState, r: int, v):
    """Move to stage ``r`` recording the information vector ``v`` (length kb)."""
    if not 1 <= r <= cfg.batches:
        raise ContractError(f"no transition into stage {r}")
    q = cfg.q
    parity, index = list(state.parity), list(state.index)
    if cfg.variant == STACKED and r >= 2:
        offset, base = cfg.batch_layout(r - 1)
        span = cfg.blocks_per_batch * cfg.mu
        for pos in range(offset, offset + span):
            index[pos] = max(index[pos], base + 1)

    live = [(lo, hi) for lo, hi in _block_bounds(cfg, r) if not _is_full(parity[lo:hi], q)]
    kb = cfg.kb
    if len(live) < kb:
        return ERASE
    if len(live) > cfg.blocks_per_batch:
        raise CorruptStateError(f"{len(live)} live blocks cannot fit batch {r}")

    for slot in range(cfg.blocks_per_batch):
        if slot < kb:
            u = slot + 1
        elif slot < len(live):
            u = 0
        else:
            u = cfg.u_full
        _write_u(cfg, index, r, slot, u)
    for slot in range(kb):
        lo, hi = live[slot]
        if sum(parity[lo:hi]) % 2 != v[slot]:
            _increment(parity, lo, hi, q)
            if _is_full(parity[lo:hi], q):
                _write_u(cfg, index, r, slot, cfg.u_full)
    return StagedState(q, parity, index)


def staged_encode(cfg: StagedConfig, state: StagedState, i: int):
    """Flip bit ``i``; run stage transitions as part of the write when needed."""
    _check_state(cfg, state)
    if not 0 <= i < cfg.k:
        raise ContractError(f"bit index {i} outside [0, {cfg.k - 1}]")
    r = current_stage(cfg, state)
    if r == 0:
        out = encode0(cfg.indexless(), CellVector(cfg.q, state.parity), i)
        if out is not ERASE:
            return StagedState(cfg.q, out.levels, state.index)
    else:
        out = encode_r(cfg, state, r, i)
    while out is ERASE and r < cfg.batches:
        v = _decode_padded(cfg, state)
        state = transition(cfg, state, r + 1, v)
        if state is ERASE:
            return ERASE
        r += 1
        out = encode_r(cfg, state, r, i)
    return out


def format_state(cfg: StagedConfig, state: StagedState) -> str:
    return "\n".join([
        f"scheme=staged variant={cfg.variant} n={cfg.n} k={cfg.k} q={cfg.q}",
        f"q={state.q} cells={format_levels(state.parity)}",
        f"q={state.q} cells={format_levels(state.index)}",
    ])


def parse_state(text: str):
    """Inverse of :func:`format_state`; returns ``(cfg, state)``."""
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if len(lines) != 3:
        raise ValueError("staged state needs a header and two cell lines")
    head = parse_header(lines[0])
    if head.get("scheme") != "staged":
        raise ValueError(f"not a staged state header: {lines[0]!r}")
    cfg = StagedConfig(int(head["n"]), int(head["k"]), int(head["q"]), head["variant"])
    q1, parity = parse_levels_line(lines[1])
    q2, index = parse_levels_line(lines[2])
    if q1 != cfg.q or q2 != cfg.q:
        raise ValueError("cell lines disagree with header q")
    state = StagedState(cfg.q, parity, index)
    _check_state(cfg, state)
    return cfg, state


# deficiency bounds

def _s(k: int) -> int:
    return ceil_log(2, k) if k >= 1 else 0


def per_stage_index_waste(k: int, q: int) -> int:
    """Cell levels held by per-stage index blocks."""
    s1 = max(_s(k) - 1, 0)
    return 2 * (q - 1) * (k - 1) * s1 * ceil_log(q, k + 2)


def stacked_index_waste(k: int, q: int) -> int:
    """Cell levels held by stacked binary index blocks."""
    s1 = max(_s(k) - 1, 0)
    return 2 * (q - 1) * (k - 1) * (-(-s1 // (q - 1))) * ceil_log(2, k + 2)


def _non_index_waste(k: int, q: int) -> int:
    # partition leftovers, unfinished final blocks and one level per
    # parity fix-up in each transition
    s1 = max(_s(k) - 1, 0)
    return 3 * (q - 1) * (k - 1) + k * s1


def bound_th2(n: int, k: int, q: int) -> int:
    """Deficiency bound of the per-stage code.

    (q-1)(k-1)(2(s-1)ceil(log_q(k+2)) + 3) + k(s-1), s = ceil(log2 k).
    Independent of n. For k = 1, s-1 is taken as 0.
    """
    return per_stage_index_waste(k, q) + _non_index_waste(k, q)


def bound_main(n: int, k: int, q: int) -> int:
    """Deficiency bound of the stacked code.

    The stacked index waste 2(q-1)(k-1)ceil((s-1)/(q-1))ceil(log2(k+2)) plus
    the same non-index terms as :func:`bound_th2`.
    """
    return stacked_index_waste(k, q) + _non_index_waste(k, q)
