"""Buffer codes: the multi-cell binary construction and single-cell bounds.

The multi-cell code keeps the last r bits in a window of r cells that slides
one cell to the right per write. Levels are used layer by layer; within the
layer (m-1, m) a cell at m-1 stores 0 and a cell at m stores 1. On a layer
change the window wraps around: its newest part lives right after the first
r cells on the new layer while its oldest part is still read from the last
cells on the previous layer.

Comments give cell positions 1-based; the code indexes from 0.

Level bases: the current layer is read relative to m-1 and the previous
layer relative to max(m-2, 0), where m is the highest level in use. Writing
a 0 raises the first cell at level m-1 to m, so exactly one cell joins the
top level per write.

The oldest window cell is released before the new bit is written; with
n = 2r both steps can touch the same cell.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import ERASE, CellVector, ContractError, CorruptStateError, check_q, floor_log


@dataclass(frozen=True)
class BufferConfig:
    n: int
    q: int
    r: int
    l: int = 2

    def __post_init__(self):
        check_q(self.q)
        if self.l != 2:
            raise ContractError("the multi-cell buffer code is binary (l = 2)")
        if self.r < 1:
            raise ContractError("buffer length r must be positive")
        if self.n < 2 * self.r:
            raise ContractError(f"multi-cell buffer code needs n >= 2r, got n={self.n}, r={self.r}")

    def initial(self) -> CellVector:
        return CellVector.zeros(self.n, self.q)


def _check(cfg: BufferConfig, x: CellVector):
    if len(x) != cfg.n or x.q != cfg.q:
        raise ContractError("cell vector does not match configuration")


def buf_decode(cfg: BufferConfig, x: CellVector):
    """Window newest-first: ``result[0]`` is the last symbol written."""
    _check(cfg, x)
    n, r = cfg.n, cfg.r
    lv = x.levels
    m = max(lv)
    if m == 0:
        return (0,) * r
    n_m = sum(1 for v in lv if v == m)
    out = []
    for i in range(1, r + 1):
        if i <= n_m:
            sym = lv[r + n_m - i] - (m - 1)
        else:
            sym = lv[n + n_m - i] - max(m - 2, 0)
        if sym not in (0, 1):
            raise CorruptStateError(f"window symbol {i} decodes to {sym}")
        out.append(sym)
    return tuple(out)


def buf_encode(cfg: BufferConfig, x: CellVector, b: int):
    if b not in (0, 1):
        raise ContractError(f"buffer symbols are 0 or 1, got {b}")
    _check(cfg, x)
    n, r = cfg.n, cfg.r
    y = list(x.levels)
    m = max(y)
    n_m = sum(1 for v in y if v == m)

    if m == 0:
        # first write: cell r+1 for a 1, cell 1 for a 0
        y[r if b else 0] = 1
        return x.with_levels(y)

    if n_m == n - r:
        # layer full: cells 1..n-r+1 up to m, then open layer m+1
        if m + 1 > cfg.q - 1:
            return ERASE
        for i in range(n - r + 1):
            y[i] = max(y[i], m)
        y[r if b else 0] = m + 1
        return x.with_levels(y)

    if n_m <= r - 1:
        # cell n-r+1+n_m leaves the window; park it at the layer floor
        pos = n - r + n_m
        y[pos] = max(y[pos], m - 1)
    y[r + n_m] += b
    if b == 0:
        for i in range(n_m + r):
            if y[i] == m - 1:
                y[i] = m
                break
        else:
            raise CorruptStateError("no cell at the layer floor to absorb a 0")
    return x.with_levels(y)


def guaranteed_writes_buffer(n: int, q: int, r: int) -> int:
    return (q - 1) * (n - r)


def baseline_writes(n: int, q: int, r: int) -> int:
    """Writes guaranteed by the copy-on-layer-change construction."""
    return (q - 1) * (n - 2 * r + 1) + r - 1


def euler_phi(n: int) -> int:
    if n < 1:
        raise ContractError("phi is defined for n >= 1")
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def cycle_count(l: int, r: int) -> int:
    """Number of necklaces of length r over l symbols.

    These are the rotation orbits of l-ary strings of length r, equivalently
    the disjoint vertex cycles the de Bruijn graph splits into.
    """
    if l < 1 or r < 1:
        raise ContractError("cycle_count needs l >= 1 and r >= 1")
    total = sum(euler_phi(r // d) * l ** d for d in range(1, r + 1) if r % d == 0)
    if total % r:
        raise ArithmeticError(f"necklace sum {total} not divisible by {r}")
    return total // r


def bound_single_cell_new(q: int, l: int, r: int) -> int:
    """Upper bound on writes of a single-cell buffer code, for q >= l**r."""
    if q < l ** r:
        raise ContractError(f"bound needs q >= l^r = {l ** r}")
    return (q - l ** r) // cycle_count(l, r) + r


def bound_single_cell_old(q: int, l: int, r: int) -> int:
    span = l ** r - 1
    if span < 1:
        raise ContractError("bound needs l^r >= 2")
    return (q - 1) // span * r + floor_log(l, (q - 1) % span + 1)


def prior_single_cell_writes(q: int, r: int) -> int:
    """Writes guaranteed by the earlier binary single-cell construction."""
    if r < 1:
        raise ContractError("r must be positive")
    return q // 2 ** (r - 1) + r - 2


def window_string(window_newest_first) -> str:
    """Oldest-first comma list, the display order of trace lines."""
    return ",".join(str(v) for v in reversed(window_newest_first))


def trace_line(w: int, b, x: CellVector, window_newest_first) -> str:
    cells = ",".join(str(v) for v in x.levels)
    bit = "-" if b is None else str(b)
    return f"w={w} b={bit} cells={cells} buffer={window_string(window_newest_first)}"

