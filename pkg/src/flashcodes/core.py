"""Cell-state vectors and the arithmetic shared by every construction."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Tuple

MAX_Q = 1 << 16

InfoVector = Tuple[int, ...]


class ContractError(ValueError):
    """An operation was called outside its precondition."""


class CorruptStateError(ValueError):
    """A cell state cannot have been produced by the encoder that reads it."""


class UnsupportedError(ValueError):
    """A formula or variant the library deliberately does not provide."""


class Erase:
    """Marker returned by an encoder when a block erasure is required."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ERASE"

    def __reduce__(self):
        return (Erase, ())


ERASE = Erase()


def is_erase(outcome) -> bool:
    return outcome is ERASE


def check_q(q: int) -> None:
    if not 2 <= q <= MAX_Q:
        raise ContractError(f"q must be in [2, {MAX_Q}], got {q}")


@dataclass(frozen=True)
class CellVector:
    """n cell levels, each in [0, q-1]."""

    q: int
    levels: Tuple[int, ...]

    def __post_init__(self):
        check_q(self.q)
        levels = tuple(self.levels)
        object.__setattr__(self, "levels", levels)
        if not levels:
            raise ContractError("a cell vector needs at least one cell")
        top = self.q - 1
        for lv in levels:
            if not 0 <= lv <= top:
                raise ContractError(f"level {lv} outside [0, {top}]")

    @classmethod
    def zeros(cls, n: int, q: int) -> "CellVector":
        return cls(q, (0,) * n)

    def __len__(self):
        return len(self.levels)

    def __iter__(self):
        return iter(self.levels)

    def __getitem__(self, i):
        return self.levels[i]

    def replace(self, updates: dict) -> "CellVector":
        """Return a copy with ``{index: level}`` applied."""
        levels = list(self.levels)
        for i, lv in updates.items():
            levels[i] = lv
        return CellVector(self.q, tuple(levels))

    def with_levels(self, levels: Iterable[int]) -> "CellVector":
        return CellVector(self.q, tuple(levels))

    def __str__(self):
        return format_cells(self)


def weight(x: Iterable[int]) -> int:
    return sum(x)


def parity(x: Iterable[int]) -> int:
    return weight(x) % 2


def is_monotone_step(x: CellVector, y: CellVector) -> bool:
    """True iff no level of ``y`` is below the matching level of ``x``."""
    if len(x) != len(y) or x.q != y.q:
        raise ContractError("monotonicity needs vectors of equal length and q")
    return all(b >= a for a, b in zip(x.levels, y.levels))


def count_at_level(x: Iterable[int], level: int) -> int:
    return sum(1 for lv in x if lv == level)


def format_levels(levels: Iterable[int]) -> str:
    return ",".join(str(lv) for lv in levels)


def format_cells(x: CellVector) -> str:
    return f"q={x.q} cells={format_levels(x.levels)}"


_CELLS_RE = re.compile(r"^q=(\d+) cells=((?:\d+(?:,\d+)*)?)$")


def parse_levels_line(text: str):
    """Parse ``q=<q> cells=<l1,...>`` into ``(q, levels)``; the list may be empty."""
    m = _CELLS_RE.match(text.strip())
    if m is None:
        raise ValueError(f"not a cell-state line: {text!r}")
    body = m.group(2)
    return int(m.group(1)), tuple(int(v) for v in body.split(",")) if body else ()


def parse_cells(text: str) -> CellVector:
    q, levels = parse_levels_line(text)
    return CellVector(q, levels)


def parse_header(line: str) -> dict:
    """Parse a ``key=value key=value`` header line into a dict of strings."""
    fields = {}
    for tok in line.split():
        key, sep, value = tok.partition("=")
        if not sep:
            raise ValueError(f"malformed header token {tok!r}")
        fields[key] = value
    return fields


def ceil_log(base: int, x: int) -> int:
    """Smallest e >= 0 with base**e >= x, in exact integer arithmetic."""
    if base < 2:
        raise ContractError("logarithm base must be at least 2")
    e, p = 0, 1
    while p < x:
        p *= base
        e += 1
    return e


def floor_log(base: int, x: int) -> int:
    """Largest e with base**e <= x, for x >= 1."""
    if x < 1:
        raise ContractError("floor_log needs x >= 1")
    e, p = 0, base
    while p <= x:
        p *= base
        e += 1
    return e
