"""Closed-form write and deficiency bounds, and grid sweeps over them."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Sequence, Tuple

from . import buffer, staged, twobit
from .constrate import ConstRateConfig, guaranteed_writes_constrate
from .indexless import aux_deficiency_bound

ERROR_MARK = "error"


def lower_bound_deficiency(n: int, k: int, q: int) -> Fraction:
    """Best known lower bound on the write deficiency, (q-1) min(n, k-1) / 2."""
    return Fraction((q - 1) * min(n, k - 1), 2)


def _positive(**params):
    for name, value in params.items():
        if value < 1:
            raise ValueError(f"{name} must be positive, got {value}")


def _flash_params(n, k, q):
    _positive(n=n, k=k)
    if q < 2:
        raise ValueError("q must be at least 2")


def _buffer_params(q, l, r):
    _positive(r=r)
    if q < 2 or l < 2:
        raise ValueError("q and l must be at least 2")


def _prior(q, l, r):
    _buffer_params(q, l, r)
    if l != 2:
        raise ValueError("the earlier single-cell construction is binary")
    return buffer.prior_single_cell_writes(q, r)


def _multi(fn):
    def run(n, q, r, l):
        _buffer_params(q, l, r)
        if l != 2 or n < 2 * r:
            raise ValueError("multi-cell buffer codes need l = 2 and n >= 2r")
        return fn(n, q, r)
    return run


def _checked(check, fn):
    def run(*args):
        check(*args)
        return fn(*args)
    return run


@dataclass(frozen=True)
class Formula:
    name: str
    params: Tuple[str, ...]
    fn: Callable


FORMULAS: Dict[str, Formula] = {f.name: f for f in [
    Formula("lower", ("n", "k", "q"), _checked(_flash_params, lower_bound_deficiency)),
    Formula("aux", ("k", "q"), lambda k, q: aux_deficiency_bound(k, q)),
    Formula("th2", ("n", "k", "q"), _checked(_flash_params, staged.bound_th2)),
    Formula("main", ("n", "k", "q"), _checked(_flash_params, staged.bound_main)),
    Formula("twobit", ("n", "q"), twobit.guaranteed_writes_two_bit),
    Formula("constrate", ("n", "k", "q"),
            lambda n, k, q: guaranteed_writes_constrate(ConstRateConfig(n, k, q))),
    Formula("new", ("q", "l", "r"), _checked(_buffer_params, buffer.bound_single_cell_new)),
    Formula("old", ("q", "l", "r"), _checked(_buffer_params, buffer.bound_single_cell_old)),
    Formula("prior", ("q", "l", "r"), _prior),
    Formula("multi", ("n", "q", "r", "l"), _multi(buffer.guaranteed_writes_buffer)),
    Formula("baseline", ("n", "q", "r", "l"), _multi(buffer.baseline_writes)),
]}

FLASH_TABLE = ("lower", "aux", "th2", "main", "twobit", "constrate")
BUFFER_TABLE = ("new", "old", "prior")
BUFFER_MULTI_TABLE = ("new", "old", "prior", "multi", "baseline")


def format_value(value) -> str:
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    return str(value)


@dataclass
class Table:
    columns: List[str]
    rows: List[List[str]] = field(default_factory=list)

    def to_csv(self) -> str:
        lines = [",".join(self.columns)]
        lines.extend(",".join(row) for row in self.rows)
        return "\n".join(lines) + "\n"


def evaluate(name: str, **params) -> str:
    """Formatted value of one formula, or the error marker."""
    formula = FORMULAS[name]
    try:
        return format_value(formula.fn(*(params[p] for p in formula.params)))
    except (ValueError, ArithmeticError):
        return ERROR_MARK


def sweep(formulas: Sequence[str] | str, grid: Dict[str, Sequence[int]]) -> Table:
    """Evaluate formulas over the cartesian product of the grid.

    Parameters come in grid order, each with its values sorted, so the rows
    are in lexicographic order. Invalid points are kept with the error mark.
    """
    if isinstance(formulas, str):
        formulas = [formulas]
    unknown = [f for f in formulas if f not in FORMULAS]
    if unknown:
        raise KeyError(f"unknown formula(s): {', '.join(unknown)}")
    names = list(grid)
    table = Table(names + list(formulas))
    if not names or any(len(grid[p]) == 0 for p in names):
        return table
    for f in formulas:
        missing = [p for p in FORMULAS[f].params if p not in grid]
        if missing:
            raise KeyError(f"formula {f!r} needs parameter(s) {', '.join(missing)}")
    axes = [sorted(set(grid[p])) for p in names]
    for point in itertools.product(*axes):
        params = dict(zip(names, point))
        row = [str(v) for v in point]
        row.extend(evaluate(f, **params) for f in formulas)
        table.rows.append(row)
    return table
