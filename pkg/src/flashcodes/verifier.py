"""Certification of write guarantees by exhaustive and randomized adversaries.

Every scheme is wrapped in a :class:`SchemeHandle`, a uniform view of a
deterministic write/decode pair. Because every accepted write raises at least
one cell, the reachable states form a finite DAG and the guaranteed number of
writes is exactly one less than the length of the shortest input sequence
that forces an erasure.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, List, Optional, Tuple

from . import buffer as buf
from . import constrate as cr
from . import indexless as il
from . import staged as st
from . import twobit as tb
from .core import ERASE, CellVector, ContractError, format_cells, parse_cells

DEFAULT_BUDGET = 10 ** 7
PRNG_NAME = "python-random-mt19937"

SCHEMES = ("twobit", "indexless", "staged", "staged-stacked", "constrate", "buffer")


@dataclass(frozen=True)
class SchemeHandle:
    """Uniform interface over one configured code.

    ``kind`` is ``"flash"`` (inputs are bit positions, decode gives the bits)
    or ``"buffer"`` (inputs are symbols, decode gives the window newest-first).
    """

    scheme: str
    params: Tuple[Tuple[str, int], ...]
    kind: str
    initial: object
    write: Callable
    decode: Callable
    inputs: Tuple[int, ...]
    cells: Callable
    serialize: Callable
    parse: Callable
    q: int
    total_cells: int
    window: int = 0
    symbols: int = 2

    @property
    def capacity(self) -> int:
        """Total level transitions available, n(q-1)."""
        return self.total_cells * (self.q - 1)

    def describe(self) -> str:
        return " ".join([f"scheme={self.scheme}"] + [f"{k}={v}" for k, v in self.params])


def _need(scheme, **params):
    missing = [k for k, v in params.items() if v is None]
    if missing:
        raise ContractError(f"scheme {scheme} needs --{' --'.join(missing)}")


def _cell_line_parser(cfg):
    def parse(text):
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        if len(lines) != 1:
            raise ValueError("expected a single 'q=<q> cells=<levels>' line")
        x = parse_cells(lines[0])
        if len(x) != cfg.n or x.q != cfg.q:
            raise ValueError(f"state has n={len(x)}, q={x.q}; expected n={cfg.n}, q={cfg.q}")
        return x
    return parse


def make_handle(scheme: str, n=None, k=None, q=None, r=None) -> SchemeHandle:
    if scheme == "twobit":
        _need(scheme, n=n, q=q)
        cfg = tb.TwoBitConfig(n, q)
        return SchemeHandle(
            scheme, (("n", n), ("q", q)), "flash", cfg.initial(),
            lambda x, i: tb.encode_two_bit(cfg, x, i + 1),
            lambda x: tb.decode_two_bit(cfg, x),
            (0, 1), lambda x: x.levels, format_cells, _cell_line_parser(cfg), q, n,
        )
    if scheme == "indexless":
        _need(scheme, n=n, k=k, q=q)
        cfg = il.IndexlessConfig(n, k, q)
        return SchemeHandle(
            scheme, (("n", n), ("k", k), ("q", q)), "flash", cfg.initial(),
            lambda x, i: il.encode0(cfg, x, i),
            lambda x: il.decode0(cfg, x),
            tuple(range(k)), lambda x: x.levels, format_cells, _cell_line_parser(cfg), q, n,
        )
    if scheme in ("staged", "staged-stacked"):
        _need(scheme, n=n, k=k, q=q)
        variant = st.STACKED if scheme == "staged-stacked" else st.PER_STAGE
        cfg = st.StagedConfig(n, k, q, variant)

        def parse(text):
            got, state = st.parse_state(text)
            if got != cfg:
                raise ValueError(f"state header {got} does not match {cfg}")
            return state

        return SchemeHandle(
            scheme, (("n", n), ("k", k), ("q", q)), "flash", cfg.initial(),
            lambda x, i: st.staged_encode(cfg, x, i),
            lambda x: st.decode(cfg, x),
            tuple(range(k)), lambda x: x.cells,
            lambda x: st.format_state(cfg, x), parse, q, cfg.total_cells,
        )
    if scheme == "constrate":
        _need(scheme, n=n, k=k, q=q)
        cfg = cr.ConstRateConfig(n, k, q)

        def parse(text):
            got, x = cr.parse_state(text)
            if got != cfg:
                raise ValueError(f"state header {got} does not match {cfg}")
            return x

        return SchemeHandle(
            scheme, (("n", n), ("k", k), ("q", q)), "flash", cfg.initial(),
            lambda x, i: cr.cr_encode(cfg, x, i),
            lambda x: cr.cr_decode(cfg, x),
            tuple(range(k)), lambda x: x.levels,
            lambda x: cr.format_state(cfg, x), parse, q, n,
        )
    if scheme == "buffer":
        _need(scheme, n=n, q=q, r=r)
        cfg = buf.BufferConfig(n, q, r)
        return SchemeHandle(
            scheme, (("n", n), ("q", q), ("r", r)), "buffer", cfg.initial(),
            lambda x, b: buf.buf_encode(cfg, x, b),
            lambda x: buf.buf_decode(cfg, x),
            (0, 1), lambda x: x.levels, format_cells, _cell_line_parser(cfg), q, n,
            window=r,
        )
    raise ContractError(f"unknown scheme {scheme!r}; expected one of {', '.join(SCHEMES)}")


# exhaustive search

@dataclass
class VerificationReport:
    scheme: str
    status: str
    t: Optional[int]
    witness: Tuple[int, ...]
    states: int
    wall_time: float
    t_max: Optional[int] = None
    method: str = "bfs"

    def to_text(self) -> str:
        lines = [self.scheme.replace(" ", "\n"), f"method={self.method}", f"status={self.status}"]
        lines.append(f"t={'' if self.t is None else self.t}")
        if self.t_max is not None:
            lines.append(f"t_max={self.t_max}")
        lines.append("witness=" + ",".join(str(v) for v in self.witness))
        lines.append(f"states={self.states}")
        lines.append(f"wall_time={self.wall_time:.6f}")
        return "\n".join(lines) + "\n"


def min_writes_exhaustive(handle: SchemeHandle, budget: int = DEFAULT_BUDGET) -> VerificationReport:
    """Breadth-first search for the shortest erase-forcing input sequence.

    States are expanded in the order of their lexicographically smallest
    shortest path, so the witness is the lexicographically smallest among the
    shortest ones. Exceeding ``budget`` states gives an inconclusive report.
    """
    start = time.perf_counter()
    parent = {handle.initial: None}
    frontier = [handle.initial]
    depth = 0
    while frontier:
        nxt = []
        for state in frontier:
            for inp in handle.inputs:
                out = handle.write(state, inp)
                if out is ERASE:
                    path = [inp]
                    node = state
                    while parent[node] is not None:
                        node, step = parent[node]
                        path.append(step)
                    return VerificationReport(
                        handle.describe(), "ok", depth, tuple(reversed(path)),
                        len(parent), time.perf_counter() - start,
                    )
                if out not in parent:
                    parent[out] = (state, inp)
                    nxt.append(out)
                    if len(parent) > budget:
                        return VerificationReport(
                            handle.describe(), "inconclusive", None, (),
                            len(parent), time.perf_counter() - start,
                        )
        frontier = nxt
        depth += 1
    raise RuntimeError("state graph has no erasing write; the scheme is not well-formed")


def min_writes_iddfs(handle: SchemeHandle, budget: int = DEFAULT_BUDGET) -> VerificationReport:
    """Iterative-deepening depth-first search; an independent route to ``t``."""
    start = time.perf_counter()
    failed = {}  # state -> largest depth known to admit no erasing sequence
    limit = 1
    while True:
        path: List[int] = []

        def search(state, d):
            for inp in handle.inputs:
                out = handle.write(state, inp)
                path.append(inp)
                if out is ERASE:
                    return True
                if d > 1 and failed.get(out, 0) < d - 1 and search(out, d - 1):
                    return True
                path.pop()
            failed[state] = max(failed.get(state, 0), d)
            if len(failed) > budget:
                raise _BudgetExceeded
            return False

        try:
            found = search(handle.initial, limit)
        except _BudgetExceeded:
            return VerificationReport(handle.describe(), "inconclusive", None, (),
                                      len(failed), time.perf_counter() - start, method="iddfs")
        if found:
            return VerificationReport(handle.describe(), "ok", limit - 1, tuple(path),
                                      len(failed), time.perf_counter() - start, method="iddfs")
        limit += 1


class _BudgetExceeded(Exception):
    pass


def max_writes_exhaustive(handle: SchemeHandle, budget: int = DEFAULT_BUDGET) -> Optional[int]:
    """Longest sequence of accepted writes any input sequence can reach.

    Returns None when more than ``budget`` states would be visited.
    """
    best = {}
    # explicit stack of (state, iterator over inputs, running maximum)
    stack = [(handle.initial, iter(handle.inputs), 0)]
    while stack:
        state, it, acc = stack[-1]
        for inp in it:
            out = handle.write(state, inp)
            if out is ERASE:
                continue
            if out in best:
                acc = max(acc, 1 + best[out])
                continue
            stack[-1] = (state, it, acc)
            stack.append((out, iter(handle.inputs), 0))
            break
        else:
            stack.pop()
            best[state] = acc
            if len(best) > budget:
                return None
            if stack:
                ps, pit, pacc = stack[-1]
                stack[-1] = (ps, pit, max(pacc, 1 + acc))
            continue
    return best[handle.initial]


def verify_exhaustive(handle: SchemeHandle, budget: int = DEFAULT_BUDGET,
                      with_max: bool = False) -> VerificationReport:
    report = min_writes_exhaustive(handle, budget)
    if with_max and report.status == "ok":
        report.t_max = max_writes_exhaustive(handle, budget)
        if report.t_max is None:
            report.status = "inconclusive"
    return report


# step-by-step oracles

def window_oracle(history: Iterable[int], r: int, l: int = 2) -> Tuple[int, ...]:
    """Last ``r`` symbols of ``history``, newest first, padded with zeros."""
    hist = list(history)
    for sym in hist:
        if not 0 <= sym < l:
            raise ContractError(f"symbol {sym} outside alphabet of size {l}")
    recent = hist[::-1][:r]
    return tuple(recent) + (0,) * (r - len(recent))


@dataclass
class ConsistencyResult:
    ok: bool
    steps: int
    erased: bool
    failed_step: Optional[int] = None
    reason: str = ""
    final_state: object = None


def _expected_flash(before, i):
    v = list(before)
    v[i] ^= 1
    return tuple(v)


def consistency_run(handle: SchemeHandle, inputs: Iterable[int]) -> ConsistencyResult:
    """Replay ``inputs`` from the initial state, checking every write.

    Stops at the first erase (not a failure) or the first violated check.
    """
    state = handle.initial
    decoded = handle.decode(state)
    history: List[int] = []
    if handle.kind == "buffer" and decoded != window_oracle((), handle.window, handle.symbols):
        return ConsistencyResult(False, 0, False, 0, "initial window is not all zero", state)
    if handle.kind == "flash" and any(decoded):
        return ConsistencyResult(False, 0, False, 0, "initial bits are not all zero", state)
    steps = 0
    for inp in inputs:
        out = handle.write(state, inp)
        if out is ERASE:
            return ConsistencyResult(True, steps, True, final_state=state)
        step = steps + 1
        before, after = handle.cells(state), handle.cells(out)
        if any(b < a for a, b in zip(before, after)):
            return ConsistencyResult(False, steps, False, step, "a cell level decreased", state)
        if sum(after) < sum(before) + 1:
            return ConsistencyResult(False, steps, False, step, "write raised no cell", state)
        got = handle.decode(out)
        if handle.kind == "buffer":
            history.append(inp)
            want = window_oracle(history, handle.window, handle.symbols)
        else:
            want = _expected_flash(decoded, inp)
        if got != want:
            return ConsistencyResult(False, steps, False, step,
                                     f"decoded {got}, expected {want}", state)
        state, decoded, steps = out, got, step
    return ConsistencyResult(True, steps, False, final_state=state)


def with_faulty_write(handle: SchemeHandle, step: int) -> SchemeHandle:
    """Test hook: a handle whose ``step``-th write call (1-based) changes nothing."""
    calls = itertools.count(1)

    def write(state, inp):
        out = handle.write(state, inp)
        if next(calls) == step and out is not ERASE:
            return state
        return out

    return replace(handle, write=write)


@dataclass
class AdversarySummary:
    scheme: str
    trials: int
    horizon: int
    seed: int
    prng: str = PRNG_NAME
    min_writes: Optional[int] = None
    max_writes: Optional[int] = None
    mean_writes: Optional[float] = None
    erased: int = 0
    writes: List[int] = field(default_factory=list)
    violations: List[Tuple[int, int, str]] = field(default_factory=list)

    def to_text(self) -> str:
        def opt(v):
            return "" if v is None else (f"{v:.3f}" if isinstance(v, float) else str(v))
        lines = [self.scheme.replace(" ", "\n"),
                 "method=random", f"prng={self.prng}", f"seed={self.seed}",
                 f"trials={self.trials}", f"horizon={self.horizon}",
                 f"min_writes={opt(self.min_writes)}", f"max_writes={opt(self.max_writes)}",
                 f"mean_writes={opt(self.mean_writes)}", f"erased={self.erased}",
                 f"violations={len(self.violations)}"]
        for trial, step, reason in self.violations:
            lines.append(f"violation=trial:{trial} step:{step} {reason}")
        return "\n".join(lines) + "\n"


def trial_rng(seed: int, trial: int) -> random.Random:
    return random.Random(f"{seed}:{trial}")


def random_adversary(handle: SchemeHandle, trials: int, horizon: int, seed: int) -> AdversarySummary:
    """Uniformly random inputs, each trial checked write by write."""
    summary = AdversarySummary(handle.describe(), trials, horizon, seed)
    for trial in range(trials):
        rng = trial_rng(seed, trial)
        inputs = (rng.choice(handle.inputs) for _ in range(horizon))
        res = consistency_run(handle, inputs)
        summary.writes.append(res.steps)
        summary.erased += res.erased
        if not res.ok:
            summary.violations.append((trial, res.failed_step, res.reason))
    if summary.writes:
        summary.min_writes = min(summary.writes)
        summary.max_writes = max(summary.writes)
        summary.mean_writes = sum(summary.writes) / len(summary.writes)
    return summary
