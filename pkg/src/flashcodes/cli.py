"""Command-line front end.

Exit codes: 0 success, 1 erase reached or verification failed, 2 usage
error, 3 inconclusive (search budget exhausted).
"""

from __future__ import annotations

import argparse
import contextlib
import sys
from typing import List, Optional

from . import bounds
from .buffer import trace_line, window_string
from .core import ERASE, ContractError, CorruptStateError, format_levels
from .verifier import (
    DEFAULT_BUDGET,
    SCHEMES,
    consistency_run,
    make_handle,
    random_adversary,
    verify_exhaustive,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def parse_values(text: str) -> List[int]:
    """``8``, ``3,5,7`` or an inclusive range ``4:16``, freely comma-joined."""
    values = []
    for part in text.split(","):
        part = part.strip()
        try:
            if ":" in part:
                lo, hi = part.split(":")
                values.extend(range(int(lo), int(hi) + 1))
            else:
                values.append(int(part))
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected INT, INT,INT or INT:INT, got {text!r}")
    return values


def _grid_entry(text: str):
    key, sep, values = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"--grid expects KEY=VALUES, got {text!r}")
    return key.strip(), parse_values(values)


def read_inputs(stream) -> List[int]:
    """One input per line; ``#`` starts a comment, blank lines are skipped."""
    out = []
    for lineno, raw in enumerate(stream, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            out.append(int(line))
        except ValueError:
            raise UsageError(f"inputs line {lineno}: {line!r} is not an integer")
    return out


def _open_in(path, stdin):
    return contextlib.nullcontext(stdin) if path == "-" else open(path)


def _scheme_args(p: argparse.ArgumentParser):
    p.add_argument("--scheme", required=True, choices=SCHEMES)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--r", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flashcodes", description="Flash rewriting and buffer codes.")
    sub = parser.add_subparsers(dest="command", required=True)

    pb = sub.add_parser("bounds", help="print bound formulas as CSV")
    bsub = pb.add_subparsers(dest="family", required=True)
    pf = bsub.add_parser("flash", help="flash-code deficiency and write bounds")
    for name in ("n", "k", "q"):
        pf.add_argument(f"--{name}", type=parse_values)
    pf.add_argument("--grid", type=_grid_entry, action="append", default=[],
                    metavar="KEY=VALUES")
    pbf = bsub.add_parser("buffer", help="buffer-code bounds")
    for name in ("q", "l", "r", "n"):
        pbf.add_argument(f"--{name}", type=parse_values)
    pbf.add_argument("--grid", type=_grid_entry, action="append", default=[],
                     metavar="KEY=VALUES")

    ps = sub.add_parser("simulate", help="replay an input sequence")
    _scheme_args(ps)
    ps.add_argument("--inputs", required=True, help="file with one input per line, or -")
    ps.add_argument("--trace", help="trace destination file, or - for stdout")

    pv = sub.add_parser("verify", help="certify the guaranteed number of writes")
    pv.add_argument("mode", choices=("exhaustive", "random"))
    _scheme_args(pv)
    pv.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    pv.add_argument("--max", action="store_true", help="also report the longest run (exhaustive)")
    pv.add_argument("--seed", type=int, default=0)
    pv.add_argument("--trials", type=int, default=100)
    pv.add_argument("--horizon", type=int)

    pe = sub.add_parser("encode", help="apply one write to a state read from stdin")
    _scheme_args(pe)
    pe.add_argument("--input", type=int, required=True)

    pd = sub.add_parser("decode", help="decode a state read from stdin")
    _scheme_args(pd)
    return parser


def _handle(args):
    return make_handle(args.scheme, n=args.n, k=args.k, q=args.q, r=args.r)


def _grid(args, names):
    grid = {}
    for name in names:
        values = getattr(args, name)
        if values is not None:
            grid[name] = values
    for key, values in args.grid:
        if key not in names:
            raise UsageError(f"--grid key {key!r} not one of {', '.join(names)}")
        grid[key] = values
    missing = [nm for nm in names if nm not in grid]
    return grid, missing


def cmd_bounds(args, out) -> int:
    if args.family == "flash":
        grid, missing = _grid(args, ("n", "k", "q"))
        if missing:
            raise UsageError(f"bounds flash needs --{' --'.join(missing)}")
        table = bounds.sweep(list(bounds.FLASH_TABLE), grid)
    else:
        grid, missing = _grid(args, ("q", "l", "r", "n"))
        missing = [m for m in missing if m != "n"]
        if missing:
            raise UsageError(f"bounds buffer needs --{' --'.join(missing)}")
        formulas = bounds.BUFFER_MULTI_TABLE if "n" in grid else bounds.BUFFER_TABLE
        order = {name: grid[name] for name in ("q", "l", "r", "n") if name in grid}
        table = bounds.sweep(list(formulas), order)
    out.write(table.to_csv())
    return EXIT_OK


def _read_state(handle, stream):
    text = stream.read()
    if not text.strip():
        return handle.initial
    try:
        return handle.parse(text)
    except (ValueError, ContractError) as exc:
        raise UsageError(f"cannot read state: {exc}")


def _check_input(handle, value):
    if value not in handle.inputs:
        raise UsageError(f"input {value} not in {list(handle.inputs)} for scheme {handle.scheme}")


def _decoded_field(handle, decoded) -> str:
    if handle.kind == "buffer":
        return f"buffer={window_string(decoded)}"
    return f"bits={format_levels(decoded)}"


def _trace_line(handle, w, inp, state, decoded) -> str:
    if handle.kind == "buffer":
        return trace_line(w, inp, state, decoded)
    shown = "-" if inp is None else str(inp)
    return f"w={w} i={shown} cells={format_levels(handle.cells(state))} {_decoded_field(handle, decoded)}"


def cmd_simulate(args, out, stdin) -> int:
    handle = _handle(args)
    with _open_in(args.inputs, stdin) as fh:
        inputs = read_inputs(fh)
    for value in inputs:
        _check_input(handle, value)
    lines = []
    state = handle.initial
    lines.append(_trace_line(handle, 0, None, state, handle.decode(state)))
    status = EXIT_OK
    for w, inp in enumerate(inputs, 1):
        nxt = handle.write(state, inp)
        if nxt is ERASE:
            key = "b" if handle.kind == "buffer" else "i"
            lines.append(f"w={w} {key}={inp} erase")
            status = EXIT_FAIL
            break
        state = nxt
        lines.append(_trace_line(handle, w, inp, state, handle.decode(state)))
    trace = "\n".join(lines) + "\n"
    if args.trace == "-":
        out.write(trace)
        return status
    if args.trace:
        with open(args.trace, "w", newline="\n") as fh:
            fh.write(trace)
    out.write(handle.serialize(state) + "\n")
    return status


def cmd_verify(args, out) -> int:
    handle = _handle(args)
    if args.mode == "random":
        horizon = args.horizon if args.horizon is not None else handle.capacity + 1
        summary = random_adversary(handle, args.trials, horizon, args.seed)
        out.write(summary.to_text())
        return EXIT_FAIL if summary.violations else EXIT_OK
    report = verify_exhaustive(handle, args.budget, with_max=args.max)
    out.write(report.to_text())
    if report.status == "inconclusive":
        return EXIT_INCONCLUSIVE
    replay = consistency_run(handle, report.witness)
    if not (replay.ok and replay.erased and replay.steps == report.t):
        sys.stderr.write("witness replay does not erase at the reported write\n")
        return EXIT_FAIL
    return EXIT_OK


def cmd_encode(args, out, stdin) -> int:
    handle = _handle(args)
    _check_input(handle, args.input)
    state = _read_state(handle, stdin)
    nxt = handle.write(state, args.input)
    if nxt is ERASE:
        out.write("erase\n")
        return EXIT_FAIL
    out.write(handle.serialize(nxt) + "\n")
    return EXIT_OK


def cmd_decode(args, out, stdin) -> int:
    handle = _handle(args)
    state = _read_state(handle, stdin)
    out.write(_decoded_field(handle, handle.decode(state)) + "\n")
    return EXIT_OK


def main(argv: Optional[List[str]] = None, stdin=None, stdout=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        if args.command == "bounds":
            return cmd_bounds(args, stdout)
        if args.command == "simulate":
            return cmd_simulate(args, stdout, stdin)
        if args.command == "verify":
            return cmd_verify(args, stdout)
        if args.command == "encode":
            return cmd_encode(args, stdout, stdin)
        return cmd_decode(args, stdout, stdin)
    except (UsageError, ContractError, KeyError, OSError) as exc:
        sys.stderr.write(f"flashcodes: error: {exc}\n")
        return EXIT_USAGE
    except CorruptStateError as exc:
        sys.stderr.write(f"flashcodes: corrupt state: {exc}\n")
        return EXIT_FAIL


run = main


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
