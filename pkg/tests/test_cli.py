import io
import subprocess
import sys

import pytest

from conftest import FIXTURES
from flashcodes.cli import main, parse_values

EXAMPLE = str(FIXTURES / "buffer_11_3_4.inputs")


def run(argv, stdin=""):
    out = io.StringIO()
    code = main(argv, stdin=io.StringIO(stdin), stdout=out)
    return code, out.getvalue()


def test_bounds_buffer():
    code, out = run(["bounds", "buffer", "--q", "8", "--l", "2", "--r", "2"])
    assert code == 0
    assert out == "q,l,r,new,old,prior\n8,2,2,3,5,4\n"


def test_bounds_flash_grid():
    code, out = run(["bounds", "flash", "--n", "16", "--k", "4", "--grid", "q=3,5"])
    assert code == 0
    assert out.splitlines()[1:] == ["16,4,3,3,27,46,58,31,8", "16,4,5,6,57,88,112,62,16"]


def test_bounds_buffer_with_n_adds_multi_cell_columns():
    code, out = run(["bounds", "buffer", "--q", "3", "--l", "2", "--r", "4", "--n", "11"])
    assert out == "q,l,r,n,new,old,prior,multi,baseline\n3,2,4,11,error,1,2,14,11\n"


def test_parse_values():
    assert parse_values("8") == [8]
    assert parse_values("3,5:7") == [3, 5, 6, 7]


def test_simulate_golden_trace(buffer_example):
    _, expected = buffer_example
    code, out = run(["simulate", "--scheme", "buffer", "--n", "11", "--q", "3", "--r", "4",
                     "--inputs", EXAMPLE, "--trace", "-"])
    assert code == 0
    assert out.splitlines() == expected
    assert out == run(["simulate", "--scheme", "buffer", "--n", "11", "--q", "3", "--r", "4",
                       "--inputs", EXAMPLE, "--trace", "-"])[1]


def test_simulate_stdin_and_trace_file(tmp_path):
    trace = tmp_path / "t.txt"
    code, out = run(["simulate", "--scheme", "twobit", "--n", "2", "--q", "3",
                     "--inputs", "-", "--trace", str(trace)], stdin="0\n# comment\n1\n\n")
    assert code == 0
    assert out == "q=3 cells=1,1\n"
    assert trace.read_text() == ("w=0 i=- cells=0,0 bits=0,0\n"
                                 "w=1 i=0 cells=1,0 bits=1,0\n"
                                 "w=2 i=1 cells=1,1 bits=1,1\n")


def test_simulate_erase_exit_code():
    code, out = run(["simulate", "--scheme", "twobit", "--n", "1", "--q", "3",
                     "--inputs", "-", "--trace", "-"], stdin="0\n0\n")
    assert code == 1
    assert out.splitlines()[-1] == "w=2 i=0 erase"


@pytest.mark.parametrize("scheme,params,inputs", [
    ("twobit", ["--n", "3", "--q", "5"], "0\n1\n1\n0\n0\n"),
    ("indexless", ["--n", "16", "--k", "4", "--q", "3"], "0\n3\n2\n2\n1\n"),
    ("staged", ["--n", "16", "--k", "4", "--q", "3"], "0\n" * 8 + "1\n" * 8 + "2\n2\n2\n3\n3\n3\n0\n"),
    ("staged-stacked", ["--n", "16", "--k", "4", "--q", "3"], "1\n2\n3\n"),
    ("constrate", ["--n", "8", "--k", "2", "--q", "3"], "0\n1\n1\n1\n"),
    ("buffer", ["--n", "6", "--q", "3", "--r", "2"], "1\n0\n1\n1\n"),
])
def test_decode_of_simulated_state_matches_trace(scheme, params, inputs):
    base = ["--scheme", scheme] + params
    code, state = run(["simulate"] + base + ["--inputs", "-"], stdin=inputs)
    assert code == 0
    _, trace = run(["simulate"] + base + ["--inputs", "-", "--trace", "-"], stdin=inputs)
    code, decoded = run(["decode"] + base, stdin=state)
    assert code == 0
    assert trace.splitlines()[-1].split()[-1] == decoded.strip()


def test_encode_from_empty_and_serialized_state():
    code, out = run(["encode", "--scheme", "twobit", "--n", "2", "--q", "3", "--input", "1"])
    assert (code, out) == (0, "q=3 cells=0,1\n")
    code, out = run(["encode", "--scheme", "twobit", "--n", "1", "--q", "3", "--input", "1"],
                    stdin="q=3 cells=2\n")
    assert (code, out) == (1, "erase\n")


def test_verify_exhaustive_twobit():
    code, out = run(["verify", "exhaustive", "--scheme", "twobit", "--n", "2", "--q", "3"])
    assert code == 0 and "t=3" in out.splitlines()


def test_verify_inconclusive_and_random():
    code, _ = run(["verify", "exhaustive", "--scheme", "staged", "--n", "16", "--k", "4",
                   "--q", "3", "--budget", "100"])
    assert code == 3
    argv = ["verify", "random", "--scheme", "indexless", "--n", "16", "--k", "4", "--q", "3",
            "--seed", "5", "--trials", "20"]
    code, out = run(argv)
    assert code == 0 and "violations=0" in out and out == run(argv)[1]


@pytest.mark.parametrize("argv", [
    ["bounds", "flash", "--n", "16", "--k", "4", "--q", "3", "--bogus"],
    ["bounds", "flash", "--n", "16", "--k", "4"],
    ["bounds", "buffer", "--q", "x", "--l", "2", "--r", "2"],
    ["simulate", "--scheme", "twobit", "--q", "3", "--inputs", "-"],
    ["simulate", "--scheme", "nope", "--inputs", "-"],
    ["decode", "--scheme", "twobit", "--n", "2", "--q", "3", "--verbose"],
    ["encode", "--scheme", "twobit", "--n", "2", "--q", "3", "--input", "5"],
    ["bounds", "flash", "--n", "4", "--k", "2", "--q", "3", "--grid", "z=1"],
])
def test_usage_errors(argv, capsys):
    code, _ = run(argv, stdin="0\n")
    assert code == 2
    assert capsys.readouterr().err


def test_bad_state_is_usage_error():
    code, _ = run(["decode", "--scheme", "twobit", "--n", "2", "--q", "3"], stdin="q=3 cells=1,1,1\n")
    assert code == 2


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "flashcodes.cli", "bounds", "buffer",
                           "--q", "16", "--l", "2", "--r", "3"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == "q,l,r,new,old,prior\n16,2,3,5,7,5\n"
