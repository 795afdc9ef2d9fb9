import itertools

import pytest
from hypothesis import given, settings, strategies as st

from conftest import PRINTED_ROW_14
from flashcodes.buffer import (
    BufferConfig,
    baseline_writes,
    bound_single_cell_new,
    bound_single_cell_old,
    buf_decode,
    buf_encode,
    cycle_count,
    euler_phi,
    guaranteed_writes_buffer,
    prior_single_cell_writes,
    trace_line,
)
from flashcodes.core import ERASE, CellVector, ContractError, count_at_level
from flashcodes.verifier import consistency_run, make_handle, window_oracle

CFG = BufferConfig(11, 3, 4)


def cv(*levels):
    return CellVector(3, levels)


def run_trace(cfg, inputs):
    x = cfg.initial()
    lines = [trace_line(0, None, x, buf_decode(cfg, x))]
    for w, b in enumerate(inputs, 1):
        x = buf_encode(cfg, x, b)
        lines.append(trace_line(w, b, x, buf_decode(cfg, x)))
    return x, lines


def test_decode_examples():
    assert buf_decode(CFG, cv(1, 1, 1, 1, 1, 1, 0, 0, 1, 0, 0)) == (0, 0, 1, 0)
    assert buf_decode(CFG, CFG.initial()) == (0, 0, 0, 0)
    assert buf_decode(CFG, cv(1, 1, 1, 1, 2, 1, 1, 1, 1, 0, 0)) == (1, 0, 0, 1)


def test_encode_examples():
    assert buf_encode(CFG, cv(1, 1, 1, 1, 1, 1, 0, 0, 1, 0, 0), 1) == cv(1, 1, 1, 1, 2, 1, 1, 1, 1, 0, 0)
    assert buf_encode(CFG, cv(1, 1, 1, 1, 2, 2, 2, 1, 1, 1, 0), 0) == cv(2, 1, 1, 1, 2, 2, 2, 1, 1, 1, 1)
    assert buf_encode(CFG, cv(2, 1, 1, 1, 2, 2, 2, 1, 2, 2, 1), 0) == cv(2, 2, 1, 1, 2, 2, 2, 1, 2, 2, 1)


def test_golden_trace(buffer_example):
    inputs, expected = buffer_example
    _, lines = run_trace(CFG, inputs)
    assert lines == expected


def test_printed_last_row_is_inconsistent(buffer_example):
    inputs, _ = buffer_example
    x13, _ = run_trace(CFG, inputs[:13])
    printed = cv(*PRINTED_ROW_14)
    # the printed row repeats row 13 unchanged
    assert printed == x13
    # after 14 = 2*7 + 0 writes, i.e. 1*7 + 7, all seven usable cells must sit at level 2
    assert count_at_level(printed, 2) == 6
    x14 = buf_encode(CFG, x13, 0)
    assert count_at_level(x14, 2) == 7
    assert buf_decode(CFG, printed) != window_oracle(inputs, 4)
    assert buf_decode(CFG, x14) == window_oracle(inputs, 4)


def test_next_write_after_example_erases(buffer_example):
    inputs, _ = buffer_example
    x, _ = run_trace(CFG, inputs)
    assert buf_encode(CFG, x, 0) is ERASE and buf_encode(CFG, x, 1) is ERASE


def test_config_contract():
    with pytest.raises(ContractError):
        BufferConfig(7, 3, 4)
    with pytest.raises(ContractError):
        BufferConfig(11, 3, 4, l=3)
    with pytest.raises(ContractError):
        buf_encode(CFG, CFG.initial(), 2)


def test_write_count_formulas():
    assert guaranteed_writes_buffer(11, 3, 4) == 14
    assert all(guaranteed_writes_buffer(n, 2, r) == n - r for n, r in [(4, 2), (9, 3)])
    assert guaranteed_writes_buffer(6, 2, 3) == 3
    assert baseline_writes(11, 3, 4) == 11
    assert baseline_writes(9, 2, 4) == 9 - 4
    for q, r in [(3, 2), (5, 4)]:
        assert baseline_writes(2 * r, q, r) == q + r - 2


def test_euler_phi():
    def brute(n):
        return sum(1 for a in range(1, n + 1) if __import__("math").gcd(a, n) == 1)
    assert euler_phi(1) == 1 and euler_phi(6) == 2 and euler_phi(12) == 4
    assert all(euler_phi(n) == brute(n) for n in range(1, 200))


def necklaces_by_rotation(l, r):
    seen, orbits = set(), 0
    for word in itertools.product(range(l), repeat=r):
        if word in seen:
            continue
        orbits += 1
        for s in range(r):
            seen.add(word[s:] + word[:s])
    return orbits


@pytest.mark.parametrize("l", [1, 2, 3])
@pytest.mark.parametrize("r", range(1, 7))
def test_cycle_count_brute_force(l, r):
    assert cycle_count(l, r) == necklaces_by_rotation(l, r)


def test_cycle_count_spots():
    assert cycle_count(2, 2) == 3 and cycle_count(2, 1) == 2 and cycle_count(2, 3) == 4


def test_single_cell_bounds():
    assert bound_single_cell_new(8, 2, 2) == (8 - 4) // necklaces_by_rotation(2, 2) + 2 == 3
    assert bound_single_cell_new(16, 2, 3) == (16 - 8) // necklaces_by_rotation(2, 3) + 3 == 5
    for l, r in [(2, 2), (3, 2), (2, 4)]:
        assert bound_single_cell_new(l ** r, l, r) == r
        assert bound_single_cell_old(l ** r, l, r) == r
    assert bound_single_cell_old(8, 2, 2) == 5
    assert bound_single_cell_old(2, 2, 1) == 1
    with pytest.raises(ContractError):
        bound_single_cell_new(7, 2, 3)


def test_prior_writes():
    assert prior_single_cell_writes(8, 2) == 4
    assert prior_single_cell_writes(2, 1) == 1
    assert all(prior_single_cell_writes(2 ** (r - 1), r) == r - 1 for r in range(1, 8))


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 4).flatmap(lambda r: st.tuples(
    st.just(r), st.integers(2 * r, 2 * r + 4), st.integers(2, 6))), st.data())
def test_window_and_max_level_invariant(params, data):
    r, n, q = params
    cfg = BufferConfig(n, q, r)
    t = guaranteed_writes_buffer(n, q, r)
    inputs = data.draw(st.lists(st.integers(0, 1), min_size=t, max_size=t))
    res = consistency_run(make_handle("buffer", n=n, q=q, r=r), inputs)
    assert res.ok and not res.erased, res.reason
    x = cfg.initial()
    for s, b in enumerate(inputs, 1):
        x = buf_encode(cfg, x, b)
        layer, y = divmod(s - 1, n - r)
        assert max(x) == layer + 1 and count_at_level(x, layer + 1) == y + 1
    assert all(buf_encode(cfg, x, b) is ERASE for b in (0, 1))
