import pytest
from hypothesis import given, settings, strategies as st

from flashcodes.core import ERASE, CellVector, ContractError, CorruptStateError, parity
from flashcodes.indexless import (
    ACTIVE,
    IndexlessConfig,
    aux_deficiency_bound,
    block_status,
    block_write,
    block_write_new,
    decode0,
    encode0,
    read_index,
)
from flashcodes.verifier import consistency_run, make_handle


def test_read_index_examples():
    assert read_index((0, 2, 1, 0), 3) == 1
    assert read_index((2, 2, 2, 1), 3) == 0
    assert read_index((1, 0, 0, 0), 3) == 0
    for b in [(0, 0, 0, 0), (2, 2, 2, 2)]:
        with pytest.raises(ContractError):
            read_index(b, 3)


def test_read_index_rejects_split_zero_run():
    with pytest.raises(CorruptStateError):
        read_index((1, 0, 1, 0), 3)


def test_block_write_examples():
    assert block_write((0, 2, 0, 0), 3) == (0, 2, 1, 0)
    assert block_write((2, 2, 1, 0), 3) == (2, 2, 2, 0)
    assert block_write((2, 2, 2, 1), 3) == (2, 2, 2, 2)
    with pytest.raises(ContractError):
        block_write((2, 2, 2, 2), 3)


def test_block_write_new_examples():
    assert block_write_new(0, (0, 0, 0, 0), 3) == (1, 0, 0, 0)
    assert block_write_new(3, (0, 0, 0, 0), 3) == (0, 0, 0, 1)
    assert block_write_new(1, (0, 0, 0, 0), 3) == (0, 1, 0, 0)
    with pytest.raises(ContractError):
        block_write_new(0, (1, 0, 0, 0), 3)


def _memory(q, *blocks):
    levels = [lv for b in blocks for lv in b]
    return CellVector(q, levels)


def test_decode0_examples():
    cfg = IndexlessConfig(16, 4, 3)
    assert decode0(cfg, cfg.initial()) == (0, 0, 0, 0)
    x = _memory(3, (0, 1, 0, 0), (0,) * 4, (0,) * 4, (0,) * 4)
    assert decode0(cfg, x) == (0, 1, 0, 0)
    assert decode0(cfg, _memory(3, *[(2,) * 4] * 4)) == (0, 0, 0, 0)


def test_decode0_rejects_duplicate_bit():
    cfg = IndexlessConfig(16, 4, 3)
    x = _memory(3, (0, 1, 0, 0), (0, 1, 0, 0), (0,) * 4, (0,) * 4)
    with pytest.raises(CorruptStateError):
        decode0(cfg, x)


def test_encode0_examples():
    cfg = IndexlessConfig(16, 4, 3)
    x = encode0(cfg, cfg.initial(), 2)
    assert x.levels[:4] == (0, 0, 1, 0)
    x = encode0(cfg, x, 2)
    assert x.levels[:4] == (0, 0, 2, 0)
    full = _memory(3, *[(2,) * 4] * 4)
    assert all(encode0(cfg, full, i) is ERASE for i in range(4))


def test_aux_bound_examples():
    assert aux_deficiency_bound(4, 3) == 27
    assert all(aux_deficiency_bound(1, q) == 0 for q in (2, 3, 17))
    assert aux_deficiency_bound(2, 2) == (2 - 1) * (3 * 1 - 1)


def test_odd_k_even_q_pads_block():
    cfg = IndexlessConfig(16, 3, 4)
    assert cfg.block_size == 4 and cfg.m == 4
    with pytest.raises(ContractError):
        IndexlessConfig(9, 3, 4)
    assert IndexlessConfig(9, 3, 3).block_size == 3


def test_leftover_cells_untouched():
    cfg = IndexlessConfig(18, 4, 3)
    h = make_handle("indexless", n=18, k=4, q=3)
    x = cfg.initial()
    for i in [0, 1, 2, 3] * 20:
        y = h.write(x, i)
        if y is ERASE:
            break
        x = y
    assert x.levels[16:] == (0, 0)


@pytest.mark.parametrize("k,q", [(2, 3), (3, 3), (4, 3), (4, 5), (3, 4), (5, 2)])
def test_index_recoverable_until_full(k, q):
    size = k + 1 if k % 2 and q % 2 == 0 else k
    for i in range(k):
        b = block_write_new(i, (0,) * size, q)
        writes = 1
        while block_status(b, q) == ACTIVE:
            assert read_index(b, q) == i
            assert sum(b) == writes
            b = block_write(b, q)
            writes += 1
        assert writes == size * (q - 1)
        assert parity(b) == 0


@settings(max_examples=80, deadline=None)
@given(st.sampled_from([(16, 4, 3), (16, 4, 5), (9, 3, 3), (16, 3, 4), (4, 2, 4)]),
       st.data())
def test_decode_encode_consistency(cfg_args, data):
    n, k, q = cfg_args
    h = make_handle("indexless", n=n, k=k, q=q)
    inputs = data.draw(st.lists(st.integers(0, k - 1), max_size=h.capacity + 2))
    res = consistency_run(h, inputs)
    assert res.ok, res.reason
    cfg = IndexlessConfig(n, k, q)
    active = [b for b in cfg.blocks(res.final_state) if block_status(b, q) == ACTIVE]
    assert len(active) <= cfg.block_size
    # after erase the deficiency obeys the aux bound plus partition leftovers
    if res.erased:
        deficiency = h.capacity - res.steps
        assert deficiency <= aux_deficiency_bound(cfg.block_size, q) + (cfg.block_size - 1) * (q - 1) + (n % cfg.block_size) * (q - 1)
