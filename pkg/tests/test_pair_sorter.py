import numpy as np
import pytest

from conftest import make_text
from sprepair import ArenaAccountant, TextBuffer, sort_pairs, sort_position_range
from sprepair.pair_sorter import (
    SCRATCH_WORDS, count_frequencies, highest_frequency, radix_sort_records,
)


def reference(cells, m):
    return sorted(range(m - 1), key=lambda p: (cells[p], cells[p + 1], p))


def test_examples():
    assert sort_pairs(make_text("banana")).positions() == [0, 1, 3, 2, 4]
    assert sort_pairs(make_text("abab")).positions() == [0, 2, 1]
    assert sort_pairs(make_text("aa")).positions() == [0]
    assert sort_pairs(make_text("a")).positions() == []


def test_count_frequencies():
    t = make_text("banana")
    got = list(count_frequencies(sort_pairs(t), t))
    assert got == [((0, 1), 1, 0), ((1, 2), 2, 1), ((2, 1), 2, 3)]
    t = make_text("aaaa")
    assert list(count_frequencies(sort_pairs(t), t)) == [((0, 0), 3, 0)]
    t = make_text("ab")
    assert list(count_frequencies(sort_pairs(t), t)) == [((0, 1), 1, 0)]


def test_highest_frequency():
    assert highest_frequency(make_text("abracadabra")) == 2
    assert highest_frequency(make_text("aaaa")) == 3
    assert highest_frequency(make_text("abc")) == 1
    assert highest_frequency(make_text("a")) == 0


def test_requires_compacted_text():
    t = make_text("abab")
    t.replace_pair(0, 5)
    with pytest.raises(ValueError):
        sort_pairs(t)


@pytest.mark.parametrize("n", [2, 3, 5, 26, 100, 1000, 5000])
def test_phases_and_space(n, rng):
    t = TextBuffer.from_symbols(rng.integers(0, 7, n), code_limit=n + 10)
    acc = ArenaAccountant()
    tp = sort_pairs(t, acc)
    assert tp.positions() == reference(t.cells, n)
    assert acc.peak_words <= n + 64
    # each phase takes a third of what is left (rounded down), the last the rest
    rem = n - 1
    for s in tp.phase_sizes[:-1]:
        assert s == min(rem, (n - (n - 1 - rem)) // 3)
        rem -= s
    assert tp.phase_sizes[-1] == rem


def test_random_against_reference(rng):
    for _ in range(200):
        n = int(rng.integers(2, 2000))
        sigma = int(rng.integers(1, 40))
        syms = rng.integers(0, sigma, n)
        if rng.random() < 0.3:
            syms = np.sort(syms)
        t = TextBuffer.from_symbols(syms, code_limit=n + sigma + 2)
        assert sort_pairs(t).positions() == reference(t.cells, n)


def test_radix_records():
    rng = np.random.default_rng(5)
    recs = rng.integers(0, 1 << 20, (500, 3))
    A = recs.ravel().copy()
    radix_sort_records(A, 0, 500, 20, np.zeros(SCRATCH_WORDS, dtype=np.int64))
    assert [tuple(r) for r in A.reshape(-1, 3)] == sorted(map(tuple, recs.tolist()))


def _blank_some(t, rng, k):
    for _ in range(k):
        live = [p for p, _ in t.decode_plain()]
        if len(live) < 3:
            return
        t.replace_pair(live[int(rng.integers(0, len(live) - 1))], int(rng.integers(0, 4)))


def test_sort_position_range(rng):
    for _ in range(300):
        n = int(rng.integers(3, 300))
        t = TextBuffer.from_symbols(rng.integers(0, 4, n), code_limit=n + 10)
        tp = sort_pairs(t)
        _blank_some(t, rng, int(rng.integers(0, n)))
        lo = int(rng.integers(0, n - 1))
        hi = int(rng.integers(lo, n))
        before = tp.words[lo:hi].copy()
        v = sort_position_range(t, tp, lo, hi)
        after = tp.words[lo:hi]
        assert sorted(before.tolist()) == sorted(after.tolist())
        live = {p: s for p, s in t.decode_plain()}
        nxt = {p: q for p, q in zip(list(live), list(live)[1:])}
        valid = [p for p in before.tolist() if p in nxt]
        assert v == len(valid)
        key = lambda p: (live[p], live[nxt[p]], p)
        assert after[:v].tolist() == sorted(valid, key=key)


def test_sort_position_range_edge_cases():
    t = make_text("aXb")
    tp = sort_pairs(t)
    t.replace_pair(0, 7)  # position 1 becomes blank
    tp.words[:3] = [1, 0, 2]
    assert sort_position_range(t, tp, 0, 3) == 1
    assert tp.words[0] == 0
    t = make_text("abcabc")
    tp = sort_pairs(t)
    snapshot = tp.positions()
    assert sort_position_range(t, tp, 0, len(tp)) == len(tp)
    assert tp.positions() == snapshot
    with pytest.raises(IndexError):
        sort_position_range(t, tp, 0, 100)
