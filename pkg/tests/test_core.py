import numpy as np
import pytest

from sprepair import AlphabetMap, ArenaAccountant, Grammar, GrammarError, Rule, SpaceBoundError, expand, remap_input
from sprepair.core import check_rules, expand_codes, trivial_grammar


def test_remap_first_occurrence():
    codes, alpha = remap_input(b"abab")
    assert codes.tolist() == [0, 1, 0, 1] and alpha.sigma == 2
    codes, alpha = remap_input(b"banana")
    assert codes.tolist() == [0, 1, 2, 1, 2, 1]
    assert alpha.dense_to_original == b"ban"
    table = alpha.original_to_dense
    assert table[ord("n")] == 2 and table[ord("z")] == -1


def test_remap_empty():
    codes, alpha = remap_input(b"")
    assert len(codes) == 0 and alpha.sigma == 0


def test_fallback_flag_on_dense_alphabets():
    data = bytes(range(256)) + b"\x00"
    _, alpha = remap_input(data)
    assert alpha.sigma == 256 and alpha.fallback
    _, alpha = remap_input(b"abcabcabc")
    assert not alpha.fallback


def _g(alphabet, rules, final, n):
    sigma = len(alphabet)
    return Grammar(AlphabetMap(alphabet, n), [Rule(sigma + i, a, b) for i, (a, b) in enumerate(rules)], final, n)


def test_expand_examples():
    assert expand(_g(b"ab", [(0, 1)], [2, 2], 4)) == b"abab"
    assert expand(_g(b"abc", [], [0, 1, 2], 3)) == b"abc"
    # a b r c d ; X=ab Y=ra Z=XY
    g = _g(b"abrcd", [(0, 1), (2, 0), (5, 6)], [7, 3, 0, 4, 7], 11)
    assert expand(g) == b"abracadabra"


def test_expand_rejects_bad_grammars():
    with pytest.raises(GrammarError):
        expand(_g(b"ab", [(0, 5)], [2], 2))
    with pytest.raises(GrammarError):
        expand(_g(b"ab", [(0, 1)], [3], 2))
    with pytest.raises(GrammarError):
        expand(_g(b"ab", [(0, 1)], [2, 2], 3))
    with pytest.raises(GrammarError):
        check_rules(2, [Rule(3, 0, 1)])


def test_deep_chain_expands_without_recursion():
    rules = [(0, 0)] + [(1 + i, 1 + i) for i in range(19)]
    g = _g(b"a", rules, [20], 1 << 20)
    out = expand_codes(g)
    assert len(out) == 1 << 20 and not out.any()


def test_trivial_grammar():
    g = trivial_grammar(b"x")
    assert g.rules == [] and expand(g) == b"x"
    assert expand(trivial_grammar(b"")) == b""


def test_grammar_equality_ignores_stats():
    a = _g(b"ab", [(0, 1)], [2, 2], 4)
    b = _g(b"ab", [(0, 1)], [2, 2], 4)
    b.stats = object()
    assert a == b
    assert a != _g(b"ab", [(0, 1)], [2, 0, 1], 4)


def test_accountant_tracks_peak_and_budget():
    acc = ArenaAccountant(budget_words=100)
    x = acc.allocate("x", 60)
    assert x.dtype == np.int64 and len(x) == 60
    acc.allocate("y", 30)
    acc.release("x")
    acc.allocate("z", 50)
    assert acc.current_words == 80 and acc.peak_words == 90
    with pytest.raises(SpaceBoundError):
        acc.allocate("w", 21)
    acc.release_all()
    assert acc.current_words == 0 and acc.current_words <= acc.peak_words
