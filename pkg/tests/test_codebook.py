import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from multibasis import codebook, gf2
from multibasis.codebook import InfeasibleError, build_code, dual

# Golay weight enumerator, re-derived below by an itertools enumeration that
# does not share code with the library's packed-integer span.
GOLAY_WEIGHTS = {0: 1, 8: 759, 12: 2576, 16: 759, 24: 1}


def slow_weight_counts(G):
    G = np.asarray(G, dtype=np.int64)
    k, n = G.shape
    counts = np.zeros(n + 1, dtype=np.int64)
    U = np.array(list(itertools.product([0, 1], repeat=k)), dtype=np.int64)
    np.add.at(counts, ((U @ G) % 2).sum(axis=1), 1)
    return counts


@pytest.mark.parametrize("name,n,k,d", [("golay24", 24, 12, 8), ("bch31", 31, 16, 7),
                                        ("qr47", 47, 24, 11), ("bch127", 127, 64, 21)])
def test_build_code_parameters(name, n, k, d):
    code = build_code(name)
    assert (code.n, code.k, code.d) == (n, k, d)
    assert gf2.rank(code.generator) == k
    assert not gf2.syndrome(code.parity_check, code.generator).any()
    x_n = (1 << code.cyclic_length) | 1
    assert codebook.pdivmod(x_n, code.poly)[1] == 0
    assert codebook.pdeg(code.poly) == code.cyclic_length - k


def test_unknown_code():
    with pytest.raises(ValueError):
        build_code("hamming7")


@pytest.mark.parametrize("name,dual_d", [("golay24", 8), ("bch31", 8)])
def test_dual_minimum_distance(name, dual_d):
    assert dual(build_code(name)).d == dual_d


def test_golay_self_dual():
    g = build_code("golay24")
    assert gf2.same_row_space(g.generator, dual(g).generator)


@pytest.mark.parametrize("name", ["golay24", "bch31", "qr47", "bch127"])
def test_dual_dimension(name):
    code = build_code(name)
    dc = dual(code)
    assert dc.k == code.n - code.k
    assert gf2.rank(dc.generator) == code.n - code.k
    assert not gf2.syndrome(dc.generator, code.generator).any()


def test_golay_weight_distribution():
    wd = codebook.weight_distribution(build_code("golay24"))
    assert wd.nonzero() == GOLAY_WEIGHTS
    assert all(wd[i] == wd[24 - i] for i in range(25))


def test_golay_distribution_matches_slow_enumeration():
    counts = slow_weight_counts(build_code("golay24").generator)
    assert {i: int(a) for i, a in enumerate(counts) if a} == GOLAY_WEIGHTS


def test_bch31_distribution_invariants():
    code = build_code("bch31")
    wd = codebook.weight_distribution(code)
    assert int(np.sum(wd.counts)) == 2 ** 16
    assert wd[0] == 1
    assert all(wd[i] == 0 for i in range(1, 7))
    assert np.array_equal(wd.counts, slow_weight_counts(code.generator))


def test_min_weight_codewords_golay():
    words = codebook.min_weight_codewords(dual(build_code("golay24")), 8)
    assert words.shape == (759, 24)
    assert (words.sum(axis=1) == 8).all()
    keys = gf2.pack_rows(words)
    assert keys == sorted(set(keys))
    assert not gf2.syndrome(build_code("golay24").generator, words).any()


def test_min_weight_zero_word():
    words = codebook.min_weight_codewords(build_code("bch31"), 0)
    assert words.shape == (1, 31) and not words.any()


def test_bch31_dual_min_weight_words():
    code = build_code("bch31")
    words = codebook.min_weight_codewords(dual(code), 8)
    assert len(words) == 465
    assert not gf2.syndrome(code.generator, words).any()


def test_infeasible_enumeration():
    with pytest.raises(InfeasibleError):
        codebook.min_weight_codewords(dual(build_code("bch127")), 22)
    with pytest.raises(InfeasibleError):
        codebook.weight_distribution(build_code("bch127"))


@given(st.sampled_from(["golay24", "bch31", "qr47"]), st.integers(0, 2 ** 16 - 1),
       st.integers(1, 46))
def test_cyclic_shift_of_codeword_is_codeword(name, seed, j):
    code = build_code(name)
    rng = np.random.default_rng(seed)
    u = rng.integers(0, 2, code.k)
    c = (u @ code.generator.astype(np.int64)) % 2
    nc = code.cyclic_length
    shifted = c.copy()
    shifted[:nc] = np.roll(c[:nc], j % nc)
    assert not gf2.syndrome(code.parity_check, shifted).any()


def test_search_low_weight_finds_true_words():
    code = build_code("bch31")
    found = codebook.search_low_weight(dual(code), 8, 30, np.random.default_rng(0))
    assert len(found) > 0
    assert (found.sum(axis=1) == 8).all()
    assert not gf2.syndrome(code.generator, found).any()


def test_bundled_bch127_cogs():
    code = build_code("bch127")
    cogs = codebook.bundled_cogs("bch127")
    assert cogs.shape[1] == 127 and len(cogs) >= 10
    assert (cogs.sum(axis=1) == 22).all()
    assert not gf2.syndrome(code.generator, cogs).any()


def test_word_list_round_trip(tmp_path):
    words = gf2.as_bits([[1, 0, 1, 1], [0, 1, 1, 0]])
    p = tmp_path / "w.txt"
    codebook.write_word_list(p, words, header="two words")
    assert p.read_text().startswith("# two words")
    assert np.array_equal(codebook.read_word_list(p), words)
