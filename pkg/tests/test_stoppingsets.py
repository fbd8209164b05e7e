from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from multibasis import stoppingsets as ss
from multibasis.codebook import build_code
from multibasis.orbits import GOLAY_FAMILY_COGS, build_parity_matrix

small_h = st.integers(1, 8).flatmap(
    lambda m: st.integers(1, 12).flatmap(
        lambda n: arrays(np.uint8, (m, n), elements=st.integers(0, 1))))


@pytest.mark.parametrize("f,tail", [(1, (0, 0, 1357, 25783)), (2, (0, 437, 10143, 73209)),
                                    (3, (0, 46, 1495, 20631))])
def test_golay_counts(f, tail):
    H = build_parity_matrix(GOLAY_FAMILY_COGS[f], build_code("golay24"))
    rep = ss.count_stopping_sets(H, 8, matrix_id=f"F{f}")
    assert rep.counts[:4] == (0, 0, 0, 0)
    assert rep.counts[4:] == tail
    assert rep[8] == tail[-1]
    assert rep.valid


@given(small_h)
def test_size_one_counts_zero_columns(H):
    rep = ss.count_stopping_sets(H, 1)
    assert rep.counts[0] == int((H.sum(axis=0) == 0).sum())


@given(small_h, st.randoms(use_true_random=False))
def test_matches_brute_force_and_permutation_invariant(H, rnd):
    smax = min(5, H.shape[1])
    rep = ss.count_stopping_sets(H, smax)
    assert list(rep.counts) == ss.brute_force_counts(H, smax)
    rows = list(range(H.shape[0]))
    cols = list(range(H.shape[1]))
    rnd.shuffle(rows)
    rnd.shuffle(cols)
    assert ss.count_stopping_sets(H[rows][:, cols], smax).counts == rep.counts


def test_multiword_rows():
    # more than 64 rows exercises the multi-word masks
    rng = np.random.default_rng(3)
    H = (rng.random((70, 12)) < 0.08).astype(np.uint8)
    assert list(ss.count_stopping_sets(H, 4).counts) == ss.brute_force_counts(H, 4)


def test_iter_stopping_sets_agrees(golay_f1_matrix):
    sets7 = list(ss.iter_stopping_sets(golay_f1_matrix, 7))
    assert len(sets7) == 1357
    assert all(ss.is_stopping_set(golay_f1_matrix, s) for s in sets7[:50])


def test_peel_examples(golay_f1_matrix):
    H = golay_f1_matrix
    assert ss.bec_peel(H, set()) == set()
    witness = next(ss.iter_stopping_sets(H, 7))
    assert ss.bec_peel(H, witness) == set(witness)
    with pytest.raises(IndexError):
        ss.bec_peel(H, {24})


@given(small_h, st.integers(0, 11))
def test_peel_single_position(H, pos):
    pos %= H.shape[1]
    covered = bool(H[:, pos].any())
    assert (ss.bec_peel(H, {pos}) == set()) == covered


@given(small_h, st.sets(st.integers(0, 11), max_size=6))
def test_peel_residual_is_largest_stopping_set(H, erased):
    erased = {e % H.shape[1] for e in erased}
    res = ss.bec_peel(H, erased)
    assert res <= erased
    assert ss.is_stopping_set(H, res)
    # brute force: union of all stopping sets inside the erased set
    union = set()
    for s in range(1, len(erased) + 1):
        for I in combinations(sorted(erased), s):
            if ss.is_stopping_set(H, I):
                union |= set(I)
    assert res == union


def test_timeout_flags_partial(golay_f1_matrix):
    rep = ss.count_stopping_sets(golay_f1_matrix, 8, timeout=0.0)
    assert not rep.valid


def test_report_csv():
    rep = ss.StoppingSetReport("x", (0, 3), 2, 0.0)
    assert rep.as_csv() == "sigma,count\n1,0\n2,3\n"
    with pytest.raises(KeyError):
        rep[3]
