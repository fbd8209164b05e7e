import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from multibasis import gf2, orbits
from multibasis.codebook import build_code, dual, min_weight_codewords
from multibasis.stoppingsets import count_stopping_sets

bits = lambda s: gf2.as_bits(s)  # noqa: E731


def test_cyclic_shift_examples():
    v = bits("10100")
    assert gf2.to_string(orbits.cyclic_shift(v, 0)) == "10100"
    assert gf2.to_string(orbits.cyclic_shift(v, 5)) == "10100"
    assert gf2.to_string(orbits.cyclic_shift(v, 1)) == "01010"


def test_cyclic_shift_keeps_extension_bit():
    v = bits("1100001")
    out = orbits.cyclic_shift(v, 1, cyclic_length=6)
    assert gf2.to_string(out) == "0110001"


def test_affine_example():
    v = orbits.cyclic_shift(bits("10100"), 1)
    assert gf2.to_string(orbits.affine_apply(v, 1, 2)) == "10010"
    w = orbits.affine_apply(bits("10100"), 1, 2)
    assert gf2.to_string(orbits.cyclic_shift(w, 1)) == "10010"
    assert np.array_equal(orbits.affine_apply(v, 1, 0), v)
    with pytest.raises(ValueError):
        orbits.affine_apply(bits("101000"), 2, 0)


def test_doubling_map():
    assert not orbits.doubling_map(np.zeros(7, np.uint8)).any()
    assert gf2.to_string(orbits.doubling_map(bits("1100000"))) == "1010000"
    with pytest.raises(ValueError):
        orbits.doubling_map(bits("110000"))


@given(st.sampled_from([7, 15, 23, 31, 47]).flatmap(
    lambda n: arrays(np.uint8, n, elements=st.integers(0, 1))))
def test_doubling_order_returns_identity(v):
    n = len(v)
    h = orbits.multiplicative_order(2, n)
    w = v
    for _ in range(h):
        w = orbits.doubling_map(w)
    assert np.array_equal(w, v)


@given(st.sampled_from([5, 7, 23, 31]).flatmap(
    lambda n: st.tuples(arrays(np.uint8, n, elements=st.integers(0, 1)),
                        st.integers(1, n - 1).filter(lambda q: math.gcd(q, n) == 1),
                        st.integers(0, n - 1), st.integers(0, n - 1))))
def test_affine_commutes_with_shift(args):
    v, q, w, j = args
    n = len(v)
    lhs = orbits.affine_apply(orbits.cyclic_shift(v, j), q, w)
    # brute-force search for the matching shift, then compare with the formula
    found = [jp for jp in range(n)
             if np.array_equal(lhs, orbits.cyclic_shift(orbits.affine_apply(v, q, w), jp))]
    assert found
    assert orbits.shift_for_commutation(q, j, n) in found


def test_partition_golay():
    g = build_code("golay24")
    words = min_weight_codewords(dual(g), 8)
    cogs = orbits.partition_orbits(words, g.cyclic_length)
    assert len(cogs) == 33
    assert sum(c.period for c in cogs) == 759
    assert all(c.period == 23 for c in cogs)


def test_partition_bch31():
    b = build_code("bch31")
    cogs = orbits.code_cogs(b)
    assert len(cogs) == 15 and all(c.weight == 8 for c in cogs)


def test_partition_single_orbit_and_idempotent():
    g = build_code("golay24")
    c = orbits.as_cog(orbits.GOLAY_FAMILY_COGS[1], g)
    shifts = [orbits.cyclic_shift(c.word, j, 23) for j in range(23)]
    reps = orbits.partition_orbits(shifts, 23)
    assert len(reps) == 1
    assert reps[0].bits == gf2.to_string(orbits.canonical(c.word, 23))
    again = orbits.partition_orbits(
        [orbits.cyclic_shift(r.word, j, 23) for r in reps for j in range(23)], 23)
    assert [r.bits for r in again] == [r.bits for r in reps]


def test_short_period_excluded_with_warning():
    words = [bits("101010"), bits("110000")]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        reps = orbits.partition_orbits(words)
    assert [r.bits for r in reps] == ["000011"]
    assert any("period" in str(w.message) for w in caught)


def test_build_parity_matrix_golay(golay, golay_f1_matrix):
    H = golay_f1_matrix
    assert H.shape == (24, 24) and gf2.rank(H) == 12
    assert not gf2.syndrome(H, golay.generator).any()
    assert (H[23] == 1).all()
    for i in range(22):
        assert np.array_equal(H[i + 1, :23], np.roll(H[i, :23], 1))
        assert H[i + 1, 23] == H[i, 23]


def test_build_parity_matrix_bch31():
    b = build_code("bch31")
    cog = orbits.code_cogs(b)[0]
    H = orbits.build_parity_matrix(cog, b)
    assert H.shape == (31, 31) and gf2.rank(H) == 15
    for i in range(30):
        assert np.array_equal(H[i + 1], orbits.cyclic_shift(H[i], 1))


def test_build_parity_matrix_rejects():
    g = build_code("golay24")
    with pytest.raises(orbits.CogRejected):
        orbits.build_parity_matrix(bits("1" + "0" * 23), g)  # not a dual codeword
    with pytest.raises(orbits.CogRejected):
        orbits.build_parity_matrix(np.zeros(24, np.uint8), g)  # period 1
    custom = orbits.build_parity_matrix(orbits.GOLAY_FAMILY_COGS[1], g,
                                        last_row=orbits.GOLAY_FAMILY_COGS[2])
    assert gf2.to_string(custom[23]) == orbits.GOLAY_FAMILY_COGS[2]


def test_golay_family_members():
    g = build_code("golay24")
    for f, cog in orbits.GOLAY_FAMILY_COGS.items():
        members = orbits.generate_family_members(cog, g)
        assert len(members) == 11
        assert members[0].bits == gf2.to_string(orbits.canonical(bits(cog), 23))


def test_family_members_fixed_seed():
    # the all-ones word of length 7 is fixed by the doubling map
    class Tiny:
        cyclic_length = 7
        n = 7
    members = orbits.generate_family_members(bits("1111111"), Tiny)
    assert len(members) == 1


@pytest.mark.parametrize("f", [1, 2, 3])
def test_family_members_share_signature(f):
    g = build_code("golay24")
    members = orbits.generate_family_members(orbits.GOLAY_FAMILY_COGS[f], g)
    sigs = {count_stopping_sets(orbits.build_parity_matrix(c, g), 6).counts for c in members}
    assert len(sigs) == 1


def test_classify_golay():
    g = build_code("golay24")
    fams = orbits.classify_families(orbits.code_cogs(g), g, 8)
    assert [len(f) for f in fams] == [11, 11, 11]
    sigs = [f.signature for f in fams]
    assert sigs == sorted(sigs)
    assert sigs[0][5:] == (0, 1357, 25783)
    # members partition the cogs
    allbits = [c.bits for f in fams for c in f.members]
    assert len(set(allbits)) == 33


def test_classify_without_symmetry_agrees():
    b = build_code("bch31")
    cogs = orbits.code_cogs(b)
    a = orbits.classify_families(cogs, b, 6, use_symmetry=True)
    c = orbits.classify_families(cogs, b, 6, use_symmetry=False)
    assert [(f.signature, [m.bits for m in f.members]) for f in a] == \
           [(f.signature, [m.bits for m in f.members]) for f in c]


def test_family_report_round_trip(tmp_path):
    g = build_code("golay24")
    fams = orbits.classify_families(orbits.code_cogs(g), g, 7)
    text = orbits.family_report(fams)
    assert text.splitlines()[0] == "family_id,cog_bits,S1,S2,S3,S4,S5,S6,S7"
    p = tmp_path / "f.csv"
    p.write_text(text)
    back = orbits.read_family_report(p)
    assert {k: len(v) for k, v in back.items()} == {1: 11, 2: 11, 3: 11}


@pytest.mark.parametrize("name", ["golay24", "bch31"])
def test_claims_shift_and_doubling_invariance(name):
    code = build_code(name)
    rng = np.random.default_rng(5)
    cogs = orbits.code_cogs(code)
    nc = code.cyclic_length
    for _ in range(3):
        c = cogs[rng.integers(len(cogs))]
        j = int(rng.integers(1, nc))
        base = count_stopping_sets(orbits.build_parity_matrix(c, code), 5).counts
        a = orbits.cyclic_shift(c.word, j, nc)
        b = c.word
        for _ in range(j % orbits.multiplicative_order(2, nc) or 1):
            b = orbits.doubling_map(b, nc)
        assert count_stopping_sets(orbits.build_parity_matrix(a, code), 5).counts == base
        assert count_stopping_sets(orbits.build_parity_matrix(b, code), 5).counts == base
