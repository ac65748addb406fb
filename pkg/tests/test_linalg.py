"""Tests for exact linear algebra over Z/p^K.

Small-instance oracles are exhaustive enumerations, kept independent of the
Howell machinery they check.
"""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from algnov.linalg import (
    BitEchelon,
    CompositionError,
    ModPkMatrix,
    bit_rank,
    dump_matrix,
    homology,
    kernel_basis,
    load_matrix,
    normal_form,
    smith_exponents,
    solve,
    span_contains,
)


def brute_span(M: ModPkMatrix) -> frozenset:
    """All row-span elements by exhaustive coefficient enumeration."""
    m = M.modulus
    vecs = set()
    for coeffs in itertools.product(range(m), repeat=M.rows):
        x = np.asarray(coeffs, dtype=np.int64)
        vecs.add(tuple(int(v) for v in M.apply_row(x)) if M.rows else (0,) * M.cols)
    if M.rows == 0:
        vecs = {(0,) * M.cols}
    return frozenset(vecs)


def rand_matrix(rng, p, K, rows, cols):
    return ModPkMatrix(p, K, rng.integers(0, p**K, size=(rows, cols)))


# ---------------------------------------------------------------------------
# normal_form


def test_normal_form_identity_z8():
    M = ModPkMatrix(2, 3, np.eye(2, dtype=np.int64))
    H, U = normal_form(M)
    assert H == M
    assert U.matmul(M) == H


def test_normal_form_row2_z8_span_membership():
    # span of (2) over Z/8 contains 4 and 6 but not 1
    M = ModPkMatrix(2, 3, [[2]])
    assert span_contains(M, [4])
    assert span_contains(M, [6])
    assert not span_contains(M, [1])


def test_normal_form_equal_spans_iff_equal_forms():
    rng = np.random.default_rng(7)
    M = rand_matrix(rng, 2, 1, 20, 20)
    perm = rng.permutation(20)
    M2 = ModPkMatrix(2, 1, M.data[perm])
    H1, _ = normal_form(M)
    H2, _ = normal_form(M2)
    assert H1 == H2


@pytest.mark.parametrize("p,K", [(2, 2), (2, 3), (3, 2), (5, 1)])
def test_normal_form_canonical_on_small_spans(p, K):
    # brute-force oracle: equal spans <=> equal Howell forms, on <=3x3
    rng = np.random.default_rng(11 * p + K)
    for _ in range(8):
        rows, cols = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        M = rand_matrix(rng, p, K, rows, cols)
        H, U = normal_form(M)
        assert U.matmul(M) == H
        assert brute_span(M) == brute_span(H)
        # scramble by random row operations; span is unchanged
        data = M.data.copy()
        for _ in range(6):
            i, j = rng.integers(0, rows, size=2)
            if i != j:
                data[i] = (data[i] + rng.integers(0, p**K) * data[j]) % p**K
        H2, _ = normal_form(ModPkMatrix(p, K, data))
        if brute_span(M) == brute_span(ModPkMatrix(p, K, data)):
            assert H == H2


def test_normal_form_idempotent():
    rng = np.random.default_rng(3)
    for p, K in [(2, 3), (3, 2), (2, 1)]:
        M = rand_matrix(rng, p, K, 5, 4)
        H, _ = normal_form(M)
        H2, _ = normal_form(H)
        assert H == H2


def test_normal_form_empty():
    M = ModPkMatrix(2, 3, np.zeros((0, 4), dtype=np.int64))
    H, U = normal_form(M)
    assert H.rows == 0 and H.cols == 4


# ---------------------------------------------------------------------------
# kernel_basis


def test_kernel_identity_f2_empty():
    M = ModPkMatrix(2, 1, np.eye(3, dtype=np.int64))
    assert kernel_basis(M).n_gens == 0


def test_kernel_times2_z8():
    M = ModPkMatrix(2, 3, [[2]])
    ker = kernel_basis(M)
    assert ker.n_gens == 1
    assert list(ker.gens.data[0]) == [4]


def test_kernel_f2_rank_nullity():
    rng = np.random.default_rng(5)
    M = rand_matrix(rng, 2, 1, 6, 9)
    ker = kernel_basis(M)
    # exhaustive oracle over F_2^6
    brute = [
        x
        for x in itertools.product(range(2), repeat=6)
        if not M.apply_row(np.array(x, dtype=np.int64)).any()
    ]
    assert 2**ker.n_gens == len(brute)
    H, _ = normal_form(M)
    assert ker.n_gens == 6 - H.rows


@pytest.mark.parametrize("p,K", [(2, 2), (3, 2)])
def test_kernel_exhaustive_small(p, K):
    rng = np.random.default_rng(13 * p + K)
    for _ in range(6):
        M = rand_matrix(rng, p, K, 3, 2)
        ker = kernel_basis(M)
        brute = {
            tuple(x)
            for x in itertools.product(range(p**K), repeat=3)
            if not M.apply_row(np.array(x, dtype=np.int64)).any()
        }
        assert brute_span(ker.gens) == brute


# ---------------------------------------------------------------------------
# solve


def test_solve_identity():
    M = ModPkMatrix(2, 3, np.eye(3, dtype=np.int64))
    b = np.array([1, 5, 7])
    x = solve(M, b)
    assert np.array_equal(M.apply_row(x), b % 8)


def test_solve_2x_eq_4_mod8():
    M = ModPkMatrix(2, 3, [[2]])
    x = solve(M, [4])
    assert x is not None
    assert (2 * int(x[0])) % 8 == 4


def test_solve_2x_eq_1_mod8_none():
    M = ModPkMatrix(2, 3, [[2]])
    assert solve(M, [1]) is None


def test_solve_deterministic_and_exact():
    rng = np.random.default_rng(17)
    for p, K in [(2, 3), (3, 2), (2, 1)]:
        M = rand_matrix(rng, p, K, 5, 4)
        y = rng.integers(0, p**K, size=5)
        b = M.apply_row(y)
        x1 = solve(M, b)
        x2 = solve(M, b)
        assert x1 is not None and np.array_equal(x1, x2)
        assert np.array_equal(M.apply_row(x1), b)


# ---------------------------------------------------------------------------
# homology


def test_homology_mult_by_p_rank1():
    # 0 -> Z/8 --*2--> Z/8 -> 0 : homology at the right is Z/2
    d_in = ModPkMatrix(2, 3, [[2]])
    d_out = ModPkMatrix(2, 3, np.zeros((1, 1), dtype=np.int64))
    assert homology(d_in, d_out) == [1]


def test_homology_zero_maps():
    d_in = ModPkMatrix(2, 3, np.zeros((2, 3), dtype=np.int64))
    d_out = ModPkMatrix(2, 3, np.zeros((3, 2), dtype=np.int64))
    assert homology(d_in, d_out) == [3, 3, 3]


def test_homology_not_a_complex():
    d_in = ModPkMatrix(2, 3, [[1]])
    d_out = ModPkMatrix(2, 3, [[1]])
    with pytest.raises(CompositionError):
        homology(d_in, d_out)


def brute_homology_exponents(d_in: ModPkMatrix, d_out: ModPkMatrix) -> list[int]:
    """Exhaustive ker/im quotient; returns cyclic exponents (descending)."""
    m = d_in.modulus
    p = d_in.p
    mid = d_in.cols
    kernel = [
        x
        for x in itertools.product(range(m), repeat=mid)
        if not d_out.apply_row(np.array(x, dtype=np.int64)).any()
    ]
    image = {
        tuple(int(v) for v in d_in.apply_row(np.array(y, dtype=np.int64)))
        for y in itertools.product(range(m), repeat=d_in.rows)
    }
    # quotient group orders: repeatedly factor off maximal-order cyclics
    quot = {}
    for x in kernel:
        cls = min(tuple((np.array(x) - np.array(g)) % m) for g in image)
        quot.setdefault(cls, 0)
    size = len(kernel) // len(image)
    assert size == len(quot)
    # element orders in the quotient
    orders = {}
    for x in quot:
        # order of x + image: smallest k with k*x in image
        k = 1
        while tuple((k * np.array(x)) % m) not in image:
            k += 1
        orders[x] = k
    # build exponent multiset from group order + max orders greedily
    exps = []
    remaining = size
    cur = dict(orders)
    while remaining > 1:
        x, k = max(cur.items(), key=lambda kv: kv[1])
        e = 0
        while k > 1:
            k //= p
            e += 1
        exps.append(e)
        remaining //= p**e
        del cur[x]
    return sorted(exps, reverse=True)


def test_homology_random_3term_z4():
    # random 3-term complexes over Z/4 vs exhaustive quotient enumeration
    rng = np.random.default_rng(23)
    found = 0
    while found < 5:
        A = rand_matrix(rng, 2, 2, 2, 2)
        B = rand_matrix(rng, 2, 2, 2, 2)
        if not A.matmul(B).is_zero():
            continue
        found += 1
        exps = homology(A, B)
        brute = brute_homology_exponents(A, B)
        assert exps == brute, (A.data, B.data)


def test_homology_invariant_under_basis_change():
    rng = np.random.default_rng(29)
    p, K = 2, 3
    m = p**K
    A = ModPkMatrix(p, K, [[2, 4], [0, 4]])
    B = ModPkMatrix(p, K, [[4, 0, 0], [2, 0, 0]])
    assert A.matmul(B).is_zero()
    base = homology(A, B)
    for _ in range(5):
        # conjugate the middle by a random invertible 2x2 over Z/8
        while True:
            P = rng.integers(0, m, size=(2, 2))
            det = int(P[0, 0] * P[1, 1] - P[0, 1] * P[1, 0]) % m
            if det % p != 0:
                break
        Pm = ModPkMatrix(p, K, P)
        det_inv = pow(det, -1, m)
        Pinv = ModPkMatrix(
            p, K, (det_inv * np.array([[P[1, 1], -P[0, 1]], [-P[1, 0], P[0, 0]]])) % m
        )
        assert Pm.matmul(Pinv) == ModPkMatrix.identity(p, K, 2)
        A2 = A.matmul(Pm)
        B2 = Pinv.matmul(B)
        assert homology(A2, B2) == base


# ---------------------------------------------------------------------------
# property tests


@settings(max_examples=60, deadline=None)
@given(
    st.integers(0, 2**30 - 1),
    st.sampled_from([(2, 1), (2, 3), (3, 2)]),
    st.integers(1, 4),
    st.integers(1, 4),
)
def test_props_kernel_and_solve(seed, ring, rows, cols):
    p, K = ring
    rng = np.random.default_rng(seed)
    M = rand_matrix(rng, p, K, rows, cols)
    ker = kernel_basis(M)
    for j in range(ker.n_gens):
        assert not M.apply_row(ker.gens.data[j]).any()
    H, U = normal_form(M)
    assert U.matmul(M) == H
    H2, _ = normal_form(H)
    assert H == H2
    y = rng.integers(0, p**K, size=rows)
    b = M.apply_row(y)
    x = solve(M, b)
    assert x is not None
    assert np.array_equal(M.apply_row(x), b)


# ---------------------------------------------------------------------------
# bit-packed GF(2)


def test_bit_rank_matches_modpk():
    rng = np.random.default_rng(31)
    M = rand_matrix(rng, 2, 1, 20, 20)
    packed = [int("".join(str(int(b)) for b in reversed(M.data[i])), 2) for i in range(20)]
    H, _ = normal_form(M)
    assert bit_rank(packed) == H.rows


def test_bit_echelon_tracks_kernel():
    rows = [0b011, 0b110, 0b101]
    ech = BitEchelon(track=True)
    for i, r in enumerate(rows):
        ech.add(r, 1 << i)
    assert ech.rank == 2
    assert ech.null_tags == [0b111]  # sum of all three rows vanishes


# ---------------------------------------------------------------------------
# dump / load


def test_dump_load_roundtrip():
    rng = np.random.default_rng(37)
    M = rand_matrix(rng, 3, 2, 4, 5)
    assert load_matrix(dump_matrix(M)) == M
