"""Structure-map tests for the truncated BP Hopf algebroid.

Low-index oracles are one- and two-step hand expansions of the defining
recursions; the rest are ring/coalgebra axioms that must hold in every
truncated degree.
"""

from fractions import Fraction

import pytest

from algnov.bphopf import (
    StructureMaps,
    TruncationWindow,
    gam_mul,
    structure_maps,
)


def keyed(w, *pairs):
    """Helper: Gamma element literal {(v_expts, t_expts): coeff}."""
    return {k: c for k, c in pairs}


@pytest.fixture(scope="module")
def sm2():
    return structure_maps(2, 30, 8)


@pytest.fixture(scope="module")
def sm3():
    return structure_maps(3, 48, 4)


# ---------------------------------------------------------------------------
# log coefficients


def test_m0_is_one(sm2):
    m = sm2.log_coefficients()
    assert m[0] == {sm2.w.zero_expts(): Fraction(1)}


def test_m1_p2(sm2):
    # one-step expansion: 2*m_1 = v_1
    m = sm2.log_coefficients()
    assert m[1] == {sm2.w.unit_v(1): Fraction(1, 2)}


def test_m2_p2(sm2):
    # two-step expansion: 2*m_2 = m_0 v_2 + m_1 v_1^2
    m = sm2.log_coefficients()
    v1, v2 = sm2.w.unit_v(1), sm2.w.unit_v(2)
    assert m[2] == {v2: Fraction(1, 2), (3, 0, 0, 0): Fraction(1, 4)}


def test_m1_p3(sm3):
    m = sm3.log_coefficients()
    assert m[1] == {sm3.w.unit_v(1): Fraction(1, 3)}


def test_denominators_divide_pn(sm2, sm3):
    for sm in (sm2, sm3):
        for n, mn in enumerate(sm.log_coefficients()):
            for c in mn.values():
                assert sm.w.p**n % c.denominator == 0


# ---------------------------------------------------------------------------
# right unit


def test_eta_r_v1_p2(sm2):
    z = sm2.w.zero_expts()
    v1 = sm2.w.unit_v(1)
    assert sm2.right_unit(1) == {(v1, z): 1, (z, v1): 2}


def test_eta_r_v1_p3(sm3):
    z = sm3.w.zero_expts()
    v1 = sm3.w.unit_v(1)
    assert sm3.right_unit(1) == {(v1, z): 1, (z, v1): 3}


def test_eta_r_unit(sm2):
    z = sm2.w.zero_expts()
    assert sm2.right_unit(0) == {(z, z): 1}


def test_eta_r_congruent_vn_mod_I_n_minus_1(sm2, sm3):
    # eta_R(v_n) - v_n lies in I_{n-1} * BP_*BP, I_{n-1} = (p, v_1..v_{n-1})
    for sm in (sm2, sm3):
        w = sm.w
        for n in range(1, w.N + 1):
            diff = dict(sm.right_unit(n))
            key = (w.unit_v(n), w.zero_expts())
            diff[key] = diff.get(key, 0) - 1
            for (ev, et), c in diff.items():
                if c == 0:
                    continue
                assert c % w.p == 0 or any(ev[i] for i in range(n - 1)), (
                    n,
                    ev,
                    et,
                    c,
                )


def test_I_invariance(sm2, sm3):
    # every term of eta_R(v_n) has I-adic weight >= 1
    for sm in (sm2, sm3):
        for n in range(1, sm.w.N + 1):
            for (ev, et), c in sm.right_unit(n).items():
                vp = 0
                cc = abs(c)
                while cc and cc % sm.w.p == 0:
                    cc //= sm.w.p
                    vp += 1
                assert vp + sum(ev) >= 1


def test_eta_r_is_ring_map_on_products(sm2):
    # eta_R(v_a v_b) agrees with eta_R(v_a) * eta_R(v_b)
    w = sm2.w
    prod = gam_mul(w, sm2.right_unit(1), sm2.right_unit(2))
    via_mono = sm2.right_unit_mono((1, 1, 0, 0))
    assert prod == via_mono


# ---------------------------------------------------------------------------
# coproduct


def test_coproduct_t0(sm2):
    z = sm2.w.zero_expts()
    assert sm2.coproduct(0) == {(z, z, z): 1}


def test_coproduct_t1_primitive(sm2):
    z = sm2.w.zero_expts()
    t1 = sm2.w.unit_v(1)
    assert sm2.coproduct(1) == {(z, t1, z): 1, (z, z, t1): 1}


def test_coproduct_t1_primitive_p3(sm3):
    z = sm3.w.zero_expts()
    t1 = sm3.w.unit_v(1)
    assert sm3.coproduct(1) == {(z, t1, z): 1, (z, z, t1): 1}


def test_counit_identities(sm2, sm3):
    # (eps (x) id) Delta(t_n) = t_n = (id (x) eps) Delta(t_n)
    for sm in (sm2, sm3):
        w = sm.w
        z = w.zero_expts()
        for n in range(1, w.N + 1):
            cop = sm.coproduct(n)
            left = {}
            right = {}
            for (ev, tl, tr), c in cop.items():
                if tl == z:
                    key = (ev, tr)
                    left[key] = left.get(key, 0) + c
                if tr == z:
                    key = (ev, tl)
                    right[key] = right.get(key, 0) + c
            left = {k: c for k, c in left.items() if c}
            right = {k: c for k, c in right.items() if c}
            expect = {(z, w.unit_v(n)): 1}
            assert left == expect, f"(eps x id) failed for t_{n}"
            assert right == expect, f"(id x eps) failed for t_{n}"


def _coassoc_sides(sm, n):
    """Both sides of coassociativity on t_n as Gamma3 dicts."""
    w = sm.w
    lhs = {}
    rhs = {}
    for (ev, a, b), c in sm.coproduct(n).items():
        # (Delta (x) id): expand Delta(v^ev t^a) in slots 1,2
        inner = sm.coproduct_gamma({(ev, a): 1})
        for (v2, a1, a2), c2 in inner.items():
            if w.deg(v2) + w.deg(a1) + w.deg(a2) + w.deg(b) > w.t_max:
                continue
            key = (v2, a1, a2, b)
            lhs[key] = lhs.get(key, 0) + c * c2
        # (id (x) Delta): expand Delta(t^b) in slots 2,3; its far-left
        # v-coefficients slide across slot 1 via eta_R
        for (dv, b1, b2), c2 in sm.coproduct_mono(b).items():
            slid = gam_mul(w, {(ev, a): 1}, sm.right_unit_mono(dv))
            for (v2, a2), c3 in slid.items():
                if w.deg(v2) + w.deg(a2) + w.deg(b1) + w.deg(b2) > w.t_max:
                    continue
                key = (v2, a2, b1, b2)
                rhs[key] = rhs.get(key, 0) + c * c2 * c3
    return (
        {k: c for k, c in lhs.items() if c},
        {k: c for k, c in rhs.items() if c},
    )


def test_coassociativity(sm2, sm3):
    for sm in (sm2, sm3):
        for n in range(1, sm.w.N + 1):
            lhs, rhs = _coassoc_sides(sm, n)
            assert lhs == rhs, f"coassociativity fails on t_{n} (p={sm.w.p})"


def test_coproduct_of_right_unit_inserts_right(sm2, sm3):
    # Delta(eta_R(a)) = 1 (x) eta_R(a)
    for sm in (sm2, sm3):
        for n in range(1, sm.w.N + 1):
            eta = sm.right_unit(n)
            assert sm.coproduct_gamma(eta) == sm.tensor_right(eta), n


def test_antipode_identity(sm2):
    # mu (c (x) id) Delta(t_n) = eta_R(eps(t_n)) = 0 for n >= 1
    w = sm2.w
    for n in range(1, w.N + 1):
        acc = {}
        for (ev, a, b), c in sm2.coproduct(n).items():
            # c(v^ev t^a) = eta_R(v^ev) * prod c(t_i)^{a_i}
            left = sm2.right_unit_mono(ev)
            for idx, e in enumerate(a):
                for _ in range(e):
                    left = gam_mul(w, left, sm2.conjugate(idx + 1))
            term = gam_mul(w, left, {(w.zero_expts(), b): c})
            for k, v in term.items():
                acc[k] = acc.get(k, 0) + v
        assert not any(acc.values()), f"antipode identity fails on t_{n}"


def test_conjugation_involution(sm2):
    # c(c(t_n)) = t_n; c is a ring map with c(eta_L(a)) = eta_R(a)
    w = sm2.w
    for n in range(1, w.N + 1):
        acc = {}
        for (ev, et), c in sm2.conjugate(n).items():
            term = sm2.right_unit_mono(ev)
            for idx, e in enumerate(et):
                for _ in range(e):
                    term = gam_mul(w, term, sm2.conjugate(idx + 1))
            for k, v in term.items():
                acc[k] = acc.get(k, 0) + c * v
        acc = {k: v for k, v in acc.items() if v}
        assert acc == {(w.zero_expts(), w.unit_v(n)): 1}, n


# ---------------------------------------------------------------------------
# associated graded


def test_gr_coaction_q0_primitive(sm2):
    z = sm2.w.zero_expts()
    assert sm2.gr_coaction(0) == {(0, z): 1}


def test_gr_coaction_q1(sm2):
    z = sm2.w.zero_expts()
    t1 = sm2.w.unit_v(1)
    assert sm2.gr_coaction(1) == {(1, z): 1, (0, t1): 1}


def test_gr_coaction_closed_form(sm2, sm3):
    # psi(q_n) = sum_{i<=n} q_i (x) tbar_{n-i}^{p^i}
    for sm in (sm2, sm3):
        w = sm.w
        for n in range(0, w.N + 1):
            expect = {}
            for i in range(n + 1):
                j = n - i
                if j == 0:
                    expect[(i, w.zero_expts())] = 1
                else:
                    e = [0] * w.N
                    e[j - 1] = w.p**i
                    expect[(i, tuple(e))] = 1
            assert sm.gr_coaction(n) == expect, (w.p, n)


def test_gr_coaction_counital(sm2):
    # applying eps to the right factor recovers q_n
    for n in range(0, sm2.w.N + 1):
        terms = [k for (k, et) in sm2.gr_coaction(n) if et == sm2.w.zero_expts()]
        assert terms == [n]


def test_mod_i_coproduct_closed_form(sm2, sm3):
    # Delta(t_n) mod I = sum_{i+j=n} tbar_i (x) tbar_j^{p^i}
    for sm in (sm2, sm3):
        w = sm.w
        for n in range(1, w.N + 1):
            expect = {}
            for i in range(n + 1):
                j = n - i
                el = [0] * w.N
                er = [0] * w.N
                if i:
                    el[i - 1] = 1
                if j:
                    er[j - 1] = w.p**i
                expect[(tuple(el), tuple(er))] = 1
            assert sm.mod_i_coproduct(n) == expect, (w.p, n)


def test_mod_i_coproduct_t2_p2(sm2):
    z = sm2.w.zero_expts()
    t1 = sm2.w.unit_v(1)
    t2 = sm2.w.unit_v(2)
    t1sq = (2, 0, 0, 0)
    assert sm2.mod_i_coproduct(2) == {(t2, z): 1, (t1, t1sq): 1, (z, t2): 1}


def test_window_validation():
    with pytest.raises(ValueError):
        TruncationWindow(1, 10)
    with pytest.raises(ValueError):
        TruncationWindow(2, 9)
    w = TruncationWindow(2, 30)
    assert w.N == 4 and w.v_degrees == (2, 6, 14, 30)
    with pytest.raises(IndexError):
        StructureMaps(w).right_unit(5)
