"""Minimal-resolution tests: classical Steenrod Ext, products, and the
cross-engine comparison with the cobar-complex first page."""

import pytest

from algnov.bphopf import TruncationWindow
from algnov.cobar import CobarComplex
from algnov.hopfext import (
    MinimalResolution,
    QWeightModule,
    bp_quotient_hopf,
    classical_dual_steenrod,
    ext_dims,
)
from algnov.specseq import CobarSource, FilteredComplexWindow, compute_E1


@pytest.fixture(scope="module")
def res_a():
    pres = classical_dual_steenrod(26)
    res = MinimalResolution(pres, s_max=8, t_max=26)
    res.build()
    return res


def test_ext0_connectivity(res_a):
    assert res_a.ext_dim(0, 0) == 1
    for t in range(1, 20):
        assert res_a.ext_dim(0, t) == 0


def test_ext1_is_hj(res_a):
    # Ext^{1,t} nonzero exactly at t = 2^j
    nonzero = [t for t in range(1, 27) if res_a.ext_dim(1, t)]
    assert nonzero == [1, 2, 4, 8, 16]
    for t in nonzero:
        assert res_a.ext_dim(1, t) == 1


def test_h0_tower(res_a):
    for s in range(1, 9):
        assert res_a.ext_dim(s, s) == 1  # h_0^s


def test_low_stem_chart(res_a):
    chart = res_a.ext_chart(stem_max=16)
    # columns transcribed from the standard low-stem Adams chart
    assert chart.get((1, 1)) == 1  # h_1
    assert chart.get((2, 2)) == 1  # h_1^2
    assert chart.get((3, 1)) == 1 and chart.get((3, 3)) == 1
    assert (4, 1) not in chart and (5, 1) not in chart
    assert chart.get((6, 2)) == 1  # h_2^2
    assert chart.get((7, 1)) == 1 and chart.get((7, 4)) == 1
    assert chart.get((8, 2)) == 1 and chart.get((8, 3)) == 1  # h_1 h_3, c_0
    assert chart.get((14, 2)) == 1  # h_3^2
    assert chart.get((14, 4)) == 1  # d_0
    assert chart.get((15, 1)) == 1  # h_4
    assert (12, 1) not in chart and (13, 1) not in chart


def test_product_unit_times_h(res_a):
    # 1 * h_j = h_j: multiplication from the s=0 generator is the identity
    for j, t in [(0, 1), (1, 2), (2, 4), (3, 8)]:
        mat = res_a.product_by_h(j, 0, 0)
        assert mat == [[1]]


def test_h0_h1_vanishes(res_a):
    # no dot at stem 1, filtration 2
    mat = res_a.product_by_h(0, 1, 2)  # h_0 * h_1 in Ext^{2,3}
    assert all(all(v == 0 for v in row) for row in mat) or mat == []


def test_h0_h3sq_nonzero(res_a):
    # h_0 h_3^2 at (14, 3): target of the first Adams d_2
    mat = res_a.product_by_h(0, 2, 16)
    assert any(any(row) for row in mat)


def test_products_commute_where_defined(res_a):
    # h_0 h_2 vs h_2 h_0 reaching Ext^{2,5}
    m1 = res_a.product_by_h(0, 1, 4)
    m2 = res_a.product_by_h(2, 1, 1)
    assert any(any(r) for r in m1) == any(any(r) for r in m2)


# ---------------------------------------------------------------------------
# cross-engine: Ext_P(F_2, Q^i) via resolution equals the cobar first page


def test_ext_p_matches_cobar_e1():
    t_cap, s_cap, i_cap = 14, 4, 6
    pres = bp_quotient_hopf(2, t_cap)
    res = MinimalResolution(pres, s_max=s_cap + 1, t_max=t_cap)
    res.build()
    cx = CobarComplex(TruncationWindow(2, t_cap, i_cap + 2 + 8 + 4))
    fc = FilteredComplexWindow(
        CobarSource(cx), s_max=s_cap + 1, t_max=t_cap, i_max=i_cap + 2, r_max=8
    )
    pages = compute_E1(fc)
    modules = {i: QWeightModule(pres, i, t_cap) for i in range(i_cap + 1)}
    checked = 0
    for t in range(0, t_cap + 1, 2):
        for s in range(0, s_cap + 1):
            for i in range(0, i_cap + 1):
                want = pages.dim(1, s, i, t)
                got = ext_dims(res, modules[i], s, t)
                assert want == got, (s, i, t, want, got)
                checked += want
    assert checked > 30  # the window genuinely exercises nonzero groups


def test_qweight_module_counital():
    pres = bp_quotient_hopf(2, 12)
    mod = QWeightModule(pres, 3, 12)
    for d in range(0, 13, 2):
        for m in mod.basis(d):
            terms = mod.psi(m)
            zero_t = tuple(0 for _ in pres.degrees)
            assert terms.get((m, zero_t)) == 1
