import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from toric_slabs import (
    Series,
    cone_membership,
    from_dict,
    kaehler_data,
    load_fixture,
    mirror_equation,
    naive_slab,
    normalize,
    transport_slab,
    verify_conditions,
)
from toric_slabs.errors import InvalidInput, RankZeroQ
from toric_slabs.fixtures import fixture_document
from toric_slabs.slabs import slab_functions, solve_slabs

from conftest import KITE, LONG_INTERVAL

LOCAL_P2_G = [-2, 5, -32, 286, -3038]


def pure_q_coeffs(series, n):
    return {k[n + 1 :]: int(c) for k, c in series.terms.items() if not any(k[: n + 1])}


def test_naive_slabs(fx):
    dec, kd = fx("local-p2")
    assert naive_slab(dec, kd, dec.origin).render() == "1 + y + x + x^-1*y^-1*t"
    dec, kd = fx("interval")
    assert naive_slab(dec, kd, dec.origin).render() == "1 + x^-1 + x*t"
    dec, kd = fx("simplex")
    assert naive_slab(dec, kd, dec.origin).render() == "1 + x"


def test_local_p2_order_five(fx):
    dec, kd = fx("local-p2")
    slab = normalize(dec, kd, dec.origin, 5)
    assert pure_q_coeffs(slab.g, 2) == {(d,): c for d, c in enumerate(LOCAL_P2_G, start=1)}


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_interval_correction_is_exactly_t(fx, k):
    dec, kd = fx("interval")
    assert normalize(dec, kd, dec.origin, k).g.render() == "t"


def test_interval_all_slab_functions(fx):
    dec, kd = fx("interval")
    text = {dec.vertices[v]: normalize(dec, kd, v, 5).f.render() for v in range(3)}
    assert text[(-1,)] == "1 + x + x*t + x^2*t"
    assert text[(0,)] == "1 + x^-1 + t + x*t"
    assert text[(1,)] == "x^-1*t^-1 + x^-2*t^-1 + 1 + x^-1"


def test_interval_factorization(fx):
    dec, kd = fx("interval")
    f0 = normalize(dec, kd, dec.origin, 3).f
    one = Series.one(1, 1)
    assert f0 == (one + Series.monomial(1, 1, (-1,))) * (one + Series.monomial(1, 1, (1,), 0, (1,)))


def test_star_square_order_three(fx):
    dec, kd = fx("star-square")
    g = normalize(dec, kd, dec.origin, 3).g
    assert pure_q_coeffs(g, 2) == {(1, 0): 1, (0, 1): 1, (1, 1): 3, (2, 1): 5, (1, 2): 5}


def test_simplex_has_no_corrections(fx):
    dec, kd = fx("simplex")
    slab = normalize(dec, kd, dec.origin, 4)
    assert slab.f.render() == "1 + x" and not slab.g.terms


def test_order_zero_is_naive(fx):
    dec, kd = fx("local-p2")
    assert normalize(dec, kd, dec.origin, 0).f == naive_slab(dec, kd, dec.origin)


@pytest.mark.parametrize("name", ["interval", "local-p2", "star-square", "simplex"])
def test_all_conditions_pass(fx, name):
    dec, kd = fx(name)
    report = verify_conditions(dec, kd, 4)
    assert report.ok
    assert {c.condition for c in report.checks} >= {"1", "3", "4"}


def test_corrupted_g_reports_failing_degree(fx):
    dec, kd = fx("local-p2")
    slabs = dict(slab_functions(kd, 4))
    o = dec.origin
    slabs[o] = slabs[o] + Series.monomial(2, 1, (0, 0), 0, (2,))
    report = verify_conditions(dec, kd, 4, slabs)
    bad = [c for c in report.failures() if c.condition == "3"]
    assert [c.subject for c in bad] == ["(0, 0)"]
    assert "[2" in bad[0].detail
    assert any(c.condition == "2" for c in report.failures())


def test_wrong_constant_term_is_reported(fx):
    dec, kd = fx("interval")
    slabs = dict(slab_functions(kd, 2))
    slabs[0] = slabs[0] + Series.one(1, 1)
    report = verify_conditions(dec, kd, 2, slabs)
    assert any(c.condition == "1" and not c.passed for c in report.checks)


def test_integrality_of_all_corrections(fx):
    for name in ("interval", "local-p2", "star-square"):
        dec, kd = fx(name)
        for corr in solve_slabs(kd, 4).corrections:
            assert all(c.denominator == 1 for c in corr.values())


def test_transport_around_a_cycle_is_identity(fx):
    dec, kd = fx("local-p2")
    f = slab_functions(kd, 4)
    a, b, c = dec.index_of((0, 0)), dec.index_of((1, 0)), dec.index_of((0, 1))
    loop = transport_slab(transport_slab(transport_slab(f[a], a, b, kd), b, c, kd), c, a, kd)
    assert loop == f[a]


def test_uniqueness_under_relabelling():
    doc = fixture_document("local-p2")
    base = kaehler_data(from_dict(doc))
    expected = pure_q_coeffs(normalize(base.dec, base, base.dec.origin, 4).g, 2)
    rng = random.Random(7)
    for _ in range(3):
        perm = list(range(4))
        rng.shuffle(perm)
        inv = {old: new for new, old in enumerate(perm)}
        shuffled = {
            "dim": 2,
            "vertices": [doc["vertices"][i] for i in perm],
            "maximal_cells": [[inv[i] for i in cell] for cell in reversed(doc["maximal_cells"])],
            "base_cell": 2,  # the reversed list keeps the base cell last
        }
        dec = from_dict(shuffled)
        kd = kaehler_data(dec)
        assert pure_q_coeffs(normalize(dec, kd, dec.origin, 4).g, 2) == expected


def test_cone_membership_examples(fx):
    dec, kd = fx("local-p2")
    assert cone_membership(kd, (-2, -2), (2,), 2)
    assert not cone_membership(kd, (-2, -2), (1,), 2)
    assert cone_membership(kd, (0, 0), (3,), 0)
    assert not cone_membership(kd, (1, 0), (3,), 0)
    assert not cone_membership(kd, (5, 0), (9,), 1)
    for v, p in enumerate(dec.vertices):
        assert cone_membership(kd, p, kd.psibar[v], 1)


@given(st.sampled_from(["interval", "local-p2", "star-square"]), st.data())
def test_cone_membership_closed_under_addition(name, data):
    dec = load_fixture(name)
    kd = kaehler_data(dec)
    pts = []
    for _ in range(2):
        d = data.draw(st.integers(0, 3))
        m = data.draw(st.tuples(*[st.integers(-3, 3)] * dec.dim))
        q = data.draw(st.tuples(*[st.integers(0, 4)] * kd.rank))
        if not cone_membership(kd, m, q, d):
            return
        pts.append((m, q, d))
    (m1, q1, d1), (m2, q2, d2) = pts
    assert cone_membership(kd, tuple(a + b for a, b in zip(m1, m2)), tuple(a + b for a, b in zip(q1, q2)), d1 + d2)


def test_slab_exponents_lie_in_the_cone(fx):
    dec, kd = fx("star-square")
    eq = mirror_equation(dec, kd, 3)
    for e, _ in eq.F:
        assert cone_membership(kd, e[: dec.dim], e[dec.dim : -1], e[-1])


def test_mirror_interval(fx):
    dec, kd = fx("interval")
    eq = mirror_equation(dec, kd, 3)
    assert len(eq.generators) == 5
    assert eq.dehomogenized == "u*w = t * (1 + x^-1 + t + x*t)"
    assert eq.homogeneous.startswith("U*W = z^(1) * V0 * (")


def test_mirror_local_p2(fx):
    dec, kd = fx("local-p2")
    eq = mirror_equation(dec, kd, 5, q_choice=(1,))
    assert len(eq.generators) == 6
    assert eq.dehomogenized.startswith("u*w = t * (1 + y + x - 2*t + x^-1*y^-1*t + 5*t^2")
    assert eq.to_dict()["q_choice"] == [1]


def test_mirror_rank_zero_and_bad_choice(fx):
    dec, kd = fx("simplex")
    with pytest.raises(RankZeroQ):
        mirror_equation(dec, kd, 2)
    dec, kd = fx("star-square")
    with pytest.raises(InvalidInput):
        mirror_equation(dec, kd, 2, q_choice=(0, 0))
    assert mirror_equation(dec, kd, 2, q_choice=(0, 1)).q_choice == (0, 1)


def test_homogenization_from_any_vertex(fx):
    dec, kd = fx("local-p2")
    sol = solve_slabs(kd, 4)
    forms = []
    for v in (dec.index_of((1, 0)), dec.origin):
        f = sol.slab_series(v)
        forms.append(
            {
                tuple(a + b for a, b in zip(k[:2], dec.vertices[v])) + tuple(a + b for a, b in zip(k[3:], kd.psibar[v])): c
                for k, c in f.terms.items()
            }
        )
    assert forms[0] == forms[1]


@pytest.mark.parametrize("doc", [LONG_INTERVAL, KITE])
def test_more_general_decompositions(doc):
    dec = from_dict(doc)
    kd = kaehler_data(dec)
    assert verify_conditions(dec, kd, 3).ok


def test_two_interior_points_both_get_corrections():
    dec = from_dict(LONG_INTERVAL)
    kd = kaehler_data(dec)
    corr = solve_slabs(kd, 3).corrections
    assert corr[dec.index_of((0,))] and corr[dec.index_of((1,))]
    assert not corr[dec.index_of((-1,))] and not corr[dec.index_of((2,))]
    assert all(c == Fraction(int(c)) for cs in corr for c in cs.values())
