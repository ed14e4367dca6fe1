from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from toric_slabs import Exponent, Grading, Series, exp, kaehler_data, load_fixture, log, positive_grading, pure_Q_part, transport_slab
from toric_slabs.errors import ConstantTermNotOne, NotAdjacent, TruncationOverflow
from toric_slabs.series import factor_cap, inverse, mul, power

G1 = Grading((Fraction(-1, 2),))  # weight(x^a t^b) = b + a/2
G2 = Grading((Fraction(-1, 3), Fraction(-1, 3)))


def x(a=1, q=0, n=1):
    return Series.monomial(n, 1, (a,) if n == 1 else a, 0, (q,))


ONE = Series.one(1, 1)


def positive_terms(draw_keys):
    return st.dictionaries(draw_keys, st.integers(-3, 3).filter(bool), max_size=4)


key_1d = st.tuples(st.integers(-2, 2), st.just(0), st.integers(0, 2)).filter(lambda k: G1.weight(k, 1) > 0)


@st.composite
def small_series(draw, with_one=True):
    terms = draw(positive_terms(key_1d))
    if with_one:
        terms[(0, 0, 0)] = 1
    return Series(1, 1, terms)


CAP = 3


def test_basic_arithmetic():
    f = ONE + x(-1) + x(1, 1) + Series.monomial(1, 1, (0,), 0, (1,))
    assert f == (ONE + x(-1)) * (ONE + x(1, 1))
    assert (f - f) == Series.zero(1, 1)
    assert f.constant_term == 1
    assert f.coefficient((1,), 0, (1,)) == 1


def test_render_and_order():
    f = (ONE + x(-1)) * (ONE + x(1, 1))
    assert f.render() == "1 + x^-1 + t + x*t"


def test_monomial_arithmetic_is_in_the_group_ring():
    assert x(2) * x(-2) == ONE


def test_layout_mismatch_raises():
    with pytest.raises(ValueError):
        Series(1, 1, {(1, 0): 1})


def test_truncation_and_cap_rule():
    f = (ONE + x(1)).truncate(G1, 1)  # 1 + x, weight(x) = 1/2
    g = mul(f, f)
    # (1 + x + O(>1))^2 = 1 + 2x + x^2 + O(>1)
    assert g.cap == 1
    assert g.coefficient((2,), 0, (0,)) == 1 and g.coefficient((1,), 0, (0,)) == 2


def test_cap_rule_uses_valuation():
    f = x(1).truncate(G1, 1)  # x + O(>1), valuation 1/2
    h = mul(f, f)
    assert h.cap == Fraction(3, 2)


def test_log_of_interval_slab_has_no_pure_q_part():
    f = (ONE + x(-1)) * (ONE + x(1, 1))
    lg = log(f, Grading((Fraction(1, 2),)), 4)  # x^-1 and x*t both weigh 1/2
    assert not pure_Q_part(lg).terms


def test_log_requires_constant_term_one():
    with pytest.raises(ConstantTermNotOne):
        log(x(1), G1, 2)


def test_log_rejects_non_positive_weight():
    bad = ONE + Series.monomial(1, 1, (-2,), 0, (1,))  # weight 1 - 1 = 0
    with pytest.raises(TruncationOverflow):
        log(bad, G1, 2)


def test_inverse_is_geometric_series():
    f = ONE + x(1, 1)
    inv = inverse(f, G1, 5)
    assert inv.coefficient((3,), 0, (3,)) == -1
    assert mul(inv, f.truncate(G1, 5)) == ONE.truncate(G1, 5)


def test_power_negative():
    f = ONE + x(1)
    assert power(f, -2, G1, 2) == mul(inverse(f, G1, 2), inverse(f, G1, 2))


def test_factor_cap():
    assert factor_cap((ONE + x(1)).truncate(G1, 2)) == 4


def test_shift_and_exponent_addition():
    e = Exponent((1,), 0, (2,)) + Exponent((-1,), -1, (1,))
    assert e == Exponent((0,), -1, (3,))
    assert x(1).shift((2,), 0, (1,)) == x(3, 1)


def test_json_round_trip_fixed():
    f = (ONE + x(-1)).scale(Fraction(3, 2))
    assert Series.from_json(f.to_json(), 1, 1) == f


def test_positive_grading_for_local_p2():
    keys = [(1, 0, 0, 0), (0, 1, 0, 0), (-1, -1, 0, 1)]
    g = positive_grading(keys, 2)
    assert g.slope == (Fraction(-1, 3), Fraction(-1, 3))


def test_positive_grading_can_fail():
    with pytest.raises(TruncationOverflow):
        positive_grading([(1, 0, 0), (-1, 0, 0)], 1)


def test_transport_round_trip_and_adjacency():
    dec = load_fixture("interval")
    kd = kaehler_data(dec)
    f = (ONE + x(-1)) * (ONE + x(1, 1))
    there = transport_slab(f, 1, 0, kd)
    assert there.render() == "1 + x + x*t + x^2*t"
    assert transport_slab(there, 0, 1, kd) == f
    with pytest.raises(NotAdjacent):
        transport_slab(f, 0, 2, kd)


# --- properties ----------------------------------------------------------


@given(small_series())
def test_exp_log_round_trip(f):
    g = log(f, G1, CAP)
    assert exp(g) == f.truncate(G1, CAP)


@given(small_series(with_one=False))
def test_log_exp_round_trip(h):
    g = h.truncate(G1, CAP)
    assert log(exp(g)) == g


@given(small_series(), small_series())
def test_log_is_additive(f, g):
    lhs = log(f * g, G1, CAP)
    rhs = log(f, G1, CAP) + log(g, G1, CAP)
    assert lhs == rhs


@given(small_series())
def test_inverse_property(f):
    inv = inverse(f, G1, CAP)
    assert mul(inv, f.truncate(G1, CAP)) == ONE.truncate(G1, CAP)


@given(small_series(), small_series(), small_series())
def test_ring_axioms(a, b, c):
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@given(small_series(), small_series())
def test_truncated_product_matches_exact(a, b):
    at, bt = a.truncate(G1, 2), b.truncate(G1, 2)
    prod = mul(at, bt)
    assert prod == (a * b).truncate(G1, prod.cap)


@given(small_series())
def test_json_round_trip(f):
    assert Series.from_json(f.to_json(), 1, 1) == f


@given(st.sampled_from(["interval", "local-p2", "star-square"]), st.data())
def test_transport_inverse(name, data):
    dec = load_fixture(name)
    kd = kaehler_data(dec)
    pairs = [(v, w) for v in range(len(dec.vertices)) for w in range(len(dec.vertices)) if v != w and dec.adjacent(v, w)]
    v, w = data.draw(st.sampled_from(pairs))
    key = st.tuples(*([st.integers(-2, 2)] * dec.dim + [st.just(0)] + [st.integers(-1, 2)] * kd.rank))
    terms = data.draw(st.dictionaries(key, st.integers(-3, 3).filter(bool), max_size=5))
    f = Series(dec.dim, kd.rank, terms)
    assert transport_slab(transport_slab(f, v, w, kd), w, v, kd) == f


@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.just(0), st.integers(0, 3)), min_size=1, max_size=6))
def test_positive_grading_is_positive(keys):
    keys = [k for k in keys if any(k[:2])]
    assume(keys)
    try:
        g = positive_grading(keys, 2)
    except TruncationOverflow:
        return
    assert all(g.weight(k, 2) > 0 for k in keys)
