from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dnfrt.boolfn import (
    Dnf,
    FactoredDnf,
    Restriction,
    Subcube,
    Term,
    all_points,
    as_table,
    dist_point_term,
    format_dnf,
    format_point,
    format_table,
    int_to_table,
    parse_dnf,
    parse_point,
    parse_table,
    reldist_exhaustive,
    restrict,
    table_to_int,
)
from dnfrt.errors import DimensionTooLarge, EmptySupport


def literal(n):
    return st.integers(1, n).flatmap(lambda v: st.sampled_from([v, -v]))


@st.composite
def terms(draw, n=6):
    vars_ = draw(st.lists(st.integers(1, n), unique=True, max_size=n))
    return Term(tuple(v if draw(st.booleans()) else -v for v in vars_))


@st.composite
def dnfs(draw, n=6, max_terms=4):
    return Dnf(tuple(draw(st.lists(terms(n), min_size=1, max_size=max_terms))), n)


def brute_eval(t: Term, x: int) -> int:
    for lit in t.lits:
        bit = (x >> (abs(lit) - 1)) & 1
        if bit != (lit > 0):
            return 0
    return 1


def test_point_string_convention():
    x = parse_point("100")
    assert x == 1
    assert format_point(x, 3) == "100"
    assert Term.of(1)(x) == 1 and Term.of(2)(x) == 0


def test_term_rejects_contradiction():
    with pytest.raises(ValueError):
        Term.of(2, -2)
    with pytest.raises(ValueError):
        Term.of(0)


def test_term_canonical_order():
    t = Term.of(3, -1, 2)
    assert t.lits == (-1, 2, 3)
    assert Term.of(-1) < Term.of(1)  # negated first on the same variable
    assert Term.of(5) < Term.of(1, 2)  # narrower first


def test_empty_term_is_constant_one():
    assert Term().table(3).all()
    assert str(Term()) == "T"


@given(terms(), st.integers(0, 63))
def test_term_eval_matches_literal_semantics(t, x):
    assert t(x) == brute_eval(t, x)


@given(terms(), st.integers(0, 63))
def test_dist_counts_falsified_literals(t, x):
    want = sum(1 for l in t.lits if ((x >> (abs(l) - 1)) & 1) != (l > 0))
    assert dist_point_term(x, t) == want


@given(dnfs())
def test_dnf_table_matches_pointwise(f):
    tab = f.table()
    for x in range(64):
        assert tab[x] == any(brute_eval(t, x) for t in f.terms)


@given(dnfs())
def test_dnf_text_round_trip(f):
    g = parse_dnf(format_dnf(f), f.n)
    assert g.terms == f.terms


def test_parse_dnf_empty_term_and_comments():
    f = parse_dnf("# header\nT\n1 -2  # trailing\n", 3)
    assert f.terms == (Term(), Term.of(1, -2))
    assert f.table().all()


@given(st.integers(0, 8).flatmap(lambda n: st.tuples(st.just(n), st.lists(st.booleans(), min_size=1 << n, max_size=1 << n))))
def test_table_hex_round_trip(arg):
    n, bits = arg
    tab = np.array(bits, dtype=bool)
    assert np.array_equal(int_to_table(table_to_int(tab), n), tab)
    assert np.array_equal(parse_table(format_table(tab)), tab)


def test_format_table_layout():
    tab = Term.of(1).table(2)  # points 01 and 11 -> bits 1 and 3
    assert format_table(tab) == "n=2 tt=a"


def test_reldist_examples():
    n = 2
    x1 = Term.of(1)
    x1x2 = Term.of(1, 2)
    assert reldist_exhaustive(x1, x1x2, n) == Fraction(1, 2)
    assert reldist_exhaustive(x1x2, x1, n) == Fraction(1)  # asymmetric
    with pytest.raises(EmptySupport):
        reldist_exhaustive(np.zeros(4, dtype=bool), x1, n)


@settings(max_examples=50)
@given(dnfs(), dnfs())
def test_approximate_symmetry(f, g):
    tf, tg = f.table(), g.table()
    if not tf.any() or not tg.any():
        return
    d = reldist_exhaustive(tf, tg, 6)
    if d <= Fraction(1, 2):
        assert reldist_exhaustive(tg, tf, 6) <= 2 * d


@settings(max_examples=50)
@given(dnfs(), dnfs(), dnfs())
def test_approximate_triangle(f, g, h):
    tf, tg, th = f.table(), g.table(), h.table()
    if not (tf.any() and tg.any()):
        return
    dfg = reldist_exhaustive(tf, tg, 6)
    dgh = reldist_exhaustive(tg, th, 6)
    assert reldist_exhaustive(tf, th, 6) <= dfg + (1 + dfg) * dgh


def test_subcube_membership_and_size():
    a, b = parse_point("1100"), parse_point("1010")
    c = Subcube(a, b)
    assert c.size == 4
    members = set(c.members().tolist())
    assert members == {parse_point(s) for s in ("1000", "1100", "1010", "1110")}
    rng = np.random.default_rng(0)
    assert all(int(z) in c for z in c.sample_many(rng, 100))


def test_subcube_exempt_block():
    c = Subcube(0b0011, 0b0001, exempt=0b1000)
    assert c.size == 4
    assert all(((int(z) >> 3) & 1) == 0 for z in c.sample_many(np.random.default_rng(1), 50))


def test_restriction_pins_coordinates():
    f = Dnf.from_lists([[1, 2]], 2)
    u = Restriction.of({1: 1})
    assert restrict(f, u, 2).tolist() == [False, False, True, True]


def test_factored_dnf_checks():
    FactoredDnf(Term.of(1), (Term.of(2), Term.of(-2, 3)), 2, 2, 3)
    with pytest.raises(ValueError):
        FactoredDnf(Term.of(1), (Term.of(1, 2),), 1, 2, 3)
    with pytest.raises(ValueError):
        FactoredDnf(Term(), (Term.of(1, 2, 3),), 1, 2, 3)
    with pytest.raises(ValueError):
        FactoredDnf(Term(), (Term.of(1), Term.of(2)), 1, 2, 3)


def test_factored_dnf_equals_expansion():
    h = FactoredDnf(Term.of(-4), (Term.of(1, 2), Term.of(-1)), 2, 2, 4)
    want = Dnf.from_lists([[-4, 1, 2], [-4, -1]], 4).table()
    assert np.array_equal(h.table(), want)


def test_dimension_cap():
    with pytest.raises(DimensionTooLarge):
        all_points(21)
    assert len(as_table(lambda x: x & 1, 3)) == 8
