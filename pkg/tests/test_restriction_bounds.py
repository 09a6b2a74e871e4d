from fractions import Fraction as Fr
from math import comb, floor

import pytest
from hypothesis import given, strategies as st

from bogomolov.errors import PreconditionError, SearchCapExceeded
from bogomolov.hodge_lattice import NSClass, PolarizedLattice
from bogomolov.restriction_bounds import (
    FormulaId,
    corollary_3_3_bound,
    exterior_coefficient,
    flenner_bound,
    flenner_lhs,
    lemma_3_2_bound,
    max_coefficient_crosscheck,
    theorem_3_1_bound,
)
from bogomolov.sheaf_numerics import Polarization, SheafClass

L1 = PolarizedLattice.diagonal([1])


def with_delta(r, delta):
    # c1 = 0 on a rank-one lattice, so delta = -c2h
    return SheafClass(r, NSClass((0,)), -Fr(delta))


def test_flenner_examples():
    assert flenner_bound(2, 2, 1).minimal_m == 2
    assert flenner_bound(2, 3, 2).minimal_m == 8
    assert flenner_bound(2, 1, 1).minimal_m == 2


def test_flenner_lhs_surface_closed_form():
    for m in range(1, 50):
        assert flenner_lhs(2, m) == Fr(m + 1, 2)


def test_flenner_errors():
    with pytest.raises(PreconditionError):
        flenner_bound(1, 2, 1)
    with pytest.raises(PreconditionError):
        flenner_bound(2, 2, 0)
    with pytest.raises(SearchCapExceeded):
        flenner_bound(2, 10, 100, cap=10)


@given(st.integers(2, 5), st.integers(1, 8), st.fractions(min_value=Fr(1, 4), max_value=20, max_denominator=8))
def test_flenner_monotone(d, r, hd):
    base = flenner_bound(d, r, hd).minimal_m
    assert flenner_bound(d, r + 1, hd).minimal_m >= base
    assert flenner_bound(d, r, hd + Fr(1, 3)).minimal_m >= base
    # minimal: the previous integer fails
    rhs = hd * max(Fr(r * r - 1, 4), Fr(1))
    assert flenner_lhs(d, base) > rhs
    assert base == 1 or flenner_lhs(d, base - 1) <= rhs


def test_discriminant_bound_examples():
    rep = lemma_3_2_bound(L1, with_delta(2, -1))
    assert rep.threshold == 4 and rep.minimal_m == 5
    rep = lemma_3_2_bound(L1, with_delta(3, 0))
    assert rep.threshold == 0 and rep.minimal_m == 1
    with pytest.raises(PreconditionError):
        lemma_3_2_bound(L1, with_delta(3, 1))


def test_semistable_bound_with_factors():
    L = PolarizedLattice.diagonal([1, -1])
    P = Polarization(L.ample)
    q1 = SheafClass(1, NSClass((1, 0)), 2)
    q2 = SheafClass(1, NSClass((1, 0)), 1)
    E = SheafClass(2, NSClass((2, 0)), 1 + 2 + 1)  # extension of equal-slope factors
    rep = corollary_3_3_bound(L, E, [q1, q2], P)
    assert rep.formula_id is FormulaId.COROLLARY_3_3
    assert rep.threshold == 12 and rep.details["delta_dominated"] and rep.details["factors_dominated"]
    with pytest.raises(PreconditionError):
        corollary_3_3_bound(L, E, [q1, SheafClass(1, NSClass((0, 0)), 0)], P)


def test_exterior_bound_examples():
    rep = theorem_3_1_bound(L1, with_delta(2, -1))
    assert rep.threshold == 4 and rep.details["argmax_p"] == [1]
    rep = theorem_3_1_bound(L1, with_delta(4, -3))
    assert rep.threshold == 72 and rep.details["argmax_p"] == [2]
    rep = theorem_3_1_bound(L1, with_delta(5, 0))
    assert rep.threshold == 0 and rep.minimal_m == 1


def test_exterior_bound_non_reflexive_uses_enumeration():
    rep = theorem_3_1_bound(L1, with_delta(6, Fr(-1, 3)), reflexive=False)
    assert "closed_form" not in rep.details and rep.threshold == Fr(rep.details["enumeration"])


def test_max_coefficient_examples():
    assert max_coefficient_crosscheck(2)
    assert [exterior_coefficient(4, p) for p in (1, 2, 3)] == [4, 12, 4]
    assert exterior_coefficient(5, 2) == exterior_coefficient(5, 3) == 30
    assert all(max_coefficient_crosscheck(r) for r in range(2, 41))


@pytest.mark.parametrize("r", range(2, 21))
def test_coefficient_symmetry(r):
    for p in range(1, r):
        assert exterior_coefficient(r, p) == exterior_coefficient(r, r - p)
        assert exterior_coefficient(r, p) == comb(r, p) * comb(r - 2, p - 1)


@given(st.fractions(min_value=-1000, max_value=1000, max_denominator=30))
def test_minimal_m_invariant(x):
    from bogomolov.restriction_bounds import BoundReport

    rep = BoundReport(x, FormulaId.LEMMA_3_2)
    assert rep.minimal_m > x
    if x >= 0:
        assert rep.minimal_m == floor(x) + 1
