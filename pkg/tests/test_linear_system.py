import random
from fractions import Fraction as Fr

import pytest
from hypothesis import given, strategies as st

from bogomolov import generators as gen
from bogomolov.errors import PreconditionError, SchemaError
from bogomolov.linear_system import (
    ChernProfile,
    component_sum,
    degree_warnings,
    pencil_decomposition_check,
    sing_degree,
    zm_degree_bound,
)

seeds = st.integers(0, 10**6)


def test_sing_degree_examples():
    assert sing_degree(ChernProfile.projective_plane(2)) == 3
    assert sing_degree(ChernProfile(2, (3, -9, 9))) == 12
    assert sing_degree(ChernProfile(3, (0, 0, 0, 0))) == 0


def test_plane_family():
    for m in range(1, 101):
        assert sing_degree(ChernProfile.projective_plane(m)) == 3 * (m - 1) ** 2


def test_pencil_examples():
    cert = pencil_decomposition_check(ChernProfile(2, (3, -6, 4)))
    assert cert.degree == 3 and cert.decomposition == 3 and cert.holds
    assert pencil_decomposition_check(ChernProfile(4, (0,) * 5)).holds
    with pytest.raises(PreconditionError):
        pencil_decomposition_check(ChernProfile(1, (2, -2)))


def test_zm_examples():
    cp = ChernProfile(2, (3, -3, 1))
    assert zm_degree_bound(cp, 1) == sing_degree(cp)
    assert zm_degree_bound(cp, 2, 5) == 8
    assert zm_degree_bound(ChernProfile(2, (0, 0, 0)), 3, 7) == 7


def test_component_sum_examples():
    plane = ChernProfile.projective_plane(2)
    assert component_sum([plane]) == plane
    both = component_sum([plane, plane])
    assert sing_degree(both) == 6 and both.components == 2
    with pytest.raises(PreconditionError):
        component_sum([])
    with pytest.raises(PreconditionError):
        component_sum([plane, ChernProfile(3, (0, 0, 0, 0))])


def test_warnings_flag_fractions():
    assert degree_warnings(Fr(3)) == []
    assert degree_warnings(Fr(7, 2))


def test_profile_validation():
    with pytest.raises(PreconditionError):
        ChernProfile(2, (1, 2))
    with pytest.raises(SchemaError):
        ChernProfile.from_json({"d": 2, "t": ["1", "1/0", "3"]})
    cp = ChernProfile.from_json({"d": 2, "t": ["3", "-6", "4"], "sufficiently_ample": True})
    assert ChernProfile.from_json(cp.to_json()) == cp and cp.sufficiently_ample


@given(seeds)
def test_pencil_identity(seed):
    assert pencil_decomposition_check(gen.random_profile(random.Random(seed))).holds


@given(seeds)
def test_component_sum_additive(seed):
    rng = random.Random(seed)
    d = rng.randint(1, 5)
    ps = [gen.random_profile(rng, d) for _ in range(rng.randint(1, 4))]
    assert sing_degree(component_sum(ps)) == sum(sing_degree(p) for p in ps)


@given(seeds, st.integers(0, 20))
def test_zm_reduces_at_m1(seed, s):
    cp = gen.random_profile(random.Random(seed))
    assert zm_degree_bound(cp, 1, s) == sing_degree(cp) + s
