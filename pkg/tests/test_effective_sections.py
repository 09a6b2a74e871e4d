import itertools
import random
from fractions import Fraction as Fr
from math import comb, gcd

import pytest
import sympy
from hypothesis import assume, given, strategies as st

from bogomolov import generators as gen
from bogomolov.errors import CoveringError, PreconditionError, SchemaError, SearchCapExceeded
from bogomolov.effective_sections import (
    GridPolynomial,
    GridSpec,
    ResidueSystem,
    determining_matrix,
    elimination_proof_trace,
    find_nonvanishing,
    graded_box,
    graded_indices,
    grid_points,
    rad,
    residue_search,
    section_plan,
    shift_invariance_check,
    supnorm_bound,
    supnorm_threshold,
)

seeds = st.integers(0, 10**6)


def poly(n, d, coeffs):
    return GridPolynomial(n, d, coeffs)


def test_rad_examples():
    assert rad(12) == 6 and rad(-7) == 7 and rad(1) == 1
    with pytest.raises(PreconditionError):
        rad(0)


@given(st.integers(1, 10**6), st.integers(1, 10**6))
def test_rad_multiplicative(a, b):
    assume(gcd(a, b) == 1)
    assert rad(a * b) == rad(a) * rad(b)


def test_graded_order():
    assert graded_indices(2, 1) == [(0, 0), (1, 0), (0, 1)]
    assert list(graded_box(2, 2)) == [(0, 0), (1, 0), (0, 1), (1, 1)]


def test_grid_points_examples():
    assert grid_points(1, 1, GridSpec.standard(1)) == [(0,), (1,)]
    assert grid_points(2, 1, GridSpec.standard(2)) == [(0, 0), (1, 0), (0, 1)]
    assert len(grid_points(2, 2, GridSpec.standard(2))) == 6


def test_determining_examples():
    cert = determining_matrix(1, 1, GridSpec.standard(1))
    assert cert.matrix == ((1, 0), (1, 1)) and cert.invertible
    cert = determining_matrix(2, 2, GridSpec((Fr(2, 7), Fr(-5, 3)), 1))
    assert cert.rank == 6
    assert determining_matrix(1, 2, GridSpec((0,), Fr(1, 3))).invertible


def test_grid_step_nonzero():
    with pytest.raises(PreconditionError):
        GridSpec((0,), 0)


@pytest.mark.parametrize("seed", range(6))
def test_determining_rank_matches_sympy(seed):
    # independent oracle: sympy's exact rank
    rng = random.Random(seed)
    n, d = rng.randint(1, 3), rng.randint(1, 3)
    cert = determining_matrix(n, d, gen.random_grid(rng, n))
    assert cert.rank == sympy.Matrix(cert.matrix).rank() == comb(n + d, n)


def test_find_nonvanishing_examples():
    g = GridSpec.standard(1)
    res = find_nonvanishing(poly(1, 1, {(1,): 1, (0,): -5}), g)
    assert res.index == (0,) and res.value == -5
    res = find_nonvanishing(poly(1, 2, {(2,): 1, (1,): -1}), g)
    assert res.index == (2,) and res.value == 2
    assert find_nonvanishing(poly(2, 3, {}), GridSpec.standard(2)).zero


def test_elimination_trace_examples():
    g = GridSpec.standard(2)
    trace = elimination_proof_trace(poly(2, 2, {}), g)
    assert trace.success and all(s["vanishes"] for s in trace.steps)
    trace = elimination_proof_trace(poly(1, 1, {(1,): 1, (0,): -5}), GridSpec.standard(1))
    assert not trace.success and trace.violation.index == (0,)


@given(seeds)
def test_nonzero_never_vanishes(seed):
    rng = random.Random(seed)
    n, d = rng.randint(1, 3), rng.randint(0, 4)
    f, g = gen.random_polynomial(rng, n, d), gen.random_grid(rng, n)
    res = find_nonvanishing(f, g)
    assert not res.zero and f(g.point(res.index)) == res.value != 0
    # every earlier grid point is a zero of f
    for i in graded_indices(n, d):
        if i == res.index:
            break
        assert f(g.point(i)) == 0


@given(seeds)
def test_affine_change(seed):
    rng = random.Random(seed)
    n, d = rng.randint(1, 3), rng.randint(0, 3)
    f, g = gen.random_polynomial(rng, n, d), gen.random_grid(rng, n)
    h = f.compose_affine(g.a, g.c)
    assert find_nonvanishing(f, g).index == find_nonvanishing(h, GridSpec.standard(n)).index


def test_vanishing_on_most_of_grid():
    # x (x - 1) (x - 2) y vanishes on most points but not identically
    f = poly(2, 4, {(3, 1): 1, (2, 1): -3, (1, 1): 2})
    res = find_nonvanishing(f, GridSpec.standard(2))
    assert res.index == (3, 1)


def test_polynomial_json_round_trip():
    f = poly(2, 3, {(1, 2): Fr(3, 4), (0, 0): -2})
    assert GridPolynomial.from_json(f.to_json()) == f
    g = GridPolynomial.from_json({"nvars": 2, "degree": 3, "coeffs": [[[1, 2], "3/4"], [[0, 0], -2]]})
    assert g == f
    with pytest.raises(SchemaError):
        GridPolynomial.from_json({"nvars": 1, "degree": 1, "coeffs": {"2": 1}})


def test_residue_examples():
    rs = ResidueSystem(2, ((2, (1, 0)),))
    a = residue_search(rs)
    assert a[0] % 2 == 1 and rs.l == 2
    rs = ResidueSystem(2, ((2, (1, 0)), (3, (1, 1))))
    assert rs.l == 6 and rs.satisfied_by((1, 0))
    assert rs.satisfied_by(residue_search(rs))


def test_covering_certificate():
    rs = ResidueSystem(2, ((2, (1, 0)), (2, (0, 1)), (2, (1, 1))))
    with pytest.raises(CoveringError) as info:
        residue_search(rs)
    cert = info.value.certificate
    assert cert["prime"] == 2 and cert["residues_checked"] == 4 and len(cert["blocking"]) == 4


def test_shift_examples():
    rs = ResidueSystem(2, ((2, (1, 0)), (3, (1, 1))))
    assert shift_invariance_check(rs, (1, 0), (0, 0))
    assert shift_invariance_check(rs, (1, 0), (5, -2))


def test_residue_validation():
    with pytest.raises(PreconditionError):
        ResidueSystem(2, ((4, (1, 0)),))
    with pytest.raises(PreconditionError):
        ResidueSystem(2, ((3, (3, 6)),))
    with pytest.raises(SchemaError):
        ResidueSystem.from_json({"N": 1, "l": 6, "points": [{"p": 2, "v": [1]}]})


@given(seeds)
def test_residue_search_agrees_with_brute_force(seed):
    rng = random.Random(seed)
    rs = gen.random_residue_system(rng, max_N=2, max_prime=7)
    exists = any(rs.satisfied_by(a) for a in itertools.product(range(rs.l), repeat=rs.N))
    try:
        a = residue_search(rs)
    except CoveringError:
        assert not exists
        return
    assert exists and rs.satisfied_by(a) and all(0 <= x < rs.l for x in a)


def test_random_sampling_path():
    rng = random.Random(5)
    for _ in range(50):
        rs = gen.random_residue_system(rng)
        try:
            a = residue_search(rs, seed=3, sweep_limit=1)
        except CoveringError:
            pytest.fail("sampling path must not raise a covering error")
        except SearchCapExceeded:
            continue
        assert rs.satisfied_by(a)


def test_supnorm_examples():
    assert supnorm_threshold([1, 1], [0, 1], 2, Fr(1, 2)) == 4
    assert supnorm_bound([1, 1], [0, 1], 2, Fr(1, 2), 3) == Fr(10, 8)
    assert supnorm_bound([1, 1], [0, 1], 2, Fr(1, 2), 4) == Fr(13, 16)
    assert supnorm_threshold([5, 2, 7], [0], 1, Fr(9, 10)) == 1
    assert supnorm_threshold([1], [0], 2, Fr(1, 2)) == 1
    with pytest.raises(PreconditionError):
        supnorm_threshold([1], [0], 2, 1)


@given(
    st.lists(st.integers(0, 5), min_size=1, max_size=3),
    st.lists(st.integers(0, 5), min_size=1, max_size=3),
    st.integers(1, 6),
    st.fractions(min_value=Fr(1, 10), max_value=Fr(9, 10), max_denominator=10),
)
def test_supnorm_monotone(p, d, l, r):
    m = supnorm_threshold(p, d, l, r)
    assert supnorm_threshold(p, d, l + 1, r) >= m
    assert supnorm_threshold(p, d, l, r * Fr(9, 10)) <= m


def test_section_plan():
    rs = ResidueSystem(2, ((2, (1, 0)), (3, (1, 1)), (5, (2, 3))))
    avoid = poly(2, 2, {(1, 0): 1, (0, 1): -1})  # dodge the diagonal
    plan = section_plan(rs, avoid, r=Fr(1, 2), m=8)
    assert rs.satisfied_by(plan.coefficients) and avoid(plan.coefficients) != 0
    assert plan.l == 30 and plan.norm_bound == sum(plan.coefficients) * Fr(1, 2) ** 8
