"""Seeded property suites behind ``verify-identities``.

Each suite draws ``cases`` random instances from one ``random.Random(seed)``
stream and checks an exact identity or inequality per instance. Failures are
kept together with a size measure so the smallest can be reported.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import generators as gen
from .destab_chain import Outcome, corollary_2_5_check, mixing_formula, run_chain
from .effective_sections import (
    CoveringError,
    determining_matrix,
    find_nonvanishing,
    residue_search,
    shift_invariance_check,
)
from .hodge_lattice import ConePosition, cone_position, in_closure
from .linear_system import pencil_decomposition_check
from .restriction_bounds import theorem_3_1_bound
from .sheaf_numerics import SheafClass, inequality_2_2_check, verify_identity_2_1

DEFAULT_SEED = 20240601


@dataclass
class SuiteResult:
    suite: str
    cases: int
    seed: int
    passed: int = 0
    failures: list[tuple[int, dict]] = field(default_factory=list)
    skipped: int = 0

    @property
    def failed(self) -> int:
        return len(self.failures)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        out = {
            "suite": self.suite,
            "seed": self.seed,
            "cases": self.cases,
            "passed": self.passed,
            "failed": self.failed,
        }
        if self.skipped:
            out["not_applicable"] = self.skipped
        if self.failures:
            out["counterexample"] = min(self.failures, key=lambda f: f[0])[1]
        return out


def _size(*values) -> int:
    total = 0
    for v in values:
        if isinstance(v, Fraction):
            total += abs(v.numerator) + v.denominator
        elif isinstance(v, SheafClass):
            total += v.rank + _size(*v.c1.coords, v.c2h)
        elif isinstance(v, (list, tuple)):
            total += _size(*v)
        elif isinstance(v, int):
            total += abs(v)
    return total


# A case function returns True (pass), False (fail) or None (not applicable),
# plus a JSON-able description and a size for minimization.
CaseFn = Callable[[random.Random], tuple[bool | None, dict, int]]


def _identity_2_1(rng):
    n = rng.randint(1, 5)
    L = gen.random_lattice(rng, n).lattice
    S, Q = gen.random_sheaf(rng, n), gen.random_sheaf(rng, n)
    cert = verify_identity_2_1(L, S, Q)
    return cert.holds, {"lattice": L.to_json(), "S": S.to_json(), "Q": Q.to_json()}, _size(S, Q)


def _inequality_2_2(rng):
    n = rng.randint(1, 5)
    L = gen.random_lattice(rng, n).lattice
    S, Q = gen.random_sheaf(rng, n), gen.random_sheaf(rng, n)
    chk = inequality_2_2_check(L, S, Q)
    return (chk.holds if chk.applicable else None), {"lattice": L.to_json(), "S": S.to_json(), "Q": Q.to_json()}, _size(S, Q)


def _lemma_1_1(rng):
    n = rng.randint(2, 5)
    rl = gen.random_lattice(rng, n)
    L = rl.lattice
    x = rl.from_w(rl.interior_w(rng))
    y = rl.from_w(rl.closure_w(rng))
    good = cone_position(L, x) is ConePosition.INTERIOR and in_closure(L, y) and not y.is_zero()
    holds = good and L.pair(x, y) > 0
    return holds, {"lattice": L.to_json(), "x": [str(c) for c in x.coords], "y": [str(c) for c in y.coords]}, _size(x.coords, y.coords)


def _mixing(rng):
    n = rng.randint(1, 5)
    L = gen.random_lattice(rng, n).lattice
    rF = rng.randint(1, 4)
    rF1 = rF + rng.randint(1, 3)
    rE = rF1 + rng.randint(1, 3)
    F, F1, E = (SheafClass(r, gen.random_class(rng, n), gen.rand_fraction(rng)) for r in (rF, rF1, rE))
    lhs, rhs = mixing_formula(L, F, F1, E)
    return lhs == rhs, {"F": F.to_json(), "F1": F1.to_json(), "E": E.to_json()}, _size(F, F1, E)


def _pencil(rng):
    cp = gen.random_profile(rng)
    return pencil_decomposition_check(cp).holds, cp.to_json(), _size(cp.t)


def _determining(rng):
    n = rng.randint(1, 3)
    d = rng.randint(0, 4)
    g = gen.random_grid(rng, n)
    cert = determining_matrix(n, d, g)
    return cert.invertible, {"n": n, "d": d, "grid": g.to_json()}, n + d


def _grid_find(rng):
    n = rng.randint(1, 3)
    d = rng.randint(0, 4)
    f = gen.random_polynomial(rng, n, d)
    g = gen.random_grid(rng, n)
    res = find_nonvanishing(f, g)
    ok = not res.zero and f(g.point(res.index)) != 0
    return ok, {"polynomial": f.to_json(), "grid": g.to_json()}, n + d


def _residue(rng):
    rs = gen.random_residue_system(rng)
    desc = rs.to_json()
    try:
        a = residue_search(rs)
    except CoveringError:
        return None, desc, rs.N
    ok = rs.satisfied_by(a) and all(0 <= x < rs.l for x in a)
    for _ in range(10):
        k = [rng.randint(-50, 50) for _ in range(rs.N)]
        ok = ok and shift_invariance_check(rs, a, k)
    return ok, desc, rs.N


def _theorem_3_1(rng):
    r = rng.randint(2, 20)
    n = rng.randint(1, 3)
    L = gen.random_lattice(rng, n).lattice
    delta = -Fraction(rng.randint(0, 40), rng.randint(1, 6))
    E = gen.sheaf_with_delta(L, r, gen.random_class(rng, n), delta)
    try:
        rep = theorem_3_1_bound(L, E, reflexive=True)
    except AssertionError:
        return False, E.to_json(), _size(E)
    ok = r // 2 in rep.details["argmax_p"] or delta == 0
    return ok, E.to_json(), _size(E)


def _corollary_2_5(rng):
    rl = gen.random_lattice(rng, rng.randint(2, 4))
    T = gen.random_filtration(rng, rl)
    cert = corollary_2_5_check(rl.lattice, T)
    return (cert.holds if cert.applicable else False), {"filtration": [t.to_json() for t in T]}, _size(T)


def _chain(rng):
    rl = gen.random_lattice(rng, rng.randint(2, 4))
    U = gen.random_universe(rng, rl)
    L = rl.lattice
    trace = run_chain(U)
    classes = [s.d_class.coords for s in trace.steps]
    ok = len(trace.steps) <= len(U.nodes) and len(set(classes)) == len(classes)
    if trace.outcome is Outcome.FOUND_POSITIVE:
        ok = ok and L.square(trace.steps[-1].d_class) > 0
    if U.root.rank == 2:
        ok = ok and len(trace.steps) == 1
    return ok, U.to_json(), len(U.nodes)


SUITES: dict[str, CaseFn] = {
    "identity-2-1": _identity_2_1,
    "inequality-2-2": _inequality_2_2,
    "lemma-1-1": _lemma_1_1,
    "mixing": _mixing,
    "pencil": _pencil,
    "determining-matrix": _determining,
    "grid-find": _grid_find,
    "residue": _residue,
    "theorem-3-1": _theorem_3_1,
    "corollary-2-5": _corollary_2_5,
    "chain": _chain,
}


def verify_identities(suite: str, cases: int, seed: int = DEFAULT_SEED) -> SuiteResult:
    if suite not in SUITES:
        raise KeyError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    if cases < 1:
        raise ValueError("cases must be at least 1")
    rng = random.Random(seed)
    fn = SUITES[suite]
    result = SuiteResult(suite, cases, seed)
    for _ in range(cases):
        verdict, desc, size = fn(rng)
        if verdict is None:
            result.skipped += 1
        elif verdict:
            result.passed += 1
        else:
            result.failures.append((size, desc))
    return result
