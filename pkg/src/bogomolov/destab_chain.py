"""Simulation of the iterative search for a destabilizing subsheaf.

Given a sheaf class E with positive discriminant and a finite universe of
candidate saturated subobjects (with inclusions), :func:`run_chain` walks
from a subobject F with (d(F,E).A) > 0 towards one whose d(F,E) lies in the
open positive cone, refining either inside F or through E/F at each step.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import PreconditionError, SchemaError
from .hodge_lattice import ConePosition, NSClass, PolarizedLattice, as_class, cone_position, is_interior
from .rational import fmt, fmt_vector
from .sheaf_numerics import SheafClass, d_class, discriminant, quotient_class


@dataclass(frozen=True)
class SubsheafUniverse:
    """A finite inclusion DAG of candidate subobjects of ``root``.

    ``edges`` holds pairs (i, j) meaning node i is contained in node j.
    Every node is contained in the root.
    """

    lattice: PolarizedLattice
    root: SheafClass
    nodes: tuple[SheafClass, ...]
    edges: tuple[tuple[int, int], ...] = ()
    _below: tuple[frozenset, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple((int(i), int(j)) for i, j in self.edges))
        n = len(self.nodes)
        for k, F in enumerate(self.nodes):
            if F.c1.dim != self.lattice.dim:
                raise PreconditionError(f"node {k} has c1 of the wrong length")
            if not 0 < F.rank < self.root.rank:
                raise PreconditionError(f"node {k} has rank {F.rank} outside (0, {self.root.rank})")
        for i, j in self.edges:
            if not (0 <= i < n and 0 <= j < n):
                raise PreconditionError(f"edge ({i}, {j}) references a missing node")
            if self.nodes[i].rank >= self.nodes[j].rank:
                raise PreconditionError(f"edge ({i}, {j}) does not increase rank")
        # transitive closure; ranks strictly increase so edges form a DAG
        below = [set() for _ in range(n)]
        for j in sorted(range(n), key=lambda k: self.nodes[k].rank):
            for i, jj in self.edges:
                if jj == j:
                    below[j].add(i)
                    below[j] |= below[i]
        object.__setattr__(self, "_below", tuple(frozenset(b) for b in below))

    def contained(self, i: int, j: int) -> bool:
        """Whether node i is contained in node j."""
        return i in self._below[j]

    def quotient_of_root(self, i: int) -> SheafClass:
        return quotient_class(self.lattice, self.nodes[i], self.root)

    @classmethod
    def from_json(cls, obj) -> "SubsheafUniverse":
        if not isinstance(obj, dict):
            raise SchemaError("universe descriptor must be an object")
        try:
            lattice = PolarizedLattice.from_json(obj["lattice"])
            root = SheafClass.from_json(obj["root"])
            nodes = tuple(SheafClass.from_json(x) for x in obj["nodes"])
            edges = tuple(tuple(e) for e in obj.get("edges", []))
        except KeyError as exc:
            raise SchemaError(f"universe descriptor missing {exc}") from None
        if any(len(e) != 2 for e in edges):
            raise SchemaError("edges must be pairs")
        return cls(lattice, root, nodes, edges)

    def to_json(self) -> dict:
        return {
            "lattice": self.lattice.to_json(),
            "root": self.root.to_json(),
            "nodes": [F.to_json() for F in self.nodes],
            "edges": [list(e) for e in self.edges],
        }


class StepCase(str, enum.Enum):
    SUB_REFINE = "sub-refine"
    QUOTIENT_REFINE = "quotient-refine"
    TERMINAL = "terminal"


class Outcome(str, enum.Enum):
    FOUND_POSITIVE = "found-positive"
    EXHAUSTED = "exhausted"


@dataclass(frozen=True)
class ChainStep:
    node: int
    d_class: NSClass
    square: Fraction
    case: StepCase

    def to_json(self) -> dict:
        return {
            "node": self.node,
            "d_class": fmt_vector(self.d_class.coords),
            "square": fmt(self.square),
            "case": self.case.value,
        }


@dataclass
class ChainTrace:
    steps: list[ChainStep]
    outcome: Outcome
    blocking_node: int | None = None

    def to_json(self) -> dict:
        out = {"outcome": self.outcome.value, "steps": [s.to_json() for s in self.steps]}
        if self.blocking_node is not None:
            out["blocking_node"] = self.blocking_node
        return out


def mixing_formula(L: PolarizedLattice, F: SheafClass, F1: SheafClass, E: SheafClass) -> tuple[NSClass, NSClass]:
    """Both sides of the decomposition of d(F1,E) for F in F1 in E.

    d(F1,E) = (rk(F1/F)/rk F1) d(F1/F, E/F)
              + (rk F rk(E/F1)) / (rk F1 rk(E/F)) d(F,E)
    """
    if not F.rank < F1.rank < E.rank:
        raise PreconditionError(f"need rk F < rk F1 < rk E, got {F.rank}, {F1.rank}, {E.rank}")
    lhs = d_class(F1, E)
    Q1 = quotient_class(L, F, F1)
    QE = quotient_class(L, F, E)
    a = Fraction(F1.rank - F.rank, F1.rank)
    b = Fraction(F.rank * (E.rank - F1.rank), F1.rank * (E.rank - F.rank))
    rhs = d_class(Q1, QE).scale(a) + d_class(F, E).scale(b)
    return lhs, rhs


def _pick(scored: list[tuple[Fraction, int]]) -> int | None:
    # largest score, earliest input order on ties
    if not scored:
        return None
    return max(scored, key=lambda s: (s[0], -s[1]))[1]


def run_chain(
    U: SubsheafUniverse,
    A=None,
    prefer_quotient: bool = False,
    select: str = "max-pairing",
) -> ChainTrace:
    """Iterate refinements until d(F,E) is in the open positive cone.

    ``A`` is the auxiliary ample class (defaults to the lattice's reference
    class). The starting node is the one with the largest positive
    (d(F,E).A), or the first such node when ``select == "first"``.
    Refinement candidates are chosen by largest (d(F1,E).A).
    """
    L, E = U.lattice, U.root
    A = L.ample if A is None else as_class(A)
    if not is_interior(L, A):
        raise PreconditionError("auxiliary class must be interior")
    if discriminant(L, E) <= 0:
        raise PreconditionError("discriminant of the root is not positive")
    if select not in ("max-pairing", "first"):
        raise PreconditionError(f"unknown selection rule {select!r}")

    dcls = [d_class(F, E) for F in U.nodes]
    apair = [L.pair(x, A) for x in dcls]
    positive = [(apair[k], k) for k in range(len(U.nodes)) if apair[k] > 0]
    if not positive:
        raise PreconditionError("no node has positive pairing with the auxiliary class")
    current = positive[0][1] if select == "first" else _pick(positive)

    steps: list[ChainStep] = []
    seen: set[tuple[Fraction, ...]] = set()
    while True:
        x = dcls[current]
        seen.add(x.coords)
        sq = L.square(x)
        if cone_position(L, x) is ConePosition.INTERIOR:
            steps.append(ChainStep(current, x, sq, StepCase.TERMINAL))
            return ChainTrace(steps, Outcome.FOUND_POSITIVE)
        F = U.nodes[current]
        branches = []
        if discriminant(L, F) > 0:
            branches.append(StepCase.SUB_REFINE)
        if discriminant(L, U.quotient_of_root(current)) > 0:
            branches.append(StepCase.QUOTIENT_REFINE)
        if prefer_quotient:
            branches.reverse()
        nxt, case = None, None
        for branch in branches:
            cands = []
            for k, F1 in enumerate(U.nodes):
                if dcls[k].coords in seen:
                    continue
                if branch is StepCase.SUB_REFINE and U.contained(k, current):
                    ok = is_interior(L, d_class(F1, F))
                elif branch is StepCase.QUOTIENT_REFINE and U.contained(current, k):
                    QF1 = quotient_class(L, F, F1)
                    ok = is_interior(L, d_class(QF1, U.quotient_of_root(current)))
                else:
                    continue
                if ok:
                    cands.append((apair[k], k))
            nxt = _pick(cands)
            if nxt is not None:
                case = branch
                break
        if nxt is None:
            break
        steps.append(ChainStep(current, x, sq, case))
        current = nxt
    steps.append(ChainStep(current, dcls[current], L.square(dcls[current]), StepCase.TERMINAL))
    return ChainTrace(steps, Outcome.EXHAUSTED, blocking_node=current)


@dataclass
class FiltrationCertificate:
    applicable: bool
    holds: bool | None = None
    violating_index: int | None = None
    reason: str | None = None
    ledger: list[Fraction] = field(default_factory=list)
    bound: Fraction | None = None
    delta: Fraction | None = None

    def to_json(self) -> dict:
        out = {"applicable": self.applicable, "holds": self.holds}
        if self.violating_index is not None:
            out.update(violating_index=self.violating_index, reason=self.reason)
        if self.ledger:
            out["delta"] = fmt(self.delta)
            out["ledger"] = [fmt(v) for v in self.ledger]
            out["bound"] = fmt(self.bound)
        return out


def corollary_2_5_check(L: PolarizedLattice, filtration: Sequence[SheafClass]) -> FiltrationCertificate:
    """Chain the discriminant bound along T_1 in ... in T_l = E.

    Requires delta(T_i/T_{i-1}) <= 0 for all i and d(T_{i-1}, T_i) interior
    for i >= 2. The ledger lists, in order, the four quantities

        sum delta(T_i/T_{i-1}) + sum rk T_i (rk T_i - 1)/2 d(T_{i-1},T_i)^2
        rk E (rk E - 1)/2 * sum d(T_{i-1},T_i)^2
        rk E (rk E - 1)/2 * (sum d(T_{i-1},T_i))^2
        rk E (rk E - 1)/2 * d(T_1,E)^2

    and ``holds`` means delta(E) <= each one in turn (with the last equal to
    the third).
    """
    T = list(filtration)
    if len(T) < 2:
        raise PreconditionError("filtration needs length at least 2")
    for i in range(1, len(T)):
        if T[i].rank <= T[i - 1].rank:
            raise PreconditionError(f"ranks do not increase at index {i}")
    E = T[-1]
    quotients = [T[0]] + [quotient_class(L, T[i - 1], T[i]) for i in range(1, len(T))]
    for i, Qi in enumerate(quotients):
        if discriminant(L, Qi) > 0:
            return FiltrationCertificate(False, violating_index=i + 1, reason="quotient discriminant positive")
    steps = [d_class(T[i - 1], T[i]) for i in range(1, len(T))]
    for i, x in enumerate(steps):
        if not is_interior(L, x):
            return FiltrationCertificate(False, violating_index=i + 2, reason="d(T_{i-1}, T_i) not interior")
    delta = discriminant(L, E)
    coef = Fraction(E.rank * (E.rank - 1), 2)
    squares = [L.square(x) for x in steps]
    first = sum((discriminant(L, Q) for Q in quotients), Fraction(0)) + sum(
        (Fraction(T[i].rank * (T[i].rank - 1), 2) * squares[i - 1] for i in range(1, len(T))), Fraction(0)
    )
    second = coef * sum(squares, Fraction(0))
    total = steps[0]
    for x in steps[1:]:
        total = total + x
    third = coef * L.square(total)
    fourth = coef * L.square(d_class(T[0], E))
    holds = delta <= first <= second <= third and third == fourth
    return FiltrationCertificate(True, holds, ledger=[first, second, third, fourth], bound=fourth, delta=delta)


@dataclass
class ExtremalResult:
    node: int
    square: Fraction
    maximal_in_universe: bool
    dominated: list[int]
    delta_nonpositive: bool

    def to_json(self) -> dict:
        return {
            "node": self.node,
            "square": fmt(self.square),
            "maximal_in_universe": self.maximal_in_universe,
            "dominated": self.dominated,
            "delta_nonpositive": self.delta_nonpositive,
        }


def corollary_2_4_extremal(U: SubsheafUniverse) -> ExtremalResult:
    """Node of D(E) = {F : d(F,E) interior} maximizing (d(F,E)^2).

    ``dominated`` lists the members of D(E) that have a sub-refinement
    F1 in F with d(F1,F) interior inside the universe; such F cannot be
    extremal, since the refinement has strictly larger square. If the
    returned node has positive discriminant its maximality is only
    relative to the universe.
    """
    L, E = U.lattice, U.root
    D = [k for k, F in enumerate(U.nodes) if is_interior(L, d_class(F, E))]
    if not D:
        raise PreconditionError("no node has d(F,E) in the positive cone")
    squares = {k: L.square(d_class(U.nodes[k], E)) for k in D}
    best = _pick([(squares[k], k) for k in D])

    def refinable(k: int) -> bool:
        F = U.nodes[k]
        return any(U.contained(j, k) and is_interior(L, d_class(U.nodes[j], F)) for j in range(len(U.nodes)))

    dominated = [k for k in D if refinable(k)]
    return ExtremalResult(
        node=best,
        square=squares[best],
        maximal_in_universe=best not in dominated,
        dominated=dominated,
        delta_nonpositive=discriminant(L, U.nodes[best]) <= 0,
    )


def telescoping_check(F1: SheafClass, F: SheafClass, E: SheafClass) -> bool:
    """d(F1,E) = d(F1,F) + d(F,E)."""
    return d_class(F1, E) == d_class(F1, F) + d_class(F, E)
