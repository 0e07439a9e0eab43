"""Deciding (alpha, U2)-migrativity of a 2-uninorm U1.

U1 is migrative when U1(U2(alpha,x), y) = U1(x, U2(alpha,y)) for all x, y.
Two independent routes decide it: the brute-force scan of that equation,
and characterisations that look only at the rows of U1 at the pivots
lam = U2(alpha,e1) and mu = U2(alpha,f1). The audit runs both and reports
any disagreement.

Everything works on table indices; no tolerance is ever involved.
"""

import enum
import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from src.axioms import is_2uninorm
from src.errors import PreconditionViolated, ShapeMismatch
from src.operators import SubclassTag, classify, uninorm_neutral
from src.utils import format_value

logger = logging.getLogger(__name__)

CASES = ("i", "ii", "iii", "iv")


# ---------------------------------------------------------------------------
# Pairs and verdicts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MigrativePair:
    u1: object  # OperatorTable
    triple1: object  # NeutralTriple
    u2: object
    triple2: object
    alpha: object  # GridPoint
    name1: str = "U1"
    name2: str = "U2"

    @property
    def n(self):
        return self.u1.grid.n

    def identity(self):
        return {
            "u1": self.name1,
            "triple1": str(self.triple1),
            "u2": self.name2,
            "triple2": str(self.triple2),
            "alpha": str(self.alpha),
        }

    def sort_key(self):
        return (self.name1, self.triple1.indices, self.name2, self.triple2.indices, self.alpha.index)


def make_pair(u1, triple1, u2, triple2, alpha, name1="U1", name2="U2", verify=True):
    """
    Builds a pair after checking both operands.
    Args:
        u1, u2 (OperatorTable): Tables on one grid.
        triple1, triple2 (NeutralTriple): Their 2-neutral elements.
        alpha (GridPoint): The migrativity parameter.
        verify (bool): Re-run the axiom suite on both tables.
    Returns:
        MigrativePair: The validated pair.
    Raises:
        PreconditionViolated: If grids differ or an operand is not a 2-uninorm.
    """
    if not (u1.grid == u2.grid and triple1.n == triple2.n == alpha.n == u1.grid.n):
        raise PreconditionViolated(
            f"pair operands must share one grid (U1 n={u1.grid.n}, U2 n={u2.grid.n}, alpha n={alpha.n})"
        )
    if verify:
        for name, table, triple in ((name1, u1, triple1), (name2, u2, triple2)):
            if not is_2uninorm(table, triple):
                raise PreconditionViolated(f"{name} is not a 2-uninorm with triple {triple}")
    return MigrativePair(u1, triple1, u2, triple2, alpha, name1, name2)


@dataclass(frozen=True)
class PivotValues:
    lam: int
    mu: int
    n: int

    def __str__(self):
        return f"(lam={format_value(Fraction(self.lam, self.n))}, mu={format_value(Fraction(self.mu, self.n))})"


def pivot_values(p):
    """lam = U2(alpha, e1) and mu = U2(alpha, f1), as grid indices."""
    row = p.u2.entries[p.alpha.index]
    return PivotValues(int(row[p.triple1.e.index]), int(row[p.triple1.f.index]), p.n)


class Route(enum.Enum):
    BRUTE_FORCE = "brute-force"
    LOWER_PIVOT = "lower-pivot"
    UPPER_PIVOT = "upper-pivot"
    SPECIALIZATION = "specialization"


@dataclass(frozen=True)
class EquationWitness:
    """A cell where U1(U2(alpha,x),y) != U1(x,U2(alpha,y)); all indices."""

    x: int
    y: int
    left: int
    right: int


@dataclass(frozen=True)
class ConditionFailure:
    x: int
    condition: str
    left: int
    right: int


@dataclass(frozen=True)
class MigrativityVerdict:
    migrative: bool
    route: Route
    case: Optional[str] = None
    case_conditions: tuple = ()
    witness: Optional[EquationWitness] = None
    condition_failure: Optional[ConditionFailure] = None

    def as_record(self, n):
        def fmt(i):
            return format_value(Fraction(i, n))

        record = {
            "route": self.route.value,
            "case": self.case,
            "migrative": self.migrative,
            "case_conditions": list(self.case_conditions),
        }
        if self.witness is not None:
            w = self.witness
            record["witness"] = {"x": fmt(w.x), "y": fmt(w.y), "left": fmt(w.left), "right": fmt(w.right)}
        if self.condition_failure is not None:
            c = self.condition_failure
            record["condition_failure"] = {
                "x": fmt(c.x), "condition": c.condition, "left": fmt(c.left), "right": fmt(c.right)
            }
        return record


# ---------------------------------------------------------------------------
# Brute force
# ---------------------------------------------------------------------------

def equation_sides(p):
    """Arrays left[x,y] = U1(U2(alpha,x),y) and right[x,y] = U1(x,U2(alpha,y))."""
    table = p.u1.entries
    row = p.u2.entries[p.alpha.index]
    return table[row, :], table[:, row]


def brute_force_migrative(p):
    """
    Checks the migrativity equation on every grid cell.
    Args:
        p (MigrativePair): The pair.
    Returns:
        MigrativityVerdict: Route brute-force; the first violating (x, y) in row-major order when negative.
    """
    left, right = equation_sides(p)
    hits = np.argwhere(left != right)
    if len(hits) == 0:
        return MigrativityVerdict(True, Route.BRUTE_FORCE)
    x, y = (int(v) for v in hits[0])
    return MigrativityVerdict(
        False, Route.BRUTE_FORCE, witness=EquationWitness(x, y, int(left[x, y]), int(right[x, y]))
    )


def witness_is_genuine(p, witness):
    """Re-evaluates a brute-force witness by direct table lookups."""
    row_alpha = p.u2.entries[p.alpha.index]
    left = p.u1.at(int(row_alpha[witness.x]), witness.y)
    right = p.u1.at(witness.x, int(row_alpha[witness.y]))
    return left != right and (left, right) == (witness.left, witness.right)


# ---------------------------------------------------------------------------
# Pointwise conditions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Clause:
    label: str
    lhs: np.ndarray
    rhs: np.ndarray
    lo: int
    hi: int


def _first_failure(clauses):
    best = None
    for clause in clauses:
        mismatch = np.flatnonzero(clause.lhs[clause.lo : clause.hi + 1] != clause.rhs[clause.lo : clause.hi + 1])
        if mismatch.size:
            x = clause.lo + int(mismatch[0])
            if best is None or x < best.x:
                best = ConditionFailure(x, clause.label, int(clause.lhs[x]), int(clause.rhs[x]))
    return best


class _PairRows:
    """Rows of U1 and U2 that the characterisations compare."""

    def __init__(self, p):
        self.p = p
        self.n = p.n
        self.e1, self.a1, self.f1 = p.triple1.indices
        self.table1 = p.u1.entries
        self.alpha_row = p.u2.entries[p.alpha.index]
        self.lam = int(self.alpha_row[self.e1])
        self.mu = int(self.alpha_row[self.f1])

    def fmt(self, index):
        return format_value(Fraction(index, self.n))

    def full(self, pivot, name):
        return [_Clause(f"U1({name},x)=U2(alpha,x)", self.table1[pivot], self.alpha_row, 0, self.n)]

    def split(self, low, high, seam, low_name="lam", high_name="mu"):
        return [
            _Clause(f"U2(alpha,x)=U1({low_name},x) on [0,{self.fmt(seam)}]", self.alpha_row, self.table1[low], 0, seam),
            _Clause(
                f"U2(alpha,x)=U1({high_name},x) on [{self.fmt(seam)},1]", self.alpha_row, self.table1[high], seam, self.n
            ),
        ]

    def anchor_above(self, pivot, name):
        return _Clause(
            f"U1({name},x)=U1(a1,x) on [a1,1]", self.table1[pivot], self.table1[self.a1], self.a1, self.n
        )

    def anchor_below(self, pivot, name):
        return _Clause(f"U1({name},x)=U1(a1,x) on [0,a1]", self.table1[pivot], self.table1[self.a1], 0, self.a1)

    def case_clauses(self, case):
        if case == "i":
            return self.full(self.lam, "lam")
        if case == "ii":
            return self.split(self.lam, self.mu, self.a1) + [self.anchor_above(self.lam, "lam")]
        if case == "iii":
            return self.split(self.lam, self.mu, self.a1) + [self.anchor_below(self.mu, "mu")]
        if case == "iv":
            return self.full(self.mu, "mu")
        raise ValueError(f"unknown case {case!r}")


def _verdict(route, case, trace, clauses):
    failure = _first_failure(clauses)
    return MigrativityVerdict(failure is None, route, case, tuple(trace), condition_failure=failure)


# ---------------------------------------------------------------------------
# Characterisation by the lower pivot lam
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CaseSelection:
    cases: tuple
    traces: dict  # case -> tuple of inequality strings


def classify_lower_pivot_case(p, audit=False):
    """
    Selects the characterisation case from the position of lam = U2(alpha,e1).

    (i) lam <= e1 and mu <= a1; (ii) lam <= e1 and mu >= a1;
    (iii) e1 <= lam <= a1; (iv) lam >= a1. Normal mode keeps the first
    applicable case, audit mode keeps all of them.
    """
    rows = _PairRows(p)
    lam, mu, e1, a1 = rows.lam, rows.mu, rows.e1, rows.a1
    f = rows.fmt
    lam_s, mu_s = f"U2(alpha,e1)={f(lam)}", f"U2(alpha,f1)={f(mu)}"
    candidates = [
        ("i", lam <= e1 and mu <= a1, (f"{lam_s} <= e1={f(e1)}", f"{mu_s} <= a1={f(a1)}")),
        ("ii", lam <= e1 and mu >= a1, (f"{lam_s} <= e1={f(e1)}", f"{mu_s} >= a1={f(a1)}")),
        ("iii", e1 <= lam <= a1, (f"{lam_s} in [e1={f(e1)}, a1={f(a1)}]",)),
        ("iv", lam >= a1, (f"{lam_s} >= a1={f(a1)}",)),
    ]
    return _select(candidates, audit, "lower")


def classify_upper_pivot_case(p, audit=False):
    """
    Selects the characterisation case from the position of mu = U2(alpha,f1).

    (i) mu <= a1; (ii) a1 <= mu <= f1; (iii) mu >= f1 and lam <= a1;
    (iv) mu >= f1 and lam >= a1.
    """
    rows = _PairRows(p)
    lam, mu, a1, f1 = rows.lam, rows.mu, rows.a1, rows.f1
    f = rows.fmt
    lam_s, mu_s = f"U2(alpha,e1)={f(lam)}", f"U2(alpha,f1)={f(mu)}"
    candidates = [
        ("i", mu <= a1, (f"{mu_s} <= a1={f(a1)}",)),
        ("ii", a1 <= mu <= f1, (f"{mu_s} in [a1={f(a1)}, f1={f(f1)}]",)),
        ("iii", mu >= f1 and lam <= a1, (f"{mu_s} >= f1={f(f1)}", f"{lam_s} <= a1={f(a1)}")),
        ("iv", mu >= f1 and lam >= a1, (f"{mu_s} >= f1={f(f1)}", f"{lam_s} >= a1={f(a1)}")),
    ]
    return _select(candidates, audit, "upper")


def _select(candidates, audit, which):
    chosen = [(case, trace) for case, applies, trace in candidates if applies]
    if not chosen:
        raise RuntimeError(f"no {which}-pivot case applies; the case split is meant to be total")
    if not audit:
        chosen = chosen[:1]
    return CaseSelection(tuple(case for case, _ in chosen), {case: trace for case, trace in chosen})


def _characterize(p, selector, route, case=None):
    selection = selector(p, audit=case is not None)
    if case is None:
        case = selection.cases[0]
    elif case not in selection.cases:
        raise PreconditionViolated(f"case ({case}) does not apply to this pair; applicable: {selection.cases}")
    return _verdict(route, case, selection.traces[case], _PairRows(p).case_clauses(case))


def characterize_by_lower_pivot(p, case=None):
    """
    Decides migrativity from the lam-classified case condition.

    (i) U1(lam,x)=U2(alpha,x) for all x.
    (ii) U2(alpha,x)=U1(lam,x) on [0,a1], =U1(mu,x) on [a1,1], and U1(lam,x)=U1(a1,x) on [a1,1].
    (iii) the same split, and U1(mu,x)=U1(a1,x) on [0,a1].
    (iv) U1(mu,x)=U2(alpha,x) for all x.

    Args:
        p (MigrativePair): The pair.
        case (str, optional): Force one applicable case instead of the first.
    Returns:
        MigrativityVerdict: With the first x where the condition fails when negative.
    """
    return _characterize(p, classify_lower_pivot_case, Route.LOWER_PIVOT, case)


def characterize_by_upper_pivot(p, case=None):
    """Decides migrativity from the mu-classified case; conditions as the lower-pivot cases."""
    return _characterize(p, classify_upper_pivot_case, Route.UPPER_PIVOT, case)


def all_case_verdicts(p, route):
    """Every applicable case of one characterisation, evaluated separately."""
    selector = classify_lower_pivot_case if route is Route.LOWER_PIVOT else classify_upper_pivot_case
    selection = selector(p, audit=True)
    rows = _PairRows(p)
    return {case: _verdict(route, case, selection.traces[case], rows.case_clauses(case)) for case in selection.cases}


def failure_is_genuine(failure):
    return failure.left != failure.right


# ---------------------------------------------------------------------------
# Sub-results
# ---------------------------------------------------------------------------

class Outcome(enum.Enum):
    HOLDS = "holds"
    VIOLATED = "violated"
    NOT_APPLICABLE = "not-applicable"


@dataclass(frozen=True)
class RuleCheck:
    outcome: Outcome
    items: tuple = ()
    failed: tuple = ()

    @property
    def holds(self):
        return self.outcome is not Outcome.VIOLATED

    @property
    def applicable(self):
        return self.outcome is not Outcome.NOT_APPLICABLE


def _rule(applied, failed):
    if not applied:
        return RuleCheck(Outcome.NOT_APPLICABLE)
    return RuleCheck(Outcome.VIOLATED if failed else Outcome.HOLDS, tuple(applied), tuple(failed))


@dataclass(frozen=True)
class PivotBoundsCheck:
    """Result of the pivot bounds: lam <= e1 implies mu <= f1, mu >= f1 implies lam >= e1.

    ``violations`` lists (item, on_boundary) pairs. A violation is on the
    boundary when its premise holds with equality (lam = e1, resp. mu = f1);
    only such violations can occur on a genuine 2-uninorm.
    """

    violations: tuple = ()

    @property
    def holds(self):
        return not self.violations

    @property
    def strict_holds(self):
        return all(boundary for _, boundary in self.violations)


def check_pivot_bounds(u2, triple1, alpha):
    """
    Checks the two pivot bounds, with no migrativity premise.
    Args:
        u2 (OperatorTable): A verified 2-uninorm.
        triple1 (NeutralTriple): The (e1, a1, f1) the pivots are taken at.
        alpha (GridPoint): The parameter.
    Returns:
        PivotBoundsCheck: Violations of (i) and (ii), each flagged as boundary or not.
    """
    if not (triple1.n == alpha.n == u2.grid.n):
        raise ValueError("pivot bounds need u2, triple1 and alpha on one grid")
    row = u2.entries[alpha.index]
    e1, _, f1 = triple1.indices
    lam, mu = int(row[e1]), int(row[f1])
    violations = []
    if lam <= e1 and mu > f1:
        violations.append(("i", lam == e1))
    if mu >= f1 and lam < e1:
        violations.append(("ii", mu == f1))
    return PivotBoundsCheck(tuple(violations))


def _require_migrative(p, brute, check):
    if brute is None:
        brute = brute_force_migrative(p)
    if not brute.migrative:
        raise PreconditionViolated(f"{check} needs a migrative pair; brute force found {brute.witness}")


def check_anchor_bounds(p, brute=None):
    """
    On a migrative pair: lam in [e1,a1] implies U2(alpha,a1) >= a1, and mu in
    [a1,f1] implies U2(alpha,a1) <= a1.

    The migrativity premise comes from the brute-force scan (``brute`` may
    pass an already computed verdict), never from a characterisation.

    Raises:
        PreconditionViolated: If the pair is not migrative.
    """
    _require_migrative(p, brute, "anchor bounds check")
    rows = _PairRows(p)
    at_anchor = int(rows.alpha_row[rows.a1])
    applied, failed = [], []
    if rows.e1 <= rows.lam <= rows.a1:
        applied.append("i")
        if at_anchor < rows.a1:
            failed.append("i")
    if rows.a1 <= rows.mu <= rows.f1:
        applied.append("ii")
        if at_anchor > rows.a1:
            failed.append("ii")
    return _rule(applied, failed)


def check_single_pivot_rule(p, brute=None):
    """
    When lam >= a1, migrativity iff U1(mu,x)=U2(alpha,x) for all x (i); when
    mu <= a1, migrativity iff U1(lam,x)=U2(alpha,x) for all x (ii).

    Returns:
        RuleCheck: HOLDS when the brute-force verdict equals each applicable
        condition, NOT_APPLICABLE when neither premise holds.
    """
    if brute is None:
        brute = brute_force_migrative(p)
    rows = _PairRows(p)
    applied, failed = [], []
    for item, applies, clauses in (
        ("i", rows.lam >= rows.a1, rows.full(rows.mu, "mu")),
        ("ii", rows.mu <= rows.a1, rows.full(rows.lam, "lam")),
    ):
        if applies:
            applied.append(item)
            if (_first_failure(clauses) is None) != brute.migrative:
                failed.append(item)
    return _rule(applied, failed)


def check_split_pivot_rule(p, brute=None):
    """
    When lam in [e1,a1] (i) or mu in [a1,f1] (ii), migrativity iff the split
    condition plus the matching anchor condition holds.
    """
    if brute is None:
        brute = brute_force_migrative(p)
    rows = _PairRows(p)
    applied, failed = [], []
    for item, applies, case in (
        ("i", rows.e1 <= rows.lam <= rows.a1, "iii"),
        ("ii", rows.a1 <= rows.mu <= rows.f1, "ii"),
    ):
        if applies:
            applied.append(item)
            if (_first_failure(rows.case_clauses(case)) is None) != brute.migrative:
                failed.append(item)
    return _rule(applied, failed)


def check_pivot_identity(p, brute=None):
    """
    On a migrative pair, U2(alpha,x) = U1(x,lam) wherever U2(alpha,x) <= a1
    and U2(alpha,x) = U1(x,mu) wherever U2(alpha,x) >= a1.

    Raises:
        PreconditionViolated: If the pair is not migrative.
    """
    _require_migrative(p, brute, "pivot identity check")
    rows = _PairRows(p)
    row = rows.alpha_row
    below = row <= rows.a1
    above = row >= rows.a1
    failed = []
    if np.any(below & (row != rows.table1[:, rows.lam])):
        failed.append("below-a1")
    if np.any(above & (row != rows.table1[:, rows.mu])):
        failed.append("above-a1")
    return _rule(["below-a1", "above-a1"], failed)


# ---------------------------------------------------------------------------
# Specialisations to named subclasses
# ---------------------------------------------------------------------------

class Shape(enum.Enum):
    TNORM = "tnorm"
    TCONORM = "tconorm"
    UNINORM = "uninorm"
    NULLNORM = "nullnorm"
    UNI_NULLNORM = "uni-nullnorm"
    NULL_UNINORM = "null-uninorm"
    OVER_TNORM = "over-tnorm"
    OVER_TCONORM = "over-tconorm"


_SHAPE_BY_U1_TAG = {
    SubclassTag.TNORM: Shape.TNORM,
    SubclassTag.TCONORM: Shape.TCONORM,
    SubclassTag.UNINORM: Shape.UNINORM,
    SubclassTag.NULLNORM: Shape.NULLNORM,
    SubclassTag.UNI_NULLNORM: Shape.UNI_NULLNORM,
    SubclassTag.NULL_UNINORM: Shape.NULL_UNINORM,
}

_SHAPE_BY_U2_TAG = {
    SubclassTag.TNORM: Shape.OVER_TNORM,
    SubclassTag.TCONORM: Shape.OVER_TCONORM,
}


def applicable_shapes(tag1, tag2):
    """Shapes whose specialised condition covers a pair with these tags.

    The shapes keyed on U1's tag hold against any 2-uninorm U2; the two
    keyed on U2's tag hold for any 2-uninorm U1.
    """
    shapes = []
    if tag1 in _SHAPE_BY_U1_TAG:
        shapes.append(_SHAPE_BY_U1_TAG[tag1])
    if tag2 in _SHAPE_BY_U2_TAG:
        shapes.append(_SHAPE_BY_U2_TAG[tag2])
    return shapes


def _shape_branches(shape, p):
    """(label, applies, clauses) for each branch of a shape's condition."""
    rows = _PairRows(p)
    n, a1 = rows.n, rows.a1
    row = rows.alpha_row
    f = rows.fmt

    if shape is Shape.TNORM:
        return [("U(alpha,1)", True, rows.full(int(row[n]), "U(alpha,1)"))]
    if shape is Shape.TCONORM:
        return [("U(alpha,0)", True, rows.full(int(row[0]), "U(alpha,0)"))]
    if shape is Shape.UNINORM:
        e_u = uninorm_neutral(p.triple1).index
        return [(f"U(alpha,e_U={f(e_u)})", True, rows.full(int(row[e_u]), "U(alpha,e_U)"))]
    if shape is Shape.NULLNORM:
        low, high = int(row[0]), int(row[n])
        return [
            (f"U(alpha,0)={f(low)} <= a_N", low <= a1, rows.split(low, high, a1, "U(alpha,0)", "U(alpha,1)")),
            (f"U(alpha,0)={f(low)} >= a_N", low >= a1, rows.full(high, "U(alpha,1)")),
        ]
    if shape is Shape.UNI_NULLNORM:
        at_e, top = int(row[rows.e1]), int(row[n])
        return [
            (f"U(alpha,1)={f(top)} <= a_F", top <= a1, rows.full(at_e, "U(alpha,e_F)")),
            (f"U(alpha,1)={f(top)} >= a_F", top >= a1, rows.split(at_e, top, a1, "U(alpha,e_F)", "U(alpha,1)")),
        ]
    if shape is Shape.NULL_UNINORM:
        bottom, at_f = int(row[0]), int(row[rows.f1])
        return [
            (f"U(alpha,0)={f(bottom)} <= a_G", bottom <= a1, rows.split(bottom, at_f, a1, "U(alpha,0)", "U(alpha,f_G)")),
            (f"U(alpha,0)={f(bottom)} >= a_G", bottom >= a1, rows.full(at_f, "U(alpha,f_G)")),
        ]
    if shape is Shape.OVER_TNORM:
        lam, mu = rows.lam, rows.mu
        return [
            (f"T(alpha,f1)={f(mu)} <= a1", mu <= a1, rows.full(lam, "T(alpha,e1)")),
            (
                f"T(alpha,f1)={f(mu)} >= a1",
                mu >= a1,
                rows.split(lam, mu, a1, "T(alpha,e1)", "T(alpha,f1)") + [rows.anchor_above(lam, "T(alpha,e1)")],
            ),
        ]
    if shape is Shape.OVER_TCONORM:
        lam, mu = rows.lam, rows.mu
        return [
            (
                f"S(alpha,e1)={f(lam)} <= a1",
                lam <= a1,
                rows.split(lam, mu, a1, "S(alpha,e1)", "S(alpha,f1)") + [rows.anchor_below(mu, "S(alpha,f1)")],
            ),
            (f"S(alpha,e1)={f(lam)} >= a1", lam >= a1, rows.full(mu, "S(alpha,f1)")),
        ]
    raise ValueError(f"unknown shape {shape!r}")


def _checked_shapes(p, tag1, tag2):
    actual1, actual2 = classify(p.triple1), classify(p.triple2)
    if (tag1, tag2) != (actual1, actual2):
        raise ShapeMismatch(
            f"tags ({tag1.value}, {tag2.value}) do not match the pair's triples ({actual1.value}, {actual2.value})"
        )
    shapes = applicable_shapes(tag1, tag2)
    if not shapes:
        raise ShapeMismatch(f"no specialisation covers a {tag1.value} against a {tag2.value}")
    return shapes


def specialization_dispatch(p, tag1, tag2):
    """
    Decides migrativity through the condition specialised to the pair's subclasses.
    Args:
        p (MigrativePair): The pair.
        tag1, tag2 (SubclassTag): Subclasses of U1 and U2, matching their triples.
    Returns:
        MigrativityVerdict: Route specialization, case = shape name.
    Raises:
        ShapeMismatch: If the tags disagree with the triples or fit no shape.
    """
    shape = _checked_shapes(p, tag1, tag2)[0]
    for label, applies, clauses in _shape_branches(shape, p):
        if applies:
            return _verdict(Route.SPECIALIZATION, shape.value, (label,), clauses)
    raise RuntimeError(f"no branch of shape {shape.value} applies; the branch split is meant to be total")


def all_specialization_verdicts(p, tag1=None, tag2=None):
    """Every applicable shape and branch, evaluated separately. Empty when no shape fits."""
    tag1 = classify(p.triple1) if tag1 is None else tag1
    tag2 = classify(p.triple2) if tag2 is None else tag2
    try:
        shapes = _checked_shapes(p, tag1, tag2)
    except ShapeMismatch:
        return []
    verdicts = []
    for shape in shapes:
        for label, applies, clauses in _shape_branches(shape, p):
            if applies:
                verdicts.append(_verdict(Route.SPECIALIZATION, shape.value, (label,), clauses))
    return verdicts


# ---------------------------------------------------------------------------
# Audit
# ---------------------------------------------------------------------------

@dataclass
class AuditReport:
    """Everything the equivalence audit found. Records are plain dicts keyed by pair identity."""

    pairs_checked: int = 0
    migrative_pairs: int = 0
    specializations_checked: int = 0
    specializations_by_shape: Counter = field(default_factory=Counter)
    disagreements: list = field(default_factory=list)
    intra_disagreements: list = field(default_factory=list)
    rule_violations: list = field(default_factory=list)
    pivot_bound_violations: dict = field(default_factory=dict)
    outcomes: Counter = field(default_factory=Counter)
    complete: bool = True

    @property
    def strict_pivot_violations(self):
        return [v for v in self.pivot_bound_violations.values() if not v["boundary"]]

    @property
    def clean(self):
        return not (
            self.disagreements or self.intra_disagreements or self.rule_violations or self.strict_pivot_violations
        )

    def merge(self, other):
        self.pairs_checked += other.pairs_checked
        self.migrative_pairs += other.migrative_pairs
        self.specializations_checked += other.specializations_checked
        self.specializations_by_shape.update(other.specializations_by_shape)
        self.disagreements.extend(other.disagreements)
        self.intra_disagreements.extend(other.intra_disagreements)
        self.rule_violations.extend(other.rule_violations)
        self.pivot_bound_violations.update(other.pivot_bound_violations)
        self.outcomes.update(other.outcomes)
        self.complete = self.complete and other.complete
        return self

    def sort(self):
        def key(record):
            return tuple(str(record["pair"][k]) for k in ("u1", "triple1", "u2", "triple2", "alpha"))

        self.disagreements.sort(key=key)
        self.intra_disagreements.sort(key=key)
        self.rule_violations.sort(key=lambda r: (key(r), r["check"]))
        self.pivot_bound_violations = dict(sorted(self.pivot_bound_violations.items()))
        return self

    def summary(self):
        return {
            "pairs_checked": self.pairs_checked,
            "migrative_pairs": self.migrative_pairs,
            "specializations_checked": self.specializations_checked,
            "specializations_by_shape": dict(sorted(self.specializations_by_shape.items())),
            "disagreements": len(self.disagreements),
            "intra_disagreements": len(self.intra_disagreements),
            "rule_violations": len(self.rule_violations),
            "pivot_bound_violations": len(self.pivot_bound_violations),
            "pivot_bound_violations_off_boundary": len(self.strict_pivot_violations),
            "not_applicable": {k: v for k, v in sorted(self.outcomes.items()) if k.endswith("not-applicable")},
            "complete": self.complete,
        }


def _disagreement_record(p, kind, verdicts):
    return {
        "record": kind,
        "pair": p.identity(),
        "verdicts": [v.as_record(p.n) for v in verdicts],
    }


def audit_pair(p, report):
    """Runs every decision route and sub-check on one pair, appending findings to report."""
    n = p.n
    report.pairs_checked += 1
    brute = brute_force_migrative(p)
    if brute.migrative:
        report.migrative_pairs += 1
    elif not witness_is_genuine(p, brute.witness):
        report.rule_violations.append({"record": "rule-violation", "check": "witness", "pair": p.identity()})

    pivots = pivot_values(p)
    if pivots.lam > pivots.mu:
        report.rule_violations.append({"record": "rule-violation", "check": "pivot-order", "pair": p.identity()})

    lower = characterize_by_lower_pivot(p)
    upper = characterize_by_upper_pivot(p)
    specials = all_specialization_verdicts(p)
    report.specializations_checked += len(specials)
    report.specializations_by_shape.update(v.case for v in specials)
    routes = [brute, lower, upper] + specials
    if any(v.migrative != brute.migrative for v in routes):
        report.disagreements.append(_disagreement_record(p, "disagreement", routes))

    for route in (Route.LOWER_PIVOT, Route.UPPER_PIVOT):
        cases = all_case_verdicts(p, route)
        if len({v.migrative for v in cases.values()}) > 1:
            report.intra_disagreements.append(_disagreement_record(p, "intra-disagreement", list(cases.values())))
        for verdict in cases.values():
            failure = verdict.condition_failure
            if failure is not None and not failure_is_genuine(failure):
                report.rule_violations.append(
                    {"record": "rule-violation", "check": "condition-witness", "pair": p.identity()}
                )

    checks = {
        "single-pivot": check_single_pivot_rule(p, brute),
        "split-pivot": check_split_pivot_rule(p, brute),
    }
    if brute.migrative:
        checks["anchor-bounds"] = check_anchor_bounds(p, brute)
        checks["pivot-identity"] = check_pivot_identity(p, brute)
    for name, check in checks.items():
        report.outcomes[f"{name}:{check.outcome.value}"] += 1
        if not check.holds:
            report.rule_violations.append(
                {"record": "rule-violation", "check": name, "pair": p.identity(), "items": list(check.failed)}
            )

    bounds = check_pivot_bounds(p.u2, p.triple1, p.alpha)
    for item, boundary in bounds.violations:
        key = (p.name2, p.triple1.indices, p.alpha.index, item)
        report.pivot_bound_violations[key] = {
            "record": "pivot-bound-violation",
            "u2": p.name2,
            "triple1": str(p.triple1),
            "alpha": str(p.alpha),
            "item": item,
            "lam": format_value(Fraction(pivots.lam, n)),
            "mu": format_value(Fraction(pivots.mu, n)),
            "boundary": boundary,
        }
    return report


def equivalence_audit(pairs, report=None):
    """
    Audits brute force against every characterisation on a stream of pairs.
    Args:
        pairs (Iterable[MigrativePair]): Valid pairs.
        report (AuditReport, optional): Report to extend.
    Returns:
        AuditReport: Disagreements are report content, never exceptions.
    """
    report = AuditReport() if report is None else report
    for p in pairs:
        audit_pair(p, report)
    report.sort()
    if report.disagreements:
        logger.warning(f"Audit found {len(report.disagreements)} disagreement(s) over {report.pairs_checked} pairs.")
    else:
        logger.info(f"Audit of {report.pairs_checked} pairs found no disagreement.")
    return report


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepPoint:
    alpha: object
    brute: MigrativityVerdict
    lower: MigrativityVerdict
    upper: MigrativityVerdict
    specialization: Optional[MigrativityVerdict] = None

    @property
    def agree(self):
        verdicts = [self.brute, self.lower, self.upper]
        if self.specialization is not None:
            verdicts.append(self.specialization)
        return len({v.migrative for v in verdicts}) == 1


def migrativity_at(p):
    """Brute force, both characterisations, and the specialisation when one fits."""
    special = None
    shapes = applicable_shapes(classify(p.triple1), classify(p.triple2))
    if shapes:
        special = specialization_dispatch(p, classify(p.triple1), classify(p.triple2))
    return SweepPoint(p.alpha, brute_force_migrative(p), characterize_by_lower_pivot(p), characterize_by_upper_pivot(p), special)


def sweep_alpha(u1, triple1, u2, triple2, name1="U1", name2="U2"):
    """Decides migrativity at every grid alpha; operands are verified once."""
    first = make_pair(u1, triple1, u2, triple2, u1.grid.point(0), name1, name2)
    points = []
    for alpha in u1.grid.points():
        p = MigrativePair(first.u1, first.triple1, first.u2, first.triple2, alpha, name1, name2)
        points.append(migrativity_at(p))
    logger.info(
        f"Sweep of {name1} over {name2}: migrative at "
        f"{[str(s.alpha) for s in points if s.brute.migrative]}"
    )
    return points


if __name__ == '__main__':
    # Example usage: the two piecewise 2-uninorms on the grid n=20
    from src.grid_domain import make_grid
    from src.operators import Example2Uninorm, discretize, natural_triple

    grid = make_grid(20)
    spec1 = Example2Uninorm(grid.point(4), grid.point(12), grid.point(16))
    spec2 = Example2Uninorm(grid.point(6), grid.point(10), grid.point(14))
    table1, table2 = discretize(spec1, grid), discretize(spec2, grid)
    for point in sweep_alpha(table1, natural_triple(spec1, grid), table2, natural_triple(spec2, grid)):
        print(f"alpha={point.alpha}: migrative={point.brute.migrative} case={point.lower.case} agree={point.agree}")
