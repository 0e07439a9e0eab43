"""Machine checks of the 2-uninorm axioms on Cayley tables.

All scans are full and vectorised with numpy; witnesses are the first
violation in row-major (lexicographic) order, so verdicts are deterministic.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.errors import PreconditionViolated
from src.operators import NeutralTriple

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CheckResult:
    holds: bool
    witness: Optional[tuple] = None

    def __bool__(self):
        return self.holds


@dataclass(frozen=True)
class AxiomReport:
    commutative: CheckResult
    associative: CheckResult
    monotone: CheckResult
    triples: tuple

    @property
    def passed(self):
        return bool(self.commutative and self.associative and self.monotone and self.triples)


def _first(mask):
    hits = np.argwhere(mask)
    if len(hits) == 0:
        return None
    return tuple(int(v) for v in hits[0])


def check_commutative(t):
    """Witness (i, j) with i < j and entries[i][j] != entries[j][i]."""
    entries = t.entries
    witness = _first(np.triu(entries != entries.T, k=1))
    return CheckResult(witness is None, witness)


def associativity_sides(entries):
    """Arrays left[x,y,z] = t(t(x,y),z) and right[x,y,z] = t(x,t(y,z))."""
    idx = np.arange(entries.shape[0])
    left = entries[entries[:, :, None], idx[None, None, :]]
    right = entries[idx[:, None, None], entries[None, :, :]]
    return left, right


def check_associative(t):
    """Witness (x, y, z) with t(t(x,y),z) != t(x,t(y,z))."""
    left, right = associativity_sides(t.entries)
    witness = _first(left != right)
    return CheckResult(witness is None, witness)


def check_monotone(t):
    """
    Checks that every row and column is non-decreasing.
    Returns:
        CheckResult: witness ("row", i, j, j+1) when entries[i][j] > entries[i][j+1],
        or ("col", j, i, i+1) when entries[i][j] > entries[i+1][j]. Rows are scanned first.
    """
    entries = t.entries
    hit = _first(np.diff(entries, axis=1) < 0)
    if hit is not None:
        i, j = hit
        return CheckResult(False, ("row", i, j, j + 1))
    hit = _first(np.diff(entries, axis=0) < 0)
    if hit is not None:
        i, j = hit
        return CheckResult(False, ("col", j, i, i + 1))
    return CheckResult(True)


def find_2neutral(t):
    """
    Finds every 2-neutral element of a table.

    A triple (e, a, f) qualifies when row e is the identity on [0,a] and row
    f is the identity on [a,1].

    Args:
        t (OperatorTable): The table to search.
    Returns:
        list[NeutralTriple]: All qualifying triples in (a, e, f) order, possibly empty.
    """
    entries = t.entries
    size = entries.shape[0]
    matches = entries == np.arange(size)[None, :]
    prefix_ok = np.logical_and.accumulate(matches, axis=1)
    suffix_ok = np.logical_and.accumulate(matches[:, ::-1], axis=1)[:, ::-1]
    return [
        NeutralTriple.from_indices(t.grid, e, a, f)
        for a in range(size)
        for e in range(a + 1)
        if prefix_ok[e, a]
        for f in range(a, size)
        if suffix_ok[f, a]
    ]


def has_neutral_triple(t, triple):
    """Checks the two identity families of one triple directly."""
    e, a, f = triple.indices
    size = t.grid.size
    return bool(
        np.array_equal(t.entries[e, : a + 1], np.arange(a + 1))
        and np.array_equal(t.entries[f, a:], np.arange(a, size))
    )


def verify_axioms(t):
    report = AxiomReport(
        commutative=check_commutative(t),
        associative=check_associative(t),
        monotone=check_monotone(t),
        triples=tuple(find_2neutral(t)),
    )
    logger.debug(f"Axiom report for {t!r}: passed={report.passed}")
    return report


def is_2uninorm(t, triple=None):
    """
    Decides whether a table is a 2-uninorm.
    Args:
        t (OperatorTable): The table.
        triple (NeutralTriple, optional): A required 2-neutral element.
    Returns:
        bool: commutative, associative, monotone, and the triple (or some triple) is 2-neutral.
    """
    if triple is not None:
        if triple.n != t.grid.n:
            return False
        if not has_neutral_triple(t, triple):
            return False
    elif not find_2neutral(t):
        return False
    return bool(check_commutative(t) and check_monotone(t) and check_associative(t))


# ---------------------------------------------------------------------------
# Structural properties of 2-uninorms
# ---------------------------------------------------------------------------

STRUCTURAL_ITEMS = ("i", "ii", "iii", "iv", "v", "vi", "vii")


@dataclass(frozen=True)
class ItemResult:
    item: str
    holds: bool
    witness: Optional[tuple] = None  # (x, y, value) indices


@dataclass(frozen=True)
class StructuralReport:
    triple: NeutralTriple
    items: tuple

    @property
    def passed(self):
        return all(result.holds for result in self.items)

    def failures(self):
        return [result for result in self.items if not result.holds]


def _structural_masks(entries, triple):
    e, a, f = triple.indices
    size = entries.shape[0]
    X, Y = np.indices((size, size))
    lo, hi = np.minimum(X, Y), np.maximum(X, Y)
    col_a = entries[:, a][:, None]
    row_a = entries[a, :][None, :]

    def between(v, p, q):
        return (p <= v) & (v <= q)

    return {
        "i": ((X <= a) & between(Y, a, f), entries == col_a),
        "ii": (between(X, a, f) & (Y <= a), entries == row_a),
        "iii": ((X >= a) & between(Y, e, a), entries == col_a),
        "iv": (between(X, e, a) & (Y >= a), entries == row_a),
        "v": (
            ((X <= e) & between(Y, e, f)) | (between(X, e, f) & (Y <= e)),
            (lo <= entries) & (entries <= a),
        ),
        "vi": (
            (between(X, e, f) & (Y >= f)) | ((X >= f) & between(Y, e, f)),
            (a <= entries) & (entries <= hi),
        ),
        "vii": (
            ((X <= a) & (Y >= a)) | ((X >= a) & (Y <= a)),
            (entries < e) | (entries == a) | (entries > f),
        ),
    }


def check_structural_props(t, triple, assume_verified=False):
    """
    Checks the seven structural properties every 2-uninorm satisfies.

    (i)   U(x,y)=U(x,a) on [0,a]x[a,f]      (ii)  U(x,y)=U(a,y) on [a,f]x[0,a]
    (iii) U(x,y)=U(x,a) on [a,1]x[e,a]      (iv)  U(x,y)=U(a,y) on [e,a]x[a,1]
    (v)   min <= U <= a on [0,e]x[e,f] and its mirror
    (vi)  a <= U <= max on [e,f]x[f,1] and its mirror
    (vii) U in [0,e) u {a} u (f,1] on [0,a]x[a,1] and its mirror

    Args:
        t (OperatorTable): A verified 2-uninorm.
        triple (NeutralTriple): One of its 2-neutral elements.
        assume_verified (bool): Skip the axiom re-check when the caller already ran it.
    Returns:
        StructuralReport: Per-item verdicts with a witness cell on failure.
    Raises:
        PreconditionViolated: If the table is not a 2-uninorm with that triple.
    """
    if not assume_verified and not is_2uninorm(t, triple):
        raise PreconditionViolated(f"{t!r} is not a verified 2-uninorm with triple {triple}")
    entries = t.entries
    results = []
    for item, (region, condition) in _structural_masks(entries, triple).items():
        hit = _first(region & ~condition)
        witness = None if hit is None else (hit[0], hit[1], int(entries[hit]))
        results.append(ItemResult(item, hit is None, witness))
    report = StructuralReport(triple, tuple(results))
    if not report.passed:
        logger.warning(f"Structural check failed for {t!r} with triple {triple}: {report.failures()}")
    return report
