"""Aggregation operators: parametric families, Cayley tables and triples.

Parametric specs evaluate on exact ``Fraction`` arguments (or floats in
float mode) and are tabulated onto a grid with ``discretize``. Block
constructions (uninorms, nullnorms, glued 2-uninorms) rescale an inner
operator into a sub-square of the unit square.
"""

import enum
import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from src.errors import ConstructionError, NotOnGrid
from src.grid_domain import EXACT, GridPoint, UnitGrid, snap
from src.utils import format_value

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Triples and tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NeutralTriple:
    """The data (e, a, f) of a 2-neutral element {e,f}_a, with e <= a <= f."""

    e: GridPoint
    a: GridPoint
    f: GridPoint

    def __post_init__(self):
        if not self.e.n == self.a.n == self.f.n:
            raise ValueError("triple components must live on one grid")
        if not self.e.index <= self.a.index <= self.f.index:
            raise ValueError(f"triple must satisfy e <= a <= f, got {self}")

    @classmethod
    def from_indices(cls, grid, e, a, f):
        return cls(GridPoint(int(e), grid.n), GridPoint(int(a), grid.n), GridPoint(int(f), grid.n))

    @classmethod
    def from_values(cls, grid, e, a, f, cfg=EXACT):
        return cls(snap(e, grid, cfg), snap(a, grid, cfg), snap(f, grid, cfg))

    @property
    def indices(self):
        return (self.e.index, self.a.index, self.f.index)

    @property
    def n(self):
        return self.e.n

    def __str__(self):
        return f"({self.e}, {self.a}, {self.f})"


def all_triples(grid):
    """Every triple e <= a <= f on the grid, ordered by (a, e, f)."""
    return [
        NeutralTriple.from_indices(grid, e, a, f)
        for a in range(grid.n + 1)
        for e in range(a + 1)
        for f in range(a, grid.n + 1)
    ]


class OperatorTable:
    """Complete Cayley table of a binary operation on a finite chain.

    ``entries[i, j]`` is the index of the value at (i/n, j/n). The array is
    read-only; tables compare and hash by content.
    """

    __slots__ = ("grid", "entries")

    def __init__(self, grid, entries):
        arr = np.array(entries, dtype=np.intp)
        if arr.shape != (grid.size, grid.size):
            raise ValueError(f"table for grid n={grid.n} must be {grid.size}x{grid.size}, got shape {arr.shape}")
        if arr.size and (arr.min() < 0 or arr.max() > grid.n):
            raise ValueError(f"table entries must be indices in 0..{grid.n}")
        arr.setflags(write=False)
        self.grid = grid
        self.entries = arr

    @classmethod
    def from_values(cls, grid, rows, cfg=EXACT):
        """Builds a table from rows of real values, snapping each one."""
        return cls(grid, [[snap(v, grid, cfg).index for v in row] for row in rows])

    @property
    def n(self):
        return self.grid.n

    def at(self, i, j):
        return int(self.entries[i, j])

    def value(self, x, y):
        """Table lookup on grid points."""
        return GridPoint(int(self.entries[x.index, y.index]), self.grid.n)

    def row(self, i):
        return self.entries[i]

    @property
    def key(self):
        return tuple(tuple(int(v) for v in row) for row in self.entries)

    def signature(self):
        return "|".join(".".join(str(int(v)) for v in row) for row in self.entries)

    def __eq__(self, other):
        if not isinstance(other, OperatorTable):
            return NotImplemented
        return self.grid == other.grid and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash((self.grid.n, self.entries.tobytes()))

    def __repr__(self):
        return f"OperatorTable(n={self.grid.n}, {self.signature()})"

    def __getstate__(self):
        return (self.grid, self.entries.tolist())

    def __setstate__(self, state):
        grid, rows = state
        arr = np.array(rows, dtype=np.intp)
        arr.setflags(write=False)
        self.grid = grid
        self.entries = arr


# ---------------------------------------------------------------------------
# Parametric specs
# ---------------------------------------------------------------------------

def _rescaled(inner, lo, hi, x, y):
    if hi == lo:
        return lo
    width = hi - lo
    return lo + width * inner._value((x - lo) / width, (y - lo) / width)


class OperatorSpec:
    """Base class of the operator family variants."""

    family = "abstract"

    def parameters(self):
        """Top-level grid parameters as (name, GridPoint) pairs."""
        return ()

    def _value(self, x, y):
        raise NotImplementedError

    def describe(self):
        params = ", ".join(f"{name}={point}" for name, point in self.parameters())
        return f"{self.family}({params})" if params else self.family


@dataclass(frozen=True)
class Min(OperatorSpec):
    family = "min"

    def _value(self, x, y):
        return min(x, y)


@dataclass(frozen=True)
class Max(OperatorSpec):
    family = "max"

    def _value(self, x, y):
        return max(x, y)


@dataclass(frozen=True)
class Product(OperatorSpec):
    conorm: bool = False
    family = "product"

    def _value(self, x, y):
        if self.conorm:
            return x + y - x * y
        return x * y


@dataclass(frozen=True)
class Lukasiewicz(OperatorSpec):
    conorm: bool = False
    family = "lukasiewicz"

    def _value(self, x, y):
        if self.conorm:
            return min(x + y, 1)
        return max(x + y - 1, 0)


@dataclass(frozen=True)
class Drastic(OperatorSpec):
    conorm: bool = False
    family = "drastic"

    def _value(self, x, y):
        if self.conorm:
            return max(x, y) if min(x, y) == 0 else 1
        return min(x, y) if max(x, y) == 1 else 0


@dataclass(frozen=True)
class DualConorm(OperatorSpec):
    """S(x,y) = 1 - T(1-x, 1-y)."""

    inner: OperatorSpec
    family = "dual"

    def _value(self, x, y):
        return 1 - self.inner._value(1 - x, 1 - y)

    def describe(self):
        return f"dual({self.inner.describe()})"


class _BlockComposite(OperatorSpec):
    """Lower operator on [0,s]^2, upper operator on [s,1]^2, a rule on the rest.

    First match: lower block, then upper block, then the mixed rule.
    """

    def _seam(self):
        raise NotImplementedError

    def _blocks(self):
        raise NotImplementedError

    def _mixed(self, x, y):
        raise NotImplementedError

    def _value(self, x, y):
        s = self._seam().value
        lower, upper = self._blocks()
        if x <= s and y <= s:
            return _rescaled(lower, Fraction(0), s, x, y)
        if x >= s and y >= s:
            return _rescaled(upper, s, Fraction(1), x, y)
        return self._mixed(x, y)

    def _tabulate(self, grid):
        seam = snap(self._seam().value, grid)
        lower, upper = self._blocks()
        size = grid.size
        entries = np.empty((size, size), dtype=np.intp)
        for i in range(size):
            for j in range(size):
                entries[i, j] = snap(self._mixed(grid.value(i), grid.value(j)), grid).index
        s = seam.index
        if s < grid.n:
            entries[s:, s:] = rescale_into(upper, seam, GridPoint(grid.n, grid.n)).entries
        else:
            entries[s, s] = grid.n
        if s > 0:
            entries[: s + 1, : s + 1] = rescale_into(lower, GridPoint(0, grid.n), seam).entries
        else:
            entries[0, 0] = 0
        return OperatorTable(grid, entries)


@dataclass(frozen=True)
class UninormMinClass(_BlockComposite):
    """t-norm rescaled to [0,e], t-conorm rescaled to [e,1], min elsewhere."""

    e: GridPoint
    t: OperatorSpec
    s: OperatorSpec
    family = "uninorm-min"

    def parameters(self):
        return (("e", self.e),)

    def _seam(self):
        return self.e

    def _blocks(self):
        return self.t, self.s

    def _mixed(self, x, y):
        return min(x, y)


@dataclass(frozen=True)
class UninormMaxClass(UninormMinClass):
    """As the min class, with max on the mixed block."""

    family = "uninorm-max"

    def _mixed(self, x, y):
        return max(x, y)


@dataclass(frozen=True)
class Nullnorm(_BlockComposite):
    """t-conorm rescaled to [0,a], t-norm rescaled to [a,1], a elsewhere."""

    a: GridPoint
    s: OperatorSpec
    t: OperatorSpec
    family = "nullnorm"

    def parameters(self):
        return (("a", self.a),)

    def _seam(self):
        return self.a

    def _blocks(self):
        return self.s, self.t

    def _mixed(self, x, y):
        return self.a.value


@dataclass(frozen=True)
class GluedTwoUninorm(_BlockComposite):
    """Uninorms rescaled to [0,a] and [a,1]; the mixed blocks are constant a."""

    a: GridPoint
    low: OperatorSpec
    high: OperatorSpec
    family = "glued-2uninorm"

    def parameters(self):
        return (("a", self.a),)

    def _seam(self):
        return self.a

    def _blocks(self):
        return self.low, self.high

    def _mixed(self, x, y):
        return self.a.value


@dataclass(frozen=True)
class Example2Uninorm(OperatorSpec):
    """min on [0,e]^2 u [a,f]^2, a on [0,a]x[a,f] and its mirror, max elsewhere."""

    e: GridPoint
    a: GridPoint
    f: GridPoint
    family = "example-2uninorm"

    def __post_init__(self):
        if not self.e.value <= self.a.value <= self.f.value:
            raise ConstructionError(f"example-2uninorm needs e <= a <= f, got e={self.e}, a={self.a}, f={self.f}")

    def parameters(self):
        return (("e", self.e), ("a", self.a), ("f", self.f))

    def _value(self, x, y):
        e, a, f = self.e.value, self.a.value, self.f.value
        if (x <= e and y <= e) or (a <= x <= f and a <= y <= f):
            return min(x, y)
        if (x <= a and a <= y <= f) or (a <= x <= f and y <= a):
            return a
        return max(x, y)


@dataclass(frozen=True, eq=False)
class Table(OperatorSpec):
    table: OperatorTable
    family = "table"

    def _value(self, x, y):
        n = self.table.grid.n
        i, j = x * n, y * n
        if isinstance(i, Fraction) or isinstance(i, int):
            if Fraction(i).denominator != 1 or Fraction(j).denominator != 1:
                raise NotOnGrid(f"table on grid n={n} cannot be evaluated at ({x}, {y})")
            return Fraction(self.table.at(int(i), int(j)), n)
        return self.table.at(round(i), round(j)) / n

    def describe(self):
        return f"table(n={self.table.grid.n})"


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def check_alignment(spec, grid):
    """Raises NotOnGrid when a top-level parameter is not a point of grid."""
    for name, point in spec.parameters():
        try:
            snap(point.value, grid)
        except NotOnGrid as e:
            raise NotOnGrid(f"parameter {name}={point} of {spec.family} is not on grid n={grid.n}") from e


def evaluate(spec, x, y):
    """
    Evaluates an operator at two grid points.
    Args:
        spec (OperatorSpec): The operator.
        x (GridPoint): First argument.
        y (GridPoint): Second argument, on the same grid.
    Returns:
        GridPoint: The value, on the arguments' grid.
    Raises:
        NotOnGrid: If a parameter or the value falls off the grid.
    """
    if x.n != y.n:
        raise ValueError(f"arguments live on different grids ({x.n} and {y.n})")
    grid = UnitGrid(x.n)
    check_alignment(spec, grid)
    value = spec._value(x.value, y.value)
    try:
        return snap(value, grid)
    except NotOnGrid as e:
        raise NotOnGrid(f"{spec.describe()} at ({x}, {y}) = {format_value(value)} is not on grid n={grid.n}") from e


def evaluate_real(spec, x, y):
    """Evaluates at arbitrary reals; Fractions stay exact, floats stay floats."""
    return spec._value(x, y)


def discretize(spec, grid):
    """
    Tabulates an operator on a grid.
    Args:
        spec (OperatorSpec): The operator.
        grid (UnitGrid): Target grid.
    Returns:
        OperatorTable: entries[i][j] = evaluate(spec, i/n, j/n).
    Raises:
        NotOnGrid: For misaligned parameters or off-grid values.
        ConstructionError: When a glued 2-uninorm fails the axiom suite.
    """
    check_alignment(spec, grid)
    if isinstance(spec, Table) and spec.table.grid == grid:
        return spec.table
    if isinstance(spec, _BlockComposite):
        table = spec._tabulate(grid)
    else:
        points = grid.points()
        table = OperatorTable(grid, [[evaluate(spec, x, y).index for y in points] for x in points])
    if isinstance(spec, GluedTwoUninorm):
        _reject_unless_2uninorm(spec, table, grid)
    logger.debug(f"Discretized {spec.describe()} on grid n={grid.n}.")
    return table


def _reject_unless_2uninorm(spec, table, grid):
    from src.axioms import is_2uninorm

    triple = natural_triple(spec, grid)
    if not is_2uninorm(table, triple):
        error_msg = f"{spec.describe()} on grid n={grid.n} is not a 2-uninorm with triple {triple}"
        logger.error(error_msg)
        raise ConstructionError(error_msg)


@dataclass(frozen=True)
class PartialTable:
    """Values of a rescaled operator on the square [lo,hi]^2."""

    lo: GridPoint
    hi: GridPoint
    entries: np.ndarray

    def at(self, x, y):
        return GridPoint(int(self.entries[x.index - self.lo.index, y.index - self.lo.index]), self.lo.n)


def rescale_into(spec, lo, hi):
    """
    Rescales an operator into the square [lo,hi]^2.
    Args:
        spec (OperatorSpec): The inner operator on [0,1].
        lo (GridPoint): Lower corner, strictly below hi.
        hi (GridPoint): Upper corner.
    Returns:
        PartialTable: value(x,y) = lo + (hi-lo)*spec((x-lo)/(hi-lo), (y-lo)/(hi-lo)).
    Raises:
        NotOnGrid: When a rescaled value is not a grid point.
    """
    if lo.n != hi.n:
        raise ValueError("rescale bounds must share a grid")
    if not lo < hi:
        raise ValueError(f"rescale needs lo < hi, got [{lo}, {hi}]")
    grid = UnitGrid(lo.n)
    span = range(lo.index, hi.index + 1)
    entries = np.empty((len(span), len(span)), dtype=np.intp)
    for r, i in enumerate(span):
        for c, j in enumerate(span):
            value = _rescaled(spec, lo.value, hi.value, grid.value(i), grid.value(j))
            try:
                entries[r, c] = snap(value, grid).index
            except NotOnGrid as e:
                raise NotOnGrid(
                    f"{spec.describe()} rescaled into [{lo}, {hi}] gives {format_value(value)} "
                    f"at ({grid.value(i)}, {grid.value(j)}), off grid n={grid.n}"
                ) from e
    entries.setflags(write=False)
    return PartialTable(lo, hi, entries)


class SubclassTag(enum.Enum):
    TNORM = "t-norm"
    TCONORM = "t-conorm"
    UNINORM = "uninorm"
    NULLNORM = "nullnorm"
    UNI_NULLNORM = "uni-nullnorm"
    NULL_UNINORM = "null-uninorm"
    GENERAL = "2-uninorm"


def classify(triple):
    """
    Names the subclass a triple collapses to.

    First match: (0,0,0) t-conorm; (1,1,1) t-norm; e=a=f, a=f=1 or e=a=0
    uninorm; (0,a,1) nullnorm; f=1 uni-nullnorm; e=0 null-uninorm;
    otherwise a general 2-uninorm.
    """
    e, a, f = triple.indices
    top = triple.n
    if e == a == f == 0:
        return SubclassTag.TCONORM
    if e == a == f == top:
        return SubclassTag.TNORM
    if e == a == f or a == f == top or e == a == 0:
        return SubclassTag.UNINORM
    if e == 0 and f == top and 0 < a < top:
        return SubclassTag.NULLNORM
    if f == top and a < top:
        return SubclassTag.UNI_NULLNORM
    if e == 0 and a > 0:
        return SubclassTag.NULL_UNINORM
    return SubclassTag.GENERAL


def uninorm_neutral(triple):
    """Neutral element of the uninorm a uninorm-shaped triple describes."""
    if classify(triple) is not SubclassTag.UNINORM:
        raise ValueError(f"triple {triple} does not describe a uninorm")
    if triple.e.index == triple.a.index == 0:
        return triple.f
    return triple.e


def natural_triple(spec, grid):
    """
    The 2-neutral element a parametric family is built around.
    Args:
        spec (OperatorSpec): The operator.
        grid (UnitGrid): Grid the triple should live on.
    Returns:
        NeutralTriple | None: None for raw tables, whose triples must be searched.
    """
    values = _natural_values(spec)
    if values is None:
        return None
    return NeutralTriple.from_values(grid, *values)


def _natural_values(spec):
    zero, one = Fraction(0), Fraction(1)
    if isinstance(spec, (Min, Product, Lukasiewicz, Drastic)):
        if getattr(spec, "conorm", False):
            return zero, zero, zero
        return one, one, one
    if isinstance(spec, (Max, DualConorm)):
        return zero, zero, zero
    if isinstance(spec, UninormMinClass):
        return spec.e.value, spec.e.value, spec.e.value
    if isinstance(spec, Nullnorm):
        return zero, spec.a.value, one
    if isinstance(spec, Example2Uninorm):
        return spec.e.value, spec.a.value, spec.f.value
    if isinstance(spec, GluedTwoUninorm):
        low, high = _natural_values(spec.low), _natural_values(spec.high)
        if low is None or high is None:
            return None
        a = spec.a.value
        return a * low[0], a, a + (1 - a) * high[2]
    return None
