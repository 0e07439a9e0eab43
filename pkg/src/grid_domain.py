"""Exact discretised unit intervals.

A grid of size n has carrier {i/n : i = 0..n}. Points are stored by index
and their values are derived on demand as ``Fraction`` objects, so exact
mode never compares reals with a tolerance.
"""

import enum
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

from src.errors import NotOnGrid, OutOfRange
from src.utils import format_value, parse_fraction

logger = logging.getLogger(__name__)

DEFAULT_EPS = 1e-9


class Mode(enum.Enum):
    EXACT = "exact"
    FLOAT = "float"


@dataclass(frozen=True)
class ToleranceConfig:
    """Scalar comparison policy. ``eps`` is consulted only in float mode."""

    mode: Mode = Mode.EXACT
    eps: float = DEFAULT_EPS

    def __post_init__(self):
        if self.eps < 0:
            raise ValueError(f"eps must be non-negative, got {self.eps}")

    @property
    def exact(self):
        return self.mode is Mode.EXACT


EXACT = ToleranceConfig()


@dataclass(frozen=True)
class UnitGrid:
    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"grid size must be a positive integer, got {self.n!r}")

    @property
    def size(self):
        """Number of carrier points."""
        return self.n + 1

    @property
    def carrier(self):
        return tuple(Fraction(i, self.n) for i in range(self.n + 1))

    def point(self, index):
        return GridPoint(index, self.n)

    def points(self):
        return [GridPoint(i, self.n) for i in range(self.n + 1)]

    def value(self, index):
        return Fraction(index, self.n)

    def contains(self, point):
        return point.n == self.n


@total_ordering
@dataclass(frozen=True)
class GridPoint:
    index: int
    n: int

    def __post_init__(self):
        if not 0 <= self.index <= self.n:
            raise OutOfRange(f"index {self.index} outside 0..{self.n}")

    @property
    def value(self):
        return Fraction(self.index, self.n)

    @property
    def grid(self):
        return UnitGrid(self.n)

    def _same_grid(self, other):
        if self.n != other.n:
            raise ValueError(f"cannot compare points on grids {self.n} and {other.n}")

    def __lt__(self, other):
        if not isinstance(other, GridPoint):
            return NotImplemented
        self._same_grid(other)
        return self.index < other.index

    def __str__(self):
        return format_value(self.value)


def make_grid(n):
    """
    Builds the grid {0, 1/n, ..., 1}.
    Args:
        n (int): Number of subdivisions, at least 1.
    Returns:
        UnitGrid: The grid.
    """
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ValueError(f"grid size must be a positive integer, got {n!r}")
    return UnitGrid(n)


def _as_exact(value):
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_fraction(value)
    if isinstance(value, float):
        # Decimal reading: 0.7 means 7/10, not the nearest binary double
        return Fraction(repr(value))
    raise TypeError(f"unsupported value type {type(value).__name__}")


def snap(value, grid, cfg=EXACT):
    """
    Maps a value in [0,1] to its carrier point.

    Exact mode succeeds only when value*n is an integer. Float mode returns
    the nearest carrier point when it lies within eps.

    Args:
        value (Fraction | int | float | str): The value to snap.
        grid (UnitGrid): Target grid.
        cfg (ToleranceConfig): Comparison policy.
    Returns:
        GridPoint: The carrier point.
    Raises:
        OutOfRange: If value is outside [0,1].
        NotOnGrid: If no carrier point matches.
    """
    if cfg.exact:
        exact = _as_exact(value)
        if exact < 0 or exact > 1:
            raise OutOfRange(f"value {value} outside [0,1]")
        scaled = exact * grid.n
        if scaled.denominator != 1:
            raise NotOnGrid(f"value {value} is not on the grid n={grid.n} ({value}*{grid.n} = {scaled})")
        return GridPoint(int(scaled), grid.n)

    real = float(value)
    if real < -cfg.eps or real > 1 + cfg.eps:
        raise OutOfRange(f"value {value} outside [0,1]")
    index = min(max(round(real * grid.n), 0), grid.n)
    if not math.isclose(index / grid.n, real, rel_tol=0.0, abs_tol=cfg.eps):
        raise NotOnGrid(f"value {value} has no carrier point within eps={cfg.eps} on grid n={grid.n}")
    return GridPoint(index, grid.n)
