import unittest
from fractions import Fraction

from hypothesis import given, strategies as st

from src.errors import NotOnGrid, OutOfRange
from src.grid_domain import GridPoint, Mode, ToleranceConfig, make_grid, snap

FLOAT = ToleranceConfig(Mode.FLOAT, 1e-6)


class TestMakeGrid(unittest.TestCase):

    def test_carrier(self):
        """Test that the carrier is {i/n}."""
        grid = make_grid(10)
        self.assertEqual(grid.size, 11)
        self.assertEqual(grid.carrier[3], Fraction(3, 10))
        self.assertEqual(grid.carrier[-1], Fraction(1))

    def test_rejects_bad_sizes(self):
        """Test that non-positive and non-integer sizes are rejected."""
        for bad in (0, -3, 2.0, True, "4"):
            with self.assertRaises(ValueError) as context:
                make_grid(bad)
            self.assertIn("positive integer", str(context.exception))


class TestSnap(unittest.TestCase):

    def setUp(self):
        self.grid = make_grid(10)

    def test_exact_snap(self):
        """Test that fractions, decimal strings and floats all read exactly."""
        self.assertEqual(snap(Fraction(7, 10), self.grid).index, 7)
        self.assertEqual(snap("0.7", self.grid).index, 7)
        self.assertEqual(snap(0.7, self.grid).index, 7)
        self.assertEqual(snap(1, self.grid).index, 10)

    def test_exact_off_grid(self):
        """Test that 0.25 is not a point of the grid n=10."""
        with self.assertRaises(NotOnGrid) as context:
            snap(Fraction(1, 4), self.grid)
        self.assertIn("not on the grid", str(context.exception))

    def test_out_of_range(self):
        """Test that values outside [0,1] are rejected in both modes."""
        with self.assertRaises(OutOfRange):
            snap(Fraction(3, 2), self.grid)
        with self.assertRaises(OutOfRange):
            snap(-0.5, self.grid, FLOAT)

    def test_float_snap_within_eps(self):
        """Test that float mode accepts values within eps of a carrier point."""
        self.assertEqual(snap(0.7000000001, self.grid, FLOAT).index, 7)

    def test_float_snap_outside_eps(self):
        """Test that float mode rejects values far from every carrier point."""
        with self.assertRaises(NotOnGrid) as context:
            snap(0.25, self.grid, FLOAT)
        self.assertIn("within eps", str(context.exception))

    def test_negative_eps(self):
        """Test that a negative tolerance is rejected."""
        with self.assertRaises(ValueError):
            ToleranceConfig(Mode.FLOAT, -1.0)

    @given(st.integers(min_value=1, max_value=60), st.data())
    def test_carrier_points_snap_to_themselves(self, n, data):
        """Test that every carrier point snaps to its own index in both modes."""
        grid = make_grid(n)
        i = data.draw(st.integers(min_value=0, max_value=n))
        self.assertEqual(snap(Fraction(i, n), grid), GridPoint(i, n))
        self.assertEqual(snap(i / n, grid, FLOAT), GridPoint(i, n))


class TestGridPoint(unittest.TestCase):

    def test_ordering_and_str(self):
        """Test ordering by index and decimal rendering."""
        grid = make_grid(10)
        self.assertLess(grid.point(2), grid.point(3))
        self.assertEqual(max(grid.point(2), grid.point(9)), grid.point(9))
        self.assertEqual(str(grid.point(7)), "0.7")
        self.assertEqual(grid.point(7).value, Fraction(7, 10))

    def test_cross_grid_comparison(self):
        """Test that points on different grids do not compare."""
        with self.assertRaises(ValueError):
            _ = GridPoint(2, 10) < GridPoint(1, 5)

    def test_index_range(self):
        """Test that indices outside 0..n are rejected."""
        with self.assertRaises(OutOfRange):
            GridPoint(11, 10)


if __name__ == '__main__':
    unittest.main()
