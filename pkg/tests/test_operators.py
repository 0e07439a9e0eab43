import pickle
import unittest
from fractions import Fraction

from src.axioms import is_2uninorm
from src.errors import ConstructionError, NotOnGrid
from src.grid_domain import GridPoint, make_grid
from src.operators import (
    DualConorm,
    Example2Uninorm,
    GluedTwoUninorm,
    Lukasiewicz,
    Max,
    Min,
    NeutralTriple,
    Nullnorm,
    OperatorTable,
    Product,
    SubclassTag,
    Table,
    UninormMaxClass,
    UninormMinClass,
    all_triples,
    classify,
    discretize,
    evaluate,
    evaluate_real,
    natural_triple,
    rescale_into,
    uninorm_neutral,
)


def example(grid, e, a, f):
    return Example2Uninorm(*(grid.point(round(v * grid.n)) for v in (e, a, f)))


class TestExample2Uninorm(unittest.TestCase):

    def test_mixed_block_value(self):
        """Test that (0.2, 0.7) falls in the constant-a block of Example2Uninorm(0.3,0.5,0.7)."""
        grid = make_grid(10)
        table = discretize(example(grid, 0.3, 0.5, 0.7), grid)
        self.assertEqual(table.at(2, 7), 5)
        self.assertEqual(table.at(7, 2), 5)

    def test_min_block_value(self):
        """Test that (0.8, 0.7) falls in the min block of Example2Uninorm(0.2,0.6,0.8)."""
        grid = make_grid(10)
        spec = example(grid, 0.2, 0.6, 0.8)
        self.assertEqual(evaluate(spec, grid.point(8), grid.point(7)), grid.point(7))

    def test_max_region(self):
        """Test that values beyond f take the max."""
        grid = make_grid(10)
        spec = example(grid, 0.2, 0.6, 0.8)
        self.assertEqual(evaluate(spec, grid.point(9), grid.point(1)), grid.point(9))

    def test_parameter_order(self):
        """Test that e <= a <= f is enforced at construction."""
        grid = make_grid(10)
        with self.assertRaises(ConstructionError) as context:
            example(grid, 0.6, 0.5, 0.7)
        self.assertIn("e <= a <= f", str(context.exception))

    def test_natural_triple(self):
        """Test that the parameters are the 2-neutral element."""
        grid = make_grid(20)
        spec = example(grid, 0.2, 0.6, 0.8)
        triple = natural_triple(spec, grid)
        self.assertEqual(str(triple), "(0.2, 0.6, 0.8)")
        self.assertTrue(is_2uninorm(discretize(spec, grid), triple))


class TestFamilies(unittest.TestCase):

    def test_product_off_grid(self):
        """Test that the product leaves the grid n=2."""
        grid = make_grid(2)
        with self.assertRaises(NotOnGrid) as context:
            discretize(Product(), grid)
        self.assertIn("not on grid", str(context.exception))

    def test_dual_of_min_is_max(self):
        """Test that the dual of min tabulates as max."""
        grid = make_grid(5)
        self.assertEqual(discretize(DualConorm(Min()), grid), discretize(Max(), grid))

    def test_lukasiewicz_pair(self):
        """Test the Lukasiewicz t-norm and its bounded-sum conorm on exact values."""
        self.assertEqual(evaluate_real(Lukasiewicz(), Fraction(3, 10), Fraction(4, 10)), 0)
        self.assertEqual(evaluate_real(Lukasiewicz(), Fraction(7, 10), Fraction(6, 10)), Fraction(3, 10))
        self.assertEqual(evaluate_real(Lukasiewicz(conorm=True), Fraction(7, 10), Fraction(6, 10)), 1)

    def test_uninorm_classes(self):
        """Test the mixed-block rule of the min and max uninorm classes."""
        grid = make_grid(4)
        half = grid.point(2)
        low, high = grid.point(1), grid.point(3)
        conjunctive = UninormMinClass(half, Min(), Max())
        disjunctive = UninormMaxClass(half, Min(), Max())
        self.assertEqual(evaluate(conjunctive, low, high), low)
        self.assertEqual(evaluate(disjunctive, low, high), high)
        for spec in (conjunctive, disjunctive):
            self.assertTrue(is_2uninorm(discretize(spec, grid), natural_triple(spec, grid)))

    def test_nullnorm(self):
        """Test that a nullnorm is constant a on the mixed blocks."""
        grid = make_grid(4)
        spec = Nullnorm(grid.point(2), Max(), Min())
        self.assertEqual(evaluate(spec, grid.point(1), grid.point(3)), grid.point(2))
        self.assertEqual(str(natural_triple(spec, grid)), "(0, 0.5, 1)")
        self.assertTrue(is_2uninorm(discretize(spec, grid), natural_triple(spec, grid)))

    def test_glued_2uninorm(self):
        """Test a disjunctive uninorm glued under a t-norm."""
        grid = make_grid(4)
        spec = GluedTwoUninorm(grid.point(2), UninormMaxClass(grid.point(2), Min(), Max()), Min())
        table = discretize(spec, grid)
        triple = natural_triple(spec, grid)
        self.assertEqual(str(triple), "(0.25, 0.5, 1)")
        self.assertTrue(is_2uninorm(table, triple))

    def test_glued_2uninorm_rejected(self):
        """Test that a conjunctive uninorm glued under a t-norm is not associative."""
        grid = make_grid(4)
        spec = GluedTwoUninorm(grid.point(2), UninormMinClass(grid.point(2), Min(), Max()), Min())
        with self.assertRaises(ConstructionError) as context:
            discretize(spec, grid)
        self.assertIn("is not a 2-uninorm", str(context.exception))

    def test_misaligned_parameter(self):
        """Test that a parameter off the target grid is rejected."""
        spec = Example2Uninorm(GridPoint(1, 4), GridPoint(2, 4), GridPoint(3, 4))
        with self.assertRaises(NotOnGrid) as context:
            discretize(spec, make_grid(10))
        self.assertIn("parameter e=0.25", str(context.exception))


class TestRescale(unittest.TestCase):

    def test_lukasiewicz_into_lower_half(self):
        """Test Lukasiewicz rescaled into [0,1/2] on the grid n=4."""
        grid = make_grid(4)
        block = rescale_into(Lukasiewicz(), grid.point(0), grid.point(2))
        self.assertEqual(block.at(grid.point(1), grid.point(1)), grid.point(0))
        self.assertEqual(block.at(grid.point(2), grid.point(1)), grid.point(1))
        self.assertEqual(block.at(grid.point(2), grid.point(2)), grid.point(2))

    def test_degenerate_square(self):
        """Test that an empty square is rejected."""
        grid = make_grid(4)
        with self.assertRaises(ValueError) as context:
            rescale_into(Min(), grid.point(2), grid.point(2))
        self.assertIn("lo < hi", str(context.exception))


class TestOperatorTable(unittest.TestCase):

    def test_validation(self):
        """Test shape and range checks."""
        grid = make_grid(1)
        with self.assertRaises(ValueError) as context:
            OperatorTable(grid, [[0, 0, 0], [0, 1, 1]])
        self.assertIn("must be 2x2", str(context.exception))
        with self.assertRaises(ValueError):
            OperatorTable(grid, [[0, 2], [2, 1]])

    def test_read_only_and_hashable(self):
        """Test that tables are immutable and compare by content."""
        grid = make_grid(1)
        first = OperatorTable(grid, [[0, 0], [0, 1]])
        second = OperatorTable(grid, [[0, 0], [0, 1]])
        self.assertFalse(first.entries.flags.writeable)
        self.assertEqual(first, second)
        self.assertEqual(len({first, second}), 1)
        self.assertEqual(first.signature(), "0.0|0.1")

    def test_pickle(self):
        """Test that tables survive a trip to a worker process."""
        grid = make_grid(2)
        table = discretize(Min(), grid)
        self.assertEqual(pickle.loads(pickle.dumps(table)), table)

    def test_table_spec_off_grid(self):
        """Test that a raw table cannot be evaluated between its points."""
        grid = make_grid(2)
        spec = Table(discretize(Min(), grid))
        self.assertEqual(evaluate_real(spec, Fraction(1, 2), Fraction(1)), Fraction(1, 2))
        with self.assertRaises(NotOnGrid):
            evaluate_real(spec, Fraction(1, 4), Fraction(0))
        self.assertIsNone(natural_triple(spec, grid))


class TestClassify(unittest.TestCase):

    def setUp(self):
        self.grid = make_grid(4)

    def triple(self, e, a, f):
        return NeutralTriple.from_indices(self.grid, e, a, f)

    def test_tags(self):
        """Test the first-match subclass naming."""
        cases = {
            (0, 0, 0): SubclassTag.TCONORM,
            (4, 4, 4): SubclassTag.TNORM,
            (2, 2, 2): SubclassTag.UNINORM,
            (0, 0, 2): SubclassTag.UNINORM,
            (2, 4, 4): SubclassTag.UNINORM,
            (0, 0, 4): SubclassTag.UNINORM,
            (0, 2, 4): SubclassTag.NULLNORM,
            (1, 2, 4): SubclassTag.UNI_NULLNORM,
            (0, 2, 3): SubclassTag.NULL_UNINORM,
            (1, 2, 3): SubclassTag.GENERAL,
        }
        for indices, tag in cases.items():
            self.assertEqual(classify(self.triple(*indices)), tag, f"triple {indices}")

    def test_uninorm_neutral(self):
        """Test the neutral element of uninorm-shaped triples."""
        self.assertEqual(uninorm_neutral(self.triple(0, 0, 2)).index, 2)
        self.assertEqual(uninorm_neutral(self.triple(2, 4, 4)).index, 2)
        self.assertEqual(uninorm_neutral(self.triple(1, 1, 1)).index, 1)
        with self.assertRaises(ValueError):
            uninorm_neutral(self.triple(1, 2, 3))

    def test_all_triples(self):
        """Test that every e <= a <= f appears once, ordered by (a, e, f)."""
        triples = all_triples(make_grid(1))
        self.assertEqual([t.indices for t in triples], [(0, 0, 0), (0, 0, 1), (0, 1, 1), (1, 1, 1)])
        self.assertEqual(len(all_triples(make_grid(3))), 20)

    def test_triple_order(self):
        """Test that e <= a <= f is required."""
        with self.assertRaises(ValueError):
            self.triple(3, 2, 4)


if __name__ == '__main__':
    unittest.main()
