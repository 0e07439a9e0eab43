import random
import unittest
from unittest.mock import patch

from src.axioms import is_2uninorm
from src.chain_enum import (
    EnumJob,
    build_census,
    census_audit,
    census_pairs,
    enumerate_2uninorms,
    enumerate_naive,
)
from src.errors import BudgetExceeded
from src.grid_domain import make_grid
from src.migrativity import Shape, equivalence_audit
from src.operators import NeutralTriple, all_triples


def keys(result):
    return [table.key for table in result.tables]


class TestPrunedEnumerator(unittest.TestCase):

    def test_forced_table(self):
        """Test that (0, 0, 1) on the grid n=1 forces exactly one table."""
        grid = make_grid(1)
        result = enumerate_2uninorms(EnumJob(grid, NeutralTriple.from_indices(grid, 0, 0, 1)))
        self.assertEqual(keys(result), [((0, 0), (0, 1))])
        self.assertTrue(result.stats.complete)

    def test_emitted_tables_are_2uninorms(self):
        """Test soundness on every triple of the grid n=3."""
        grid = make_grid(3)
        for triple in all_triples(grid):
            result = enumerate_2uninorms(EnumJob(grid, triple))
            for table in result.tables:
                self.assertTrue(is_2uninorm(table, triple))
            self.assertLessEqual(result.stats.tables_emitted, result.stats.nodes_explored)

    def test_deterministic(self):
        """Test that identical jobs give identical streams and stats."""
        grid = make_grid(3)
        job = EnumJob(grid, NeutralTriple.from_indices(grid, 1, 2, 3))
        first, second = enumerate_2uninorms(job), enumerate_2uninorms(job)
        self.assertEqual(keys(first), keys(second))
        self.assertEqual(first.stats.as_dict(), second.stats.as_dict())

    def test_table_cap(self):
        """Test that the emission cap flags the job incomplete with the partial stream."""
        grid = make_grid(3)
        job = EnumJob(grid, NeutralTriple.from_indices(grid, 0, 0, 3), max_tables=1)
        with self.assertRaises(BudgetExceeded) as context:
            enumerate_2uninorms(job)
        partial = context.exception.partial
        self.assertEqual(len(partial.tables), 1)
        self.assertFalse(partial.stats.complete)

    def test_time_budget(self):
        """Test that an expired deadline stops the search."""
        grid = make_grid(4)
        job = EnumJob(grid, NeutralTriple.from_indices(grid, 0, 0, 4), deadline=0.0)
        with self.assertRaises(BudgetExceeded) as context:
            enumerate_2uninorms(job)
        self.assertIn("time budget", str(context.exception))

    def test_job_validation(self):
        """Test the size cap and the grid of the triple."""
        with self.assertRaises(ValueError) as context:
            EnumJob(make_grid(5), NeutralTriple.from_indices(make_grid(5), 0, 0, 5))
        self.assertIn("enumeration cap", str(context.exception))
        with self.assertRaises(ValueError):
            EnumJob(make_grid(3), NeutralTriple.from_indices(make_grid(2), 0, 0, 2))


class TestNaiveOracle(unittest.TestCase):

    def test_candidate_counts(self):
        """Test that every commutative table is generated: 8 on n=1, 729 on n=2."""
        for n, expected in ((1, 8), (2, 729)):
            grid = make_grid(n)
            result = enumerate_naive(EnumJob(grid, all_triples(grid)[0]))
            self.assertEqual(result.stats.candidates, expected)

    def test_matches_pruned_on_small_chains(self):
        """Test that both enumerators emit the same tables in the same order for n <= 2."""
        for n in (1, 2):
            grid = make_grid(n)
            for triple in all_triples(grid):
                job = EnumJob(grid, triple)
                self.assertEqual(keys(enumerate_naive(job)), keys(enumerate_2uninorms(job)), f"triple {triple}")

    def test_matches_pruned_on_sampled_triples(self):
        """Test both enumerators on a fixed 10% sample of the triples of n=3."""
        grid = make_grid(3)
        triples = all_triples(grid)
        for triple in random.Random(0).sample(triples, max(1, len(triples) // 10)):
            job = EnumJob(grid, triple)
            self.assertEqual(keys(enumerate_naive(job)), keys(enumerate_2uninorms(job)), f"triple {triple}")

    def test_pruning_beats_generation(self):
        """Test that the pruned search visits fewer nodes than the oracle generates on n=2."""
        grid = make_grid(2)
        job = EnumJob(grid, NeutralTriple.from_indices(grid, 0, 1, 2))
        self.assertLess(enumerate_2uninorms(job).stats.nodes_explored, enumerate_naive(job).stats.candidates)

    def test_candidate_cap(self):
        """Test that the oracle refuses the grid n=4."""
        grid = make_grid(4)
        with self.assertRaises(BudgetExceeded) as context:
            enumerate_naive(EnumJob(grid, all_triples(grid)[0]))
        self.assertIn("candidates", str(context.exception))


class TestCensusAudit(unittest.TestCase):

    def test_two_point_chain(self):
        """Test that the chain n=1 has four entries over two distinct tables and a clean audit."""
        report = census_audit(1)
        self.assertEqual(report.census_size, 4)
        self.assertEqual(report.distinct_tables, 2)
        self.assertEqual(report.audit.pairs_checked, 4 * 4 * 2)
        self.assertTrue(report.clean)
        self.assertTrue(report.complete)

    def test_three_point_chain(self):
        """Test the census audit on n=2, including the boundary pivot-bound findings."""
        report = census_audit(2)
        self.assertTrue(report.clean, report.summary())
        self.assertEqual(report.audit.disagreements, [])
        self.assertEqual(report.audit.intra_disagreements, [])
        self.assertEqual(report.structural_failures, [])
        self.assertEqual(report.audit.strict_pivot_violations, [])
        self.assertGreater(len(report.audit.pivot_bound_violations), 0)
        self.assertGreater(report.novel_pairs, 0)

    def test_four_point_chain(self):
        """Test the exhaustive census audit on n=3: no disagreement of any kind."""
        report = census_audit(3)
        self.assertTrue(report.complete)
        self.assertEqual(report.audit.disagreements, [])
        self.assertEqual(report.audit.intra_disagreements, [])
        self.assertEqual(report.audit.rule_violations, [])
        self.assertEqual(report.audit.strict_pivot_violations, [])
        self.assertEqual(report.structural_failures, [])
        by_shape = report.audit.specializations_by_shape
        for shape in Shape:
            self.assertGreater(by_shape[shape.value], 0, shape.value)
        self.assertEqual(sum(by_shape.values()), report.audit.specializations_checked)

    def test_jobs_do_not_change_results(self):
        """Test that a process pool gives the same report as a single process."""
        single, pooled = census_audit(2), census_audit(2, jobs=2)
        self.assertEqual(single.summary(), pooled.summary())
        self.assertEqual(single.audit.pivot_bound_violations, pooled.audit.pivot_bound_violations)

    def test_budget_marks_incomplete(self):
        """Test that an exhausted budget flags the report incomplete."""
        with patch("src.chain_enum._expired", return_value=True):
            report = census_audit(2, budget=1.0)
        self.assertFalse(report.complete)
        self.assertEqual(report.audit.disagreements, [])

    def test_census_pairs_feed_equivalence_audit(self):
        """Test that census pairs on n=1 audit cleanly through the generic entry point."""
        entries, _, complete = build_census(make_grid(1))
        self.assertTrue(complete)
        report = equivalence_audit(census_pairs(entries))
        self.assertEqual(report.pairs_checked, 32)
        self.assertTrue(report.clean)


if __name__ == '__main__':
    unittest.main()
