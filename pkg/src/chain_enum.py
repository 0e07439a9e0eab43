"""Exhaustive enumeration of 2-uninorms on small chains, and the census audit.

The pruned enumerator fills the upper triangle of the table cell by cell
(row-major), with the neutral rows of the triple prefilled, monotone
bounds taken from known cells, and associativity checked on every
determined triple. The naive enumerator generates every commutative table
with numpy and filters by the axioms; it is the oracle for the pruned one.
"""

import logging
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from tqdm import tqdm

from src.axioms import check_structural_props, is_2uninorm
from src.errors import BudgetExceeded
from src.grid_domain import UnitGrid
from src.migrativity import AuditReport, MigrativePair, audit_pair, check_pivot_bounds
from src.operators import OperatorTable, SubclassTag, all_triples, classify
from src.utils import format_value

logger = logging.getLogger(__name__)

DEFAULT_MAX_TABLES = 10**6
DEFAULT_MAX_N = 4
NAIVE_CANDIDATE_CAP = 20_000_000
NAIVE_CHUNK = 1 << 15


@dataclass(frozen=True)
class EnumJob:
    grid: UnitGrid
    triple: object  # NeutralTriple
    max_tables: int = DEFAULT_MAX_TABLES
    deadline: Optional[float] = None  # time.monotonic() value
    max_n: int = DEFAULT_MAX_N

    def __post_init__(self):
        if self.triple.n != self.grid.n:
            raise ValueError(f"triple {self.triple} is not on grid n={self.grid.n}")
        if self.grid.n > self.max_n:
            raise ValueError(f"grid n={self.grid.n} exceeds the enumeration cap n<={self.max_n}")


@dataclass
class EnumStats:
    tables_emitted: int = 0
    nodes_explored: int = 0
    candidates: int = 0
    pruned_by: Counter = field(default_factory=Counter)
    complete: bool = True

    def as_dict(self):
        data = asdict(self)
        data["pruned_by"] = dict(sorted(self.pruned_by.items()))
        return data


@dataclass
class EnumResult:
    tables: list
    stats: EnumStats


def _expired(deadline):
    return deadline is not None and time.monotonic() > deadline


# ---------------------------------------------------------------------------
# Pruned backtracking
# ---------------------------------------------------------------------------

class _Search:
    def __init__(self, job, stats):
        self.job = job
        self.stats = stats
        self.n = job.grid.n
        self.size = self.n + 1
        self.cells = [[None] * self.size for _ in range(self.size)]
        self.consistent = self._prefill()
        self.free = [
            (i, j) for i in range(self.size) for j in range(i, self.size) if self.cells[i][j] is None
        ]
        stats.pruned_by["commutativity"] += self.size * (self.size - 1) // 2

    def _set(self, i, j, value):
        self.cells[i][j] = value
        self.cells[j][i] = value

    def _prefill(self):
        e, a, f = self.job.triple.indices
        fixed = [(e, x) for x in range(a + 1)] + [(f, x) for x in range(a, self.size)]
        for row, x in fixed:
            current = self.cells[row][x]
            if current is not None and current != x:
                return False
            self._set(row, x, x)
        self.stats.pruned_by["neutral"] += sum(
            1 for i in range(self.size) for j in range(i, self.size) if self.cells[i][j] is not None
        )
        return self._monotone_consistent() and self._assoc_consistent()

    def _monotone_consistent(self):
        known = [(x, y, v) for x, row in enumerate(self.cells) for y, v in enumerate(row) if v is not None]
        return all(
            v <= w for x, y, v in known for x2, y2, w in known if x <= x2 and y <= y2
        )

    def _bounds(self, i, j):
        lo, hi = 0, self.n
        for x, row in enumerate(self.cells):
            for y, v in enumerate(row):
                if v is None:
                    continue
                if x <= i and y <= j and v > lo:
                    lo = v
                if x >= i and y >= j and v < hi:
                    hi = v
        return lo, hi

    def _assoc_consistent(self):
        t = self.cells
        for x in range(self.size):
            row_x = t[x]
            for y in range(self.size):
                xy = row_x[y]
                if xy is None:
                    continue
                row_y, row_xy = t[y], t[xy]
                for z in range(self.size):
                    yz = row_y[z]
                    if yz is None:
                        continue
                    left, right = row_xy[z], row_x[yz]
                    if left is not None and right is not None and left != right:
                        return False
        return True

    def walk(self, k=0):
        self.stats.nodes_explored += 1
        if _expired(self.job.deadline):
            raise BudgetExceeded(f"time budget exhausted while enumerating triple {self.job.triple}")
        if k == len(self.free):
            yield OperatorTable(self.job.grid, self.cells)
            return
        i, j = self.free[k]
        lo, hi = self._bounds(i, j)
        self.stats.pruned_by["monotonicity"] += self.size - max(hi - lo + 1, 0)
        for value in range(lo, hi + 1):
            self._set(i, j, value)
            if self._assoc_consistent():
                yield from self.walk(k + 1)
            else:
                self.stats.pruned_by["associativity"] += 1
        self._set(i, j, None)


def iter_2uninorms(job, stats):
    """Yields the 2-uninorms of a job one by one, updating stats as it goes."""
    search = _Search(job, stats)
    if not search.consistent:
        logger.debug(f"Neutral rows of {job.triple} conflict; no table possible.")
        return
    for table in search.walk():
        if not is_2uninorm(table, job.triple):
            error_msg = f"Enumerator emitted a table that fails the axiom suite: {table!r} with {job.triple}"
            logger.error(error_msg)
            raise RuntimeError(error_msg)
        if stats.tables_emitted >= job.max_tables:
            raise BudgetExceeded(f"more than {job.max_tables} tables for triple {job.triple}")
        stats.tables_emitted += 1
        yield table


def enumerate_2uninorms(job):
    """
    Enumerates every 2-uninorm on the job's grid having the job's triple.
    Args:
        job (EnumJob): Grid, triple and limits.
    Returns:
        EnumResult: Tables in lexicographic fill order, plus search statistics.
    Raises:
        BudgetExceeded: With the partial EnumResult (complete=False) attached.
    """
    stats = EnumStats()
    tables = []
    try:
        for table in iter_2uninorms(job, stats):
            tables.append(table)
    except BudgetExceeded as e:
        stats.complete = False
        logger.warning(f"Enumeration for {job.triple} stopped early: {e}")
        raise BudgetExceeded(str(e), partial=EnumResult(tables, stats)) from e
    logger.debug(
        f"Triple {job.triple}: {stats.tables_emitted} tables, {stats.nodes_explored} nodes explored."
    )
    return EnumResult(tables, stats)


# ---------------------------------------------------------------------------
# Naive oracle
# ---------------------------------------------------------------------------

def batch_associative(tables):
    """Associativity of a stack of tables shaped (K, m, m)."""
    count, size, _ = tables.shape
    k = np.arange(count)[:, None, None, None]
    idx = np.arange(size)
    left = tables[k, tables[:, :, :, None], idx[None, None, None, :]]
    right = tables[k, idx[None, :, None, None], tables[:, None, :, :]]
    return np.all(left == right, axis=(1, 2, 3))


def enumerate_naive(job, chunk=NAIVE_CHUNK):
    """
    Generates every commutative table on the grid and keeps the 2-uninorms with job.triple.
    Args:
        job (EnumJob): Grid, triple and limits.
        chunk (int): Candidates materialised per numpy batch.
    Returns:
        EnumResult: Tables in lexicographic order over the upper triangle; stats.candidates is
        the number of commutative tables generated.
    Raises:
        BudgetExceeded: When the candidate space exceeds the cap or the deadline passes.
    """
    grid = job.grid
    size = grid.size
    rows, cols = np.triu_indices(size)
    cells = len(rows)
    total = size**cells
    if total > NAIVE_CANDIDATE_CAP:
        raise BudgetExceeded(
            f"naive enumeration on n={grid.n} needs {total} candidates (cap {NAIVE_CANDIDATE_CAP})",
            partial=EnumResult([], EnumStats(complete=False)),
        )
    e, a, f = job.triple.indices
    powers = size ** np.arange(cells - 1, -1, -1, dtype=np.int64)
    stats = EnumStats(candidates=total)
    tables = []
    for start in range(0, total, chunk):
        if _expired(job.deadline):
            stats.complete = False
            raise BudgetExceeded(f"time budget exhausted in naive enumeration at candidate {start}",
                                 partial=EnumResult(tables, stats))
        codes = np.arange(start, min(start + chunk, total), dtype=np.int64)
        digits = (codes[:, None] // powers[None, :]) % size
        batch = np.empty((len(codes), size, size), dtype=np.intp)
        batch[:, rows, cols] = digits
        batch[:, cols, rows] = digits
        keep = np.all(batch[:, e, : a + 1] == np.arange(a + 1), axis=1)
        keep &= np.all(batch[:, f, a:] == np.arange(a, size), axis=1)
        keep &= np.all(np.diff(batch, axis=1) >= 0, axis=(1, 2))
        keep &= np.all(np.diff(batch, axis=2) >= 0, axis=(1, 2))
        survivors = batch[keep]
        if len(survivors):
            survivors = survivors[batch_associative(survivors)]
        for entries in survivors:
            tables.append(OperatorTable(grid, entries))
    stats.tables_emitted = len(tables)
    return EnumResult(tables, stats)


# ---------------------------------------------------------------------------
# Census
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CensusEntry:
    name: str
    table: OperatorTable
    triple: object
    tag: SubclassTag


@dataclass
class CensusReport:
    n: int
    census_size: int = 0
    distinct_tables: int = 0
    entries_by_tag: dict = field(default_factory=dict)
    enum_stats: dict = field(default_factory=dict)
    structural_failures: list = field(default_factory=list)
    novel_pairs: int = 0
    novel_migrative_pairs: int = 0
    audit: AuditReport = field(default_factory=AuditReport)
    complete: bool = True

    @property
    def clean(self):
        return self.audit.clean and not self.structural_failures

    def summary(self):
        return {
            "n": self.n,
            "census_size": self.census_size,
            "distinct_tables": self.distinct_tables,
            "entries_by_tag": self.entries_by_tag,
            "structural_failures": len(self.structural_failures),
            "novel_pairs": self.novel_pairs,
            "novel_migrative_pairs": self.novel_migrative_pairs,
            **{f"audit_{k}": v for k, v in self.audit.summary().items()},
            "complete": self.complete,
        }


def build_census(grid, deadline=None, progress=False):
    """
    Enumerates the 2-uninorms of every triple on the grid.
    Returns:
        tuple: (entries, stats per triple string, complete flag).
    """
    entries, stats_by_triple = [], {}
    complete = True
    triples = all_triples(grid)
    for triple in tqdm(triples, desc=f"Enumerating n={grid.n}", disable=not progress):
        job = EnumJob(grid, triple, deadline=deadline)
        try:
            result = enumerate_2uninorms(job)
        except BudgetExceeded as e:
            result = e.partial
            complete = False
        stats_by_triple[str(triple)] = result.stats.as_dict()
        tag = classify(triple)
        for table in result.tables:
            entries.append(CensusEntry(f"T{len(entries):04d}", table, triple, tag))
        if not complete:
            break
    logger.info(f"Census on n={grid.n}: {len(entries)} (table, triple) entries over {len(stats_by_triple)} triples.")
    return entries, stats_by_triple, complete


def _novel(t1, t2):
    return all(x != y for x, y in zip(t1.indices, t2.indices))


def _audit_chunk(entries, indices, deadline):
    """Audits every pair whose first operand is one of entries[indices]."""
    report = AuditReport()
    novel = novel_migrative = 0
    points = entries[0].table.grid.points() if entries else []
    for i in indices:
        if _expired(deadline):
            report.complete = False
            break
        first = entries[i]
        for second in entries:
            migrative_somewhere = False
            for alpha in points:
                p = MigrativePair(first.table, first.triple, second.table, second.triple, alpha,
                                  first.name, second.name)
                before = report.migrative_pairs
                audit_pair(p, report)
                migrative_somewhere = migrative_somewhere or report.migrative_pairs > before
            if _novel(first.triple, second.triple):
                novel += 1
                novel_migrative += int(migrative_somewhere)
    return report, novel, novel_migrative


def census_audit(n, jobs=1, budget=None, progress=False):
    """
    Audits every ordered pair of census 2-uninorms at every grid alpha.
    Args:
        n (int): Grid size.
        jobs (int): Worker processes for the pair audit.
        budget (float, optional): Wall-clock seconds for the whole run.
        progress (bool): Show tqdm bars.
    Returns:
        CensusReport: Census sizes, structural failures, pivot-bound findings and the
        equivalence audit; complete=False when the budget ran out.
    """
    grid = UnitGrid(n)
    deadline = None if budget is None else time.monotonic() + budget
    started = time.monotonic()
    entries, stats_by_triple, complete = build_census(grid, deadline, progress)

    report = CensusReport(n=n, census_size=len(entries), enum_stats=stats_by_triple)
    report.distinct_tables = len({entry.table for entry in entries})
    report.entries_by_tag = dict(sorted(Counter(entry.tag.value for entry in entries).items()))

    for entry in entries:
        structural = check_structural_props(entry.table, entry.triple, assume_verified=True)
        for failure in structural.failures():
            report.structural_failures.append(
                {"record": "structural-failure", "table": entry.name, "triple": str(entry.triple),
                 "item": failure.item, "witness": list(failure.witness)}
            )

    audit = AuditReport()
    chunks = [list(range(i, len(entries), max(jobs, 1))) for i in range(max(jobs, 1))]
    if jobs > 1 and len(entries) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_audit_chunk, entries, chunk, deadline) for chunk in chunks if chunk]
            for future in tqdm(as_completed(futures), total=len(futures), desc="Auditing", disable=not progress):
                part, novel, novel_migrative = future.result()
                audit.merge(part)
                report.novel_pairs += novel
                report.novel_migrative_pairs += novel_migrative
    else:
        for i in tqdm(range(len(entries)), desc=f"Auditing n={n}", disable=not progress):
            part, novel, novel_migrative = _audit_chunk(entries, [i], deadline)
            audit.merge(part)
            report.novel_pairs += novel
            report.novel_migrative_pairs += novel_migrative
            if not part.complete:
                break

    # Pivot bounds need no U1, only a triple on the grid
    triples = all_triples(grid)
    for entry in entries:
        for triple in triples:
            for alpha in grid.points():
                for item, boundary in check_pivot_bounds(entry.table, triple, alpha).violations:
                    row = entry.table.entries[alpha.index]
                    audit.pivot_bound_violations[(entry.name, triple.indices, alpha.index, item)] = {
                        "record": "pivot-bound-violation",
                        "u2": entry.name,
                        "triple1": str(triple),
                        "alpha": str(alpha),
                        "item": item,
                        "lam": format_value(grid.value(int(row[triple.e.index]))),
                        "mu": format_value(grid.value(int(row[triple.f.index]))),
                        "boundary": boundary,
                    }

    audit.sort()
    report.audit = audit
    report.complete = complete and audit.complete
    logger.info(
        f"Census audit n={n}: {audit.pairs_checked} pair-alpha checks, {len(audit.disagreements)} disagreements, "
        f"{len(audit.pivot_bound_violations)} pivot-bound violations "
        f"({len(audit.strict_pivot_violations)} off boundary) in {time.monotonic() - started:.1f}s."
    )
    return report


def census_pairs(entries):
    """Every ordered pair of census entries at every alpha, as MigrativePairs."""
    if not entries:
        return
    points = entries[0].table.grid.points()
    for first in entries:
        for second in entries:
            for alpha in points:
                yield MigrativePair(first.table, first.triple, second.table, second.triple, alpha,
                                    first.name, second.name)

