"""
Exact sparse Gauss-Jordan elimination over Q(w).

Vectors are dicts ``column -> value`` with integer columns; missing columns
are zero.  Pivots are chosen at the smallest column of each reduced row, so
the stored basis is always in reduced row echelon form.
"""
import logging
from typing import Iterable, Mapping

from app.scalars import CycScalar

logger = logging.getLogger(__name__)

Vector = dict[int, CycScalar]


def _axpy(target: Vector, factor, source: Mapping[int, CycScalar]) -> None:
    """target += factor * source, dropping cancelled entries."""
    for col, value in source.items():
        updated = target.get(col, 0) + factor * value
        if updated:
            target[col] = updated
        else:
            target.pop(col, None)


class RowEchelon:
    """Incrementally maintained reduced row echelon basis of a row space."""

    def __init__(self):
        self.pivots: dict[int, Vector] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row: Mapping[int, CycScalar]) -> Vector:
        """Remainder of ``row`` after eliminating every pivot column."""
        work = {c: v for c, v in row.items() if v}
        for col in [c for c in work if c in self.pivots]:
            factor = work.get(col)
            if factor:
                _axpy(work, -factor, self.pivots[col])
        return work

    def contains(self, row: Mapping[int, CycScalar]) -> bool:
        return not self.reduce(row)

    def add(self, row: Mapping[int, CycScalar]) -> bool:
        """Insert a row; returns True when the rank grew."""
        work = self.reduce(row)
        if not work:
            return False
        pivot = min(work)
        inv = work[pivot].inverse()
        work = {c: v * inv for c, v in work.items()}
        for other in self.pivots.values():
            factor = other.get(pivot)
            if factor:
                _axpy(other, -factor, work)
        self.pivots[pivot] = work
        return True

    def extend(self, rows: Iterable[Mapping[int, CycScalar]]) -> int:
        return sum(1 for row in rows if self.add(row))

    def basis(self) -> list[Vector]:
        return [dict(sorted(self.pivots[p].items())) for p in sorted(self.pivots)]


def rank(rows: Iterable[Mapping[int, CycScalar]]) -> int:
    echelon = RowEchelon()
    echelon.extend(rows)
    return echelon.rank


def rref(rows: Iterable[Mapping[int, CycScalar]]) -> list[Vector]:
    echelon = RowEchelon()
    echelon.extend(rows)
    return echelon.basis()


def nullspace(rows: Iterable[Mapping[int, CycScalar]], columns: Iterable[int]) -> list[Vector]:
    """Basis of ``{x : row . x = 0 for every row}`` over the given columns.

    One basis vector per free column, with a 1 in that column.
    """
    echelon = RowEchelon()
    echelon.extend(rows)
    basis = []
    for free in sorted(set(columns)):
        if free in echelon.pivots:
            continue
        vector = {free: CycScalar(1)}
        for pivot, prow in echelon.pivots.items():
            value = prow.get(free)
            if value:
                vector[pivot] = -value
        basis.append(dict(sorted(vector.items())))
    return basis


def solve(rows: list[Mapping[int, CycScalar]], rhs: list, columns: Iterable[int]) -> Vector | None:
    """One solution of ``row_r . x = rhs_r`` for all r, or None if inconsistent.

    Free columns are set to zero.
    """
    columns = sorted(set(columns))
    rhs_col = (max(columns) + 1) if columns else 0
    echelon = RowEchelon()
    for row, value in zip(rows, rhs):
        augmented = dict(row)
        if value:
            augmented[rhs_col] = CycScalar.coerce(value)
        echelon.add(augmented)
    if rhs_col in echelon.pivots:
        return None
    solution = {}
    for pivot, prow in echelon.pivots.items():
        value = prow.get(rhs_col)
        if value:
            solution[pivot] = value
    logger.debug("solved %d equations in %d unknowns, rank %d", len(rows), len(columns), echelon.rank)
    return dict(sorted(solution.items()))


def span_dimension(vectors: Iterable[Mapping[int, CycScalar]]) -> int:
    return rank(vectors)


def same_span(first: Iterable[Mapping[int, CycScalar]], second: Iterable[Mapping[int, CycScalar]]) -> bool:
    return rref(first) == rref(second)
