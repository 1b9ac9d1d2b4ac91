"""
Integer lattice tools for multiplicative constraint systems.

A system ``prod_j q_j^{C[m][j]} = a^{x[m]}`` becomes the integer-linear
system ``C e = x`` on exponent vectors.  Column operations with a tracked
unimodular transform give a kernel basis over Z and particular solutions
over Z or Z/3.
"""
import logging

from sympy import ZZ, Matrix, eye, zeros
from sympy.matrices.normalforms import smith_normal_form

try:
    from sympy.core.intfunc import igcdex
except ImportError:  # sympy < 1.13
    from sympy.core.numbers import igcdex

from app.errors import Infeasible

logger = logging.getLogger(__name__)


def _combine(mat: Matrix, c1: int, c2: int, x, y, z, w) -> None:
    """Replace columns (c1, c2) by (x*c1 + y*c2, z*c1 + w*c2)."""
    first = mat.col(c1) * x + mat.col(c2) * y
    second = mat.col(c1) * z + mat.col(c2) * w
    mat[:, c1] = first
    mat[:, c2] = second


def column_echelon(a: Matrix) -> tuple[Matrix, Matrix, list[tuple[int, int]]]:
    """Column-style Hermite reduction: returns ``(H, U, pivots)`` with ``A U = H``.

    ``U`` is unimodular, ``pivots`` lists ``(row, column)`` of the positive
    pivot entries, and every column of H past the last pivot is zero.
    """
    h = Matrix(a)
    m, n = h.shape
    u = eye(n)
    pivots = []
    col = 0
    for row in range(m):
        if col >= n:
            break
        for other in range(col + 1, n):
            b = h[row, other]
            if b == 0:
                continue
            lead = h[row, col]
            if lead == 0:
                h.col_swap(col, other)
                u.col_swap(col, other)
                continue
            x, y, g = igcdex(lead, b)
            _combine(h, col, other, x, y, -b // g, lead // g)
            _combine(u, col, other, x, y, -b // g, lead // g)
        if h[row, col] != 0:
            if h[row, col] < 0:
                h[:, col] = -h.col(col)
                u[:, col] = -u.col(col)
            pivots.append((row, col))
            col += 1
    return h, u, pivots


def integer_kernel(a: Matrix) -> Matrix:
    """Columns form a Z-basis of ``{e in Z^n : A e = 0}``."""
    _, u, pivots = column_echelon(a)
    return u[:, len(pivots):]


def integer_solution(a: Matrix, rhs: list[int]) -> Matrix:
    """One integer solution of ``A e = rhs``; raises Infeasible if none exists."""
    h, u, pivots = column_echelon(a)
    m, n = h.shape
    beta = zeros(n, 1)
    for row, col in pivots:
        residual = rhs[row] - sum(h[row, c] * beta[c] for c in range(col))
        if residual % h[row, col] != 0:
            raise Infeasible(f"no integer solution: row {row} needs {residual}/{h[row, col]}")
        beta[col] = residual // h[row, col]
    if list(h * beta) != list(rhs):
        raise Infeasible("integer system is inconsistent")
    return u * beta


def modular_solution(a: Matrix, rhs: list[int], p: int = 3) -> Matrix:
    """One solution of ``A e = rhs (mod p)`` with entries in 0..p-1."""
    m, n = a.shape
    rows = [[int(a[r, c]) % p for c in range(n)] + [int(rhs[r]) % p] for r in range(m)]
    pivot_cols = []
    r = 0
    for c in range(n):
        found = next((k for k in range(r, m) if rows[k][c]), None)
        if found is None:
            continue
        rows[r], rows[found] = rows[found], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [(v * inv) % p for v in rows[r]]
        for k in range(m):
            if k != r and rows[k][c]:
                factor = rows[k][c]
                rows[k] = [(v - factor * w) % p for v, w in zip(rows[k], rows[r])]
        pivot_cols.append(c)
        r += 1
    if any(row[n] for row in rows[r:]):
        raise Infeasible(f"no solution modulo {p}")
    solution = zeros(n, 1)
    for k, c in enumerate(pivot_cols):
        solution[c] = rows[k][n]
    return solution


def coordinate_parametrization(kernel: Matrix, offset: Matrix) -> tuple[Matrix, Matrix, dict[int, int]]:
    """Re-choose kernel generators so that they coincide with coordinates.

    Scans coordinates in order and, whenever the remaining generators can be
    combined into a unit at that coordinate, makes that coordinate equal to
    exactly one generator.  Returns ``(kernel', offset', selected)`` where
    ``selected`` maps coordinate -> generator column; the solution set
    ``offset + kernel * Z^d`` is unchanged.
    """
    k = Matrix(kernel)
    off = Matrix(offset)
    rows, cols = k.shape
    selected: dict[int, int] = {}
    free = list(range(cols))
    for coord in range(rows):
        live = [c for c in free if k[coord, c] != 0]
        if not live:
            continue
        target = live[0]
        for other in live[1:]:
            lead, b = k[coord, target], k[coord, other]
            x, y, g = igcdex(lead, b)
            _combine(k, target, other, x, y, -b // g, lead // g)
        if abs(k[coord, target]) != 1:
            continue
        if k[coord, target] < 0:
            k[:, target] = -k.col(target)
        for c in range(cols):
            if c != target and k[coord, c] != 0:
                k[:, c] = k.col(c) - k.col(target) * k[coord, c]
        off = off - k.col(target) * off[coord]
        selected[coord] = target
        free.remove(target)
    logger.debug("parametrized %d of %d generators by coordinates", len(selected), cols)
    return k, off, selected


def torsion_factors(a: Matrix) -> list[int]:
    """Invariant factors of ``a`` greater than one.

    A nonempty result means the multiplicative system also has solutions
    involving roots of unity that the integer exponent lattice does not see.
    """
    if not a.rows or not a.cols:
        return []
    snf = smith_normal_form(a, domain=ZZ)
    factors = [abs(int(snf[k, k])) for k in range(min(snf.shape))]
    return [f for f in factors if f > 1]
