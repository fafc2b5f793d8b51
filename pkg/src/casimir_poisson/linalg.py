"""Dense exact linear algebra over the rational-function field.

Matrices are lists of rows of :class:`~casimir_poisson.scalar.ScalarField`.
Elimination picks, among the admissible nonzero entries of a column, the
one with the fewest monomials; this keeps intermediate expressions small
and makes every result deterministic.
"""

from __future__ import annotations

__all__ = ["det", "inverse", "rank", "solve", "identity", "matmul", "transpose", "SingularMatrixError"]


class SingularMatrixError(ValueError):
    """Raised when a matrix that must be invertible is not."""


def _chart_of(matrix, chart):
    if chart is not None:
        return chart
    for row in matrix:
        for entry in row:
            return entry.chart
    raise ValueError("cannot infer the chart of an empty matrix")


def identity(chart, n):
    return [[chart.one if i == j else chart.zero for j in range(n)] for i in range(n)]


def transpose(matrix):
    return [list(col) for col in zip(*matrix)]


def matmul(a, b):
    cols = transpose(b)
    out = []
    for row in a:
        out_row = []
        for col in cols:
            acc = None
            for x, y in zip(row, col):
                if x and y:
                    acc = x * y if acc is None else acc + x * y
            out_row.append(acc if acc is not None else row[0].chart.zero)
        out.append(out_row)
    return out


def _pick_pivot(rows, col, start):
    best, best_cost = None, None
    for r in range(start, len(rows)):
        entry = rows[r][col]
        if entry:
            cost = entry.complexity()
            if best is None or cost < best_cost:
                best, best_cost = r, cost
    return best


def _eliminate(rows, ncols, *, reduce_above=False):
    """Row-reduce ``rows`` in place; return pivot columns and swap parity."""
    pivots = []
    swaps = 0
    r = 0
    for c in range(ncols):
        if r == len(rows):
            break
        p = _pick_pivot(rows, c, r)
        if p is None:
            continue
        if p != r:
            rows[r], rows[p] = rows[p], rows[r]
            swaps += 1
        pivot = rows[r][c]
        targets = range(len(rows)) if reduce_above else range(r + 1, len(rows))
        for i in targets:
            if i == r or not rows[i][c]:
                continue
            factor = rows[i][c] / pivot
            rows[i] = [
                x - factor * y if y else x for x, y in zip(rows[i], rows[r])
            ]
        pivots.append(c)
        r += 1
    return pivots, swaps


def det(matrix, chart=None):
    """Determinant of a square matrix."""
    n = len(matrix)
    chart = _chart_of(matrix, chart) if n else chart
    if n == 0:
        return chart.one
    if any(len(row) != n for row in matrix):
        raise ValueError("determinant of a non-square matrix")
    rows = [list(row) for row in matrix]
    pivots, swaps = _eliminate(rows, n)
    if len(pivots) < n:
        return chart.zero
    result = chart.one if swaps % 2 == 0 else -chart.one
    for i in range(n):
        result = result * rows[i][i]
    return result


def rank(matrix, chart=None):
    """Generic rank over the fraction field."""
    if not matrix:
        return 0
    rows = [list(row) for row in matrix]
    pivots, _ = _eliminate(rows, len(rows[0]))
    return len(pivots)


def inverse(matrix, chart=None):
    """Inverse of a square matrix; raises :class:`SingularMatrixError`."""
    n = len(matrix)
    chart = _chart_of(matrix, chart) if n else chart
    if n == 0:
        return []
    ident = identity(chart, n)
    rows = [list(row) + ident[i] for i, row in enumerate(matrix)]
    pivots, _ = _eliminate(rows, n, reduce_above=True)
    if len(pivots) < n:
        raise SingularMatrixError("matrix is singular over the fraction field")
    out = []
    for i in range(n):
        pivot = rows[i][i]
        out.append([x / pivot for x in rows[i][n:]])
    return out


def solve(matrix, rhs, chart=None):
    """Solve ``matrix @ x = rhs`` for a unique ``x``.

    ``matrix`` may have more rows than columns as long as the system is
    consistent. Raises :class:`SingularMatrixError` when the solution is
    not unique and ``ValueError`` when the system is inconsistent.
    """
    chart = _chart_of(matrix, chart)
    ncols = len(matrix[0])
    rows = [list(row) + [b] for row, b in zip(matrix, rhs)]
    pivots, _ = _eliminate(rows, ncols, reduce_above=True)
    if len(pivots) < ncols:
        raise SingularMatrixError("system does not determine a unique solution")
    for row in rows[ncols:]:
        if row[ncols]:
            raise ValueError("inconsistent linear system")
    return [rows[i][ncols] / rows[i][i] for i in range(ncols)]
