"""Exact Gaussian elimination over the scalar field.

Matrices hold :class:`Scalar` entries.  Right-hand sides may be any values
supporting ``+``, ``-`` and ``.scale(Scalar)`` (for example Grassmann
elements), because only scalar row operations are performed.
"""

from __future__ import annotations

from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from .grassmann import ZERO, Scalar


def _scale(value, factor: Scalar):
    if isinstance(value, Scalar):
        return value * factor
    return value.scale(factor)


def _is_zero(value) -> bool:
    return value.is_zero()


def solve_linear(matrix: Sequence[Sequence[Scalar]], rhs: Sequence, zero) -> Optional[List]:
    """Solve ``matrix @ u = rhs``; free unknowns are set to ``zero``.

    Returns ``None`` when the system is inconsistent.
    """
    rows = [list(row) for row in matrix]
    values = list(rhs)
    row_count = len(rows)
    column_count = len(rows[0]) if rows else 0
    pivots: List[Tuple[int, int]] = []
    current = 0
    for column in range(column_count):
        pivot = None
        for r in range(current, row_count):
            if not rows[r][column].is_zero():
                pivot = r
                break
        if pivot is None:
            continue
        rows[current], rows[pivot] = rows[pivot], rows[current]
        values[current], values[pivot] = values[pivot], values[current]
        inverse = rows[current][column].inverse()
        rows[current] = [entry * inverse for entry in rows[current]]
        values[current] = _scale(values[current], inverse)
        for r in range(row_count):
            if r != current and not rows[r][column].is_zero():
                factor = rows[r][column]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[current])]
                values[r] = values[r] - _scale(values[current], factor)
        pivots.append((current, column))
        current += 1
        if current == row_count:
            break
    for r in range(current, row_count):
        if not _is_zero(values[r]):
            return None
    solution = [zero] * column_count
    for r, column in pivots:
        solution[column] = values[r]
    return solution


def rank(vectors: Sequence[Dict[Hashable, Scalar]]) -> int:
    keys = sorted({key for vector in vectors for key in vector}, key=repr)
    matrix = [[vector.get(key, ZERO) for key in keys] for vector in vectors]
    # rank of the row space via elimination on the transpose-free matrix
    rows = [row[:] for row in matrix]
    result = 0
    columns = len(keys)
    for column in range(columns):
        pivot = None
        for r in range(result, len(rows)):
            if not rows[r][column].is_zero():
                pivot = r
                break
        if pivot is None:
            continue
        rows[result], rows[pivot] = rows[pivot], rows[result]
        inverse = rows[result][column].inverse()
        rows[result] = [entry * inverse for entry in rows[result]]
        for r in range(len(rows)):
            if r != result and not rows[r][column].is_zero():
                factor = rows[r][column]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[result])]
        result += 1
    return result


def in_span(vectors: Sequence[Dict[Hashable, Scalar]], target: Dict[Hashable, Scalar]) -> bool:
    """Whether ``target`` is a scalar combination of ``vectors``."""
    keys = sorted({key for vector in list(vectors) + [target] for key in vector}, key=repr)
    matrix = [[vector.get(key, ZERO) for vector in vectors] for key in keys]
    rhs = [target.get(key, ZERO) for key in keys]
    if not vectors:
        return all(value.is_zero() for value in rhs)
    return solve_linear(matrix, rhs, ZERO) is not None
