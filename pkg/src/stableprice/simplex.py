"""Exact revised simplex over the rationals.

Solves ``max c.x  s.t.  A x <= b, x >= 0`` for ``b >= 0``, so the slack basis
is a feasible start and no phase one is needed. Every LP in the package
(configuration LP, the stability price LP through its dual, the zero-utility
covering LP) has this shape.

Columns are sparse lists of ``(row, coefficient)`` with integer coefficients.
The basis inverse is kept as a dense Fraction matrix (the row count is small);
pricing runs in integer arithmetic after clearing denominators. Entering and
leaving variables follow Bland's rule, which rules out cycling.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .rational import scale_to_int

OPTIMAL = "optimal"
UNBOUNDED = "unbounded"

Column = Sequence[tuple[int, int]]


@dataclass(frozen=True)
class LPResult:
    status: str
    value: Fraction | None
    #: nonzero structural variables
    x: dict[int, Fraction]
    #: one dual per row (meaningful when optimal)
    y: tuple[Fraction, ...]
    basis: tuple[int, ...]
    iterations: int


def maximize(c: Sequence[Fraction], columns: Sequence[Column], b: Sequence[Fraction]) -> LPResult:
    n_rows = len(b)
    n_cols = len(c)
    if len(columns) != n_cols:
        raise ValueError("objective and column counts differ")
    b = [Fraction(v) for v in b]
    if any(v < 0 for v in b):
        raise ValueError("right-hand side must be nonnegative")
    for col in columns:
        for row, coeff in col:
            if not 0 <= row < n_rows:
                raise ValueError(f"row index {row} out of range")
            if not isinstance(coeff, int):
                raise TypeError("column coefficients must be integers")

    c_int, scale = scale_to_int([Fraction(v) for v in c])
    zero, one = Fraction(0), Fraction(1)
    binv = [[one if i == k else zero for k in range(n_rows)] for i in range(n_rows)]
    basis = [n_cols + i for i in range(n_rows)]
    cost_b = [0] * n_rows
    x_b = list(b)
    iterations = 0

    while True:
        y = [sum((cost_b[i] * binv[i][k] for i in range(n_rows) if cost_b[i]), zero)
             for k in range(n_rows)]
        y_int, den = scale_to_int(y)

        entering = -1
        for j in range(n_cols):
            reduced = c_int[j] * den
            for row, coeff in columns[j]:
                reduced -= coeff * y_int[row]
            if reduced > 0:
                entering = j
                break
        if entering < 0:
            for i in range(n_rows):
                if y_int[i] < 0:
                    entering = n_cols + i
                    break
        if entering < 0:
            value = sum((cost_b[i] * x_b[i] for i in range(n_rows)), zero) / scale
            x = {basis[i]: x_b[i] for i in range(n_rows) if basis[i] < n_cols and x_b[i]}
            return LPResult(OPTIMAL, value, x, tuple(v / scale for v in y), tuple(basis),
                            iterations)

        if entering < n_cols:
            col = columns[entering]
            d = [sum((binv[i][row] * coeff for row, coeff in col), zero) for i in range(n_rows)]
        else:
            k = entering - n_cols
            d = [binv[i][k] for i in range(n_rows)]

        leave = -1
        best = None
        for i in range(n_rows):
            if d[i] > 0:
                ratio = x_b[i] / d[i]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave < 0:
            return LPResult(UNBOUNDED, None, {}, (), tuple(basis), iterations)

        piv = d[leave]
        row_l = [v / piv for v in binv[leave]]
        binv[leave] = row_l
        x_b[leave] = x_b[leave] / piv
        for i in range(n_rows):
            f = d[i]
            if i != leave and f:
                binv[i] = [a - f * r for a, r in zip(binv[i], row_l)]
                x_b[i] -= f * x_b[leave]
        basis[leave] = entering
        cost_b[leave] = c_int[entering] if entering < n_cols else 0
        iterations += 1
