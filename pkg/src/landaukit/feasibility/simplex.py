"""Two-phase tableau simplex over Fractions, Bland's rule (no cycling)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

F0 = Fraction(0)


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: tuple[Fraction, ...] = ()
    value: Fraction = F0


class _Tableau:
    def __init__(self, rows: list[list[Fraction]], basis: list[int]):
        self.rows = rows  # each row: coefficients..., rhs
        self.basis = basis

    def pivot(self, r: int, c: int) -> None:
        row = self.rows[r]
        piv = row[c]
        if piv != 1:
            self.rows[r] = row = [v / piv for v in row]
        for i, other in enumerate(self.rows):
            if i != r and other[c] != 0:
                f = other[c]
                self.rows[i] = [a - f * b for a, b in zip(other, row)]
        self.basis[r] = c

    def reduced_costs(self, cost: Sequence[Fraction], ncols: int) -> list[Fraction]:
        # d_j = c_j - c_B . column_j ; entering candidates have d_j > 0 (maximize)
        d = list(cost[:ncols])
        for i, b in enumerate(self.basis):
            cb = cost[b]
            if cb != 0:
                row = self.rows[i]
                for j in range(ncols):
                    if row[j] != 0:
                        d[j] -= cb * row[j]
        return d

    def optimize(self, cost: Sequence[Fraction], allowed: int) -> str:
        """Maximize ``cost . x`` over columns ``< allowed``."""
        while True:
            d = self.reduced_costs(cost, allowed)
            enter = next((j for j in range(allowed) if d[j] > 0), None)
            if enter is None:
                return "optimal"
            best = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    ratio = row[-1] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return "unbounded"
            self.pivot(best[1], enter)


def solve_lp(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction], c: Sequence[Fraction]) -> LPResult:
    """Maximize ``c.x`` subject to ``A x = b``, ``x >= 0``."""
    m = len(A)
    n = len(c)
    rows = []
    for i in range(m):
        coeffs = [Fraction(v) for v in A[i]]
        rhs = Fraction(b[i])
        if rhs < 0:
            coeffs = [-v for v in coeffs]
            rhs = -rhs
        art = [F0] * m
        art[i] = Fraction(1)
        rows.append(coeffs + art + [rhs])
    tab = _Tableau(rows, [n + i for i in range(m)])

    phase1 = [F0] * n + [Fraction(-1)] * m
    tab.optimize(phase1, n + m)
    if any(tab.rows[i][-1] != 0 for i, bv in enumerate(tab.basis) if bv >= n):
        return LPResult("infeasible")

    # drive artificial variables out of the basis, dropping redundant rows
    i = 0
    while i < len(tab.rows):
        if tab.basis[i] >= n:
            col = next((j for j in range(n) if tab.rows[i][j] != 0), None)
            if col is None:
                del tab.rows[i]
                del tab.basis[i]
                continue
            tab.pivot(i, col)
        i += 1

    cost = [Fraction(v) for v in c] + [F0] * m
    status = tab.optimize(cost, n)
    if status == "unbounded":
        return LPResult("unbounded")
    x = [F0] * n
    for i, bv in enumerate(tab.basis):
        x[bv] = tab.rows[i][-1]
    value = sum((Fraction(ci) * xi for ci, xi in zip(c, x)), F0)
    return LPResult("optimal", tuple(x), value)
