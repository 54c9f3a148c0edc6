"""Two-phase primal simplex on a sparse tableau.

All variables are non-negative. Rows are ``(coeffs, sense, rhs)`` with
``coeffs`` a ``{column: value}`` dict and ``sense`` one of ``"<="``, ``">="``,
``"="``.  In exact mode arithmetic runs on ``gmpy2.mpq`` and no tolerance is
used; in float mode comparisons use ``eps``.

Pivoting uses Dantzig's rule and falls back to Bland's rule after a run of
degenerate pivots, which rules out cycling.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import gmpy2

from ._numbers import FLOAT_TOL, from_mpq, to_mpq

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

# consecutive degenerate pivots tolerated before switching to Bland's rule
_DEGENERATE_RUN = 8


@dataclass
class SimplexResult:
    status: str
    objective: object
    values: List[object]
    iterations: int


class _Tableau:
    def __init__(self, rows, basis, rhs, eps, zero):
        self.rows: List[Dict[int, object]] = rows
        self.basis: List[int] = basis
        self.rhs: List[object] = rhs
        self.eps = eps
        self.zero = zero
        self.d: Dict[int, object] = {}
        self.z = zero
        self.iterations = 0

    def price(self, cost: Dict[int, object]):
        """Reduced costs ``c - c_B B^-1 A`` for the current basis."""
        d = {k: v for k, v in cost.items() if v != 0}
        z = self.zero
        for r, row in enumerate(self.rows):
            cb = cost.get(self.basis[r], 0)
            if cb == 0:
                continue
            z += cb * self.rhs[r]
            for col, a in row.items():
                val = d.get(col, self.zero) - cb * a
                if self._is_zero(val):
                    d.pop(col, None)
                else:
                    d[col] = val
        for col in self.basis:
            d.pop(col, None)
        self.d = d
        self.z = z

    def _is_zero(self, v) -> bool:
        return v == 0 if self.eps == 0 else abs(v) <= self.eps

    def pivot(self, r: int, e: int):
        row = self.rows[r]
        a = row[e]
        if a != 1:
            inv = 1 / a
            for col in row:
                row[col] = row[col] * inv
            self.rhs[r] = self.rhs[r] * inv
        if self.eps:
            row[e] = 1.0
        br = self.rhs[r]
        for k, other in enumerate(self.rows):
            if k == r:
                continue
            f = other.get(e)
            if f is None:
                continue
            for col, v in row.items():
                val = other.get(col, self.zero) - f * v
                if self._is_zero(val):
                    other.pop(col, None)
                else:
                    other[col] = val
            other.pop(e, None)
            self.rhs[k] = self.rhs[k] - f * br
            if self.eps and abs(self.rhs[k]) <= self.eps:
                self.rhs[k] = self.zero
        de = self.d.get(e)
        if de is not None:
            for col, v in row.items():
                val = self.d.get(col, self.zero) - de * v
                if self._is_zero(val):
                    self.d.pop(col, None)
                else:
                    self.d[col] = val
            self.d.pop(e, None)
            self.z = self.z + de * br
        self.basis[r] = e
        self.iterations += 1

    def entering(self, bland: bool, allowed) -> Optional[int]:
        best, best_val = None, None
        for col, v in self.d.items():
            if v > self.eps and (allowed is None or col in allowed):
                if bland:
                    if best is None or col < best:
                        best = col
                elif best_val is None or v > best_val or (v == best_val and col < best):
                    best, best_val = col, v
        return best

    def leaving(self, e: int) -> Optional[int]:
        best_r, best_ratio = None, None
        for r, row in enumerate(self.rows):
            a = row.get(e)
            if a is None or a <= self.eps:
                continue
            ratio = self.rhs[r] / a
            if (best_r is None or ratio < best_ratio
                    or (ratio == best_ratio and self.basis[r] < self.basis[best_r])):
                best_r, best_ratio = r, ratio
        return best_r

    def optimize(self, allowed=None, max_iter=50_000) -> str:
        degenerate = 0
        while True:
            e = self.entering(degenerate >= _DEGENERATE_RUN, allowed)
            if e is None:
                return OPTIMAL
            r = self.leaving(e)
            if r is None:
                return UNBOUNDED
            if self._is_zero(self.rhs[r]):
                degenerate += 1
            else:
                degenerate = 0
            self.pivot(r, e)
            if self.iterations > max_iter:
                raise RuntimeError("simplex iteration limit reached")


def maximize(
    objective: Dict[int, object],
    rows: Sequence[Tuple[Dict[int, object], str, object]],
    n_vars: int,
    exact: bool = True,
) -> SimplexResult:
    """Maximize ``objective . x`` subject to ``rows`` and ``x >= 0``.

    Exact inputs (Fractions/ints) give Fraction outputs; float mode gives floats.
    """
    eps = 0 if exact else FLOAT_TOL
    conv = to_mpq if exact else float
    zero = gmpy2.mpq(0) if exact else 0.0

    t_rows: List[Dict[int, object]] = []
    rhs: List[object] = []
    basis: List[int] = []
    artificial: List[int] = []
    next_col = n_vars
    for coeffs, sense, b in rows:
        row = {int(k): conv(v) for k, v in coeffs.items() if v != 0}
        b = conv(b)
        if b < 0 or (b == 0 and sense == ">="):
            row = {k: -v for k, v in row.items()}
            b = -b
            sense = {"<=": ">=", ">=": "<=", "=": "="}[sense]
        if sense == "<=":
            row[next_col] = conv(1)
            basis.append(next_col)
            next_col += 1
        elif sense == ">=":
            row[next_col] = conv(-1)
            row[next_col + 1] = conv(1)
            basis.append(next_col + 1)
            artificial.append(next_col + 1)
            next_col += 2
        elif sense == "=":
            row[next_col] = conv(1)
            basis.append(next_col)
            artificial.append(next_col)
            next_col += 1
        else:
            raise ValueError(f"unknown row sense {sense!r}")
        t_rows.append(row)
        rhs.append(b)

    tab = _Tableau(t_rows, basis, rhs, eps, zero)
    art = set(artificial)
    if art:
        tab.price({a: conv(-1) for a in art})
        status = tab.optimize()
        if status != OPTIMAL or tab.z < -eps * max(1, len(art)):
            return SimplexResult(INFEASIBLE, None, [], tab.iterations)
        # drive zero-level artificials out of the basis; drop redundant rows
        r = 0
        while r < len(tab.rows):
            if tab.basis[r] in art:
                cand = [c for c, v in tab.rows[r].items() if c not in art and not tab._is_zero(v)]
                if cand:
                    tab.pivot(r, min(cand))
                else:
                    del tab.rows[r], tab.rhs[r], tab.basis[r]
                    continue
            r += 1
        for row in tab.rows:
            for a in art & row.keys():
                del row[a]

    tab.price({int(k): conv(v) for k, v in objective.items() if v != 0})
    status = tab.optimize()
    if status == UNBOUNDED:
        return SimplexResult(UNBOUNDED, None, [], tab.iterations)
    values = [zero] * n_vars
    for r, col in enumerate(tab.basis):
        if col < n_vars:
            values[col] = tab.rhs[r]
    if exact:
        return SimplexResult(OPTIMAL, from_mpq(tab.z), [from_mpq(v) for v in values], tab.iterations)
    values = [0.0 if abs(v) <= eps else float(v) for v in values]
    return SimplexResult(OPTIMAL, float(tab.z), values, tab.iterations)
