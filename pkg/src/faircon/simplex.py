"""Dense two-phase simplex over exact rationals.

Bland's rule guards against cycling; with Fraction arithmetic the optimum
is exact, which the hardness-instance regressions rely on.  Problem sizes
here are tiny (tens of variables), so a dense tableau is the right tool.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .numeric import ZERO, ONE

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


def maximize(
    n_vars: int,
    objective: dict[int, Fraction],
    rows: Sequence[tuple[dict[int, Fraction], str, Fraction]],
) -> tuple[str, list[Fraction] | None, Fraction | None]:
    """Maximize objective . x subject to rows and x >= 0.

    Each row is (coeffs, sense, rhs) with sense '<=' or '>='.  Returns
    (status, x, value); x and value are None unless status is 'optimal'.
    """
    # Normalize to a.x <= b.
    norm: list[tuple[dict[int, Fraction], Fraction]] = []
    for coeffs, sense, rhs in rows:
        if sense == "<=":
            norm.append((dict(coeffs), rhs))
        elif sense == ">=":
            norm.append(({k: -v for k, v in coeffs.items()}, -rhs))
        else:
            raise ValueError(f"unknown sense {sense!r}")

    n_rows = len(norm)
    n_slack = n_rows
    art_cols: list[int] = []
    width = n_vars + n_slack  # artificials appended later
    tableau: list[list[Fraction]] = []
    basis: list[int] = []
    rhs_col: list[Fraction] = []

    for i, (coeffs, b) in enumerate(norm):
        row = [ZERO] * width
        for k, v in coeffs.items():
            row[k] = v
        row[n_vars + i] = ONE
        if b < 0:
            row = [-v for v in row]
            b = -b
            art_cols.append(i)
            basis.append(-1)  # placeholder, artificial assigned below
        else:
            basis.append(n_vars + i)
        tableau.append(row)
        rhs_col.append(b)

    n_art = len(art_cols)
    if n_art:
        for row in tableau:
            row.extend([ZERO] * n_art)
        for a_idx, i in enumerate(art_cols):
            col = width + a_idx
            tableau[i][col] = ONE
            basis[i] = col
        width += n_art

    def pivot(prow: int, pcol: int) -> None:
        row = tableau[prow]
        piv = row[pcol]
        if piv != 1:
            inv = 1 / piv
            tableau[prow] = row = [v * inv for v in row]
            rhs_col[prow] *= inv
        nz = [k for k, v in enumerate(row) if v]
        b_p = rhs_col[prow]
        for r in range(n_rows):
            if r == prow:
                continue
            f = tableau[r][pcol]
            if f:
                trow = tableau[r]
                for k in nz:
                    trow[k] -= f * row[k]
                rhs_col[r] -= f * b_p
        f = zrow[pcol]
        if f:
            for k in nz:
                zrow[k] -= f * row[k]
            zvals[0] -= f * b_p
        basis[prow] = pcol

    def run() -> str:
        while True:
            # Bland: entering is the lowest-index improving column.
            pcol = -1
            for k in range(width):
                if zrow[k] > 0:
                    pcol = k
                    break
            if pcol < 0:
                return OPTIMAL
            prow, best_ratio = -1, None
            for r in range(n_rows):
                a = tableau[r][pcol]
                if a > 0:
                    ratio = rhs_col[r] / a
                    if (
                        best_ratio is None
                        or ratio < best_ratio
                        or (ratio == best_ratio and basis[r] < basis[prow])
                    ):
                        prow, best_ratio = r, ratio
            if prow < 0:
                return UNBOUNDED
            pivot(prow, pcol)

    # Phase 1: maximize -(sum of artificials).
    if n_art:
        cost = [ZERO] * width
        for a_idx in range(n_art):
            cost[n_vars + n_slack + a_idx] = -ONE
        zrow = cost[:]
        zvals = [ZERO]
        for r, bv in enumerate(basis):
            f = cost[bv]
            if f:
                for k in range(width):
                    zrow[k] -= f * tableau[r][k]
                zvals[0] -= f * rhs_col[r]
        # zrow currently holds c - c_B B^-1 A with sign flipped into our
        # "reduced cost > 0 improves" convention.
        status = run()
        # zvals[0] is minus the phase-1 objective, i.e. the artificial sum.
        if status != OPTIMAL or zvals[0] > 0:
            return INFEASIBLE, None, None
        # Drive leftover artificials (basic at zero) out of the basis.
        art_start = n_vars + n_slack
        for r in range(n_rows):
            if basis[r] >= art_start:
                pcol = next(
                    (k for k in range(art_start) if tableau[r][k] != 0), None
                )
                if pcol is not None:
                    pivot(r, pcol)
        # Freeze artificials at zero by forbidding re-entry.
        for r in range(n_rows):
            for a_idx in range(n_art):
                tableau[r][art_start + a_idx] = ZERO

    # Phase 2.
    cost = [ZERO] * width
    for k, v in objective.items():
        cost[k] = v
    zrow = cost[:]
    zvals = [ZERO]
    for r, bv in enumerate(basis):
        f = cost[bv]
        if f:
            row = tableau[r]
            for k in range(width):
                zrow[k] -= f * row[k]
            zvals[0] -= f * rhs_col[r]
    if n_art:
        art_start = n_vars + n_slack
        for a_idx in range(n_art):
            zrow[art_start + a_idx] = ZERO
    status = run()
    if status != OPTIMAL:
        return status, None, None

    x = [ZERO] * n_vars
    for r, bv in enumerate(basis):
        if bv < n_vars:
            x[bv] = rhs_col[r]
    value = -zvals[0]
    return OPTIMAL, x, value
