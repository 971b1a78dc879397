"""Exact integer/rational linear algebra used by the filling solver.

Three pieces, all over exact arithmetic (python ints / Fraction):

* ``integer_solve`` -- particular integer solution of A x = b via column
  Hermite reduction, or None when no integer solution exists.
* ``simplex_min`` -- two-phase primal simplex with Bland's rule, returning
  primal and dual solutions.
* ``l1_fill`` -- branch and bound for min sum |a_c| subject to B a = rhs over
  the integers, with the standard split a = p - q into nonnegative parts.

Floating point never enters: fractional LP vertices do occur here (boundary
matrices are not totally unimodular in general) and the branch-and-bound
certificates must stay exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InvariantError

ZERO = Fraction(0)
ONE = Fraction(1)


def integer_solve(rows: list[dict[int, int]], num_cols: int, b: list[int]):
    """Particular integer solution of the sparse system rows . x = b, or None.

    Columns are reduced to a Hermite-style triangular form by Euclidean
    column operations, tracked in V so a solution of the reduced system can
    be pulled back.
    """
    m = len(rows)
    cols = [[0] * m for _ in range(num_cols)]
    for i, row in enumerate(rows):
        for j, v in row.items():
            cols[j][i] = v
    vmat = [[1 if k == j else 0 for k in range(num_cols)] for j in range(num_cols)]

    pivots: list[tuple[int, int]] = []  # (row, column) in elimination order
    pivot_count = 0
    for r in range(m):
        active = [j for j in range(pivot_count, num_cols) if cols[j][r]]
        if not active:
            continue
        while len(active) > 1:
            active.sort(key=lambda j: (abs(cols[j][r]), j))
            base = active[0]
            for j in active[1:]:
                q = cols[j][r] // cols[base][r]
                if q:
                    for i in range(m):
                        cols[j][i] -= q * cols[base][i]
                    for k in range(num_cols):
                        vmat[j][k] -= q * vmat[base][k]
            active = [j for j in active if cols[j][r]]
        j = active[0]
        if cols[j][r] < 0:
            cols[j] = [-v for v in cols[j]]
            vmat[j] = [-v for v in vmat[j]]
        cols[pivot_count], cols[j] = cols[j], cols[pivot_count]
        vmat[pivot_count], vmat[j] = vmat[j], vmat[pivot_count]
        pivots.append((r, pivot_count))
        pivot_count += 1

    residual = list(b)
    y = [0] * num_cols
    for r, c in pivots:
        d = cols[c][r]
        if residual[r] % d:
            return None
        y[c] = residual[r] // d
        if y[c]:
            for i in range(m):
                residual[i] -= y[c] * cols[c][i]
    if any(residual):
        return None
    x = [0] * num_cols
    for c in range(num_cols):
        if y[c]:
            for k in range(num_cols):
                x[k] += y[c] * vmat[c][k]
    return x


@dataclass
class LPResult:
    status: str  # optimal | infeasible | unbounded | maxiter
    x: list[Fraction] | None = None
    y: list[Fraction] | None = None
    value: Fraction | None = None


def simplex_min(
    costs: list[Fraction],
    rows: list[list[Fraction]],
    rhs: list[Fraction],
    maxiter: int = 200_000,
) -> LPResult:
    """min costs . x subject to rows . x = rhs, x >= 0 (exact two-phase).

    Returns primal x and a dual vector y indexed by the original rows with
    y . rhs == value and costs - y . rows >= 0 at optimality (redundant rows
    get dual 0).
    """
    m = len(rows)
    n = len(costs)
    row_sign = [1] * m
    tab = []
    for i in range(m):
        row = [Fraction(v) for v in rows[i]]
        b = Fraction(rhs[i])
        if b < 0:
            row = [-v for v in row]
            b = -b
            row_sign[i] = -1
        tab.append(row + [ONE if k == i else ZERO for k in range(m)] + [b])
    width = n + m + 1
    basis = [n + i for i in range(m)]
    live = list(range(m))
    original_row = list(range(m))

    def pivot(rlocal: int, col: int):
        piv = tab[rlocal][col]
        inv = ONE / piv
        tab[rlocal] = [v * inv for v in tab[rlocal]]
        prow = tab[rlocal]
        for i in live:
            if i != rlocal and tab[i][col]:
                f = tab[i][col]
                tab[i] = [v - f * pv for v, pv in zip(tab[i], prow)]
        if obj[col]:
            f = obj[col]
            for k in range(width):
                obj[k] -= f * prow[k]
        basis[rlocal] = col

    def run(allowed_cols, iterations):
        it = 0
        while True:
            entering = -1
            for j in allowed_cols:
                if obj[j] < 0:
                    entering = j
                    break
            if entering < 0:
                return "optimal", it
            leaving = -1
            best = None
            for i in live:
                a = tab[i][entering]
                if a > 0:
                    ratio = tab[i][-1] / a
                    if best is None or ratio < best or (ratio == best and basis[i] < basis[leaving]):
                        best = ratio
                        leaving = i
            if leaving < 0:
                return "unbounded", it
            pivot(leaving, entering)
            it += 1
            if it > iterations:
                return "maxiter", it

    # phase 1: minimize the artificial sum
    obj = [ZERO] * width
    for i in live:
        for k in range(width):
            obj[k] -= tab[i][k]
    for k in range(n, n + m):
        obj[k] = ZERO
    status, _ = run(range(n), maxiter)
    if status != "optimal":
        return LPResult(status)
    if -obj[-1] > 0:
        return LPResult("infeasible")
    # drive leftover artificial basics out, dropping redundant rows
    for i in list(live):
        if basis[i] >= n:
            col = next((j for j in range(n) if tab[i][j]), None)
            if col is None:
                live.remove(i)
            else:
                pivot(i, col)

    # phase 2
    obj = [Fraction(c) for c in costs] + [ZERO] * m + [ZERO]
    for i in live:
        c = costs[basis[i]] if basis[i] < n else ZERO
        if c:
            for k in range(width):
                obj[k] -= c * tab[i][k]
    status, _ = run(range(n), maxiter)
    if status != "optimal":
        return LPResult(status)

    x = [ZERO] * n
    for i in live:
        if basis[i] < n:
            x[basis[i]] = tab[i][-1]
    value = sum((Fraction(costs[j]) * x[j] for j in range(n)), ZERO)
    # reduced cost of the artificial column of row i is -y_i (flipped system)
    y = [-obj[n + i] * row_sign[i] for i in range(m)]
    return LPResult("optimal", x, y, value)


@dataclass
class FillSolve:
    status: str  # optimal | infeasible | budget
    coeffs: list[int] | None
    value: int | None
    lp_bound: Fraction | None
    root_dual: dict[int, Fraction] | None
    nodes: int


def l1_fill(
    columns: list[dict[int, int]],
    edge_ids: list[int],
    rhs: dict[int, int],
    node_budget: int = 20_000,
) -> FillSolve:
    """min sum |a_c| with sum_c a_c * columns[c] = rhs, over integers.

    ``columns[c]`` maps edge id to the net boundary coefficient of cell c;
    ``edge_ids`` fixes the equation rows.  Branch and bound over the exact
    LP relaxation with the split a = p - q; branching on the most fractional
    variable, ties broken by lowest cell index.
    """
    ncells = len(columns)
    edge_pos = {e: i for i, e in enumerate(edge_ids)}
    b = [rhs.get(e, 0) for e in edge_ids]
    int_rows = [dict() for _ in edge_ids]
    for c, col in enumerate(columns):
        for e, v in col.items():
            int_rows[edge_pos[e]][c] = v

    x0 = integer_solve(int_rows, ncells, b)
    if x0 is None:
        return FillSolve("infeasible", None, None, None, None, 0)
    incumbent = list(x0)
    incumbent_value = sum(abs(v) for v in x0)
    if incumbent_value == 0:
        return FillSolve("optimal", incumbent, 0, ZERO, {}, 0)

    def solve_lp(bounds):
        # variables: p_0..p_{n-1}, q_0..q_{n-1}, then one slack per bound row
        nslack = len(bounds)
        nvars = 2 * ncells + nslack
        costs = [ONE] * (2 * ncells) + [ZERO] * nslack
        rows = []
        rvec = []
        for i, row in enumerate(int_rows):
            dense = [ZERO] * nvars
            for c, v in row.items():
                dense[c] = Fraction(v)
                dense[ncells + c] = Fraction(-v)
            rows.append(dense)
            rvec.append(Fraction(b[i]))
        for k, (c, sense, bound) in enumerate(bounds):
            dense = [ZERO] * nvars
            dense[c] = ONE
            dense[ncells + c] = -ONE
            dense[2 * ncells + k] = ONE if sense == "le" else -ONE
            rows.append(dense)
            rvec.append(Fraction(bound))
        return simplex_min(costs, rows, rvec)

    root = solve_lp([])
    if root.status == "infeasible":
        # rationally infeasible cannot happen here (an integer solution exists)
        raise InvariantError("LP infeasible despite integer solution")
    if root.status != "optimal":
        return FillSolve("budget", incumbent, incumbent_value, None, None, 0)
    root_dual = {e: root.y[i] for i, e in enumerate(edge_ids)}
    lp_bound = root.value

    nodes = 0
    stack = [([], root)]
    exhausted = True
    while stack:
        bounds, lp = stack.pop()
        if lp is None:
            nodes += 1
            if nodes > node_budget:
                exhausted = False
                break
            lp = solve_lp(bounds)
            if lp.status == "infeasible":
                continue
            if lp.status != "optimal":
                exhausted = False
                continue
        if math.ceil(lp.value) >= incumbent_value:
            continue
        a = [lp.x[c] - lp.x[ncells + c] for c in range(ncells)]
        frac_var = -1
        frac_score = None
        for c in range(ncells):
            f = a[c] - math.floor(a[c])
            if f:
                score = abs(f - Fraction(1, 2))
                if frac_score is None or score < frac_score:
                    frac_score = score
                    frac_var = c
        if frac_var < 0:
            candidate = [int(v) for v in a]
            value = sum(abs(v) for v in candidate)
            if value < incumbent_value:
                incumbent = candidate
                incumbent_value = value
            continue
        lo = math.floor(a[frac_var])
        first_floor = (a[frac_var] - lo) <= Fraction(1, 2)
        floor_child = (bounds + [(frac_var, "le", lo)], None)
        ceil_child = (bounds + [(frac_var, "ge", lo + 1)], None)
        if first_floor:
            stack.append(ceil_child)
            stack.append(floor_child)
        else:
            stack.append(floor_child)
            stack.append(ceil_child)

    status = "optimal" if exhausted else "budget"
    return FillSolve(status, incumbent, incumbent_value, lp_bound, root_dual, nodes)
