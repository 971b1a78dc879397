import random
from fractions import Fraction

from homfill.exactlp import integer_solve, l1_fill, simplex_min


def test_simplex_duality_random():
    rng = random.Random(0)
    for _ in range(80):
        m, n = rng.randint(1, 4), rng.randint(2, 6)
        a = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(m)]
        feas = [rng.randint(0, 3) for _ in range(n)]
        b = [sum(a[i][j] * feas[j] for j in range(n)) for i in range(m)]
        c = [rng.randint(0, 5) for _ in range(n)]
        res = simplex_min(
            [Fraction(v) for v in c],
            [[Fraction(v) for v in row] for row in a],
            [Fraction(v) for v in b],
        )
        assert res.status == "optimal"
        for i in range(m):
            assert sum(a[i][j] * res.x[j] for j in range(n)) == b[i]
        assert all(v >= 0 for v in res.x)
        assert sum(res.y[i] * b[i] for i in range(m)) == res.value
        for j in range(n):
            assert c[j] - sum(res.y[i] * a[i][j] for i in range(m)) >= 0


def test_simplex_infeasible():
    res = simplex_min([Fraction(1)], [[Fraction(0)]], [Fraction(1)])
    assert res.status == "infeasible"


def test_simplex_redundant_row():
    # duplicated constraint; dual still certifies
    res = simplex_min(
        [Fraction(1), Fraction(1)],
        [[Fraction(1), Fraction(1)], [Fraction(1), Fraction(1)]],
        [Fraction(2), Fraction(2)],
    )
    assert res.status == "optimal"
    assert res.value == 2
    assert sum(res.y[i] * 2 for i in range(2)) == 2


def test_integer_solve_random():
    rng = random.Random(1)
    for _ in range(150):
        m, n = rng.randint(1, 5), rng.randint(1, 6)
        rows = [
            {j: rng.randint(-4, 4) for j in range(n) if rng.random() < 0.7} for _ in range(m)
        ]
        x = [rng.randint(-5, 5) for _ in range(n)]
        b = [sum(row.get(j, 0) * x[j] for j in range(n)) for row in rows]
        sol = integer_solve(rows, n, b)
        assert sol is not None
        for i, row in enumerate(rows):
            assert sum(row.get(j, 0) * sol[j] for j in range(n)) == b[i]


def test_integer_solve_divisibility():
    assert integer_solve([{0: 2}], 1, [1]) is None
    assert integer_solve([{0: 2}], 1, [4]) == [2]
    assert integer_solve([{0: 0}], 1, [1]) is None


def test_l1_fill_basic():
    r = l1_fill([{0: 2}], [0], {0: 4})
    assert (r.status, r.coeffs, r.value) == ("optimal", [2], 2)
    r = l1_fill([{0: 1, 1: 1}, {1: -1, 2: 1}], [0, 1, 2], {0: 1, 1: 0, 2: 1})
    assert (r.status, r.value) == ("optimal", 2)
    assert r.coeffs == [1, 1]
    assert l1_fill([{0: 2}], [0], {0: 3}).status == "infeasible"


def test_l1_fill_prefers_smaller_l1():
    # rhs reachable by one cell with coefficient 2 or two cells with 1 each:
    # column 0 covers both edges, columns 1/2 one edge each
    columns = [{0: 1, 1: 1}, {0: 1}, {1: 1}]
    r = l1_fill(columns, [0, 1], {0: 1, 1: 1})
    assert r.status == "optimal"
    assert r.value == 1
    assert r.coeffs == [1, 0, 0]


def test_l1_fill_rational_but_not_integer_feasible():
    # odd triangle: rationally solvable (1/2 each) but no integer solution
    columns = [{0: 1, 1: 1}, {1: 1, 2: 1}, {0: 1, 2: 1}]
    r = l1_fill(columns, [0, 1, 2], {0: 1, 1: 1, 2: 1})
    assert r.status == "infeasible"


def test_l1_fill_branches_on_fractional_vertex():
    # 2 x0 + x1 = 1: LP relaxation sits at x0 = 1/2, integrality forces x1 = 1
    r = l1_fill([{0: 2}, {0: 1}], [0], {0: 1})
    assert r.status == "optimal"
    assert r.value == 1
    assert r.coeffs == [0, 1]
    assert r.lp_bound == Fraction(1, 2)
