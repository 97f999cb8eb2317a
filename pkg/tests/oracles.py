"""Independent reference implementations used as test oracles."""

import itertools

import numpy as np


def gauss_solve(a, b):
    """Naive Gaussian elimination with partial pivoting."""
    a = [list(map(float, row)) + [float(bi)] for row, bi in zip(a, b)]
    n = len(a)
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(a[r][col]))
        a[col], a[piv] = a[piv], a[col]
        for r in range(col + 1, n):
            f = a[r][col] / a[col][col]
            for c in range(col, n + 1):
                a[r][c] -= f * a[col][c]
    x = [0.0] * n
    for r in range(n - 1, -1, -1):
        x[r] = (a[r][n] - sum(a[r][c] * x[c] for c in range(r + 1, n))) / a[r][r]
    return np.array(x)


def ols_oracle(x, y):
    """Least squares through the normal equations."""
    return gauss_solve(x.T @ x, x.T @ y)


def corner_feasible(x, rows):
    """Every corner realization of (a, b) must satisfy a.x <= b."""
    for row in rows:
        for a in itertools.product(*zip(row.a_lo, row.a_hi)):
            for b in (row.b_lo, row.b_hi):
                if np.dot(a, x) - b > 1e-12:
                    return False
    return True
