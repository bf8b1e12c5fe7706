"""Small dense linear algebra over exact or float scalars.

Matrices are lists of rows.  Exact entries (``QQi``) are eliminated without
pivot tolerance; float entries use partial pivoting and ``tol``.
"""
from __future__ import annotations

from .scalar import QQi, quadratic_roots, scalar


def _zero(c, tol):
    if isinstance(c, QQi):
        return c.is_zero()
    return abs(c) <= tol


def _inv(c):
    return c.inverse() if isinstance(c, QQi) else 1 / c


def rref(rows, tol: float = 1e-10):
    """Reduced row echelon form; returns ``(matrix, pivot_columns)``."""
    m = [[scalar(c) for c in row] for row in rows]
    if not m:
        return m, []
    nrows, ncols = len(m), len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        best = None
        for i in range(r, nrows):
            if not _zero(m[i][c], tol):
                if best is None or (not isinstance(m[i][c], QQi) and abs(m[i][c]) > abs(m[best][c])):
                    best = i
                if isinstance(m[i][c], QQi):
                    break
        if best is None:
            continue
        m[r], m[best] = m[best], m[r]
        inv = _inv(m[r][c])
        m[r] = [v * inv for v in m[r]]
        for i in range(nrows):
            if i != r and not _zero(m[i][c], 0.0):
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(rows, tol: float = 1e-10) -> int:
    return len(rref(rows, tol)[1])


def nullspace(rows, ncols: int | None = None, tol: float = 1e-10) -> list[list]:
    """Basis of ``{v : rows @ v = 0}``."""
    if not rows:
        n = ncols or 0
        return [[QQi(1) if i == j else QQi(0) for i in range(n)] for j in range(n)]
    m, piv = rref(rows, tol)
    n = len(m[0])
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = [QQi(0)] * n
        v[f] = QQi(1)
        for r, p in enumerate(piv):
            v[p] = -m[r][f]
        basis.append(v)
    return basis


def solve(a, b, tol: float = 1e-10):
    """Solve ``a x = b`` for a square nonsingular system."""
    n = len(a)
    aug = [list(row) + [b[i]] for i, row in enumerate(a)]
    m, piv = rref(aug, tol)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular linear system")
    return [m[i][n] for i in range(n)]


def det2(m):
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def trace(m):
    return sum((m[i][i] for i in range(len(m))), QQi(0))


def eigenvalues_2x2(m):
    """Eigenvalues of a 2x2 matrix, exact when the discriminant is a square."""
    tr = m[0][0] + m[1][1]
    return quadratic_roots(QQi(1), -tr, det2(m))


def matmul(a, b):
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), QQi(0)) for j in range(len(b[0]))]
            for i in range(len(a))]


def inverse(m):
    n = len(m)
    aug = [list(row) + [QQi(1) if i == j else QQi(0) for j in range(n)] for i, row in enumerate(m)]
    r, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in r]


def is_scalar_matrix(m, tol: float = 0.0) -> bool:
    n = len(m)
    for i in range(n):
        for j in range(n):
            if i != j and not _zero(m[i][j], tol):
                return False
    return all(_zero(m[i][i] - m[0][0], tol) for i in range(n))
