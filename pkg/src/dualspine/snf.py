"""Smith normal form over the integers, with unimodular transforms.

The reduction is written against a small operations interface so that the
same pivoting loop can drive either a bare matrix (``snf``) or a based chain
complex whose neighbouring boundaries must be updated in step
(see ``dualspine.witness``).
"""

from __future__ import annotations

from dataclasses import dataclass


class IntOps:
    """Row/column operations on a plain integer matrix, mirrored onto U and V."""

    def __init__(self, a, track=True):
        self.a = [list(r) for r in a]
        m = len(self.a)
        n = len(self.a[0]) if m else 0
        self.m, self.n = m, n
        self.U = [[int(i == j) for j in range(m)] for i in range(m)] if track else None
        self.V = [[int(i == j) for j in range(n)] for i in range(n)] if track else None

    def get(self, i, j):
        return self.a[i][j]

    def row_add(self, i, j, c):
        """row i += c * row j"""
        ai, aj = self.a[i], self.a[j]
        for k in range(self.n):
            ai[k] += c * aj[k]
        if self.U is not None:
            ui, uj = self.U[i], self.U[j]
            for k in range(self.m):
                ui[k] += c * uj[k]

    def col_add(self, j, i, c):
        """col j += c * col i"""
        for r in self.a:
            r[j] += c * r[i]
        if self.V is not None:
            for r in self.V:
                r[j] += c * r[i]

    def swap_rows(self, i, j):
        self.a[i], self.a[j] = self.a[j], self.a[i]
        if self.U is not None:
            self.U[i], self.U[j] = self.U[j], self.U[i]

    def swap_cols(self, i, j):
        for r in self.a:
            r[i], r[j] = r[j], r[i]
        if self.V is not None:
            for r in self.V:
                r[i], r[j] = r[j], r[i]

    def neg_row(self, i):
        self.a[i] = [-x for x in self.a[i]]
        if self.U is not None:
            self.U[i] = [-x for x in self.U[i]]


def smith_reduce(ops, nrows: int, ncols: int, row_start: int = 0) -> list[int]:
    """Diagonalise rows ``row_start..`` of the matrix behind ``ops``.

    Pivots land at ``(row_start + t, t)``.  Rows above ``row_start`` are
    never touched and must already be zero in every column.  Returns the
    invariant factors in divisibility order.
    """
    get = ops.get
    divisors = []
    t = 0
    while row_start + t < nrows and t < ncols:
        R = row_start + t
        best = None
        for i in range(R, nrows):
            for j in range(t, ncols):
                v = get(i, j)
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        if i != R:
            ops.swap_rows(R, i)
        if j != t:
            ops.swap_cols(t, j)
        while True:
            p = get(R, t)
            clean = True
            for i in range(R + 1, nrows):
                v = get(i, t)
                if v:
                    ops.row_add(i, R, -(v // p))
                    if get(i, t):
                        clean = False
            for j in range(t + 1, ncols):
                v = get(R, j)
                if v:
                    ops.col_add(j, t, -(v // p))
                    if get(R, j):
                        clean = False
            if not clean:
                best = None
                for i in range(R + 1, nrows):
                    v = get(i, t)
                    if v and (best is None or abs(v) < best[0]):
                        best = (abs(v), i, None)
                for j in range(t + 1, ncols):
                    v = get(R, j)
                    if v and (best is None or abs(v) < best[0]):
                        best = (abs(v), None, j)
                _, i, j = best
                if i is not None:
                    ops.swap_rows(R, i)
                else:
                    ops.swap_cols(t, j)
                continue
            bad = None
            for i in range(R + 1, nrows):
                for j in range(t + 1, ncols):
                    if get(i, j) % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is not None:
                ops.row_add(R, bad, 1)
                continue
            break
        if get(R, t) < 0:
            ops.neg_row(R)
        divisors.append(get(R, t))
        t += 1
    return divisors


@dataclass(frozen=True)
class SNFResult:
    U: list
    V: list
    divisors: list
    shape: tuple

    @property
    def rank(self) -> int:
        return len(self.divisors)

    def diagonal(self) -> list[list[int]]:
        m, n = self.shape
        D = [[0] * n for _ in range(m)]
        for k, d in enumerate(self.divisors):
            D[k][k] = d
        return D


def snf(M) -> SNFResult:
    """Smith normal form ``U M V = diag(d1, ..., dr, 0, ...)`` with ``d1 | d2 | ...``."""
    rows = [list(map(int, r)) for r in M]
    m = len(rows)
    n = len(rows[0]) if m else 0
    ops = IntOps(rows)
    divisors = smith_reduce(ops, m, n)
    return SNFResult(ops.U, ops.V, divisors, (m, n))


def matmul_int(A, B):
    n = len(B[0]) if B else 0
    return [[sum(a * B[k][j] for k, a in enumerate(row)) for j in range(n)] for row in A]


def det_int(M) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(M)
    if n == 0:
        return 1
    a = [list(r) for r in M]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def solve_int(A, B, ncols: int | None = None, bcols: int | None = None):
    """Integer solution X of ``A X = B``, or ``None`` if there is none.

    ``A`` is m x n, ``B`` is m x p.  ``ncols`` and ``bcols`` give n and p when
    the row lists are empty.
    """
    m = len(A)
    n = len(A[0]) if m else (ncols or 0)
    p = len(B[0]) if B else (bcols or 0)
    if m == 0:
        return [[0] * p for _ in range(n)]
    res = snf(A)
    UB = matmul_int(res.U, B)
    Y = [[0] * p for _ in range(n)]
    for i in range(m):
        for j in range(p):
            v = UB[i][j]
            if i < res.rank:
                d = res.divisors[i]
                if v % d:
                    return None
                Y[i][j] = v // d
            elif v:
                return None
    return matmul_int(res.V, Y)


def kernel_basis(A, ncols: int | None = None):
    """Columns spanning ``ker A`` over Z, returned as an n x k matrix."""
    m = len(A)
    n = len(A[0]) if m else (ncols or 0)
    if m == 0:
        return [[int(i == j) for j in range(n)] for i in range(n)]
    res = snf(A)
    return [row[res.rank:] for row in res.V]


def unimodular_row_reduction(M):
    """Row operations taking a unimodular integer matrix to the identity.

    Returns ``(ops, ok)``; each op is ``("add", i, j, c)`` (row i += c row j),
    ``("swap", i, j)`` or ``("neg", i)``.  ``ok`` is False if M is not unimodular.
    """
    a = [list(r) for r in M]
    n = len(a)
    if any(len(r) != n for r in a):
        return [], False
    ops = []
    for t in range(n):
        while True:
            rows = [i for i in range(t, n) if a[i][t]]
            if not rows:
                return ops, False
            p = min(rows, key=lambda i: abs(a[i][t]))
            if len(rows) == 1:
                break
            for i in rows:
                if i != p:
                    q = a[i][t] // a[p][t]
                    if q:
                        a[i] = [x - q * y for x, y in zip(a[i], a[p])]
                        ops.append(("add", i, p, -q))
        if p != t:
            a[p], a[t] = a[t], a[p]
            ops.append(("swap", p, t))
        if a[t][t] == -1:
            a[t] = [-x for x in a[t]]
            ops.append(("neg", t))
        if a[t][t] != 1:
            return ops, False
    for t in range(n - 1, -1, -1):
        for i in range(t):
            c = a[i][t]
            if c:
                a[i] = [x - c * y for x, y in zip(a[i], a[t])]
                ops.append(("add", i, t, -c))
    return ops, True
