"""Simple-equivalence witnesses: logs of invertible based moves and their replay.

A basis change in degree k acts on the columns of ``d_k`` (left scalars) and
on the rows of ``d_{k+1}`` (right scalars).  ``Elementary(k, i, j, c)``
replaces basis element ``e_j`` by ``e_j + c e_i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .chain import BasedComplex, ChainHomotopy, ChainMap, Equivalence
from .errors import GroupMismatchError, MoveError
from .grpring import Elem
from .matrix import Matrix


@dataclass(frozen=True)
class Stabilize:
    degree: int
    lo: int | None = None  # position of the new degree-k element
    hi: int | None = None  # position of the new degree-(k+1) element


@dataclass(frozen=True)
class Destabilize:
    degree: int
    lo: int
    hi: int


@dataclass(frozen=True)
class Elementary:
    degree: int
    i: int
    j: int
    scalar: Elem


@dataclass(frozen=True)
class UnitDiagonal:
    degree: int
    index: int
    scalar: Elem


@dataclass(frozen=True)
class Permute:
    degree: int
    perm: tuple

    def __post_init__(self):
        object.__setattr__(self, "perm", tuple(self.perm))


def invert_move(m):
    if isinstance(m, Stabilize):
        if m.lo is None or m.hi is None:
            raise MoveError("cannot invert an unresolved stabilization")
        return Destabilize(m.degree, m.lo, m.hi)
    if isinstance(m, Destabilize):
        return Stabilize(m.degree, m.lo, m.hi)
    if isinstance(m, Elementary):
        return Elementary(m.degree, m.i, m.j, -m.scalar)
    if isinstance(m, UnitDiagonal):
        u = m.scalar
        return UnitDiagonal(m.degree, m.index, u if isinstance(u, int) else u.unit_inverse())
    if isinstance(m, Permute):
        inv = [0] * len(m.perm)
        for i, p in enumerate(m.perm):
            inv[p] = i
        return Permute(m.degree, tuple(inv))
    raise TypeError(f"not a move: {m!r}")


class _M:
    """Small mutable matrix of Elems with explicit shape."""

    __slots__ = ("rows", "cols", "a", "z")

    def __init__(self, z, rows, cols, data=None):
        self.z = z
        self.rows, self.cols = rows, cols
        self.a = [list(r) for r in data] if data is not None else [[z] * cols for _ in range(rows)]

    @classmethod
    def of(cls, M: Matrix):
        return cls(Elem.zero(M.group), M.rows, M.cols, M.data)

    @classmethod
    def ident(cls, group, n):
        m = cls(Elem.zero(group), n, n)
        o = Elem.one(group)
        for i in range(n):
            m.a[i][i] = o
        return m

    def freeze(self, group) -> Matrix:
        return Matrix(group, self.rows, self.cols, tuple(tuple(r) for r in self.a))

    def row_sub(self, i, j, c):
        """row i -= row j * c"""
        ai, aj = self.a[i], self.a[j]
        for t in range(self.cols):
            if aj[t]:
                ai[t] = ai[t] - aj[t] * c

    def col_add(self, i, j, c):
        """col j += c * col i"""
        for r in self.a:
            if r[i]:
                r[j] = r[j] + c * r[i]

    def row_scale(self, i, u):
        self.a[i] = [x * u if x else x for x in self.a[i]]

    def col_scale(self, j, u):
        for r in self.a:
            if r[j]:
                r[j] = u * r[j]

    def perm_rows(self, perm):
        self.a = [self.a[p] for p in perm]

    def perm_cols(self, perm):
        self.a = [[r[p] for p in perm] for r in self.a]

    def ins_row(self, pos):
        self.a.insert(pos, [self.z] * self.cols)
        self.rows += 1

    def ins_col(self, pos):
        for r in self.a:
            r.insert(pos, self.z)
        self.cols += 1

    def del_row(self, pos):
        del self.a[pos]
        self.rows -= 1

    def del_col(self, pos):
        for r in self.a:
            del r[pos]
        self.cols -= 1


class Replayer:
    """Mutable replay engine.  With ``track=True`` it maintains the equivalence
    from the starting complex to the current one, with both homotopies."""

    def __init__(self, C: BasedComplex, track: bool = True):
        self.group = C.group
        self.z = Elem.zero(C.group)
        self.one = Elem.one(C.group)
        self.start = C
        self.orig = list(C.ranks)
        self.ranks = list(C.ranks)
        self.d = {k: _M.of(C.d(k)) for k in range(1, C.top + 1)}
        self.track = track
        self.log: list = []
        if track:
            g = C.group
            self.F = {k: _M.ident(g, r) for k, r in enumerate(C.ranks)}
            self.G = {k: _M.ident(g, r) for k, r in enumerate(C.ranks)}
            self.HL = {k: _M(self.z, C.rank(k + 1), C.rank(k)) for k in range(C.top + 1)}
            self.HR = {k: _M(self.z, C.rank(k + 1), C.rank(k)) for k in range(C.top + 1)}

    # -- shape bookkeeping ---------------------------------------------------

    @property
    def top(self):
        return len(self.ranks) - 1

    def _grow(self, n):
        while self.top < n:
            k = self.top + 1
            self.ranks.append(0)
            self.orig.append(0)
            self.d[k] = _M(self.z, self.ranks[k - 1], 0)
            if self.track:
                for T in (self.F, self.G, self.HL, self.HR):
                    T[k] = _M(self.z, 0, 0)

    def _rowmats(self, k):
        """Matrices whose rows are indexed by the current degree-k basis."""
        out = []
        if k + 1 in self.d:
            out.append(self.d[k + 1])
        if self.track:
            out.append(self.F[k])
            if k - 1 >= 0:
                out.append(self.HR[k - 1])
        return out

    def _colmats(self, k):
        out = []
        if k in self.d:
            out.append(self.d[k])
        if self.track:
            out.append(self.G[k])
            if k in self.HR:
                out.append(self.HR[k])
        return out

    def _check_index(self, k, *idx):
        if not 0 <= k <= self.top:
            raise MoveError(f"degree {k} out of range")
        for i in idx:
            if not 0 <= i < self.ranks[k]:
                raise MoveError(f"index {i} out of range in degree {k}")

    # -- moves ---------------------------------------------------------------

    def apply(self, m):
        if isinstance(m, Stabilize):
            m = self._stabilize(m)
        elif isinstance(m, Destabilize):
            self._destabilize(m)
        elif isinstance(m, Elementary):
            self._elementary(m)
        elif isinstance(m, UnitDiagonal):
            self._unit(m)
        elif isinstance(m, Permute):
            self._permute(m)
        else:
            raise TypeError(f"not a move: {m!r}")
        self.log.append(m)
        return m

    def apply_all(self, moves: Iterable):
        for m in moves:
            self.apply(m)
        return self

    def _scalar(self, x):
        if isinstance(x, int):
            return Elem.from_int(self.group, x)
        if x.group != self.group:
            raise GroupMismatchError(f"scalar over {x.group}, complex over {self.group}")
        return x

    def _stabilize(self, m: Stabilize) -> Stabilize:
        k = m.degree
        if k < 0:
            raise MoveError("negative degree")
        self._grow(k + 1)
        lo = self.ranks[k] if m.lo is None else m.lo
        hi = self.ranks[k + 1] if m.hi is None else m.hi
        if not (0 <= lo <= self.ranks[k] and 0 <= hi <= self.ranks[k + 1]):
            raise MoveError("stabilization position out of range")
        for M in self._rowmats(k):
            M.ins_row(lo)
        for M in self._colmats(k):
            M.ins_col(lo)
        for M in self._rowmats(k + 1):
            M.ins_row(hi)
        for M in self._colmats(k + 1):
            M.ins_col(hi)
        self.ranks[k] += 1
        self.ranks[k + 1] += 1
        self.d[k + 1].a[lo][hi] = self.one
        if self.track:
            self.HR[k].a[hi][lo] = -self.one
        return Stabilize(k, lo, hi)

    def _destabilize(self, m: Destabilize):
        k, lo, hi = m.degree, m.lo, m.hi
        if k + 1 > self.top:
            raise MoveError(f"no degree {k + 1} to destabilize")
        self._check_index(k, lo)
        self._check_index(k + 1, hi)
        d1 = self.d[k + 1]
        for i in range(d1.rows):
            if d1.a[i][hi] != (self.one if i == lo else self.z):
                raise MoveError(f"d{k + 1} column {hi} is not the basis vector {lo}")
        for j in range(d1.cols):
            if j != hi and d1.a[lo][j]:
                raise MoveError(f"d{k + 1} row {lo} has other entries")
        if k in self.d and any(r[lo] for r in self.d[k].a):
            raise MoveError(f"d{k} column {lo} is not zero")
        if k + 2 in self.d and any(self.d[k + 2].a[hi]):
            raise MoveError(f"d{k + 2} row {hi} is not zero")
        if self.track:
            Fk, Gk1, HL = self.F[k], self.G[k + 1], self.HL[k]
            for r in range(Gk1.rows):
                gb = Gk1.a[r][hi]
                if not gb:
                    continue
                for c in range(Fk.cols):
                    fa = Fk.a[lo][c]
                    if fa:
                        HL.a[r][c] = HL.a[r][c] - fa * gb
        for M in self._rowmats(k):
            M.del_row(lo)
        for M in self._colmats(k):
            M.del_col(lo)
        for M in self._rowmats(k + 1):
            M.del_row(hi)
        for M in self._colmats(k + 1):
            M.del_col(hi)
        self.ranks[k] -= 1
        self.ranks[k + 1] -= 1

    def _elementary(self, m: Elementary):
        k, i, j = m.degree, m.i, m.j
        if i == j:
            raise MoveError("elementary move needs i != j")
        self._check_index(k, i, j)
        c = self._scalar(m.scalar)
        if not c:
            return
        for M in self._rowmats(k):
            M.row_sub(i, j, c)
        for M in self._colmats(k):
            M.col_add(i, j, c)

    def _unit(self, m: UnitDiagonal):
        k, i = m.degree, m.index
        self._check_index(k, i)
        u = self._scalar(m.scalar)
        if not u.is_unit():
            raise MoveError(f"diagonal scalar {u} is not a unit +-g")
        ui = u.unit_inverse()
        for M in self._rowmats(k):
            M.row_scale(i, ui)
        for M in self._colmats(k):
            M.col_scale(i, u)

    def _permute(self, m: Permute):
        k = m.degree
        if not 0 <= k <= self.top:
            raise MoveError(f"degree {k} out of range")
        if sorted(m.perm) != list(range(self.ranks[k])):
            raise MoveError(f"not a permutation of degree {k}")
        for M in self._rowmats(k):
            M.perm_rows(m.perm)
        for M in self._colmats(k):
            M.perm_cols(m.perm)

    # -- results -------------------------------------------------------------

    def complex(self) -> BasedComplex:
        return BasedComplex(self.group, tuple(self.ranks),
                            tuple(self.d[k].freeze(self.group) for k in range(1, self.top + 1)))

    def witness(self) -> "SimpleWitness":
        return SimpleWitness(tuple(self.log))

    def equivalence(self) -> Equivalence:
        if not self.track:
            raise MoveError("replayer was not tracking maps")
        g = self.group
        n = self.top
        src = self.start.padded(n)
        tgt = self.complex()
        F = ChainMap(src, tgt, tuple(self.F[k].freeze(g) for k in range(n + 1)))
        G = ChainMap(tgt, src, tuple(self.G[k].freeze(g) for k in range(n + 1)))
        left = ChainHomotopy(ChainMap.identity(src), G @ F, tuple(self.HL[k].freeze(g) for k in range(n + 1)))
        right = ChainHomotopy(ChainMap.identity(tgt), F @ G, tuple(self.HR[k].freeze(g) for k in range(n + 1)))
        return Equivalence(F, G, left, right)


@dataclass(frozen=True)
class SimpleWitness:
    moves: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "moves", tuple(self.moves))

    def __len__(self):
        return len(self.moves)

    def __iter__(self):
        return iter(self.moves)

    def __add__(self, other: "SimpleWitness") -> "SimpleWitness":
        return SimpleWitness(self.moves + other.moves)

    def inverse(self) -> "SimpleWitness":
        return SimpleWitness(tuple(invert_move(m) for m in reversed(self.moves)))

    def replay(self, C: BasedComplex) -> BasedComplex:
        return Replayer(C, track=False).apply_all(self.moves).complex()

    def replay_equivalence(self, C: BasedComplex) -> Equivalence:
        return Replayer(C, track=True).apply_all(self.moves).equivalence()


def stabilize(C: BasedComplex, k: int):
    r = Replayer(C, track=False)
    r.apply(Stabilize(k))
    return r.complex(), r.witness()


def destabilize(C: BasedComplex, k: int, lo: int, hi: int):
    r = Replayer(C, track=False)
    r.apply(Destabilize(k, lo, hi))
    return r.complex(), r.witness()


def elementary_op(C: BasedComplex, move):
    r = Replayer(C, track=False)
    r.apply(move)
    return r.complex(), r.witness()


def block_row_add(degree: int, rows_a: list, rows_b: list, M) -> list:
    """Moves adding ``M`` times block b to block a in the coordinates of ``degree``.

    After replay the degree's coordinate map is left-multiplied by
    ``[[I, M], [0, I]]`` (blocks a, b).
    """
    out = []
    for p, ia in enumerate(rows_a):
        for q, ib in enumerate(rows_b):
            c = M[p, q]
            if c:
                out.append(Elementary(degree, ia, ib, -c))
    return out
