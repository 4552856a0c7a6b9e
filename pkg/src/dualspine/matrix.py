"""Dense matrices over Z[pi] acting on left modules.

Matrices use the column convention: a map ``C -> D`` between based free
modules is a ``rank(D) x rank(C)`` matrix whose column j is the image of
basis element j.  Because the modules are left modules, coefficients sit on
the left of basis vectors and composition multiplies entries in the opposite
order::

    (A @ B)[i][j] = sum_k B[k][j] * A[i][k]      # "A after B"

Over a commutative ring this is ordinary matrix multiplication.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import GroupMismatchError, ShapeError
from .grpring import Elem, GroupSpec


@dataclass(frozen=True, eq=False)
class Matrix:
    group: GroupSpec
    rows: int
    cols: int
    data: tuple  # tuple of row tuples of Elem

    def __post_init__(self):
        if len(self.data) != self.rows or any(len(r) != self.cols for r in self.data):
            raise ShapeError(f"matrix data does not have shape {self.rows}x{self.cols}")

    # -- construction --------------------------------------------------------

    @classmethod
    def zeros(cls, group: GroupSpec, rows: int, cols: int) -> "Matrix":
        z = Elem.zero(group)
        return cls(group, rows, cols, tuple((z,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, group: GroupSpec, n: int) -> "Matrix":
        z, o = Elem.zero(group), Elem.one(group)
        return cls(group, n, n, tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)))

    @classmethod
    def from_rows(cls, group: GroupSpec, rows: Sequence[Sequence], nrows=None, ncols=None) -> "Matrix":
        """Build from nested sequences of ints or Elems.  Shape may be given for empty data."""
        rows = [list(r) for r in rows]
        nr = len(rows) if nrows is None else nrows
        nc = (len(rows[0]) if rows else 0) if ncols is None else ncols
        if nr == 0 or nc == 0:
            return cls.zeros(group, nr, nc)

        def conv(x):
            if isinstance(x, Elem):
                if x.group != group:
                    raise GroupMismatchError(f"{x.group} vs {group}")
                return x
            return Elem.from_int(group, int(x))

        return cls(group, nr, nc, tuple(tuple(conv(x) for x in r) for r in rows))

    @classmethod
    def block(cls, group: GroupSpec, blocks: Sequence[Sequence["Matrix"]]) -> "Matrix":
        """Assemble a block matrix; every block row must share a height, every block column a width."""
        heights = [row[0].rows for row in blocks]
        widths = [b.cols for b in blocks[0]] if blocks else []
        for bi, row in enumerate(blocks):
            if len(row) != len(widths):
                raise ShapeError("ragged block matrix")
            for bj, b in enumerate(row):
                if b.rows != heights[bi] or b.cols != widths[bj]:
                    raise ShapeError(f"block ({bi},{bj}) has shape {b.rows}x{b.cols}")
        data = []
        for bi, row in enumerate(blocks):
            for i in range(heights[bi]):
                r = []
                for b in row:
                    r.extend(b.data[i])
                data.append(tuple(r))
        return cls(group, sum(heights), sum(widths), tuple(data))

    @classmethod
    def from_lists(cls, group: GroupSpec, data: list, rows: int, cols: int) -> "Matrix":
        return cls(group, rows, cols, tuple(tuple(r) for r in data))

    # -- access --------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def to_lists(self) -> list[list[Elem]]:
        return [list(r) for r in self.data]

    def to_ints(self) -> list[list[int]]:
        return [[e.to_int() for e in r] for r in self.data]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix(self.group, len(rows), len(cols),
                      tuple(tuple(self.data[i][j] for j in cols) for i in rows))

    # -- algebra -------------------------------------------------------------

    def _check(self, other: "Matrix"):
        if not isinstance(other, Matrix):
            raise TypeError("expected Matrix")
        if other.group != self.group:
            raise GroupMismatchError(f"{self.group} vs {other.group}")

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.cols != other.rows:
            raise ShapeError(f"cannot compose {self.rows}x{self.cols} after {other.rows}x{other.cols}")
        z = Elem.zero(self.group)
        out = []
        for i in range(self.rows):
            arow = self.data[i]
            r = []
            for j in range(other.cols):
                acc = z
                for k in range(self.cols):
                    a = arow[k]
                    if a:
                        b = other.data[k][j]
                        if b:
                            acc = acc + b * a
                r.append(acc)
            out.append(tuple(r))
        return Matrix(self.group, self.rows, other.cols, tuple(out))

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.shape != other.shape:
            raise ShapeError(f"shape mismatch {self.shape} vs {other.shape}")
        return Matrix(self.group, self.rows, self.cols,
                      tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.data, other.data)))

    def __neg__(self) -> "Matrix":
        return Matrix(self.group, self.rows, self.cols, tuple(tuple(-a for a in r) for r in self.data))

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def scale(self, c) -> "Matrix":
        """Left-multiply every entry by the scalar ``c``."""
        return Matrix(self.group, self.rows, self.cols, tuple(tuple(c * a for a in r) for r in self.data))

    def dual(self) -> "Matrix":
        """Involute-transpose: the matrix of Hom(-, Z[pi]) made into a left module."""
        return Matrix(self.group, self.cols, self.rows,
                      tuple(tuple(self.data[i][j].involute() for i in range(self.rows))
                            for j in range(self.cols)))

    def transpose(self) -> "Matrix":
        return Matrix(self.group, self.cols, self.rows,
                      tuple(tuple(self.data[i][j] for i in range(self.rows)) for j in range(self.cols)))

    def augment(self) -> "Matrix":
        g = GroupSpec.trivial()
        return Matrix(g, self.rows, self.cols,
                      tuple(tuple(Elem.from_int(g, a.augment()) for a in r) for r in self.data))

    def map_group(self, target: GroupSpec, f) -> "Matrix":
        return Matrix(target, self.rows, self.cols,
                      tuple(tuple(a.map_group(target, f) for a in r) for r in self.data))

    # -- predicates ----------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.group == other.group and self.shape == other.shape and self.data == other.data

    def __hash__(self):
        return hash((self.group, self.rows, self.cols, self.data))

    def first_difference(self, other: "Matrix"):
        """First ``(i, j)`` where the matrices differ, or ``None``."""
        if self.shape != other.shape:
            return "shape"
        for i in range(self.rows):
            for j in range(self.cols):
                if self.data[i][j] != other.data[i][j]:
                    return (i, j)
        return None

    def first_nonzero(self):
        for i in range(self.rows):
            for j in range(self.cols):
                if self.data[i][j]:
                    return (i, j)
        return None

    def is_zero(self) -> bool:
        return self.first_nonzero() is None

    def is_identity(self) -> bool:
        return self.rows == self.cols and self == Matrix.identity(self.group, self.rows)

    def __repr__(self):
        body = "; ".join(", ".join(e.format() for e in r) for r in self.data)
        return f"Matrix<{self.group} {self.rows}x{self.cols}>[{body}]"


def int_matrix(rows, nrows=None, ncols=None) -> Matrix:
    return Matrix.from_rows(GroupSpec.trivial(), rows, nrows, ncols)
