"""Based chain complexes over Z[pi], chain maps, homotopies, cones and duals.

Sign conventions, fixed once:

* ``mapping_cone(f)`` has ``cone_k = source_{k-1} (+) target_k`` and
  ``d(a, b) = (-d a, d b - f a)``.
* ``dualize(C, n)`` has ``dual_k = C_{n-k}`` with boundary the
  involute-transpose of ``d_{n-k+1}``; no extra signs, so dualizing twice
  returns the original complex exactly.
* A homotopy ``h`` from ``f`` to ``g`` satisfies ``d h + h d = g - f``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import ShapeError, VerificationError
from .grpring import GroupSpec
from .matrix import Matrix


@dataclass(frozen=True)
class BasedComplex:
    group: GroupSpec
    ranks: tuple
    boundaries: tuple  # boundaries[k-1] is d_k : C_k -> C_{k-1}

    def __post_init__(self):
        object.__setattr__(self, "ranks", tuple(int(r) for r in self.ranks))
        object.__setattr__(self, "boundaries", tuple(self.boundaries))
        if any(r < 0 for r in self.ranks):
            raise ShapeError("negative rank")
        if len(self.boundaries) != max(len(self.ranks) - 1, 0):
            raise ShapeError(f"expected {max(len(self.ranks) - 1, 0)} boundary matrices, "
                             f"got {len(self.boundaries)}")
        for k, d in enumerate(self.boundaries, start=1):
            if d.group != self.group:
                raise ShapeError(f"boundary d{k} is over {d.group}, complex over {self.group}")
            if d.shape != (self.ranks[k - 1], self.ranks[k]):
                raise ShapeError(f"d{k} has shape {d.shape}, expected "
                                 f"{(self.ranks[k - 1], self.ranks[k])}", )

    @classmethod
    def from_ints(cls, ranks: Sequence[int], boundaries: Sequence[Sequence[Sequence[int]]] = ()) -> "BasedComplex":
        """Integer complex; ``boundaries[k-1]`` is given as rows of d_k (may be empty)."""
        g = GroupSpec.trivial()
        ranks = tuple(ranks)
        mats = []
        for k in range(1, len(ranks)):
            rows = boundaries[k - 1] if k - 1 < len(boundaries) else []
            mats.append(Matrix.from_rows(g, rows, ranks[k - 1], ranks[k]) if rows
                        else Matrix.zeros(g, ranks[k - 1], ranks[k]))
        return cls(g, ranks, tuple(mats))

    @classmethod
    def zero(cls, group: GroupSpec) -> "BasedComplex":
        return cls(group, (), ())

    @property
    def top(self) -> int:
        """Largest degree carried in ``ranks`` (may have rank zero)."""
        return len(self.ranks) - 1

    @property
    def dim(self) -> int:
        """Largest degree with nonzero rank, or -1 for the zero complex."""
        for k in range(len(self.ranks) - 1, -1, -1):
            if self.ranks[k]:
                return k
        return -1

    def rank(self, k: int) -> int:
        return self.ranks[k] if 0 <= k < len(self.ranks) else 0

    def d(self, k: int) -> Matrix:
        if 1 <= k < len(self.ranks):
            return self.boundaries[k - 1]
        return Matrix.zeros(self.group, self.rank(k - 1), self.rank(k))

    def padded(self, top: int) -> "BasedComplex":
        """Same complex with ``ranks`` extended by zeros up to degree ``top``."""
        if top <= self.top:
            return self
        ranks = tuple(self.rank(k) for k in range(top + 1))
        return BasedComplex(self.group, ranks, tuple(_d(self, self.group, ranks, k) for k in range(1, top + 1)))

    def trimmed(self) -> "BasedComplex":
        n = self.dim
        ranks = self.ranks[: n + 1]
        return BasedComplex(self.group, ranks, self.boundaries[: max(n, 0)])

    def augment(self) -> "BasedComplex":
        """Tensor down to Z along the augmentation Z[pi] -> Z."""
        return BasedComplex(GroupSpec.trivial(), self.ranks, tuple(d.augment() for d in self.boundaries))

    def same_as(self, other: "BasedComplex") -> bool:
        """Equality up to trailing zero-rank degrees."""
        n = max(self.top, other.top)
        return self.group == other.group and self.padded(n) == other.padded(n)

    def validate(self) -> None:
        """Raise ``VerificationError`` at the first degree where d d != 0."""
        for k in range(2, len(self.ranks)):
            prod = self.d(k - 1) @ self.d(k)
            bad = prod.first_nonzero()
            if bad is not None:
                raise VerificationError(f"d{k - 1} d{k} != 0", degree=k, entry=bad)

    def is_valid(self) -> bool:
        try:
            self.validate()
        except VerificationError:
            return False
        return True

    def __repr__(self):
        return f"BasedComplex<{self.group}, ranks={list(self.ranks)}>"


def _d(C: BasedComplex, group, ranks, k):
    if 1 <= k <= C.top:
        return C.boundaries[k - 1]
    return Matrix.zeros(group, ranks[k - 1], ranks[k])


def _top(*cs: BasedComplex) -> int:
    return max(c.top for c in cs)


@dataclass(frozen=True)
class ChainMap:
    source: BasedComplex
    target: BasedComplex
    components: tuple  # components[k] : source_k -> target_k

    def __post_init__(self):
        n = max(self.source.top, self.target.top) + 1
        comps = list(self.components)
        g = self.source.group
        if self.target.group != g:
            raise ShapeError("chain map between complexes over different groups")
        if len(comps) > n and any(not c.is_zero() for c in comps[n:]):
            raise ShapeError("chain map has components beyond both complexes")
        comps = comps[:n]
        while len(comps) < n:
            k = len(comps)
            comps.append(Matrix.zeros(g, self.target.rank(k), self.source.rank(k)))
        for k, c in enumerate(comps):
            if c.shape != (self.target.rank(k), self.source.rank(k)):
                raise ShapeError(f"component {k} has shape {c.shape}, expected "
                                 f"{(self.target.rank(k), self.source.rank(k))}")
        object.__setattr__(self, "components", tuple(comps))

    @classmethod
    def identity(cls, C: BasedComplex) -> "ChainMap":
        return cls(C, C, tuple(Matrix.identity(C.group, r) for r in C.ranks))

    @classmethod
    def zero(cls, A: BasedComplex, B: BasedComplex) -> "ChainMap":
        return cls(A, B, ())

    def __getitem__(self, k: int) -> Matrix:
        if 0 <= k < len(self.components):
            return self.components[k]
        return Matrix.zeros(self.source.group, self.target.rank(k), self.source.rank(k))

    def verify(self) -> None:
        S, T = self.source, self.target
        for k in range(1, max(S.top, T.top) + 2):
            lhs = T.d(k) @ self[k]
            rhs = self[k - 1] @ S.d(k)
            bad = lhs.first_difference(rhs)
            if bad is not None:
                raise VerificationError("chain map identity d f = f d fails", degree=k, entry=bad)

    def is_valid(self) -> bool:
        try:
            self.verify()
        except VerificationError:
            return False
        return True

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        """``self @ other`` is self after other."""
        if not other.target.same_as(self.source):
            raise ShapeError("chain maps are not composable")
        n = max(other.source.top, self.target.top) + 1
        return ChainMap(other.source, self.target, tuple(self[k] @ other[k] for k in range(n)))

    def __add__(self, other: "ChainMap") -> "ChainMap":
        n = len(self.components)
        return ChainMap(self.source, self.target, tuple(self[k] + other[k] for k in range(n)))

    def __neg__(self) -> "ChainMap":
        return ChainMap(self.source, self.target, tuple(-c for c in self.components))

    def __sub__(self, other: "ChainMap") -> "ChainMap":
        return self + (-other)

    def augment(self) -> "ChainMap":
        return ChainMap(self.source.augment(), self.target.augment(), tuple(c.augment() for c in self.components))

    def same_as(self, other: "ChainMap") -> bool:
        n = max(len(self.components), len(other.components))
        return (self.source.same_as(other.source) and self.target.same_as(other.target)
                and all(self[k] == other[k] for k in range(n)))


@dataclass(frozen=True)
class ChainHomotopy:
    f: ChainMap
    g: ChainMap
    components: tuple  # components[k] : source_k -> target_{k+1}

    def __post_init__(self):
        S, T = self.f.source, self.f.target
        if not (self.g.source.same_as(S) and self.g.target.same_as(T)):
            raise ShapeError("homotopy between maps with different source/target")
        n = max(S.top, T.top) + 1
        comps = list(self.components)[:n]
        while len(comps) < n:
            k = len(comps)
            comps.append(Matrix.zeros(S.group, T.rank(k + 1), S.rank(k)))
        for k, c in enumerate(comps):
            if c.shape != (T.rank(k + 1), S.rank(k)):
                raise ShapeError(f"homotopy component {k} has shape {c.shape}, expected "
                                 f"{(T.rank(k + 1), S.rank(k))}")
        object.__setattr__(self, "components", tuple(comps))

    @classmethod
    def zero(cls, f: ChainMap, g: ChainMap | None = None) -> "ChainHomotopy":
        return cls(f, f if g is None else g, ())

    def __getitem__(self, k: int) -> Matrix:
        if 0 <= k < len(self.components):
            return self.components[k]
        S, T = self.f.source, self.f.target
        return Matrix.zeros(S.group, T.rank(k + 1), S.rank(k))

    @property
    def source(self):
        return self.f.source

    @property
    def target(self):
        return self.f.target

    def verify(self) -> None:
        """Check ``d h + h d = g - f`` in every degree."""
        self.f.verify()
        self.g.verify()
        S, T = self.source, self.target
        for k in range(0, max(S.top, T.top) + 1):
            lhs = T.d(k + 1) @ self[k] + self[k - 1] @ S.d(k)
            rhs = self.g[k] - self.f[k]
            bad = lhs.first_difference(rhs)
            if bad is not None:
                raise VerificationError("homotopy identity d h + h d = g - f fails", degree=k, entry=bad)

    def is_valid(self) -> bool:
        try:
            self.verify()
        except VerificationError:
            return False
        return True

    def pre(self, a: ChainMap) -> "ChainHomotopy":
        """Homotopy ``h a`` from ``f a`` to ``g a``."""
        n = max(a.source.top, self.target.top) + 1
        return ChainHomotopy(self.f @ a, self.g @ a, tuple(self[k] @ a[k] for k in range(n)))

    def post(self, b: ChainMap) -> "ChainHomotopy":
        """Homotopy ``b h`` from ``b f`` to ``b g``."""
        n = max(self.source.top, b.target.top) + 1
        return ChainHomotopy(b @ self.f, b @ self.g, tuple(b[k + 1] @ self[k] for k in range(n)))

    def then(self, other: "ChainHomotopy") -> "ChainHomotopy":
        """Concatenate a homotopy f ~ g with g ~ h into f ~ h."""
        n = max(len(self.components), len(other.components))
        return ChainHomotopy(self.f, other.g, tuple(self[k] + other[k] for k in range(n)))


@dataclass(frozen=True)
class Equivalence:
    """A chain homotopy equivalence with both homotopies.

    ``left`` runs from the identity of the source to ``backward @ forward``;
    ``right`` runs from the identity of the target to ``forward @ backward``.
    """

    forward: ChainMap
    backward: ChainMap
    left: ChainHomotopy
    right: ChainHomotopy

    @property
    def source(self):
        return self.forward.source

    @property
    def target(self):
        return self.forward.target

    @classmethod
    def identity(cls, C: BasedComplex) -> "Equivalence":
        i = ChainMap.identity(C)
        return cls(i, i, ChainHomotopy.zero(i), ChainHomotopy.zero(i))

    @classmethod
    def from_isomorphism(cls, f: ChainMap, g: ChainMap) -> "Equivalence":
        return cls(f, g, ChainHomotopy.zero(ChainMap.identity(f.source), g @ f),
                   ChainHomotopy.zero(ChainMap.identity(f.target), f @ g))

    def verify(self) -> None:
        self.forward.verify()
        self.backward.verify()
        for h, name in ((self.left, "left"), (self.right, "right")):
            if not h.f.same_as(ChainMap.identity(h.source)):
                raise VerificationError(f"{name} homotopy does not start at the identity")
        if not self.left.g.same_as(self.backward @ self.forward):
            raise VerificationError("left homotopy does not end at backward after forward")
        if not self.right.g.same_as(self.forward @ self.backward):
            raise VerificationError("right homotopy does not end at forward after backward")
        self.left.verify()
        self.right.verify()

    def inverse(self) -> "Equivalence":
        return Equivalence(self.backward, self.forward, self.right, self.left)

    def then(self, other: "Equivalence") -> "Equivalence":
        """``other`` after ``self``."""
        F1, G1, F2, G2 = self.forward, self.backward, other.forward, other.backward
        F, G = F2 @ F1, G1 @ G2
        # G F - 1 = G1 (G2 F2 - 1) F1 + (G1 F1 - 1)
        inner = other.left.post(G1).pre(F1)
        left = ChainHomotopy(ChainMap.identity(F1.source), G @ F,
                             tuple(inner[k] + self.left[k] for k in range(F1.source.top + 1)))
        # F G - 1 = F2 (F1 G1 - 1) G2 + (F2 G2 - 1)
        inner = self.right.post(F2).pre(G2)
        right = ChainHomotopy(ChainMap.identity(F2.target), F @ G,
                              tuple(inner[k] + other.right[k] for k in range(F2.target.top + 1)))
        return Equivalence(F, G, left, right)


# -- constructions -------------------------------------------------------------


def direct_sum(C: BasedComplex, D: BasedComplex) -> BasedComplex:
    if C.group != D.group:
        raise ShapeError("direct sum over different groups")
    n = _top(C, D)
    g = C.group
    ranks = tuple(C.rank(k) + D.rank(k) for k in range(n + 1))
    mats = []
    for k in range(1, n + 1):
        mats.append(Matrix.block(g, [[C.d(k), Matrix.zeros(g, C.rank(k - 1), D.rank(k))],
                                     [Matrix.zeros(g, D.rank(k - 1), C.rank(k)), D.d(k)]]))
    return BasedComplex(g, ranks, tuple(mats))


def mapping_cone(f: ChainMap) -> BasedComplex:
    """Cone with ``d(a, b) = (-d a, d b - f a)`` on ``source_{k-1} (+) target_k``."""
    f.verify()
    S, T = f.source, f.target
    g = S.group
    n = max(S.top + 1, T.top)
    ranks = tuple(S.rank(k - 1) + T.rank(k) for k in range(n + 1))
    mats = []
    for k in range(1, n + 1):
        mats.append(Matrix.block(g, [
            [-S.d(k - 1), Matrix.zeros(g, S.rank(k - 2), T.rank(k))],
            [-f[k - 1], T.d(k)],
        ]))
    return BasedComplex(g, ranks, tuple(mats))


def cone_inclusion(f: ChainMap, cone: BasedComplex | None = None) -> ChainMap:
    """The canonical map ``target -> cone(f)``, ``b -> (0, b)``."""
    cone = mapping_cone(f) if cone is None else cone
    S, T = f.source, f.target
    g = S.group
    comps = [Matrix.block(g, [[Matrix.zeros(g, S.rank(k - 1), T.rank(k))], [Matrix.identity(g, T.rank(k))]])
             for k in range(cone.top + 1)]
    return ChainMap(T, cone, tuple(comps))


def dualize(C: BasedComplex, n: int) -> BasedComplex:
    """The complex ``k -> Hom(C_{n-k}, Z[pi])`` with involute-transposed boundaries."""
    if C.dim > n:
        raise ShapeError(f"complex has nonzero degree {C.dim} > {n}")
    ranks = tuple(C.rank(n - k) for k in range(n + 1))
    mats = tuple(C.d(n - k + 1).dual() for k in range(1, n + 1))
    return BasedComplex(C.group, ranks, mats)


def dualize_map(f: ChainMap, n: int) -> ChainMap:
    """``f : A -> B`` gives ``f* : dual(B) -> dual(A)``."""
    A, B = f.source, f.target
    return ChainMap(dualize(B, n), dualize(A, n), tuple(f[n - k].dual() for k in range(n + 1)))


def lift_from_nullhomotopy(f: ChainMap, j: ChainMap, h: ChainHomotopy):
    """Lift ``f : A -> B`` through ``j : F -> B`` using a nullhomotopy into ``cone(j)``.

    ``h`` must be a homotopy from ``iota f`` to zero, where ``iota`` is the
    canonical map ``B -> cone(j)``.  Returns ``(lift, k)`` with ``lift : A -> F``
    a chain map and ``k`` a homotopy from ``f`` to ``j @ lift``.
    """
    cone = mapping_cone(j)
    iota = cone_inclusion(j, cone)
    comp = iota @ f
    if not h.f.same_as(comp):
        raise VerificationError("nullhomotopy does not start at the composite into the cone")
    if not h.g.same_as(ChainMap.zero(f.source, cone)):
        raise VerificationError("nullhomotopy does not end at zero")
    h.verify()
    A, F = f.source, j.source
    n = max(A.top, F.top, f.target.top) + 1
    lift_c, k_c = [], []
    for k in range(n):
        hk = h[k]
        fk = F.rank(k)
        lift_c.append(hk.submatrix(range(fk), range(hk.cols)) if hk.rows else
                      Matrix.zeros(A.group, fk, A.rank(k)))
        k_c.append(hk.submatrix(range(fk, hk.rows), range(hk.cols)))
    lift = ChainMap(A, F, tuple(lift_c))
    lift.verify()
    K = ChainHomotopy(f, j @ lift, tuple(k_c))
    K.verify()
    return lift, K


def canonical_nullhomotopy(f: ChainMap, j: ChainMap, lift: ChainMap, k: ChainHomotopy | None = None) -> ChainHomotopy:
    """Inverse of :func:`lift_from_nullhomotopy`: assemble ``h`` from a lift and ``f ~ j lift``."""
    cone = mapping_cone(j)
    iota = cone_inclusion(j, cone)
    A = f.source
    g = A.group
    if k is None:
        k = ChainHomotopy.zero(f, j @ lift)
    comps = []
    for d in range(cone.top):
        comps.append(Matrix.block(g, [[lift[d]], [k[d]]]))
    return ChainHomotopy(iota @ f, ChainMap.zero(A, cone), tuple(comps))
