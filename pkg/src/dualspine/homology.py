"""Integer homology, standard forms and reduction to dimension two."""

from __future__ import annotations

from dataclasses import dataclass

from .chain import BasedComplex, ChainHomotopy, ChainMap, Equivalence, dualize
from .errors import PreconditionError, UnsupportedError
from .grpring import Elem
from .matrix import Matrix
from .snf import IntOps, smith_reduce
from .witness import Destabilize, Elementary, Permute, Replayer, SimpleWitness, UnitDiagonal


@dataclass(frozen=True)
class HomologySummary:
    """Per-degree ``(betti, torsion)``; trailing zero groups are ignored in comparisons."""

    groups: tuple

    def __post_init__(self):
        gs = [(int(b), tuple(int(t) for t in tor)) for b, tor in self.groups]
        for b, tor in gs:
            if b < 0 or any(t < 2 for t in tor):
                raise ValueError("betti numbers must be >= 0 and torsion entries >= 2")
            if any(tor[i + 1] % tor[i] for i in range(len(tor) - 1)):
                raise ValueError(f"torsion {tor} is not a divisibility chain")
        while gs and gs[-1] == (0, ()):
            gs.pop()
        object.__setattr__(self, "groups", tuple(gs))

    @classmethod
    def of(cls, *groups) -> "HomologySummary":
        return cls(tuple(groups))

    def betti(self, k: int) -> int:
        return self.groups[k][0] if 0 <= k < len(self.groups) else 0

    def torsion(self, k: int) -> tuple:
        return self.groups[k][1] if 0 <= k < len(self.groups) else ()

    def group(self, k: int) -> tuple:
        return self.betti(k), self.torsion(k)

    @property
    def top(self) -> int:
        return len(self.groups) - 1

    def is_zero(self, k: int | None = None) -> bool:
        if k is None:
            return not self.groups
        return self.group(k) == (0, ())

    def format(self, upto: int | None = None) -> str:
        n = self.top if upto is None else upto
        return ", ".join(f"H{k}={format_group(*self.group(k))}" for k in range(n + 1))

    def __str__(self):
        return self.format()


def format_group(betti: int, torsion) -> str:
    parts = []
    if betti == 1:
        parts.append("Z")
    elif betti > 1:
        parts.append(f"Z^{betti}")
    parts += [f"Z/{t}" for t in torsion]
    return " + ".join(parts) if parts else "0"


def _int_rows(M):
    return [[e.to_int() for e in r] for r in M.data]


def _require_integral(C: BasedComplex, augment: bool) -> BasedComplex:
    if C.group.kind == "trivial":
        return C
    if augment:
        return C.augment()
    raise UnsupportedError(f"homology over Z[{C.group}] is not decided; augment to Z first")


def homology_Z(C: BasedComplex, augment: bool = False) -> HomologySummary:
    C = _require_integral(C, augment)
    divs = {}
    for k in range(1, C.top + 1):
        ops = IntOps(_int_rows(C.d(k)), track=False)
        divs[k] = smith_reduce(ops, C.rank(k - 1), C.rank(k))
    groups = []
    for k in range(C.top + 1):
        lo, hi = divs.get(k, []), divs.get(k + 1, [])
        groups.append((C.rank(k) - len(lo) - len(hi), tuple(d for d in hi if d > 1)))
    return HomologySummary(tuple(groups))


def cohomology_summary_Z(C: BasedComplex, augment: bool = False) -> HomologySummary:
    """``H^k`` for every k, as the homology of the dual complex read backwards."""
    C = _require_integral(C, augment)
    n = C.top
    h = homology_Z(dualize(C, n))
    return HomologySummary(tuple(h.group(n - k) for k in range(n + 1)))


def cohomology_Z(C: BasedComplex, degree: int, augment: bool = False) -> tuple:
    return cohomology_summary_Z(C, augment).group(degree)


def is_homologically_2dim(D: BasedComplex) -> bool:
    if D.group.kind != "trivial":
        raise UnsupportedError(f"homological dimension over Z[{D.group}] is undecided")
    h = homology_Z(D)
    if any(not h.is_zero(k) for k in range(3, D.top + 1)):
        return False
    return cohomology_Z(D, 3) == (0, ())


# -- basis changes driven by Smith reduction ------------------------------------


class _ComplexOps:
    """Row/column operations on ``d_k`` of a replayer, logged as based moves."""

    def __init__(self, rep: Replayer, k: int):
        self.rep, self.k = rep, k
        self.g = rep.group

    def get(self, i, j):
        return self.rep.d[self.k].a[i][j].to_int()

    def row_add(self, i, j, c):
        self.rep.apply(Elementary(self.k - 1, i, j, Elem.from_int(self.g, -c)))

    def col_add(self, j, i, c):
        self.rep.apply(Elementary(self.k, i, j, Elem.from_int(self.g, c)))

    def _swap(self, deg, i, j):
        p = list(range(self.rep.ranks[deg]))
        p[i], p[j] = p[j], p[i]
        self.rep.apply(Permute(deg, tuple(p)))

    def swap_rows(self, i, j):
        self._swap(self.k - 1, i, j)

    def swap_cols(self, i, j):
        self._swap(self.k, i, j)

    def neg_row(self, i):
        self.rep.apply(UnitDiagonal(self.k - 1, i, Elem.from_int(self.g, -1)))


@dataclass(frozen=True)
class StandardForm:
    """``complex`` is reached from the input by ``witness``; ``equivalence`` goes input -> complex.

    ``pieces[k]`` lists the divisors of the ``(k, k-1)`` pieces in order.
    """

    complex: BasedComplex
    equivalence: Equivalence
    witness: SimpleWitness
    pieces: dict


def _reframe(E: Equivalence, S: BasedComplex, T: BasedComplex) -> Equivalence:
    """Same matrices, with source and target replaced by padded/trimmed copies."""
    F = ChainMap(S, T, E.forward.components)
    G = ChainMap(T, S, E.backward.components)
    left = ChainHomotopy(ChainMap.identity(S), G @ F, E.left.components)
    right = ChainHomotopy(ChainMap.identity(T), F @ G, E.right.components)
    return Equivalence(F, G, left, right)


def _standardize(rep: Replayer) -> dict:
    """Bring the replayer's complex to standard form in place; return divisors per degree."""
    top = rep.top
    divs: dict = {}
    for k in range(1, top + 1):
        start = len(divs.get(k - 1, []))
        divs[k] = smith_reduce(_ComplexOps(rep, k), rep.ranks[k - 1], rep.ranks[k], row_start=start)
    for k in range(top + 1):
        up = len(divs.get(k, []))
        low = len(divs.get(k + 1, []))
        n = rep.ranks[k]
        perm = tuple(list(range(up)) + list(range(up + low, n)) + list(range(up, up + low)))
        if perm != tuple(range(n)):
            rep.apply(Permute(k, perm))
    return divs


def standard_form_Z(C: BasedComplex, minimal: bool = False) -> StandardForm:
    """Direct sum of ``Z`` pieces and ``Z -d-> Z`` pieces, by based moves.

    Each degree is ordered as [upper ends by divisor, free, lower ends].  With
    ``minimal=True`` the contractible ``Z -1-> Z`` pieces are cancelled, so two
    complexes with the same homology give identical results.
    """
    C = _require_integral(C, False)
    rep = Replayer(C, track=True)
    divs = _standardize(rep)
    if minimal:
        for k in range(rep.top - 1, -1, -1):
            units = sum(1 for d in divs.get(k + 1, []) if d == 1)
            for _ in range(units):
                lo = rep.ranks[k] - len(divs[k + 1])
                rep.apply(Destabilize(k, lo, 0))
                divs[k + 1] = divs[k + 1][1:]
    S = rep.complex()
    E = rep.equivalence()
    return StandardForm(S, E, rep.witness(), {k: list(v) for k, v in divs.items() if v})


def equivalence_from_homology(A: BasedComplex, B: BasedComplex) -> Equivalence:
    """An explicit equivalence ``A -> B`` between integer complexes with equal homology."""
    sa, sb = standard_form_Z(A, minimal=True), standard_form_Z(B, minimal=True)
    if not sa.complex.same_as(sb.complex):
        raise PreconditionError("complexes have different homology", stage="equivalence_from_homology")
    n = max(A.top, B.top, sa.complex.top, sb.complex.top)
    ea = _reframe(sa.equivalence, A.padded(n), sa.complex.padded(n))
    eb = _reframe(sb.equivalence, B.padded(n), sb.complex.padded(n))
    E = ea.then(eb.inverse())
    return _reframe(E, A, B)


@dataclass(frozen=True)
class Reduction:
    complex: BasedComplex
    witness: SimpleWitness
    equivalence: Equivalence

    @property
    def map(self) -> ChainMap:
        return self.equivalence.forward


def reduce_to_dim2(D: BasedComplex) -> Reduction:
    """Cancel everything above degree two by based moves."""
    if not is_homologically_2dim(D):
        raise PreconditionError("complex is not homologically 2-dimensional", stage="reduce_to_dim2")
    if D.dim <= 2:
        return Reduction(D, SimpleWitness(), Equivalence.identity(D))
    rep = Replayer(D, track=True)
    for k in range(D.top, 2, -1):
        divs = smith_reduce(_ComplexOps(rep, k), rep.ranks[k - 1], rep.ranks[k])
        if len(divs) != rep.ranks[k] or any(d != 1 for d in divs):
            raise PreconditionError(f"d{k} is not a split injection", stage="reduce_to_dim2")
        for _ in divs:
            rep.apply(Destabilize(k - 1, 0, 0))
    E = rep.equivalence()
    T = rep.complex().trimmed().padded(2) if rep.complex().dim < 2 else rep.complex().trimmed()
    return Reduction(T, rep.witness(), _reframe(E, D, T))


def find_homotopy_Z(f: ChainMap, g: ChainMap) -> ChainHomotopy | None:
    """A homotopy from ``f`` to ``g`` over Z by exact linear solving, or None."""
    from .snf import solve_int

    S, T = f.source, f.target
    if S.group.kind != "trivial":
        raise UnsupportedError("homotopies over nontrivial group rings are not searched for")
    N = max(S.top, T.top)
    offs, count = {}, 0
    for k in range(N + 1):
        offs[k] = count
        count += T.rank(k + 1) * S.rank(k)

    def var(k, i, j):
        return offs[k] + i * S.rank(k) + j

    A, b = [], []
    for k in range(N + 1):
        dT = T.d(k + 1).to_ints()
        dS = S.d(k).to_ints()
        diff = (g[k] - f[k]).to_ints()
        for i in range(T.rank(k)):
            for j in range(S.rank(k)):
                row = [0] * count
                for t in range(T.rank(k + 1)):
                    if dT[i][t]:
                        row[var(k, t, j)] += dT[i][t]
                if k >= 1:
                    for t in range(S.rank(k - 1)):
                        if dS[t][j]:
                            row[var(k - 1, i, t)] += dS[t][j]
                A.append(row)
                b.append([diff[i][j]])
    X = solve_int(A, b, count) if A else [[0] for _ in range(count)]
    if X is None:
        return None
    comps = []
    for k in range(N + 1):
        r, c = T.rank(k + 1), S.rank(k)
        comps.append(Matrix.from_rows(S.group, [[X[var(k, i, j)][0] for j in range(c)] for i in range(r)], r, c))
    h = ChainHomotopy(f, g, tuple(comps))
    h.verify()
    return h
