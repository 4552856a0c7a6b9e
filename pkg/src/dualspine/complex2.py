"""Presentation 2-complexes, Fox calculus, and the (homological) 2-deformation moves.

A relator is an unreduced tuple of signed letters ``+(i+1)`` / ``-(i+1)``
over the generators; the empty tuple is a sphere cell.  Each move knows its
shadow on the cellular chains of the pi-cover, so a move sequence can be
replayed as a based simple equivalence.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

from .chain import BasedComplex
from .errors import MoveError, PresentationError
from .grpring import Elem, GroupSpec
from .matrix import Matrix

Letters = tuple


def reduce_letters(w: Sequence[int]) -> tuple:
    out: list[int] = []
    for s in w:
        if out and out[-1] == -s:
            out.pop()
        else:
            out.append(s)
    return tuple(out)


def invert_letters(w: Sequence[int]) -> tuple:
    return tuple(-s for s in reversed(w))


def _fresh(names, base="a"):
    taken = set(names)
    k = 1
    while f"{base}{k}" in taken:
        k += 1
    return f"{base}{k}"


def image_word(group: GroupSpec, images: Sequence, w: Sequence[int]):
    p = group.identity()
    for s in w:
        g = images[abs(s) - 1]
        p = group.mul(p, g if s > 0 else group.inv(g))
    return p


def fox_derivatives(group: GroupSpec, images: Sequence, w: Sequence[int]) -> list[Elem]:
    """All Fox derivatives of ``w`` pushed into Z[group] along ``images``."""
    n = len(images)
    acc: list[dict] = [dict() for _ in range(n)]
    p = group.identity()
    for s in w:
        i = abs(s) - 1
        if not 0 <= i < n:
            raise PresentationError(f"letter {s} out of range")
        if s > 0:
            acc[i][p] = acc[i].get(p, 0) + 1
            p = group.mul(p, images[i])
        else:
            p = group.mul(p, group.inv(images[i]))
            acc[i][p] = acc[i].get(p, 0) - 1
    return [Elem(group, d) for d in acc]


@dataclass(frozen=True)
class Presentation:
    free_rank: int
    relators: tuple
    pi: GroupSpec = field(default_factory=GroupSpec.trivial)
    pi_map: tuple | None = None
    names: tuple | None = None

    def __post_init__(self):
        n = self.free_rank
        rels = tuple(tuple(int(s) for s in r) for r in self.relators)
        object.__setattr__(self, "relators", rels)
        pm = self.pi_map
        if pm is None:
            if self.pi.kind != "trivial":
                raise PresentationError("a map to pi is required for nontrivial pi")
            pm = ((),) * n
        pm = tuple(tuple(w) for w in pm)
        object.__setattr__(self, "pi_map", pm)
        names = tuple(self.names) if self.names is not None else tuple(f"x{i + 1}" for i in range(n))
        object.__setattr__(self, "names", names)
        if len(pm) != n:
            raise PresentationError(f"pi map has {len(pm)} images for {n} generators")
        if len(names) != n or len(set(names)) != n:
            raise PresentationError("generator names must be distinct, one per generator")
        for w in pm:
            if not self.pi.is_canonical(w):
                raise PresentationError(f"pi image {w} is not a canonical word of {self.pi}")
        for j, r in enumerate(rels):
            for s in r:
                if s == 0 or abs(s) > n:
                    raise PresentationError(f"relator {j + 1} uses a letter out of range")
            if self.pi_word(r) != self.pi.identity():
                raise PresentationError(f"relator {j + 1} does not map to 1 in {self.pi}")

    @property
    def num_relators(self) -> int:
        return len(self.relators)

    def pi_word(self, w: Sequence[int]):
        return image_word(self.pi, self.pi_map, w)

    def pi_elem(self, w: Sequence[int], coeff: int = 1) -> Elem:
        return Elem.from_word(self.pi, self.pi_word(w), coeff)

    def fox(self, w: Sequence[int]) -> list[Elem]:
        return fox_derivatives(self.pi, self.pi_map, w)

    def reduced(self) -> "Presentation":
        return replace(self, relators=tuple(reduce_letters(r) for r in self.relators))

    def same_as(self, other: "Presentation", ignore_order: bool = False) -> bool:
        """Equal up to free reduction of relators (and names); optionally up to relator order."""
        if (self.free_rank, self.pi, self.pi_map) != (other.free_rank, other.pi, other.pi_map):
            return False
        a = [reduce_letters(r) for r in self.relators]
        b = [reduce_letters(r) for r in other.relators]
        return sorted(a) == sorted(b) if ignore_order else a == b

    def format_relator(self, r: Sequence[int]) -> str:
        from .grpring import format_letters
        return format_letters([(abs(s) - 1, 1 if s > 0 else -1) for s in r], self.names)


def fox_boundary(K: Presentation) -> BasedComplex:
    """Cellular chains of the pi-cover: ranks ``(1, n, m)``."""
    g = K.pi
    n, m = K.free_rank, K.num_relators
    one = Elem.one(g)
    d1 = Matrix.from_rows(g, [[Elem.from_word(g, K.pi_map[i]) - one for i in range(n)]], 1, n)
    cols = [K.fox(r) for r in K.relators]
    d2 = Matrix.from_rows(g, [[cols[j][i] for j in range(m)] for i in range(n)], n, m)
    C = BasedComplex(g, (1, n, m), (d1, d2))
    C.validate()
    return C


def verify_homological_change(K: Presentation, i: int, new: Sequence[int]) -> bool:
    if not 0 <= i < K.num_relators:
        raise MoveError(f"no relator {i + 1}")
    if any(s == 0 or abs(s) > K.free_rank for s in new):
        raise PresentationError("replacement relator uses a letter out of range")
    if K.pi_word(new) != K.pi.identity():
        raise PresentationError("replacement relator does not map to 1 in pi")
    return K.fox(K.relators[i]) == K.fox(new)


# -- moves ---------------------------------------------------------------------


@dataclass(frozen=True)
class Expand:
    """Add generator ``g`` and relator ``g*word``."""

    word: tuple = ()
    name: str | None = None
    gen_pos: int | None = None
    rel_pos: int | None = None


@dataclass(frozen=True)
class Collapse:
    """Remove generator ``gen`` with relator ``rel``; the relator must reduce to ``gen*w``."""

    gen: int
    rel: int


@dataclass(frozen=True)
class StabilizePair:
    name: str | None = None


@dataclass(frozen=True)
class InvertRelator:
    index: int


@dataclass(frozen=True)
class ConjugateRelator:
    index: int
    word: tuple


@dataclass(frozen=True)
class MultiplyRelator:
    """``r_i <- r_i * w r_j^sign w^-1``."""

    index: int
    other: int
    sign: int = 1
    word: tuple = ()


@dataclass(frozen=True)
class HomologicalChange:
    index: int
    relator: tuple


@dataclass(frozen=True)
class PermuteRelators:
    perm: tuple


@dataclass(frozen=True)
class PermuteGenerators:
    perm: tuple


@dataclass(frozen=True)
class SlideGenerator:
    """Replace ``x_i`` by ``y = x_i x_j^sign`` (a 1-handle slide)."""

    index: int
    over: int
    sign: int = 1


def _check_rel(K, i):
    if not 0 <= i < K.num_relators:
        raise MoveError(f"no relator {i + 1}")


def _check_gen(K, i):
    if not 0 <= i < K.free_rank:
        raise MoveError(f"no generator {i + 1}")


def _check_word(K, w):
    if any(s == 0 or abs(s) > K.free_rank for s in w):
        raise MoveError("word uses a letter out of range")


def _is_perm(p, n):
    return sorted(p) == list(range(n))


def _relabel(w, old_to_new):
    return tuple((old_to_new[abs(s) - 1] + 1) * (1 if s > 0 else -1) for s in w)


def _collapse_parts(K: Presentation, m: Collapse):
    _check_gen(K, m.gen)
    _check_rel(K, m.rel)
    g = m.gen + 1
    r = reduce_letters(K.relators[m.rel])
    if not r or r[0] != g or any(abs(s) == g for s in r[1:]):
        raise MoveError(f"relator {m.rel + 1} does not reduce to generator {m.gen + 1} times a word free of it")
    for j, other in enumerate(K.relators):
        if j != m.rel and any(abs(s) == g for s in reduce_letters(other)):
            raise MoveError(f"generator {m.gen + 1} occurs in relator {j + 1}")
    return r[1:]


def apply_move(K: Presentation, m) -> Presentation:
    n = K.free_rank
    rels = list(K.relators)
    if isinstance(m, StabilizePair):
        m = Expand((), m.name)
    if isinstance(m, Expand):
        _check_word(K, m.word)
        p = n if m.gen_pos is None else m.gen_pos
        q = len(rels) if m.rel_pos is None else m.rel_pos
        if not (0 <= p <= n and 0 <= q <= len(rels)):
            raise MoveError("expansion position out of range")
        name = m.name or _fresh(K.names)
        if name in K.names:
            raise MoveError(f"generator name {name!r} already used")
        shift = [i if i < p else i + 1 for i in range(n)]
        rels = [_relabel(r, shift) for r in rels]
        w = _relabel(m.word, shift)
        rels.insert(q, (p + 1,) + w)
        pim = list(K.pi_map)
        pim.insert(p, K.pi.inv(K.pi_word(m.word)))
        names = list(K.names)
        names.insert(p, name)
        return Presentation(n + 1, tuple(rels), K.pi, tuple(pim), tuple(names))
    if isinstance(m, Collapse):
        _collapse_parts(K, m)
        del rels[m.rel]
        rels = [reduce_letters(r) if m.gen + 1 in map(abs, r) else r for r in rels]
        shift = [i if i < m.gen else i - 1 for i in range(n)]
        rels = [_relabel(r, shift) for r in rels]
        pim = list(K.pi_map)
        del pim[m.gen]
        names = list(K.names)
        del names[m.gen]
        return Presentation(n - 1, tuple(rels), K.pi, tuple(pim), tuple(names))
    if isinstance(m, InvertRelator):
        _check_rel(K, m.index)
        rels[m.index] = invert_letters(rels[m.index])
    elif isinstance(m, ConjugateRelator):
        _check_rel(K, m.index)
        _check_word(K, m.word)
        rels[m.index] = tuple(m.word) + rels[m.index] + invert_letters(m.word)
    elif isinstance(m, MultiplyRelator):
        _check_rel(K, m.index)
        _check_rel(K, m.other)
        _check_word(K, m.word)
        if m.index == m.other:
            raise MoveError("a relator cannot be multiplied by itself")
        if m.sign not in (1, -1):
            raise MoveError("sign must be +1 or -1")
        rj = rels[m.other] if m.sign > 0 else invert_letters(rels[m.other])
        rels[m.index] = rels[m.index] + tuple(m.word) + rj + invert_letters(m.word)
    elif isinstance(m, HomologicalChange):
        _check_rel(K, m.index)
        if not verify_homological_change(K, m.index, m.relator):
            raise MoveError(f"relator {m.index + 1} change is not a homology in the 1-skeleton")
        rels[m.index] = tuple(m.relator)
    elif isinstance(m, PermuteRelators):
        if not _is_perm(m.perm, len(rels)):
            raise MoveError("not a permutation of the relators")
        rels = [rels[p] for p in m.perm]
    elif isinstance(m, PermuteGenerators):
        if not _is_perm(m.perm, n):
            raise MoveError("not a permutation of the generators")
        inv = [0] * n
        for i, p in enumerate(m.perm):
            inv[p] = i
        rels = [_relabel(r, inv) for r in rels]
        return Presentation(n, tuple(rels), K.pi, tuple(K.pi_map[p] for p in m.perm),
                            tuple(K.names[p] for p in m.perm))
    elif isinstance(m, SlideGenerator):
        _check_gen(K, m.index)
        _check_gen(K, m.over)
        if m.index == m.over:
            raise MoveError("cannot slide a generator over itself")
        if m.sign not in (1, -1):
            raise MoveError("sign must be +1 or -1")
        i, j = m.index + 1, m.over + 1
        sub = {i: (i, -m.sign * j), -i: (m.sign * j, -i)}
        rels = [tuple(t for s in r for t in sub.get(s, (s,))) for r in rels]
        pim = list(K.pi_map)
        gj = K.pi_map[m.over]
        pim[m.index] = K.pi.mul(pim[m.index], gj if m.sign > 0 else K.pi.inv(gj))
        return Presentation(n, tuple(rels), K.pi, tuple(pim), K.names)
    else:
        raise TypeError(f"not a move: {m!r}")
    return Presentation(n, tuple(rels), K.pi, K.pi_map, K.names)


def inverse_move(K: Presentation, m):
    """The move undoing ``m`` applied to ``K`` (up to free reduction)."""
    if isinstance(m, StabilizePair):
        return Collapse(K.free_rank, K.num_relators)
    if isinstance(m, Expand):
        p = K.free_rank if m.gen_pos is None else m.gen_pos
        q = K.num_relators if m.rel_pos is None else m.rel_pos
        return Collapse(p, q)
    if isinstance(m, Collapse):
        w = _collapse_parts(K, m)
        shift = [i if i < m.gen else i - 1 for i in range(K.free_rank)]
        return Expand(_relabel(w, shift), K.names[m.gen], m.gen, m.rel)
    if isinstance(m, InvertRelator):
        return m
    if isinstance(m, ConjugateRelator):
        return ConjugateRelator(m.index, invert_letters(m.word))
    if isinstance(m, MultiplyRelator):
        return MultiplyRelator(m.index, m.other, -m.sign, m.word)
    if isinstance(m, HomologicalChange):
        _check_rel(K, m.index)
        return HomologicalChange(m.index, K.relators[m.index])
    if isinstance(m, (PermuteRelators, PermuteGenerators)):
        inv = [0] * len(m.perm)
        for i, p in enumerate(m.perm):
            inv[p] = i
        return type(m)(tuple(inv))
    if isinstance(m, SlideGenerator):
        return SlideGenerator(m.index, m.over, -m.sign)
    raise TypeError(f"not a move: {m!r}")


@dataclass(frozen=True)
class MoveSequence:
    initial: Presentation
    moves: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "moves", tuple(self.moves))

    def states(self) -> list[Presentation]:
        out = [self.initial]
        for k, m in enumerate(self.moves):
            try:
                out.append(apply_move(out[-1], m))
            except (MoveError, PresentationError) as e:
                raise MoveError(f"move {k + 1}: {e}") from e
        return out

    def final(self) -> Presentation:
        return self.states()[-1]

    def inverse(self) -> "MoveSequence":
        states = self.states()
        inv = tuple(inverse_move(states[k], m) for k, m in enumerate(self.moves))
        return MoveSequence(states[-1], tuple(reversed(inv)))


# -- chain-level shadows -------------------------------------------------------


def chain_moves(K: Presentation, m) -> list:
    """Based moves on ``fox_boundary(K)`` realizing the move ``m``."""
    from .witness import Destabilize, Elementary, Permute, Stabilize, UnitDiagonal

    g = K.pi
    n = K.free_rank
    if isinstance(m, StabilizePair):
        m = Expand((), m.name)
    if isinstance(m, Expand):
        p = n if m.gen_pos is None else m.gen_pos
        q = K.num_relators if m.rel_pos is None else m.rel_pos
        gimg = Elem.from_word(g, g.inv(K.pi_word(m.word)))
        out = [Stabilize(1, p, q)]
        for x, dx in enumerate(K.fox(m.word)):
            c = gimg * dx
            if c:
                out.append(Elementary(1, x if x < p else x + 1, p, -c))
        return out
    if isinstance(m, Collapse):
        w = _collapse_parts(K, m)
        gimg = Elem.from_word(g, K.pi_map[m.gen])
        out = []
        for x, dx in enumerate(K.fox(w)):
            c = gimg * dx
            if x != m.gen and c:
                out.append(Elementary(1, x, m.gen, c))
        out.append(Destabilize(1, m.gen, m.rel))
        return out
    if isinstance(m, InvertRelator):
        return [UnitDiagonal(2, m.index, Elem.from_int(g, -1))]
    if isinstance(m, ConjugateRelator):
        return [UnitDiagonal(2, m.index, K.pi_elem(m.word))]
    if isinstance(m, MultiplyRelator):
        return [Elementary(2, m.other, m.index, K.pi_elem(m.word, m.sign))]
    if isinstance(m, HomologicalChange):
        return []
    if isinstance(m, PermuteRelators):
        return [Permute(2, m.perm)]
    if isinstance(m, PermuteGenerators):
        return [Permute(1, m.perm)]
    if isinstance(m, SlideGenerator):
        gi = Elem.from_word(g, K.pi_map[m.index])
        if m.sign > 0:
            c = gi
        else:
            c = -(gi * Elem.from_word(g, g.inv(K.pi_map[m.over])))
        return [Elementary(1, m.over, m.index, c)]
    raise TypeError(f"not a move: {m!r}")


@dataclass(frozen=True)
class ChainRealization:
    equivalence: object  # Equivalence fox(initial) -> fox(final)
    witness: object      # SimpleWitness
    final: Presentation

    @property
    def map(self):
        return self.equivalence.forward


def moves_to_chain_equiv(seq: MoveSequence) -> ChainRealization:
    from .errors import VerificationError
    from .witness import Replayer

    K = seq.initial
    rep = Replayer(fox_boundary(K), track=True)
    for k, m in enumerate(seq.moves, start=1):
        try:
            K2 = apply_move(K, m)
        except (MoveError, PresentationError) as e:
            raise MoveError(f"move {k}: {e}") from e
        rep.apply_all(chain_moves(K, m))
        expect = fox_boundary(K2)
        got = rep.complex()
        for d in (1, 2):
            bad = got.d(d).first_difference(expect.d(d))
            if bad is not None:
                raise VerificationError("replayed chains differ from the Fox boundary",
                                        degree=d, entry=bad, stage=f"move {k}")
        K = K2
    E = rep.equivalence()
    E.verify()
    return ChainRealization(E, rep.witness(), K)


# -- synthesis over the trivial group -------------------------------------------


@dataclass(frozen=True)
class Synthesis:
    sequence: MoveSequence
    realization: ChainRealization
    homotopy: object  # ChainHomotopy from the given map to the realized one


def _sign(c):
    return 1 if c > 0 else -1


def synthesize_moves_from_equiv(K: Presentation, L: Presentation, e, witness=None) -> Synthesis:
    """Moves from K to L whose chain shadow is homotopic to the equivalence ``e``.

    Only the trivial group is supported; there every chain equivalence is simple.
    """
    from .chain import ChainMap, mapping_cone
    from .errors import PreconditionError, UnsupportedError, VerificationError
    from .homology import find_homotopy_Z, homology_Z
    from .snf import solve_int, unimodular_row_reduction

    if K.pi.kind != "trivial" or L.pi.kind != "trivial":
        raise UnsupportedError("move synthesis is only decided over the trivial group")
    C, D = fox_boundary(K), fox_boundary(L)
    f = e if isinstance(e, ChainMap) else e.forward
    if not (f.source.same_as(C) and f.target.same_as(D)):
        raise PreconditionError("map does not run between the Fox complexes of K and L", stage="synthesize")
    f.verify()
    if not homology_Z(mapping_cone(f)).is_zero():
        raise PreconditionError("map is not a homology equivalence", stage="synthesize")
    if f[0].to_ints() != [[1]]:
        raise PreconditionError("degree-0 component is -1; moves always induce +1", stage="synthesize")
    n = K.free_rank
    n2, m2 = L.free_rank, L.num_relators
    f1, f2 = f[1].to_ints(), f[2].to_ints()
    dC, dD = C.d(2).to_ints(), D.d(2).to_ints()
    kmoves: list = []
    lmoves: list = []
    ident = [[int(i == j) for j in range(n)] for i in range(n)]
    if n == n2 and f1 == ident:
        T = f2
    else:
        A = [f1[i] + dD[i] for i in range(n2)]
        X = solve_int(A, [[int(i == j) for j in range(n2)] for i in range(n2)], n + m2)
        if X is None:
            raise PreconditionError("map is not onto on H1", stage="synthesize")
        gmat, smat = X[:n], X[n:]
        for _ in range(n2):
            kmoves.append(StabilizePair())
        for j in range(n2):
            for i in range(n):
                c = gmat[i][j]
                kmoves += [SlideGenerator(n + j, i, _sign(c))] * abs(c)
        for _ in range(n):
            lmoves.append(StabilizePair())
        for c in range(n):
            for d in range(n2):
                v = f1[d][c]
                lmoves += [SlideGenerator(n2 + c, d, _sign(v))] * abs(v)
        lmoves.append(PermuteGenerators(tuple(range(n2, n2 + n)) + tuple(range(n2))))
        lmoves.append(PermuteRelators(tuple(range(m2, m2 + n)) + tuple(range(m2))))
        T = [dC[i] + [-x for x in gmat[i]] for i in range(n)] + [f2[i] + smat[i] for i in range(m2)]
    ops, ok = unimodular_row_reduction(T)
    if not ok:
        raise VerificationError("degree-2 matrix is not invertible over Z", stage="synthesize")
    rel_moves = []
    size = len(T)
    for op in reversed(ops):
        if op[0] == "add":
            _, a, b, c = op  # undo: row a -= c row b
            rel_moves += [MultiplyRelator(b, a, _sign(c))] * abs(c)
        elif op[0] == "swap":
            perm = list(range(size))
            perm[op[1]], perm[op[2]] = perm[op[2]], perm[op[1]]
            rel_moves.append(PermuteRelators(tuple(perm)))
        else:
            rel_moves.append(InvertRelator(op[1]))
    kmoves += rel_moves
    L1 = MoveSequence(L, tuple(lmoves)).final()
    K1 = MoveSequence(K, tuple(kmoves)).final()
    for i in range(L1.num_relators):
        if reduce_letters(K1.relators[i]) != reduce_letters(L1.relators[i]):
            kmoves.append(HomologicalChange(i, L1.relators[i]))
    kmoves += MoveSequence(L, tuple(lmoves)).inverse().moves
    seq = MoveSequence(K, tuple(kmoves))
    real = moves_to_chain_equiv(seq)
    if not real.final.same_as(L):
        raise VerificationError("synthesized moves do not end at L", stage="synthesize")
    phi = ChainMap(C, D, real.map.components)
    h = find_homotopy_Z(f, phi)
    if h is None:
        raise VerificationError("realized map is not homotopic to the given one", stage="synthesize")
    return Synthesis(seq, real, h)
