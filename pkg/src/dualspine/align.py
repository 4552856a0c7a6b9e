"""Skeleton alignment of chain maps, the summand split, and the realization pipeline.

For ``f : C -> D`` the degree-0 stage needs ``g0, s, t, u`` with

    f0 g0 + d s = 1,   g0 f0 + d t = 1,   d u + f1 t = s f0

and the degree-1 stage needs ``g, s`` with ``d s = 1 - f1 g``.  Over the
trivial group these are solved for; otherwise they must be supplied.
"""

from __future__ import annotations

from dataclasses import dataclass

from .chain import BasedComplex, ChainHomotopy, ChainMap, dualize, mapping_cone
from .errors import PreconditionError, ShapeError, UnsupportedError, VerificationError
from .homology import Reduction, find_homotopy_Z, homology_Z, is_homologically_2dim, reduce_to_dim2
from .matrix import Matrix
from .snf import kernel_basis, solve_int
from .witness import (Destabilize, Elementary, Permute, Replayer, SimpleWitness, Stabilize,
                      block_row_add)


def _I(g, n):
    return Matrix.identity(g, n)


def _Z(g, r, c):
    return Matrix.zeros(g, r, c)


def _M(g, rows, r, c):
    return Matrix.from_rows(g, rows, r, c)


def _check(stage, name, lhs: Matrix, rhs: Matrix):
    bad = lhs.first_difference(rhs)
    if bad is not None:
        raise VerificationError(f"identity {name} fails", entry=bad, stage=stage)


@dataclass(frozen=True)
class AlignmentWitness:
    g0: Matrix | None = None
    s: Matrix | None = None
    t: Matrix | None = None
    u: Matrix | None = None
    g: Matrix | None = None

    def check_deg0(self, f: ChainMap) -> None:
        C, D = f.source, f.target
        gr = C.group
        st = "align_deg0"
        _check(st, "f0 g0 + d s = 1", f[0] @ self.g0 + D.d(1) @ self.s, _I(gr, D.rank(0)))
        _check(st, "g0 f0 + d t = 1", self.g0 @ f[0] + C.d(1) @ self.t, _I(gr, C.rank(0)))
        _check(st, "d u + f1 t = s f0", D.d(2) @ self.u + f[1] @ self.t, self.s @ f[0])

    def check_deg1(self, f: ChainMap) -> None:
        D = f.target
        _check("align_deg1", "d s = 1 - f1 g", D.d(2) @ self.s, _I(D.group, D.rank(1)) - f[1] @ self.g)


@dataclass(frozen=True)
class AlignedPair:
    source: BasedComplex        # C'
    target: BasedComplex        # D'
    f_prime: ChainMap
    into_source: ChainMap       # C -> C'
    into_target: ChainMap       # D -> D'
    source_witness: SimpleWitness
    target_witness: SimpleWitness
    square_homotopy: ChainHomotopy  # from into_target f to f_prime into_source
    witness: AlignmentWitness
    stage: str

    def verify(self, f: ChainMap) -> None:
        st = self.stage
        self.f_prime.verify()
        self.into_source.verify()
        self.into_target.verify()
        self.square_homotopy.verify()
        if not self.square_homotopy.f.same_as(self.into_target @ f):
            raise VerificationError("square homotopy does not start at into_target f", stage=st)
        if not self.square_homotopy.g.same_as(self.f_prime @ self.into_source):
            raise VerificationError("square homotopy does not end at f' into_source", stage=st)
        degs = (0,) if st == "align_deg0" else (0, 1)
        for k in degs:
            if not self.f_prime[k].is_identity():
                raise VerificationError(f"f' is not a basis-preserving isomorphism in degree {k}", degree=k, stage=st)
        if not self.source_witness.replay(f.source).same_as(self.source):
            raise VerificationError("source witness does not replay to C'", stage=st)
        if not self.target_witness.replay(f.target).same_as(self.target):
            raise VerificationError("target witness does not replay to D'", stage=st)
        if st == "align_deg0":
            self.witness.check_deg0(f)
        else:
            self.witness.check_deg1(f)


def _solve(A: Matrix, B: Matrix):
    """Integer X with ``A X = B`` (shapes tracked through empty dimensions)."""
    X = solve_int(A.to_ints(), B.to_ints(), A.cols, B.cols)
    return None if X is None else _M(A.group, X, A.cols, B.cols)


def solve_deg0_witness(f: ChainMap) -> AlignmentWitness:
    C, D = f.source, f.target
    gr = C.group
    st = "align_deg0"
    c0, c1, d0, d2 = C.rank(0), C.rank(1), D.rank(0), D.rank(2)
    X = _solve(Matrix.block(gr, [[f[0], D.d(1)]]), _I(gr, d0))
    if X is None:
        raise PreconditionError("H0(f) is not onto", stage=st)
    g0, s = X.submatrix(range(c0), range(d0)), X.submatrix(range(c0, X.rows), range(d0))
    t = _solve(C.d(1), _I(gr, c0) - g0 @ f[0])
    if t is None:
        raise PreconditionError("H0(f) is not injective", stage=st)
    kb = kernel_basis(C.d(1).to_ints(), c1)
    k = len(kb[0]) if kb and kb[0] else 0
    K = _M(gr, kb, c1, k)
    Y = _solve(Matrix.block(gr, [[f[1] @ K, D.d(2)]]), s @ f[0] - f[1] @ t)
    if Y is None:
        raise PreconditionError("H1(f) is not onto", stage=st)
    beta, u = Y.submatrix(range(k), range(c0)), Y.submatrix(range(k, k + d2), range(c0))
    return AlignmentWitness(g0=g0, s=s, t=t + K @ beta, u=u)


def align_deg0(f: ChainMap, witness: AlignmentWitness | None = None) -> AlignedPair:
    """Replace C by C' with ``C'_0 = D_0`` so that f' is the identity in degree 0."""
    st = "align_deg0"
    f.verify()
    C, D = f.source, f.target
    gr = C.group
    if witness is None:
        if gr.kind != "trivial":
            raise UnsupportedError("lifting witnesses over a nontrivial group must be supplied")
        witness = solve_deg0_witness(f)
    witness.check_deg0(f)
    g0, s, t, u = witness.g0, witness.s, witness.t, witness.u
    c0, c1, c2 = C.rank(0), C.rank(1), C.rank(2)
    d0 = D.rank(0)
    top = max(C.top, D.top, 2)
    Cp = C.padded(top)

    # C' itself
    ranks = [d0, c1 + d0, c2 + c0] + [Cp.rank(k) for k in range(3, top + 1)]
    d1 = Matrix.block(gr, [[f[0] @ C.d(1), D.d(1) @ s]])
    d2 = Matrix.block(gr, [[C.d(2), -t], [_Z(gr, d0, c2), f[0]]])
    mats = [d1, d2]
    if top >= 3:
        mats.append(Matrix.block(gr, [[C.d(3)], [_Z(gr, c0, Cp.rank(3))]]))
    mats += [Cp.d(k) for k in range(4, top + 1)]
    C1 = BasedComplex(gr, tuple(ranks), tuple(mats))
    C1.validate()

    # the log: stabilize, change basis in degrees 0 and 1, cancel the leftover pairs
    moves = [Stabilize(1)] * c0 + [Stabilize(0)] * d0
    C0i = list(range(c0))
    Pi = list(range(c0, c0 + d0))
    moves.append(Permute(0, tuple(Pi + C0i)))
    P2, C02 = list(range(d0)), list(range(d0, d0 + c0))
    moves += block_row_add(0, C02, P2, -g0)
    moves += block_row_add(0, P2, C02, f[0])
    # degree 1 is [C1 | X | Q]; reorder to [C1 | Q | X]
    C1i = list(range(c1))
    Xi = list(range(c1, c1 + c0))
    Qi = list(range(c1 + c0, c1 + c0 + d0))
    moves.append(Permute(1, tuple(C1i + Qi + Xi)))
    Q2 = list(range(c1, c1 + d0))
    X2 = list(range(c1 + d0, c1 + d0 + c0))
    moves += block_row_add(1, Q2, X2, f[0])
    moves += block_row_add(1, C1i, X2, -t)
    moves += block_row_add(1, X2, Q2, -g0)
    moves += block_row_add(1, X2, C1i, C.d(1))
    moves += [Destabilize(0, d0, c1 + d0)] * c0
    rep = Replayer(C, track=False).apply_all(moves)
    got = rep.complex()
    if not got.same_as(C1):
        raise VerificationError("degree-0 witness log does not replay to C'", stage=st)

    # maps
    comps = [f[0], Matrix.block(gr, [[_I(gr, c1)], [_Z(gr, d0, c1)]]),
             Matrix.block(gr, [[_I(gr, c2)], [_Z(gr, c0, c2)]])]
    comps += [_I(gr, Cp.rank(k)) for k in range(3, top + 1)]
    iota = ChainMap(C, C1, tuple(comps))
    fc = [_I(gr, d0), Matrix.block(gr, [[f[1], s]]), Matrix.block(gr, [[f[2], u]])]
    fc += [f[k] for k in range(3, top + 1)]
    fp = ChainMap(C1, D, tuple(fc))
    ident = ChainMap.identity(D)
    sq = ChainHomotopy.zero(ident @ f, fp @ iota)
    pair = AlignedPair(C1, D, fp, iota, ident, rep.witness(), SimpleWitness(), sq, witness, st)
    pair.verify(f)
    if not (fp @ iota).same_as(f):
        raise VerificationError("f' composed with the inclusion differs from f", stage=st)
    return pair


def solve_deg1_witness(f: ChainMap) -> AlignmentWitness:
    C, D = f.source, f.target
    gr = C.group
    c1, d1, d2 = C.rank(1), D.rank(1), D.rank(2)
    X = _solve(Matrix.block(gr, [[f[1], D.d(2)]]), _I(gr, d1))
    if X is None:
        raise PreconditionError("H1(f) is not onto", stage="align_deg1")
    return AlignmentWitness(g=X.submatrix(range(c1), range(d1)), s=X.submatrix(range(c1, c1 + d2), range(d1)))


def align_deg1(f: ChainMap, witness: AlignmentWitness | None = None) -> AlignedPair:
    """Stabilize both sides so that f' is the identity in degrees 0 and 1."""
    st = "align_deg1"
    f.verify()
    C, D = f.source, f.target
    gr = C.group
    if not f[0].is_identity():
        raise PreconditionError("f0 is not a basis-preserving isomorphism", stage=st)
    if witness is None:
        if gr.kind != "trivial":
            raise UnsupportedError("lifting witnesses over a nontrivial group must be supplied")
        witness = solve_deg1_witness(f)
    witness.check_deg1(f)
    g, s = witness.g, witness.s
    c1, d1, d2 = C.rank(1), D.rank(1), D.rank(2)

    cm = [Stabilize(1)] * d1
    for i in range(c1):
        for j in range(d1):
            if g[i, j]:
                cm.append(Elementary(1, i, c1 + j, g[i, j]))
    rc = Replayer(C, track=True).apply_all(cm)
    C1 = rc.complex()
    dm = [Stabilize(1)] * c1
    for d in range(d1):
        for c in range(c1):
            if f[1][d, c]:
                dm.append(Elementary(1, d, d1 + c, f[1][d, c]))
    dm.append(Permute(1, tuple(range(d1, d1 + c1)) + tuple(range(d1))))
    dm.append(Permute(2, tuple(range(d2, d2 + c1)) + tuple(range(d2))))
    rd = Replayer(D, track=True).apply_all(dm)
    D1 = rd.complex()
    n = max(C1.top, D1.top)
    C1, D1 = C1.padded(n), D1.padded(n)

    fc = [_I(gr, C1.rank(0)), _I(gr, C1.rank(1)),
          Matrix.block(gr, [[C.d(2), -g], [f[2], s]])]
    fc += [f[k] for k in range(3, n + 1)]
    fp = ChainMap(C1, D1, tuple(fc))
    iota_c = ChainMap(C, C1, rc.equivalence().forward.components)
    iota_d = ChainMap(D, D1, rd.equivalence().forward.components)
    h1 = Matrix.block(gr, [[_I(gr, c1)], [_Z(gr, d2, c1)]])
    hs = [_Z(gr, D1.rank(1), C.rank(0)), h1]
    sq = ChainHomotopy(iota_d @ f, fp @ iota_c, tuple(hs))
    pair = AlignedPair(C1, D1, fp, iota_c, iota_d, rc.witness(), rd.witness(), sq, witness, st)
    pair.verify(f)
    return pair


@dataclass(frozen=True)
class SplitResult:
    complex: BasedComplex       # C''
    f_split: ChainMap           # f'' : D -> C''
    homotopy: ChainHomotopy     # from f_stabilized to f''
    witness: SimpleWitness
    f_stabilized: ChainMap
    into: ChainMap              # C -> C''

    def verify(self) -> None:
        self.homotopy.verify()
        D = self.f_split.source
        k = D.rank(2)
        C2 = self.complex.rank(2)
        proj = Matrix.block(D.group, [[_Z(D.group, k, C2 - k), _I(D.group, k)]])
        if not (proj @ self.f_split[2]).is_identity():
            raise VerificationError("projection after f''_2 is not the identity", stage="split_summand")


def split_summand(f: ChainMap) -> SplitResult:
    """Make ``D_2 -> C''_2`` the inclusion of a based summand by adding (2,3) pairs."""
    st = "split_summand"
    f.verify()
    D, C = f.source, f.target
    gr = D.group
    if D.dim > 2:
        raise ShapeError("source must be 2-dimensional")
    for k in (0, 1):
        if not f[k].is_identity():
            raise ShapeError(f"f{k} is not a basis-preserving isomorphism")
    m, k = C.rank(2), D.rank(2)
    moves = [Stabilize(2)] * k
    for i in range(m):
        for j in range(k):
            if f[2][i, j]:
                moves.append(Elementary(2, i, m + j, f[2][i, j]))
    rep = Replayer(C, track=True).apply_all(moves)
    C2 = rep.complex()
    n = max(C2.top, C.top)
    C2 = C2.padded(n)
    into = ChainMap(C, C2, rep.equivalence().forward.components)
    fstab = into @ f
    comps = [f[0], f[1], Matrix.block(gr, [[_Z(gr, m, k)], [_I(gr, k)]])]
    fs = ChainMap(D, C2, tuple(comps))
    h2 = Matrix.block(gr, [[_Z(gr, C.rank(3), k)], [_I(gr, k)]])
    h = ChainHomotopy(fstab, fs, (_Z(gr, C2.rank(1), D.rank(0)), _Z(gr, C2.rank(2), D.rank(1)), h2))
    res = SplitResult(C2, fs, h, rep.witness(), fstab, into)
    try:
        res.verify()
    except VerificationError as e:
        raise VerificationError(str(e), stage=st) from e
    return res


# -- the realization pipeline ----------------------------------------------------


@dataclass(frozen=True)
class DecompositionResult:
    reduction: Reduction
    stage0: AlignedPair | None
    stage1: AlignedPair
    split: SplitResult
    M_chains: BasedComplex
    M_map: ChainMap             # M -> N'
    N_prime: BasedComplex
    N_map: ChainMap             # N -> N'
    D_to_M: ChainMap
    homotopy: ChainHomotopy     # from N_map f to M_map D_to_M
    W_chains: BasedComplex
    W_reduction: Reduction      # reindexing of W_chains into degrees 0..2
    datum: object = None        # DualityDatum for (M, W) over the S^4 model, when applicable

    @property
    def W_reduced(self) -> BasedComplex:
        return self.W_reduction.complex


def _stage(name, fn, *args):
    try:
        return fn(*args)
    except PreconditionError as e:
        if e.stage is None:
            raise PreconditionError(str(e), stage=name) from e
        raise
    except VerificationError as e:
        if e.stage is None:
            raise VerificationError(str(e), stage=name) from e
        raise


def realize_decomposition(D: BasedComplex, target, f: ChainMap) -> DecompositionResult:
    """Chain-level realization of one side of a decomposition of ``target`` by ``D``."""
    from .duality import build_duality_datum_S4, is_s4_like

    N = target.chains
    if D.group.kind != "trivial" or N.group.kind != "trivial":
        raise UnsupportedError("the realization pipeline is only decided over the trivial group")
    if not f.source.same_as(D) or not f.target.same_as(N):
        raise PreconditionError("f does not run from D to the target chains", stage="realize")
    f.verify()
    if not is_homologically_2dim(D):
        raise PreconditionError("D is not homologically 2-dimensional", stage="reduce_to_dim2")
    H0 = homology_Z(mapping_cone(_truncate01(f)))
    if not H0.is_zero(0) or not H0.is_zero(1):
        raise PreconditionError("H0(f) is not an isomorphism", stage="realize")
    red = _stage("reduce_to_dim2", reduce_to_dim2, D)
    Dr = red.complex
    f_red = f @ ChainMap(Dr, D, red.equivalence.backward.components)
    stage0 = None
    g = f_red
    into = ChainMap.identity(Dr)
    if not (g[0].is_identity()):
        stage0 = _stage("align_deg0", align_deg0, g)
        g = stage0.f_prime
        into = stage0.into_source @ into
    stage1 = _stage("align_deg1", align_deg1, g)
    into = stage1.into_source @ into
    g = stage1.f_prime
    M = stage1.source.trimmed()
    g = ChainMap(M, stage1.target, g.components)
    split = _stage("split_summand", split_summand, g)
    Np = split.complex
    M_map = split.f_split
    N_map = split.into @ ChainMap(N, stage1.target, stage1.into_target.components)
    D_to_M = ChainMap(D, M, (into @ red.equivalence.forward).components)
    lhs, rhs = N_map @ f, M_map @ D_to_M
    h = find_homotopy_Z(lhs, rhs)
    if h is None:
        raise VerificationError("D -> M -> N' is not homotopic to f", stage="realize")
    cone = mapping_cone(M_map)
    if cone.dim > 4:
        raise PreconditionError("target is more than 4-dimensional", stage="realize")
    W = dualize(cone, 4)
    Wred = _stage("reduce_W", reduce_to_dim2, W)
    datum = None
    if is_s4_like(target):
        datum = _stage("duality", build_duality_datum_S4, M, Wred.complex)
    return DecompositionResult(red, stage0, stage1, split, M, M_map, Np, N_map, D_to_M, h, W, Wred, datum)


def _truncate01(f: ChainMap) -> ChainMap:
    """f restricted to degrees 0 and 1 (enough to read H0 of the cone)."""
    S, T = f.source, f.target

    def cut(C):
        return BasedComplex(C.group, (C.rank(0), C.rank(1)), (C.d(1),))

    return ChainMap(cut(S), cut(T), (f[0], f[1]))
