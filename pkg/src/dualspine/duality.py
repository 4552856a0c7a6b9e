"""Poincaré models, the dual-homology criterion for S^4 spines, and chain-level duality data.

The relative cochains ``C^{4-*}(N, L)`` are modeled as ``dualize(mapping_cone(L -> N), 4)``.
In degree k this is ``dual(L)_{k+1} (+) dual(N)_k``, and projection onto the second
summand is the dual of the cone inclusion.  A nullhomotopy ``H`` of

    K -> N -> dual(N) -> dual(L)

(a homotopy from the composite to zero) is the same thing as a lift ``(H, psi)`` of
``psi : K -> dual(N)`` into the relative cochains.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .chain import (BasedComplex, ChainHomotopy, ChainMap, canonical_nullhomotopy, dualize, dualize_map,
                    lift_from_nullhomotopy, mapping_cone)
from .complex2 import Presentation, fox_boundary
from .errors import PreconditionError, UnsupportedError, VerificationError
from .homology import HomologySummary, equivalence_from_homology, homology_Z
from .matrix import Matrix
from .snf import kernel_basis


@dataclass(frozen=True)
class PoincareComplex:
    chains: BasedComplex
    dim: int
    duality_map: ChainMap

    def verify(self) -> None:
        self.chains.validate()
        dual = dualize(self.chains, self.dim)
        if not (self.duality_map.source.same_as(self.chains) and self.duality_map.target.same_as(dual)):
            raise VerificationError("duality map must run from the chains to their dual")
        self.duality_map.verify()
        if self.chains.group.kind == "trivial":
            if not homology_Z(mapping_cone(self.duality_map)).is_zero():
                raise VerificationError("duality map is not a homology equivalence")


def s4_model() -> PoincareComplex:
    C = BasedComplex.from_ints((1, 0, 0, 0, 1))
    g = C.group
    dual = dualize(C, 4)
    comps = tuple(Matrix.identity(g, C.rank(k)) for k in range(5))
    return PoincareComplex(C, 4, ChainMap(C, dual, comps))


def is_s4_like(P: PoincareComplex) -> bool:
    if P.dim != 4 or P.chains.group.kind != "trivial":
        return False
    return homology_Z(P.chains) == HomologySummary.of((1, ()), (0, ()), (0, ()), (0, ()), (1, ()))


# -- the criterion on summaries -------------------------------------------------


def _require_2complex(h: HomologySummary, which: str) -> None:
    if h.group(0) != (1, ()):
        raise PreconditionError(f"{which}: H0 must be Z for a connected 2-complex", stage="check_dual")
    if h.top > 2:
        raise PreconditionError(f"{which}: homology above degree 2", stage="check_dual")
    if h.torsion(2):
        raise PreconditionError(f"{which}: H2 of a 2-complex is free", stage="check_dual")


def cohomology_from_summary(h: HomologySummary) -> HomologySummary:
    """Universal coefficients: ``H^k = free(H_k) + torsion(H_{k-1})``."""
    return HomologySummary(tuple((h.betti(k), h.torsion(k - 1) if k else ()) for k in range(h.top + 2)))


def check_dual_homology_S4(hK: HomologySummary, hL: HomologySummary) -> bool:
    _require_2complex(hK, "first summary")
    _require_2complex(hL, "second summary")
    coL = cohomology_from_summary(hL)
    return hK.group(1) == coL.group(2) and hK.group(2) == coL.group(1)


def _letter_names(n: int) -> tuple:
    if n <= 26:
        return tuple(chr(ord("a") + i) for i in range(n))
    return tuple(f"a{i + 1}" for i in range(n))


def canonical_dual_spine(hK: HomologySummary) -> Presentation:
    """Wedge of pseudo-projective planes, circles and spheres with the dual homology."""
    _require_2complex(hK, "summary")
    tors = hK.torsion(1)
    b1, b2 = hK.betti(1), hK.betti(2)
    n = len(tors) + b2
    rels = [(i + 1,) * t for i, t in enumerate(tors)] + [()] * b1
    return Presentation(n, tuple(rels), names=_letter_names(n))


# -- chain-level data -----------------------------------------------------------


def _as_chains(X) -> BasedComplex:
    if isinstance(X, Presentation):
        if X.pi.kind != "trivial":
            raise UnsupportedError("duality data are only built over the trivial group")
        return fox_boundary(X)
    return X


def basepoint_map(X: BasedComplex, N: BasedComplex) -> ChainMap:
    """The degree-0 map onto ``N_0 = Z`` given by the generator of ``H^0(X)``."""
    r0 = X.rank(0)
    dT = [list(col) for col in zip(*X.d(1).to_ints())] if X.rank(1) else []
    K = kernel_basis(dT, r0) if dT else [[int(i == 0)] for i in range(r0)]
    if r0 == 0 or not K or len(K[0]) != 1:
        raise PreconditionError("H0 is not Z", stage="basepoint")
    v = [row[0] for row in K]
    if next(x for x in v if x) < 0:
        v = [-x for x in v]
    if N.rank(0) != 1:
        raise PreconditionError("target must have a single 0-cell", stage="basepoint")
    comps = (Matrix.from_rows(X.group, [v], 1, r0),)
    return ChainMap(X, N, comps)


@dataclass(frozen=True)
class DualityDatum:
    K_map: ChainMap
    L_map: ChainMap
    nullhomotopy: ChainHomotopy     # from the composite K -> dual(L) to zero
    poincare: PoincareComplex = field(default_factory=s4_model)

    def composite(self) -> ChainMap:
        n = self.poincare.dim
        return dualize_map(self.L_map, n) @ self.poincare.duality_map @ self.K_map

    def verify(self) -> None:
        N = self.poincare.chains
        if not (self.K_map.target.same_as(N) and self.L_map.target.same_as(N)):
            raise VerificationError("K and L must map into the Poincaré chains")
        self.K_map.verify()
        self.L_map.verify()
        phi = self.composite()
        h = self.nullhomotopy
        if not h.f.same_as(phi):
            raise VerificationError("nullhomotopy does not start at the composite")
        if not h.g.is_valid() or not h.g.same_as(ChainMap.zero(phi.source, phi.target)):
            raise VerificationError("nullhomotopy does not end at zero")
        h.verify()


@dataclass(frozen=True)
class DualityReport:
    lift: ChainMap          # K -> relative cochains
    relative: BasedComplex
    simple: bool


def relative_cochains(L_map: ChainMap, n: int) -> tuple:
    """``(F, j)`` with ``F = dualize(cone(L -> N), n)`` and ``j : F -> dual(N)`` the projection."""
    from .chain import cone_inclusion

    cone = mapping_cone(L_map)
    j = dualize_map(cone_inclusion(L_map, cone), n)
    return j.source, j


def verify_simple_algebraic_duality(d: DualityDatum, L_chains: BasedComplex | None = None) -> DualityReport:
    d.verify()
    if L_chains is not None and not d.L_map.source.same_as(L_chains):
        raise VerificationError("datum was built for a different L")
    n = d.poincare.dim
    F, j = relative_cochains(d.L_map, n)
    psi = d.poincare.duality_map @ d.K_map
    K = psi.source
    H = d.nullhomotopy
    g = K.group
    comps = []
    for k in range(F.top + 1):
        comps.append(Matrix.block(g, [[H[k]], [psi[k]]]))
    lift0 = ChainMap(K, F, tuple(comps))
    lift0.verify()
    cone_h = canonical_nullhomotopy(psi, j, lift0)
    lift, _ = lift_from_nullhomotopy(psi, j, cone_h)
    if g.kind != "trivial":
        raise UnsupportedError("simpleness of the lift over a nontrivial group needs a witness")
    if not homology_Z(mapping_cone(lift)).is_zero():
        raise VerificationError("lift into the relative cochains is not a homology equivalence",
                                stage="verify_duality")
    return DualityReport(lift, F, True)


def build_duality_datum_S4(K, L) -> DualityDatum:
    """A datum whose lift is an explicit chain equivalence found from homology."""
    KC, LC = _as_chains(K), _as_chains(L)
    if KC.group.kind != "trivial" or LC.group.kind != "trivial":
        raise UnsupportedError("duality data are only built over the trivial group")
    hK, hL = homology_Z(KC), homology_Z(LC)
    if not check_dual_homology_S4(hK, hL):
        raise PreconditionError("homologies are not dual in S^4", stage="build_duality_datum")
    P = s4_model()
    N = P.chains
    L_map = basepoint_map(LC, N)
    F, j = relative_cochains(L_map, 4)
    top = max(KC.top, F.top)
    E = equivalence_from_homology(KC.padded(top), F.padded(top)).forward
    # F_0 is exactly dual(N)_0; E_0 there is a generator of H^0(K)
    w = E[0].submatrix(range(F.rank(0) - 1, F.rank(0)), range(KC.rank(0)))
    K_map = ChainMap(KC, N, (w,))
    psi = P.duality_map @ K_map
    comps = []
    for k in range(KC.top + 1):
        lr = F.rank(k) - N.rank(4 - k)
        comps.append(E[k].submatrix(range(lr), range(KC.rank(k))))
        if E[k].submatrix(range(lr, F.rank(k)), range(KC.rank(k))) != psi[k]:
            raise VerificationError(f"equivalence does not project onto the duality map in degree {k}",
                                    stage="build_duality_datum")
    phi = dualize_map(L_map, 4) @ psi
    H = ChainHomotopy(phi, ChainMap.zero(phi.source, phi.target), tuple(comps))
    datum = DualityDatum(K_map, L_map, H, P)
    datum.verify()
    return datum
