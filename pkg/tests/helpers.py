"""Independent oracles and random generators shared by the test modules."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from math import gcd

from dualspine.chain import BasedComplex, ChainMap
from dualspine.complex2 import Presentation
from dualspine.grpring import Elem, GroupSpec
from dualspine.matrix import Matrix
from dualspine.witness import Elementary, Permute, Replayer, Stabilize, UnitDiagonal

TRIV = GroupSpec.trivial()


# -- oracles --------------------------------------------------------------------


def det_fraction(M):
    n = len(M)
    A = [[Fraction(x) for x in r] for r in M]
    d = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c]), None)
        if p is None:
            return 0
        if p != c:
            A[c], A[p] = A[p], A[c]
            d = -d
        d *= A[c][c]
        for r in range(c + 1, n):
            if A[r][c]:
                q = A[r][c] / A[c][c]
                A[r] = [a - q * b for a, b in zip(A[r], A[c])]
    return int(d)


def rank_Q(M) -> int:
    A = [[Fraction(x) for x in r] for r in M]
    if not A or not A[0]:
        return 0
    rows, cols = len(A), len(A[0])
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if A[i][c]), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        for i in range(rows):
            if i != r and A[i][c]:
                q = A[i][c] / A[r][c]
                A[i] = [a - q * b for a, b in zip(A[i], A[r])]
        r += 1
        if r == rows:
            break
    return r


def gcd_of_minors_divisors(M) -> list:
    """Invariant factors from determinantal divisors ``D_k = gcd of k x k minors``."""
    m = len(M)
    n = len(M[0]) if m else 0
    Ds = [1]
    for k in range(1, min(m, n) + 1):
        g = 0
        for rs in itertools.combinations(range(m), k):
            for cs in itertools.combinations(range(n), k):
                g = gcd(g, det_fraction([[M[i][j] for j in cs] for i in rs]))
                if g == 1:
                    break
            if g == 1:
                break
        if g == 0:
            break
        Ds.append(g)
    return [Ds[k] // Ds[k - 1] for k in range(1, len(Ds))]


def homology_oracle(C: BasedComplex) -> list:
    """``[(betti, torsion)]`` per degree from rational ranks and determinantal divisors."""
    out = []
    for k in range(C.top + 1):
        rk = rank_Q(C.d(k).to_ints()) if k >= 1 and C.rank(k) and C.rank(k - 1) else 0
        up = C.d(k + 1).to_ints() if C.rank(k + 1) and C.rank(k) else []
        rk1 = rank_Q(up) if up else 0
        tors = tuple(d for d in gcd_of_minors_divisors(up) if d > 1) if up else ()
        out.append((C.rank(k) - rk - rk1, tors))
    while out and out[-1] == (0, ()):
        out.pop()
    return out


def fox_letterwise(group: GroupSpec, images, word, j):
    """Fox derivative d(word)/d(x_j) by walking letters: prefix * (1 or -x^-1)."""
    total = Elem.zero(group)
    prefix = group.identity()
    for s in word:
        i, e = abs(s) - 1, (1 if s > 0 else -1)
        img = images[i]
        if e == 1:
            if i == j:
                total = total + Elem.from_word(group, prefix)
            prefix = group.mul(prefix, img)
        else:
            prefix = group.mul(prefix, group.inv(img))
            if i == j:
                total = total - Elem.from_word(group, prefix)
    return total


# -- random constructions --------------------------------------------------------


def standard_complex(rng: random.Random, top: int, max_pieces: int = 2, max_div: int = 6) -> BasedComplex:
    """Direct sum of free pieces and ``Z -d-> Z`` pieces with random d."""
    ranks = [0] * (top + 1)
    entries = []
    for k in range(top + 1):
        for _ in range(rng.randint(0, max_pieces)):
            ranks[k] += 1
        if k < top:
            for _ in range(rng.randint(0, max_pieces)):
                d = rng.randint(1, max_div)
                lo, hi = ranks[k], ranks[k + 1]
                ranks[k] += 1
                ranks[k + 1] += 1
                entries.append((k + 1, lo, hi, d))
    mats = [[[0] * ranks[k] for _ in range(ranks[k - 1])] for k in range(1, top + 1)]
    for k, lo, hi, d in entries:
        mats[k - 1][lo][hi] = d
    return BasedComplex.from_ints(tuple(ranks), mats)


def random_moves(rng: random.Random, C: BasedComplex, n: int, group=TRIV) -> list:
    """Random based moves valid on C (stabilizations, elementary ops, signs, permutations)."""
    ranks = list(C.ranks)
    moves = []
    for _ in range(n):
        choice = rng.random()
        if choice < 0.2 and len(ranks) > 1:
            k = rng.randrange(len(ranks) - 1)
            moves.append(Stabilize(k))
            ranks[k] += 1
            ranks[k + 1] += 1
        elif choice < 0.75:
            ks = [k for k, r in enumerate(ranks) if r >= 2]
            if not ks:
                continue
            k = rng.choice(ks)
            i, j = rng.sample(range(ranks[k]), 2)
            c = rng.choice([-2, -1, 1, 2])
            moves.append(Elementary(k, i, j, Elem.from_int(group, c)))
        elif choice < 0.85:
            ks = [k for k, r in enumerate(ranks) if r >= 1]
            if not ks:
                continue
            k = rng.choice(ks)
            moves.append(UnitDiagonal(k, rng.randrange(ranks[k]), Elem.from_int(group, -1)))
        else:
            ks = [k for k, r in enumerate(ranks) if r >= 2]
            if not ks:
                continue
            k = rng.choice(ks)
            p = list(range(ranks[k]))
            rng.shuffle(p)
            moves.append(Permute(k, tuple(p)))
    return moves


def scrambled(rng: random.Random, C: BasedComplex, n: int = 8):
    """A complex simply equivalent to C, with its tracked equivalence."""
    rep = Replayer(C, track=True).apply_all(random_moves(rng, C, n))
    return rep.complex(), rep.equivalence()


def random_complex(rng: random.Random, top: int = 3, moves: int = 10) -> BasedComplex:
    return scrambled(rng, standard_complex(rng, top), moves)[0]


def random_homology_equivalence(rng: random.Random, top: int = 2):
    """``f : C -> D`` a homology equivalence between random integer complexes."""
    D = random_complex(rng, top)
    C, E = scrambled(rng, D, 10)
    return E.backward


def extend_with_kernel(rng: random.Random, f: ChainMap) -> ChainMap:
    """Add up to two degree-1 cycles to the source, sent to random cycles of the target.

    H0 and the H1-epimorphism are unaffected; H1 is usually no longer injective.
    """
    C, D = f.source, f.target
    extra = rng.randint(0, 2)
    if extra == 0 or D.rank(1) == 0:
        return f
    # new generators are cycles in C (boundary 0); their images must be cycles of D
    from dualspine.snf import kernel_basis
    dD1 = D.d(1).to_ints()
    K = kernel_basis(dD1, D.rank(1)) if D.rank(0) else [[int(i == j) for j in range(D.rank(1))]
                                                       for i in range(D.rank(1))]
    kdim = len(K[0]) if K and K[0] else 0
    cols = []
    for _ in range(extra):
        coeffs = [rng.randint(-2, 2) for _ in range(kdim)]
        cols.append([sum(K[i][t] * coeffs[t] for t in range(kdim)) for i in range(D.rank(1))])
    g = C.group
    ranks = list(C.ranks)
    ranks[1] += extra
    d1 = Matrix.block(g, [[C.d(1), Matrix.zeros(g, C.rank(0), extra)]])
    mats = [d1]
    if C.top >= 2:
        mats.append(Matrix.block(g, [[C.d(2)], [Matrix.zeros(g, extra, C.rank(2))]]))
    mats += [C.d(k) for k in range(3, C.top + 1)]
    C2 = BasedComplex(g, tuple(ranks), tuple(mats))
    newf = Matrix.from_rows(g, [[cols[c][i] for c in range(extra)] for i in range(D.rank(1))], D.rank(1), extra)
    comps = list(f.components)
    comps[1] = Matrix.block(g, [[f[1], newf]])
    return ChainMap(C2, D, tuple(comps))


def random_word(rng: random.Random, n: int, max_len: int = 6) -> tuple:
    if n == 0:
        return ()
    return tuple(rng.choice([1, -1]) * rng.randint(1, n) for _ in range(rng.randint(0, max_len)))


def random_presentation(rng: random.Random, pi: GroupSpec = TRIV, max_gens: int = 3, max_rels: int = 3):
    """A presentation whose relators all map to 1 in pi (pi images chosen first)."""
    n = rng.randint(0, max_gens)
    if pi.kind == "trivial":
        images = None
    else:
        images = tuple(pi.normalize([(rng.randrange(pi.ngens), rng.choice([1, -1]))]) if rng.random() < 0.8
                       else pi.identity() for _ in range(n))
    rels = []
    for _ in range(rng.randint(0, max_rels)):
        for _ in range(50):
            w = random_word(rng, n)
            img = pi.identity()
            for s in w:
                im = images[abs(s) - 1] if images else pi.identity()
                img = pi.mul(img, im if s > 0 else pi.inv(im))
            if img == pi.identity():
                rels.append(w)
                break
    return Presentation(n, tuple(rels), pi, images)


# -- certificate corruption ------------------------------------------------------


def _is_int_matrix(x) -> bool:
    return (isinstance(x, list) and bool(x) and all(isinstance(r, list) for r in x)
            and all(isinstance(v, int) and not isinstance(v, bool) for r in x for v in r))


def matrix_entry_sites(obj, path=()):
    """Paths to every matrix entry in a JSON bundle (integer or group-ring matrices)."""
    out = []
    if isinstance(obj, dict):
        if "entries" in obj and "rows" in obj:
            for i, r in enumerate(obj["entries"]):
                out += [path + ("entries", i, j) for j in range(len(r))]
            return out
        for k, v in obj.items():
            out += matrix_entry_sites(v, path + (k,))
    elif isinstance(obj, list):
        if _is_int_matrix(obj):
            return [path + (i, j) for i, r in enumerate(obj) for j in range(len(r))]
        for i, v in enumerate(obj):
            out += matrix_entry_sites(v, path + (i,))
    return out


def corrupt(bundle, site, rng: random.Random):
    """A deep copy of ``bundle`` with the entry at ``site`` changed."""
    import copy
    b = copy.deepcopy(bundle)
    box = b
    for key in site[:-1]:
        box = box[key]
    v = box[site[-1]]
    if isinstance(v, int):
        box[site[-1]] = v + rng.choice([-2, -1, 1, 2])
    else:
        box[site[-1]] = f"{v} + 1"
    return b
