"""Acceptance criteria, one test each.

Run under pytest (a summary line per criterion is printed at the end of the session)
or directly with ``python3 tests/test_acceptance.py``.
"""

import io
import json
import random
import sys
import tempfile
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

import helpers as hp  # noqa: E402
from dualspine import certificate as cert  # noqa: E402
from dualspine import formats as fm  # noqa: E402
from dualspine.align import align_deg0, align_deg1, realize_decomposition, split_summand  # noqa: E402
from dualspine.chain import ChainMap, mapping_cone  # noqa: E402
from dualspine.cli import main  # noqa: E402
from dualspine.complex2 import (MoveSequence, Presentation, fox_boundary, fox_derivatives,  # noqa: E402
                                moves_to_chain_equiv, synthesize_moves_from_equiv)
from dualspine.duality import (basepoint_map, build_duality_datum_S4, canonical_dual_spine,  # noqa: E402
                               check_dual_homology_S4, s4_model, verify_simple_algebraic_duality)
from dualspine.grpring import Elem, GroupSpec  # noqa: E402
from dualspine.homology import HomologySummary, homology_Z, reduce_to_dim2  # noqa: E402
from dualspine.snf import det_int, matmul_int, snf  # noqa: E402
from test_complex2 import random_sequence  # noqa: E402

BUDGET = 60.0
RESULTS: dict = {}

GROUP_CLASSES = {
    "trivial": GroupSpec.trivial(),
    "free": GroupSpec.free(2),
    "free-abelian": GroupSpec.free_abelian(2),
    "finite-cyclic": GroupSpec.cyclic(6),
}


# -- 1 ------------------------------------------------------------------------------


def criterion_1():
    rng = random.Random(1001)
    for _ in range(1000):
        m, n = rng.randint(1, 6), rng.randint(1, 6)
        M = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(m)]
        if rng.random() < 0.3 and m > 1:
            M[-1] = [a + b for a, b in zip(M[0], M[-1 - (m > 2)])]  # force some rank drops
        r = snf(M)
        D = matmul_int(matmul_int(r.U, M), r.V)
        for i in range(m):
            for j in range(n):
                assert D[i][j] == (r.divisors[i] if i == j and i < len(r.divisors) else 0)
        assert abs(det_int(r.U)) == 1 and abs(det_int(r.V)) == 1
        assert all(d > 0 for d in r.divisors)
        assert all(b % a == 0 for a, b in zip(r.divisors, r.divisors[1:]))
        assert r.divisors == hp.gcd_of_minors_divisors(M)
    return "1000 matrices"


# -- 2 ------------------------------------------------------------------------------


def _images(rng, g, n):
    if g.kind == "trivial":
        return tuple(g.identity() for _ in range(n))
    return tuple(g.normalize([(rng.randrange(g.ngens), rng.choice([1, -1]))]) for _ in range(n))


def criterion_2():
    rng = random.Random(1002)
    n = 3
    for name, g in GROUP_CLASSES.items():
        for _ in range(1000):
            imgs = _images(rng, g, n)
            u, v = hp.random_word(rng, n, 8), hp.random_word(rng, n, 8)
            du, dv, duv = (fox_derivatives(g, imgs, w) for w in (u, v, u + v))
            gu = Elem.from_word(g, _image(g, imgs, u))
            for j in range(n):
                assert duv[j] == du[j] + gu * dv[j], (name, u, v, j)
    for k in range(2, 13):
        g = GroupSpec.cyclic(k)
        K = Presentation(1, ((1,) * k,), g, (g.normalize([(0, 1)]),))
        C = fox_boundary(K)
        assert C.d(2)[0, 0] == Elem(g, {g.normalize([(0, 1)] * e): 1 for e in range(k)})
        assert homology_Z(C, augment=True).group(1) == (0, (k,))
    return "4000 word pairs, n = 2..12"


def _image(g, imgs, w):
    p = g.identity()
    for s in w:
        im = imgs[abs(s) - 1]
        p = g.mul(p, im if s > 0 else g.inv(im))
    return p


# -- 3 ------------------------------------------------------------------------------


def criterion_3():
    rng = random.Random(1003)
    for _ in range(200):
        f = hp.extend_with_kernel(rng, hp.random_homology_equivalence(rng, 2))
        p0 = align_deg0(f)
        p0.verify(f)
        p0.witness.check_deg0(f)
        g = p0.f_prime
        p1 = align_deg1(g)
        p1.verify(g)
        p1.witness.check_deg1(g)
        for k in (0, 1):
            assert p1.f_prime[k].is_identity()
        assert p0.source_witness.replay(f.source).same_as(p0.source)
        assert p1.source_witness.replay(g.source).same_as(p1.source)
        assert p1.target_witness.replay(g.target).same_as(p1.target)
        hC, hD = homology_Z(f.source), homology_Z(f.target)
        assert homology_Z(p0.source) == hC and homology_Z(p1.source) == hC
        assert homology_Z(p0.target) == hD and homology_Z(p1.target) == hD
    return "200 maps"


# -- 4 ------------------------------------------------------------------------------


def criterion_4():
    rng = random.Random(1004)
    for _ in range(100):
        f = hp.random_homology_equivalence(rng, 2)
        g = align_deg1(align_deg0(f).f_prime).f_prime
        M = g.source.trimmed()
        res = split_summand(ChainMap(M, g.target, g.components))
        res.verify()
        res.homotopy.verify()
        k, c2 = M.rank(2), res.complex.rank(2)
        if k:
            proj = [[int(j == c2 - k + i) for j in range(c2)] for i in range(k)]
            assert matmul_int(proj, res.f_split[2].to_ints()) == [[int(i == j) for j in range(k)] for i in range(k)]
        assert res.homotopy.f.same_as(res.f_stabilized) and res.homotopy.g.same_as(res.f_split)
    return "100 maps"


# -- 5 ------------------------------------------------------------------------------


def _start(rng, g):
    n = rng.randint(1, 3)
    imgs = _images(rng, g, n)
    rels = []
    for _ in range(rng.randint(0, 3)):
        for _ in range(50):
            w = hp.random_word(rng, n, 6)
            if _image(g, imgs, w) == g.identity():
                rels.append(w)
                break
    return Presentation(n, tuple(rels), g, None if g.kind == "trivial" else imgs)


def criterion_5():
    rng = random.Random(1005)
    synth = 0
    for name, g in GROUP_CLASSES.items():
        for _ in range(200):
            K = _start(rng, g)
            seq = MoveSequence(K, tuple(random_sequence(rng, K, rng.randint(0, 10))))
            real = moves_to_chain_equiv(seq)
            real.equivalence.verify()
            if name == "trivial":
                L = seq.final()
                s = synthesize_moves_from_equiv(K, L, real.map)
                assert s.sequence.final().same_as(L)
                s.homotopy.verify()
                assert s.homotopy.f.same_as(real.map)
                synth += 1
    return f"800 sequences, {synth} syntheses"


# -- 6 ------------------------------------------------------------------------------


def _summary(rng):
    tors = []
    for _ in range(rng.randint(0, 3)):
        base = tors[-1] if tors else 1
        choices = [base * m for m in range(1, 17) if 2 <= base * m <= 16]
        if not choices:
            break
        tors.append(rng.choice(choices))
    return HomologySummary.of((1, ()), (rng.randint(0, 4), tuple(tors)), (rng.randint(0, 4), ()))


def criterion_6():
    rng = random.Random(1006)
    for _ in range(100):
        h = _summary(rng)
        L = canonical_dual_spine(h)
        assert check_dual_homology_S4(h, homology_Z(fox_boundary(L)))
    for _ in range(25):
        K = hp.random_presentation(rng, max_gens=3, max_rels=3)
        L = canonical_dual_spine(homology_Z(fox_boundary(K)))
        d = build_duality_datum_S4(K, L)
        verify_simple_algebraic_duality(d, fox_boundary(L))
    return "100 summaries, 25 data"


# -- 7 ------------------------------------------------------------------------------


def criterion_7():
    P = s4_model()
    D = fox_boundary(Presentation(1, ((1, 1),)))
    r = realize_decomposition(D, P, basepoint_map(D, P.chains))
    assert r.M_chains.same_as(reduce_to_dim2(D).complex.trimmed())
    r.homotopy.verify()
    r.datum.verify()
    rep = verify_simple_algebraic_duality(r.datum)
    assert homology_Z(mapping_cone(rep.lift)).is_zero()
    assert check_dual_homology_S4(homology_Z(r.M_chains), homology_Z(r.W_reduced))
    pt = fox_boundary(Presentation(0, ()))
    rp = realize_decomposition(pt, P, basepoint_map(pt, P.chains))
    assert homology_Z(rp.W_reduced) == HomologySummary.of((1, ()))
    verify_simple_algebraic_duality(rp.datum)
    return "RP2 and point"


# -- 8 ------------------------------------------------------------------------------


def _bundles(rng):
    rp2 = "gens: x\nrels: x^2\n"
    K = Presentation(2, ((1, 1), (2, 2, 2)))
    seq = MoveSequence(K, tuple(random_sequence(rng, K, 6)))
    f = hp.extend_with_kernel(rng, hp.random_homology_equivalence(rng, 2))
    D = fox_boundary(fm.parse_presentation(rp2))
    g = ChainMap.identity(D)
    return [
        ("moves-verify", cert.make_certificate("moves", {"script": fm.format_move_script(seq)})),
        ("moves-verify", cert.make_certificate("align", {"map": cert.map_json(f)})),
        ("moves-verify", cert.make_certificate("split", {"map": cert.map_json(g)})),
        ("moves-verify", cert.make_certificate("reduce2", {"complex": fm.complex_to_json(D)})),
        ("verify-duality", cert.make_certificate("duality", {"K": rp2, "L": "gens: y\nrels: y^2\n"})),
        ("verify-duality", cert.make_certificate(
            "realize", {"D": fm.complex_to_json(D),
                        "f": fm.map_to_json(basepoint_map(D, s4_model().chains))})),
    ]


def criterion_8():
    rng = random.Random(1008)
    bundles = _bundles(rng)
    with tempfile.TemporaryDirectory() as tmp:
        for i, (verb, b) in enumerate(bundles):
            p = Path(tmp) / f"ok{i}.json"
            p.write_text(cert.dumps(b))
            assert main([verb, str(p)], out=io.StringIO()) == 0
        for t in range(50):
            verb, b = bundles[t % len(bundles)]
            site = rng.choice(hp.matrix_entry_sites(b))
            p = Path(tmp) / f"bad{t}.json"
            p.write_text(json.dumps(hp.corrupt(b, site, rng)))
            assert main([verb, str(p)], out=io.StringIO()) == 1, (b["kind"], site)
    return "50 corruptions"


CRITERIA = [
    (1, "SNF oracle equivalence", criterion_1),
    (2, "Fox calculus correctness", criterion_2),
    (3, "degree 0/1 alignment", criterion_3),
    (4, "summand splitting", criterion_4),
    (5, "move round trip", criterion_5),
    (6, "dual spines and duality data", criterion_6),
    (7, "end-to-end decomposition", criterion_7),
    (8, "negative controls", criterion_8),
]


def run_criterion(num, name, fn):
    t0 = time.perf_counter()
    try:
        detail = fn()
        err = None
    except Exception as e:  # reported, then re-raised by the caller
        detail, err = None, e
    dt = time.perf_counter() - t0
    ok = err is None and dt < BUDGET
    why = detail if err is None else f"{type(err).__name__}: {err}"
    if err is None and dt >= BUDGET:
        why = f"over the {BUDGET:.0f}s budget"
    line = f"criterion {num} ({name}): {'PASS' if ok else 'FAIL'} in {dt:.1f}s [{why}]"
    RESULTS[num] = line
    return ok, line, err


@pytest.mark.parametrize("num,name,fn", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(num, name, fn):
    ok, line, err = run_criterion(num, name, fn)
    print(line)
    if err is not None:
        raise err
    assert ok, line


if __name__ == "__main__":
    failed = 0
    for num, name, fn in CRITERIA:
        ok, line, _ = run_criterion(num, name, fn)
        print(line, flush=True)
        failed += not ok
    sys.exit(1 if failed else 0)
