import random

import pytest
from hypothesis import given, settings, strategies as st

from dualspine.chain import ChainMap
from dualspine.complex2 import (Collapse, ConjugateRelator, Expand, HomologicalChange, InvertRelator,
                                MoveSequence, MultiplyRelator, PermuteGenerators, PermuteRelators, Presentation,
                                SlideGenerator, StabilizePair, apply_move, fox_boundary, inverse_move,
                                moves_to_chain_equiv, reduce_letters, synthesize_moves_from_equiv,
                                verify_homological_change)
from dualspine.errors import MoveError, PreconditionError, PresentationError, UnsupportedError
from dualspine.grpring import Elem, GroupSpec, parse_elem
from dualspine.homology import equivalence_from_homology, homology_Z

import helpers as hp

C2 = GroupSpec.cyclic(2)
A2 = GroupSpec.free_abelian(2)
F1 = GroupSpec.free(1)


def gen(g, i=0):
    return g.normalize([(i, 1)])


# -- Fox calculus ----------------------------------------------------------------


def test_fox_boundary_rp2_over_cyclic():
    K = Presentation(1, ((1, 1),), C2, (gen(C2),))
    C = fox_boundary(K)
    assert C.ranks == (1, 1, 1)
    assert C.d(2)[0, 0] == parse_elem(C2, "1 + x1")
    assert C.d(1)[0, 0] == parse_elem(C2, "x1 - 1")


def test_fox_boundary_rp2_trivial():
    C = fox_boundary(Presentation(1, ((1, 1),)))
    assert C.d(2).to_ints() == [[2]] and C.d(1).to_ints() == [[0]]


def test_fox_boundary_torus_abelian():
    K = Presentation(2, ((1, 2, -1, -2),), A2, (gen(A2, 0), gen(A2, 1)))
    C = fox_boundary(K)
    assert C.d(2)[0, 0] == parse_elem(A2, "1 - x2")
    assert C.d(2)[1, 0] == parse_elem(A2, "x1 - 1")


def test_relator_must_map_to_identity():
    with pytest.raises(PresentationError):
        Presentation(1, ((1,),), C2, (gen(C2),))
    with pytest.raises(PresentationError):
        Presentation(1, ((2,),))


PIS = [GroupSpec.trivial(), C2, GroupSpec.cyclic(3), A2, GroupSpec.free(2)]


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(PIS))
def test_fox_matches_letterwise_oracle(seed, pi):
    rng = random.Random(seed)
    K = hp.random_presentation(rng, pi)
    C = fox_boundary(K)
    C.validate()
    for r, rel in enumerate(K.relators):
        for j in range(K.free_rank):
            assert C.d(2)[j, r] == hp.fox_letterwise(pi, K.pi_map, rel, j)
    for j in range(K.free_rank):
        assert C.d(1)[0, j] == Elem.from_word(pi, K.pi_map[j]) - Elem.one(pi)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(PIS))
def test_fox_fundamental_formula(seed, pi):
    # sum_j dw/dx_j (x_j - 1) = w - 1 in Z[pi]
    rng = random.Random(seed)
    K = hp.random_presentation(rng, pi, max_rels=0)
    w = hp.random_word(rng, K.free_rank, 10)
    total = Elem.zero(pi)
    for j, dj in enumerate(K.fox(w)):
        total = total + dj * (Elem.from_word(pi, K.pi_map[j]) - Elem.one(pi))
    assert total == K.pi_elem(w) - Elem.one(pi)


# -- moves ------------------------------------------------------------------------


RP2 = Presentation(1, ((1, 1),))


def test_expand_example():
    K = apply_move(RP2, Expand((1,), "g"))
    assert K.free_rank == 2 and K.relators == ((1, 1), (2, 1))
    assert K.names == ("x1", "g")


def test_invert_and_conjugate_examples():
    assert apply_move(RP2, InvertRelator(0)).relators == ((-1, -1),)
    K = apply_move(RP2, ConjugateRelator(0, (1,)))
    assert K.same_as(RP2)


def test_homological_change_examples():
    K = Presentation(2, ((1, 1),))
    assert verify_homological_change(K, 0, (2, 1, 1, -2))
    assert verify_homological_change(K, 0, (1, 1, 2, 2, -2, -2))
    assert verify_homological_change(K, 0, (1, 1, 1, 2, -1, -2))
    free = Presentation(1, (), F1, (gen(F1),))
    assert free.fox((1, 1)) != free.fox((1, 1, 1))


def test_illegal_moves_rejected():
    with pytest.raises(MoveError):
        apply_move(RP2, InvertRelator(3))
    with pytest.raises(MoveError):
        apply_move(RP2, Collapse(0, 0))
    with pytest.raises(MoveError):
        apply_move(Presentation(2, ((1, 1),)), HomologicalChange(0, (1, 1, 1)))
    with pytest.raises(MoveError):
        apply_move(RP2, MultiplyRelator(0, 0))
    with pytest.raises(MoveError):
        apply_move(RP2, PermuteRelators((1, 0)))


def test_collapse_undoes_expand():
    K = apply_move(RP2, Expand((-1, -1), "g"))
    assert apply_move(K, Collapse(1, 1)).same_as(RP2)


def random_move(rng, K):
    n, m = K.free_rank, K.num_relators
    w = hp.random_word(rng, n, 3)
    kinds = ["expand", "pair"]
    if m:
        kinds += ["invert", "conj"]
    if m >= 2:
        kinds += ["mult", "permr"]
    if n >= 2:
        kinds += ["slide", "permg"]
    k = rng.choice(kinds)
    if k == "expand":
        return Expand(w, None, rng.randint(0, n), rng.randint(0, m))
    if k == "pair":
        return StabilizePair()
    if k == "invert":
        return InvertRelator(rng.randrange(m))
    if k == "conj":
        return ConjugateRelator(rng.randrange(m), w)
    if k == "mult":
        i, j = rng.sample(range(m), 2)
        return MultiplyRelator(i, j, rng.choice([1, -1]), w)
    if k == "permr":
        p = list(range(m))
        rng.shuffle(p)
        return PermuteRelators(tuple(p))
    if k == "slide":
        i, j = rng.sample(range(n), 2)
        return SlideGenerator(i, j, rng.choice([1, -1]))
    p = list(range(n))
    rng.shuffle(p)
    return PermuteGenerators(tuple(p))


def random_sequence(rng, K, count):
    moves = []
    for _ in range(count):
        mv = random_move(rng, K)
        moves.append(mv)
        K = apply_move(K, mv)
    return moves


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(PIS[:4]))
def test_moves_preserve_homology_and_invert(seed, pi):
    rng = random.Random(seed)
    K = hp.random_presentation(rng, pi)
    for _ in range(6):
        m = random_move(rng, K)
        K2 = apply_move(K, m)
        assert homology_Z(fox_boundary(K2), augment=True) == homology_Z(fox_boundary(K), augment=True)
        assert apply_move(K2, inverse_move(K, m)).reduced().same_as(K.reduced())
        K = K2


def test_empty_sequence_is_identity():
    K = Presentation(2, ((1, 1), (2, 2, 2)))
    real = moves_to_chain_equiv(MoveSequence(K, ()))
    assert real.map.same_as(ChainMap.identity(fox_boundary(K)))
    assert len(real.witness) == 0


def test_single_expand_is_a_stabilization():
    real = moves_to_chain_equiv(MoveSequence(RP2, (StabilizePair(),)))
    assert len(real.witness) == 1
    assert real.final.free_rank == 2


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([2, 3, 4]))
def test_random_sequences_give_equivalences(seed, order):
    rng = random.Random(seed)
    pi = GroupSpec.cyclic(order)
    K = Presentation(2, ((1,) * order, (2,) * order), pi, (gen(pi), pi.identity()))
    seq = MoveSequence(K, tuple(random_sequence(rng, K, 10)))
    real = moves_to_chain_equiv(seq)
    real.equivalence.verify()
    assert real.equivalence.forward.target.same_as(fox_boundary(seq.final()))
    assert real.witness.replay(fox_boundary(K)).same_as(fox_boundary(seq.final()))
    back = moves_to_chain_equiv(seq.inverse())
    assert back.final.reduced().same_as(K.reduced())


# -- synthesis --------------------------------------------------------------------


def test_synthesis_identity():
    K = Presentation(2, ((1, 1), (1, 2, -1, -2)))
    s = synthesize_moves_from_equiv(K, K, ChainMap.identity(fox_boundary(K)))
    assert s.sequence.final().same_as(K)
    s.homotopy.verify()


def test_synthesis_single_inversion():
    L = apply_move(RP2, InvertRelator(0))
    e = moves_to_chain_equiv(MoveSequence(RP2, (InvertRelator(0),))).map
    s = synthesize_moves_from_equiv(RP2, L, e)
    assert s.sequence.final().same_as(L)
    s.homotopy.verify()


def test_synthesis_between_different_presentations():
    K = Presentation(2, ((1, 1), (2,)))
    L = Presentation(1, ((1, 1, 1, 1, 1, 1, 1, 1, 1, -1, -1, -1, -1, -1, -1, -1),))
    e = equivalence_from_homology(fox_boundary(K), fox_boundary(L)).forward
    s = synthesize_moves_from_equiv(K, L, e)
    assert s.sequence.final().same_as(L)
    s.homotopy.verify()


def test_synthesis_errors():
    pi = C2
    K = Presentation(1, ((1, 1),), pi, (gen(pi),))
    with pytest.raises(UnsupportedError):
        synthesize_moves_from_equiv(K, K, ChainMap.identity(fox_boundary(K)))
    with pytest.raises(PreconditionError):
        synthesize_moves_from_equiv(RP2, RP2, ChainMap.zero(fox_boundary(RP2), fox_boundary(RP2)))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_synthesis_replays_random_sequences(seed):
    rng = random.Random(seed)
    K = hp.random_presentation(rng, max_gens=2, max_rels=2)
    moves = random_sequence(rng, K, 6)
    seq = MoveSequence(K, tuple(moves))
    L = seq.final()
    e = moves_to_chain_equiv(seq).map
    s = synthesize_moves_from_equiv(K, L, e)
    assert s.sequence.final().same_as(L)
    for st_ in s.sequence.states():
        assert homology_Z(fox_boundary(st_)) == homology_Z(fox_boundary(K))


def test_reduce_letters():
    assert reduce_letters((1, 2, -2, -1, 3)) == (3,)
