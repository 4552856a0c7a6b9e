"""Exact chain-level algebra for 2-complexes, skeleton alignment and dual spines in S^4."""

from .align import (AlignedPair, AlignmentWitness, DecompositionResult, SplitResult, align_deg0, align_deg1,
                    realize_decomposition, split_summand)
from .chain import (BasedComplex, ChainHomotopy, ChainMap, Equivalence, direct_sum, dualize, dualize_map,
                    lift_from_nullhomotopy, mapping_cone)
from .complex2 import (MoveSequence, Presentation, fox_boundary, moves_to_chain_equiv,
                       synthesize_moves_from_equiv)
from .duality import (DualityDatum, PoincareComplex, build_duality_datum_S4, canonical_dual_spine,
                      check_dual_homology_S4, s4_model, verify_simple_algebraic_duality)
from .errors import (DualSpineError, GroupMismatchError, MoveError, ParseError, PreconditionError,
                     PresentationError, ShapeError, UnsupportedError, VerificationError)
from .grpring import Elem, GroupSpec
from .homology import (HomologySummary, equivalence_from_homology, homology_Z, is_homologically_2dim,
                       reduce_to_dim2, standard_form_Z)
from .matrix import Matrix
from .snf import snf
from .witness import SimpleWitness

__version__ = "0.1.0"

__all__ = [
    "AlignedPair",
    "AlignmentWitness",
    "BasedComplex",
    "ChainHomotopy",
    "ChainMap",
    "DecompositionResult",
    "DualSpineError",
    "DualityDatum",
    "Elem",
    "Equivalence",
    "GroupMismatchError",
    "GroupSpec",
    "HomologySummary",
    "Matrix",
    "MoveError",
    "MoveSequence",
    "ParseError",
    "PoincareComplex",
    "PreconditionError",
    "Presentation",
    "PresentationError",
    "ShapeError",
    "SimpleWitness",
    "SplitResult",
    "UnsupportedError",
    "VerificationError",
    "align_deg0",
    "align_deg1",
    "build_duality_datum_S4",
    "canonical_dual_spine",
    "check_dual_homology_S4",
    "direct_sum",
    "dualize",
    "dualize_map",
    "equivalence_from_homology",
    "fox_boundary",
    "homology_Z",
    "is_homologically_2dim",
    "lift_from_nullhomotopy",
    "mapping_cone",
    "moves_to_chain_equiv",
    "realize_decomposition",
    "reduce_to_dim2",
    "s4_model",
    "snf",
    "split_summand",
    "standard_form_Z",
    "synthesize_moves_from_equiv",
    "verify_simple_algebraic_duality",
]
