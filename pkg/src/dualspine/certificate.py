"""Certificate bundles: JSON records of inputs and every produced matrix.

A bundle is verified by decoding it, checking the stored objects' identities
directly, and recomputing the outputs from the stored inputs for exact
comparison.  Any disagreement makes the bundle invalid.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import formats as fm
from .align import align_deg0, align_deg1, realize_decomposition, split_summand
from .chain import ChainMap, dualize_map, mapping_cone
from .complex2 import moves_to_chain_equiv, synthesize_moves_from_equiv
from .duality import (DualityDatum, build_duality_datum_S4, s4_model, verify_simple_algebraic_duality)
from .errors import DualSpineError, ParseError, VerificationError
from .homology import homology_Z, reduce_to_dim2

FORMAT = "dualspine-certificate"
VERSION = "1.0.0"


# -- producers: inputs -> outputs (both JSON) -----------------------------------


def _map_in(obj) -> ChainMap:
    S, T = fm.complex_from_json(obj["source"]), fm.complex_from_json(obj["target"])
    return fm.map_from_json(S, T, obj["components"])


def map_json(f: ChainMap) -> dict:
    return {"source": fm.complex_to_json(f.source), "target": fm.complex_to_json(f.target),
            "components": fm.map_to_json(f)}


def _pair_out(p) -> dict:
    return {"source": fm.complex_to_json(p.source), "target": fm.complex_to_json(p.target),
            "f_prime": fm.map_to_json(p.f_prime),
            "into_source": fm.map_to_json(p.into_source), "into_target": fm.map_to_json(p.into_target),
            "source_witness": fm.witness_to_json(p.source_witness),
            "target_witness": fm.witness_to_json(p.target_witness),
            "square_homotopy": fm.homotopy_to_json(p.square_homotopy)}


def _produce_moves(inp):
    seq = fm.parse_move_script(inp["script"])
    r = moves_to_chain_equiv(seq)
    return {"initial": fm.complex_to_json(r.equivalence.source), "final": fm.complex_to_json(r.equivalence.target),
            "final_presentation": fm.format_presentation(r.final),
            "witness": fm.witness_to_json(r.witness), "equivalence": fm.equivalence_to_json(r.equivalence)}


def _produce_synthesis(inp):
    K, L = fm.parse_presentation(inp["source"]), fm.parse_presentation(inp["target"])
    f = _map_in(inp["map"])
    s = synthesize_moves_from_equiv(K, L, f)
    return {"script": fm.format_move_script(s.sequence),
            "realized": fm.map_to_json(s.realization.map),
            "homotopy": fm.homotopy_to_json(s.homotopy)}


def _produce_align(fn):
    def run(inp):
        return _pair_out(fn(_map_in(inp["map"])))
    return run


def _produce_align_both(inp):
    f = _map_in(inp["map"])
    out = {}
    if not f[0].is_identity():
        p0 = align_deg0(f)
        out["stage0"] = _pair_out(p0)
        f = p0.f_prime
    out["stage1"] = _pair_out(align_deg1(f))
    return out


def _produce_split(inp):
    r = split_summand(_map_in(inp["map"]))
    return {"complex": fm.complex_to_json(r.complex), "f_split": fm.map_to_json(r.f_split),
            "f_stabilized": fm.map_to_json(r.f_stabilized), "homotopy": fm.homotopy_to_json(r.homotopy),
            "witness": fm.witness_to_json(r.witness)}


def _produce_reduce(inp):
    r = reduce_to_dim2(fm.complex_from_json(inp["complex"]))
    return {"complex": fm.complex_to_json(r.complex), "witness": fm.witness_to_json(r.witness),
            "equivalence": fm.equivalence_to_json(r.equivalence)}


def _datum_out(d: DualityDatum) -> dict:
    rep = verify_simple_algebraic_duality(d)
    return {"K": fm.complex_to_json(d.K_map.source), "L": fm.complex_to_json(d.L_map.source),
            "K_map": fm.map_to_json(d.K_map), "L_map": fm.map_to_json(d.L_map),
            "nullhomotopy": fm.homotopy_to_json(d.nullhomotopy),
            "relative": fm.complex_to_json(rep.relative), "lift": fm.map_to_json(rep.lift)}


def _load_space(obj):
    if isinstance(obj, str):
        return fm.parse_presentation(obj)
    return fm.complex_from_json(obj)


def _produce_duality(inp):
    return _datum_out(build_duality_datum_S4(_load_space(inp["K"]), _load_space(inp["L"])))


def _produce_realize(inp):
    D = fm.complex_from_json(inp["D"])
    f = fm.map_from_json(D, s4_model().chains, inp["f"])
    r = realize_decomposition(D, s4_model(), f)
    out = {"reduced": fm.complex_to_json(r.reduction.complex),
           "M": fm.complex_to_json(r.M_chains), "N_prime": fm.complex_to_json(r.N_prime),
           "M_map": fm.map_to_json(r.M_map), "N_map": fm.map_to_json(r.N_map),
           "D_to_M": fm.map_to_json(r.D_to_M), "homotopy": fm.homotopy_to_json(r.homotopy),
           "W": fm.complex_to_json(r.W_chains), "W_reduced": fm.complex_to_json(r.W_reduced),
           "stage1": _pair_out(r.stage1), "split_witness": fm.witness_to_json(r.split.witness)}
    if r.stage0 is not None:
        out["stage0"] = _pair_out(r.stage0)
    if r.datum is not None:
        out["duality"] = _datum_out(r.datum)
    return out


PRODUCERS = {
    "moves": _produce_moves,
    "synthesis": _produce_synthesis,
    "align0": _produce_align(align_deg0),
    "align1": _produce_align(align_deg1),
    "align": _produce_align_both,
    "split": _produce_split,
    "reduce2": _produce_reduce,
    "duality": _produce_duality,
    "realize": _produce_realize,
}


# -- direct checks on the stored objects -----------------------------------------


def _check_datum(out):
    K, L = fm.complex_from_json(out["K"]), fm.complex_from_json(out["L"])
    P = s4_model()
    N = P.chains
    Km, Lm = fm.map_from_json(K, N, out["K_map"]), fm.map_from_json(L, N, out["L_map"])
    phi = dualize_map(Lm, 4) @ P.duality_map @ Km
    H = fm.homotopy_from_json(phi, ChainMap.zero(phi.source, phi.target), out["nullhomotopy"])
    rep = verify_simple_algebraic_duality(DualityDatum(Km, Lm, H, P), L)
    F = fm.complex_from_json(out["relative"])
    lift = fm.map_from_json(K, F, out["lift"])
    if not lift.same_as(rep.lift):
        raise VerificationError("stored lift differs from the lift of the nullhomotopy")
    if not homology_Z(mapping_cone(lift)).is_zero():
        raise VerificationError("stored lift is not a homology equivalence")


def _check_moves(inp, out):
    S, T = fm.complex_from_json(out["initial"]), fm.complex_from_json(out["final"])
    E = fm.equivalence_from_json(S, T, out["equivalence"])
    E.verify()
    w = fm.witness_from_json(S.group, out["witness"])
    if not w.replay(S).same_as(T):
        raise VerificationError("witness does not replay to the final chains")


def _check_pair(f, out) -> ChainMap:
    C1, D1 = fm.complex_from_json(out["source"]), fm.complex_from_json(out["target"])
    fp = fm.map_from_json(C1, D1, out["f_prime"])
    ic = fm.map_from_json(f.source, C1, out["into_source"])
    idd = fm.map_from_json(f.target, D1, out["into_target"])
    for m in (fp, ic, idd):
        m.verify()
    h = fm.homotopy_from_json(idd @ f, fp @ ic, out["square_homotopy"])
    h.verify()
    for key, X, Y in (("source_witness", f.source, C1), ("target_witness", f.target, D1)):
        if not fm.witness_from_json(X.group, out[key]).replay(X).same_as(Y):
            raise VerificationError(f"{key} does not replay")
    return fp


def _check_align_both(inp, out):
    f = _map_in(inp["map"])
    if "stage0" in out:
        f = _check_pair(f, out["stage0"])
    _check_pair(f, out["stage1"])


def _check_synthesis(inp, out):
    f = _map_in(inp["map"])
    seq = fm.parse_move_script(out["script"])
    if not seq.final().same_as(fm.parse_presentation(inp["target"])):
        raise VerificationError("move script does not end at the target presentation")
    g = fm.map_from_json(f.source, f.target, out["realized"])
    fm.homotopy_from_json(f, g, out["homotopy"]).verify()


def _check_split(inp, out):
    f = _map_in(inp["map"])
    C2 = fm.complex_from_json(out["complex"])
    fs = fm.map_from_json(f.source, C2, out["f_split"])
    fst = fm.map_from_json(f.source, C2, out["f_stabilized"])
    fm.homotopy_from_json(fst, fs, out["homotopy"]).verify()
    if not fm.witness_from_json(C2.group, out["witness"]).replay(f.target).same_as(C2):
        raise VerificationError("witness does not replay")


def _check_reduce(inp, out):
    C = fm.complex_from_json(inp["complex"])
    T = fm.complex_from_json(out["complex"])
    fm.equivalence_from_json(C, T, out["equivalence"]).verify()


def _check_realize(inp, out):
    M, Np = fm.complex_from_json(out["M"]), fm.complex_from_json(out["N_prime"])
    D = fm.complex_from_json(inp["D"])
    N = s4_model().chains
    f = fm.map_from_json(D, N, inp["f"])
    Mm = fm.map_from_json(M, Np, out["M_map"])
    Nm = fm.map_from_json(N, Np, out["N_map"])
    DM = fm.map_from_json(D, M, out["D_to_M"])
    fm.homotopy_from_json(Nm @ f, Mm @ DM, out["homotopy"]).verify()
    if "duality" in out:
        _check_datum(out["duality"])


CHECKS = {
    "moves": _check_moves,
    "synthesis": _check_synthesis,
    "align0": lambda i, o: _check_pair(_map_in(i["map"]), o),
    "align1": lambda i, o: _check_pair(_map_in(i["map"]), o),
    "align": _check_align_both,
    "split": _check_split,
    "reduce2": _check_reduce,
    "duality": lambda i, o: _check_datum(o),
    "realize": _check_realize,
}


# -- bundles ----------------------------------------------------------------------


def make_certificate(kind: str, inputs: dict) -> dict:
    if kind not in PRODUCERS:
        raise ValueError(f"unknown certificate kind {kind!r}")
    return {"format": FORMAT, "version": VERSION, "kind": kind, "inputs": inputs,
            "outputs": PRODUCERS[kind](inputs)}


def dumps(bundle: dict) -> str:
    return json.dumps(bundle, indent=1, sort_keys=True) + "\n"


def loads(text: str) -> dict:
    try:
        b = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"not JSON: {e.msg}", line=e.lineno, column=e.colno) from None
    if not isinstance(b, dict) or b.get("format") != FORMAT:
        raise ParseError("not a certificate bundle")
    if b.get("kind") not in PRODUCERS:
        raise ParseError(f"unknown certificate kind {b.get('kind')!r}")
    for key in ("inputs", "outputs"):
        if not isinstance(b.get(key), dict):
            raise ParseError(f"bundle has no '{key}' object")
    return b


def _first_difference(a, b, path="outputs"):
    if type(a) is not type(b):
        return path
    if isinstance(a, dict):
        for k in sorted(set(a) | set(b)):
            if k not in a or k not in b:
                return f"{path}.{k}"
            d = _first_difference(a[k], b[k], f"{path}.{k}")
            if d:
                return d
        return None
    if isinstance(a, list):
        if len(a) != len(b):
            return path
        for i, (x, y) in enumerate(zip(a, b)):
            d = _first_difference(x, y, f"{path}[{i}]")
            if d:
                return d
        return None
    return None if a == b else path


@dataclass(frozen=True)
class BundleReport:
    ok: bool
    kind: str
    message: str


def verify_certificate(bundle: dict) -> BundleReport:
    kind = bundle["kind"]
    if bundle.get("version") != VERSION:
        return BundleReport(False, kind, f"unsupported certificate version {bundle.get('version')!r}")
    try:
        CHECKS[kind](bundle["inputs"], bundle["outputs"])
        fresh = PRODUCERS[kind](bundle["inputs"])
    except (DualSpineError, KeyError, TypeError, ValueError, IndexError) as e:
        return BundleReport(False, kind, f"{type(e).__name__}: {e}")
    where = _first_difference(bundle["outputs"], fresh)
    if where:
        return BundleReport(False, kind, f"recomputed outputs differ at {where}")
    return BundleReport(True, kind, "ok")
