"""Command-line front end.

Exit codes: 0 success or property true, 1 property false (or undecided), 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import certificate as cert
from . import formats as fm
from .align import align_deg0, align_deg1, realize_decomposition, split_summand
from .chain import BasedComplex
from .complex2 import fox_boundary, moves_to_chain_equiv, synthesize_moves_from_equiv
from .duality import (basepoint_map, build_duality_datum_S4, canonical_dual_spine, check_dual_homology_S4,
                      s4_model, verify_simple_algebraic_duality)
from .errors import (DualSpineError, GroupMismatchError, MoveError, ParseError, PreconditionError,
                     PresentationError, ShapeError, UnsupportedError, VerificationError)
from .homology import equivalence_from_homology, homology_Z, reduce_to_dim2
from .snf import snf

FORMAT_VERSION = cert.VERSION
VERBS = ("validate", "homology", "snf", "fox", "moves-apply", "moves-verify", "moves-synthesize", "align",
         "reduce2", "split", "realize", "check-dual", "make-dual", "verify-duality")

OK, FALSE, INVALID = 0, 1, 2


class Outcome(Exception):
    def __init__(self, code: int, message: str = ""):
        super().__init__(message)
        self.code = code


# -- input handling -----------------------------------------------------------


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise Outcome(INVALID, f"{path}: {e.strerror}") from None


def sniff(text: str) -> str:
    s = text.lstrip()
    if s.startswith("{"):
        return "certificate"
    for _, line in fm._lines(text):
        if line.startswith("format:"):
            v = line.split(":", 1)[1].strip()
            return {"chain-complex 1": "complex", "chain-map 1": "chain-map", "presentation 1": "presentation",
                    "moves 1": "moves"}.get(v, "unknown")
        break
    if "[moves]" in text or "[presentation]" in text:
        return "moves"
    if "[source]" in text:
        return "chain-map"
    if "ranks:" in text:
        return "complex"
    if "gens:" in text:
        return "presentation"
    return "unknown"


def load(path: str):
    text = _read(path)
    kind = sniff(text)
    if kind == "complex":
        return kind, fm.parse_complex(text)
    if kind == "presentation":
        return kind, fm.parse_presentation(text)
    if kind == "chain-map":
        return kind, fm.parse_chain_map(text)
    if kind == "moves":
        return kind, fm.parse_move_script(text)
    if kind == "certificate":
        return kind, cert.loads(text)
    raise ParseError("cannot tell what kind of file this is", line=1)


def _expect(path: str, *kinds):
    kind, obj = load(path)
    if kind not in kinds:
        raise Outcome(INVALID, f"{path}: expected {' or '.join(kinds)}, got {kind}")
    return kind, obj


def _chains(path: str) -> BasedComplex:
    kind, obj = _expect(path, "complex", "presentation")
    return fox_boundary(obj) if kind == "presentation" else obj


def _emit(args, kind: str, inputs: dict, out) -> None:
    if args.emit_certificate:
        bundle = cert.make_certificate(kind, inputs)
        Path(args.emit_certificate).write_text(cert.dumps(bundle), encoding="utf-8")
        print(f"certificate: {args.emit_certificate}", file=out)


# -- verbs --------------------------------------------------------------------


def _one_validate(path):
    kind, obj = load(path)
    if kind == "certificate":
        return OK, f"{path}: well-formed certificate ({obj['kind']})"
    return OK, f"{path}: valid {kind}"


def _one_homology(path, augment=False):
    C = _chains(path)
    h = homology_Z(C, augment=augment)
    return OK, h.format(upto=max(C.top, h.top))


def _one_verify(path, need_duality=False):
    kind, obj = _expect(path, "certificate", "moves")
    if kind == "moves":
        r = moves_to_chain_equiv(obj)
        return OK, f"{path}: ok ({len(obj.moves)} moves, {len(r.witness)} based moves)"
    if need_duality and not (obj["kind"] == "duality" or "duality" in obj["outputs"]):
        raise Outcome(INVALID, f"{path}: certificate carries no duality datum")
    rep = cert.verify_certificate(obj)
    return (OK if rep.ok else FALSE), f"{path}: {rep.kind}: {rep.message}"


def _guarded(fn, *a):
    try:
        return fn(*a)
    except Outcome as e:
        return e.code, str(e)
    except DualSpineError as e:
        return _code_for(e), f"error: {e}"


def _batch(args, fn, paths, *extra, out):
    jobs = max(1, getattr(args, "jobs", 1) or 1)
    calls = [(fn, p) + extra for p in paths]
    if jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_guarded, *zip(*calls)))
    else:
        results = [_guarded(*c) for c in calls]
    code = OK
    for c, msg in results:
        print(msg, file=out)
        code = max(code, c)
    return code


def cmd_validate(args, out):
    return _batch(args, _one_validate, args.files, out=out)


def cmd_homology(args, out):
    return _batch(args, _one_homology, args.files, args.augment, out=out)


def cmd_snf(args, out):
    text = args.matrix
    p = Path(text)
    if p.exists():
        text = _read(text).strip()
    rows = [r for r in text.replace("\n", ";").split(";") if r.strip()]
    try:
        M = [[int(x) for x in r.replace(" ", "").split(",")] for r in rows]
    except ValueError:
        raise ParseError("snf takes an integer matrix written as '2,4;6,8'") from None
    if len({len(r) for r in M}) > 1:
        raise ParseError("rows have different lengths")
    r = snf(M)
    print("divisors: " + ", ".join(str(d) for d in r.divisors), file=out)
    print(f"rank: {r.rank}", file=out)
    return OK


def cmd_fox(args, out):
    _, K = _expect(args.file, "presentation")
    out.write(fm.format_complex(fox_boundary(K)))
    return OK


def cmd_moves_apply(args, out):
    _, seq = _expect(args.file, "moves")
    r = moves_to_chain_equiv(seq)
    out.write(fm.format_presentation(r.final))
    _emit(args, "moves", {"script": fm.format_move_script(seq)}, out)
    return OK


def cmd_moves_verify(args, out):
    return _batch(args, _one_verify, args.files, False, out=out)


def cmd_moves_synthesize(args, out):
    _, K = _expect(args.source, "presentation")
    _, L = _expect(args.target, "presentation")
    E = equivalence_from_homology(fox_boundary(K), fox_boundary(L))
    s = synthesize_moves_from_equiv(K, L, E)
    out.write(fm.format_move_script(s.sequence))
    _emit(args, "synthesis", {"source": fm.format_presentation(K), "target": fm.format_presentation(L),
                              "map": cert.map_json(E.forward)}, out)
    return OK


def _pair_summary(tag, p, out):
    print(f"{tag}: C' ranks {list(p.source.trimmed().ranks)}, D' ranks {list(p.target.trimmed().ranks)}, "
          f"witness moves {len(p.source_witness)} + {len(p.target_witness)}", file=out)


def cmd_align(args, out):
    _, f = _expect(args.file, "chain-map")
    stage = args.stage
    if stage == "0":
        p = align_deg0(f)
        _pair_summary("degree 0", p, out)
    elif stage == "1":
        p = align_deg1(f)
        _pair_summary("degree 1", p, out)
    else:
        g = f
        if not f[0].is_identity():
            p = align_deg0(f)
            _pair_summary("degree 0", p, out)
            g = p.f_prime
        p = align_deg1(g)
        _pair_summary("degree 1", p, out)
    out.write(fm.format_chain_map(p.f_prime))
    kind = {"0": "align0", "1": "align1", "both": "align"}[stage]
    _emit(args, kind, {"map": cert.map_json(f)}, out)
    return OK


def cmd_reduce2(args, out):
    C = _chains(args.file)
    r = reduce_to_dim2(C)
    out.write(fm.format_complex(r.complex))
    _emit(args, "reduce2", {"complex": fm.complex_to_json(C)}, out)
    return OK


def cmd_split(args, out):
    _, f = _expect(args.file, "chain-map")
    r = split_summand(f)
    out.write(fm.format_chain_map(r.f_split))
    _emit(args, "split", {"map": cert.map_json(f)}, out)
    return OK


def cmd_realize(args, out):
    D = _chains(args.file)
    P = s4_model()
    f = basepoint_map(D, P.chains)
    r = realize_decomposition(D, P, f)
    hM, hW = homology_Z(r.M_chains), homology_Z(r.W_reduced)
    print(f"reduced D ranks: {list(r.reduction.complex.ranks)}", file=out)
    if r.stage0 is not None:
        _pair_summary("degree 0", r.stage0, out)
    _pair_summary("degree 1", r.stage1, out)
    print(f"split: N' ranks {list(r.N_prime.ranks)}, witness moves {len(r.split.witness)}", file=out)
    print(f"M: ranks {list(r.M_chains.ranks)}; {hM.format(upto=2)}", file=out)
    print(f"W: ranks {list(r.W_reduced.ranks)}; {hW.format(upto=2)}", file=out)
    dual = check_dual_homology_S4(hM, hW)
    print(f"dual homology: {'yes' if dual else 'no'}", file=out)
    if r.datum is not None:
        verify_simple_algebraic_duality(r.datum)
        print("simple algebraic duality: verified", file=out)
    _emit(args, "realize", {"D": fm.complex_to_json(D), "f": fm.map_to_json(f)}, out)
    return OK if dual else FALSE


def _space_input(path):
    kind, obj = _expect(path, "complex", "presentation")
    hs = homology_Z(fox_boundary(obj) if kind == "presentation" else obj)
    enc = fm.format_presentation(obj) if kind == "presentation" else fm.complex_to_json(obj)
    return obj, hs, enc


def cmd_check_dual(args, out):
    _, hK, _ = _space_input(args.first)
    _, hL, _ = _space_input(args.second)
    ok = check_dual_homology_S4(hK, hL)
    print("dual" if ok else "not dual", file=out)
    return OK if ok else FALSE


def cmd_make_dual(args, out):
    K, hK, enc = _space_input(args.file)
    L = canonical_dual_spine(hK)
    out.write(fm.format_presentation(L))
    _emit(args, "duality", {"K": enc, "L": fm.format_presentation(L)}, out)
    return OK


def cmd_verify_duality(args, out):
    if args.second is None:
        return _batch(args, _one_verify, [args.first], True, out=out)
    K, hK, ek = _space_input(args.first)
    L, hL, el = _space_input(args.second)
    if not check_dual_homology_S4(hK, hL):
        print("not dual: no duality datum exists", file=out)
        return FALSE
    d = build_duality_datum_S4(K, L)
    verify_simple_algebraic_duality(d)
    print("simple algebraic duality: verified", file=out)
    _emit(args, "duality", {"K": ek, "L": el}, out)
    return OK


COMMANDS = {
    "validate": cmd_validate, "homology": cmd_homology, "snf": cmd_snf, "fox": cmd_fox,
    "moves-apply": cmd_moves_apply, "moves-verify": cmd_moves_verify, "moves-synthesize": cmd_moves_synthesize,
    "align": cmd_align, "reduce2": cmd_reduce2, "split": cmd_split, "realize": cmd_realize,
    "check-dual": cmd_check_dual, "make-dual": cmd_make_dual, "verify-duality": cmd_verify_duality,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dualspine", description="Exact chain-level tools for 2-complexes and dual spines.")
    p.add_argument("--version", action="version", version=FORMAT_VERSION)
    sub = p.add_subparsers(dest="verb", required=True, metavar="VERB")

    def verb(name, help, cert_ok=False, jobs=False):
        sp = sub.add_parser(name, help=help)
        if cert_ok:
            sp.add_argument("--emit-certificate", metavar="PATH", help="write the witness bundle as JSON")
        if jobs:
            sp.add_argument("--jobs", type=int, default=1, metavar="N", help="verify inputs in parallel")
        return sp

    verb("validate", "parse and check input files", jobs=True).add_argument("files", nargs="+")
    sp = verb("homology", "integer homology of a complex or presentation", jobs=True)
    sp.add_argument("files", nargs="+")
    sp.add_argument("--augment", action="store_true", help="augment a group-ring complex to Z first")
    verb("snf", "Smith normal form of an integer matrix").add_argument(
        "matrix", help="inline matrix such as '2,4;6,8', or a file holding one")
    verb("fox", "cellular chains of a presentation").add_argument("file")
    verb("moves-apply", "apply a move script", cert_ok=True).add_argument("file")
    verb("moves-verify", "verify move scripts or certificate bundles", jobs=True).add_argument("files", nargs="+")
    sp = verb("moves-synthesize", "moves between presentations with equal chain homology", cert_ok=True)
    sp.add_argument("source")
    sp.add_argument("target")
    sp = verb("align", "align the low skeleta of a chain map", cert_ok=True)
    sp.add_argument("file")
    sp.add_argument("--stage", choices=("0", "1", "both"), default="both")
    verb("reduce2", "cancel everything above degree two", cert_ok=True).add_argument("file")
    verb("split", "make degree 2 of the source a based summand", cert_ok=True).add_argument("file")
    verb("realize", "chain-level decomposition of the S^4 model", cert_ok=True).add_argument("file")
    sp = verb("check-dual", "dual-homology criterion for spines in S^4")
    sp.add_argument("first")
    sp.add_argument("second")
    verb("make-dual", "canonical dual spine", cert_ok=True).add_argument("file")
    sp = verb("verify-duality", "verify a duality bundle, or build and verify one for two spines", cert_ok=True,
              jobs=True)
    sp.add_argument("first")
    sp.add_argument("second", nargs="?")
    return p


def _code_for(e: Exception) -> int:
    if isinstance(e, (ParseError, ShapeError, GroupMismatchError, PresentationError)):
        return INVALID
    return FALSE


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return INVALID if e.code not in (0, None) else OK
    try:
        return COMMANDS[args.verb](args, out)
    except Outcome as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except UnsupportedError as e:
        print(f"undecided: {e}", file=sys.stderr)
        return FALSE
    except (PreconditionError, VerificationError, MoveError) as e:
        print(f"error: {e}", file=sys.stderr)
        return FALSE
    except DualSpineError as e:
        print(f"error: {e}", file=sys.stderr)
        return _code_for(e)
    except json.JSONDecodeError as e:
        print(f"error: {e}", file=sys.stderr)
        return INVALID


if __name__ == "__main__":
    sys.exit(main())
