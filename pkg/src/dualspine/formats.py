"""Text formats for complexes, chain maps, presentations and move scripts, plus JSON encoders.

Complex file::

    format: chain-complex 1
    ring: Z/2
    ranks: 1 1 1
    d1: x1 - 1
    d2: 1 + x1

Matrix rows are separated by ``;`` and entries by ``,``.  An optional ``names:``
line renames the group generators (default ``x1 x2 ...``).

Presentation file (keys may also be joined by ``;`` on one line)::

    gens: x1 x2
    pi: Z/2
    map: x1->t, x2->1
    rels: x1^2, x1*x2*x1^-1*x2^-1, 1

The group generators of ``pi`` are called ``t`` (or ``t1 t2 ...``) unless a
``pinames:`` line says otherwise.
"""

from __future__ import annotations

import re

from . import complex2 as c2
from .chain import BasedComplex, ChainHomotopy, ChainMap, Equivalence
from .errors import DualSpineError, ParseError
from .grpring import GroupSpec, format_letters, format_word, parse_elem, parse_letters, parse_word
from .matrix import Matrix
from .witness import Destabilize, Elementary, Permute, SimpleWitness, Stabilize, UnitDiagonal

COMPLEX_HEADER = "format: chain-complex 1"
MAP_HEADER = "format: chain-map 1"
PRESENTATION_HEADER = "format: presentation 1"
MOVES_HEADER = "format: moves 1"


def _lines(text: str):
    """Yield ``(lineno, stripped)`` for non-blank, non-comment lines."""
    for n, raw in enumerate(text.splitlines(), start=1):
        s = raw.split("#", 1)[0].strip()
        if s:
            yield n, s


def _key(line: str, n: int):
    if ":" not in line:
        raise ParseError("expected 'key: value'", line=n, column=1)
    k, v = line.split(":", 1)
    return k.strip(), v.strip(), len(line) - len(line.split(":", 1)[1].lstrip()) + 1


def _reloc(e: ParseError, line: int, offset: int) -> ParseError:
    col = None if e.column is None else e.column + offset
    return ParseError(e.message, line=line, column=col)


def pi_names(g: GroupSpec) -> list:
    n = g.ngens
    return ["t"] if n == 1 else [f"t{i + 1}" for i in range(n)]


# -- matrices -----------------------------------------------------------------


def format_matrix(M: Matrix, names=None) -> str:
    if M.rows == 0 or M.cols == 0:
        return ""
    return "; ".join(", ".join(e.format(names) for e in row) for row in M.data)


def parse_matrix(g: GroupSpec, text: str, rows: int, cols: int, names=None, line=None, offset=0) -> Matrix:
    if rows == 0 or cols == 0:
        if text.strip():
            raise ParseError(f"expected an empty {rows}x{cols} matrix", line=line, column=offset + 1)
        return Matrix.zeros(g, rows, cols)
    rtexts = text.split(";")
    if len(rtexts) != rows:
        raise ParseError(f"expected {rows} rows, found {len(rtexts)}", line=line, column=offset + 1)
    data, pos = [], offset
    for rt in rtexts:
        ents = rt.split(",")
        if len(ents) != cols:
            raise ParseError(f"expected {cols} entries in a row, found {len(ents)}", line=line, column=pos + 1)
        row, p = [], pos
        for et in ents:
            lead = len(et) - len(et.lstrip())
            try:
                row.append(parse_elem(g, et.strip(), names))
            except ParseError as e:
                raise _reloc(e, line, p + lead) from None
            p += len(et) + 1
        data.append(row)
        pos += len(rt) + 1
    return Matrix(g, rows, cols, tuple(tuple(r) for r in data))


# -- complexes ----------------------------------------------------------------


def _complex_body(C: BasedComplex, names=None) -> list:
    out = [f"ring: {C.group}"]
    if names is not None:
        out.append("names: " + " ".join(names))
    out.append("ranks: " + " ".join(str(r) for r in C.ranks))
    for k in range(1, C.top + 1):
        body = format_matrix(C.d(k), names)
        out.append(f"d{k}: {body}".rstrip())
    return out


def format_complex(C: BasedComplex, names=None) -> str:
    return "\n".join([COMPLEX_HEADER] + _complex_body(C, names)) + "\n"


def _parse_complex_lines(lines) -> BasedComplex:
    fields, where = {}, {}
    for n, s in lines:
        k, v, off = _key(s, n)
        if k == "format":
            if v != "chain-complex 1":
                raise ParseError(f"unsupported format {v!r}", line=n)
            continue
        if k in fields:
            raise ParseError(f"duplicate key {k!r}", line=n)
        fields[k], where[k] = v, (n, off)
    for req in ("ring", "ranks"):
        if req not in fields:
            raise ParseError(f"missing '{req}:' line")
    try:
        g = GroupSpec.parse(fields["ring"])
    except ParseError as e:
        raise ParseError(e.message, line=where["ring"][0]) from None
    names = fields["names"].split() if "names" in fields else None
    if names is not None and len(names) != g.ngens:
        raise ParseError(f"{g} needs {g.ngens} generator names", line=where["names"][0])
    try:
        ranks = tuple(int(x) for x in fields["ranks"].split())
    except ValueError:
        raise ParseError("ranks must be integers", line=where["ranks"][0]) from None
    if not ranks or any(r < 0 for r in ranks):
        raise ParseError("ranks must be a non-empty list of non-negative integers", line=where["ranks"][0])
    mats = []
    for k in range(1, len(ranks)):
        key = f"d{k}"
        if key not in fields:
            if ranks[k] * ranks[k - 1]:
                raise ParseError(f"missing '{key}:' line")
            mats.append(Matrix.zeros(g, ranks[k - 1], ranks[k]))
            continue
        n, off = where[key]
        mats.append(parse_matrix(g, fields[key], ranks[k - 1], ranks[k], names, n, off - 1))
    extra = set(fields) - {"ring", "names", "ranks"} - {f"d{k}" for k in range(1, len(ranks))}
    if extra:
        k = sorted(extra)[0]
        raise ParseError(f"unknown key {k!r}", line=where[k][0])
    C = BasedComplex(g, ranks, tuple(mats))
    try:
        C.validate()
    except DualSpineError as e:
        raise ParseError(f"not a chain complex: {e}") from None
    return C


def parse_complex(text: str) -> BasedComplex:
    return _parse_complex_lines(list(_lines(text)))


# -- chain maps ---------------------------------------------------------------


def format_chain_map(f: ChainMap, names=None) -> str:
    out = [MAP_HEADER, "[source]"] + _complex_body(f.source, names) + ["[target]"] + _complex_body(f.target, names)
    out.append("[map]")
    for k in range(len(f.components)):
        out.append(f"f{k}: {format_matrix(f[k], names)}".rstrip())
    return "\n".join(out) + "\n"


def _sections(text: str) -> dict:
    secs: dict = {}
    cur = None
    for n, s in _lines(text):
        m = re.fullmatch(r"\[(\w+)\]", s)
        if m:
            cur = m.group(1)
            if cur in secs:
                raise ParseError(f"duplicate section [{cur}]", line=n)
            secs[cur] = []
        elif cur is None:
            secs.setdefault("", []).append((n, s))
        else:
            secs[cur].append((n, s))
    return secs


def parse_chain_map(text: str) -> ChainMap:
    secs = _sections(text)
    for n, s in secs.get("", []):
        k, v, _ = _key(s, n)
        if k != "format" or v != "chain-map 1":
            raise ParseError("expected 'format: chain-map 1' before the sections", line=n)
    for req in ("source", "target", "map"):
        if req not in secs:
            raise ParseError(f"missing section [{req}]")
    S, T = _parse_complex_lines(secs["source"]), _parse_complex_lines(secs["target"])
    if S.group != T.group:
        raise ParseError("source and target are over different rings")
    names = None
    for n, s in secs["source"]:
        if s.startswith("names:"):
            names = s.split(":", 1)[1].split()
    n_deg = max(S.top, T.top) + 1
    comps = [None] * n_deg
    for n, s in secs["map"]:
        k, v, off = _key(s, n)
        m = re.fullmatch(r"f(\d+)", k)
        if not m or int(m.group(1)) >= n_deg:
            raise ParseError(f"unexpected map key {k!r}", line=n)
        d = int(m.group(1))
        comps[d] = parse_matrix(S.group, v, T.rank(d), S.rank(d), names, n, off - 1)
    for d in range(n_deg):
        if comps[d] is None:
            comps[d] = Matrix.zeros(S.group, T.rank(d), S.rank(d))
    f = ChainMap(S, T, tuple(comps))
    try:
        f.verify()
    except DualSpineError as e:
        raise ParseError(f"not a chain map: {e}") from None
    return f


# -- presentations ------------------------------------------------------------


def _word_text(w, names) -> str:
    return format_letters([(abs(s) - 1, 1 if s > 0 else -1) for s in w], names)


def _word_parse(text: str, names) -> tuple:
    return tuple((i + 1) * e for i, e in parse_letters(text, names))


def format_presentation(K: c2.Presentation) -> str:
    out = [PRESENTATION_HEADER, ("gens: " + " ".join(K.names)).rstrip(), f"pi: {K.pi}"]
    if K.pi.kind != "trivial":
        pn = pi_names(K.pi)
        out.append("map: " + ", ".join(f"{n}->{format_word(K.pi, w, pn)}" for n, w in zip(K.names, K.pi_map)))
    out.append(("rels: " + ", ".join(_word_text(r, K.names) for r in K.relators)).rstrip())
    return "\n".join(out) + "\n"


def parse_presentation(text: str) -> c2.Presentation:
    fields, where, vcol = {}, {}, {}
    for n, s in _lines(text):
        pos = 0
        for raw in s.split(";"):
            start = pos + len(raw) - len(raw.lstrip())
            pos += len(raw) + 1
            part = raw.strip()
            if not part:
                continue
            k, v, c = _key(part, n)
            vcol[k] = start + c - 1
            if k == "format":
                if v != "presentation 1":
                    raise ParseError(f"unsupported format {v!r}", line=n)
                continue
            if k not in ("gens", "pi", "pinames", "map", "rels"):
                raise ParseError(f"unknown key {k!r}", line=n)
            if k in fields:
                raise ParseError(f"duplicate key {k!r}", line=n)
            fields[k], where[k] = v, n
    if "gens" not in fields:
        raise ParseError("missing 'gens:'")
    names = fields["gens"].replace(",", " ").split()
    try:
        pi = GroupSpec.parse(fields.get("pi", "1"))
    except ParseError as e:
        raise ParseError(e.message, line=where.get("pi")) from None
    pn = fields["pinames"].split() if "pinames" in fields else pi_names(pi)
    images = {}
    if "map" in fields and fields["map"]:
        for item in fields["map"].split(","):
            if "->" not in item:
                raise ParseError(f"expected 'gen->word' in map, got {item.strip()!r}", line=where["map"])
            a, b = (x.strip() for x in item.split("->", 1))
            if a not in names:
                raise ParseError(f"map mentions unknown generator {a!r}", line=where["map"])
            try:
                images[a] = parse_word(pi, b, pn)
            except ParseError as e:
                raise ParseError(e.message, line=where["map"]) from None
    pim = None
    if pi.kind != "trivial":
        missing = [a for a in names if a not in images]
        if missing:
            raise ParseError(f"map does not give an image for {missing[0]!r}", line=where.get("map"))
        pim = tuple(images[a] for a in names)
    rels = []
    rt = fields.get("rels", "")
    if rt:
        p = vcol["rels"]
        for item in rt.split(","):
            try:
                rels.append(_word_parse(item.strip(), names))
            except ParseError as e:
                raise _reloc(e, where["rels"], p + len(item) - len(item.lstrip())) from None
            p += len(item) + 1
    try:
        return c2.Presentation(len(names), tuple(rels), pi, pim, tuple(names))
    except DualSpineError as e:
        raise ParseError(str(e)) from None


# -- move scripts -------------------------------------------------------------


def _opt(x) -> str:
    return "-" if x is None else str(x)


def format_move(K: c2.Presentation, m) -> str:
    """One script line for ``m`` applied to ``K``.  Indices in scripts are 1-based."""
    nm = K.names
    if isinstance(m, c2.Expand):
        pos = "-" if m.gen_pos is None else m.gen_pos + 1
        rpos = "-" if m.rel_pos is None else m.rel_pos + 1
        return f"expand {_word_text(m.word, nm)} {_opt(m.name)} {pos} {rpos}"
    if isinstance(m, c2.Collapse):
        return f"collapse {nm[m.gen]} {m.rel + 1}"
    if isinstance(m, c2.StabilizePair):
        return f"stabilize-pair {_opt(m.name)}"
    if isinstance(m, c2.InvertRelator):
        return f"invert {m.index + 1}"
    if isinstance(m, c2.ConjugateRelator):
        return f"conjugate {m.index + 1} {_word_text(m.word, nm)}"
    if isinstance(m, c2.MultiplyRelator):
        sign = "+" if m.sign > 0 else "-"
        return f"multiply {m.index + 1} {m.other + 1} {sign} {_word_text(m.word, nm)}"
    if isinstance(m, c2.HomologicalChange):
        return f"homological {m.index + 1} {_word_text(m.relator, nm)}"
    if isinstance(m, c2.PermuteRelators):
        return "permute-relators " + " ".join(str(p + 1) for p in m.perm)
    if isinstance(m, c2.PermuteGenerators):
        return "permute-generators " + " ".join(str(p + 1) for p in m.perm)
    if isinstance(m, c2.SlideGenerator):
        return f"slide {nm[m.index]} {nm[m.over]} {'+' if m.sign > 0 else '-'}"
    raise TypeError(f"not a move: {m!r}")


def _int(tok: str, n: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected an integer, got {tok!r}", line=n) from None


def _idx(tok: str, n: int) -> int:
    v = _int(tok, n)
    if v < 1:
        raise ParseError("indices are 1-based", line=n)
    return v - 1


def _gen(tok: str, K, n: int) -> int:
    if tok not in K.names:
        raise ParseError(f"unknown generator {tok!r}", line=n)
    return K.names.index(tok)


def _sign_tok(tok: str, n: int) -> int:
    if tok not in ("+", "-"):
        raise ParseError(f"expected '+' or '-', got {tok!r}", line=n)
    return 1 if tok == "+" else -1


_ARITY = {"expand": 4, "collapse": 2, "stabilize-pair": 1, "invert": 1, "conjugate": 2, "multiply": 4,
          "homological": 2, "slide": 3}


def parse_move(line: str, K: c2.Presentation, n: int = None):
    toks = line.split()
    verb, args = toks[0], toks[1:]
    if verb in _ARITY and len(args) != _ARITY[verb]:
        raise ParseError(f"'{verb}' takes {_ARITY[verb]} arguments", line=n)

    def word(t):
        try:
            return _word_parse(t, K.names)
        except ParseError as e:
            raise ParseError(e.message, line=n) from None

    if verb == "expand":
        name = None if args[1] == "-" else args[1]
        gp = None if args[2] == "-" else _idx(args[2], n)
        rp = None if args[3] == "-" else _idx(args[3], n)
        return c2.Expand(word(args[0]), name, gp, rp)
    if verb == "collapse":
        return c2.Collapse(_gen(args[0], K, n), _idx(args[1], n))
    if verb == "stabilize-pair":
        return c2.StabilizePair(None if args[0] == "-" else args[0])
    if verb == "invert":
        return c2.InvertRelator(_idx(args[0], n))
    if verb == "conjugate":
        return c2.ConjugateRelator(_idx(args[0], n), word(args[1]))
    if verb == "multiply":
        return c2.MultiplyRelator(_idx(args[0], n), _idx(args[1], n), _sign_tok(args[2], n), word(args[3]))
    if verb == "homological":
        return c2.HomologicalChange(_idx(args[0], n), word(args[1]))
    if verb in ("permute-relators", "permute-generators"):
        perm = tuple(_idx(a, n) for a in args)
        return (c2.PermuteRelators if verb == "permute-relators" else c2.PermuteGenerators)(perm)
    if verb == "slide":
        return c2.SlideGenerator(_gen(args[0], K, n), _gen(args[1], K, n), _sign_tok(args[2], n))
    raise ParseError(f"unknown move {verb!r}", line=n)


def format_move_script(seq: c2.MoveSequence) -> str:
    out = [MOVES_HEADER, "[presentation]"]
    out += format_presentation(seq.initial).splitlines()[1:]
    out.append("[moves]")
    states = seq.states()
    out += [format_move(states[k], m) for k, m in enumerate(seq.moves)]
    return "\n".join(out) + "\n"


def parse_move_script(text: str) -> c2.MoveSequence:
    """Parse a script; each move is read against the presentation reached so far."""
    secs = _sections(text)
    for n, s in secs.get("", []):
        k, v, _ = _key(s, n)
        if k != "format" or v != "moves 1":
            raise ParseError("expected 'format: moves 1' before the sections", line=n)
    if "presentation" not in secs:
        raise ParseError("missing section [presentation]")
    K0 = parse_presentation("\n".join(s for _, s in secs["presentation"]))
    K, moves = K0, []
    for n, s in secs.get("moves", []):
        m = parse_move(s, K, n)
        try:
            K = c2.apply_move(K, m)
        except DualSpineError as e:
            raise c2.MoveError(f"line {n}: {e}") from e
        moves.append(m)
    return c2.MoveSequence(K0, tuple(moves))


# -- JSON encoders --------------------------------------------------------------


def matrix_to_json(M: Matrix):
    if M.group.kind == "trivial":
        return [[e.to_int() for e in row] for row in M.data] if M.rows else {"rows": 0, "cols": M.cols}
    return {"rows": M.rows, "cols": M.cols, "entries": [[e.format() for e in row] for row in M.data]}


def matrix_from_json(g: GroupSpec, obj, rows: int, cols: int) -> Matrix:
    if isinstance(obj, dict):
        ents = obj.get("entries", [])
        if obj.get("rows") != rows or obj.get("cols") != cols:
            raise ParseError(f"matrix shape {obj.get('rows')}x{obj.get('cols')} != {rows}x{cols}")
        data = [[parse_elem(g, str(x)) for x in r] for r in ents] if rows else []
    else:
        if len(obj) != rows or any(len(r) != cols for r in obj):
            raise ParseError(f"matrix is not {rows}x{cols}")
        for r in obj:
            for x in r:
                if not isinstance(x, int) or isinstance(x, bool):
                    raise ParseError(f"matrix entry {x!r} is not an integer")
        data = obj
    return Matrix.from_rows(g, data, rows, cols)


def complex_to_json(C: BasedComplex) -> dict:
    return {"ring": str(C.group), "ranks": list(C.ranks),
            "d": [matrix_to_json(C.d(k)) for k in range(1, C.top + 1)]}


def complex_from_json(obj) -> BasedComplex:
    g = GroupSpec.parse(obj["ring"])
    ranks = tuple(int(r) for r in obj["ranks"])
    if len(obj["d"]) != len(ranks) - 1:
        raise ParseError("wrong number of boundary matrices")
    mats = tuple(matrix_from_json(g, m, ranks[k], ranks[k + 1]) for k, m in enumerate(obj["d"]))
    return BasedComplex(g, ranks, mats)


def map_to_json(f: ChainMap) -> list:
    return [matrix_to_json(c) for c in f.components]


def map_from_json(S: BasedComplex, T: BasedComplex, obj) -> ChainMap:
    return ChainMap(S, T, tuple(matrix_from_json(S.group, m, T.rank(k), S.rank(k)) for k, m in enumerate(obj)))


def homotopy_to_json(h: ChainHomotopy) -> list:
    return [matrix_to_json(c) for c in h.components]


def homotopy_from_json(f: ChainMap, g: ChainMap, obj) -> ChainHomotopy:
    S, T = f.source, f.target
    return ChainHomotopy(f, g, tuple(matrix_from_json(S.group, m, T.rank(k + 1), S.rank(k))
                                     for k, m in enumerate(obj)))


def equivalence_to_json(E: Equivalence) -> dict:
    return {"forward": map_to_json(E.forward), "backward": map_to_json(E.backward),
            "left": homotopy_to_json(E.left), "right": homotopy_to_json(E.right)}


def equivalence_from_json(S: BasedComplex, T: BasedComplex, obj) -> Equivalence:
    F = map_from_json(S, T, obj["forward"])
    G = map_from_json(T, S, obj["backward"])
    left = homotopy_from_json(ChainMap.identity(S), G @ F, obj["left"])
    right = homotopy_from_json(ChainMap.identity(T), F @ G, obj["right"])
    return Equivalence(F, G, left, right)


def _scalar_json(x):
    if isinstance(x, int):
        return x
    return x.to_int() if x.group.kind == "trivial" else x.format()


def based_move_to_json(m) -> list:
    if isinstance(m, Stabilize):
        return ["stabilize", m.degree, m.lo, m.hi]
    if isinstance(m, Destabilize):
        return ["destabilize", m.degree, m.lo, m.hi]
    if isinstance(m, Elementary):
        return ["elementary", m.degree, m.i, m.j, _scalar_json(m.scalar)]
    if isinstance(m, UnitDiagonal):
        return ["unit", m.degree, m.index, _scalar_json(m.scalar)]
    if isinstance(m, Permute):
        return ["permute", m.degree, list(m.perm)]
    raise TypeError(f"not a based move: {m!r}")


def based_move_from_json(g: GroupSpec, obj):
    def sc(x):
        return x if isinstance(x, int) else parse_elem(g, str(x))

    tag = obj[0]
    if tag == "stabilize":
        return Stabilize(obj[1], obj[2], obj[3])
    if tag == "destabilize":
        return Destabilize(obj[1], obj[2], obj[3])
    if tag == "elementary":
        return Elementary(obj[1], obj[2], obj[3], sc(obj[4]))
    if tag == "unit":
        return UnitDiagonal(obj[1], obj[2], sc(obj[3]))
    if tag == "permute":
        return Permute(obj[1], tuple(obj[2]))
    raise ParseError(f"unknown based move {tag!r}")


def witness_to_json(w: SimpleWitness) -> list:
    return [based_move_to_json(m) for m in w]


def witness_from_json(g: GroupSpec, obj) -> SimpleWitness:
    return SimpleWitness(tuple(based_move_from_json(g, m) for m in obj))
