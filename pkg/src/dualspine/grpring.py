"""Integer group rings Z[pi] for groups with a canonical normal form.

Supported groups are the trivial group, free groups, free abelian groups and
finite cyclic groups.  A group element is stored as a canonical tuple of ints:

* trivial:        ``()``
* free(n):        reduced tuple of signed letters, ``+(i+1)`` / ``-(i+1)``
* free-abelian(n): exponent vector of length n
* finite-cyclic(n): ``(e,)`` with ``0 <= e < n``

Ring elements are finite integer combinations of such words.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import GroupMismatchError, ParseError

Word = tuple

KINDS = ("trivial", "free", "free-abelian", "finite-cyclic")


@dataclass(frozen=True)
class GroupSpec:
    kind: str
    rank: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown group kind {self.kind!r}")
        if self.kind == "trivial" and self.rank != 0:
            raise ValueError("trivial group takes no rank")
        if self.kind == "finite-cyclic" and self.rank < 1:
            raise ValueError("cyclic order must be >= 1")
        if self.rank < 0:
            raise ValueError("rank must be nonnegative")

    @classmethod
    def trivial(cls) -> "GroupSpec":
        return cls("trivial")

    @classmethod
    def free(cls, rank: int) -> "GroupSpec":
        return cls("free", rank)

    @classmethod
    def free_abelian(cls, rank: int) -> "GroupSpec":
        return cls("free-abelian", rank)

    @classmethod
    def cyclic(cls, order: int) -> "GroupSpec":
        return cls("finite-cyclic", order)

    @property
    def ngens(self) -> int:
        if self.kind == "trivial":
            return 0
        if self.kind == "finite-cyclic":
            return 1
        return self.rank

    def __str__(self):
        if self.kind == "trivial":
            return "1"
        if self.kind == "free":
            return f"F{self.rank}"
        if self.kind == "free-abelian":
            return f"Z^{self.rank}"
        return f"Z/{self.rank}"

    @classmethod
    def parse(cls, text: str) -> "GroupSpec":
        t = text.strip()
        if t in ("1", "trivial"):
            return cls.trivial()
        m = re.fullmatch(r"F\s*(\d+)", t)
        if m:
            return cls.free(int(m.group(1)))
        m = re.fullmatch(r"Z\s*\^\s*(\d+)", t)
        if m:
            return cls.free_abelian(int(m.group(1)))
        if t == "Z":
            return cls.free_abelian(1)
        m = re.fullmatch(r"Z\s*/\s*(\d+)", t)
        if m and int(m.group(1)) >= 1:
            return cls.cyclic(int(m.group(1)))
        raise ParseError(f"unrecognised group {text!r}")

    # -- words --------------------------------------------------------------

    def identity(self) -> Word:
        if self.kind == "free-abelian":
            return (0,) * self.rank
        if self.kind == "finite-cyclic":
            return (0,)
        return ()

    def _check_index(self, i: int):
        if not 0 <= i < self.ngens:
            raise IndexError(f"generator index {i} out of range for {self}")

    def normalize(self, letters: Iterable[tuple[int, int]]) -> Word:
        """Canonical form of a product of generator powers ``(index, exponent)``."""
        if self.kind == "free":
            out: list[int] = []
            for i, e in letters:
                self._check_index(i)
                s = i + 1 if e > 0 else -(i + 1)
                for _ in range(abs(e)):
                    if out and out[-1] == -s:
                        out.pop()
                    else:
                        out.append(s)
            return tuple(out)
        exps = [0] * max(self.ngens, 0)
        for i, e in letters:
            self._check_index(i)
            exps[i] += e
        if self.kind == "trivial":
            return ()
        if self.kind == "finite-cyclic":
            return (exps[0] % self.rank,)
        return tuple(exps)

    def letters(self, w: Word) -> list[tuple[int, int]]:
        """Inverse of :meth:`normalize`: a letter sequence spelling ``w``."""
        if self.kind == "free":
            return [(abs(s) - 1, 1 if s > 0 else -1) for s in w]
        if self.kind == "trivial":
            return []
        return [(i, e) for i, e in enumerate(w) if e]

    def mul(self, u: Word, v: Word) -> Word:
        if self.kind == "free":
            k = 0
            n = min(len(u), len(v))
            while k < n and u[len(u) - 1 - k] == -v[k]:
                k += 1
            return u[: len(u) - k] + v[k:]
        if self.kind == "trivial":
            return ()
        if self.kind == "finite-cyclic":
            return ((u[0] + v[0]) % self.rank,)
        return tuple(a + b for a, b in zip(u, v))

    def inv(self, u: Word) -> Word:
        if self.kind == "free":
            return tuple(-s for s in reversed(u))
        if self.kind == "finite-cyclic":
            return ((-u[0]) % self.rank,)
        return tuple(-a for a in u)

    def gen(self, i: int, e: int = 1) -> Word:
        return self.normalize([(i, e)])

    def is_canonical(self, w) -> bool:
        try:
            return self.normalize(self.letters(w)) == tuple(w)
        except (IndexError, TypeError):
            return False

    def default_names(self) -> list[str]:
        return [f"x{i + 1}" for i in range(self.ngens)]


def normalize_word(g: GroupSpec, letters) -> Word:
    return g.normalize(letters)


class Elem:
    """An element of Z[pi]; immutable, with no zero coefficients stored."""

    __slots__ = ("group", "_t", "_hash")

    def __init__(self, group: GroupSpec, terms=None):
        self.group = group
        t = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for w, c in items:
                if c:
                    t[w] = t.get(w, 0) + c
            t = {w: c for w, c in t.items() if c}
        self._t = t
        self._hash = None

    @classmethod
    def _raw(cls, group, t):
        e = cls.__new__(cls)
        e.group = group
        e._t = t
        e._hash = None
        return e

    @classmethod
    def zero(cls, group: GroupSpec) -> "Elem":
        return cls._raw(group, {})

    @classmethod
    def one(cls, group: GroupSpec) -> "Elem":
        return cls._raw(group, {group.identity(): 1})

    @classmethod
    def from_int(cls, group: GroupSpec, n: int) -> "Elem":
        return cls._raw(group, {group.identity(): n} if n else {})

    @classmethod
    def from_word(cls, group: GroupSpec, w: Word, coeff: int = 1) -> "Elem":
        return cls._raw(group, {tuple(w): coeff} if coeff else {})

    @property
    def terms(self) -> list[tuple[Word, int]]:
        return sorted(self._t.items())

    def _coerce(self, other) -> "Elem":
        if isinstance(other, Elem):
            if other.group != self.group:
                raise GroupMismatchError(f"{self.group} vs {other.group}")
            return other
        if isinstance(other, int):
            return Elem.from_int(self.group, other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if not o._t:
            return self
        if not self._t:
            return o
        t = dict(self._t)
        for w, c in o._t.items():
            s = t.get(w, 0) + c
            if s:
                t[w] = s
            else:
                del t[w]
        return Elem._raw(self.group, t)

    __radd__ = __add__

    def __neg__(self):
        return Elem._raw(self.group, {w: -c for w, c in self._t.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if not self._t or not o._t:
            return Elem._raw(self.group, {})
        g = self.group
        if g.kind == "trivial":
            return Elem.from_int(g, self._t[()] * o._t[()])
        t: dict = {}
        mul = g.mul
        for u, a in self._t.items():
            for v, b in o._t.items():
                w = mul(u, v)
                s = t.get(w, 0) + a * b
                if s:
                    t[w] = s
                else:
                    t.pop(w, None)
        return Elem._raw(g, t)

    def __rmul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self

    def __eq__(self, other):
        if isinstance(other, int):
            other = Elem.from_int(self.group, other)
        if not isinstance(other, Elem):
            return NotImplemented
        return self.group == other.group and self._t == other._t

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.group, frozenset(self._t.items())))
        return self._hash

    def __bool__(self):
        return bool(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def augment(self) -> int:
        return sum(self._t.values())

    def involute(self) -> "Elem":
        inv = self.group.inv
        return Elem._raw(self.group, {inv(w): c for w, c in self._t.items()})

    def unit_form(self):
        """Return ``(sign, word)`` if this element is ``±g``, else ``None``."""
        if len(self._t) != 1:
            return None
        (w, c), = self._t.items()
        if c not in (1, -1):
            return None
        return c, w

    def is_unit(self) -> bool:
        return self.unit_form() is not None

    def unit_inverse(self) -> "Elem":
        form = self.unit_form()
        if form is None:
            raise ValueError(f"{self} is not of the form ±g")
        c, w = form
        return Elem.from_word(self.group, self.group.inv(w), c)

    def to_int(self) -> int:
        if not self._t:
            return 0
        if set(self._t) != {self.group.identity()}:
            raise ValueError(f"{self} is not an integer")
        return self._t[self.group.identity()]

    def map_group(self, target: GroupSpec, f) -> "Elem":
        """Push forward along a word map ``f`` into ``target``."""
        t: dict = {}
        for w, c in self._t.items():
            v = f(w)
            t[v] = t.get(v, 0) + c
        return Elem(target, t)

    def format(self, names: Sequence[str] | None = None) -> str:
        if not self._t:
            return "0"
        parts = []
        ident = self.group.identity()
        for w, c in self.terms:
            if w == ident:
                s = str(c)
            else:
                ws = format_word(self.group, w, names)
                s = ws if c == 1 else "-" + ws if c == -1 else f"{c}*{ws}"
            if parts:
                parts.append(" - " + s[1:] if s.startswith("-") else " + " + s)
            else:
                parts.append(s)
        return "".join(parts)

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"Elem({self.group}, {self.format()!r})"


def format_word(g: GroupSpec, w: Word, names: Sequence[str] | None = None) -> str:
    names = list(names) if names is not None else g.default_names()
    if g.kind == "free":
        return format_letters([(abs(s) - 1, 1 if s > 0 else -1) for s in w], names)
    return format_letters(g.letters(w), names)


def format_letters(letters: Sequence[tuple[int, int]], names: Sequence[str]) -> str:
    """Print a letter sequence, merging adjacent runs of one generator into powers."""
    runs: list[list[int]] = []
    for i, e in letters:
        if runs and runs[-1][0] == i and (runs[-1][1] > 0) == (e > 0):
            runs[-1][1] += e
        else:
            runs.append([i, e])
    if not runs:
        return "1"
    return "*".join(names[i] if e == 1 else f"{names[i]}^{e}" for i, e in runs)


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_']*)|(\^)|([+\-*]))")


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", column=pos + 1)
        col = m.start(m.lastindex) + 1
        if m.group(1):
            out.append(("int", int(m.group(1)), col))
        elif m.group(2):
            out.append(("name", m.group(2), col))
        elif m.group(3):
            out.append(("^", "^", col))
        else:
            out.append((m.group(4), m.group(4), col))
        pos = m.end()
    return out


def _split_name(tok: str, index: dict, col: int) -> list[int]:
    if tok in index:
        return [index[tok]]
    # juxtaposed generators, e.g. "x1x2"
    for k in range(len(tok) - 1, 0, -1):
        if tok[:k] in index:
            return [index[tok[:k]]] + _split_name(tok[k:], index, col + k)
    raise ParseError(f"unknown generator {tok!r}", column=col)


class _Parser:
    def __init__(self, text: str, names: Sequence[str]):
        self.toks = _tokenize(text)
        self.i = 0
        self.index = {n: k for k, n in enumerate(names)}

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, None)

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def power(self) -> int:
        if self.peek()[0] != "^":
            return 1
        self.take()
        sign = 1
        if self.peek()[0] == "-":
            self.take()
            sign = -1
        kind, val, col = self.take()
        if kind != "int":
            raise ParseError("expected exponent", column=col)
        return sign * val

    def term(self):
        """Parse ``[int] [*] factor * factor ...`` into (coeff, letters)."""
        coeff = 1
        letters: list[tuple[int, int]] = []
        first = True
        while True:
            kind, val, col = self.peek()
            if kind == "int":
                self.take()
                e = self.power()
                coeff *= val ** e if e >= 0 else _bad_power(col)
            elif kind == "name":
                self.take()
                gens = _split_name(val, self.index, col)
                e = self.power()
                for g in gens[:-1]:
                    letters.append((g, 1))
                letters.append((gens[-1], e))
            else:
                if first:
                    raise ParseError("expected a term", column=col)
                break
            first = False
            if self.peek()[0] == "*":
                self.take()
                if self.peek()[0] not in ("int", "name"):
                    raise ParseError("dangling '*'", column=self.peek()[2])
            elif self.peek()[0] not in ("int", "name"):
                break
        return coeff, letters

    def done(self):
        if self.i < len(self.toks):
            raise ParseError(f"unexpected {self.toks[self.i][1]!r}", column=self.toks[self.i][2])


def _bad_power(col):
    raise ParseError("negative power of an integer", column=col)


def parse_letters(text: str, names: Sequence[str]) -> list[tuple[int, int]]:
    """Parse a word such as ``x1*x2^-1`` (or ``1``) into unreduced ±1 letters."""
    p = _Parser(text, names)
    coeff, letters = p.term()
    p.done()
    if coeff != 1:
        raise ParseError(f"words may not carry coefficients: {text!r}")
    out = []
    for i, e in letters:
        s = 1 if e > 0 else -1
        out.extend([(i, s)] * abs(e))
    return out


def parse_word(g: GroupSpec, text: str, names: Sequence[str] | None = None) -> Word:
    names = names if names is not None else g.default_names()
    return g.normalize(parse_letters(text, names))


def parse_elem(g: GroupSpec, text: str, names: Sequence[str] | None = None) -> Elem:
    names = names if names is not None else g.default_names()
    p = _Parser(text, names)
    t: dict = {}
    sign = 1
    if p.peek()[0] in ("+", "-"):
        sign = -1 if p.take()[0] == "-" else 1
    while True:
        coeff, letters = p.term()
        w = g.normalize(letters)
        t[w] = t.get(w, 0) + sign * coeff
        kind = p.peek()[0]
        if kind in ("+", "-"):
            p.take()
            sign = -1 if kind == "-" else 1
            continue
        break
    p.done()
    return Elem(g, t)
