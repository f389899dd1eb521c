"""Expression DSL for index-set calculations.

Grammar (whitespace-insensitive)::

    expr   := 'empty' | 'N0' | 'gen' '[' point {',' point} ']'
            | 'add' '(' expr ',' expr ')'
            | 'cup' '(' expr ',' expr ')'          -- plain union
            | 'eu'  '(' expr ',' expr ')'          -- extended union
            | 'shift' '(' expr ',' scalar ')'
            | 'c0'  '(' expr ',' rational ')'      -- E^(0) closure, truncated
            | 'px0' '(' expr ',' expr ',' rational ')'
            | 'c12' '(' expr ',' expr ',' rational ')'
            | 'trunc' '(' expr ',' rational ')'
    point  := '(' scalar ',' integer ')'
    scalar := rational [('+'|'-') '(' rational ')' 'i']
    rational := ['-'] digits ['/' digits | '.' digits]

``trunc`` yields a finite point list, ``c12`` a triple of sets; everything
else yields an index set.
"""

from __future__ import annotations

from fractions import Fraction

from .indexset import (
    Exponent,
    IndexPoint,
    IndexSet,
    closure0,
    closure12,
    pxind0,
)

Result = IndexSet | list[IndexPoint] | tuple[IndexSet, IndexSet, IndexSet]


class DslParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    # -- lexing helpers ------------------------------------------------------

    def _skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        self._skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _expect(self, ch: str):
        self._skip_ws()
        if not self.text.startswith(ch, self.pos):
            raise DslParseError(f"expected {ch!r}", self.pos)
        self.pos += len(ch)

    def _word(self) -> str:
        self._skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum()
                                             or self.text[self.pos] == "_"):
            self.pos += 1
        if self.pos == start:
            raise DslParseError("expected a name", start)
        return self.text[start:self.pos]

    def rational(self) -> Fraction:
        self._skip_ws()
        start = self.pos
        if self._peek() in "+-":
            self.pos += 1
        digits_seen = False
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
            digits_seen = True
        if not digits_seen:
            raise DslParseError("expected a number", start)
        if self.pos < len(self.text) and self.text[self.pos] in "/.":
            self.pos += 1
            tail = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            if self.pos == tail:
                raise DslParseError("expected digits after '/' or '.'", tail)
        try:
            return Fraction(self.text[start:self.pos].replace(" ", ""))
        except (ValueError, ZeroDivisionError) as exc:
            raise DslParseError(str(exc), start) from exc

    def scalar(self) -> Exponent:
        re = self.rational()
        save = self.pos
        self._skip_ws()
        if self._peek() in "+-":
            sign = -1 if self._peek() == "-" else 1
            self.pos += 1
            self._skip_ws()
            if self._peek() == "(":
                self._expect("(")
                im = self.rational()
                self._expect(")")
                self._expect("i")
                return Exponent(re, sign * im)
            self.pos = save
        return Exponent(re)

    def integer(self) -> int:
        r = self.rational()
        if r.denominator != 1:
            raise DslParseError("log power must be an integer", self.pos)
        return int(r)

    # -- grammar --------------------------------------------------------------

    def point(self) -> IndexPoint:
        self._expect("(")
        z = self.scalar()
        self._expect(",")
        k = self.integer()
        self._expect(")")
        if k < 0:
            raise DslParseError("log power must be >= 0", self.pos)
        return IndexPoint(z, k)

    def expr(self) -> Result:
        start = self.pos
        word = self._word()
        if word == "empty":
            return IndexSet.empty()
        if word == "N0":
            return IndexSet.n0()
        if word == "gen":
            self._expect("[")
            pts = [self.point()]
            while self._peek() == ",":
                self._expect(",")
                pts.append(self.point())
            self._expect("]")
            return IndexSet.from_points(pts)
        if word in ("add", "cup", "eu"):
            self._expect("(")
            a = self._set_arg()
            self._expect(",")
            b = self._set_arg()
            self._expect(")")
            if word == "add":
                return a.add(b)
            if word == "cup":
                return a.union(b)
            return a.extended_union(b)
        if word == "shift":
            self._expect("(")
            a = self._set_arg()
            self._expect(",")
            c = self.scalar()
            self._expect(")")
            return a.shift(c)
        if word in ("c0", "trunc"):
            self._expect("(")
            a = self._set_arg()
            self._expect(",")
            c = self.rational()
            self._expect(")")
            return closure0(a, c) if word == "c0" else a.truncate(c)
        if word in ("px0", "c12"):
            self._expect("(")
            a = self._set_arg()
            self._expect(",")
            b = self._set_arg()
            self._expect(",")
            c = self.rational()
            self._expect(")")
            return pxind0(a, b, c) if word == "px0" else closure12(a, b, c)
        raise DslParseError(f"unknown operator {word!r}", start)

    def _set_arg(self) -> IndexSet:
        start = self.pos
        val = self.expr()
        if not isinstance(val, IndexSet):
            raise DslParseError("argument must be a set-valued expression", start)
        return val

    def parse(self) -> Result:
        val = self.expr()
        self._skip_ws()
        if self.pos != len(self.text):
            raise DslParseError("trailing input", self.pos)
        return val


def evaluate(text: str) -> Result:
    """Parse and evaluate one DSL expression."""
    return _Parser(text).parse()


# -- rendering -----------------------------------------------------------------

def format_rational(q: Fraction) -> str:
    return str(q)


def format_exponent(z: Exponent) -> str:
    if z.im == 0:
        return format_rational(z.re)
    sign = "-" if z.im < 0 else "+"
    return f"{format_rational(z.re)}{sign}({format_rational(abs(z.im))})i"


def format_point(p: IndexPoint) -> str:
    return f"({format_exponent(p.z)},{p.k})"


def format_set(s: IndexSet) -> str:
    if s.is_empty:
        return "empty"
    return "gen{" + ",".join(format_point(g) for g in s.generators) + "}"


def format_result(val: Result) -> str:
    if isinstance(val, IndexSet):
        return format_set(val)
    if isinstance(val, list):
        return "{" + ",".join(format_point(p) for p in val) + "}"
    return "(" + ", ".join(format_set(s) for s in val) + ")"
