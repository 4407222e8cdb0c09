"""Text grammar shared by golden files, caches and the CLI.

Expressions: integers, ``a/b``, the names q, v, M1, M2, L1, L2, named
definitions, ``tau(...)``, ``+ - * / ^``, parentheses or braces, and
implicit multiplication by juxtaposition (``2 q M1``).  Exponents are
integers, possibly negative (``q^-3``, ``q^(-3)``, ``q^{18}``).

``X / c`` divides by a scalar c from the left, i.e. means c^(-1) * X.

Operator files::

    vars: q M1 M2 L1 L2; normalform: M-before-L
    F1 := q^18*M1^6*M2^6 - ...
          + ...                      (continuation lines are indented)
    [P1]
    -q^6*M1^3*M2*(q^3*M1-1)*F1*L1^2  (one summand per line)
    ...
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from flint import fmpq_mpoly

from .arith import QMM, QLaurent, RatFuncQMM, _format_term, _join_terms, _to_fmpq, format_mpoly
from .ore import COMM, SYMBOLIC, OreOp, tau_map

HEADER = "vars: q M1 M2 L1 L2; normalform: M-before-L"


class FormatError(ValueError):
    def __init__(self, msg: str, line: int | None = None, col: int | None = None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {col}" if col is not None else "") + ": "
        super().__init__(where + msg)
        self.line = line
        self.col = col


# ---------------------------------------------------------------------------
# tokenizer and recursive-descent parser
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


@dataclass
class _Tok:
    kind: str  # num | name | op | end
    text: str
    col: int


def _tokenize(text: str, line: int | None) -> list[_Tok]:
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group(1) is not None:
            out.append(_Tok("num", m.group(1), m.start(1) + 1))
        elif m.group(2) is not None:
            out.append(_Tok("name", m.group(2), m.start(2) + 1))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^(){}":
                raise FormatError(f"unexpected character {ch!r}", line, m.start(3) + 1)
            out.append(_Tok("op", ch, m.start(3) + 1))
        pos = m.end()
    out.append(_Tok("end", "", n + 1))
    return out


_CLOSE = {"(": ")", "{": "}"}


class _Parser:
    def __init__(self, text: str, alg, line: int | None = None):
        self.toks = _tokenize(text, line)
        self.i = 0
        self.alg = alg
        self.line = line

    def err(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.toks[self.i]
        raise FormatError(msg, self.line, tok.col)

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str):
        t = self.take()
        if t.text != text:
            self.err(f"expected {text!r}", t)
        return t

    def parse(self):
        if self.peek().kind == "end":
            self.err("empty expression")
        v = self.expr()
        if self.peek().kind != "end":
            self.err(f"unexpected {self.peek().text!r}")
        return v

    def expr(self):
        t = self.peek()
        neg = False
        if t.text in "+-" and t.kind == "op":
            self.take()
            neg = t.text == "-"
        v = self.term()
        if neg:
            v = -v
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.take().text
            rhs = self.term()
            v = v + rhs if op == "+" else v - rhs
        return v

    def _starts_factor(self, t: _Tok) -> bool:
        return t.kind in ("num", "name") or (t.kind == "op" and t.text in "({")

    def term(self):
        v = self.factor()
        while True:
            t = self.peek()
            if t.kind == "op" and t.text == "*":
                self.take()
                v = self.alg.mul(v, self.factor())
            elif t.kind == "op" and t.text == "/":
                self.take()
                v = self.alg.div(v, self.factor(), self.line, t.col)
            elif self._starts_factor(t):
                v = self.alg.mul(v, self.factor())
            else:
                return v

    def factor(self):
        base = self.atom()
        if self.peek().kind == "op" and self.peek().text == "^":
            t = self.take()
            e = self.exponent()
            base = self.alg.pow(base, e, self.line, t.col)
        return base

    def exponent(self) -> int:
        t = self.take()
        if t.kind == "op" and t.text in _CLOSE:
            sign = 1
            if self.peek().text in "+-" and self.peek().kind == "op":
                sign = -1 if self.take().text == "-" else 1
            n = self.take()
            if n.kind != "num":
                self.err("integer exponent expected", n)
            self.expect(_CLOSE[t.text])
            return sign * int(n.text)
        if t.kind == "op" and t.text in "+-":
            n = self.take()
            if n.kind != "num":
                self.err("integer exponent expected", n)
            return -int(n.text) if t.text == "-" else int(n.text)
        if t.kind != "num":
            self.err("integer exponent expected", t)
        return int(t.text)

    def atom(self):
        t = self.take()
        if t.kind == "num":
            return self.alg.const(Fraction(int(t.text)))
        if t.kind == "op" and t.text in _CLOSE:
            v = self.expr()
            self.expect(_CLOSE[t.text])
            return v
        if t.kind == "op" and t.text == "-":
            return -self.factor()
        if t.kind == "name":
            if t.text == "tau" and self.peek().text == "(":
                self.take()
                v = self.expr()
                self.expect(")")
                return self.alg.tau(v)
            return self.alg.atom(t.text, self.line, t.col)
        self.err(f"unexpected {t.text or 'end of input'!r}", t)


# ---------------------------------------------------------------------------
# target algebras
# ---------------------------------------------------------------------------


class _Algebra:
    names: dict

    def __init__(self, names: dict | None = None):
        self.names = dict(names or {})

    def lookup(self, name, line, col):
        if name in self.names:
            return self.names[name]
        raise FormatError(f"unresolved name {name!r}", line, col)

    def mul(self, a, b):
        return a * b


class OperatorAlgebra(_Algebra):
    """Evaluate into OreOp over Q(q, M1, M2)."""

    def const(self, c):
        return OreOp.scalar(c)

    def atom(self, name, line, col):
        if name == "q":
            return OreOp.q()
        if name in ("M1", "M2"):
            return OreOp.M(int(name[1]))
        if name in ("L1", "L2"):
            return OreOp.L(int(name[1]))
        return self.lookup(name, line, col)

    def _scalar(self, a, line, col):
        if set(a.terms) - {(0, 0)}:
            raise FormatError("only scalars can be inverted", line, col)
        if not a.terms:
            raise FormatError("division by zero", line, col)
        return a.terms[(0, 0)]

    def div(self, a, b, line, col):
        return a.lmul(self._scalar(b, line, col).inverse())

    def pow(self, a, e, line, col):
        if e >= 0:
            return a**e
        return OreOp.scalar(self._scalar(a, line, col).inverse() ** (-e))

    def tau(self, a):
        return tau_map(a)


class LaurentAlgebra(_Algebra):
    """Evaluate into QLaurent (names q and v)."""

    def const(self, c):
        return QLaurent.constant(c)

    def atom(self, name, line, col):
        if name == "q":
            return QLaurent.q_power(1)
        if name == "v":
            return QLaurent.v_power(1)
        return self.lookup(name, line, col)

    def div(self, a, b, line, col):
        if b.is_zero():
            raise FormatError("division by zero", line, col)
        try:
            return a.exact_div(b)
        except ArithmeticError as exc:
            raise FormatError(str(exc), line, col) from None

    def pow(self, a, e, line, col):
        if e >= 0:
            return a**e
        if a.nterms() != 1:
            raise FormatError("negative power of a non-monomial", line, col)
        (k, c), = a.terms()
        return QLaurent.v_power(k * e, Fraction(1) / c ** (-e))

    def tau(self, a):
        return a


class PolyAlgebra(_Algebra):
    """Evaluate into a flint mpoly context (commutative)."""

    def __init__(self, ctx, names: dict | None = None):
        super().__init__(names)
        self.ctx = ctx
        self.gens = dict(zip(ctx.names(), ctx.gens()))

    def const(self, c):
        return self.ctx.constant(_to_fmpq(c))

    def atom(self, name, line, col):
        if name in self.gens:
            return self.gens[name]
        return self.lookup(name, line, col)

    def div(self, a, b, line, col):
        if not b.is_constant():
            raise FormatError("polynomial division by a non-constant", line, col)
        if b.is_zero():
            raise FormatError("division by zero", line, col)
        return a / b.leading_coefficient()

    def pow(self, a, e, line, col):
        if e < 0:
            raise FormatError("negative exponent in a polynomial", line, col)
        return a**e

    def tau(self, a):
        return tau_poly(a)


def tau_poly(f: fmpq_mpoly) -> fmpq_mpoly:
    """Swap M1 <-> M2 (and L1 <-> L2 when present)."""
    names = list(f.context().names())
    perm = list(range(len(names)))
    for a, b in (("M1", "M2"), ("L1", "L2")):
        if a in names and b in names:
            i, j = names.index(a), names.index(b)
            perm[i], perm[j] = j, i
    return f.context().from_dict({tuple(e[perm[k]] for k in range(len(e))): c for e, c in f.terms()})


def parse_expression(text: str, alg, line: int | None = None):
    return _Parser(text, alg, line).parse()


def parse_laurent(text: str) -> QLaurent:
    return parse_expression(text, LaurentAlgebra())


def parse_qmm(text: str, names: dict | None = None) -> fmpq_mpoly:
    return parse_expression(text, PolyAlgebra(QMM, names))


def parse_comm(text: str, names: dict | None = None) -> fmpq_mpoly:
    """Commutative polynomial in (M1, M2, L1, L2), e.g. the q = 1 images."""
    return parse_expression(text, PolyAlgebra(COMM, names))


def parse_op_expression(text: str, names: dict | None = None) -> OreOp:
    return parse_expression(text, OperatorAlgebra(names))


# ---------------------------------------------------------------------------
# documents with definitions and sections
# ---------------------------------------------------------------------------


@dataclass
class OpDocument:
    """Parsed operator file: raw polynomial definitions and sections."""

    defs: dict = field(default_factory=dict)  # name -> fmpq_mpoly in (q, M1, M2)
    sections: dict = field(default_factory=dict)  # name -> OreOp
    meta: dict = field(default_factory=dict)

    def __getitem__(self, name):
        return self.sections[name]


_DEF = re.compile(r"^([A-Za-z_][A-Za-z_0-9]*)\s*:=(.*)$")
_SEC = re.compile(r"^\[([A-Za-z_][A-Za-z_0-9]*)\]\s*$")


def _logical_lines(text: str):
    """Join indented continuation lines; yields (first line number, text)."""
    cur = None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if raw[:1] in (" ", "\t") and cur is not None:
            cur[1] += " " + line.strip()
            continue
        if cur is not None:
            yield tuple(cur)
        cur = [no, line.strip()]
    if cur is not None:
        yield tuple(cur)


def parse_document(text: str, kind: str = "operator") -> OpDocument:
    """Parse a file of definitions and ``[name]`` sections.

    kind "operator": sections are operators; "comm": sections are
    commutative (M1, M2, L1, L2) polynomials.
    """
    doc = OpDocument()
    poly_names: dict = {}
    current = None
    body: dict = {}
    for no, line in _logical_lines(text):
        if line.startswith("vars:"):
            for part in line.split(";"):
                if ":" in part:
                    k, v = part.split(":", 1)
                    doc.meta[k.strip()] = v.strip()
            continue
        m = _SEC.match(line)
        if m:
            current = m.group(1)
            if current in body:
                raise FormatError(f"duplicate section {current!r}", no)
            body[current] = []
            continue
        m = _DEF.match(line)
        if m and current is None:
            name, rhs = m.group(1), m.group(2)
            poly_names[name] = parse_expression(rhs, PolyAlgebra(QMM, poly_names), no)
            continue
        if current is None:
            raise FormatError("expression outside of a section", no)
        body[current].append((no, line))
    doc.defs = poly_names
    for name, lines in body.items():
        if kind == "operator":
            alg = OperatorAlgebra({k: OreOp.scalar(RatFuncQMM(v)) for k, v in poly_names.items()})
            acc = OreOp()
        else:
            alg = PolyAlgebra(COMM, {k: _qmm_to_comm(v) for k, v in poly_names.items()})
            acc = COMM.constant(0)
        for no, line in lines:
            acc = acc + parse_expression(line, alg, no)
        doc.sections[name] = acc
    return doc


def _qmm_to_comm(f: fmpq_mpoly) -> fmpq_mpoly:
    if any(e[0] for e in f.monoms()):
        raise FormatError("definition used in a q = 1 section depends on q")
    return COMM.from_dict({(e[1], e[2], 0, 0): c for e, c in f.terms()})


def load_document(path, kind: str = "operator") -> OpDocument:
    return parse_document(Path(path).read_text(), kind)


# ---------------------------------------------------------------------------
# canonical serialization
# ---------------------------------------------------------------------------


def _q_poly_text(terms: dict) -> str:
    """Polynomial in q from {e: coeff}, descending."""
    parts = [_format_term(c, {"q": e}) for e, c in sorted(terms.items(), reverse=True)]
    return _join_terms(parts)


def _mono_text(names, exps) -> str:
    out = []
    for n, e in zip(names, exps):
        if e == 1:
            out.append(n)
        elif e:
            out.append(f"{n}^{e}")
    return " ".join(out)


def operator_line_terms(P: OreOp) -> list[str]:
    """Canonical summands: ``<coeff> * M1^a1 M2^a2 * L1^b1 L2^b2``.

    Polynomial coefficients are expanded per (M1, M2)-monomial with a
    q-polynomial coefficient; rational ones are written as one fraction.
    """
    lines = []
    for b in sorted(P.terms, reverse=True):
        c = P.terms[b]
        ltxt = _mono_text(("L1", "L2"), b)
        if isinstance(c, RatFuncQMM) and c.is_polynomial():
            by_m: dict = {}
            for (e0, e1, e2), a in c.num.terms():
                by_m.setdefault((e1, e2), {})[e0] = a
            for mexp in sorted(by_m, reverse=True):
                parts = [f"({_q_poly_text(by_m[mexp])})"]
                mt = _mono_text(("M1", "M2"), mexp)
                if mt:
                    parts.append(mt)
                if ltxt:
                    parts.append(ltxt)
                lines.append(" * ".join(parts))
        else:
            parts = [f"({c.num})/({c.den})" if not c.is_polynomial() else f"({c.num})"]
            if isinstance(c, RatFuncQMM) and not c.is_polynomial():
                parts = [f"({format_mpoly(c.num)})/({format_mpoly(c.den)})"]
            if ltxt:
                parts.append(ltxt)
            lines.append(" * ".join(parts))
    return lines


def serialize_operator(P: OreOp, name: str = "P", header: bool = True) -> str:
    if P.field is not SYMBOLIC:
        raise ValueError("only exact operators are serialized")
    out = [HEADER] if header else []
    out.append(f"[{name}]")
    out.extend(operator_line_terms(P) or ["0"])
    return "\n".join(out) + "\n"


def serialize_operators(ops: dict[str, OreOp]) -> str:
    chunks = [HEADER]
    for name, P in ops.items():
        chunks.append(serialize_operator(P, name, header=False).rstrip("\n"))
    return "\n".join(chunks) + "\n"


def parse_operator(text: str, name: str | None = None) -> OreOp:
    """Parse a file (or a bare expression) into one operator."""
    if "[" not in text and ":=" not in text:
        return parse_op_expression(text)
    doc = parse_document(text)
    if name is None:
        if len(doc.sections) != 1:
            raise FormatError("several sections; pass a name")
        return next(iter(doc.sections.values()))
    return doc.sections[name]


def format_comm(f: fmpq_mpoly) -> str:
    return format_mpoly(f)


# ---------------------------------------------------------------------------
# run manifests
# ---------------------------------------------------------------------------


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class RunManifest:
    command: str
    parameters: dict = field(default_factory=dict)
    inputs: dict = field(default_factory=dict)  # name -> hash
    outputs: dict = field(default_factory=dict)  # name -> hash
    timings: dict = field(default_factory=dict)  # stage -> seconds
    status: str = "ok"

    def dumps(self) -> str:
        lines = [f"command: {self.command}", f"status: {self.status}"]
        for k in sorted(self.parameters):
            lines.append(f"param.{k}: {self.parameters[k]}")
        for k in sorted(self.inputs):
            lines.append(f"input.{k}: {self.inputs[k]}")
        for k in sorted(self.outputs):
            lines.append(f"output.{k}: {self.outputs[k]}")
        for k in sorted(self.timings):
            lines.append(f"time.{k}: {self.timings[k]:.3f}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "RunManifest":
        man = cls(command="")
        for line in text.splitlines():
            if not line.strip():
                continue
            k, v = line.split(": ", 1)
            if k == "command":
                man.command = v
            elif k == "status":
                man.status = v
            else:
                group, name = k.split(".", 1)
                if group == "param":
                    man.parameters[name] = v
                elif group == "input":
                    man.inputs[name] = v
                elif group == "output":
                    man.outputs[name] = v
                elif group == "time":
                    man.timings[name] = float(v)
        return man
