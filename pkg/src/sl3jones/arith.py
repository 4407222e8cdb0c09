"""Exact arithmetic: v-Laurent polynomials, polynomials and rational functions
in (q, M1, M2), and reduction modulo a prime.

Fractional powers of q are housed by the fixed convention ``q = v**6``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Iterator

from flint import fmpq, fmpq_mpoly, fmpq_mpoly_ctx, fmpq_poly, fmpz

V_PER_Q = 6
DEFAULT_PRIME = 2147483647
DEFAULT_V0 = 2

QMM = fmpq_mpoly_ctx.get(("q", "M1", "M2"), ordering="lex")
MPolyQMM = fmpq_mpoly


class UnluckyPrimeError(ArithmeticError):
    """A denominator vanished modulo p; pick another prime or base point."""


class InexactDivisionError(ArithmeticError):
    pass


def _to_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, fmpz):
        return Fraction(int(c))
    if isinstance(c, fmpq):
        return Fraction(int(c.p), int(c.q))
    return Fraction(c)


def _to_fmpq(c) -> fmpq:
    if isinstance(c, fmpq):
        return c
    if isinstance(c, Fraction):
        return fmpq(c.numerator, c.denominator)
    return fmpq(c)


def mod_inverse(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise UnluckyPrimeError(f"no inverse of 0 modulo {p}")
    return pow(a, -1, p)


def rational_mod(c, p: int) -> int:
    """Image of a rational number in Z/p."""
    c = _to_fraction(c)
    if c.denominator % p == 0:
        raise UnluckyPrimeError(f"denominator {c.denominator} divisible by {p}")
    return c.numerator * pow(c.denominator, -1, p) % p


# ---------------------------------------------------------------------------
# QLaurent
# ---------------------------------------------------------------------------


def _inflate(coeffs: list, k: int) -> list:
    if k == 1:
        return coeffs
    out = [0] * ((len(coeffs) - 1) * k + 1)
    out[::k] = coeffs
    return out


class QLaurent:
    """Laurent polynomial in v with rational coefficients, where q = v**6.

    Stored as ``v**shift * P(v**stride)`` with ``P(0) != 0`` so that dense
    storage stays proportional to the number of occupied exponents.
    """

    __slots__ = ("_shift", "_stride", "_poly")

    def __init__(self, shift: int = 0, stride: int = 1, poly: fmpq_poly | None = None):
        # raw constructor; callers go through _make for normalization
        self._shift = shift
        self._stride = stride
        self._poly = poly if poly is not None else fmpq_poly()

    # -- construction -----------------------------------------------------

    @classmethod
    def _make(cls, shift: int, stride: int, poly: fmpq_poly) -> "QLaurent":
        if poly.is_zero():
            return cls(0, 1, fmpq_poly())
        coeffs = poly.coeffs()
        val = 0
        while coeffs[val] == 0:
            val += 1
        if val:
            coeffs = coeffs[val:]
            shift += val * stride
        g = 0
        for i in range(1, len(coeffs)):
            if coeffs[i] != 0:
                g = gcd(g, i)
                if g == 1:
                    break
        if g == 0:
            return cls(shift, 1, fmpq_poly(coeffs[:1]))
        if g > 1:
            coeffs = coeffs[::g]
            stride *= g
        return cls(shift, stride, fmpq_poly(coeffs) if val or g > 1 else poly)

    @classmethod
    def zero(cls) -> "QLaurent":
        return cls()

    @classmethod
    def constant(cls, c) -> "QLaurent":
        c = _to_fmpq(c)
        if c == 0:
            return cls()
        return cls(0, 1, fmpq_poly([c]))

    @classmethod
    def v_power(cls, e: int, c=1) -> "QLaurent":
        c = _to_fmpq(c)
        if c == 0:
            return cls()
        return cls(e, 1, fmpq_poly([c]))

    @classmethod
    def q_power(cls, e: int, c=1) -> "QLaurent":
        return cls.v_power(V_PER_Q * e, c)

    @classmethod
    def from_dict(cls, terms: dict) -> "QLaurent":
        """Build from ``{v_exponent: coefficient}``."""
        items = [(e, c) for e, c in terms.items() if c != 0]
        if not items:
            return cls()
        lo = min(e for e, _ in items)
        g = 0
        for e, _ in items:
            g = gcd(g, e - lo)
        g = g or 1
        n = max(e for e, _ in items) - lo
        coeffs = [0] * (n // g + 1)
        for e, c in items:
            coeffs[(e - lo) // g] = _to_fmpq(c)
        return cls(lo, g, fmpq_poly(coeffs))

    @classmethod
    def from_q_dict(cls, terms: dict) -> "QLaurent":
        return cls.from_dict({V_PER_Q * e: c for e, c in terms.items()})

    @classmethod
    def sum(cls, parts: Iterable[tuple[int, "QLaurent"]]) -> "QLaurent":
        """Signed sum ``sum(s * x)`` accumulated on one dense grid."""
        parts = [(s, x) for s, x in parts if s and not x.is_zero()]
        if not parts:
            return cls()
        if any(x._poly.denom() != 1 for _, x in parts):
            out = cls()
            for s, x in parts:
                out = out + x * s
            return out
        lo = min(x._shift for _, x in parts)
        g = 0
        for _, x in parts:
            g = gcd(g, x._shift - lo)
            if x._poly.length() > 1:
                g = gcd(g, x._stride)
        g = g or 1
        hi = max(x._shift + x._stride * (x._poly.length() - 1) for _, x in parts)
        acc = [0] * ((hi - lo) // g + 1)
        for s, x in parts:
            step = x._stride // g if x._poly.length() > 1 else 1
            base = (x._shift - lo) // g
            for i, c in enumerate(x._poly.coeffs()):
                if c != 0:
                    acc[base + i * step] += s * int(c.p)
        return cls._make(lo, g, fmpq_poly(acc))

    # -- accessors --------------------------------------------------------

    def is_zero(self) -> bool:
        return self._poly.is_zero()

    def terms(self) -> Iterator[tuple[int, Fraction]]:
        """(v_exponent, coefficient) pairs in increasing exponent order."""
        for i, c in enumerate(self._poly.coeffs()):
            if c != 0:
                yield self._shift + self._stride * i, _to_fraction(c)

    def to_dict(self) -> dict[int, Fraction]:
        return dict(self.terms())

    def valuation(self) -> int:
        if self.is_zero():
            raise ValueError("valuation of zero")
        return self._shift

    def degree(self) -> int:
        if self.is_zero():
            raise ValueError("degree of zero")
        return self._shift + self._stride * (self._poly.length() - 1)

    def nterms(self) -> int:
        return sum(1 for c in self._poly.coeffs() if c != 0)

    def is_integral_in_q(self) -> bool:
        if self.is_zero():
            return True
        if self._poly.denom() != 1:
            return False
        if self._shift % V_PER_Q:
            return False
        return self._poly.length() == 1 or self._stride % V_PER_Q == 0

    def q_coefficients(self) -> dict[int, int]:
        """{q_exponent: integer} for a q-integral value."""
        if not self.is_integral_in_q():
            raise ValueError("not a Laurent polynomial in q with integer coefficients")
        return {e // V_PER_Q: int(c) for e, c in self.terms()}

    def at_one(self) -> Fraction:
        """Value at v = 1 (hence q = 1)."""
        return _to_fraction(sum(self._poly.coeffs(), fmpq(0)))

    # -- arithmetic -------------------------------------------------------

    def _aligned(self, other: "QLaurent", additive: bool):
        a, b = self, other
        g = gcd(a._stride if a._poly.length() > 1 else 0, b._stride if b._poly.length() > 1 else 0)
        if additive:
            g = gcd(g, a._shift - b._shift)
        g = g or 1
        pa = a._poly if a._poly.length() == 1 else fmpq_poly(_inflate(a._poly.coeffs(), a._stride // g))
        pb = b._poly if b._poly.length() == 1 else fmpq_poly(_inflate(b._poly.coeffs(), b._stride // g))
        return g, pa, pb

    def __add__(self, other) -> "QLaurent":
        if not isinstance(other, QLaurent):
            other = QLaurent.constant(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        g, pa, pb = self._aligned(other, True)
        lo = min(self._shift, other._shift)
        if self._shift != lo:
            pa = pa.left_shift((self._shift - lo) // g)
        if other._shift != lo:
            pb = pb.left_shift((other._shift - lo) // g)
        return QLaurent._make(lo, g, pa + pb)

    __radd__ = __add__

    def __neg__(self) -> "QLaurent":
        return QLaurent(self._shift, self._stride, -self._poly)

    def __sub__(self, other) -> "QLaurent":
        if not isinstance(other, QLaurent):
            other = QLaurent.constant(other)
        return self + (-other)

    def __rsub__(self, other) -> "QLaurent":
        return (-self) + other

    def __mul__(self, other) -> "QLaurent":
        if not isinstance(other, QLaurent):
            c = _to_fmpq(other)
            if c == 0:
                return QLaurent()
            return QLaurent(self._shift, self._stride, self._poly * c)
        if self.is_zero() or other.is_zero():
            return QLaurent()
        if other._poly.length() == 1:
            return QLaurent(self._shift + other._shift, self._stride, self._poly * other._poly[0])
        if self._poly.length() == 1:
            return QLaurent(self._shift + other._shift, other._stride, other._poly * self._poly[0])
        g, pa, pb = self._aligned(other, False)
        return QLaurent._make(self._shift + other._shift, g, pa * pb)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "QLaurent":
        if n < 0:
            if self._poly.length() != 1:
                raise InexactDivisionError("negative power of a non-monomial")
            return QLaurent(-n * self._shift, 1, fmpq_poly([1 / self._poly[0] ** (-n)]))
        out = QLaurent.constant(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def exact_div(self, other: "QLaurent") -> "QLaurent":
        if other.is_zero():
            raise ZeroDivisionError("division by zero QLaurent")
        if self.is_zero():
            return QLaurent()
        if other._poly.length() == 1:
            return QLaurent(self._shift - other._shift, self._stride, self._poly / other._poly[0])
        g, pa, pb = self._aligned(other, False)
        quo, rem = divmod(pa, pb)
        if not rem.is_zero():
            raise InexactDivisionError("QLaurent division is not exact")
        return QLaurent._make(self._shift - other._shift, g, quo)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QLaurent):
            try:
                other = QLaurent.constant(other)
            except (TypeError, ValueError):
                return NotImplemented
        if self.is_zero() or other.is_zero():
            return self.is_zero() and other.is_zero()
        return (
            self._shift == other._shift
            and self._poly == other._poly
            and (self._stride == other._stride or self._poly.length() == 1)
        )

    def __hash__(self) -> int:
        return hash(tuple(self.terms()))

    def __repr__(self) -> str:
        return f"QLaurent({self})"

    def __str__(self) -> str:
        return format_laurent(self)

    def eval_mod(self, v0: int, p: int) -> int:
        return eval_mod(self, v0, p)


def format_laurent(x: QLaurent) -> str:
    """Text form; uses q when every exponent is a multiple of 6, v otherwise."""
    if x.is_zero():
        return "0"
    use_q = all(e % V_PER_Q == 0 for e, _ in x.terms())
    var, scale = ("q", V_PER_Q) if use_q else ("v", 1)
    parts = []
    for e, c in sorted(x.terms(), reverse=True):
        parts.append(_format_term(c, {var: e // scale}))
    return _join_terms(parts)


def _format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _format_term(c, powers: dict) -> str:
    c = _to_fraction(c)
    mono = []
    for name, e in powers.items():
        if e == 0:
            continue
        mono.append(name if e == 1 else f"{name}^{e}")
    sign = "-" if c < 0 else "+"
    a = abs(c)
    if not mono:
        return f"{sign}{_format_coeff(a)}"
    if a == 1:
        return f"{sign}{'*'.join(mono)}"
    return f"{sign}{_format_coeff(a)}*{'*'.join(mono)}"


def _join_terms(parts: list[str]) -> str:
    if not parts:
        return "0"
    out = parts[0][1:] if parts[0][0] == "+" else parts[0]
    for t in parts[1:]:
        out += f" {t[0]} {t[1:]}"
    return out


# ---------------------------------------------------------------------------
# modular evaluation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModScalar:
    residue: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "residue", int(self.residue) % self.p)

    def __add__(self, other):
        return ModScalar(self.residue + _res(other, self.p), self.p)

    __radd__ = __add__

    def __sub__(self, other):
        return ModScalar(self.residue - _res(other, self.p), self.p)

    def __mul__(self, other):
        return ModScalar(self.residue * _res(other, self.p), self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return ModScalar(self.residue * mod_inverse(_res(other, self.p), self.p), self.p)

    def __neg__(self):
        return ModScalar(-self.residue, self.p)

    def __int__(self):
        return self.residue

    def __eq__(self, other):
        if isinstance(other, ModScalar):
            return self.p == other.p and self.residue == other.residue
        if isinstance(other, int):
            return self.residue == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.residue, self.p))


def _res(x, p: int) -> int:
    if isinstance(x, ModScalar):
        if x.p != p:
            raise ValueError("moduli differ")
        return x.residue
    return int(x) % p


def eval_mod(x: QLaurent, v0: int, p: int = DEFAULT_PRIME) -> ModScalar:
    """Image of ``x`` at v = v0 in Z/p."""
    if gcd(v0, p) != 1:
        raise ValueError("v0 must be invertible modulo p")
    if x.is_zero():
        return ModScalar(0, p)
    w = pow(v0, x._stride, p)
    acc = 0
    for c in reversed(x._poly.coeffs()):
        acc = (acc * w + (rational_mod(c, p) if c != 0 else 0)) % p
    return ModScalar(acc * pow(v0, x._shift, p), p)


# ---------------------------------------------------------------------------
# polynomials and rational functions in (q, M1, M2)
# ---------------------------------------------------------------------------

Q, M1, M2 = QMM.gens()


def qmm(terms: dict | int | Fraction) -> fmpq_mpoly:
    """Polynomial from ``{(e_q, e_M1, e_M2): coeff}`` or a scalar."""
    if isinstance(terms, dict):
        return QMM.from_dict({k: _to_fmpq(c) for k, c in terms.items() if c != 0})
    return QMM.constant(_to_fmpq(terms))


def content_split(f: fmpq_mpoly) -> tuple[Fraction, fmpq_mpoly]:
    """``f = content * primitive`` with primitive integral, coprime, positive lc."""
    if f.is_zero():
        raise ValueError("content of the zero polynomial")
    coeffs = f.coeffs()
    num = 0
    den = 1
    for c in coeffs:
        num = gcd(num, int(c.p))
        d = int(c.q)
        den = den * d // gcd(den, d)
    content = Fraction(num, den)
    if f.leading_coefficient() < 0:
        content = -content
    return content, f / _to_fmpq(content)


def primitive_part(f: fmpq_mpoly) -> fmpq_mpoly:
    return content_split(f)[1]


def shift_poly(f: fmpq_mpoly, i: int, j: int) -> fmpq_mpoly:
    """f(q, q^i M1, q^j M2)."""
    if (i == 0 and j == 0) or f.is_zero():
        return f
    return QMM.from_dict({(e0 + i * e1 + j * e2, e1, e2): c for (e0, e1, e2), c in f.terms()})


def swap_poly(f: fmpq_mpoly) -> fmpq_mpoly:
    """f(q, M2, M1)."""
    return QMM.from_dict({(e0, e2, e1): c for (e0, e1, e2), c in f.terms()})


def eval_poly_at_qpowers(f: fmpq_mpoly, n1: int, n2: int) -> QLaurent:
    """f(q, q^n1, q^n2) as a QLaurent."""
    acc: dict[int, fmpq] = {}
    for (e0, e1, e2), c in f.terms():
        e = e0 + n1 * e1 + n2 * e2
        acc[e] = acc.get(e, 0) + c
    return QLaurent.from_q_dict(acc)


def eval_poly_mod(f: fmpq_mpoly, q0: int, x: int, y: int, p: int) -> int:
    acc = 0
    for (e0, e1, e2), c in f.terms():
        acc += rational_mod(c, p) * pow(q0, e0, p) * pow(x, e1, p) * pow(y, e2, p)
    return acc % p


class RatFuncQMM:
    """Element of Q(q, M1, M2) in canonical reduced form.

    The denominator is integral, primitive and has positive leading
    coefficient under lex(q > M1 > M2); the numerator carries all content.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, _canonical: bool = False):
        if not isinstance(num, fmpq_mpoly):
            num = qmm(num)
        if den is None:
            den = QMM.constant(1)
            _canonical = True
        elif not isinstance(den, fmpq_mpoly):
            den = qmm(den)
        if not _canonical:
            num, den = _canonical_pair(num, den)
        self.num = num
        self.den = den

    # field protocol ------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def __add__(self, other):
        other = _as_ratfunc(other)
        if self.den.is_one() and other.den.is_one():
            return RatFuncQMM(self.num + other.num, None)
        if self.den == other.den:
            return RatFuncQMM(self.num + other.num, self.den)
        return RatFuncQMM(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFuncQMM(-self.num, self.den, _canonical=True)

    def __sub__(self, other):
        return self + (-_as_ratfunc(other))

    def __rsub__(self, other):
        return _as_ratfunc(other) - self

    def __mul__(self, other):
        other = _as_ratfunc(other)
        if self.den.is_one() and other.den.is_one():
            return RatFuncQMM(self.num * other.num, None)
        # cross-cancel before multiplying keeps sizes down
        g1 = self.num.gcd(other.den) if not other.den.is_one() else None
        g2 = other.num.gcd(self.den) if not self.den.is_one() else None
        a, d2 = (self.num, other.den) if g1 is None or g1.is_one() else (self.num / g1, other.den / g1)
        b, d1 = (other.num, self.den) if g2 is None or g2.is_one() else (other.num / g2, self.den / g2)
        return _from_coprime(a * b, d1 * d2)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return _from_coprime(self.den, self.num)

    def __truediv__(self, other):
        return self * _as_ratfunc(other).inverse()

    def __rtruediv__(self, other):
        return _as_ratfunc(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return _from_coprime(self.num**n, self.den**n)

    def __eq__(self, other):
        if not isinstance(other, RatFuncQMM):
            try:
                other = _as_ratfunc(other)
            except TypeError:
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((str(self.num), str(self.den)))

    def shift(self, i: int, j: int) -> "RatFuncQMM":
        if i == 0 and j == 0:
            return self
        return _from_coprime(shift_poly(self.num, i, j), shift_poly(self.den, i, j))

    def swap(self) -> "RatFuncQMM":
        return _from_coprime(swap_poly(self.num), swap_poly(self.den))

    def eval_qpowers(self, n1: int, n2: int) -> QLaurent:
        """Value at (q, q^n1, q^n2); the denominator must be a monomial there."""
        num = eval_poly_at_qpowers(self.num, n1, n2)
        if self.den.is_one():
            return num
        den = eval_poly_at_qpowers(self.den, n1, n2)
        if den.is_zero():
            raise ZeroDivisionError(f"coefficient denominator vanishes at n=({n1},{n2})")
        return num.exact_div(den)

    def num_at(self, n1: int, n2: int) -> QLaurent:
        return eval_poly_at_qpowers(self.num, n1, n2)

    def den_at(self, n1: int, n2: int) -> QLaurent:
        return eval_poly_at_qpowers(self.den, n1, n2)

    def eval_mod(self, q0: int, x: int, y: int, p: int) -> int:
        d = eval_poly_mod(self.den, q0, x, y, p)
        if d == 0:
            raise UnluckyPrimeError("coefficient denominator vanishes at the evaluation point")
        return eval_poly_mod(self.num, q0, x, y, p) * pow(d, -1, p) % p

    def subs_q(self, value) -> "RatFuncQMM":
        return RatFuncQMM(self.num.subs({"q": _to_fmpq(value)}), self.den.subs({"q": _to_fmpq(value)}))

    def __repr__(self):
        return f"RatFuncQMM({self})"

    def __str__(self):
        if self.den.is_one():
            return format_mpoly(self.num)
        return f"({format_mpoly(self.num)})/({format_mpoly(self.den)})"


def _as_ratfunc(x) -> RatFuncQMM:
    if isinstance(x, RatFuncQMM):
        return x
    if isinstance(x, fmpq_mpoly):
        return RatFuncQMM(x, None)
    if isinstance(x, (int, Fraction, fmpq, fmpz)):
        return RatFuncQMM(qmm(x), None)
    raise TypeError(f"cannot coerce {type(x).__name__} to RatFuncQMM")


def _from_coprime(num: fmpq_mpoly, den: fmpq_mpoly) -> RatFuncQMM:
    if den.is_zero():
        raise ZeroDivisionError("zero denominator")
    if num.is_zero():
        return RatFuncQMM(QMM.constant(0), QMM.constant(1), _canonical=True)
    c, d = content_split(den)
    return RatFuncQMM(num / _to_fmpq(c), d, _canonical=True)


def _canonical_pair(num: fmpq_mpoly, den: fmpq_mpoly):
    if den.is_zero():
        raise ZeroDivisionError("zero denominator")
    if num.is_zero():
        return QMM.constant(0), QMM.constant(1)
    if not den.is_constant():
        g = num.gcd(den)
        if not g.is_constant():
            num = num / g
            den = den / g
    c, d = content_split(den)
    return num / _to_fmpq(c), d


def ratfunc_canonical(num, den) -> RatFuncQMM:
    return RatFuncQMM(num, den)


def format_mpoly(f, names=None) -> str:
    """Deterministic text for a flint multivariate polynomial (descending terms)."""
    if f.is_zero():
        return "0"
    names = names or f.context().names()
    parts = [_format_term(c, dict(zip(names, e))) for e, c in f.terms()]
    return _join_terms(parts)
