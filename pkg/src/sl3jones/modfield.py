"""The coefficient field F_p(M1, M2) with q specialized to q0 = v0**6 mod p.

This is the homomorphic image used by all heavy computations: the Ore
shift M_i -> q M_i becomes a diagonal rescaling of monomials, and no
expression swell in q can occur.
"""

from __future__ import annotations

from functools import lru_cache

from flint import fmpq_mpoly, nmod_mpoly, nmod_mpoly_ctx

from .arith import DEFAULT_V0, RatFuncQMM, UnluckyPrimeError, rational_mod

# Largest prime below 2**31 at which q0 = 64 has large multiplicative order.
GUESS_PRIME = 2147483629


@lru_cache(maxsize=None)
def mm_context(p: int):
    return nmod_mpoly_ctx.get(("M1", "M2"), modulus=p, ordering="lex")


def multiplicative_order(a: int, p: int, bound: int | None = None) -> int:
    """Order of ``a`` in (Z/p)^*, or 0 when it exceeds ``bound``."""
    a %= p
    if a == 0:
        raise ValueError("zero has no multiplicative order")
    x = a
    k = 1
    limit = bound if bound is not None else p
    while x != 1:
        x = x * a % p
        k += 1
        if k > limit:
            return 0
    return k


def check_admissible(v0: int, p: int, bound: int = 4096) -> None:
    """Reject specializations where q0 has small order: then q0**k M - 1
    factors collapse and spurious kernels appear."""
    q0 = pow(v0, 6, p)
    k = multiplicative_order(q0, p, bound)
    if k:
        raise UnluckyPrimeError(f"q0 = {v0}^6 has multiplicative order {k} modulo {p}")


class ModField:
    """Factory for elements of F_p(M1, M2) at a fixed (v0, p)."""

    def __init__(self, v0: int = DEFAULT_V0, p: int = GUESS_PRIME):
        self.v0 = v0
        self.p = p
        self.q0 = pow(v0, 6, p)
        self.ctx = mm_context(p)
        self._one = self.ctx.constant(1)
        self._zero = self.ctx.constant(0)

    def __eq__(self, other):
        return isinstance(other, ModField) and (self.v0, self.p) == (other.v0, other.p)

    def __hash__(self):
        return hash((self.v0, self.p))

    def __repr__(self):
        return f"ModField(v0={self.v0}, p={self.p})"

    def zero(self) -> "RatFuncMod":
        return RatFuncMod(self, self._zero, self._one, True)

    def one(self) -> "RatFuncMod":
        return RatFuncMod(self, self._one, self._one, True)

    def const(self, c) -> "RatFuncMod":
        return RatFuncMod(self, self.ctx.constant(rational_mod(c, self.p)), self._one, True)

    def gens(self):
        x, y = self.ctx.gens()
        return RatFuncMod(self, x, self._one, True), RatFuncMod(self, y, self._one, True)

    def poly_from_qmm(self, f: fmpq_mpoly) -> nmod_mpoly:
        acc: dict = {}
        p, q0 = self.p, self.q0
        for (e0, e1, e2), c in f.terms():
            key = (e1, e2)
            acc[key] = (acc.get(key, 0) + rational_mod(c, p) * pow(q0, e0, p)) % p
        return self.ctx.from_dict({k: c for k, c in acc.items() if c})

    def from_ratfunc(self, r: RatFuncQMM) -> "RatFuncMod":
        """Image of an exact coefficient under q -> q0."""
        den = self.poly_from_qmm(r.den)
        if den.is_zero():
            raise UnluckyPrimeError("denominator vanishes under the specialization")
        return RatFuncMod(self, self.poly_from_qmm(r.num), den)

    def coerce(self, x) -> "RatFuncMod":
        if isinstance(x, RatFuncMod):
            return x
        if isinstance(x, RatFuncQMM):
            return self.from_ratfunc(x)
        if isinstance(x, fmpq_mpoly):
            return RatFuncMod(self, self.poly_from_qmm(x), self._one, True)
        return self.const(x)

    def shift_poly(self, f: nmod_mpoly, i: int, j: int) -> nmod_mpoly:
        if (i == 0 and j == 0) or f.is_zero():
            return f
        p = self.p
        a = pow(self.q0, i, p)
        b = pow(self.q0, j, p)
        return self.ctx.from_dict(
            {(e1, e2): int(c) * pow(a, e1, p) * pow(b, e2, p) % p for (e1, e2), c in f.terms()}
        )

    def swap_poly(self, f: nmod_mpoly) -> nmod_mpoly:
        return self.ctx.from_dict({(e2, e1): c for (e1, e2), c in f.terms()})


def _monic(f: nmod_mpoly) -> tuple[int, nmod_mpoly]:
    lc = int(f.leading_coefficient())
    if lc == 1:
        return 1, f
    return lc, f * pow(lc, -1, f.context().modulus())


class RatFuncMod:
    """Reduced fraction num/den over F_p with monic denominator."""

    __slots__ = ("field", "num", "den")

    def __init__(self, field: ModField, num: nmod_mpoly, den: nmod_mpoly, _canonical: bool = False):
        self.field = field
        if not _canonical:
            if den.is_zero():
                raise ZeroDivisionError("zero denominator")
            if num.is_zero():
                den = field._one
            else:
                if not den.is_constant():
                    g = num.gcd(den)
                    if not g.is_constant():
                        num = num / g
                        den = den / g
                lc, den = _monic(den)
                if lc != 1:
                    num = num * pow(lc, -1, field.p)
        self.num = num
        self.den = den

    def _mk(self, num, den, canonical=False):
        return RatFuncMod(self.field, num, den, canonical)

    def _co(self, other) -> "RatFuncMod":
        if isinstance(other, RatFuncMod):
            return other
        return self.field.coerce(other)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def __add__(self, other):
        other = self._co(other)
        if self.den.is_one() and other.den.is_one():
            return self._mk(self.num + other.num, self.den, True)
        if self.den == other.den:
            return self._mk(self.num + other.num, self.den)
        return self._mk(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return self._mk(-self.num, self.den, True)

    def __sub__(self, other):
        return self + (-self._co(other))

    def __rsub__(self, other):
        return self._co(other) - self

    def __mul__(self, other):
        other = self._co(other)
        if self.den.is_one() and other.den.is_one():
            return self._mk(self.num * other.num, self.den, True)
        a, d2 = self.num, other.den
        if not d2.is_one():
            g = a.gcd(d2)
            if not g.is_constant():
                a, d2 = a / g, d2 / g
        b, d1 = other.num, self.den
        if not d1.is_one():
            g = b.gcd(d1)
            if not g.is_constant():
                b, d1 = b / g, d1 / g
        num = a * b
        if num.is_zero():
            return self.field.zero()
        lc, den = _monic(d1 * d2)
        if lc != 1:
            num = num * pow(lc, -1, self.field.p)
        return self._mk(num, den, True)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        lc, num = _monic(self.num)
        return self._mk(self.den * pow(lc, -1, self.field.p), num, True)

    def __truediv__(self, other):
        return self * self._co(other).inverse()

    def __rtruediv__(self, other):
        return self._co(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return self._mk(self.num**n, self.den**n, True)

    def __eq__(self, other):
        if not isinstance(other, RatFuncMod):
            try:
                other = self.field.coerce(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((str(self.num), str(self.den)))

    def shift(self, i: int, j: int) -> "RatFuncMod":
        if i == 0 and j == 0:
            return self
        f = self.field
        num = f.shift_poly(self.num, i, j)
        den = f.shift_poly(self.den, i, j)
        lc, den = _monic(den)
        if lc != 1:
            num = num * pow(lc, -1, f.p)
        return self._mk(num, den, True)

    def swap(self) -> "RatFuncMod":
        f = self.field
        return self._mk(f.swap_poly(self.num), f.swap_poly(self.den))

    def eval_at(self, x: int, y: int) -> int:
        p = self.field.p
        d = int(self.den(x, y)) if not self.den.is_constant() else int(self.den.leading_coefficient())
        if d % p == 0:
            raise UnluckyPrimeError("coefficient denominator vanishes at the evaluation point")
        if self.num.is_zero():
            return 0
        return int(self.num(x, y)) * pow(d, -1, p) % p

    def eval_qpowers(self, n1: int, n2: int) -> int:
        f = self.field
        return self.eval_at(pow(f.q0, n1, f.p), pow(f.q0, n2, f.p))

    def mdegree(self) -> int:
        return max(self.num.total_degree(), self.den.total_degree())

    def __repr__(self):
        return f"RatFuncMod({self})"

    def __str__(self):
        if self.den.is_one():
            return str(self.num)
        return f"({self.num})/({self.den})"
