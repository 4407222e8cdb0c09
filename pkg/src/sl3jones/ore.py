"""The localized q-Weyl algebra in two variables.

Operators are stored in M-before-L normal form
``sum c_{b1,b2}(q, M1, M2) L1^b1 L2^b2`` where L_i M_i = q M_i L_i, so that

    L1^b1 L2^b2 R(q, M1, M2) = R(q, q^b1 M1, q^b2 M2) L1^b1 L2^b2.

Acting on sequences, (L1 f)(n1, n2) = f(n1+1, n2) and (M1 f)(n1, n2) = q^n1 f(n1, n2).
Coefficients live either in Q(q, M1, M2) (``SYMBOLIC``) or in the image
F_p(M1, M2) at q = q0 (a ``ModField``).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

from flint import fmpq_mpoly, fmpq_mpoly_ctx

from .arith import (
    QMM,
    ModScalar,
    QLaurent,
    RatFuncQMM,
    _to_fmpq,
    content_split,
    eval_mod,
)
from .jones import SequenceTable, quantum_dim, twist_exponent_v
from .modfield import ModField, RatFuncMod
from .orders import TermOrder

Mono = tuple[int, int]

COMM = fmpq_mpoly_ctx.get(("M1", "M2", "L1", "L2"), ordering="lex")


class SymbolicField:
    """Q(q, M1, M2); mirrors the ModField factory interface."""

    def zero(self) -> RatFuncQMM:
        return RatFuncQMM(0)

    def one(self) -> RatFuncQMM:
        return RatFuncQMM(1)

    def const(self, c) -> RatFuncQMM:
        return RatFuncQMM(c)

    def coerce(self, x) -> RatFuncQMM:
        if isinstance(x, RatFuncQMM):
            return x
        if isinstance(x, RatFuncMod):
            raise TypeError("cannot lift a modular coefficient")
        return RatFuncQMM(x)

    def gens(self):
        q, m1, m2 = QMM.gens()
        return RatFuncQMM(m1), RatFuncQMM(m2)

    def q(self) -> RatFuncQMM:
        return RatFuncQMM(QMM.gens()[0])

    def __repr__(self):
        return "SYMBOLIC"


SYMBOLIC = SymbolicField()


def _field_q(field):
    return field.q() if isinstance(field, SymbolicField) else field.const(field.q0)


class OreOp:
    """Element of the localized q-Weyl algebra (immutable by convention)."""

    __slots__ = ("terms", "field")

    def __init__(self, terms: dict | None = None, field=SYMBOLIC):
        self.field = field
        clean = {}
        for m, c in (terms or {}).items():
            c = field.coerce(c)
            if not c.is_zero():
                clean[(int(m[0]), int(m[1]))] = c
        self.terms = clean

    # construction ---------------------------------------------------------

    @classmethod
    def _raw(cls, terms: dict, field) -> "OreOp":
        op = cls.__new__(cls)
        op.field = field
        op.terms = terms
        return op

    @classmethod
    def monomial(cls, m: Mono, c=1, field=SYMBOLIC) -> "OreOp":
        return cls({m: c}, field)

    @classmethod
    def scalar(cls, c, field=SYMBOLIC) -> "OreOp":
        return cls({(0, 0): c}, field)

    @classmethod
    def L(cls, i: int, field=SYMBOLIC) -> "OreOp":
        return cls.monomial((1, 0) if i == 1 else (0, 1), 1, field)

    @classmethod
    def M(cls, i: int, field=SYMBOLIC) -> "OreOp":
        return cls.scalar(field.gens()[i - 1], field)

    @classmethod
    def q(cls, field=SYMBOLIC) -> "OreOp":
        return cls.scalar(_field_q(field), field)

    # basic queries ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def support(self) -> set[Mono]:
        return set(self.terms)

    def coeff(self, m: Mono):
        return self.terms.get(m, self.field.zero())

    def lm(self, order: TermOrder) -> Mono:
        if not self.terms:
            raise ValueError("zero operator has no leading monomial")
        return order.max(self.terms)

    def lc(self, order: TermOrder):
        return self.terms[self.lm(order)]

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if not isinstance(other, OreOp):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset((m, hash(c)) for m, c in self.terms.items()))

    # ring structure --------------------------------------------------------

    def __add__(self, other):
        other = self._co(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            s = c if s is None else s + c
            if s.is_zero():
                out.pop(m, None)
            else:
                out[m] = s
        return OreOp._raw(out, self.field)

    __radd__ = __add__

    def __neg__(self):
        return OreOp._raw({m: -c for m, c in self.terms.items()}, self.field)

    def __sub__(self, other):
        return self + (-self._co(other))

    def __rsub__(self, other):
        return self._co(other) - self

    def __mul__(self, other):
        if isinstance(other, OreOp):
            return ore_mul(self, other)
        return ore_mul(self, OreOp.scalar(other, self.field))

    def __rmul__(self, other):
        return self.lmul(other)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of an operator")
        out = OreOp.scalar(1, self.field)
        for _ in range(n):
            out = out * self
        return out

    def _co(self, other) -> "OreOp":
        if isinstance(other, OreOp):
            if other.field != self.field and not (
                isinstance(other.field, SymbolicField) and isinstance(self.field, SymbolicField)
            ):
                raise ValueError("operators over different coefficient fields")
            return other
        return OreOp.scalar(other, self.field)

    def lmul(self, c) -> "OreOp":
        """c * self for a coefficient c (no shift, c sits left of everything)."""
        c = self.field.coerce(c)
        if c.is_zero():
            return OreOp._raw({}, self.field)
        return OreOp._raw({m: c * a for m, a in self.terms.items()}, self.field)

    def shift_left(self, u: Mono) -> "OreOp":
        """L^u * self."""
        if u == (0, 0):
            return self
        return OreOp._raw(
            {(m[0] + u[0], m[1] + u[1]): c.shift(u[0], u[1]) for m, c in self.terms.items()},
            self.field,
        )

    def map_coeffs(self, fn: Callable, field=None) -> "OreOp":
        return OreOp({m: fn(c) for m, c in self.terms.items()}, field or self.field)

    def to_mod(self, field: ModField) -> "OreOp":
        """Image under q -> q0 mod p."""
        if isinstance(self.field, ModField):
            if self.field != field:
                raise ValueError("already specialized elsewhere")
            return self
        return OreOp({m: field.from_ratfunc(c) for m, c in self.terms.items()}, field)

    def is_integral(self) -> bool:
        return all(c.is_polynomial() for c in self.terms.values())

    def mdegree(self) -> int:
        """Total (M1, M2)-degree of an integral representative."""
        op = self if self.is_integral() else canonicalize(self, TermOrder(), "integral")
        if isinstance(self.field, ModField):
            return max(c.num.total_degree() for c in op.terms.values())
        return max(max((e[1] + e[2] for e in c.num.monoms()), default=0) for c in op.terms.values())

    def __repr__(self):
        from .formats import operator_line_terms

        return "OreOp(" + " + ".join(operator_line_terms(self)) + ")"


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def ore_mul(P: OreOp, Q: OreOp) -> OreOp:
    """Normal-form product P*Q using L^u R = R(q, q^u1 M1, q^u2 M2) L^u."""
    Q = P._co(Q)
    out: dict = {}
    for u, a in P.terms.items():
        for w, b in Q.terms.items():
            m = (u[0] + w[0], u[1] + w[1])
            t = a * b.shift(u[0], u[1])
            s = out.get(m)
            out[m] = t if s is None else s + t
    return OreOp._raw({m: c for m, c in out.items() if not c.is_zero()}, P.field)


def tau_map(P: OreOp) -> OreOp:
    """Swap M1 <-> M2 and L1 <-> L2."""
    return OreOp._raw({(m[1], m[0]): c.swap() for m, c in P.terms.items()}, P.field)


@dataclass
class SequenceOracle:
    """Evaluator (n1, n2) -> value on a declared rectangle."""

    fn: Callable[[int, int], object]
    mode: str = "symbolic"
    v0: int | None = None
    p: int | None = None
    bound: int | None = None  # domain is [0, bound]^2; None for unbounded

    def __call__(self, n1: int, n2: int):
        if n1 < 0 or n2 < 0 or (self.bound is not None and max(n1, n2) > self.bound):
            raise IndexError(f"({n1},{n2}) outside the oracle domain")
        return self.fn(n1, n2)

    @classmethod
    def from_table(cls, table: SequenceTable, bound: int | None = None) -> "SequenceOracle":
        return cls(table.value, table.mode, table.v0, table.p, bound)

    @classmethod
    def constant(cls, value=1, mode="symbolic", v0=None, p=None) -> "SequenceOracle":
        if mode == "symbolic":
            c = QLaurent.constant(value)
            return cls(lambda n1, n2: c, mode)
        c = ModScalar(value % p, p)
        return cls(lambda n1, n2: c, mode, v0, p)

    def scaled(self, h: Callable[[int, int], object]) -> "SequenceOracle":
        """Oracle of n -> h(n) * self(n)."""
        return SequenceOracle(lambda a, b: h(a, b) * self.fn(a, b), self.mode, self.v0, self.p, self.bound)


def ore_apply(P: OreOp, f: SequenceOracle, n1: int, n2: int):
    """(P f)(n1, n2) = sum_b c_b(q, q^n1, q^n2) f(n1+b1, n2+b2)."""
    if f.mode == "symbolic":
        if not isinstance(P.field, SymbolicField):
            raise ValueError("a modular operator cannot act on a symbolic sequence")
        acc = QLaurent.zero()
        for m, c in P.terms.items():
            acc = acc + c.eval_qpowers(n1, n2) * f(n1 + m[0], n2 + m[1])
        return acc
    p = f.p
    if isinstance(P.field, ModField):
        if (P.field.v0, P.field.p) != (f.v0, f.p):
            raise ValueError("operator and sequence specialized differently")
        acc = 0
        for m, c in P.terms.items():
            acc += c.eval_qpowers(n1, n2) * int(f(n1 + m[0], n2 + m[1]))
        return ModScalar(acc % p, p)
    q0 = pow(f.v0, 6, p)
    x, y = pow(q0, n1, p), pow(q0, n2, p)
    acc = 0
    for m, c in P.terms.items():
        acc += c.eval_mod(q0, x, y, p) * int(f(n1 + m[0], n2 + m[1]))
    return ModScalar(acc % p, p)


def op_as_oracle(P: OreOp, f: SequenceOracle) -> SequenceOracle:
    """The sequence P f, for composing actions."""
    lo = max((max(m) for m in P.terms), default=0)
    bound = None if f.bound is None else f.bound - lo
    return SequenceOracle(lambda a, b: ore_apply(P, f, a, b), f.mode, f.v0, f.p, bound)


# ---------------------------------------------------------------------------
# canonical forms and q = 1
# ---------------------------------------------------------------------------


def canonicalize(P: OreOp, order: TermOrder | None = None, flavor: str = "monic") -> OreOp:
    """Monic (leading coefficient 1) or integral-primitive representative.

    Both are invariant under left multiplication by nonzero field elements.
    """
    if P.is_zero():
        raise ValueError("cannot canonicalize the zero operator")
    order = order or TermOrder()
    lm = P.lm(order)
    if flavor == "monic":
        inv = P.terms[lm].inverse()
        return OreOp._raw({m: inv * c for m, c in P.terms.items()}, P.field)
    if flavor != "integral":
        raise ValueError(f"unknown flavor {flavor!r}")
    if isinstance(P.field, ModField):
        return _integral_mod(P, lm)
    return _integral_sym(P, lm)


def _integral_sym(P: OreOp, lm: Mono) -> OreOp:
    den = None
    for c in P.terms.values():
        if not c.den.is_one():
            den = c.den if den is None else den * (c.den / den.gcd(c.den))
    nums = {}
    for m, c in P.terms.items():
        nums[m] = c.num if den is None else c.num * (den / c.den)
    g = None
    for f in nums.values():
        g = f if g is None else g.gcd(f)
        if g.is_constant():
            break
    if g is not None and not g.is_constant():
        nums = {m: f / g for m, f in nums.items()}
    # integer content and sign via the leading term's coefficient
    cont = None
    from math import gcd as igcd

    num_g = 0
    den_l = 1
    for f in nums.values():
        for c in f.coeffs():
            num_g = igcd(num_g, int(c.p))
            d = int(c.q)
            den_l = den_l * d // igcd(den_l, d)
    cont = Fraction(num_g, den_l)
    if nums[lm].leading_coefficient() < 0:
        cont = -cont
    s = _to_fmpq(cont)
    return OreOp._raw({m: RatFuncQMM(f / s, None) for m, f in nums.items()}, P.field)


def _integral_mod(P: OreOp, lm: Mono) -> OreOp:
    field = P.field
    den = None
    for c in P.terms.values():
        if not c.den.is_one():
            den = c.den if den is None else den * (c.den / den.gcd(c.den))
    nums = {m: (c.num if den is None else c.num * (den / c.den)) for m, c in P.terms.items()}
    g = None
    for f in nums.values():
        g = f if g is None else g.gcd(f)
        if g.is_constant():
            break
    if g is not None and not g.is_constant():
        nums = {m: f / g for m, f in nums.items()}
    lc = int(nums[lm].leading_coefficient())
    inv = pow(lc, -1, field.p)
    return OreOp._raw(
        {m: RatFuncMod(field, f * inv, field._one, True) for m, f in nums.items()}, field
    )


def ore_equal_up_to_unit(P: OreOp, Q: OreOp, order: TermOrder | None = None) -> bool:
    if P.is_zero() or Q.is_zero():
        return P.is_zero() and Q.is_zero()
    order = order or TermOrder()
    return canonicalize(P, order) == canonicalize(Q, order)


def epsilon_q1(P: OreOp) -> fmpq_mpoly:
    """q = 1 image as a commutative polynomial in (M1, M2, L1, L2)."""
    if not isinstance(P.field, SymbolicField):
        raise ValueError("epsilon needs an exact operator")
    if not P.is_integral():
        raise ValueError("epsilon is only defined on denominator-cleared operators; canonicalize first")
    acc = {}
    for (b1, b2), c in P.terms.items():
        for (e0, e1, e2), a in c.num.terms():
            key = (e1, e2, b1, b2)
            acc[key] = acc.get(key, 0) + a
    return COMM.from_dict({k: v for k, v in acc.items() if v != 0})


def comm_content_split(f: fmpq_mpoly) -> tuple[fmpq_mpoly, fmpq_mpoly]:
    """Split a (M1, M2, L1, L2) polynomial into its largest factor free of
    L1, L2 (times the rational content) and the remaining primitive part."""
    if f.is_zero():
        raise ValueError("zero polynomial")
    by_l: dict = {}
    for (e1, e2, b1, b2), c in f.terms():
        by_l.setdefault((b1, b2), {})[(e1, e2, 0, 0)] = c
    g = None
    for d in by_l.values():
        h = COMM.from_dict(d)
        g = h if g is None else g.gcd(h)
    prim = f / g
    c, prim = _comm_content(prim)
    return g * c, prim


def _comm_content(f: fmpq_mpoly):
    from math import gcd as igcd

    num, den = 0, 1
    for c in f.coeffs():
        num = igcd(num, int(c.p))
        d = int(c.q)
        den = den * d // igcd(den, d)
    cont = Fraction(num, den)
    if f.leading_coefficient() < 0:
        cont = -cont
    s = _to_fmpq(cont)
    return s, f / s


def epsilon_primitive(P: OreOp) -> fmpq_mpoly:
    """Primitive part of ε(P) after removing the (M1, M2) content factor."""
    return comm_content_split(epsilon_q1(P))[1]


# ---------------------------------------------------------------------------
# normalization transport  F = d * theta^c * f
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExtMonomial:
    """v^e * Mt1^a1 * Mt2^a2 with q = v^6 and M_i = Mt_i^6."""

    e: int = 0
    a1: int = 0
    a2: int = 0

    def __mul__(self, other: "ExtMonomial") -> "ExtMonomial":
        return ExtMonomial(self.e + other.e, self.a1 + other.a1, self.a2 + other.a2)

    def inverse(self) -> "ExtMonomial":
        return ExtMonomial(-self.e, -self.a1, -self.a2)

    def is_base(self) -> bool:
        return self.e % 6 == 0 and self.a1 % 6 == 0 and self.a2 % 6 == 0

    def to_base(self) -> RatFuncQMM:
        q, m1, m2 = QMM.gens()
        num = QMM.constant(1)
        den = QMM.constant(1)
        for g, k in ((q, self.e // 6), (m1, self.a1 // 6), (m2, self.a2 // 6)):
            if k >= 0:
                num = num * g**k
            else:
                den = den * g ** (-k)
        return RatFuncQMM(num, den)

    def eval_v(self, n1: int, n2: int) -> QLaurent:
        return QLaurent.v_power(self.e + n1 * self.a1 + n2 * self.a2)


@dataclass
class TransportedOp:
    """Operator over the extension: each term is base coefficient times an
    extension monomial. ``retracted`` marks results living in the base algebra."""

    terms: dict
    retracted: bool
    op: OreOp | None = None

    def residual(self, F: Callable[[int, int], QLaurent], n1: int, n2: int) -> QLaurent:
        """The value at n times the product of the coefficient denominators;
        zero exactly when the operator kills F at n."""
        vals = []
        for (b1, b2), (c, mono) in self.terms.items():
            vals.append((c.num_at(n1, n2) * mono.eval_v(n1, n2) * F(n1 + b1, n2 + b2), c.den_at(n1, n2)))
        acc = QLaurent.zero()
        for i, (x, _) in enumerate(vals):
            for j, (_, d) in enumerate(vals):
                if j != i:
                    x = x * d
            acc = acc + x
        return acc

    def apply(self, F: Callable[[int, int], QLaurent], n1: int, n2: int) -> QLaurent:
        """Value at n; raises InexactDivisionError when it is not a Laurent polynomial."""
        den = QLaurent.constant(1)
        for c, _ in self.terms.values():
            den = den * c.den_at(n1, n2)
        return self.residual(F, n1, n2).exact_div(den)


def d_ratio(b1: int, b2: int) -> RatFuncQMM:
    """d(n + b) / d(n) as an element of Q(q, M1, M2)."""
    q, m1, m2 = QMM.gens()
    num = (q ** (1 + b1) * m1 - 1) * (q ** (1 + b2) * m2 - 1) * (q ** (2 + b1 + b2) * m1 * m2 - 1)
    den = (q * m1 - 1) * (q * m2 - 1) * (q**2 * m1 * m2 - 1) * q ** (b1 + b2)
    return RatFuncQMM(num, den)


def theta_ratio(b1: int, b2: int, c: int) -> ExtMonomial:
    """(theta(n + b) / theta(n))^c as an extension monomial."""
    # exponent of q: ((2 n1 + n2) b1 + (n1 + 2 n2) b2 + b1^2 + b1 b2 + b2^2) / 3 + b1 + b2
    e = 2 * (b1 * b1 + b1 * b2 + b2 * b2) + 6 * (b1 + b2)
    a1 = 2 * (2 * b1 + b2)
    a2 = 2 * (b1 + 2 * b2)
    return ExtMonomial(c * e, c * a1, c * a2)


def conjugate_transport(P: OreOp, c: int, direction: str = "to-TQFT") -> TransportedOp:
    """Conjugate P by h = d * theta^c.

    to-TQFT: P annihilates f  =>  result annihilates h f.
    from-TQFT: the inverse transport.
    """
    if not isinstance(P.field, SymbolicField):
        raise ValueError("transport works on exact operators")
    if direction not in ("to-TQFT", "from-TQFT"):
        raise ValueError(f"unknown direction {direction!r}")
    terms = {}
    for (b1, b2), coef in P.terms.items():
        r = d_ratio(b1, b2)
        t = theta_ratio(b1, b2, c)
        if direction == "to-TQFT":
            r, t = r.inverse(), t.inverse()
        terms[(b1, b2)] = (coef * r, t)
    retracted = all(t.is_base() for _, t in terms.values())
    op = None
    if retracted:
        op = OreOp({m: coef * t.to_base() for m, (coef, t) in terms.items()})
    return TransportedOp(terms, retracted, op)


def tqft_oracle(f: SequenceOracle, c: int) -> SequenceOracle:
    """Symbolic oracle of F = d * theta^c * f."""
    if f.mode != "symbolic":
        raise ValueError("symbolic oracle expected")

    def h(n1, n2):
        return quantum_dim(n1, n2) * QLaurent.v_power(twist_exponent_v(n1, n2, c))

    return f.scaled(h)


def tqft_value_mod(n1: int, n2: int, c: int, v0: int, p: int) -> int:
    h = quantum_dim(n1, n2) * QLaurent.v_power(twist_exponent_v(n1, n2, c))
    return int(eval_mod(h, v0, p))


def ops_from_pairs(pairs: Iterable[tuple[Mono, object]], field=SYMBOLIC) -> OreOp:
    out = OreOp({}, field)
    for m, c in pairs:
        out = out + OreOp.monomial(m, c, field)
    return out
