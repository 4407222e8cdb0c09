"""Left-ideal Gröbner bases in the localized q-Weyl algebra.

The coefficient field is Q(q, M1, M2) or its image F_p(M1, M2) at q = q0;
every routine here is generic over the two.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import RatFuncQMM, shift_poly
from .ore import SYMBOLIC, OreOp, canonicalize, tau_map
from .orders import TermOrder, divides, lcm, mono_str

Mono = tuple[int, int]


class NotZeroDimensional(ValueError):
    pass


@dataclass
class ReducedGB:
    generators: list  # monic OreOps
    order: TermOrder

    @property
    def field(self):
        return self.generators[0].field if self.generators else SYMBOLIC

    def leading_monomials(self) -> list[Mono]:
        return [g.lm(self.order) for g in self.generators]

    def supports(self) -> list[list[Mono]]:
        return [self.order.sorted(g.terms, descending=True) for g in self.generators]

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def describe(self) -> str:
        rows = []
        for g in self.generators:
            sup = ", ".join(mono_str(m) for m in self.order.sorted(g.terms, descending=True))
            rows.append("{" + sup + "}")
        return "; ".join(rows)


@dataclass
class Staircase:
    monomials: list  # sorted ascending under the basis order
    rank: float  # len(monomials) or inf

    @property
    def zero_dimensional(self) -> bool:
        return self.rank != float("inf")


@dataclass
class FanCone:
    """Cone between two rays of the positive quadrant, with its reduced GB."""

    lower: tuple[int, int]  # ray with smaller slope w2/w1
    upper: tuple[int, int]
    basis: ReducedGB | None = None
    leading: list = field(default_factory=list)

    def contains_slope(self, t: Fraction) -> bool:
        return _slope(self.lower) <= t <= _slope(self.upper)


# ---------------------------------------------------------------------------
# reduction
# ---------------------------------------------------------------------------


@dataclass
class ReductionStep:
    coeff: object
    shift: Mono
    index: int


def _monic(P: OreOp, order: TermOrder) -> OreOp:
    return canonicalize(P, order, "monic")


def normal_form(P: OreOp, G, order: TermOrder | None = None, trace: list | None = None) -> OreOp:
    """Full reduction of P modulo the generators of G.

    ``G`` is a ReducedGB or a list of operators (then ``order`` is needed).
    With ``trace`` the steps (c, u, i) with P - NF = sum c L^u g_i are recorded.
    """
    if isinstance(G, ReducedGB):
        order = G.order
        gens = G.generators
    else:
        gens = list(G)
    if order is None:
        raise ValueError("normal_form needs a term order")
    lead = []
    for g in gens:
        lm = g.lm(order)
        lead.append((lm, g if g.terms[lm].is_one() else _monic(g, order)))
    R = P
    rem: dict = {}
    terms = dict(R.terms)
    field_ = P.field
    while terms:
        m = order.max(terms)
        c = terms[m]
        for idx, (lm, g) in enumerate(lead):
            if divides(lm, m):
                u = (m[0] - lm[0], m[1] - lm[1])
                if trace is not None:
                    trace.append(ReductionStep(c, u, idx))
                for w, a in g.terms.items():
                    t = (w[0] + u[0], w[1] + u[1])
                    s = c * a.shift(u[0], u[1])
                    old = terms.get(t)
                    new = -s if old is None else old - s
                    if new.is_zero():
                        terms.pop(t, None)
                    else:
                        terms[t] = new
                terms.pop(m, None)
                break
        else:
            rem[m] = c
            del terms[m]
    return OreOp._raw(rem, field_)


def reduction_certificate(P: OreOp, G: ReducedGB, steps: list) -> OreOp:
    """P - sum c L^u g_i, which equals NF(P) when the trace is sound."""
    acc = P
    for s in steps:
        acc = acc - G.generators[s.index].shift_left(s.shift).lmul(s.coeff)
    return acc


# ---------------------------------------------------------------------------
# Buchberger
# ---------------------------------------------------------------------------


def s_polynomial(f: OreOp, g: OreOp, order: TermOrder) -> OreOp:
    """lc(b) a - lc(a) b with a = L^(w-u) f, b = L^(w-v) g and w = lcm(u, v).

    For monic f, g this is the usual a - b.
    """
    u, v = f.lm(order), g.lm(order)
    w = lcm(u, v)
    a = f.shift_left((w[0] - u[0], w[1] - u[1]))
    b = g.shift_left((w[0] - v[0], w[1] - v[1]))
    ca, cb = a.terms[w], b.terms[w]
    if ca.is_one() and cb.is_one():
        return a - b
    return a.lmul(cb) - b.lmul(ca)


def _reduce(P: OreOp, gens: list[OreOp], order: TermOrder) -> OreOp:
    """Normal form up to a nonzero scalar (fraction-free when exact)."""
    if _is_exact(P.field):
        return pseudo_normal_form(P, gens, order)
    return normal_form(P, gens, order)


def interreduce(gens: list[OreOp], order: TermOrder) -> list[OreOp]:
    """Minimal, fully reduced, monic basis; sorted by leading monomial."""
    gens = [_monic(g, order) for g in gens if not g.is_zero()]
    # drop generators whose leading monomial is divisible by another's
    gens.sort(key=lambda g: order.key(g.lm(order)))
    minimal: list[OreOp] = []
    for g in gens:
        lm = g.lm(order)
        if any(divides(h.lm(order), lm) for h in minimal):
            continue
        minimal.append(g)
    out = []
    for i, g in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1 :]
        r = _reduce(g, others, order) if others else g
        # the leading term of g is irreducible by minimality, so r keeps it
        out.append(_monic(r, order))
    out.sort(key=lambda g: order.key(g.lm(order)))
    return out


def buchberger(gens: list[OreOp], order: TermOrder | None = None, max_pairs: int = 10_000) -> ReducedGB:
    """Reduced Gröbner basis of the left ideal generated by ``gens``.

    Normal selection strategy (smallest lcm first), FIFO among ties.
    """
    order = order or TermOrder()
    basis = [_monic(g, order) for g in gens if not g.is_zero()]
    if not basis:
        raise ValueError("buchberger needs a nonzero generator")
    basis = interreduce(basis, order)
    counter = itertools.count()
    heap: list = []

    def push(i, j):
        w = lcm(basis[i].lm(order), basis[j].lm(order))
        heapq.heappush(heap, (order.key(w), next(counter), i, j))

    for i in range(len(basis)):
        for j in range(i):
            push(j, i)
    done = 0
    while heap:
        _, _, i, j = heapq.heappop(heap)
        done += 1
        if done > max_pairs:
            raise RuntimeError("pair limit exceeded")
        s = s_polynomial(basis[i], basis[j], order)
        r = _reduce(s, basis, order)
        if r.is_zero():
            continue
        basis.append(_monic(r, order))
        k = len(basis) - 1
        for i2 in range(k):
            push(i2, k)
    return ReducedGB(interreduce(basis, order), order)


def is_groebner(G: ReducedGB) -> bool:
    """Every S-polynomial reduces to zero."""
    gens = G.generators
    for i in range(len(gens)):
        for j in range(i):
            if not reduces_to_zero(s_polynomial(gens[i], gens[j], G.order), G):
                return False
    return True


def is_reduced(G: ReducedGB) -> bool:
    lms = G.leading_monomials()
    for i, g in enumerate(G.generators):
        if not g.terms[lms[i]].is_one():
            return False
        for m in g.terms:
            for k, lm in enumerate(lms):
                if k != i and divides(lm, m):
                    return False
    return True


def staircase(G: ReducedGB | list[Mono], order: TermOrder | None = None) -> Staircase:
    """Standard monomials (not divisible by any leading monomial)."""
    if isinstance(G, ReducedGB):
        lms = G.leading_monomials()
        order = G.order
    else:
        lms = list(G)
        order = order or TermOrder()
    a = min((m[0] for m in lms if m[1] == 0), default=None)
    b = min((m[1] for m in lms if m[0] == 0), default=None)
    if a is None or b is None:
        return Staircase([], float("inf"))
    std = [
        (i, j)
        for i in range(a)
        for j in range(b)
        if not any(divides(lm, (i, j)) for lm in lms)
    ]
    return Staircase(order.sorted(std), len(std))


# ---------------------------------------------------------------------------
# the quotient module: multiplication matrices, fast normal forms, FGLM
# ---------------------------------------------------------------------------


class QuotientModule:
    """W / J for a zero-dimensional J, with the standard monomials as basis.

    NF(L^m) is built incrementally as L_i * NF(L^m') using
    NF(L_i * c L^u) = sigma_i(c) NF(L_i L^u).
    """

    def __init__(self, G: ReducedGB):
        sc = staircase(G)
        if not sc.zero_dimensional:
            raise NotZeroDimensional("the ideal is not zero-dimensional")
        self.G = G
        self.field = G.field
        self.basis: list[Mono] = sc.monomials
        self.index = {m: k for k, m in enumerate(self.basis)}
        self._zero = self.field.zero()
        self._cache: dict[Mono, list] = {}
        self._mult: dict[int, list] = {}
        for m in self.basis:
            self._cache[m] = self._unit(m)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def _unit(self, m: Mono) -> list:
        v = [self._zero] * len(self.basis)
        v[self.index[m]] = self.field.one()
        return v

    def vector_of(self, P: OreOp) -> list:
        """Coordinates of an operator already in normal form."""
        v = [self._zero] * len(self.basis)
        for m, c in P.terms.items():
            if m not in self.index:
                raise ValueError(f"{mono_str(m)} is not a standard monomial")
            v[self.index[m]] = c
        return v

    def operator_of(self, v: list) -> OreOp:
        return OreOp._raw({self.basis[k]: c for k, c in enumerate(v) if not c.is_zero()}, self.field)

    def mult_matrix(self, i: int) -> list:
        """Columns NF(L_i * u) for u in the basis."""
        if i not in self._mult:
            step = (1, 0) if i == 1 else (0, 1)
            cols = []
            for u in self.basis:
                w = (u[0] + step[0], u[1] + step[1])
                if w in self.index:
                    cols.append(self._unit(w))
                else:
                    mono = OreOp._raw({w: self.field.one()}, self.field)
                    if _is_exact(self.field):
                        r = exact_normal_form(mono, self.G.generators, self.G.order)
                    else:
                        r = normal_form(mono, self.G)
                    cols.append(self.vector_of(r))
            self._mult[i] = cols
        return self._mult[i]

    def times_L(self, i: int, v: list) -> list:
        """Coordinates of L_i * (sum v_u L^u)."""
        cols = self.mult_matrix(i)
        s = (1, 0) if i == 1 else (0, 1)
        out = [self._zero] * len(self.basis)
        for k, c in enumerate(v):
            if c.is_zero():
                continue
            cs = c.shift(*s)
            for r, a in enumerate(cols[k]):
                if not a.is_zero():
                    out[r] = out[r] + cs * a
        return out

    def monomial_vector(self, m: Mono) -> list:
        if m in self._cache:
            return self._cache[m]
        if not self.basis:  # unit ideal
            return []
        # peel off L2 first when possible, then L1
        if m[1] > 0 and (m[0], m[1] - 1) in self._cache:
            v = self.times_L(2, self.monomial_vector((m[0], m[1] - 1)))
        elif m[0] > 0 and (m[0] - 1, m[1]) in self._cache:
            v = self.times_L(1, self.monomial_vector((m[0] - 1, m[1])))
        elif m[1] > 0:
            v = self.times_L(2, self.monomial_vector((m[0], m[1] - 1)))
        else:
            v = self.times_L(1, self.monomial_vector((m[0] - 1, m[1])))
        self._cache[m] = v
        return v

    def nf_vector(self, P: OreOp) -> list:
        out = [self._zero] * len(self.basis)
        for m, c in P.terms.items():
            v = self.monomial_vector(m)
            for r, a in enumerate(v):
                if not a.is_zero():
                    out[r] = out[r] + c * a
        return out

    def nf(self, P: OreOp) -> OreOp:
        return self.operator_of(self.nf_vector(P))

    def contains(self, P: OreOp) -> bool:
        return all(c.is_zero() for c in self.nf_vector(P))


class _Echelon:
    """Incremental elimination of coordinate vectors over the coefficient field."""

    def __init__(self, field_):
        self.field = field_
        self.rows: list[tuple[int, list, dict]] = []  # (pivot, vector, combination)

    def reduce(self, v: list, label) -> tuple[list, dict]:
        v = list(v)
        comb = {label: self.field.one()}
        for piv, r, rc in self.rows:
            c = v[piv]
            if c.is_zero():
                continue
            f = c / r[piv]
            for k in range(len(v)):
                if not r[k].is_zero():
                    v[k] = v[k] - f * r[k]
            for lab, a in rc.items():
                comb[lab] = comb.get(lab, self.field.zero()) - f * a
        return v, comb

    def add(self, v: list, comb: dict) -> None:
        piv = next(k for k, c in enumerate(v) if not c.is_zero())
        self.rows.append((piv, v, comb))


def fglm(G: ReducedGB, to: TermOrder, module: QuotientModule | None = None) -> ReducedGB:
    """Reduced GB of the same zero-dimensional ideal under another order."""
    Q = module or QuotientModule(G)
    ech = _Echelon(Q.field)
    new: list[OreOp] = []
    new_lms: list[Mono] = []
    seen = {(0, 0)}
    heap = [(to.key((0, 0)), (0, 0))]
    while heap:
        _, m = heapq.heappop(heap)
        if any(divides(lm, m) for lm in new_lms):
            continue
        v = Q.monomial_vector(m)
        r, comb = ech.reduce(v, m)
        if all(c.is_zero() for c in r):
            op = OreOp._raw({k: c for k, c in comb.items() if not c.is_zero()}, Q.field)
            new.append(_monic(op, to))
            new_lms.append(m)
            continue
        ech.add(r, comb)
        for s in ((1, 0), (0, 1)):
            w = (m[0] + s[0], m[1] + s[1])
            if w not in seen:
                seen.add(w)
                heapq.heappush(heap, (to.key(w), w))
    return ReducedGB(interreduce(new, to), to)


def same_ideal(G: ReducedGB, H: ReducedGB) -> bool:
    """Mutual normal forms vanish both ways."""
    return all(reduces_to_zero(h, G) for h in H) and all(reduces_to_zero(g, H) for g in G)


def tau_invariant(G: ReducedGB) -> bool:
    return all(reduces_to_zero(tau_map(g), G) for g in G)


# ---------------------------------------------------------------------------
# support-constrained relations
# ---------------------------------------------------------------------------


def kernel_vectors(cols: list[list], field_) -> list[list]:
    """Basis of {x : sum_k x_k cols[k] = 0} over the coefficient field."""
    n = len(cols)
    if n == 0:
        return []
    rows = len(cols[0])
    A = [[cols[k][r] for k in range(n)] for r in range(rows)]
    pivots = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, rows) if not A[i][c].is_zero()), None)
        if pr is None:
            continue
        A[r], A[pr] = A[pr], A[r]
        inv = A[r][c].inverse()
        A[r] = [x * inv for x in A[r]]
        for i in range(rows):
            if i != r and not A[i][c].is_zero():
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    free = [c for c in range(n) if c not in pivots]
    out = []
    for fc in free:
        x = [field_.zero() for _ in range(n)]
        x[fc] = field_.one()
        for i, pc in enumerate(pivots):
            x[pc] = -A[i][fc]
        out.append(x)
    return out


def support_relation(
    G: ReducedGB,
    support: list[Mono],
    degree_bound: int | None = None,
    module: QuotientModule | None = None,
) -> OreOp | None:
    """A nonzero element of the ideal supported on ``support``, or None.

    Returns the integral-primitive relation; when the kernel has dimension
    one and a degree bound is given, None is returned if its coefficient
    (M1, M2)-degree exceeds the bound.
    """
    Q = module or QuotientModule(G)
    support = list(dict.fromkeys(tuple(m) for m in support))
    cols = [Q.monomial_vector(m) for m in support]
    ker = kernel_vectors(cols, Q.field)
    if not ker:
        return None
    x = ker[0]
    op = OreOp._raw({m: c for m, c in zip(support, x) if not c.is_zero()}, Q.field)
    op = canonicalize(op, G.order, "integral")
    if degree_bound is not None and len(ker) == 1 and op.mdegree() > degree_bound:
        return None
    return op


# ---------------------------------------------------------------------------
# Gröbner fan in the positive quadrant
# ---------------------------------------------------------------------------


def _slope(ray: tuple[int, int]) -> Fraction | float:
    return Fraction(ray[1], ray[0]) if ray[0] else float("inf")


def _ray_of_slope(t) -> tuple[int, int]:
    if t == float("inf"):
        return (0, 1)
    t = Fraction(t)
    return (t.denominator, t.numerator)


def cone_interval(G: ReducedGB) -> tuple:
    """Slopes t = w2/w1 for which every leading monomial stays leading:
    (lm - m) . (1, t) >= 0 for all terms m."""
    lo: Fraction | float = Fraction(0)
    hi: Fraction | float = float("inf")
    for g in G.generators:
        lm = g.lm(G.order)
        for m in g.terms:
            if m == lm:
                continue
            a, b = lm[0] - m[0], lm[1] - m[1]
            # a + b t >= 0
            if b > 0:
                lo = max(lo, Fraction(-a, b))
            elif b < 0:
                hi = min(hi, Fraction(a, -b))
            elif a < 0:
                raise ValueError("leading monomial inconsistent with the weight")
    return lo, hi


def weighted_basis(G: ReducedGB, t: Fraction, module: QuotientModule) -> ReducedGB:
    order = TermOrder.weighted(1, t) if t != float("inf") else TermOrder.weighted(0, 1)
    return fglm(G, order, module)


def groebner_fan(gens, start: Fraction = Fraction(101, 100), module: QuotientModule | None = None) -> list[FanCone]:
    """Cones of the Gröbner fan in the closed positive quadrant, ordered by slope.

    ``gens`` is a ReducedGB or a list of generators (then a deglex basis is
    computed first).  Walks from the seed slope upward and downward, each time
    probing just past the current facet; the probe step is halved whenever
    the probe lands beyond the adjacent cone.
    """
    G = gens if isinstance(gens, ReducedGB) else buchberger(list(gens), TermOrder.deglex())
    Q = module or QuotientModule(G)

    def cone_at(t):
        B = weighted_basis(G, t, Q)
        lo, hi = cone_interval(B)
        if not (lo <= t <= hi):
            raise AssertionError("weight outside its own cone")
        return FanCone(_ray_of_slope(lo), _ray_of_slope(hi), B, B.leading_monomials())

    seed = cone_at(start)
    cones = [seed]
    # upward
    cur = seed
    while _slope(cur.upper) != float("inf"):
        hi = _slope(cur.upper)
        step = Fraction(1, 8)
        while True:
            nxt = cone_at(hi + step)
            if _slope(nxt.lower) == hi:
                break
            if _slope(nxt.lower) < hi:
                raise AssertionError("overlapping cones")
            step /= 2
        cones.append(nxt)
        cur = nxt
    # downward
    cur = seed
    while _slope(cur.lower) != 0:
        lo = _slope(cur.lower)
        step = lo / 8
        while True:
            nxt = cone_at(lo - step)
            if _slope(nxt.upper) == lo:
                break
            if _slope(nxt.upper) > lo:
                raise AssertionError("overlapping cones")
            step /= 2
        cones.insert(0, nxt)
        cur = nxt
    return cones


def interior_rays(cones: list[FanCone]) -> list[tuple[int, int]]:
    rays = {c.lower for c in cones} | {c.upper for c in cones}
    return sorted((r for r in rays if r not in ((1, 0), (0, 1))), key=_slope, reverse=False)


def fan_is_swap_symmetric(cones: list[FanCone]) -> bool:
    rays = set(interior_rays(cones))
    return rays == {(b, a) for a, b in rays}


# ---------------------------------------------------------------------------
# fraction-free reduction for exact operators with polynomial coefficients
# ---------------------------------------------------------------------------


def _poly_terms(P: OreOp) -> dict:
    if not P.is_integral():
        P = canonicalize(P, flavor="integral")
    return {m: c.num for m, c in P.terms.items()}


def _remove_content(terms: dict) -> dict:
    g = None
    for f in terms.values():
        g = f if g is None else g.gcd(f)
        if g.is_constant():
            break
    if g is None or g.is_constant():
        return terms
    return {m: f / g for m, f in terms.items()}


def pseudo_normal_form(P: OreOp, gens: list[OreOp], order: TermOrder, stats: dict | None = None) -> OreOp:
    """A nonzero left multiple c * NF(P) with polynomial coefficients.

    Each step replaces R by sigma^u(lc g) R - lc_m(R) L^u g and strips the
    polynomial content, so no rational functions appear.  Since normal forms
    are left K-linear, the result is zero exactly when NF(P) is.  With
    ``stats`` the multiplier c is returned as stats["multiplier"].
    """
    if P.is_zero():
        return P
    lead = [(g.lm(order), _poly_terms(g)) for g in gens]
    start = _poly_terms(P)
    terms = _remove_content(start)
    m0 = next(iter(start))
    mult = RatFuncQMM(terms[m0]) / P.terms[m0]
    done: dict = {}
    steps = 0
    while terms:
        m = order.max(terms)
        for lm, g in lead:
            if divides(lm, m):
                u = (m[0] - lm[0], m[1] - lm[1])
                a = shift_poly(g[lm], u[0], u[1])
                c = terms[m]
                h = a.gcd(c)
                a, c = a / h, c / h
                new = {w: f * a for w, f in terms.items()}
                new.update({w: f * a for w, f in done.items()})
                for w, f in g.items():
                    t = (w[0] + u[0], w[1] + u[1])
                    s = c * shift_poly(f, u[0], u[1])
                    new[t] = new[t] - s if t in new else -s
                new = {w: f for w, f in new.items() if not f.is_zero()}
                mult = mult * RatFuncQMM(a)
                if new:
                    stripped = _remove_content(new)
                    w0 = next(iter(new))
                    mult = mult * RatFuncQMM(stripped[w0], new[w0])
                    new = stripped
                done = {w: f for w, f in new.items() if w in done}
                terms = {w: f for w, f in new.items() if w not in done}
                steps += 1
                break
        else:
            done[m] = terms.pop(m)
    if stats is not None:
        stats["steps"] = steps
        stats["multiplier"] = mult
    return OreOp({m: RatFuncQMM(f) for m, f in done.items()}, P.field)


def exact_normal_form(P: OreOp, gens: list[OreOp], order: TermOrder) -> OreOp:
    """NF(P) over Q(q, M1, M2), computed fraction-free and rescaled once."""
    st: dict = {}
    R = pseudo_normal_form(P, gens, order, st)
    if R.is_zero():
        return R
    inv = st["multiplier"].inverse()
    return OreOp._raw({m: inv * c for m, c in R.terms.items()}, P.field)


def _is_exact(field_) -> bool:
    return isinstance(field_, type(SYMBOLIC))


def reduces_to_zero(P: OreOp, G, order: TermOrder | None = None) -> bool:
    """NF(P) == 0; fraction-free for exact operators."""
    gens = G.generators if isinstance(G, ReducedGB) else list(G)
    order = G.order if isinstance(G, ReducedGB) else order
    if P.is_zero():
        return True
    if _is_exact(P.field):
        return pseudo_normal_form(P, gens, order).is_zero()
    return normal_form(P, gens, order).is_zero()
