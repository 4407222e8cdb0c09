"""Recurrence guessing by ansatz with undetermined coefficients.

For a structure set S of exponents (a1, a2, b1, b2) the equations

    sum_S c_{a,b} q^(n1 a1 + n2 a2) f(n1 + b1, n2 + b2) = 0

are generated at grid points (n1, n2) and solved modulo p at q = q0.
``support_search`` walks L-monomials in increasing deglex order like FGLM,
and ``exact_lift`` recovers Q(q) coefficients from many specializations.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from flint import fmpq, nmod_mat, nmod_poly

from .arith import QMM, RatFuncQMM
from .jones import SequenceTable, jones_table
from .modfield import GUESS_PRIME, ModField, check_admissible
from .ore import SYMBOLIC, OreOp, SequenceOracle, canonicalize, ore_apply
from .orders import TermOrder, divides, mono_str
from .reconstruct import crt_pair, interpolate_columns, node_polynomial, ratrec_int, ratrec_poly

log = logging.getLogger(__name__)

Mono = tuple[int, int]


class InsufficientData(RuntimeError):
    pass


class SpuriousShape(RuntimeError):
    pass


@dataclass(frozen=True)
class StructureSet:
    """Exponent tuples (a1, a2, b1, b2) of M1^a1 M2^a2 L1^b1 L2^b2."""

    entries: tuple

    def __post_init__(self):
        if not self.entries:
            raise ValueError("structure set must be nonempty")
        object.__setattr__(self, "entries", tuple(sorted(set(map(tuple, self.entries)), reverse=True)))

    @classmethod
    def dense(cls, l_support, mdeg: int) -> "StructureSet":
        ms = [(a1, d - a1) for d in range(mdeg + 1) for a1 in range(d + 1)]
        return cls(tuple((a1, a2, b[0], b[1]) for b in l_support for a1, a2 in ms))

    @property
    def l_support(self) -> set[Mono]:
        return {(e[2], e[3]) for e in self.entries}

    @property
    def mdeg(self) -> int:
        return max(e[0] + e[1] for e in self.entries)

    @property
    def max_shift(self) -> int:
        return max(max(e[2], e[3]) for e in self.entries)

    def __len__(self):
        return len(self.entries)


@dataclass
class GuessConfig:
    v0: int = 2
    p: int = GUESS_PRIME
    max_ldeg: int = 3
    max_mdeg: int = 30
    oversampling: float = 0.2
    precedence: int = 1
    max_table: int = 140
    alt_v0: int = 3  # cross-check specialization
    alt_p: int = 2147483587


@dataclass
class GuessProblem:
    table: SequenceTable
    structure: StructureSet
    points: list


@dataclass
class GuessResult:
    kernel_dim: int
    structure: StructureSet
    pattern: tuple = ()  # entries with nonzero coordinate in the (1-dim) kernel
    kernel: list = field(default_factory=list)
    op: OreOp | None = None
    provenance: dict = field(default_factory=dict)

    @property
    def l_support(self):
        return self.structure.l_support

    @property
    def mdeg(self):
        return self.structure.mdeg


def grid_side(n_unknowns: int, oversampling: float) -> int:
    need = math.ceil(n_unknowns * (1 + oversampling))
    return max(1, math.isqrt(need - 1) + 1)


def grid_points(side: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(side) for j in range(side)]


def make_problem(table: SequenceTable, structure: StructureSet, oversampling: float = 0.2,
                 max_table: int | None = None) -> GuessProblem:
    # a side of at least mdeg + 2 keeps coefficient polynomials from
    # vanishing on the whole grid
    side = max(grid_side(len(structure), oversampling), structure.mdeg + 2)
    need = side - 1 + structure.max_shift
    if max_table is not None and need > max_table:
        raise InsufficientData(f"grid needs the table up to n = {need} > {max_table}")
    return GuessProblem(table, structure, grid_points(side))


def _power_table(q0: int, nmax: int, amax: int, p: int) -> np.ndarray:
    """P[n, a] = q0^(n a) mod p."""
    out = np.ones((nmax + 1, amax + 1), dtype=np.int64)
    for n in range(nmax + 1):
        x = pow(q0, n, p)
        for a in range(1, amax + 1):
            out[n, a] = out[n, a - 1] * x % p
    return out


class _Columns:
    """Column recipe of an ansatz matrix; rows are produced block by block."""

    def __init__(self, prob: GuessProblem):
        tab = prob.table
        if tab.mode != "modular":
            raise ValueError("build_system needs a modular table")
        self.p = p = tab.p
        q0 = pow(tab.v0, 6, p)
        self.pts = np.array(prob.points, dtype=np.int64).reshape(-1, 2)
        nmax = int(self.pts.max()) + prob.structure.max_shift
        self.F = tab.as_array(nmax)
        self.P = _power_table(q0, int(self.pts.max()), prob.structure.mdeg, p)
        self.entries = prob.structure.entries

    def block(self, lo: int, hi: int) -> np.ndarray:
        n1s, n2s = self.pts[lo:hi, 0], self.pts[lo:hi, 1]
        p, P = self.p, self.P
        out = np.empty((len(n1s), len(self.entries)), dtype=np.int64)
        fcache: dict = {}
        for k, (a1, a2, b1, b2) in enumerate(self.entries):
            fv = fcache.get((b1, b2))
            if fv is None:
                fv = fcache[(b1, b2)] = self.F[n1s + b1, n2s + b2]
            out[:, k] = P[n1s, a1] * P[n2s, a2] % p * fv % p
        return out


def build_array(prob: GuessProblem) -> np.ndarray:
    """The ansatz matrix as an int64 array of residues."""
    cols = _Columns(prob)
    return cols.block(0, len(cols.pts))


def build_system(prob: GuessProblem, block_rows: int = 256) -> nmod_mat:
    """The ansatz matrix over F_p, filled in row blocks to bound memory."""
    cols = _Columns(prob)
    nr, nc = len(cols.pts), len(cols.entries)
    if nr * nc <= 4_000_000:
        A = cols.block(0, nr)
        return nmod_mat(nr, nc, A.ravel().tolist(), cols.p)
    mat = nmod_mat(nr, nc, cols.p)
    for lo in range(0, nr, block_rows):
        blk = cols.block(lo, min(nr, lo + block_rows))
        for i, row in enumerate(blk.tolist(), start=lo):
            for j, x in enumerate(row):
                if x:
                    mat[i, j] = x
    return mat


def modular_kernel(mat: nmod_mat, rank_first: int = 3000) -> list[list[int]]:
    """Nullspace basis (deterministic row reduction over F_p).

    Large systems are first checked for full column rank, which avoids
    allocating the n x n nullspace matrix in the common empty-kernel case.
    """
    n = mat.ncols()
    if n >= rank_first and mat.rank() == n:
        return []
    X, nul = mat.nullspace()
    return [[int(X[i, k]) for i in range(n)] for k in range(nul)]


def _normalize_kernel(vec: list[int], p: int) -> list[int]:
    k = next(i for i, c in enumerate(vec) if c)
    inv = pow(vec[k], -1, p)
    return [c * inv % p for c in vec]


def solve_structure(table: SequenceTable, structure: StructureSet, oversampling: float = 0.2,
                    max_table: int | None = None) -> GuessResult:
    t0 = time.time()
    prob = make_problem(table, structure, oversampling, max_table)
    mat = build_system(prob)
    ker = modular_kernel(mat)
    res = GuessResult(len(ker), structure)
    if len(ker) == 1:
        vec = _normalize_kernel(ker[0], table.p)
        res.kernel = vec
        res.pattern = tuple(e for e, c in zip(structure.entries, vec) if c)
    res.provenance = {
        "v0": table.v0,
        "p": table.p,
        "grid": f"[0,{int(math.isqrt(len(prob.points))) - 1}]^2",
        "equations": mat.nrows(),
        "unknowns": mat.ncols(),
        "seconds": round(time.time() - t0, 3),
    }
    return res


def kernel_operator(res: GuessResult, field_: ModField) -> OreOp:
    """The (1-dim) kernel as an operator over F_p(M1, M2)."""
    ctx = field_.ctx
    groups: dict = {}
    for (a1, a2, b1, b2), c in zip(res.structure.entries, res.kernel):
        if c:
            groups.setdefault((b1, b2), {})[(a1, a2)] = c
    from .modfield import RatFuncMod

    return OreOp._raw(
        {b: RatFuncMod(field_, ctx.from_dict(d), field_._one, True) for b, d in groups.items()}, field_
    )


# ---------------------------------------------------------------------------
# structure search
# ---------------------------------------------------------------------------


def monomials_deglex(max_deg: int, precedence: int = 1):
    order = TermOrder.deglex(precedence)
    out = [(i, d - i) for d in range(max_deg + 1) for i in range(d + 1)]
    return order.sorted(out)


@dataclass
class SearchReport:
    shapes: list = field(default_factory=list)  # GuessResults at minimal degree
    standard: list = field(default_factory=list)
    complete: bool = False
    log: list = field(default_factory=list)
    config: GuessConfig | None = None

    def summary(self) -> str:
        lines = []
        for r in self.shapes:
            sup = ", ".join(mono_str(m) for m in TermOrder.deglex().sorted(r.l_support, descending=True))
            lines.append(f"support {{{sup}}} mdeg {r.mdeg} kernel {r.kernel_dim} "
                         f"unknowns {r.provenance.get('unknowns')} equations {r.provenance.get('equations')}")
        std = ", ".join(mono_str(m) for m in self.standard)
        lines.append(f"standard monomials {{{std}}} complete {self.complete}")
        return "\n".join(lines)


def minimal_degree(table: SequenceTable, l_support, hi: int, cfg: GuessConfig,
                   known_hi: GuessResult | None = None) -> GuessResult | None:
    """Smallest M-degree with a nontrivial kernel (kernel existence is
    monotone in the degree), or None if even ``hi`` has none."""
    top = known_hi or solve_structure(table, StructureSet.dense(l_support, hi), cfg.oversampling, cfg.max_table)
    if top.kernel_dim == 0:
        return None
    lo_bad = -1  # largest degree known to have no kernel
    best = top
    hi_ok = hi
    while hi_ok - lo_bad > 1:
        mid = (hi_ok + lo_bad) // 2
        r = solve_structure(table, StructureSet.dense(l_support, mid), cfg.oversampling, cfg.max_table)
        if r.kernel_dim > 0:
            hi_ok, best = mid, r
        else:
            lo_bad = mid
    return best


def support_search(table: SequenceTable, cfg: GuessConfig | None = None) -> SearchReport:
    """FGLM-like search for the leading shapes of a Gröbner basis of the
    annihilator, in increasing deglex order of L-monomials."""
    cfg = cfg or GuessConfig()
    rep = SearchReport(config=cfg)
    leading: list[Mono] = []
    standard: list[Mono] = []
    for m in monomials_deglex(cfg.max_ldeg, cfg.precedence):
        if any(divides(u, m) for u in leading):
            continue
        sup = [m] + [s for s in standard]
        try:
            r = minimal_degree(table, sup, cfg.max_mdeg, cfg)
        except InsufficientData as exc:
            rep.log.append(f"{mono_str(m)}: insufficient data ({exc})")
            raise
        if r is None:
            standard.append(m)
            rep.log.append(f"{mono_str(m)}: standard up to mdeg {cfg.max_mdeg}")
            continue
        if r.kernel_dim != 1:
            rep.log.append(f"{mono_str(m)}: kernel dimension {r.kernel_dim} at mdeg {r.mdeg}")
        leading.append(m)
        rep.shapes.append(r)
        rep.log.append(f"{mono_str(m)}: shape at mdeg {r.mdeg}")
        if _staircase_closed(leading, cfg.max_ldeg):
            rep.complete = True
            break
    rep.standard = standard
    if not rep.shapes:
        raise InsufficientData("no recurrence shape found within the configured bounds")
    if not rep.complete:
        rep.complete = _staircase_closed(leading, cfg.max_ldeg)
    return rep


def _staircase_closed(leading: list[Mono], max_deg: int) -> bool:
    if not any(m[1] == 0 for m in leading) or not any(m[0] == 0 for m in leading):
        return False
    for d in range(max_deg + 1):
        if all(any(divides(u, (i, d - i)) for u in leading) for i in range(d + 1)):
            return True
    return False


def cross_check(table_a: SequenceTable, table_b: SequenceTable, structure: StructureSet,
                oversampling: float = 0.2) -> bool:
    """Kernel dimension and vanishing pattern agree at two specializations."""
    ra = solve_structure(table_a, structure, oversampling)
    rb = solve_structure(table_b, structure, oversampling)
    return ra.kernel_dim == rb.kernel_dim and ra.pattern == rb.pattern


# ---------------------------------------------------------------------------
# lifting to Q(q)
# ---------------------------------------------------------------------------


def _admissible_v0s(p: int, start: int = 2):
    seen = set()
    v0 = start
    while True:
        q0 = pow(v0, 6, p)
        if q0 not in seen:
            try:
                check_admissible(v0, p)
            except ArithmeticError:
                pass
            else:
                seen.add(q0)
                yield v0
        v0 += 1


def _kernel_at(structure: StructureSet, b: int, v0: int, p: int, oversampling: float, pivot: int):
    tab = jones_table(b, 0, "modular", v0, p, fallback=True)
    r = solve_structure(tab, structure, oversampling)
    if r.kernel_dim != 1:
        return None
    vec = r.kernel
    if vec[pivot] == 0:
        return None
    inv = pow(vec[pivot], -1, p)
    return [c * inv % p for c in vec]


def _reconstruct_prime(xs: list[int], rows: list[list[int]], p: int, guard: int = 3):
    """Rational functions in q from values at q = xs, with a common monic
    denominator; returns (den, nums) as nmod_polys, or None."""
    vals = np.array(rows, dtype=np.int64)
    coeffs = interpolate_columns(xs, vals, p)
    m = node_polynomial(xs, p)
    n = len(xs)
    den = nmod_poly([1], p)
    nums = []
    for k in range(coeffs.shape[0]):
        f = nmod_poly(coeffs[k].tolist(), p)
        g = (f * den) % m
        if g.degree() > n - 1 - guard - den.degree():
            rr = ratrec_poly(f, m, min_gap=guard)
            if rr is None:
                return None
            _, d = rr
            den = den * (d / d.gcd(den)) if not den.is_one() else d
            g = (f * den) % m
            if g.degree() + den.degree() > n - 1 - guard:
                return None
        nums.append(f)
    # rescale everything by the final common denominator
    out = []
    for f in nums:
        g = (f * den) % m
        if g.degree() + den.degree() > n - 1 - guard:
            return None
        out.append(g)
    return den, out


def _poly_key(f: nmod_poly) -> tuple:
    return tuple(int(c) for c in f.coeffs())


@dataclass
class LiftReport:
    points: int
    primes: list
    q_degree: int
    seconds: float


def exact_lift(shape: GuessResult, b: int = 3, cfg: GuessConfig | None = None,
               verify_region: list | None = None, batch: int = 12, max_points: int = 400,
               primes: tuple = (GUESS_PRIME, 2147483587, 2147483579)) -> OreOp:
    """Solve the refined ansatz over Q(q) from modular images.

    Specializations q0 = v0^6 are added in batches until the reconstructed
    rational functions stabilize; integers are recovered by rational
    reconstruction (adding primes via CRT if needed) and the result is
    verified exactly against symbolic table rows.
    """
    cfg = cfg or GuessConfig()
    t0 = time.time()
    structure = StructureSet(shape.pattern)
    # pivot: lex-largest M-monomial of the deglex-leading L-monomial
    lead = TermOrder.deglex(cfg.precedence).max(structure.l_support)
    pivot = min(
        (i for i, e in enumerate(structure.entries) if (e[2], e[3]) == lead),
        key=lambda i: (-structure.entries[i][0], -structure.entries[i][1]),
    )
    images: dict[int, tuple] = {}  # p -> (den, nums)
    used = []
    op = None
    for p in primes:
        xs: list[int] = []
        rows: list[list[int]] = []
        gen = _admissible_v0s(p)
        prev = None
        rec = None
        while len(xs) < max_points:
            for _ in range(batch):
                v0 = next(gen)
                vec = _kernel_at(structure, b, v0, p, cfg.oversampling, pivot)
                if vec is None:
                    log.info("v0=%d at p=%d rejected", v0, p)
                    continue
                xs.append(pow(v0, 6, p))
                rows.append(vec)
            rec = _reconstruct_prime(xs, rows, p)
            if rec is not None:
                key = (_poly_key(rec[0]), tuple(_poly_key(g) for g in rec[1]))
                if key == prev:
                    break
                prev = key
            log.info("p=%d: %d specializations, reconstruction %s", p, len(xs),
                     "pending" if rec is None else f"den degree {rec[0].degree()}")
        else:
            raise SpuriousShape("no stable reconstruction in q")
        images[p] = rec
        used.append(p)
        op = _integer_lift(structure, images)
        if op is not None and _verify_exact(op, b, verify_region):
            break
        op = None
    if op is None:
        raise SpuriousShape("reconstruction did not verify against exact values")
    op = canonicalize(op, TermOrder.deglex(cfg.precedence), "integral")
    op_report = LiftReport(len(xs), used, max(
        max(e[0] for e in c.num.monoms()) for c in op.terms.values()), time.time() - t0)
    log.info("lift: %s", op_report)
    return op


def _integer_lift(structure: StructureSet, images: dict) -> OreOp | None:
    """Combine per-prime (den, nums) by CRT and rational reconstruction."""
    primes = list(images)
    # align: same degrees across primes required
    den0 = images[primes[0]][0]
    if any(images[p][0].degree() != den0.degree() for p in primes):
        return None
    modulus = 1
    acc_den: list[int] = []
    acc_nums: list[list[int]] = []
    for p in primes:
        den, nums = images[p]
        dcoef = [int(c) for c in den.coeffs()]
        ncoef = [[int(c) for c in g.coeffs()] for g in nums]
        if modulus == 1:
            acc_den, acc_nums, modulus = dcoef, ncoef, p
            continue
        L = max(len(acc_den), len(dcoef))
        acc_den = [crt_pair(_at(acc_den, i), modulus, _at(dcoef, i), p)[0] for i in range(L)]
        new_nums = []
        for a, c in zip(acc_nums, ncoef):
            L = max(len(a), len(c))
            new_nums.append([crt_pair(_at(a, i), modulus, _at(c, i), p)[0] for i in range(L)])
        acc_nums = new_nums
        modulus *= p
    try:
        den = _ratpoly(acc_den, modulus)
        nums = [_ratpoly(a, modulus) for a in acc_nums]
    except ValueError:
        return None
    groups: dict = {}
    for (a1, a2, b1, b2), f in zip(structure.entries, nums):
        for e, c in f.items():
            groups.setdefault((b1, b2), {})[(e, a1, a2)] = c
    dpoly = QMM.from_dict({(e, 0, 0): c for e, c in den.items()})
    terms = {b: RatFuncQMM(QMM.from_dict(d), dpoly) for b, d in groups.items()}
    return OreOp(terms)


def _at(lst, i):
    return lst[i] if i < len(lst) else 0


def _ratpoly(coeffs: list[int], m: int) -> dict:
    out = {}
    for i, c in enumerate(coeffs):
        if c % m == 0:
            continue
        r = ratrec_int(c, m)
        if r is None:
            raise ValueError("integer reconstruction failed")
        out[i] = fmpq(r.numerator, r.denominator)
    return out


def _verify_exact(op: OreOp, b: int, region: list | None) -> bool:
    region = region or [(i, j) for i in range(4) for j in range(4)]
    f = SequenceOracle.from_table(jones_table(b, 0, "symbolic"))
    return all(ore_apply(op, f, i, j).is_zero() for i, j in region)


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------


@dataclass
class VerifyReport:
    passed: bool
    checked: int
    failures: list

    def __bool__(self):
        return self.passed


def heldout_verify(P: OreOp, table: SequenceTable | SequenceOracle, region) -> VerifyReport:
    """Apply P at every point of ``region``; pass iff all values vanish."""
    f = table if isinstance(table, SequenceOracle) else SequenceOracle.from_table(table)
    fails = []
    n = 0
    for (i, j) in region:
        n += 1
        v = ore_apply(P, f, i, j)
        zero = v.is_zero() if hasattr(v, "is_zero") else int(v) == 0
        if not zero:
            fails.append((i, j))
    return VerifyReport(not fails, n, fails)


def region_square(lo: int, hi: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(lo, hi + 1) for j in range(lo, hi + 1)]
