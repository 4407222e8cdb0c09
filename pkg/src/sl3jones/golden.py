"""Golden data printed in the appendices: the full operator P1 (with F1, F2,
F6, F7), the cofactor skeletons of P2, P3, Q1, Q2 and the q = 1 images."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from flint import fmpq_mpoly

from .arith import QMM, RatFuncQMM
from .formats import parse_document, parse_expression, PolyAlgebra, FormatError
from .ore import COMM, OreOp, tau_map
from .orders import TermOrder


@dataclass(frozen=True)
class SkeletonTerm:
    mono: tuple[int, int]
    cofactor: fmpq_mpoly
    factor: str


@dataclass
class GoldenSet:
    P1: OreOp
    F: dict  # printed F_i by name
    skeletons: dict  # name -> list[SkeletonTerm]
    images: dict  # p1, p2, p3, q1, q2 as (M1, M2, L1, L2) polynomials
    texts: dict = field(default_factory=dict)

    def support(self, name: str) -> set:
        if name == "P1":
            return set(self.P1.terms)
        return {t.mono for t in self.skeletons[name]}

    def leading_monomials(self) -> dict:
        out = {"P1": self.P1.lm(TermOrder.deglex())}
        for name in ("P2", "P3"):
            out[name] = TermOrder.deglex().max(self.support(name))
        for name in ("Q1", "Q2"):
            out[name] = TermOrder.lex().max(self.support(name))
        return out


def data_text(name: str) -> str:
    return resources.files("sl3jones").joinpath("data", name).read_text()


def _parse_mono(text: str) -> tuple[int, int]:
    f = parse_expression(text, PolyAlgebra(COMM))
    (e,) = list(f.monoms())
    return (e[2], e[3])


def parse_skeletons(text: str) -> dict:
    out: dict = {}
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [x.strip() for x in line.split("|")]
        if len(parts) != 4:
            raise FormatError("skeleton lines have four fields", no)
        name, mono, cof, fac = parts
        out.setdefault(name, []).append(
            SkeletonTerm(_parse_mono(mono), parse_expression(cof, PolyAlgebra(QMM), no), fac)
        )
    return out


@lru_cache(maxsize=1)
def load_golden() -> GoldenSet:
    """Parse the appendix files and run the load-time self-checks."""
    ta = data_text("appendix_a.ops")
    tb = data_text("appendix_b.txt")
    ts = data_text("skeletons.txt")
    doc = parse_document(ta)
    imgs = parse_document(tb, kind="comm").sections
    g = GoldenSet(doc["P1"], dict(doc.defs), parse_skeletons(ts), imgs, {"A": ta, "B": tb, "skeletons": ts})
    self_check(g)
    return g


def self_check(g: GoldenSet) -> None:
    if tau_map(g.P1) != -g.P1:
        raise AssertionError("golden P1 is not tau-antisymmetric")
    want = {(2, 0), (1, 1), (0, 2), (1, 0), (0, 1), (0, 0)}
    if set(g.P1.terms) != want:
        raise AssertionError("golden P1 has an unexpected L-support")
    L2m1 = COMM.gens()[3] - 1
    for k in ("p2", "p3"):
        _, r = divmod(g.images[k], L2m1)
        if not r.is_zero():
            raise AssertionError(f"{k} lacks the printed factor (-1+L2)")


def printed_coefficient(g: GoldenSet, name: str, mono) -> fmpq_mpoly | None:
    """Full printed coefficient when its F-factor is among the printed ones."""
    for t in g.skeletons.get(name, []):
        if t.mono == tuple(mono) and t.factor in g.F:
            return t.cofactor * g.F[t.factor]
    return None
