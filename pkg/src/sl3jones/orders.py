"""Term orders on L-monomials L1^b1 L2^b2."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class TermOrder:
    """deglex, lex or weighted order; ties broken lexicographically.

    ``precedence`` is 1 for L1 > L2 and 2 for L2 > L1.
    """

    kind: str = "deglex"
    precedence: int = 1
    weight: tuple[Fraction, Fraction] | None = None

    def __post_init__(self):
        if self.kind not in ("deglex", "lex", "weighted"):
            raise ValueError(f"unknown order kind {self.kind!r}")
        if self.precedence not in (1, 2):
            raise ValueError("precedence must be 1 (L1>L2) or 2 (L2>L1)")
        if self.kind == "weighted":
            if self.weight is None or len(self.weight) != 2:
                raise ValueError("weighted order needs two weights")
            w = tuple(Fraction(x) for x in self.weight)
            if min(w) < 0:
                raise ValueError("weights must be nonnegative")
            object.__setattr__(self, "weight", w)

    @classmethod
    def deglex(cls, precedence: int = 1) -> "TermOrder":
        return cls("deglex", precedence)

    @classmethod
    def lex(cls, precedence: int = 1) -> "TermOrder":
        return cls("lex", precedence)

    @classmethod
    def weighted(cls, w1, w2, precedence: int = 1) -> "TermOrder":
        return cls("weighted", precedence, (Fraction(w1), Fraction(w2)))

    @classmethod
    def parse(cls, text: str) -> "TermOrder":
        """``deglex:L1,L2``, ``lex:L2,L1`` or ``weighted:4,1[:L1,L2]``."""
        parts = text.strip().split(":")
        kind = parts[0].strip()
        prec = 1
        weight = None
        rest = parts[1:]
        if kind == "weighted":
            if not rest:
                raise ValueError("weighted order needs weights")
            weight = tuple(Fraction(x) for x in rest[0].split(","))
            rest = rest[1:]
        if rest:
            names = [x.strip() for x in rest[0].split(",")]
            if names == ["L1", "L2"]:
                prec = 1
            elif names == ["L2", "L1"]:
                prec = 2
            else:
                raise ValueError(f"bad precedence {rest[0]!r}")
        return cls(kind, prec, weight)

    def __str__(self):
        prec = "L1,L2" if self.precedence == 1 else "L2,L1"
        if self.kind == "weighted":
            return f"weighted:{self.weight[0]},{self.weight[1]}:{prec}"
        return f"{self.kind}:{prec}"

    def key(self, m: tuple[int, int]):
        """Sort key; larger key means larger monomial."""
        b1, b2 = m
        lexkey = (b1, b2) if self.precedence == 1 else (b2, b1)
        if self.kind == "lex":
            return lexkey
        if self.kind == "deglex":
            return (b1 + b2,) + lexkey
        w1, w2 = self.weight
        return (w1 * b1 + w2 * b2,) + lexkey

    def max(self, monos):
        return max(monos, key=self.key)

    def sorted(self, monos, descending: bool = False):
        return sorted(monos, key=self.key, reverse=descending)


def divides(u: tuple[int, int], w: tuple[int, int]) -> bool:
    return u[0] <= w[0] and u[1] <= w[1]


def lcm(u: tuple[int, int], w: tuple[int, int]) -> tuple[int, int]:
    return (max(u[0], w[0]), max(u[1], w[1]))


def mono_str(m: tuple[int, int]) -> str:
    parts = []
    for name, e in zip(("L1", "L2"), m):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts) if parts else "1"
