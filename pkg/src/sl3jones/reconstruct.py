"""Rational reconstruction over Z and F_p[q], interpolation and CRT."""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

import numpy as np
from flint import nmod_poly


def ratrec_int(a: int, m: int, bound: int | None = None) -> Fraction | None:
    """r/s with r = a s mod m, |r|, s <= bound (default sqrt(m/2))."""
    a %= m
    if bound is None:
        bound = isqrt(m // 2)
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1 > bound:
        qq = r0 // r1
        r0, r1 = r1, r0 - qq * r1
        s0, s1 = s1, s0 - qq * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    if s1 < 0:
        r1, s1 = -r1, -s1
    from math import gcd

    if gcd(s1, m) != 1:
        return None
    return Fraction(r1, s1)


def crt_pair(a1: int, m1: int, a2: int, m2: int) -> tuple[int, int]:
    t = (a2 - a1) * pow(m1, -1, m2) % m2
    return a1 + m1 * t, m1 * m2


def symmetric(a: int, m: int) -> int:
    a %= m
    return a - m if a > m // 2 else a


def interpolate_columns(xs: list[int], values: np.ndarray, p: int) -> np.ndarray:
    """Newton interpolation for many value columns at once.

    ``values`` has shape (n_points, n_cols); returns monomial coefficients
    with shape (n_cols, n_points), lowest degree first.
    """
    n = len(xs)
    x = [int(v) % p for v in xs]
    dd = values.astype(np.int64) % p
    dd = dd.copy()
    # divided differences in place
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            inv = pow((x[i] - x[i - j]) % p, -1, p)
            dd[i] = (dd[i] - dd[i - 1]) % p * inv % p
    # expand Newton form to monomial basis (Horner from the top)
    coeffs = np.zeros((values.shape[1], n), dtype=np.int64)
    coeffs[:, 0] = dd[n - 1]
    deg = 0
    for k in range(n - 2, -1, -1):
        # coeffs <- coeffs * (X - x_k) + dd[k]
        shifted = np.zeros_like(coeffs)
        shifted[:, 1 : deg + 2] = coeffs[:, : deg + 1]
        shifted[:, : deg + 1] = (shifted[:, : deg + 1] - coeffs[:, : deg + 1] * x[k]) % p
        shifted[:, 0] = (shifted[:, 0] + dd[k]) % p
        coeffs = shifted % p
        deg += 1
    return coeffs


def node_polynomial(xs: list[int], p: int) -> nmod_poly:
    out = nmod_poly([1], p)
    for x in xs:
        out = out * nmod_poly([(-x) % p, 1], p)
    return out


def ratrec_poly(f: nmod_poly, m: nmod_poly, min_gap: int = 3):
    """Maximal-quotient rational reconstruction of f modulo m.

    Returns (num, den) with den monic, or None when no quotient of degree
    at least ``min_gap`` appears (too few points).
    """
    p = m.modulus()
    r0, r1 = m, f
    t0, t1 = nmod_poly([0], p), nmod_poly([1], p)
    if r1.is_zero():
        return nmod_poly([0], p), nmod_poly([1], p)
    best = None
    best_deg = -1
    while not r1.is_zero():
        qq, r = divmod(r0, r1)
        if qq.degree() > best_deg:
            best_deg = qq.degree()
            best = (r1, t1)
        r0, r1 = r1, r
        t0, t1 = t1, t0 - qq * t1
    if best is None or best_deg < min_gap:
        return None
    num, den = best
    lc = int(den.leading_coefficient())
    inv = pow(lc, -1, p)
    num = num * inv
    den = den * inv
    if not den.gcd(m).is_one():
        return None
    return num, den
