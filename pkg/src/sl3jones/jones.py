"""sl3 colored Jones polynomial of the torus knots T(2, b).

Symbolic values are ``QLaurent`` (q = v**6); modular values live in Z/p at
q = v0**6.  Tables are cached on disk under ``$SL3JONES_CACHE`` when set.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from .arith import (
    DEFAULT_PRIME,
    DEFAULT_V0,
    V_PER_Q,
    ModScalar,
    QLaurent,
    UnluckyPrimeError,
    eval_mod,
    format_laurent,
)

log = logging.getLogger(__name__)

CACHE_ENV = "SL3JONES_CACHE"


class ConsistencyError(ArithmeticError):
    """Internal check failed; the closed formula produced a non-Laurent value."""


@dataclass(frozen=True)
class Color:
    n1: int
    n2: int

    def __post_init__(self):
        if self.n1 < 0 or self.n2 < 0:
            raise ValueError("colors are nonnegative")


def _check_b(b: int) -> None:
    if b < 1 or b % 2 == 0:
        raise ValueError(f"b must be an odd positive integer, got {b}")


# ---------------------------------------------------------------------------
# building blocks
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def quantum_integer(n: int) -> QLaurent:
    """[n] = (q^(n/2) - q^(-n/2)) / (q^(1/2) - q^(-1/2))."""
    if n == 0:
        return QLaurent()
    if n < 0:
        return -quantum_integer(-n)
    # sum_{j<n} q^((n-1-2j)/2), i.e. v-exponents 3(n-1) down to -3(n-1) in steps of 6
    return QLaurent.from_dict({3 * (n - 1 - 2 * j): 1 for j in range(n)})


@lru_cache(maxsize=None)
def quantum_dim(n1: int, n2: int) -> QLaurent:
    num = quantum_integer(n1 + 1) * quantum_integer(n2 + 1) * quantum_integer(n1 + n2 + 2)
    return num.exact_div(quantum_integer(2))


def twist_exponent_v(n1: int, n2: int, a: int = 1, d: int = 1) -> int:
    """v-exponent of theta_{n1,n2}^(a/d)."""
    if d not in (1, 2, 3, 6):
        raise ValueError("twist denominators are restricted to 1, 2, 3, 6")
    full = 2 * (n1 * n1 + n1 * n2 + n2 * n2) + V_PER_Q * (n1 + n2)
    e, r = divmod(a * full, d)
    if r:
        raise ValueError(f"theta^({a}/{d}) at ({n1},{n2}) is not a v-monomial")
    return e


def twist_pow(c: Color | tuple, a: int, d: int = 1) -> QLaurent:
    n1, n2 = c if isinstance(c, tuple) else (c.n1, c.n2)
    return QLaurent.v_power(twist_exponent_v(n1, n2, a, d))


def _sum_indices(n1: int, n2: int):
    """Yield (sign, a, c) over the three double sums of the closed formula."""
    m = min(n1, n2)
    for l in range(m + 1):
        for k in range(n1 - l + 1):
            yield (-1) ** k, 2 * n1 - 2 * k - 2 * l, 2 * n2 + k - 2 * l
    for l in range(m + 1):
        for k in range(n2 - l + 1):
            yield (-1) ** k, 2 * n1 + k - 2 * l, 2 * n2 - 2 * k - 2 * l
    for l in range(m + 1):
        yield -1, 2 * n1 - 2 * l, 2 * n2 - 2 * l


@lru_cache(maxsize=100_000)
def _summand(b: int, a: int, c: int) -> QLaurent:
    return quantum_dim(a, c) * QLaurent.v_power(twist_exponent_v(a, c, b, 2))


def torus_jones(b: int, n1: int, n2: int) -> QLaurent:
    """f_{b,n1,n2}(q), exactly."""
    _check_b(b)
    Color(n1, n2)
    total = QLaurent.sum((s, _summand(b, a, c)) for s, a, c in _sum_indices(n1, n2))
    try:
        val = total.exact_div(quantum_dim(n1, n2))
    except ArithmeticError as exc:
        raise ConsistencyError(f"non-exact division by d at ({n1},{n2})") from exc
    val = val * QLaurent.v_power(twist_exponent_v(n1, n2, -2 * b))
    if not val.is_integral_in_q():
        raise ConsistencyError(f"f_{{{b},{n1},{n2}}} is not integral in q")
    return val


# ---------------------------------------------------------------------------
# modular evaluation
# ---------------------------------------------------------------------------


class _ModTwistTable:
    """Summand values d_{a,c} * theta_{a,c}^(b/2) at v = v0 modulo p."""

    def __init__(self, b: int, v0: int, p: int):
        self.b, self.v0, self.p = b, v0, p
        self.size = 0
        self.T = np.zeros((0, 0), dtype=np.int64)
        self.qint: list[int] = []

    def quantum_int(self, n: int) -> int:
        p = self.p
        while len(self.qint) <= n:
            k = len(self.qint)
            if k == 0:
                self.qint.append(0)
                continue
            # [k] = sum_j v0^(3(k-1-2j)); recurrence [k] = v^3 [k-1] + v^(-3(k-1))
            prev = self.qint[-1]
            self.qint.append((prev * pow(self.v0, 3, p) + pow(self.v0, -3 * (k - 1), p)) % p)
        return self.qint[n]

    def ensure(self, size: int) -> None:
        if size <= self.size:
            return
        size = max(size, 2 * self.size)
        p, b, v0 = self.p, self.b, self.v0
        inv2 = pow(self.quantum_int(2), -1, p) if self.quantum_int(2) else None
        if inv2 is None:
            raise UnluckyPrimeError("[2] vanishes at this specialization")
        qi = np.array([self.quantum_int(n) for n in range(2 * size + 3)], dtype=np.int64)
        a = np.arange(size)
        A, C = np.meshgrid(a, a, indexing="ij")
        d = qi[A + 1] * qi[C + 1] % p * qi[A + C + 2] % p * inv2 % p
        # v-exponent b*(a^2+ac+c^2) + 3b(a+c); exponents reduced mod p-1
        e = (b * (A * A + A * C + C * C) + 3 * b * (A + C)) % (p - 1)
        th = np.array([pow(v0, int(x), p) for x in e.ravel()], dtype=np.int64).reshape(e.shape)
        self.T = d * th % p
        self.size = size


@lru_cache(maxsize=32)
def _mod_table(b: int, v0: int, p: int) -> _ModTwistTable:
    return _ModTwistTable(b, v0, p)


def _index_arrays(n1: int, n2: int):
    m = min(n1, n2)
    rows, cols, signs = [], [], []
    for l in range(m + 1):
        k = np.arange(n1 - l + 1)
        rows.append(2 * n1 - 2 * k - 2 * l)
        cols.append(2 * n2 + k - 2 * l)
        signs.append(1 - 2 * (k & 1))
        k = np.arange(n2 - l + 1)
        rows.append(2 * n1 + k - 2 * l)
        cols.append(2 * n2 - 2 * k - 2 * l)
        signs.append(1 - 2 * (k & 1))
    l = np.arange(m + 1)
    rows.append(2 * n1 - 2 * l)
    cols.append(2 * n2 - 2 * l)
    signs.append(-np.ones(m + 1, dtype=np.int64))
    return np.concatenate(rows), np.concatenate(cols), np.concatenate(signs)


def torus_jones_mod(b: int, n1: int, n2: int, v0: int = DEFAULT_V0, p: int = DEFAULT_PRIME) -> ModScalar:
    """f_{b,n1,n2} at q = v0**6 in Z/p, computed in the prime field."""
    _check_b(b)
    Color(n1, n2)
    if v0 % p == 0:
        raise ValueError("v0 must be invertible modulo p")
    tab = _mod_table(b, v0, p)
    tab.ensure(2 * (n1 + n2) + 1)
    r, c, s = _index_arrays(n1, n2)
    total = int((tab.T[r, c] * s).sum()) % p
    d = int(tab.T[n1, n2]) * pow(v0, -twist_exponent_v(n1, n2, b, 2), p) % p
    if d == 0:
        raise UnluckyPrimeError(f"quantum dimension d_{{{n1},{n2}}} vanishes modulo {p} at v0={v0}")
    val = total * pow(d, -1, p) * pow(v0, twist_exponent_v(n1, n2, -2 * b), p) % p
    return ModScalar(val, p)


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------


@dataclass
class SequenceTable:
    """Values f_{b,n1,n2} on a square [0, n_max]^2 (symbolic or modular)."""

    b: int
    mode: str  # "symbolic" | "modular"
    v0: int | None = None
    p: int | None = None
    entries: dict = field(default_factory=dict)
    # modular only: reduce the exact value when the prime-field route is unlucky
    fallback: bool = False
    fallback_keys: set = field(default_factory=set)

    @property
    def n_max(self) -> int:
        n = -1
        while all((i, j) in self.entries for i in range(n + 2) for j in range(n + 2)):
            n += 1
            if n > 10_000:
                break
        return n

    def __getitem__(self, key):
        return self.entries[key]

    def __contains__(self, key):
        return key in self.entries

    def value(self, n1: int, n2: int):
        """Entry, computed on demand if absent."""
        key = (n1, n2)
        if key not in self.entries:
            try:
                self.entries[key] = _compute(self.b, self.mode, self.v0, self.p, n1, n2)
            except UnluckyPrimeError:
                if not self.fallback:
                    raise
                self.entries[key] = eval_mod(torus_jones(self.b, n1, n2), self.v0, self.p)
                self.fallback_keys.add(key)
        return self.entries[key]

    def ensure(self, n_max: int) -> "SequenceTable":
        for i in range(n_max + 1):
            for j in range(n_max + 1):
                self.value(i, j)
        return self

    def as_array(self, n_max: int) -> np.ndarray:
        """Modular residues on [0, n_max]^2 as an int64 array."""
        if self.mode != "modular":
            raise ValueError("as_array needs a modular table")
        self.ensure(n_max)
        out = np.empty((n_max + 1, n_max + 1), dtype=np.int64)
        for i in range(n_max + 1):
            for j in range(n_max + 1):
                out[i, j] = int(self.entries[(i, j)])
        return out

    def header(self) -> str:
        if self.mode == "symbolic":
            return f"# mode: symbolic; b: {self.b}"
        return f"# mode: modular; b: {self.b}; v0: {self.v0}; p: {self.p}"

    def dumps(self) -> str:
        lines = [self.header()]
        for (i, j) in sorted(self.entries):
            x = self.entries[(i, j)]
            text = format_laurent(x) if self.mode == "symbolic" else str(int(x))
            lines.append(f"{self.b} {i} {j} : {text}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "SequenceTable":
        from .formats import parse_laurent

        lines = text.splitlines()
        meta = dict(
            part.strip().split(": ", 1) for part in lines[0].lstrip("# ").split(";") if part.strip()
        )
        mode = meta["mode"]
        tab = cls(
            b=int(meta["b"]),
            mode=mode,
            v0=int(meta["v0"]) if "v0" in meta else None,
            p=int(meta["p"]) if "p" in meta else None,
        )
        for line in lines[1:]:
            if not line.strip() or line.startswith("#"):
                continue
            head, body = line.split(":", 1)
            _, i, j = map(int, head.split())
            if mode == "symbolic":
                tab.entries[(i, j)] = parse_laurent(body.strip())
            else:
                tab.entries[(i, j)] = ModScalar(int(body), tab.p)
        return tab


def _compute(b, mode, v0, p, n1, n2):
    if mode == "symbolic":
        return torus_jones(b, n1, n2)
    return torus_jones_mod(b, n1, n2, v0, p)


def cache_path(b: int, mode: str, v0=None, p=None) -> Path | None:
    root = os.environ.get(CACHE_ENV)
    if not root:
        return None
    name = f"jones_b{b}_symbolic.txt" if mode == "symbolic" else f"jones_b{b}_mod_v{v0}_p{p}.txt"
    return Path(root) / name


_TABLES: dict[tuple, SequenceTable] = {}


def jones_table(
    b: int,
    n_max: int,
    mode: str = "symbolic",
    v0: int = DEFAULT_V0,
    p: int = DEFAULT_PRIME,
    fallback: bool = False,
) -> SequenceTable:
    """Table of f_{b,n1,n2} on [0, n_max]^2; memoized in-process and on disk.

    With ``fallback`` a modular entry whose closed-form evaluation hits a
    vanishing quantum dimension is obtained by reducing the exact value.
    """
    _check_b(b)
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    if mode not in ("symbolic", "modular"):
        raise ValueError(f"unknown mode {mode!r}")
    key = (b, mode) if mode == "symbolic" else (b, mode, v0, p)
    tab = _TABLES.get(key)
    path = cache_path(b, mode, v0, p)
    if tab is None:
        if path is not None and path.exists():
            tab = SequenceTable.loads(path.read_text())
        else:
            tab = SequenceTable(b, mode, None if mode == "symbolic" else v0, None if mode == "symbolic" else p)
        _TABLES[key] = tab
    tab.fallback = tab.fallback or fallback
    before = len(tab.entries)
    tab.ensure(n_max)
    if path is not None and len(tab.entries) != before:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(tab.dumps())
        tmp.replace(path)
    return tab


def check_modular_consistency(b: int, n1: int, n2: int, v0: int, p: int) -> bool:
    return torus_jones_mod(b, n1, n2, v0, p) == eval_mod(torus_jones(b, n1, n2), v0, p)
