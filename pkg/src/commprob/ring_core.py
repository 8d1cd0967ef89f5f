"""Finite rings given by structure constants over a product of cyclic groups.

A ring with moduli ``d = (d_1, ..., d_k)`` has additive group
``Z/d_1 x ... x Z/d_k`` and multiplication fixed by
``e_i * e_j = sum_t c[i][j][t] e_t``.  No multiplicative identity is assumed.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from pathlib import Path
from typing import Iterator, Sequence

from commprob.exact_arith import snf_diagonal

Element = tuple[int, ...]

BRUTE_FORCE_CAP = 4096


class RingFormatError(ValueError):
    """Malformed ring data; ``index`` points at the offending ``(i, j, t)``."""

    def __init__(self, message: str, index: tuple[int, ...] | None = None):
        super().__init__(message if index is None else f"{message} at {index}")
        self.index = index


@dataclass(frozen=True)
class Violation:
    kind: str  # "well-definedness" or "associativity"
    index: tuple[int, ...]
    detail: str = ""

    def to_json(self) -> dict:
        return {"kind": self.kind, "index": list(self.index), "detail": self.detail}


@dataclass(frozen=True)
class FiniteRing:
    moduli: tuple[int, ...]
    structure: tuple[tuple[tuple[int, ...], ...], ...]
    _products: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        moduli = tuple(int(d) for d in self.moduli)
        k = len(moduli)
        if k == 0:
            raise RingFormatError("ring needs at least one modulus")
        if any(d < 2 for d in moduli):
            raise RingFormatError("moduli must be >= 2")
        if len(self.structure) != k:
            raise RingFormatError(f"structure has {len(self.structure)} rows, expected {k}")
        rows = []
        for i, row in enumerate(self.structure):
            if len(row) != k:
                raise RingFormatError(f"structure row has length {len(row)}, expected {k}", (i,))
            cells = []
            for j, vec in enumerate(row):
                if len(vec) != k:
                    raise RingFormatError(f"product vector has length {len(vec)}, expected {k}", (i, j))
                for t, c in enumerate(vec):
                    if not isinstance(c, int) or isinstance(c, bool):
                        raise RingFormatError("structure constant is not an integer", (i, j, t))
                    if not 0 <= c < moduli[t]:
                        raise RingFormatError(
                            f"structure constant {c} outside [0, {moduli[t]})", (i, j, t))
                cells.append(tuple(vec))
            rows.append(tuple(cells))
        object.__setattr__(self, "moduli", moduli)
        object.__setattr__(self, "structure", tuple(rows))

    # -- construction -------------------------------------------------------

    @classmethod
    def zero(cls, moduli: Sequence[int]) -> "FiniteRing":
        k = len(moduli)
        return cls(tuple(moduli), tuple(tuple((0,) * k for _ in range(k)) for _ in range(k)))

    @classmethod
    def from_json(cls, data: dict) -> "FiniteRing":
        if not isinstance(data, dict) or "moduli" not in data or "structure" not in data:
            raise RingFormatError('ring file must be an object with "moduli" and "structure"')
        try:
            structure = tuple(tuple(tuple(vec) for vec in row) for row in data["structure"])
        except TypeError as exc:
            raise RingFormatError(f"structure is not a k x k x k array ({exc})") from None
        return cls(tuple(data["moduli"]), structure)

    @classmethod
    def load(cls, path: str | Path) -> "FiniteRing":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def to_json(self) -> dict:
        return {"moduli": list(self.moduli),
                "structure": [[list(v) for v in row] for row in self.structure]}

    def opposite(self) -> "FiniteRing":
        k = self.rank
        return FiniteRing(self.moduli, tuple(
            tuple(self.structure[j][i] for j in range(k)) for i in range(k)))

    # -- basics ---------------------------------------------------------------

    @property
    def rank(self) -> int:
        return len(self.moduli)

    @property
    def size(self) -> int:
        return prod(self.moduli)

    def elements(self) -> Iterator[Element]:
        return itertools.product(*(range(d) for d in self.moduli))

    def basis(self, i: int) -> Element:
        return tuple(int(t == i) for t in range(self.rank))

    def check_element(self, x: Sequence[int]) -> Element:
        if len(x) != self.rank or any(not 0 <= a < d for a, d in zip(x, self.moduli)):
            raise ValueError(f"element {tuple(x)} is not reduced for moduli {self.moduli}")
        return tuple(x)

    def add(self, x: Element, y: Element) -> Element:
        return tuple((a + b) % d for a, b, d in zip(x, y, self.moduli))

    def neg(self, x: Element) -> Element:
        return tuple(-a % d for a, d in zip(x, self.moduli))

    def multiply(self, x: Sequence[int], y: Sequence[int]) -> Element:
        x = self.check_element(x)
        y = self.check_element(y)
        return self._mul(x, y)

    def _mul(self, x: Element, y: Element) -> Element:
        k = self.rank
        out = [0] * k
        c = self.structure
        for i in range(k):
            if not x[i]:
                continue
            for j in range(k):
                if not y[j]:
                    continue
                s = x[i] * y[j]
                for t, v in enumerate(c[i][j]):
                    if v:
                        out[t] += s * v
        return tuple(v % d for v, d in zip(out, self.moduli))

    def is_commutative(self) -> bool:
        k = self.rank
        return all(self.structure[i][j] == self.structure[j][i]
                   for i in range(k) for j in range(i + 1, k))

    def product_table(self) -> dict[tuple[Element, Element], Element]:
        if self._products is None:
            elems = list(self.elements())
            object.__setattr__(self, "_products",
                               {(x, y): self._mul(x, y) for x in elems for y in elems})
        return self._products


def validate(ring: FiniteRing) -> list[Violation]:
    """Every well-definedness or associativity failure; empty means a valid ring."""
    d = ring.moduli
    k = ring.rank
    c = ring.structure
    report = []
    for i, j, t in itertools.product(range(k), repeat=3):
        v = c[i][j][t]
        if (d[i] * v) % d[t] or (d[j] * v) % d[t]:
            report.append(Violation("well-definedness", (i, j, t),
                                    f"{v} not killed by d_{i}={d[i]} and d_{j}={d[j]} mod {d[t]}"))
    if report:
        return report
    for i, j, l in itertools.product(range(k), repeat=3):
        ei, ej, el = ring.basis(i), ring.basis(j), ring.basis(l)
        left = ring._mul(ring._mul(ei, ej), el)
        right = ring._mul(ei, ring._mul(ej, el))
        if left != right:
            report.append(Violation("associativity", (i, j, l), f"{left} != {right}"))
    return report


def commuting_probability_bruteforce(ring: FiniteRing, cap: int = BRUTE_FORCE_CAP) -> Fraction:
    """Pair count ``|{(x, y) : xy = yx}| / |R|^2``."""
    n = ring.size
    if n > cap:
        raise ValueError(f"|R| = {n} exceeds brute-force cap {cap}")
    elems = list(ring.elements())
    mul = ring._mul
    hits = 0
    for a, x in enumerate(elems):
        hits += 1  # x commutes with itself
        for y in elems[a + 1:]:
            if mul(x, y) == mul(y, x):
                hits += 2
    return Fraction(hits, n * n)


def commutator_matrix(ring: FiniteRing, x: Element) -> list[list[int]]:
    """Integer matrix of ``y -> xy - yx``; column ``j`` is the image of ``e_j``."""
    k = ring.rank
    cols = []
    for j in range(k):
        ej = ring.basis(j)
        xy = ring._mul(x, ej)
        yx = ring._mul(ej, x)
        cols.append([(a - b) % d for a, b, d in zip(xy, yx, ring.moduli)])
    return [[cols[j][t] for j in range(k)] for t in range(k)]


def centralizer_size(ring: FiniteRing, x: Sequence[int]) -> int:
    """``|{y : xy = yx}|`` as the index of the lattice spanned by ``[M_x | D]``."""
    x = ring.check_element(x)
    k = ring.rank
    m = commutator_matrix(ring, x)
    block = [m[t] + [ring.moduli[t] if s == t else 0 for s in range(k)] for t in range(k)]
    return prod(snf_diagonal(block))


def centralizer_size_bruteforce(ring: FiniteRing, x: Sequence[int]) -> int:
    x = ring.check_element(x)
    return sum(ring._mul(x, y) == ring._mul(y, x) for y in ring.elements())


def commuting_probability_fast(ring: FiniteRing) -> Fraction:
    """``sum_x |C(x)| / |R|^2`` with centralizers counted by Smith normal form."""
    if ring.is_commutative():
        return Fraction(1)
    n = ring.size
    return Fraction(sum(centralizer_size(ring, x) for x in ring.elements()), n * n)


def commuting_probability(ring: FiniteRing, method: str = "fast") -> Fraction:
    if method == "fast":
        return commuting_probability_fast(ring)
    if method == "brute":
        return commuting_probability_bruteforce(ring)
    raise ValueError(f"unknown method {method!r}")


def direct_product(r: FiniteRing, s: FiniteRing) -> FiniteRing:
    """``R x S`` with componentwise operations; the basis of ``R`` comes first."""
    k, m = r.rank, s.rank
    zero = (0,) * (k + m)
    structure = [[zero] * (k + m) for _ in range(k + m)]
    for i in range(k):
        for j in range(k):
            structure[i][j] = r.structure[i][j] + (0,) * m
    for i in range(m):
        for j in range(m):
            structure[k + i][k + j] = (0,) * k + s.structure[i][j]
    return FiniteRing(r.moduli + s.moduli, tuple(tuple(row) for row in structure))


def order4_noncommutative() -> FiniteRing:
    """Moduli (2, 2) with e1e1 = e1, e1e2 = e2 and e2 annihilating everything on the left."""
    return FiniteRing((2, 2), (((1, 0), (0, 1)), ((0, 0), (0, 0))))
