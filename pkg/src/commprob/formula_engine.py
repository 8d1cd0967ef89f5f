"""Closed-form commuting probabilities of class-2 p-groups and bounded searches.

A class-2 p-group with ``|G| = p^e``, ``|Z(G)| = p^f`` and ``|G'| = p^g`` has
commuting probability ``(p^(e-f) + p^g - 1) / p^(e-f+g)``.  For stem groups
``Z(G) = G'`` and this collapses to ``(p^(e-f) + p^f - 1) / p^e``.  A nilpotent
group is the product of its Sylow subgroups, so attainable values of nilpotent
class-2 groups are products of such factors over distinct primes.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Callable, Iterable, Sequence

import sympy

from commprob.exact_arith import Factorization, factorize


class ShapeError(ValueError):
    pass


def _check_prime(p: int) -> None:
    if not sympy.isprime(p):
        raise ShapeError(f"{p} is not prime")


@dataclass(frozen=True, order=True)
class PPartShape:
    """``|G| = p^e``, ``|Z| = p^f``, ``|G'| = p^g``."""

    p: int
    e: int
    f: int
    g: int
    relax: bool = field(default=False, compare=False)

    def __post_init__(self):
        _check_prime(self.p)
        if not 0 < self.g <= self.f < self.e:
            raise ShapeError(f"need 0 < g <= f < e, got e={self.e} f={self.f} g={self.g}")
        if not self.relax and self.e - self.f < 2:
            raise ShapeError("a nonabelian p-group has |G:Z| >= p^2 (pass relax=True to allow)")


@dataclass(frozen=True, order=True)
class StemShape:
    """Stem group with ``|G| = p^e`` and ``Z(G) = G'`` of order ``p^f``."""

    p: int
    e: int
    f: int
    relax: bool = field(default=False, compare=False)

    def __post_init__(self):
        _check_prime(self.p)
        if not 0 < self.f < self.e:
            raise ShapeError(f"need 0 < f < e, got e={self.e} f={self.f}")
        if not self.relax and self.e - self.f < 2:
            raise ShapeError("a nonabelian p-group has |G:Z| >= p^2 (pass relax=True to allow)")

    def to_json(self) -> list[int]:
        return [self.p, self.e, self.f]


def p_part_value(shape: PPartShape) -> Fraction:
    p, k = shape.p, shape.e - shape.f
    return Fraction(p ** k + p ** shape.g - 1, p ** (k + shape.g))


def stem_p_part_value(shape: StemShape) -> Fraction:
    p = shape.p
    return Fraction(p ** (shape.e - shape.f) + p ** shape.f - 1, p ** shape.e)


def product_value(shapes: Sequence[StemShape]) -> Fraction:
    primes = [s.p for s in shapes]
    if len(set(primes)) != len(primes):
        raise ShapeError(f"repeated prime in {primes}")
    out = Fraction(1)
    for s in shapes:
        out *= stem_p_part_value(s)
    return out


def denominator_prime_support(value: Fraction) -> Factorization:
    return factorize(value.denominator)


# -- reports -------------------------------------------------------------------

@dataclass
class Hit:
    shapes: tuple
    value: Fraction
    denominator_factorization: Factorization

    def to_json(self) -> dict:
        return {
            "shapes": [list(s) if isinstance(s, tuple) else s.to_json() for s in self.shapes],
            "value": f"{self.value.numerator}/{self.value.denominator}",
            "denominator_factorization": [list(pe) for pe in self.denominator_factorization],
        }


@dataclass
class SearchReport:
    bounds: dict
    examined: int = 0
    hits: list[Hit] = field(default_factory=list)
    elapsed: float = 0.0
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "bounds": self.bounds,
            "examined": self.examined,
            "hit_count": len(self.hits),
            "hits": [h.to_json() for h in self.hits],
        }
        out.update(self.extra)
        out["elapsed"] = round(self.elapsed, 6)
        return out

    def same_result(self, other: "SearchReport") -> bool:
        """Equality ignoring elapsed time."""
        a, b = self.to_json(), other.to_json()
        a.pop("elapsed")
        b.pop("elapsed")
        return a == b


# -- mod-p sweep ---------------------------------------------------------------

def numerator_mod_p_sweep(primes: Iterable[int], max_exp: int) -> SearchReport:
    """Residues of ``p^a + p^b - 1`` mod ``p`` for ``1 <= a, b <= max_exp``.

    A hit is a case divisible by ``p``; ``extra["residue_p_minus_1"]`` counts
    cases whose residue is exactly ``p - 1``.
    """
    start = time.perf_counter()
    primes = sorted(primes)
    report = SearchReport(bounds={"primes": primes, "max_exp": max_exp})
    good = 0
    for p in primes:
        _check_prime(p)
        for a in range(1, max_exp + 1):
            for b in range(1, max_exp + 1):
                r = (p ** a + p ** b - 1) % p
                report.examined += 1
                good += r == p - 1
                if r == 0:
                    report.hits.append(Hit(((p, a, b),), Fraction(r), []))
    report.extra["residue_p_minus_1"] = good
    report.elapsed = time.perf_counter() - start
    return report


# -- product searches ----------------------------------------------------------

# Predicates see the reduced value as (numerator, denominator) plus the primes
# of the factor list; the denominator's primes always lie among them.

def square_free_denominator(num: int, den: int, primes: Sequence[int]) -> bool:
    return den > 1 and all(den % (p * p) for p in primes)


def reciprocal_value(num: int, den: int, primes: Sequence[int]) -> bool:
    return num == 1 and den > 1


def stem_shapes(p: int, max_exp: int, relax: bool = False) -> list[StemShape]:
    """All stem shapes for ``p`` with ``e <= max_exp``, ordered by ``(e, f)``."""
    gap = 1 if relax else 2
    return [StemShape(p, e, f, relax) for e in range(2, max_exp + 1)
            for f in range(1, e - gap + 1)]


def _shape_table(primes, max_exp, relax):
    table = {}
    for p in primes:
        table[p] = [(s, s.p ** (s.e - s.f) + s.p ** s.f - 1, s.p ** s.e)
                    for s in stem_shapes(p, max_exp, relax)]
    return table


def _tasks(primes, max_factors):
    for m in range(1, max_factors + 1):
        for subset in itertools.combinations(primes, m):
            yield subset


def _run_task(args):
    subset, first_index, table, predicate = args
    first = table[subset[0]][first_index]
    rest = [table[p] for p in subset[1:]]
    examined = 0
    hits = []
    for combo in itertools.product(*rest):
        num, den = first[1], first[2]
        for _, n, d in combo:
            num *= n
            den *= d
        g = gcd(num, den)
        num //= g
        den //= g
        examined += 1
        if predicate(num, den, subset):
            shapes = (first[0],) + tuple(c[0] for c in combo)
            hits.append((shapes, num, den))
    return examined, hits


def search_products(primes: Iterable[int], max_factors: int, max_exp: int,
                    predicate: Callable[[int, int, Sequence[int]], bool],
                    relax: bool = False, threads: int = 1, label: str = "custom") -> SearchReport:
    """Evaluate every product of stem factors over at most ``max_factors`` distinct primes.

    Work is split by the first factor's shape; results are concatenated in
    task order, so the report does not depend on ``threads``.
    """
    start = time.perf_counter()
    primes = sorted(set(primes))
    for p in primes:
        _check_prime(p)
    table = _shape_table(primes, max_exp, relax)
    report = SearchReport(bounds={
        "search": label,
        "primes": primes,
        "max_factors": max_factors,
        "max_exp": max_exp,
        "relax_center_index": relax,
    })
    tasks = [(subset, i, {p: table[p] for p in subset}, predicate)
             for subset in _tasks(primes, max_factors)
             for i in range(len(table[subset[0]]))]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * threads))))
    else:
        results = map(_run_task, tasks)
    for examined, hits in results:
        report.examined += examined
        for shapes, num, den in hits:
            report.hits.append(Hit(shapes, Fraction(num, den), factorize(den)))
    report.elapsed = time.perf_counter() - start
    return report


def search_square_free(primes, max_factors, max_exp, relax=False, threads=1,
                       predicate=square_free_denominator) -> SearchReport:
    """Products whose lowest-terms denominator is square-free and > 1."""
    return search_products(primes, max_factors, max_exp, predicate, relax, threads,
                           label="square-free")


def search_reciprocals(primes, max_factors, max_exp, relax=False, threads=1,
                       predicate=reciprocal_value) -> SearchReport:
    """Products equal to ``1/n`` for an integer ``n > 1``."""
    return search_products(primes, max_factors, max_exp, predicate, relax, threads,
                           label="reciprocal")


# -- accumulation --------------------------------------------------------------

def accumulation_witness(p: int, g: int, epsilon: Fraction, relax: bool = False) -> StemShape:
    """A stem shape with ``f = g`` whose value is within ``epsilon`` of ``p^-g``.

    The gap ``k = e - f`` is the least legal one with ``p^-k < epsilon``; the
    true distance ``(p^g - 1)/p^(k+g)`` is smaller still.
    """
    _check_prime(p)
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if g < 1:
        raise ValueError("g must be positive")
    k = 1 if relax else 2
    while Fraction(1, p ** k) >= epsilon:
        k += 1
    shape = StemShape(p, k + g, g, relax)
    assert abs(stem_p_part_value(shape) - Fraction(1, p ** g)) < epsilon
    return shape
