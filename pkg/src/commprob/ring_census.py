"""Exhaustive enumeration of rings of order <= 8 by structure constants.

Basis products ``e_i e_j`` are assigned in row-major order; after each
assignment every associativity triple whose two sides have become computable
is checked, so failing partial tensors are cut immediately.
"""

from __future__ import annotations

import itertools
import json
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, prod
from pathlib import Path
from typing import Iterator

from commprob.exact_arith import factorize, is_square_free
from commprob.ring_core import FiniteRing, commuting_probability_fast

MAX_ORDER = 8
DEFAULT_NODE_BUDGET = 50_000_000


class BudgetExceeded(RuntimeError):
    pass


def _partitions(n: int, largest: int | None = None) -> Iterator[list[int]]:
    largest = n if largest is None else largest
    if n == 0:
        yield []
        return
    for k in range(min(n, largest), 0, -1):
        for rest in _partitions(n - k, k):
            yield [k] + rest


def additive_decompositions(order: int) -> list[tuple[int, ...]]:
    """Moduli for each abelian group of the given order, as prime-power cyclic factors."""
    per_prime = []
    for p, a in factorize(order):
        per_prime.append([sorted(p ** k for k in part) for part in _partitions(a)])
    out = []
    for choice in itertools.product(*per_prime):
        out.append(tuple(sorted(itertools.chain.from_iterable(choice))))
    return sorted(out, key=lambda m: (len(m), m))


def _candidate_vectors(moduli, i, j):
    k = len(moduli)
    ranges = []
    for t in range(k):
        d = moduli[t]
        step = d // gcd(d, gcd(moduli[i], moduli[j]))
        ranges.append(range(0, d, step))
    return list(itertools.product(*ranges))


class _Search:
    def __init__(self, moduli, budget):
        self.moduli = moduli
        self.k = len(moduli)
        self.cells = [(i, j) for i in range(self.k) for j in range(self.k)]
        self.candidates = [_candidate_vectors(moduli, i, j) for i, j in self.cells]
        self.budget = budget
        self.nodes = 0

    def _combine(self, coeffs, vectors):
        out = [0] * self.k
        for a, v in zip(coeffs, vectors):
            if a:
                for t in range(self.k):
                    out[t] += a * v[t]
        return tuple(x % d for x, d in zip(out, self.moduli))

    def _decide(self, table, a, b, c):
        """True/False if the triple is decided, None if still open."""
        ab, bc = table[a][b], table[b][c]
        if ab is None or bc is None:
            return None
        left_needed = [table[t][c] for t in range(self.k) if ab[t]]
        right_needed = [table[a][s] for s in range(self.k) if bc[s]]
        if any(v is None for v in left_needed) or any(v is None for v in right_needed):
            return None
        left = self._combine([ab[t] for t in range(self.k) if ab[t]], left_needed)
        right = self._combine([bc[s] for s in range(self.k) if bc[s]], right_needed)
        return left == right

    def run(self, prefix=()) -> Iterator[tuple]:
        table = [[None] * self.k for _ in range(self.k)]
        pending = list(itertools.product(range(self.k), repeat=3))
        for depth, v in enumerate(prefix):
            i, j = self.cells[depth]
            table[i][j] = v
            pending = self._prune(table, pending)
            if pending is None:
                return
        yield from self._extend(table, len(prefix), pending)

    def _prune(self, table, pending):
        rest = []
        for a, b, c in pending:
            ok = self._decide(table, a, b, c)
            if ok is None:
                rest.append((a, b, c))
            elif not ok:
                return None
        return rest

    def _extend(self, table, depth, pending):
        if depth == len(self.cells):
            yield tuple(tuple(row) for row in table)
            return
        i, j = self.cells[depth]
        for v in self.candidates[depth]:
            self.nodes += 1
            if self.nodes > self.budget:
                raise BudgetExceeded(f"node budget {self.budget} exceeded for moduli {self.moduli}")
            table[i][j] = v
            rest = self._prune(table, pending)
            if rest is not None:
                yield from self._extend(table, depth + 1, rest)
        table[i][j] = None


def enumerate_structures(moduli: tuple[int, ...], budget: int = DEFAULT_NODE_BUDGET,
                         threads: int = 1) -> list[tuple]:
    """Every associative structure tensor on the given moduli, in lexicographic order."""
    moduli = tuple(moduli)
    if threads <= 1:
        return list(_Search(moduli, budget).run())
    firsts = _candidate_vectors(moduli, 0, 0)
    with ProcessPoolExecutor(max_workers=threads) as pool:
        parts = pool.map(_run_prefix, [(moduli, budget, (v,)) for v in firsts])
        return [s for part in parts for s in part]


def _run_prefix(args):
    moduli, budget, prefix = args
    return list(_Search(moduli, budget).run(prefix))


# -- isomorphism dedupe --------------------------------------------------------

def additive_automorphisms(moduli: tuple[int, ...]) -> list[tuple[tuple[int, ...], ...]]:
    """Automorphisms of ``Z/d_1 x ... x Z/d_k``; row ``i`` is the image of ``e_i``."""
    k = len(moduli)
    n = prod(moduli)
    rows = [_candidate_vectors(moduli, i, i) for i in range(k)]
    elems = list(itertools.product(*(range(d) for d in moduli)))
    out = []
    for images in itertools.product(*rows):
        seen = {_apply(images, x, moduli) for x in elems}
        if len(seen) == n:
            out.append(images)
    return out


def _apply(images, x, moduli):
    out = [0] * len(moduli)
    for a, img in zip(x, images):
        if a:
            for t, v in enumerate(img):
                out[t] += a * v
    return tuple(v % d for v, d in zip(out, moduli))


def transport(ring: FiniteRing, images) -> FiniteRing:
    """The ring structure carried along the additive automorphism ``e_i -> images[i]``."""
    moduli = ring.moduli
    fwd = {x: _apply(images, x, moduli) for x in ring.elements()}
    back = {y: x for x, y in fwd.items()}
    k = ring.rank
    structure = tuple(
        tuple(fwd[ring._mul(back[ring.basis(i)], back[ring.basis(j)])] for j in range(k))
        for i in range(k))
    return FiniteRing(moduli, structure)


def enumerate_rings(order: int, dedupe: bool = False, budget: int = DEFAULT_NODE_BUDGET,
                    threads: int = 1) -> Iterator[FiniteRing]:
    """Every ring of the given order (one per isomorphism class with ``dedupe``).

    Rings come grouped by additive decomposition and in lexicographic tensor
    order; the dedupe representative is the lexicographically least tensor of
    its class, since the whole orbit is enumerated.
    """
    if not 2 <= order <= MAX_ORDER:
        raise ValueError(f"order must be in 2..{MAX_ORDER}, got {order}")
    for moduli in additive_decompositions(order):
        yield from _rings_for(moduli, dedupe, budget, threads)


def _rings_for(moduli, dedupe, budget, threads):
    structures = enumerate_structures(moduli, budget, threads)
    if not dedupe:
        for s in structures:
            yield FiniteRing(moduli, s)
        return
    autos = additive_automorphisms(moduli)
    seen = set()
    for s in structures:
        if s in seen:
            continue
        ring = FiniteRing(moduli, s)
        seen.update(transport(ring, a).structure for a in autos)
        yield ring


# -- reports -------------------------------------------------------------------

@dataclass
class CensusReport:
    order: int
    decompositions: list[tuple[int, ...]]
    total: int = 0
    isomorphism_classes: int | None = None
    histogram: Counter = field(default_factory=Counter)
    violations: list[dict] = field(default_factory=list)
    fallback: list[tuple[int, ...]] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def values(self) -> set[Fraction]:
        return set(self.histogram)

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "decompositions": [list(m) for m in self.decompositions],
            "skipped_decompositions": [list(m) for m in self.fallback],
            "total": self.total,
            "isomorphism_classes": self.isomorphism_classes,
            "histogram": {f"{v.numerator}/{v.denominator}": c
                          for v, c in sorted(self.histogram.items(), reverse=True)},
            "violation_count": len(self.violations),
            "violations": self.violations,
            "elapsed": round(self.elapsed, 6),
        }


def conjecture_violation(ring: FiniteRing, value: Fraction) -> str | None:
    """Reason the value contradicts the square-free claim, or ``None``."""
    n = value.denominator
    if value.numerator == 1 and n > 1 and is_square_free(n):
        return f"value 1/{n} with square-free n"
    if not ring.is_commutative() and is_square_free(n):
        return f"noncommutative ring with square-free denominator {n}"
    return None


def _inverted_violation(ring: FiniteRing, value: Fraction) -> str | None:
    if not ring.is_commutative() and not is_square_free(value.denominator):
        return f"(inverted) denominator {value.denominator} is not square-free"
    return None


def collect_probabilities(order: int, dedupe: bool = False, verify: bool = False,
                          inverted: bool = False, budget: int = DEFAULT_NODE_BUDGET,
                          threads: int = 1, dump: str | Path | None = None) -> CensusReport:
    """Histogram of commuting probabilities over every ring of one order.

    With ``verify``, each ring is also tested against the square-free claim;
    ``inverted`` flips that test (harness self-check).  A decomposition whose
    search exceeds ``budget`` nodes is skipped and listed in ``fallback``.
    """
    if not 2 <= order <= MAX_ORDER:
        raise ValueError(f"order must be in 2..{MAX_ORDER}, got {order}")
    start = time.perf_counter()
    decomps = additive_decompositions(order)
    report = CensusReport(order=order, decompositions=decomps)
    if dedupe:
        report.isomorphism_classes = 0
    check = _inverted_violation if inverted else conjecture_violation
    if dump is not None:
        Path(dump).mkdir(parents=True, exist_ok=True)
    for moduli in decomps:
        try:
            rings = list(_rings_for(moduli, dedupe, budget, threads))
        except BudgetExceeded:
            report.fallback.append(moduli)
            continue
        tag = "x".join(map(str, moduli))
        for idx, ring in enumerate(rings):
            value = commuting_probability_fast(ring)
            report.total += 1
            if dedupe:
                report.isomorphism_classes += 1
            report.histogram[value] += 1
            if verify:
                reason = check(ring, value)
                if reason:
                    report.violations.append({"ring": ring.to_json(), "value": str(value),
                                              "reason": reason})
            if dump is not None:
                with open(Path(dump) / f"{tag}_{idx:05d}.json", "w") as fh:
                    json.dump(ring.to_json(), fh)
    report.elapsed = time.perf_counter() - start
    return report


def verify_conjecture_on_corpus(order: int, dedupe: bool = False, inverted: bool = False,
                                **kwargs) -> CensusReport:
    return collect_probabilities(order, dedupe=dedupe, verify=True, inverted=inverted, **kwargs)
