"""Ring -> nilpotent ring -> class-2 group, preserving commuting probability.

``R`` is first doubled to ``S = R (+) R`` with ``(a, x)(b, y) = (0, ab)``, so
every product of three elements of ``S`` vanishes.  The circle operation
``a o b = a + b + ab`` then makes ``S`` a group ``G_R`` of order ``|R|^2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import numpy as np

from commprob import group_core
from commprob.exact_arith import factorize
from commprob.group_core import FiniteGroup
from commprob.ring_core import FiniteRing, commuting_probability_fast

MAX_RING_SIZE = 32


class LiftError(ValueError):
    pass


@dataclass(frozen=True)
class NilpotentRingWitness:
    ring: FiniteRing
    nilpotency_index: int  # smallest N with every N-fold product zero


def nilpotency_index(ring: FiniteRing, limit: int = 64) -> int | None:
    """Smallest ``N`` with all ``N``-fold products zero, or ``None`` if beyond ``limit``.

    By multilinearity it is enough to track products of basis vectors.
    """
    zero = (0,) * ring.rank
    basis = [ring.basis(i) for i in range(ring.rank)]
    layer = {b for b in basis if b != zero}
    n = 1
    while layer:
        if n >= limit:
            return None
        layer = {ring._mul(g, b) for g in layer for b in basis} - {zero}
        n += 1
    return n


def double_null_extension(ring: FiniteRing) -> NilpotentRingWitness:
    k = ring.rank
    zero = (0,) * (2 * k)
    structure = [[zero] * (2 * k) for _ in range(2 * k)]
    for i in range(k):
        for j in range(k):
            structure[i][j] = (0,) * k + ring.structure[i][j]
    s = FiniteRing(ring.moduli * 2, tuple(tuple(row) for row in structure))
    idx = nilpotency_index(s)
    if idx is None or idx > 3:
        raise AssertionError("doubled ring has a nonzero triple product")
    return NilpotentRingWitness(s, idx)


def _element_array(ring: FiniteRing) -> np.ndarray:
    grids = np.meshgrid(*(np.arange(d) for d in ring.moduli), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _encode(coords: np.ndarray, moduli) -> np.ndarray:
    idx = np.zeros(coords.shape[:-1], dtype=np.int64)
    for t, d in enumerate(moduli):
        idx = idx * d + coords[..., t]
    return idx


def circle_group(witness: NilpotentRingWitness) -> FiniteGroup:
    """Cayley table of ``a o b = a + b + ab``; the ring zero is index 0."""
    if witness.nilpotency_index > 3:
        raise LiftError("circle inverse -a + a^2 needs all triple products to vanish")
    s = witness.ring
    mod = np.array(s.moduli, dtype=np.int64)
    c = np.array(s.structure, dtype=np.int64)
    e = _element_array(s)
    # ab[x, y, t] = sum_ij e[x,i] e[y,j] c[i,j,t]
    ab = np.einsum("xi,yj,ijt->xyt", e, e, c) % mod
    circ = (e[:, None, :] + e[None, :, :] + ab) % mod
    table = _encode(circ, s.moduli)
    sq = ab[np.arange(len(e)), np.arange(len(e))]
    quasi_inv = _encode((-e + sq) % mod, s.moduli)
    if not (table[np.arange(len(e)), quasi_inv] == 0).all():
        raise LiftError("quasi-inverse -a + a^2 fails; ring is not nilpotent of index <= 3")
    return FiniteGroup(table, check_cap=max(group_core.ASSOCIATIVITY_CAP, len(e)))


def lift_ring_to_group(ring: FiniteRing, max_ring_size: int = MAX_RING_SIZE) -> FiniteGroup:
    if ring.size > max_ring_size:
        raise ValueError(f"|R| = {ring.size} exceeds lift cap {max_ring_size}")
    return circle_group(double_null_extension(ring))


@dataclass(frozen=True)
class LiftCheck:
    ring_probability: Fraction
    group_probability: Fraction
    group_order: int
    nilpotency_class: int | str
    commutative: bool
    p_group: bool | None  # None when |R| is not a prime power

    @property
    def ok(self) -> bool:
        return (self.ring_probability == self.group_probability
                and self.nilpotency_class == (1 if self.commutative else 2)
                and self.p_group is not False)

    def to_json(self) -> dict:
        return {
            "ring_probability": str(self.ring_probability),
            "group_probability": str(self.group_probability),
            "group_order": self.group_order,
            "nilpotency_class": self.nilpotency_class,
            "commutative": self.commutative,
            "p_group": self.p_group,
            "ok": self.ok,
        }


def check_lift(ring: FiniteRing, group: FiniteGroup | None = None) -> LiftCheck:
    if group is None:
        group = lift_ring_to_group(ring)
    if group.order != ring.size ** 2:
        raise AssertionError(f"|G_R| = {group.order}, expected {ring.size ** 2}")
    fac = factorize(ring.size)
    p_group = None
    if len(fac) == 1:
        p = fac[0][0]
        p_group = all(_p_power(group.element_order(a), p) for a in range(group.order))
    return LiftCheck(
        ring_probability=commuting_probability_fast(ring),
        group_probability=group_core.commuting_probability(group),
        group_order=group.order,
        nilpotency_class=group_core.nilpotency_class(group),
        commutative=ring.is_commutative(),
        p_group=p_group,
    )


def _p_power(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1
