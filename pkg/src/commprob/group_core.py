"""Finite groups as Cayley tables (index 0 is the identity).

Everything here works directly on the ``n x n`` multiplication table: center,
derived subgroup, lower central series, Sylow parts, and the data needed to
compare two groups up to isoclinism.
"""

from __future__ import annotations

import itertools
import json
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

from commprob.exact_arith import factorize

ASSOCIATIVITY_CAP = 256
ISOCLINISM_CAP = 16

NOT_NILPOTENT = "not nilpotent"


class GroupFormatError(ValueError):
    pass


class FiniteGroup:
    """A group given by its Cayley table.

    ``table[a, b]`` is the index of ``a * b``.  Construction checks the Latin
    square property, the identity at index 0, and (up to ``check_cap``
    elements) associativity.
    """

    def __init__(self, table, check_cap: int = ASSOCIATIVITY_CAP):
        t = np.array(table, dtype=np.int64)
        if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
            raise GroupFormatError(f"table must be square and nonempty, got shape {t.shape}")
        n = t.shape[0]
        if t.min() < 0 or t.max() >= n:
            raise GroupFormatError("table entries outside [0, n)")
        ar = np.arange(n)
        if not (np.array_equal(t[0], ar) and np.array_equal(t[:, 0], ar)):
            raise GroupFormatError("index 0 is not a two-sided identity")
        srt = np.sort(t, axis=1)
        if not (srt == ar).all() or not (np.sort(t, axis=0) == ar[:, None]).all():
            raise GroupFormatError("rows and columns must be permutations of [0, n)")
        if n <= check_cap and not _is_associative(t):
            raise GroupFormatError("table is not associative")
        t.setflags(write=False)
        self.table = t
        self.order = n
        inv = np.argmax(t == 0, axis=1)
        inv.setflags(write=False)
        self.inverse = inv

    def __repr__(self):
        return f"FiniteGroup(order={self.order})"

    # -- construction --------------------------------------------------------

    @classmethod
    def from_operation(cls, elements: Sequence[Hashable], op: Callable, identity: Hashable,
                       check_cap: int = ASSOCIATIVITY_CAP) -> "FiniteGroup":
        elems = list(elements)
        if identity in elems:
            elems.remove(identity)
        elems.insert(0, identity)
        index = {e: i for i, e in enumerate(elems)}
        if len(index) != len(elems):
            raise GroupFormatError("duplicate elements")
        try:
            table = [[index[op(a, b)] for b in elems] for a in elems]
        except KeyError as exc:
            raise GroupFormatError(f"operation not closed: {exc}") from None
        return cls(table, check_cap=check_cap)

    @classmethod
    def from_json(cls, data: dict, check_cap: int = ASSOCIATIVITY_CAP) -> "FiniteGroup":
        if not isinstance(data, dict) or "order" not in data or "table" not in data:
            raise GroupFormatError('group file must be an object with "order" and "table"')
        t = np.array(data["table"], dtype=np.int64)
        n = int(data["order"])
        if t.shape != (n, n):
            raise GroupFormatError(f"table shape {t.shape} does not match order {n}")
        return cls(_relabel_identity(t), check_cap=check_cap)

    @classmethod
    def load(cls, path: str | Path, check_cap: int = ASSOCIATIVITY_CAP) -> "FiniteGroup":
        with open(path) as fh:
            return cls.from_json(json.load(fh), check_cap=check_cap)

    def to_json(self) -> dict:
        return {"order": self.order, "table": self.table.tolist()}

    # -- elementwise ---------------------------------------------------------

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def commutator(self, a: int, b: int) -> int:
        """``a^-1 b^-1 a b``."""
        t, inv = self.table, self.inverse
        return int(t[t[inv[a], inv[b]], t[a, b]])

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = int(self.table[x, a])
            k += 1
        return k

    def is_abelian(self) -> bool:
        return bool((self.table == self.table.T).all())

    def subgroup_generated(self, gens: Iterable[int]) -> frozenset[int]:
        gens = [g for g in set(int(g) for g in gens) if g != 0]
        seen = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = int(self.table[x, g])
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(seen)

    def subgroup(self, elements: Iterable[int]) -> "FiniteGroup":
        """Relabelled Cayley table of a subgroup given as a set of indices."""
        elems = sorted(set(int(e) for e in elements))
        if elems[0] != 0:
            raise ValueError("subgroup must contain the identity")
        pos = {e: i for i, e in enumerate(elems)}
        try:
            table = [[pos[int(self.table[a, b])] for b in elems] for a in elems]
        except KeyError:
            raise ValueError("elements are not closed under the operation") from None
        return FiniteGroup(table)


def _is_associative(t: np.ndarray) -> bool:
    n = t.shape[0]
    for a in range(n):
        # (a b) c vs a (b c) for all b, c
        if not np.array_equal(t[t[a]], t[a][t]):
            return False
    return True


def _relabel_identity(t: np.ndarray) -> np.ndarray:
    n = t.shape[0]
    ar = np.arange(n)
    if np.array_equal(t[0], ar) and np.array_equal(t[:, 0], ar):
        return t
    hits = [e for e in range(n) if np.array_equal(t[e], ar) and np.array_equal(t[:, e], ar)]
    if not hits:
        raise GroupFormatError("table has no two-sided identity")
    e = hits[0]
    perm = ar.copy()
    perm[0], perm[e] = e, 0  # perm is its own inverse
    return perm[t[np.ix_(perm, perm)]]


# -- probabilities -------------------------------------------------------------

def conjugacy_classes(group: FiniteGroup) -> list[frozenset[int]]:
    t, inv = group.table, group.inverse
    n = group.order
    # conj[g, x] = g x g^-1
    conj = t[t, inv[:, None]]
    seen = np.zeros(n, dtype=bool)
    classes = []
    for x in range(n):
        if not seen[x]:
            cls = frozenset(int(v) for v in np.unique(conj[:, x]))
            seen[list(cls)] = True
            classes.append(cls)
    return classes


def commuting_probability(group: FiniteGroup) -> Fraction:
    """Number of conjugacy classes divided by ``|G|``."""
    return Fraction(len(conjugacy_classes(group)), group.order)


def commuting_probability_pairs(group: FiniteGroup) -> Fraction:
    """Direct count of commuting ordered pairs over ``|G|^2``."""
    t = group.table
    return Fraction(int((t == t.T).sum()), group.order ** 2)


# -- subgroups -----------------------------------------------------------------

def center(group: FiniteGroup) -> frozenset[int]:
    t = group.table
    return frozenset(int(z) for z in np.flatnonzero((t == t.T).all(axis=1)))


def derived_subgroup(group: FiniteGroup) -> frozenset[int]:
    return commutator_subgroup(group, range(group.order), range(group.order))


def commutator_subgroup(group: FiniteGroup, a: Iterable[int], b: Iterable[int]) -> frozenset[int]:
    b = list(b)
    comms = {group.commutator(x, y) for x in a for y in b}
    return group.subgroup_generated(comms)


def lower_central_series(group: FiniteGroup) -> list[frozenset[int]]:
    """``[G, [G,G], [[G,G],G], ...]`` up to the first repeat or the trivial group."""
    series = [frozenset(range(group.order))]
    while len(series[-1]) > 1:
        nxt = commutator_subgroup(group, series[-1], range(group.order))
        if nxt == series[-1]:
            break
        series.append(nxt)
    return series


def nilpotency_class(group: FiniteGroup) -> int | str:
    """Nilpotency class (trivial and abelian groups have class 1), or ``NOT_NILPOTENT``."""
    series = lower_central_series(group)
    if len(series[-1]) > 1:
        return NOT_NILPOTENT
    return max(1, len(series) - 1)


def is_nilpotent(group: FiniteGroup) -> bool:
    return nilpotency_class(group) != NOT_NILPOTENT


@dataclass(frozen=True)
class FormulaCheck:
    formula: Fraction
    counted: Fraction
    match: bool


def nilpotent_formula_value(group: FiniteGroup) -> Fraction:
    d = len(derived_subgroup(group))
    index = group.order // len(center(group))
    return Fraction(1, d) * (1 + Fraction(d - 1, index))


def check_nilpotent_formula(group: FiniteGroup) -> FormulaCheck:
    """Compare ``(1/|G'|)(1 + (|G'| - 1)/|G:Z|)`` with the counted probability."""
    f = nilpotent_formula_value(group)
    c = commuting_probability(group)
    return FormulaCheck(f, c, f == c)


def sylow_decomposition(group: FiniteGroup) -> list[tuple[int, FiniteGroup]]:
    """Sylow subgroups of a nilpotent group, one per prime dividing ``|G|``.

    Each part is the set of elements of ``p``-power order; raises if the group
    is not nilpotent, and asserts that the parts have full ``p``-part order.
    """
    if not is_nilpotent(group):
        raise ValueError("Sylow decomposition requires a nilpotent group")
    orders = [group.element_order(a) for a in range(group.order)]
    parts = []
    for p, e in factorize(group.order):
        elems = [a for a, o in enumerate(orders) if _is_power_of(o, p)]
        if len(elems) != p ** e:
            raise AssertionError(f"{p}-elements number {len(elems)}, expected {p ** e}")
        parts.append((p, group.subgroup(elems)))
    return parts


def _is_power_of(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


# -- isoclinism ----------------------------------------------------------------

@dataclass(frozen=True)
class GroupInvariants:
    order: int
    center_size: int
    derived_size: int
    central_index: int
    nilpotency_class: int | str
    commutator_pairing: tuple[tuple[tuple[int, int, int], int], ...]

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "center_size": self.center_size,
            "derived_size": self.derived_size,
            "central_index": self.central_index,
            "nilpotency_class": self.nilpotency_class,
            "commutator_pairing": [[list(k), v] for k, v in self.commutator_pairing],
        }


def central_quotient(group: FiniteGroup) -> tuple[FiniteGroup, list[int], np.ndarray]:
    """``G/Z(G)`` as a group, with coset representatives and the element-to-coset map."""
    z = sorted(center(group))
    coset_of = np.full(group.order, -1, dtype=np.int64)
    reps = []
    for a in range(group.order):
        if coset_of[a] < 0:
            coset_of[group.table[a, z]] = len(reps)
            reps.append(a)
    table = [[int(coset_of[group.table[a, b]]) for b in reps] for a in reps]
    return FiniteGroup(table), reps, coset_of


def isoclinism_invariants(group: FiniteGroup) -> GroupInvariants:
    q, reps, _ = central_quotient(group)
    comm_orders = {}
    pairing = Counter()
    qord = [q.element_order(a) for a in range(q.order)]
    for i, a in enumerate(reps):
        for j, b in enumerate(reps):
            c = group.commutator(a, b)
            if c not in comm_orders:
                comm_orders[c] = group.element_order(c)
            pairing[(qord[i], qord[j], comm_orders[c])] += 1
    zs = len(center(group))
    return GroupInvariants(
        order=group.order,
        center_size=zs,
        derived_size=len(derived_subgroup(group)),
        central_index=group.order // zs,
        nilpotency_class=nilpotency_class(group),
        commutator_pairing=tuple(sorted(pairing.items())),
    )


def _generating_set(group: FiniteGroup) -> list[int]:
    gens: list[int] = []
    span = frozenset([0])
    # larger orders first keeps the generating set short
    for a in sorted(range(group.order), key=lambda x: -group.element_order(x)):
        if a not in span:
            gens.append(a)
            span = group.subgroup_generated(gens)
            if len(span) == group.order:
                break
    return gens


def isomorphisms(g: FiniteGroup, h: FiniteGroup):
    """Yield every isomorphism ``g -> h`` as an index array."""
    if g.order != h.order:
        return
    gens = _generating_set(g)
    g_ord = [g.element_order(a) for a in range(g.order)]
    h_ord = [h.element_order(a) for a in range(h.order)]
    candidates = [[b for b in range(h.order) if h_ord[b] == g_ord[a]] for a in gens]
    for images in itertools.product(*candidates):
        phi = _extend_hom(g, h, gens, images)
        if phi is not None and len(set(phi.tolist())) == g.order:
            yield phi


def _extend_hom(g, h, gens, images):
    phi = np.full(g.order, -1, dtype=np.int64)
    phi[0] = 0
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for s, t in zip(gens, images):
                y = int(g.table[x, s])
                fy = int(h.table[phi[x], t])
                if phi[y] < 0:
                    phi[y] = fy
                    nxt.append(y)
                elif phi[y] != fy:
                    return None
        frontier = nxt
    return phi


def are_isoclinic_bruteforce(g: FiniteGroup, h: FiniteGroup, cap: int = ISOCLINISM_CAP) -> bool:
    """Search for ``phi: G/Z -> H/Z`` and ``psi: G' -> H'`` compatible with commutators."""
    ig, ih = isoclinism_invariants(g), isoclinism_invariants(h)
    if max(ig.central_index, ih.central_index) > cap:
        raise ValueError(f"central index exceeds isoclinism cap {cap}")
    if (ig.central_index, ig.derived_size, ig.commutator_pairing) != \
            (ih.central_index, ih.derived_size, ih.commutator_pairing):
        return False
    qg, reps_g, _ = central_quotient(g)
    qh, reps_h, _ = central_quotient(h)
    pairs_g = [[g.commutator(a, b) for b in reps_g] for a in reps_g]
    pairs_h = [[h.commutator(a, b) for b in reps_h] for a in reps_h]
    for phi in isomorphisms(qg, qh):
        gens = {}
        ok = True
        for i in range(qg.order):
            for j in range(qg.order):
                cg, ch = pairs_g[i][j], pairs_h[phi[i]][phi[j]]
                if gens.setdefault(cg, ch) != ch:
                    ok = False
                    break
            if not ok:
                break
        if ok and _extends_to_isomorphism(g, h, gens, ig.derived_size):
            return True
    return False


def _extends_to_isomorphism(g, h, gen_map: dict[int, int], size: int) -> bool:
    psi = {0: 0}
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for s, t in gen_map.items():
                y = int(g.table[x, s])
                fy = int(h.table[psi[x], t])
                if y not in psi:
                    psi[y] = fy
                    nxt.append(y)
                elif psi[y] != fy:
                    return False
        frontier = nxt
    return len(psi) == size and len(set(psi.values())) == size


def is_stem_candidate(group: FiniteGroup) -> bool:
    """True iff ``Z(G)`` is contained in ``G'``."""
    return center(group) <= derived_subgroup(group)


# -- small groups used as fixtures ---------------------------------------------

def cyclic(n: int) -> FiniteGroup:
    ar = np.arange(n)
    return FiniteGroup((ar[:, None] + ar[None, :]) % n)


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    """Index ``a * |H| + b`` stands for ``(a, b)``."""
    m = h.order
    tg = np.repeat(np.repeat(g.table, m, axis=0), m, axis=1)
    th = np.tile(h.table, (g.order, g.order))
    return FiniteGroup(tg * m + th)


def dihedral(n: int) -> FiniteGroup:
    """Symmetries of the n-gon (order ``2n``); elements ``(s, r)`` mean ``x^s y^r``."""
    def op(a, b):
        s1, r1 = a
        s2, r2 = b
        return ((s1 + s2) % 2, ((-r1 if s2 else r1) + r2) % n)
    return FiniteGroup.from_operation([(s, r) for s in range(2) for r in range(n)], op, (0, 0))


def quaternion() -> FiniteGroup:
    """Q8 via unit quaternions ``(sign, axis)``, axis 0 = 1, 1..3 = i, j, k."""
    # i*j = k, j*k = i, k*i = j
    mult = {
        (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
        (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
        (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
        (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
    }

    def op(a, b):
        sign, axis = mult[(a[1], b[1])]
        return (a[0] * b[0] * sign, axis)
    return FiniteGroup.from_operation([(s, a) for s in (1, -1) for a in range(4)], op, (1, 0))


def symmetric(n: int) -> FiniteGroup:
    perms = list(itertools.permutations(range(n)))
    return FiniteGroup.from_operation(
        perms, lambda p, q: tuple(p[q[i]] for i in range(n)), tuple(range(n)))
