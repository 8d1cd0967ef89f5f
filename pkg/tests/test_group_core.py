import json
from fractions import Fraction

import numpy as np
import pytest

from commprob import group_core as gc
from commprob.group_core import FiniteGroup, GroupFormatError


def test_cyclic_probability():
    for n in (1, 2, 7, 12):
        assert gc.commuting_probability(gc.cyclic(n)) == 1


@pytest.mark.parametrize("name, expected", [("q8", Fraction(5, 8)), ("d4", Fraction(5, 8)),
                                            ("s3", Fraction(1, 2))])
def test_named_probabilities(name, expected, request):
    g = request.getfixturevalue(name)
    assert gc.commuting_probability(g) == expected
    assert gc.commuting_probability_pairs(g) == expected


def test_class_count_matches_pair_scan():
    groups = [gc.symmetric(4), gc.dihedral(5), gc.dihedral(8), gc.quaternion(),
              gc.direct_product(gc.symmetric(3), gc.cyclic(4)),
              gc.direct_product(gc.dihedral(4), gc.dihedral(4))]
    for g in groups:
        assert gc.commuting_probability(g) == gc.commuting_probability_pairs(g)


def test_center_and_derived(q8, s3):
    c4 = gc.cyclic(4)
    assert gc.center(c4) == frozenset(range(4))
    assert gc.derived_subgroup(c4) == frozenset([0])
    assert (len(gc.center(q8)), len(gc.derived_subgroup(q8))) == (2, 2)
    assert (len(gc.center(s3)), len(gc.derived_subgroup(s3))) == (1, 3)


def test_nilpotency_class(q8, s3):
    assert gc.nilpotency_class(gc.cyclic(5)) == 1
    assert gc.nilpotency_class(q8) == 2
    assert gc.nilpotency_class(s3) == gc.NOT_NILPOTENT
    assert gc.nilpotency_class(gc.dihedral(8)) == 3


def test_formula_check(q8, s3):
    r = gc.check_nilpotent_formula(q8)
    assert (r.formula, r.counted, r.match) == (Fraction(5, 8), Fraction(5, 8), True)
    r = gc.check_nilpotent_formula(s3)
    assert (r.formula, r.counted, r.match) == (Fraction(4, 9), Fraction(1, 2), False)
    r = gc.check_nilpotent_formula(gc.cyclic(6))
    assert (r.formula, r.counted, r.match) == (1, 1, True)


def test_formula_fails_beyond_class_two():
    # D16: |G'| = 4, |Z| = 2, formula 11/32, true value 7/16
    r = gc.check_nilpotent_formula(gc.dihedral(8))
    assert (r.formula, r.counted, r.match) == (Fraction(11, 32), Fraction(7, 16), False)


def test_sylow_decomposition(q8):
    parts = gc.sylow_decomposition(gc.cyclic(6))
    assert [(p, h.order) for p, h in parts] == [(2, 2), (3, 3)]
    parts = gc.sylow_decomposition(q8)
    assert [(p, h.order) for p, h in parts] == [(2, 8)]
    g = gc.direct_product(q8, gc.cyclic(3))
    parts = gc.sylow_decomposition(g)
    assert [(p, h.order) for p, h in parts] == [(2, 8), (3, 3)]
    total = Fraction(1)
    for _, h in parts:
        total *= gc.commuting_probability(h)
    assert total == gc.commuting_probability(g) == Fraction(5, 8)


def test_sylow_rejects_non_nilpotent(s3):
    with pytest.raises(ValueError):
        gc.sylow_decomposition(s3)


def test_invariants(q8, d4):
    inv = gc.isoclinism_invariants(gc.cyclic(6))
    assert (inv.center_size, inv.derived_size, inv.central_index, inv.nilpotency_class) == (6, 1, 1, 1)
    assert inv.commutator_pairing == (((1, 1, 1), 1),)
    iq, id_ = gc.isoclinism_invariants(q8), gc.isoclinism_invariants(d4)
    assert (iq.central_index, iq.derived_size) == (4, 2)
    assert (id_.central_index, id_.derived_size) == (4, 2)
    assert iq.commutator_pairing == id_.commutator_pairing
    assert iq.center_size * iq.central_index == 8


def test_isoclinism(q8, d4):
    assert gc.are_isoclinic_bruteforce(q8, q8)
    assert gc.are_isoclinic_bruteforce(q8, d4)
    assert not gc.are_isoclinic_bruteforce(q8, gc.cyclic(8))
    # abelian groups are all isoclinic to the trivial group
    assert gc.are_isoclinic_bruteforce(gc.cyclic(4), gc.direct_product(gc.cyclic(2), gc.cyclic(3)))
    # Q8 x C2 is isoclinic to Q8 (direct factors that are abelian do not matter)
    q8c2 = gc.direct_product(q8, gc.cyclic(2))
    assert gc.are_isoclinic_bruteforce(q8, q8c2)
    assert gc.commuting_probability(q8c2) == gc.commuting_probability(q8)


def test_isoclinism_non_nilpotent(q8):
    # S3 and S3 x C3 share G/Z = S3 and G' = C3
    s3 = gc.symmetric(3)
    assert gc.are_isoclinic_bruteforce(s3, gc.direct_product(s3, gc.cyclic(3)))
    assert not gc.are_isoclinic_bruteforce(s3, q8)


def test_isoclinism_cap():
    with pytest.raises(ValueError):
        gc.are_isoclinic_bruteforce(gc.symmetric(4), gc.symmetric(4))  # central index 24


def test_stem_candidate(q8):
    assert gc.is_stem_candidate(q8)
    assert not gc.is_stem_candidate(gc.cyclic(3))
    assert not gc.is_stem_candidate(gc.direct_product(q8, gc.cyclic(2)))


def test_bad_tables():
    with pytest.raises(GroupFormatError):
        FiniteGroup([[0, 1], [1, 1]])
    with pytest.raises(GroupFormatError):
        FiniteGroup([[1, 0], [0, 1]])  # identity is index 1
    # Latin square but not associative (a loop of order 5)
    loop = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    with pytest.raises(GroupFormatError):
        FiniteGroup(loop)


def test_loader_relabels_identity(tmp_path, q8):
    # move the identity of Q8 to index 3
    perm = np.arange(8)
    perm[0], perm[3] = 3, 0
    t = perm[q8.table[np.ix_(perm, perm)]]
    path = tmp_path / "g.json"
    path.write_text(json.dumps({"order": 8, "table": t.tolist()}))
    g = FiniteGroup.load(path)
    assert gc.commuting_probability(g) == Fraction(5, 8)
    assert gc.are_isoclinic_bruteforce(g, q8)


def test_isoclinic_pairs_share_probability(q8, d4):
    groups = [q8, d4, gc.direct_product(q8, gc.cyclic(2)), gc.direct_product(d4, gc.cyclic(3)),
              gc.cyclic(4), gc.symmetric(3), gc.direct_product(gc.symmetric(3), gc.cyclic(2))]
    for a in groups:
        for b in groups:
            if gc.are_isoclinic_bruteforce(a, b):
                assert gc.commuting_probability(a) == gc.commuting_probability(b)
