from __future__ import annotations

from itertools import combinations_with_replacement

from octocut import cutfamily, invariants
from octocut.gradedla import hilbert_function
from octocut.polyring import GF


def enumerate_invariants(degree: int) -> int:
    return sum(1 for c in combinations_with_replacement(range(1, 13), degree) if sum(c) % 13 == 0)


def test_invariant_monomials():
    assert len(invariants.invariant_monomials(0)) == 1
    assert len(invariants.invariant_monomials(1)) == 0
    deg2 = invariants.invariant_monomials(2)
    assert sorted(deg2.names()) == sorted(["t1*t12", "t2*t11", "t3*t10", "t4*t9", "t5*t8", "t6*t7"])
    for d in range(5):
        assert len(invariants.invariant_monomials(d)) == enumerate_invariants(d)


def test_invariant_hilbert_two_primes():
    dims = []
    for p in (10007, 10009):
        system = cutfamily.cut_at(5, 7, GF(p))
        dims.append(invariants.invariant_hilbert(system.quadrics, 3))
    assert dims[0] == dims[1]
    assert dims[0][:3] == [1, 0, 4]


def test_weight_classes_sum_to_total():
    system = cutfamily.cut_at(5, 7, GF(10007))
    total = hilbert_function(system.quadrics, 3).dims
    for d in range(4):
        parts = invariants.weight_class_dimensions(system.quadrics, d)
        assert sum(parts.values()) == total[d]
    assert invariants.weight_class_dimensions(system.quadrics, 2)[0] == 4
