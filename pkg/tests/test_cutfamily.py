from __future__ import annotations

import random
from fractions import Fraction
from collections import Counter

import pytest

from octocut import cutfamily as cf
from octocut.datafiles import T_NAMES
from octocut.polyring import GF, QQ, SparsePolynomial, parse_polynomial

F = GF(10007)


def test_weight_pairing_covers_each_residue():
    pairs = cf.weight_pairing()
    assert len(pairs) == 12
    assert sorted(i for p in pairs for i in p) == sorted(set(range(1, 28)) - {9, 18, 27})
    from octocut import e6model
    weights = e6model.torus_element().weights
    assert all(weights[a - 1] == weights[b - 1] for a, b in pairs)
    assert sorted(weights[a - 1] for a, _ in pairs) == list(range(1, 13))


def test_parameters_obey_constraint():
    params = cf.CutParameters.from_free([2, 3, 5, 7, 11, 13], QQ)
    assert params.constraint_holds()
    assert all(params.d[i] * params.d[11 - i] == SparsePolynomial.constant(-1, 0, QQ)
               for i in range(6))
    with pytest.raises(cf.DegenerateParameters):
        cf.CutParameters.from_free([0, 1, 1, 1, 1, 1], QQ)


def test_violated_constraint_is_rejected():
    values = [2, 3, 1, 1, 1, 1, -1, -1, -1, -1, -1, 5]          # d1 d12 = 10
    params = cf.CutParameters.general(values, QQ)
    assert not params.constraint_holds()
    with pytest.raises(cf.ConstraintViolation):
        cf.build_cut(params, "second")


def test_constraint_identity_both_directions():
    assert cf.constraint_coefficients() == cf.expected_constraint_polynomials()
    rng = random.Random(11)
    for _ in range(5):
        free = [rng.randrange(1, F.p) for _ in range(6)]
        good = free + [F.neg(F.inv(free[5 - j])) for j in range(6)]
        assert cf.invariant_sum(cf.CutParameters.general(good, F), "second").is_zero()
        bad = list(good)
        k = rng.randrange(12)
        bad[k] = F.add(bad[k], rng.randrange(1, F.p))
        assert not cf.invariant_sum(cf.CutParameters.general(bad, F), "second").is_zero()


def test_dropped_partial_example():
    system = cf.cut_at(1, 1, QQ)
    expected = parse_polynomial("t5*t8 - t2*t11 - t1*t12 + t3*t10", T_NAMES)
    assert system.restricted[26] == expected
    assert 27 not in system.kept_partials and len(system.quadrics) == 26


def test_weight_census(symbolic_cut):
    g = cf._t_weight_grading(14)
    weights = Counter(g.of_polynomial(q) for q in symbolic_cut.quadrics)
    assert None not in weights
    assert sorted(weights.values()) == [2] * 13


def test_c3_index_orbits():
    perm = cf.multiplier_permutation(3)
    seen, orbits = set(), []
    for i in range(1, 13):
        if i in seen:
            continue
        orbit, j = [], i
        while j not in orbit:
            orbit.append(j)
            j = perm[j]
        seen.update(orbit)
        orbits.append(orbit)
    assert orbits == [[1, 3, 9], [2, 6, 5], [4, 12, 10], [7, 8, 11]]


def test_symbolic_matching(symbolic_cut, plain_reference):
    report = cf.match_reference_quadrics(symbolic_cut, plain_reference)
    assert report.complete and len(report.pairs) == 26


def test_numeric_matching_over_fp(plain_reference):
    rng = random.Random(2)
    for _ in range(3):
        system = cf.cut_at(rng.randrange(2, F.p), rng.randrange(2, F.p), F)
        assert cf.match_reference_quadrics(system, plain_reference).complete


def test_perturbed_transcription_fails_one_pair(symbolic_cut, plain_reference):
    bad = list(plain_reference)
    e, _ = next(iter(bad[5].items()))
    bad[5] = bad[5] + SparsePolynomial.monomial(e, 14, QQ, 1)
    report = cf.match_quadrics(symbolic_cut.quadrics, bad)
    assert len(report.unmatched_built) == len(report.unmatched_reference) == 1
    assert report.unmatched_reference == [5]


def test_c3_symmetry(plain_reference, c3_reference):
    assert cf.verify_c3_symmetry(c3_reference).ok
    assert not cf.verify_c3_symmetry(plain_reference).ok
    assert cf.verify_c3_symmetry(plain_reference, multiplier=1).ok


def test_rescaling_to_c3_form(plain_reference, c3_reference):
    resc = cf.find_rescaling(plain_reference, c3_reference)
    assert cf.rescaling_is_valid(plain_reference, c3_reference, resc.factors)
    assert resc.to_strings()[5] == "d1^(1/2)*d2^(1/2)"


def test_rescaling_of_identical_systems_is_trivial(plain_reference):
    resc = cf.find_rescaling(plain_reference, plain_reference)
    assert resc.to_strings() == ["1"] * 12


def test_rescaling_fails_for_inequivalent_system(plain_reference):
    bad = list(plain_reference)
    e, _ = next(iter(bad[5].items()))
    bad[5] = bad[5] + SparsePolynomial.monomial(e, 14, QQ, 1)
    with pytest.raises(cf.NoScaling):
        cf.find_rescaling(plain_reference, bad)


def test_galois_map_symbolic_and_numeric():
    assert cf.verify_galois_map()
    rng = random.Random(4)
    for _ in range(3):
        assert cf.verify_galois_map(rng.randrange(1, F.p), rng.randrange(1, F.p), F)


def test_galois_map_sign_flip_fails():
    sub = dict(cf.galois_substitution())
    sub[0] = -sub[0]
    assert not cf.verify_galois_map(substitution=sub)


def test_galois_orbit_closure():
    closure = cf.galois_orbit_closure(17, 291, F)
    assert closure == {"orbit_length_4": True, "steps_ok": True, "composite_diagonal": True,
                       "composite_preserves_span": True}


def test_span_helpers():
    x = [SparsePolynomial.variable(i, 12, QQ) for i in range(12)]
    basis = [x[0] * x[11], x[1] * x[10]]
    assert cf.span_rank(basis + [basis[0] * 3 - basis[1]]) == 2
    assert cf.in_span(basis, basis[0] + basis[1])
    assert not cf.in_span(basis, x[2] * x[9])
    assert cf.spans_equal(basis, [basis[0] + basis[1], basis[1]])


def test_numeric_cut_matches_exact_build():
    import numpy as np
    from octocut.numsearch.evaluators import QuadraticSystem
    rng = np.random.default_rng(0)
    t = rng.normal(size=12)
    exact = cf.cut_at(3, 5, QQ).quadrics
    approx = QuadraticSystem(cf.numeric_cut(3, 5))
    vals = [float(q.evaluate([Fraction(v) for v in t])) for q in exact]
    assert np.allclose(approx.value(t), vals)


def test_cut_system_text_round_trip():
    system = cf.cut_at(2, 3, F)
    lines = system.to_text().strip().splitlines()
    quads = [ln for ln in lines if not ln.startswith("#")]
    assert len(quads) == 26
    parsed = [parse_polynomial(ln, system.variable_names(), F) for ln in quads]
    assert parsed == system.quadrics
