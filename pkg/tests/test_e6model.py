from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from octocut import datafiles, e6model
from octocut.datafiles import P_NAMES, TranscriptionError
from octocut.polyring import SparsePolynomial, parse_polynomial


def P(text: str) -> SparsePolynomial:
    return parse_polynomial(text, P_NAMES)


def mono(*idx: int) -> tuple[int, ...]:
    e = [0] * 27
    for i in idx:
        e[i - 1] += 1
    return tuple(e)


def test_cubic_shape():
    cubic = e6model.build_cartan_cubic()
    assert len(cubic) == 45
    assert cubic.homogeneous_degree() == 3
    assert {c for _, c in cubic.items()} == {Fraction(1), Fraction(-1)}
    assert cubic.coefficient(mono(7, 8, 9)) == -1
    assert cubic.coefficient(mono(1, 10, 19)) == 1
    assert cubic.coefficient(mono(10, 13, 16)) == -1


def test_known_partials():
    q = e6model.op2_ideal()
    assert q[26] == P("-P10*P11 - P21*P24 - P25*P26 - P4*P5 + P18*P9")
    assert q[8] == P("-P13*P14 - P19*P20 + P18*P27 - P3*P6 - P7*P8")
    assert all(p.homogeneous_degree() == 2 for p in q)
    assert [q[i - 1] for i in (9, 18, 27)] == e6model.invariant_quadrics()


def test_torus_weights():
    g = e6model.torus_element()
    mult = g.weight_multiplicities()
    assert mult[0] == 3 and all(mult[w] == 2 for w in range(1, 13))
    assert e6model.cubic_is_invariant(e6model.build_cartan_cubic(), g)
    assert e6model.quadrics_are_eigenvectors(e6model.op2_ideal(), g)
    assert e6model.torus_weight_of(P("P26"), g.weights) == 1
    assert e6model.torus_weight_of(P("P1 + P2"), g.weights) is None
    with pytest.raises(ValueError):
        e6model.torus_weight_of(SparsePolynomial.zero(27), g.weights)


def test_torus_lattice_contains_order_13_weights():
    lattice = e6model.cartan_torus_lattice()
    assert len(lattice) == 6                      # rank of E6
    cubic = e6model.build_cartan_cubic()
    for v in lattice:
        assert all(sum(v[i] * k for i, k in enumerate(e)) == 0 for e, _ in cubic.items())


def test_chart_identity():
    assert e6model.verify_chart().ok


def test_corrupted_chart_names_the_failing_quadric():
    chart = e6model.load_chart()
    bound = dict(chart.bound)
    bound[4] = -bound[4]
    report = e6model.verify_chart(e6model.AffineChart(bound))
    assert not report.ok
    assert report.failing_quadric is not None and report.residual


def test_chart_origin_is_a_point_of_the_plane():
    chart = e6model.load_chart()
    pt = chart.point([Fraction(0)] * 16)
    assert pt[21] == 1
    assert all(q.evaluate(pt) == 0 for q in e6model.op2_ideal())
    rng = np.random.default_rng(5)
    u = rng.normal(size=16) + 1j * rng.normal(size=16)
    z = np.array(chart.point(list(u)), dtype=complex)
    from octocut.polyring import CC
    vals = [abs(q.map_coefficients(CC).evaluate(list(z))) for q in e6model.op2_ideal()]
    assert max(vals) < 1e-10 * max(1.0, np.max(np.abs(z)) ** 2)


def test_checksum_guards_transcription(data_copy):
    path = data_copy / "cartan_cubic.txt"
    path.write_text(path.read_text().replace("+", "-", 1))
    with pytest.raises(TranscriptionError):
        datafiles.read_data("cartan_cubic.txt", data_copy)


def test_report():
    rep = e6model.e6_report()
    assert rep["cubic_terms"] == 45
    assert all(v for k, v in rep.items() if k != "cubic_terms")
