"""The E6-invariant cubic, the 27 quadrics of the octonionic plane, the order-13
torus element and the affine chart, with their consistency checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import lcm

from . import datafiles
from .datafiles import P_NAMES
from .polyring import SparsePolynomial

NVARS = 27


@dataclass(frozen=True)
class TorusElement:
    """Diagonal action P_i -> zeta^{a_i} P_i with zeta a primitive root of unity.

    The root of unity is never materialised; weights are integers mod ``order``.
    """

    order: int
    weights: tuple[int, ...]

    def monomial_weight(self, e) -> int:
        return sum(a * k for a, k in zip(self.weights, e)) % self.order

    def weight_multiplicities(self) -> dict[int, int]:
        counts = {w: 0 for w in range(self.order)}
        for a in self.weights:
            counts[a % self.order] += 1
        return counts


def torus_weight_of(p: SparsePolynomial, weights, order: int = 13) -> int | None:
    """Common weight mod ``order`` of all monomials of ``p``; None if mixed."""
    if p.is_zero():
        raise ValueError("the zero polynomial has no torus weight")
    ws = {sum(a * k for a, k in zip(weights, e)) % order for e, _ in p.items()}
    return ws.pop() if len(ws) == 1 else None


@lru_cache(maxsize=None)
def _cubic_cached(data_dir, verify) -> SparsePolynomial:
    (cubic,) = datafiles.load_polynomials("cartan_cubic.txt", P_NAMES, data_dir, verify)
    return cubic


def build_cartan_cubic(data_dir=None, verify: bool = True) -> SparsePolynomial:
    return _cubic_cached(None if data_dir is None else str(data_dir), verify)


def op2_ideal(data_dir=None, verify: bool = True) -> list[SparsePolynomial]:
    """The 27 partial derivatives of the cubic, in variable order."""
    cubic = build_cartan_cubic(data_dir, verify)
    return [cubic.partial_derivative(i) for i in range(NVARS)]


def invariant_quadrics(data_dir=None) -> list[SparsePolynomial]:
    """Transcribed partials along the three weight-zero variables P9, P18, P27."""
    return datafiles.load_polynomials("invariant_quadrics.txt", P_NAMES, data_dir)


def torus_element(data_dir=None) -> TorusElement:
    data = datafiles.load_json("torus.json", data_dir)
    return TorusElement(data["order"], tuple(data["weights"]))


@dataclass(frozen=True)
class AffineChart:
    """Chart P22 = 1 of the octonionic plane.

    ``bound`` maps 1-based indices of the eleven solved variables to
    polynomials in the 27 P-variables that involve only the 16 free ones.
    """

    bound: dict[int, SparsePolynomial]
    free: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "free",
                           tuple(i for i in range(1, NVARS + 1) if i not in self.bound))

    def substitution(self) -> dict[int, SparsePolynomial]:
        """0-based substitution map P_i -> chart expression (free variables fixed)."""
        return {i - 1: poly for i, poly in self.bound.items()}

    def point(self, free_values) -> list:
        """All 27 coordinates from values of the 16 free coordinates."""
        full = [0] * NVARS
        for i, v in zip(self.free, free_values):
            full[i - 1] = v
        out = list(full)
        for i, poly in self.bound.items():
            out[i - 1] = _eval_on_free(poly, full)
        return out


def _eval_on_free(poly: SparsePolynomial, full) -> object:
    total = 0
    for e, c in poly.items():
        v = c
        for x, k in zip(full, e):
            if k:
                v = v * x**k
        total = total + v
    return total


def load_chart(data_dir=None, verify: bool = True) -> AffineChart:
    bound = {}
    for lhs, poly in datafiles.load_equations("affine_chart.txt", P_NAMES, "=", data_dir, verify):
        bound[int(lhs.lstrip("P"))] = poly
    return AffineChart(bound)


@dataclass
class ChartReport:
    ok: bool
    failing_quadric: int | None = None
    residual: str | None = None


def verify_chart(chart: AffineChart | None = None, data_dir=None) -> ChartReport:
    """Substitute the chart into all 27 quadrics; each must vanish identically."""
    chart = chart if chart is not None else load_chart(data_dir)
    sub = chart.substitution()
    for i, q in enumerate(op2_ideal(data_dir), start=1):
        r = q.substitute(sub, NVARS)
        if not r.is_zero():
            return ChartReport(False, i, r.to_string(P_NAMES))
    return ChartReport(True)


def cubic_is_invariant(cubic: SparsePolynomial, torus: TorusElement) -> bool:
    return all(torus.monomial_weight(e) == 0 for e, _ in cubic.items())


def quadrics_are_eigenvectors(quadrics, torus: TorusElement) -> bool:
    return all(torus_weight_of(q, torus.weights, torus.order) == (-a) % torus.order
               for q, a in zip(quadrics, torus.weights))


def cartan_torus_lattice(cubic: SparsePolynomial | None = None) -> list[tuple[int, ...]]:
    """Integer basis (over Q) of weight vectors w with w_i + w_j + w_k = 0 on every
    cubic term; it spans the characters of the maximal torus preserving the cubic."""
    from .gradedla import rational_nullspace

    cubic = cubic if cubic is not None else build_cartan_cubic()
    rows = []
    for e, _ in cubic.items():
        rows.append([Fraction(k) for k in e])
    basis = rational_nullspace(rows, NVARS)
    out = []
    for v in basis:
        den = 1
        for x in v:
            den = lcm(den, x.denominator)
        out.append(tuple(int(x * den) for x in v))
    return out


def e6_report(data_dir=None) -> dict:
    """Summary used by ``octocut e6 verify``."""
    cubic = build_cartan_cubic(data_dir)
    torus = torus_element(data_dir)
    quads = op2_ideal(data_dir)
    coeffs_ok = all(c in (Fraction(1), Fraction(-1)) for _, c in cubic.items())
    degree_ok = all(sum(e) == 3 for e, _ in cubic.items())
    invariant_ok = [quads[i - 1] for i in (9, 18, 27)] == invariant_quadrics(data_dir)
    return {
        "cubic_terms": len(cubic),
        "cubic_coefficients_pm1": coeffs_ok and degree_ok,
        "invariance_ok": cubic_is_invariant(cubic, torus),
        "eigenweights_ok": quadrics_are_eigenvectors(quads, torus),
        "invariant_quadrics_match": invariant_ok,
        "chart_ok": verify_chart(data_dir=data_dir).ok,
    }


__all__ = [
    "AffineChart", "ChartReport", "TorusElement", "build_cartan_cubic", "cartan_torus_lattice",
    "cubic_is_invariant", "e6_report", "invariant_quadrics", "load_chart", "op2_ideal",
    "quadrics_are_eigenvectors", "torus_element", "torus_weight_of", "verify_chart",
]
