"""The nodal curve in the (d1, d2) plane and the two univariate polynomials
attached to it: the degree-7 slice d1 = 1 and the octic of the special member."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .. import datafiles
from ..polyring import SparsePolynomial
from .evaluators import PolynomialSystem, scaled_residuals

SLICE_TOL = 1e-8
CUSP_TOL = 1e-6
REFERENCE_PAIR = (complex(1.93, 2.30), complex(0.0125, -0.515))
MATCH_DECIMALS = 2


@dataclass
class DiscriminantCurve:
    poly: SparsePolynomial
    system: PolynomialSystem           # [Disc, dDisc/dd1, dDisc/dd2]

    @classmethod
    def load(cls, data_dir=None) -> DiscriminantCurve:
        (p,) = datafiles.load_polynomials("discriminant.txt", ["d1", "d2"], data_dir)
        return cls(p, PolynomialSystem([p, p.partial_derivative(0), p.partial_derivative(1)]))

    def value(self, d1, d2) -> complex:
        return complex(self.system.value([d1, d2])[0])

    def scaled(self, d1, d2) -> np.ndarray:
        """Scaled |Disc|, |dDisc/dd1|, |dDisc/dd2| at (d1, d2)."""
        return scaled_residuals(self.system, np.array([d1, d2], dtype=complex))


def load_univariate(name: str, data_dir=None) -> SparsePolynomial:
    (p,) = datafiles.load_polynomials(name, ["d"], data_dir)
    return p


def univariate_roots(p: SparsePolynomial) -> np.ndarray:
    """Companion-matrix roots, each followed by one Newton step."""
    deg = p.total_degree()
    coeffs = [complex(p.coefficient((k,))) for k in range(deg, -1, -1)]
    roots = np.roots(coeffs)
    dp = np.polyder(np.array(coeffs))
    out = []
    for r in roots:
        d = np.polyval(dp, r)
        out.append(r - np.polyval(coeffs, r) / d if d != 0 else r)
    return np.array(sorted(out, key=lambda z: (round(z.real, 12), z.imag)))


def matches_reference(pair, reference=REFERENCE_PAIR, decimals: int = MATCH_DECIMALS) -> bool:
    """Every real and imaginary part agrees with the reference to ``decimals`` places."""
    half = 0.5 * 10.0 ** (-decimals)
    return all(abs(a.real - b.real) <= half and abs(a.imag - b.imag) <= half
               for a, b in zip(pair, reference))


@dataclass
class DiscriminantReport:
    slice_roots: list[complex]
    slice_scaled: list[float]
    octic_roots: list[complex]
    candidates: list[tuple[int, int, float]]        # (i, j, scaled |Disc|)
    cusps: list[tuple[int, int, list[float]]]       # (i, j, scaled values incl. partials)
    flagged: tuple[complex, complex] | None
    nearest: tuple[complex, complex]
    nearest_distance: float

    @property
    def slice_ok(self) -> bool:
        return all(v < SLICE_TOL for v in self.slice_scaled)

    def to_json(self) -> dict:
        def c(z):
            return [float(z.real), float(z.imag)]
        r = self.octic_roots
        return {
            "slice_roots": [c(z) for z in self.slice_roots],
            "slice_scaled_max": max(self.slice_scaled),
            "slice_ok": self.slice_ok,
            "octic_roots": [c(z) for z in r],
            "candidate_pairs": [[c(r[i]), c(r[j]), v] for i, j, v in self.candidates],
            "cusp_pairs": [[c(r[i]), c(r[j]), max(v)] for i, j, v in self.cusps],
            "flagged_pair": None if self.flagged is None else [c(z) for z in self.flagged],
            "nearest_cusp_pair": [c(z) for z in self.nearest],
            "nearest_distance": self.nearest_distance,
        }


def discriminant_checks(data_dir=None, slice_tol: float = SLICE_TOL,
                        cusp_tol: float = CUSP_TOL) -> DiscriminantReport:
    curve = DiscriminantCurve.load(data_dir)
    sroots = univariate_roots(load_univariate("singular_slice.txt", data_dir))
    sscaled = [float(curve.scaled(1.0, r)[0]) for r in sroots]
    oroots = univariate_roots(load_univariate("special_octic.txt", data_dir))
    candidates, cusps = [], []
    for i, a in enumerate(oroots):
        for j, b in enumerate(oroots):
            v = curve.scaled(a, b)
            if v[0] < cusp_tol:
                candidates.append((i, j, float(v[0])))
                if np.all(v < cusp_tol):
                    cusps.append((i, j, [float(x) for x in v]))
    pairs = [(complex(oroots[i]), complex(oroots[j])) for i, j, _ in cusps]
    flagged = next((p for p in pairs if matches_reference(p)), None)
    dist = [max(abs(p[0] - REFERENCE_PAIR[0]), abs(p[1] - REFERENCE_PAIR[1])) for p in pairs]
    k = int(np.argmin(dist))
    return DiscriminantReport([complex(z) for z in sroots], sscaled,
                              [complex(z) for z in oroots], candidates, cusps,
                              flagged, pairs[k], float(dist[k]))


def special_parameters(data_dir=None) -> tuple[complex, complex]:
    """The cusp pair of octic roots closest to the reference approximation."""
    return discriminant_checks(data_dir).nearest


def heatmap(re_range: tuple[float, float], im_range: tuple[float, float], grid: int,
            d2: complex = 1.0, data_dir=None) -> list[tuple[float, float, float, float]]:
    """Samples (Re d1, Im d1, |Disc|, scaled |Disc|) over a grid of complex d1, fixed d2."""
    curve = DiscriminantCurve.load(data_dir)
    xs = np.linspace(re_range[0], re_range[1], grid)
    ys = np.linspace(im_range[0], im_range[1], grid)
    out = []
    for y in ys:
        for x in xs:
            d1 = complex(x, y)
            out.append((float(x), float(y), abs(curve.value(d1, d2)),
                        float(curve.scaled(d1, d2)[0])))
    return out


def write_heatmap_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["re_d1", "im_d1", "abs_disc", "scaled_disc"])
        for r in rows:
            w.writerow([repr(v) for v in r])
