"""Random points on the cut surface X_{d1,d2}.

Points are found inside the 16-dimensional affine chart of the octonionic
plane (P22 = 1): the 15 linear cut conditions become quadratic equations
in the chart coordinates, solved by Gauss-Newton from a random start. The
solution is mapped to t-coordinates (so t12 = P22 = 1) and polished on the
26 quadrics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import cutfamily, e6model
from ..gradedla import GapRank, gap_rank
from ..polyring import CC, SparsePolynomial
from .evaluators import PolynomialSystem, QuadraticSystem, normalize_projective
from .newton import NewtonConfig, gauss_newton, start_rng

SAMPLING_STREAM = 1


class SamplingFailure(RuntimeError):
    def __init__(self, seeds: list[int]):
        super().__init__(f"no convergence for seeds {seeds}")
        self.seeds = seeds


class ChartParametrization:
    """P(u): the 27 coordinates as polynomials in the 16 free chart coordinates."""

    def __init__(self, data_dir=None):
        chart = e6model.load_chart(data_dir)
        self.free = chart.free
        pos = {p: i for i, p in enumerate(self.free)}
        n = len(self.free)

        def restrict(poly: SparsePolynomial) -> SparsePolynomial:
            return poly.map_exponents(lambda e: [e[p - 1] for p in self.free], n)

        coords = []
        for i in range(1, 28):
            if i in chart.bound:
                coords.append(restrict(chart.bound[i]).map_coefficients(CC))
            else:
                coords.append(SparsePolynomial.variable(pos[i], n, CC))
        self.system = PolynomialSystem(coords)

    def __call__(self, u) -> np.ndarray:
        return self.system.value(u)

    def jacobian(self, u) -> np.ndarray:
        return self.system.jacobian(u)


@dataclass
class SurfacePoint:
    t: np.ndarray
    residual: float
    seed: int
    attempts: int
    chart_rank: GapRank | None = field(default=None, repr=False)


class SurfaceSampler:
    """Reusable sampler for one parameter point (d1, d2); d3..d6 = 1."""

    def __init__(self, d1: complex, d2: complex, data_dir=None,
                 config: NewtonConfig = NewtonConfig(tol=1e-13)):
        self.d1, self.d2 = complex(d1), complex(d2)
        self.config = config
        self.param = ChartParametrization(data_dir)
        self.conditions = cutfamily.cut_condition_matrix(self.d1, self.d2, data_dir=data_dir)
        self.keep = [i - 1 for i in cutfamily.surviving_indices(data_dir)]
        self.quadrics = QuadraticSystem(cutfamily.numeric_cut(self.d1, self.d2, data_dir))

    def _chart_solve(self, rng: np.random.Generator):
        u0 = rng.normal(size=16) + 1j * rng.normal(size=16)
        return gauss_newton(lambda u: self.conditions @ self.param(u),
                            lambda u: self.conditions @ self.param.jacobian(u), u0, self.config)

    def polish(self, t: np.ndarray, config: NewtonConfig | None = None):
        """Gauss-Newton on the 26 quadrics in the chart t12 = 1."""
        config = config or self.config
        t = np.asarray(t, dtype=complex) / t[11]

        def fun(y):
            return self.quadrics.value(np.append(y, 1.0))

        def jac(y):
            return self.quadrics.jacobian(np.append(y, 1.0))[:, :11]

        res = gauss_newton(fun, jac, t[:11], config)
        return np.append(res.x, 1.0), res

    def chart_jacobian(self, t: np.ndarray) -> np.ndarray:
        """26 x 11 Jacobian in the chart t12 = 1."""
        t = np.asarray(t, dtype=complex) / t[11]
        return self.quadrics.jacobian(t)[:, :11]

    def sample(self, seed: int, retries: int = 10, residual_bound: float = 1e-10) -> SurfacePoint:
        tried = []
        for attempt in range(retries):
            rng = start_rng(seed, attempt, SAMPLING_STREAM)
            tried.append(attempt)
            res = self._chart_solve(rng)
            if not res.success:
                continue
            p = self.param(res.x)
            t = p[self.keep]
            if abs(t[11]) < 1e-12:
                continue
            t, _ = self.polish(t)
            tn = normalize_projective(t)
            resid = float(np.max(np.abs(self.quadrics.value(tn))))
            if np.all(np.isfinite(tn)) and resid < residual_bound:
                return SurfacePoint(tn, resid, seed, attempt + 1,
                                    gap_rank(self.chart_jacobian(tn)))
        raise SamplingFailure([seed])


def sample_surface_point(d1: complex, d2: complex, seed: int, data_dir=None) -> SurfacePoint:
    return SurfaceSampler(d1, d2, data_dir).sample(seed)
