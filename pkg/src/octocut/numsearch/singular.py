"""Singular points of the cut surfaces: bordered Gauss-Newton search,
projective clustering, A1/A2 classification and the torus-orbit check."""

from __future__ import annotations

from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .. import cutfamily
from ..gradedla import gap_rank
from .evaluators import (AffineChart, ChartedSystem, QuadraticSystem, exact_residual,
                         normalize_projective)
from .newton import NewtonConfig, NewtonResult, gauss_newton, start_rng

CHART_STREAM = 2
START_STREAM = 3
CORANK = 3
GAP = 1e6
CUBIC_THRESHOLD = 1e-6
CLUSTER_TOL = 1e-6


# ---------------------------------------------------------------------------
# bordered system

class BorderedSystem:
    """Unknowns (y, V): chart point y in C^n and V in C^{n x 3}; equations
    F(y) = 0, J(y) V = 0, N V = I_3. Solutions are points where the chart
    Jacobian has corank at least 3."""

    def __init__(self, quadrics: QuadraticSystem, chart: AffineChart, normalization: np.ndarray):
        self.q = quadrics
        self.chart = chart
        self.n = chart.basis.shape[1]
        self.norm = np.asarray(normalization, dtype=complex)
        b = chart.basis
        self.hy = 2 * np.einsum("ia,kij,jb->kab", b, quadrics.matrices, b)
        self._eye = np.eye(CORANK)

    def split(self, z):
        return z[:self.n], z[self.n:].reshape(self.n, CORANK)

    def residual(self, z) -> np.ndarray:
        y, v = self.split(z)
        t = self.chart.to_projective(y)
        jy = self.q.jacobian(t) @ self.chart.basis
        return np.concatenate([self.q.value(t), (jy @ v).ravel(),
                               (self.norm @ v - self._eye).ravel()])

    def jacobian(self, z) -> np.ndarray:
        y, v = self.split(z)
        t = self.chart.to_projective(y)
        jy = self.q.jacobian(t) @ self.chart.basis
        m, n = jy.shape
        top = np.hstack([jy, np.zeros((m, n * CORANK), dtype=complex)])
        dy = np.einsum("kjl,la->kaj", self.hy, v).reshape(m * CORANK, n)
        mid = np.hstack([dy, np.kron(jy, self._eye)])
        bottom = np.hstack([np.zeros((CORANK * CORANK, n), dtype=complex),
                            np.kron(self.norm, self._eye)])
        return np.vstack([top, mid, bottom])

    def start(self, y0) -> np.ndarray:
        """Initial null vectors: the three smallest right singular vectors."""
        jy = self.q.jacobian(self.chart.to_projective(y0)) @ self.chart.basis
        vh = np.linalg.svd(jy)[2]
        v0 = vh[-CORANK:].conj().T
        nv = self.norm @ v0
        v0 = v0 @ np.linalg.inv(nv) if abs(np.linalg.det(nv)) > 1e-12 else v0
        return np.concatenate([y0, v0.ravel()])

    def solve(self, y0, config: NewtonConfig) -> NewtonResult:
        return gauss_newton(self.residual, self.jacobian, self.start(y0), config)


# ---------------------------------------------------------------------------
# classification

@dataclass
class Classification:
    verdict: str                       # smooth | A1 | A2 | unresolved
    jacobian_rank: int | None
    jacobian_gap: float
    tangent_dimension: int | None
    hessian_family_rank: int | None
    two_jet_rank: int | None
    cubic_on_kernel: float | None
    note: str = ""


def _vec_hess(h: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("kij,i,j->k", h, a, b)


def classify_singularity(system, x, expected_dim: int = 2, gap_factor: float = GAP,
                         cubic_threshold: float = CUBIC_THRESHOLD) -> Classification:
    """Local type of the point ``x`` of an affine system cutting out a surface.

    ``system`` provides value/jacobian/hessian/third in its own coordinates.
    The Jacobian rank decides smooth (n - 2) versus double-point candidate
    (n - 3). For a candidate the dependent coordinates are eliminated to
    third order along the 3-dimensional null space; the remaining equations
    then all share one quadratic form up to scale, whose rank separates A1
    (3) from A2 (2 with a nonzero cubic along its kernel line).
    """
    x = np.asarray(x, dtype=complex)
    n = system.nvars
    jac = system.jacobian(x)
    g = gap_rank(jac, gap_factor)
    base = dict(jacobian_rank=g.rank, jacobian_gap=g.gap)
    if g.rank == n - expected_dim:
        return Classification("smooth", tangent_dimension=expected_dim, hessian_family_rank=None,
                              two_jet_rank=None, cubic_on_kernel=None, **base)
    if g.rank != n - expected_dim - 1:
        return Classification("unresolved", tangent_dimension=None if g.rank is None else n - g.rank,
                              hessian_family_rank=None, two_jet_rank=None, cubic_on_kernel=None,
                              note="rank pattern is not that of a double point", **base)
    r = g.rank
    u, s, vh = np.linalg.svd(jac)
    w = vh[:r].conj().T                      # row space
    tang = vh[r:].conj().T                   # null space, n x 3
    u8, urest = u[:, :r], u[:, r:]
    minv = 1.0 / s[:r]
    h = system.hessian(x)
    t3 = system.third(x)
    # quadratic forms of the residual equations on the tangent space
    ht = np.einsum("kij,ia,jb->kab", h, tang, tang)
    hrest = np.einsum("ck,kab->cab", urest.conj().T, ht) / 2
    flat = hrest.reshape(hrest.shape[0], -1)
    fam = gap_rank(flat, gap_factor)
    lu, _, _ = np.linalg.svd(flat)
    lam = lu[:, 0].conj()
    q = np.einsum("c,cab->ab", lam, hrest)
    q = (q + q.T) / 2
    jet = gap_rank(q, gap_factor)
    scale = float(np.linalg.norm(q))
    info = dict(tangent_dimension=n - r, hessian_family_rank=fam.rank, **base)
    if scale == 0 or jet.rank is None or jet.rank == 0:
        return Classification("unresolved", two_jet_rank=jet.rank, cubic_on_kernel=None,
                              note="no usable 2-jet", **info)
    if jet.rank == 3:
        return Classification("A1", two_jet_rank=3, cubic_on_kernel=None, **info)
    if jet.rank != 2:
        return Classification("unresolved", two_jet_rank=jet.rank, cubic_on_kernel=None,
                              note="2-jet rank below 2", **info)
    k = np.linalg.svd(q)[2][-1].conj()      # kernel line of the 2-jet
    ta = tang @ k
    half_h = _vec_hess(h, ta, ta) / 2
    b2 = -minv * (u8.conj().T @ half_h)
    cubic_full = _vec_hess(h, ta, w @ b2) + np.einsum("kijl,i,j,l->k", t3, ta, ta, ta) / 6
    cubic = complex(lam @ (urest.conj().T @ cubic_full))
    rel = abs(cubic) / scale
    verdict = "A2" if rel > cubic_threshold else "unresolved"
    return Classification(verdict, two_jet_rank=2, cubic_on_kernel=rel,
                          note="" if verdict == "A2" else "cubic term on the kernel vanishes",
                          **info)


# ---------------------------------------------------------------------------
# clustering and orbits

def projective_distance(a, b) -> float:
    """Sine of the angle between the lines through a and b (invariant under scaling).

    Computed from the component of b orthogonal to a, which stays accurate
    for nearby points where sqrt(1 - cos^2) would cancel.
    """
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    return float(min(1.0, np.linalg.norm(b - np.vdot(a, b) * a)))


def cluster_points(points: Sequence, tolerance: float = CLUSTER_TOL,
                   residuals: Sequence[float] | None = None) -> list[list[int]]:
    """Single-linkage clusters (lists of indices, each sorted; clusters ordered by
    their representative). The representative, listed first, is the member
    with the lowest residual (lowest index on ties)."""
    n = len(points)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if find(i) != find(j) and projective_distance(points[i], points[j]) < tolerance:
                parent[find(j)] = find(i)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    res = residuals if residuals is not None else [0.0] * n
    out = []
    for members in groups.values():
        rep = min(members, key=lambda i: (res[i], i))
        out.append([rep] + [i for i in members if i != rep])
    out.sort(key=lambda c: c[0])
    return out


def torus_orbits(points: Sequence, order: int = 13, tolerance: float = CLUSTER_TOL):
    """Orbits of t_i -> zeta^i t_i on a point set; None if the set is not preserved."""
    zeta = np.exp(2j * np.pi / order)
    act = zeta ** np.arange(1, len(points[0]) + 1) if len(points) else None
    image = []
    for p in points:
        q = act * np.asarray(p)
        hits = [j for j, r in enumerate(points) if projective_distance(q, r) < tolerance]
        if len(hits) != 1:
            return None
        image.append(hits[0])
    seen, orbits = set(), []
    for i in range(len(points)):
        if i in seen:
            continue
        orb, j = [], i
        while j not in orb:
            orb.append(j)
            j = image[j]
        seen.update(orb)
        orbits.append(orb)
    return orbits


# ---------------------------------------------------------------------------
# the search

@dataclass
class SingularPointReport:
    point: list[complex]
    residual: float
    classification: Classification
    repolished_verdict: str | None = None
    cluster_size: int = 1

    def to_json(self) -> dict:
        c = self.classification
        return {
            "point": [[float(z.real), float(z.imag)] for z in self.point],
            "residual": self.residual,
            "verdict": c.verdict,
            "jacobian_rank": c.jacobian_rank,
            "jacobian_gap": c.jacobian_gap,
            "tangent_dimension": c.tangent_dimension,
            "two_jet_rank": c.two_jet_rank,
            "hessian_family_rank": c.hessian_family_rank,
            "cubic_on_kernel": c.cubic_on_kernel,
            "repolished_verdict": self.repolished_verdict,
            "cluster_size": self.cluster_size,
        }


@dataclass
class SearchResult:
    reports: list[SingularPointReport]
    starts: int
    converged: int
    orbits: list[list[int]] | None = field(default=None)

    def verdict_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for r in self.reports:
            out[r.classification.verdict] = out.get(r.classification.verdict, 0) + 1
        return dict(sorted(out.items()))


class SingularSearch:
    """Multi-start bordered Gauss-Newton at one parameter point (d3..d6 = 1)."""

    def __init__(self, d1: complex, d2: complex, seed: int = 0,
                 config: NewtonConfig = NewtonConfig(max_iter=150, tol=1e-13), data_dir=None):
        self.polys = cutfamily.numeric_cut(d1, d2, data_dir)
        self.quadrics = QuadraticSystem(self.polys)
        rng = start_rng(seed, 0, CHART_STREAM)
        self.chart = AffineChart.random(12, rng)
        norm = rng.normal(size=(CORANK, 11)) + 1j * rng.normal(size=(CORANK, 11))
        self.bordered = BorderedSystem(self.quadrics, self.chart, norm)
        self.charted = ChartedSystem(self.quadrics, self.chart)
        self.seed = seed
        self.config = config

    def start_system(self, index: int) -> tuple[BorderedSystem, np.random.Generator]:
        """Bordered system in a fresh random chart for start ``index``."""
        rng = start_rng(self.seed, index, START_STREAM)
        chart = AffineChart.random(12, rng)
        norm = rng.normal(size=(CORANK, 11)) + 1j * rng.normal(size=(CORANK, 11))
        return BorderedSystem(self.quadrics, chart, norm), rng

    def run_start(self, index: int) -> np.ndarray | None:
        system, rng = self.start_system(index)
        y0 = rng.normal(size=11) + 1j * rng.normal(size=11)
        res = system.solve(y0, self.config)
        if not res.success:
            return None
        x = self._polish(system, res.x)
        t = normalize_projective(system.chart.to_projective(system.split(x)[0]))
        return t if np.all(np.isfinite(t)) else None

    def _polish(self, system: BorderedSystem, z: np.ndarray, factor: float = 1e4) -> np.ndarray:
        """Keep iterating past the success threshold until the residual stalls.

        Near an A2 point the bordered system is singular and convergence is
        linear, so the position error scales like the square root of the
        residual; the extra iterations (never increasing the residual) bring
        repeated hits of one point to within ~1e-7 of each other.
        """
        cfg = NewtonConfig(self.config.max_iter, self.config.tol / factor, self.config.damping,
                           self.config.max_halvings, self.config.step_tol, self.config.seed)
        return gauss_newton(system.residual, system.jacobian, z, cfg).x

    def classify(self, t) -> Classification:
        return classify_singularity(self.charted, self.chart.from_projective(t))

    def repolish(self, t, factor: float = 100.0) -> np.ndarray:
        y = self.chart.from_projective(t)
        res = self.bordered.solve(y, self.config.tightened(factor))
        z = self._polish(self.bordered, res.x, 1e4 * factor)
        return normalize_projective(self.chart.to_projective(self.bordered.split(z)[0]))

    def run(self, starts: int, threads: int = 1, tolerance: float = CLUSTER_TOL,
            repolish: bool = True) -> SearchResult:
        if threads > 1:
            with ThreadPoolExecutor(threads) as pool:
                sols = list(pool.map(self.run_start, range(starts)))
        else:
            sols = [self.run_start(i) for i in range(starts)]
        pts = [s for s in sols if s is not None]
        resid = [exact_residual(self.polys, p) for p in pts]
        reports = []
        for cl in cluster_points(pts, tolerance, resid):
            rep = pts[cl[0]]
            c = self.classify(rep)
            again = self.classify(self.repolish(rep)).verdict if repolish else None
            reports.append(SingularPointReport([complex(z) for z in rep], resid[cl[0]], c, again,
                                               len(cl)))
        orbits = torus_orbits([np.array(r.point) for r in reports], tolerance=1e-5) if reports else []
        return SearchResult(reports, starts, len(pts), orbits)


def find_singular_points(d1: complex, d2: complex, starts: int, seed: int = 0,
                         config: NewtonConfig | None = None, threads: int = 1,
                         data_dir=None) -> SearchResult:
    search = SingularSearch(d1, d2, seed, config or NewtonConfig(max_iter=150, tol=1e-13), data_dir)
    return search.run(starts, threads)
