"""Floating-point evaluation of polynomial systems with exact derivatives.

All evaluators share one small interface used by the solvers and the
singularity classifier: ``value``, ``jacobian``, ``hessian`` (m x n x n)
and ``third`` (m x n x n x n), each taking a complex point.
"""

from __future__ import annotations

from collections.abc import Sequence
from functools import lru_cache

import numpy as np

from ..polyring import CC, SparsePolynomial


class _Compiled:
    """Terms of several polynomials flattened into arrays."""

    __slots__ = ("exps", "coeffs", "owner", "m")

    def __init__(self, polys: Sequence[SparsePolynomial], nvars: int):
        exps, coeffs, owner = [], [], []
        for k, p in enumerate(polys):
            for e, c in p.items():
                exps.append(e)
                coeffs.append(c)
                owner.append(k)
        self.exps = np.array(exps, dtype=np.int64).reshape(len(exps), nvars)
        self.coeffs = np.array(coeffs, dtype=complex)
        self.owner = np.array(owner, dtype=np.int64)
        self.m = len(polys)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros(self.m, dtype=complex)
        if len(self.coeffs):
            mons = np.prod(np.power(x[None, :], self.exps), axis=1)
            np.add.at(out, self.owner, self.coeffs * mons)
        return out

    def magnitude(self, x: np.ndarray) -> np.ndarray:
        """sum |c| |monomial(x)| per polynomial (the scale for relative vanishing)."""
        out = np.zeros(self.m)
        if len(self.coeffs):
            mons = np.prod(np.power(np.abs(x)[None, :], self.exps), axis=1)
            np.add.at(out, self.owner, np.abs(self.coeffs) * mons)
        return out


def to_complex(polys: Sequence[SparsePolynomial]) -> list[SparsePolynomial]:
    return [p if p.domain == CC else p.map_coefficients(CC) for p in polys]


class PolynomialSystem:
    """Generic evaluator; derivative systems are differentiated exactly and cached."""

    def __init__(self, polys: Sequence[SparsePolynomial]):
        if not polys:
            raise ValueError("empty system")
        self.polys = to_complex(polys)
        self.nvars = self.polys[0].nvars
        self.npolys = len(self.polys)
        self._base = _Compiled(self.polys, self.nvars)
        self._derived = lru_cache(maxsize=None)(self._derive)

    def _derive(self, index: tuple[int, ...]) -> _Compiled:
        polys = self.polys
        for i in index:
            polys = [p.partial_derivative(i) for p in polys]
        return _Compiled(polys, self.nvars)

    def value(self, x) -> np.ndarray:
        return self._base(np.asarray(x, dtype=complex))

    def magnitude(self, x) -> np.ndarray:
        return self._base.magnitude(np.asarray(x, dtype=complex))

    def jacobian(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        return np.column_stack([self._derived((j,))(x) for j in range(self.nvars)])

    def hessian(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        n = self.nvars
        out = np.zeros((self.npolys, n, n), dtype=complex)
        for i in range(n):
            for j in range(i, n):
                v = self._derived((i, j))(x)
                out[:, i, j] = v
                out[:, j, i] = v
        return out

    def third(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        n = self.nvars
        out = np.zeros((self.npolys, n, n, n), dtype=complex)
        for i in range(n):
            for j in range(i, n):
                for k in range(j, n):
                    v = self._derived((i, j, k))(x)
                    for a, b, c in {(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)}:
                        out[:, a, b, c] = v
        return out


class QuadraticSystem:
    """Homogeneous quadrics q_k(t) = t^T Q_k t stored as symmetric matrices."""

    def __init__(self, polys: Sequence[SparsePolynomial]):
        polys = to_complex(polys)
        n = polys[0].nvars
        q = np.zeros((len(polys), n, n), dtype=complex)
        for k, p in enumerate(polys):
            for e, c in p.items():
                idx = [i for i, a in enumerate(e) for _ in range(a)]
                if len(idx) != 2:
                    raise ValueError("QuadraticSystem needs homogeneous quadrics")
                i, j = idx
                if i == j:
                    q[k, i, i] += c
                else:
                    q[k, i, j] += c / 2
                    q[k, j, i] += c / 2
        self.polys = polys
        self.matrices = q
        self.nvars = n
        self.npolys = len(polys)
        self._compiled = _Compiled(polys, n)

    def value(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=complex)
        return np.einsum("kij,i,j->k", self.matrices, t, t)

    def magnitude(self, t) -> np.ndarray:
        return self._compiled.magnitude(np.asarray(t, dtype=complex))

    def jacobian(self, t) -> np.ndarray:
        return 2 * np.einsum("kij,j->ki", self.matrices, np.asarray(t, dtype=complex))

    def hessian(self, t) -> np.ndarray:
        return 2 * self.matrices

    def third(self, t) -> np.ndarray:
        n = self.nvars
        return np.zeros((self.npolys, n, n, n), dtype=complex)


class AffineChart:
    """Affine chart t = c + B y of projective space, c a unit vector and B an
    orthonormal basis of its orthogonal complement."""

    def __init__(self, c: np.ndarray, basis: np.ndarray):
        self.c = np.asarray(c, dtype=complex)
        self.basis = np.asarray(basis, dtype=complex)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> AffineChart:
        c = rng.normal(size=n) + 1j * rng.normal(size=n)
        c /= np.linalg.norm(c)
        m = np.column_stack([c, rng.normal(size=(n, n - 1)) + 1j * rng.normal(size=(n, n - 1))])
        q, _ = np.linalg.qr(m)
        return cls(c, q[:, 1:])

    @classmethod
    def coordinate(cls, n: int, index: int) -> AffineChart:
        """The chart t_index = 1."""
        eye = np.eye(n, dtype=complex)
        return cls(eye[index], np.delete(eye, index, axis=1))

    def to_projective(self, y) -> np.ndarray:
        return self.c + self.basis @ np.asarray(y, dtype=complex)

    def from_projective(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=complex)
        s = np.vdot(self.c, t)
        if abs(s) < 1e-14 * np.linalg.norm(t):
            raise ValueError("point lies on the hyperplane at infinity of this chart")
        return self.basis.conj().T @ (t / s)


class ChartedSystem:
    """A homogeneous system restricted to an affine chart (derivatives in y)."""

    def __init__(self, system, chart: AffineChart):
        self.system = system
        self.chart = chart
        self.nvars = chart.basis.shape[1]
        self.npolys = system.npolys

    def value(self, y):
        return self.system.value(self.chart.to_projective(y))

    def magnitude(self, y):
        return self.system.magnitude(self.chart.to_projective(y))

    def jacobian(self, y):
        return self.system.jacobian(self.chart.to_projective(y)) @ self.chart.basis

    def hessian(self, y):
        b = self.chart.basis
        return np.einsum("kij,ia,jb->kab", self.system.hessian(self.chart.to_projective(y)), b, b)

    def third(self, y):
        b = self.chart.basis
        t3 = self.system.third(self.chart.to_projective(y))
        if not np.any(t3):
            n = self.nvars
            return np.zeros((self.npolys, n, n, n), dtype=complex)
        return np.einsum("kijl,ia,jb,lc->kabc", t3, b, b, b)


def normalize_projective(t) -> np.ndarray:
    """Scale so the largest-modulus coordinate is 1 (lowest index breaks ties)."""
    t = np.asarray(t, dtype=complex)
    i = int(np.argmax(np.abs(t)))
    return t / t[i]


def scaled_residuals(system, x) -> np.ndarray:
    """|f(x)| / sum |c||monomial(x)| per polynomial (0 where the scale is 0)."""
    v = np.abs(system.value(x))
    s = system.magnitude(x)
    return np.where(s > 0, v / np.where(s > 0, s, 1), v)


def exact_residual(polys: Sequence[SparsePolynomial], t) -> float:
    """Max |q(t)| over the polynomials, evaluated term by term outside numpy."""
    pt = [complex(x) for x in t]
    return max(abs(p.evaluate(pt)) for p in to_complex(polys))
