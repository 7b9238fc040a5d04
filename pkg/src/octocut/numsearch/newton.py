"""Least-squares Gauss-Newton iteration for complex analytic systems."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class NewtonConfig:
    """Solver settings; a run is fully determined by the config and the start."""

    max_iter: int = 200
    tol: float = 1e-12
    damping: float = 0.5
    max_halvings: int = 30
    step_tol: float = 1e-15
    seed: int = 0

    def __post_init__(self):
        if self.tol <= 0 or self.step_tol <= 0 or self.max_iter <= 0:
            raise ValueError("tolerances and iteration cap must be positive")
        if not 0 < self.damping < 1:
            raise ValueError("damping factor must lie in (0, 1)")

    def tightened(self, factor: float = 100.0) -> NewtonConfig:
        return NewtonConfig(self.max_iter, self.tol / factor, self.damping, self.max_halvings,
                            self.step_tol, self.seed)


@dataclass
class NewtonResult:
    x: np.ndarray
    residual: float
    initial_residual: float
    iterations: int
    success: bool


def gauss_newton(fun: Callable[[np.ndarray], np.ndarray],
                 jac: Callable[[np.ndarray], np.ndarray],
                 x0, config: NewtonConfig = NewtonConfig()) -> NewtonResult:
    """Minimise |fun(x)| by least-squares Newton steps with backtracking.

    Converged when |fun(x)| <= tol * max(1, |fun(x0)|). Non-convergence
    (iteration cap, stalled steps, non-finite values) is reported through
    ``success=False``, never raised.
    """
    x = np.array(x0, dtype=complex)
    f = fun(x)
    r0 = r = float(np.linalg.norm(f))
    target = config.tol * max(1.0, r0)
    it = 0
    while it < config.max_iter and r > target:
        it += 1
        if not np.isfinite(r):
            break
        step = np.linalg.lstsq(jac(x), -f, rcond=None)[0]
        lam = 1.0
        for _ in range(config.max_halvings):
            xn = x + lam * step
            fn = fun(xn)
            rn = float(np.linalg.norm(fn))
            if np.isfinite(rn) and rn < r:
                break
            lam *= config.damping
        else:
            break
        moved = lam * float(np.linalg.norm(step))
        x, f, r = xn, fn, rn
        if moved <= config.step_tol * (1.0 + float(np.linalg.norm(x))):
            break
    return NewtonResult(x, r, r0, it, bool(np.isfinite(r) and r <= target))


def start_rng(master_seed: int, index: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for start ``index`` derived from the master seed."""
    return np.random.default_rng(np.random.SeedSequence([master_seed, stream, index]))
