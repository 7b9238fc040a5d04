"""Invariants of the order-13 action t_i -> zeta^i t_i on the cut.

Monomials of weight 0 (sum of i * e_i divisible by 13) span the invariant
polynomials; invariant quotient dimensions come from the weight-0 block of
the Macaulay matrix, the other twelve blocks being irrelevant to them.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

from .gradedla import Grading, graded_piece_dimensions, macaulay_matrix, monomials_of_degree
from .polyring import SparsePolynomial

ORDER = 13
NT = 12


def t_grading(nvars: int = NT, order: int = ORDER) -> Grading:
    return Grading.cyclic(list(range(1, nvars + 1)), order)


@dataclass(frozen=True)
class InvariantBasis:
    degree: int
    monomials: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.monomials)

    def names(self) -> list[str]:
        out = []
        for e in self.monomials:
            parts = []
            for i, k in enumerate(e, start=1):
                if k == 1:
                    parts.append(f"t{i}")
                elif k:
                    parts.append(f"t{i}^{k}")
            out.append("*".join(parts) if parts else "1")
        return out


def invariant_monomials(degree: int, nvars: int = NT, order: int = ORDER) -> InvariantBasis:
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    mons = [e for e in monomials_of_degree(nvars, degree)
            if sum(i * k for i, k in enumerate(e, start=1)) % order == 0]
    return InvariantBasis(degree, tuple(mons))


def invariant_hilbert(generators: Sequence[SparsePolynomial], max_degree: int,
                      order: int = ORDER) -> list[int]:
    """Dimension of the weight-0 piece of the quotient ring in degrees 0..max_degree."""
    n = generators[0].nvars
    g = t_grading(n, order)
    out = []
    for d in range(max_degree + 1):
        mm = macaulay_matrix(generators, d, g, keep=lambda key: key == (0,))
        out.append(len(mm.columns) - mm.rank())
    return out


def weight_class_dimensions(generators: Sequence[SparsePolynomial], degree: int,
                            order: int = ORDER) -> dict[int, int]:
    """Quotient dimension of each weight class 0..order-1 in one degree."""
    g = t_grading(generators[0].nvars, order)
    dims = graded_piece_dimensions(generators, degree, g)
    return {w: dims.get((w,), 0) for w in range(order)}
