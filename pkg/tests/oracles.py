"""Independent reference values used by the tests."""

from __future__ import annotations

from math import comb


def series_coefficients(numerator: list[int], pole_order: int, count: int) -> list[int]:
    """Taylor coefficients of numerator(t) / (1 - t)^pole_order."""
    out = []
    for d in range(count):
        out.append(sum(c * comb(d - k + pole_order - 1, pole_order - 1)
                       for k, c in enumerate(numerator) if k <= d))
    return out


def poly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


H_NUMERATOR = [1, 9, 19, 9, 1]
OP2_SERIES = series_coefficients(poly_mul(H_NUMERATOR, [1, 1]), 17, 5)
CUT_SERIES = series_coefficients(H_NUMERATOR, 3, 12)
