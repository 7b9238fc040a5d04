"""Collects one verdict line per acceptance criterion for the terminal summary."""

from __future__ import annotations

LINES: dict[int, str] = {}


def record(number: int, ok: bool, detail: str) -> None:
    LINES[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
