"""Loading of the transcribed equation files shipped in ``octocut/data``.

Every file is listed with its SHA-256 digest in ``MANIFEST.json``; a file
whose digest does not match raises :class:`TranscriptionError` so that a
corrupted transcription can never silently feed downstream checks.
"""

from __future__ import annotations

import hashlib
import json
from functools import lru_cache
from pathlib import Path

from .polyring import QQ, SparsePolynomial, parse_polynomial

DATA_DIR = Path(__file__).parent / "data"

P_NAMES = [f"P{i}" for i in range(1, 28)]
T_NAMES = [f"t{i}" for i in range(1, 13)]
TD_NAMES = T_NAMES + ["d1", "d2"]


class TranscriptionError(RuntimeError):
    pass


def _resolve(data_dir: Path | str | None) -> Path:
    return Path(data_dir) if data_dir is not None else DATA_DIR


@lru_cache(maxsize=None)
def _manifest(data_dir: Path) -> dict[str, str]:
    return json.loads((data_dir / "MANIFEST.json").read_text())["sha256"]


def read_data(name: str, data_dir: Path | str | None = None, verify: bool = True) -> str:
    d = _resolve(data_dir)
    raw = (d / name).read_bytes()
    if verify:
        expected = _manifest(d).get(name)
        actual = hashlib.sha256(raw).hexdigest()
        if expected != actual:
            raise TranscriptionError(f"checksum mismatch for {name}: {actual} != {expected}")
    return raw.decode()


def _lines(text: str) -> list[str]:
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]


def load_polynomials(name: str, variables: list[str], data_dir=None,
                     verify: bool = True) -> list[SparsePolynomial]:
    return [parse_polynomial(ln, variables, QQ) for ln in _lines(read_data(name, data_dir, verify))]


def load_equations(name: str, variables: list[str], sep: str, data_dir=None,
                   verify: bool = True) -> list[tuple[str, SparsePolynomial]]:
    """Lines of the form ``lhs <sep> polynomial``."""
    out = []
    for ln in _lines(read_data(name, data_dir, verify)):
        lhs, rhs = ln.split(sep)
        out.append((lhs.strip(), parse_polynomial(rhs, variables, QQ)))
    return out


def load_json(name: str, data_dir=None, verify: bool = True) -> dict:
    return json.loads(read_data(name, data_dir, verify))


def write_manifest(data_dir: Path | str) -> dict[str, str]:
    """Recompute ``MANIFEST.json`` for a data directory (used by tooling/tests)."""
    d = Path(data_dir)
    digests = {p.name: hashlib.sha256(p.read_bytes()).hexdigest()
               for p in sorted(d.iterdir()) if p.is_file() and p.name != "MANIFEST.json"}
    (d / "MANIFEST.json").write_text(json.dumps({"version": 1, "sha256": digests},
                                                indent=2, sort_keys=True) + "\n")
    _manifest.cache_clear()
    return digests
