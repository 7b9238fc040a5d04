"""Linear algebra on graded pieces: Macaulay matrices, Hilbert functions, ranks.

Ranks over prime fields use either a streaming sparse elimination with a
Markowitz-style pivot choice or a vectorised dense elimination, chosen per
block by size. Exact ranks over Q and over polynomial coefficient rings
(used for span tests with symbolic parameters) live here too.
"""

from __future__ import annotations

import heapq
import itertools
from collections import Counter, defaultdict
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from .polyring import CC, QQ, Domain, PrimeField, SparsePolynomial
from .polyring.domains import DomainMismatch

DEFAULT_PRIME = 10007
SECOND_PRIME = 10009
DENSE_LIMIT = 6_000_000  # max rows*cols for the dense path


# ---------------------------------------------------------------------------
# monomials

def monomials_of_degree(n: int, d: int) -> list[tuple[int, ...]]:
    """All exponent vectors of total degree ``d`` in ``n`` variables, largest first
    in graded lexicographic order."""
    out = []
    for combo in itertools.combinations_with_replacement(range(n), d):
        e = [0] * n
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    # combinations_with_replacement yields increasing index tuples, i.e. lex-decreasing exponents
    return out


def monomial_count(n: int, d: int) -> int:
    return comb(d + n - 1, n - 1) if d >= 0 else 0


# ---------------------------------------------------------------------------
# gradings

@dataclass(frozen=True)
class Grading:
    """A grading of the polynomial ring by an abelian group Z^a x (Z/m)^b.

    ``weights[i]`` is the weight tuple of variable i; ``moduli[c]`` is 0 for a
    free component and m for a Z/m component.
    """

    weights: tuple[tuple[int, ...], ...]
    moduli: tuple[int, ...]

    @classmethod
    def cyclic(cls, weights: Sequence[int], order: int) -> Grading:
        return cls(tuple((w % order,) for w in weights), (order,))

    @classmethod
    def free(cls, weight_vectors: Sequence[Sequence[int]]) -> Grading:
        """Grading by Z^r from r weight vectors (one entry per variable each)."""
        n = len(weight_vectors[0])
        return cls(tuple(tuple(v[i] for v in weight_vectors) for i in range(n)),
                   (0,) * len(weight_vectors))

    def degree(self, e) -> tuple[int, ...]:
        acc = [0] * len(self.moduli)
        for w, k in zip(self.weights, e):
            if k:
                for c in range(len(acc)):
                    acc[c] += k * w[c]
        return tuple(a % m if m else a for a, m in zip(acc, self.moduli))

    def add(self, a, b) -> tuple[int, ...]:
        return tuple((x + y) % m if m else x + y for x, y, m in zip(a, b, self.moduli))

    def of_polynomial(self, p: SparsePolynomial) -> tuple[int, ...] | None:
        degs = {self.degree(e) for e, _ in p.items()}
        return degs.pop() if len(degs) == 1 else None


# ---------------------------------------------------------------------------
# rank over F_p

def rank_mod_p(rows: Sequence[dict[int, int]], p: int, ncols: int | None = None,
               method: str = "auto") -> int:
    """Rank of a sparse matrix over F_p given as a list of ``{column: value}`` rows."""
    rows = [r for r in rows if r]
    if not rows:
        return 0
    if ncols is None:
        ncols = 1 + max(c for r in rows for c in r)
    if method == "auto":
        method = "dense" if len(rows) * ncols <= DENSE_LIMIT else "sparse"
    if method == "dense":
        return _dense_rank_mod_p(rows, p, ncols)
    return _sparse_rank_mod_p(rows, p)


def _sparse_rank_mod_p(rows, p: int) -> int:
    colcount = Counter(c for r in rows for c in r)
    order = sorted(range(len(rows)), key=lambda i: (len(rows[i]), i))
    pivots: dict[int, tuple[int, dict[int, int]]] = {}
    for idx in order:
        r = {c: v % p for c, v in rows[idx].items() if v % p}
        pending = [(pivots[c][0], c) for c in r if c in pivots]
        heapq.heapify(pending)
        while pending:
            _, c = heapq.heappop(pending)
            f = r.get(c)
            if not f:
                continue
            for cc, pv in pivots[c][1].items():
                old = r.get(cc)
                nv = ((old or 0) - f * pv) % p
                if nv:
                    if old is None and cc in pivots:
                        heapq.heappush(pending, (pivots[cc][0], cc))
                    r[cc] = nv
                elif old is not None:
                    del r[cc]
        if r:
            # Markowitz choice: the candidate column touched by the fewest rows
            pc = min(r, key=lambda c: (colcount[c], c))
            inv = pow(r[pc], -1, p)
            pivots[pc] = (len(pivots), {c: v * inv % p for c, v in r.items()})
    return len(pivots)


def _dense_rank_mod_p(rows, p: int, ncols: int) -> int:
    used = sorted({c for r in rows for c in r})
    remap = {c: j for j, c in enumerate(used)}
    a = np.zeros((len(rows), len(used)), dtype=np.int64)
    for i, r in enumerate(rows):
        for c, v in r.items():
            a[i, remap[c]] = v % p
    return dense_rank_mod_p(a, p)


def dense_rank_mod_p(a: np.ndarray, p: int) -> int:
    """Row-echelon rank of an integer matrix over F_p (p < 2**31)."""
    a = np.array(a, dtype=np.int64) % p
    m, n = a.shape
    rank = 0
    for col in range(n):
        if rank == m:
            break
        nz = np.nonzero(a[rank:, col])[0]
        if nz.size == 0:
            continue
        piv = rank + nz[0]
        if piv != rank:
            a[[rank, piv]] = a[[piv, rank]]
        inv = pow(int(a[rank, col]), -1, p)
        a[rank, col:] = a[rank, col:] * inv % p
        below = rank + 1 + np.nonzero(a[rank + 1:, col])[0]
        if below.size:
            f = a[below, col][:, None]
            a[below, col:] = (a[below, col:] - f * a[rank, col:][None, :]) % p
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# exact rank over Q, over Q[params], and numeric rank over C

def rank_rational(rows: Sequence[dict[int, Fraction]]) -> int:
    rows = [{c: Fraction(v) for c, v in r.items() if v} for r in rows]
    rows = [r for r in rows if r]
    rank = 0
    while rows:
        r = min(rows, key=len)
        rows.remove(r)
        c = min(r)
        piv = r[c]
        new = []
        for s in rows:
            if c in s:
                f = s[c] / piv
                s = dict(s)
                for cc, v in r.items():
                    nv = s.get(cc, 0) - f * v
                    if nv:
                        s[cc] = nv
                    else:
                        s.pop(cc, None)
            if s:
                new.append(s)
        rows = new
        rank += 1
    return rank


def rank_over_polynomials(rows: Sequence[dict[int, SparsePolynomial]]) -> int:
    """Rank over the fraction field of a polynomial ring, by division-free
    elimination (the ring is an integral domain, so no pivot is lost)."""
    rows = [{c: v for c, v in r.items() if not v.is_zero()} for r in rows]
    rows = [r for r in rows if r]
    rank = 0
    while rows:
        # smallest pivot entry keeps intermediate growth down
        best = min(((len(v), c, i) for i, r in enumerate(rows) for c, v in r.items()))
        _, c, i = best
        r = rows.pop(i)
        piv = r[c]
        new = []
        for s in rows:
            if c in s:
                b = s[c]
                t = {cc: piv * v for cc, v in s.items()}
                for cc, v in r.items():
                    t[cc] = t[cc] - b * v if cc in t else -(b * v)
                s = {cc: v for cc, v in t.items() if not v.is_zero()}
            if s:
                new.append(s)
        rows = new
        rank += 1
    return rank


def singular_values(matrix: np.ndarray) -> np.ndarray:
    if matrix.size == 0:
        return np.zeros(0)
    return np.linalg.svd(np.asarray(matrix, dtype=complex), compute_uv=False)


def numeric_rank(matrix: np.ndarray, rel_tol: float = 1e-8) -> int:
    s = singular_values(matrix)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))


@dataclass
class GapRank:
    """Numerical rank decided by the largest ratio between consecutive singular values."""

    rank: int | None
    gap: float
    singular_values: list[float]


def gap_rank(matrix: np.ndarray, gap_factor: float = 1e6, floor: float = 1e-300) -> GapRank:
    """Rank at the first consecutive singular-value ratio >= ``gap_factor``.

    If no such gap exists the spectrum is either full rank (all values
    comparable to the largest) or ambiguous, reported as ``rank=None``.
    """
    s = singular_values(matrix)
    if s.size == 0:
        return GapRank(0, float("inf"), [])
    ratios = [s[i] / max(s[i + 1], floor) for i in range(len(s) - 1)]
    big = [i for i, r in enumerate(ratios) if r >= gap_factor]
    if big:
        k = big[0]
        return GapRank(k + 1, float(ratios[k]), [float(x) for x in s])
    if s[-1] >= s[0] / gap_factor:
        return GapRank(len(s), float(s[0] / max(s[-1], floor)), [float(x) for x in s])
    return GapRank(None, max(ratios) if ratios else 0.0, [float(x) for x in s])


def rational_nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[list[Fraction]]:
    """Basis of {x : rows . x = 0} over Q via reduced row echelon form."""
    m = [list(map(Fraction, r)) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][f]
        basis.append(v)
    return basis


# ---------------------------------------------------------------------------
# Macaulay matrices and Hilbert functions

@dataclass
class MacaulayMatrix:
    """Degree-``degree`` multiples of homogeneous generators over F_p."""

    degree: int
    nvars: int
    p: int
    columns: list[tuple[int, ...]]
    rows: list[dict[int, int]]
    column_keys: list[tuple] = field(default_factory=list)
    row_keys: list[tuple] = field(default_factory=list)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.columns)

    def blocks(self) -> dict[tuple, tuple[list[int], list[int]]]:
        """Row and column index lists of each grading class."""
        out: dict[tuple, tuple[list[int], list[int]]] = defaultdict(lambda: ([], []))
        for j, k in enumerate(self.column_keys or [()] * len(self.columns)):
            out[k][1].append(j)
        for i, k in enumerate(self.row_keys or [()] * len(self.rows)):
            out[k][0].append(i)
        return dict(out)

    def rank(self, method: str = "auto") -> int:
        return sum(r for r in self.block_ranks(method).values())

    def block_ranks(self, method: str = "auto") -> dict[tuple, int]:
        ranks = {}
        for key, (ri, ci) in self.blocks().items():
            ranks[key] = self.block_rank(ri, ci, method)
        return ranks

    def block_rank(self, row_idx, col_idx, method: str = "auto") -> int:
        if not row_idx or not col_idx:
            return 0
        local = {c: j for j, c in enumerate(col_idx)}
        rows = [{local[c]: v for c, v in self.rows[i].items()} for i in row_idx]
        return rank_mod_p(rows, self.p, len(col_idx), method)


def _require_prime_field(generators: Sequence[SparsePolynomial]) -> PrimeField:
    dom = generators[0].domain
    if not isinstance(dom, PrimeField):
        raise DomainMismatch(f"Macaulay computations need a prime field, got {dom}")
    for g in generators:
        if g.domain != dom:
            raise DomainMismatch("generators over different domains")
    return dom


def macaulay_matrix(generators: Sequence[SparsePolynomial], degree: int,
                    grading: Grading | None = None,
                    keep: Callable[[tuple], bool] | None = None) -> MacaulayMatrix:
    """Build the degree-``degree`` Macaulay matrix; ``keep`` filters grading classes."""
    dom = _require_prime_field(generators)
    n = generators[0].nvars
    cols = monomials_of_degree(n, degree)
    col_keys = [grading.degree(e) for e in cols] if grading else []
    if keep is not None and grading:
        sel = [j for j, k in enumerate(col_keys) if keep(k)]
        cols = [cols[j] for j in sel]
        col_keys = [col_keys[j] for j in sel]
    index = {e: j for j, e in enumerate(cols)}
    rows, row_keys = [], []
    for g in generators:
        if g.is_zero():
            continue
        dg = g.homogeneous_degree()
        if dg > degree:
            continue
        gk = grading.of_polynomial(g) if grading else None
        if grading and gk is None:
            raise ValueError("generator is not homogeneous for the grading")
        terms = list(g.items())
        for m in monomials_of_degree(n, degree - dg):
            if grading:
                key = grading.add(grading.degree(m), gk)
                if keep is not None and not keep(key):
                    continue
                row_keys.append(key)
            row = {}
            for e, c in terms:
                row[index[tuple(a + b for a, b in zip(e, m))]] = c
            rows.append(row)
    return MacaulayMatrix(degree, n, dom.p, cols, rows, col_keys, row_keys)


@dataclass
class HilbertRecord:
    modulus: int
    nvars: int
    dims: list[int]
    first_differences: list[int] = field(default_factory=list)
    second_differences: list[int] = field(default_factory=list)
    estimate: dict | None = None

    def to_json(self) -> dict:
        return {
            "modulus": self.modulus,
            "nvars": self.nvars,
            "dims": self.dims,
            "first_differences": self.first_differences,
            "second_differences": self.second_differences,
            "estimate": self.estimate,
        }


def differences(seq: Sequence[int]) -> list[int]:
    return [b - a for a, b in zip(seq, seq[1:])]


def hilbert_function(generators: Sequence[SparsePolynomial], max_degree: int,
                     grading: Grading | None = None, method: str = "auto") -> HilbertRecord:
    """Graded dimensions h(0..max_degree) of the quotient ring over F_p."""
    dom = _require_prime_field(generators)
    for g in generators:
        if not g.is_zero():
            g.homogeneous_degree()
    n = generators[0].nvars
    dims = []
    for d in range(max_degree + 1):
        mm = macaulay_matrix(generators, d, grading)
        dims.append(len(mm.columns) - mm.rank(method))
    rec = HilbertRecord(dom.p, n, dims, differences(dims), differences(differences(dims)))
    rec.estimate = degree_dimension_estimate(rec)
    return rec


def graded_piece_dimensions(generators: Sequence[SparsePolynomial], degree: int,
                            grading: Grading, method: str = "auto") -> dict[tuple, int]:
    """Quotient dimension of every grading class in one degree."""
    mm = macaulay_matrix(generators, degree, grading)
    out = {}
    for key, (ri, ci) in mm.blocks().items():
        out[key] = len(ci) - mm.block_rank(ri, ci, method)
    return out


def degree_dimension_estimate(record: HilbertRecord | Sequence[int]) -> dict:
    """Projective dimension and degree from the first difference table whose
    last two entries agree; ``{"stabilized": False}`` if none does."""
    dims = list(record.dims if isinstance(record, HilbertRecord) else record)
    table = dims
    k = 0
    while len(table) >= 2:
        if table[-1] == table[-2] and table[-1] > 0:
            return {"stabilized": True, "dimension": k, "degree": table[-1]}
        table = differences(table)
        k += 1
    return {"stabilized": False}


# ---------------------------------------------------------------------------
# Jacobians

def jacobian_matrix(system: Sequence[SparsePolynomial], point: Sequence, domain: Domain):
    for q in system:
        if q.domain != domain:
            raise DomainMismatch(f"system lives over {q.domain}, requested {domain}")
    return [[q.partial_derivative(j).evaluate(point) for j in range(q.nvars)] for q in system]


def jacobian_rank(system: Sequence[SparsePolynomial], point: Sequence, domain: Domain | None = None,
                  rel_tol: float = 1e-8) -> int:
    """Rank of [dq_i/dx_j](point): exact over F_p and Q, thresholded over C."""
    domain = domain if domain is not None else system[0].domain
    jac = jacobian_matrix(system, point, domain)
    if isinstance(domain, PrimeField):
        rows = [{j: v for j, v in enumerate(r) if v} for r in jac]
        return rank_mod_p(rows, domain.p, len(jac[0]) if jac else 0)
    if domain == QQ:
        return rank_rational([{j: v for j, v in enumerate(r) if v} for r in jac])
    if domain == CC:
        return numeric_rank(np.array(jac, dtype=complex), rel_tol)
    raise DomainMismatch(f"no rank routine for {domain}")


# ---------------------------------------------------------------------------
# coefficient matrices of polynomial families (span tests)

def split_parameters(p: SparsePolynomial, nmain: int) -> dict[tuple[int, ...], SparsePolynomial]:
    """View ``p`` in variables x_0..x_{nmain-1} with coefficients polynomials in
    the remaining (parameter) variables."""
    k = p.nvars - nmain
    acc: dict[tuple[int, ...], dict] = defaultdict(dict)
    for e, c in p.items():
        acc[e[:nmain]][e[nmain:]] = c
    return {m: SparsePolynomial(k, p.domain, terms) for m, terms in acc.items()}


def coefficient_rows(polys: Sequence[SparsePolynomial], nmain: int):
    """Rows of a coefficient matrix (columns = monomials in the main variables)."""
    col_index: dict[tuple[int, ...], int] = {}
    rows = []
    for p in polys:
        row = {}
        for m, c in split_parameters(p, nmain).items():
            j = col_index.setdefault(m, len(col_index))
            row[j] = c
        rows.append(row)
    return rows, col_index


def family_rank(polys: Sequence[SparsePolynomial], nmain: int, rel_tol: float = 1e-8) -> int:
    """Rank of the span of ``polys`` over the field of fractions of the parameter ring
    (exact for Q, Q(sqrt(-2)), F_p; singular-value threshold over C)."""
    if not polys:
        return 0
    dom = polys[0].domain
    k = polys[0].nvars - nmain
    rows, cols = coefficient_rows(polys, nmain)
    if k > 0:
        if not dom.exact:
            raise DomainMismatch("symbolic parameters need an exact coefficient domain")
        return rank_over_polynomials(rows)
    const = [{j: v.coefficient(()) for j, v in r.items()} for r in rows]
    if isinstance(dom, PrimeField):
        return rank_mod_p(const, dom.p, len(cols))
    if dom == QQ:
        return rank_rational(const)
    if dom == CC:
        a = np.zeros((len(const), len(cols)), dtype=complex)
        for i, r in enumerate(const):
            for j, v in r.items():
                a[i, j] = v
        return numeric_rank(a, rel_tol)
    # Q(sqrt(-2)) and anything else exact: division-free route on constants
    return rank_over_polynomials([{j: SparsePolynomial.constant(v, 0, dom) for j, v in r.items()}
                                  for r in const])
