"""Torus-equivariant linear cuts X_d of the octonionic plane.

A cut is fixed by one linear relation per nonzero weight w = 1..12 between
the two P-variables of that weight, plus P9 = P18 = P27 = 0. Substituting
the relations into the 27 quadrics gives quadrics in t_1..t_12, where t_w
is the surviving member of the weight-w pair.

Parameters can be numbers in any coefficient domain or symbols: symbolic
runs adjoin the parameter names as extra polynomial variables after the
twelve t's, and span questions are then answered over the field of
rational functions in the parameters.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from . import datafiles, e6model
from .datafiles import T_NAMES, TD_NAMES
from .gradedla import family_rank, rank_rational, split_parameters
from .polyring import QQ, Domain, SparsePolynomial, parse_polynomial
from .polyring.domains import convert_scalar

NT = 12
ORDER = 13
T_WEIGHTS = tuple(range(1, NT + 1))


class ConstraintViolation(ValueError):
    """The three restricted invariant quadrics do not sum to zero."""


class DegenerateParameters(ValueError):
    """A kept restricted quadric vanished identically."""


def weight_pairing(data_dir=None) -> list[tuple[int, int]]:
    """(first, second) P-indices for weights 1..12, in cut-list order."""
    data = datafiles.load_json("torus.json", data_dir)
    return [tuple(p) for p in data["cut_pairs"]]


def pairing_from_weights(weights: Sequence[int], order: int = ORDER) -> dict[int, set[int]]:
    """Weight class -> set of 1-based variable indices carrying it."""
    out: dict[int, set[int]] = defaultdict(set)
    for i, a in enumerate(weights, start=1):
        out[a % order].add(i)
    return dict(out)


# ---------------------------------------------------------------------------
# parameters

def _const(v, k: int, domain: Domain) -> SparsePolynomial:
    if isinstance(v, SparsePolynomial):
        if v.nvars != k or v.domain != domain:
            raise ValueError("parameter polynomial lives in the wrong ring")
        return v
    return SparsePolynomial.constant(v, k, domain)


def _inverse(v: SparsePolynomial) -> SparsePolynomial | None:
    """Inverse of a nonzero constant; None for genuinely symbolic values."""
    if v.is_zero():
        raise DegenerateParameters("cut parameter is zero")
    if len(v) == 1:
        (e, c), = v.items()
        if not any(e):
            return SparsePolynomial.constant(v.domain.inv(c), v.nvars, v.domain)
    return None


@dataclass(frozen=True)
class CutParameters:
    """d_1..d_12 together with whatever inverses are known.

    ``d[w-1]`` and ``inv[w-1]`` are polynomials in the parameter ring (empty
    for numeric runs) or None when not expressible there.
    """

    domain: Domain
    param_names: tuple[str, ...]
    d: tuple[SparsePolynomial | None, ...]
    inv: tuple[SparsePolynomial | None, ...]

    @property
    def k(self) -> int:
        return len(self.param_names)

    @classmethod
    def from_free(cls, free: Sequence, domain: Domain = QQ,
                  param_names: Sequence[str] = ()) -> CutParameters:
        """Parameters d_1..d_6; the rest follow from d_i d_{13-i} = -1."""
        if len(free) != 6:
            raise ValueError("expected six free parameters d1..d6")
        k = len(param_names)
        d: list = [None] * 12
        inv: list = [None] * 12
        for i, v in enumerate(free, start=1):
            di = _const(v, k, domain)
            if di.is_zero():
                raise DegenerateParameters(f"d{i} = 0")
            d[i - 1] = di
            inv[12 - i] = -di                      # 1/d_{13-i} = -d_i
            inv[i - 1] = _inverse(di)
            d[12 - i] = -inv[i - 1] if inv[i - 1] is not None else None
        return cls(domain, tuple(param_names), tuple(d), tuple(inv))

    @classmethod
    def general(cls, values: Sequence, domain: Domain = QQ,
                param_names: Sequence[str] = ()) -> CutParameters:
        """All twelve d_w given independently (no constraint imposed)."""
        if len(values) != 12:
            raise ValueError("expected twelve parameters")
        k = len(param_names)
        d = tuple(_const(v, k, domain) for v in values)
        return cls(domain, tuple(param_names), d, tuple(_inverse(x) for x in d))

    @classmethod
    def symbolic(cls, names: Sequence[str] = ("d1", "d2"), fixed: Sequence = (1, 1, 1, 1),
                 domain: Domain = QQ) -> CutParameters:
        """d_1..d_m symbolic (m = len(names)), remaining free parameters fixed."""
        k = len(names)
        syms = [SparsePolynomial.variable(i, k, domain) for i in range(k)]
        return cls.from_free(list(syms) + list(fixed), domain, names)

    def constraint_holds(self) -> bool:
        for i in range(1, 7):
            a, b = self.d[i - 1], self.d[12 - i]
            if a is None or b is None:
                if self.inv[12 - i] is not None and a is not None:
                    if -a != self.inv[12 - i]:
                        return False
                continue
            if a * b != SparsePolynomial.constant(-1, self.k, self.domain):
                return False
        return True


# ---------------------------------------------------------------------------
# the cut

@dataclass
class CutSystem:
    params: CutParameters
    quadrics: list[SparsePolynomial]
    kept_partials: list[int]
    convention: str
    restricted: list[SparsePolynomial] = field(repr=False, default_factory=list)

    @property
    def nvars(self) -> int:
        return NT + self.params.k

    def variable_names(self) -> list[str]:
        return T_NAMES + list(self.params.param_names)

    def to_text(self) -> str:
        names = self.variable_names()
        return "\n".join(q.to_string(names) for q in self.quadrics) + "\n"


def _embed(p: SparsePolynomial, n: int) -> SparsePolynomial:
    """Parameter-ring polynomial -> the (t, params) ring."""
    return p.map_exponents(lambda e: (0,) * NT + tuple(e), n)


def cut_substitution(params: CutParameters, convention: str = "mixed",
                     data_dir=None) -> dict[int, SparsePolynomial]:
    """0-based P-index -> image in the (t, params) ring.

    ``mixed``: t_w is the second pair member for w <= 6 and the first for
    w >= 7, so only d_1..d_6 appear. ``second``: t_w is always the second
    member and the first is -d_w t_w.
    """
    if convention not in ("mixed", "second"):
        raise ValueError(f"unknown convention {convention!r}")
    n = NT + params.k
    dom = params.domain
    zero = SparsePolynomial.zero(n, dom)
    inv_vars = datafiles.load_json("torus.json", data_dir)["invariant_variables"]
    sub = {i - 1: zero for i in inv_vars}
    for w, (first, second) in enumerate(weight_pairing(data_dir), start=1):
        t = SparsePolynomial.variable(w - 1, n, dom)
        if convention == "mixed" and w >= 7:
            inv = params.inv[w - 1]
            if inv is None:
                raise ValueError(f"1/d{w} is not available in the parameter ring")
            sub[first - 1] = t
            sub[second - 1] = -(_embed(inv, n) * t)
        else:
            dw = params.d[w - 1]
            if dw is None:
                raise ValueError(f"d{w} is not available in the parameter ring")
            sub[first - 1] = -(_embed(dw, n) * t)
            sub[second - 1] = t
    return sub


def restricted_quadrics(params: CutParameters, convention: str = "mixed",
                        data_dir=None) -> list[SparsePolynomial]:
    """All 27 quadrics restricted to the cut (index i-1 <-> partial along P_i)."""
    sub = cut_substitution(params, convention, data_dir)
    n = NT + params.k
    quads = [q.map_coefficients(params.domain) for q in e6model.op2_ideal(data_dir)]
    return [q.substitute(sub, n) for q in quads]


def invariant_sum(params: CutParameters, convention: str = "mixed", data_dir=None
                  ) -> SparsePolynomial:
    r = restricted_quadrics(params, convention, data_dir)
    return r[8] + r[17] + r[26]


def build_cut(params: CutParameters, convention: str = "mixed", data_dir=None) -> CutSystem:
    """The 26 defining quadrics: the 24 non-invariant restricted partials plus
    those along P9 and P18 (the one along P27 is their negative sum)."""
    r = restricted_quadrics(params, convention, data_dir)
    if not (r[8] + r[17] + r[26]).is_zero():
        raise ConstraintViolation("restricted invariant quadrics do not sum to zero; "
                                  "check d_i d_(13-i) = -1")
    kept = [i for i in range(1, 28) if i != 27]
    quads = [r[i - 1] for i in kept]
    for i, q in zip(kept, quads):
        if q.is_zero():
            raise DegenerateParameters(f"restricted partial along P{i} vanishes")
    return CutSystem(params, quads, kept, convention, r)


def cut_at(d1, d2, domain: Domain = QQ, convention: str = "mixed",
              rest: Sequence = (1, 1, 1, 1), data_dir=None) -> CutSystem:
    """Numeric cut with (d3, d4, d5, d6) = ``rest`` (all 1 by default)."""
    params = CutParameters.from_free([d1, d2, *rest], domain)
    return build_cut(params, convention, data_dir)


def symbolic_cut(data_dir=None) -> CutSystem:
    """Cut over Q[d1, d2] with d3 = d4 = d5 = d6 = 1."""
    return build_cut(CutParameters.symbolic(("d1", "d2")), data_dir=data_dir)


def reference_system(which: str = "plain", data_dir=None) -> list[SparsePolynomial]:
    """Transcribed 26 quadrics in (t1..t12, d1, d2): ``plain`` or the ``c3`` form."""
    name = {"plain": "cut_quadrics_plain.txt", "c3": "cut_quadrics_c3.txt"}[which]
    return datafiles.load_polynomials(name, TD_NAMES, data_dir)


def specialize(polys: Sequence[SparsePolynomial], values: Sequence, domain: Domain,
               nmain: int = NT) -> list[SparsePolynomial]:
    """Substitute numeric values for the trailing parameter variables."""
    vals = [domain.convert(v) for v in values]
    out = []
    for p in polys:
        terms: dict[tuple[int, ...], object] = {}
        for e, c in p.items():
            c = convert_scalar(c, p.domain, domain)
            for v, k in zip(vals, e[nmain:]):
                if k:
                    c = domain.mul(c, domain.pow(v, k))
            m = e[:nmain]
            terms[m] = domain.add(terms[m], c) if m in terms else c
        out.append(SparsePolynomial(nmain, domain, terms))
    return out


# ---------------------------------------------------------------------------
# matching and span tests

def proportional(p: SparsePolynomial, q: SparsePolynomial, nmain: int = NT) -> bool:
    """True iff p = c q for a nonzero c in the fraction field of the parameter ring."""
    sp, sq = split_parameters(p, nmain), split_parameters(q, nmain)
    if set(sp) != set(sq) or not sp:
        return False
    m0 = max(sp)
    a, b = sp[m0], sq[m0]
    return all(b * sp[m] == a * sq[m] for m in sp)


@dataclass
class MatchReport:
    pairs: list[tuple[int, int]]
    unmatched_built: list[int]
    unmatched_reference: list[int]

    @property
    def complete(self) -> bool:
        return not self.unmatched_built and not self.unmatched_reference


def match_quadrics(built: Sequence[SparsePolynomial], reference: Sequence[SparsePolynomial],
                   nmain: int = NT) -> MatchReport:
    """Maximum matching between two lists under proportionality (0-based indices)."""
    adj = [[j for j, r in enumerate(reference) if proportional(b, r, nmain)] for b in built]
    match_ref: dict[int, int] = {}

    def augment(i: int, seen: set[int]) -> bool:
        for j in adj[i]:
            if j in seen:
                continue
            seen.add(j)
            if j not in match_ref or augment(match_ref[j], seen):
                match_ref[j] = i
                return True
        return False

    for i in range(len(built)):
        augment(i, set())
    pairs = sorted((i, j) for j, i in match_ref.items())
    mb = {i for i, _ in pairs}
    return MatchReport(pairs, [i for i in range(len(built)) if i not in mb],
                       [j for j in range(len(reference)) if j not in match_ref])


def match_reference_quadrics(system: CutSystem | None = None, reference=None,
                         data_dir=None) -> MatchReport:
    """Match a cut (default: symbolic, d3..d6 = 1) against the plain transcription.

    A numeric system is compared with the transcription specialised at the
    system's own (d1, d2).
    """
    system = system if system is not None else symbolic_cut(data_dir)
    reference = list(reference) if reference is not None else reference_system("plain", data_dir)
    if system.params.k == 0:
        d1 = system.params.d[0].coefficient(())
        d2 = system.params.d[1].coefficient(())
        reference = specialize(reference, [d1, d2], system.params.domain)
    elif system.params.param_names != ("d1", "d2"):
        raise ValueError("symbolic matching needs parameters named (d1, d2)")
    return match_quadrics(system.quadrics, reference, NT)


def _t_weight_grading(nvars: int):
    from .gradedla import Grading
    weights = list(T_WEIGHTS) + [0] * (nvars - NT)
    return Grading.cyclic(weights, ORDER)


def _blocks(polys: Sequence[SparsePolynomial]) -> dict[tuple, list[SparsePolynomial]] | None:
    if not polys:
        return {}
    g = _t_weight_grading(polys[0].nvars)
    out: dict[tuple, list[SparsePolynomial]] = defaultdict(list)
    for p in polys:
        if p.is_zero():
            continue
        key = g.of_polynomial(p)
        if key is None:
            return None
        out[key].append(p)
    return dict(out)


def span_rank(polys: Sequence[SparsePolynomial], nmain: int = NT) -> int:
    """Rank of the span over the parameter fraction field, split by t-weight when possible."""
    blocks = _blocks(polys)
    if blocks is None:
        return family_rank(list(polys), nmain)
    return sum(family_rank(b, nmain) for b in blocks.values())


def in_span(basis: Sequence[SparsePolynomial], q: SparsePolynomial, nmain: int = NT) -> bool:
    if q.is_zero():
        return True
    blocks = _blocks(list(basis) + [q])
    if blocks is None:
        return family_rank(list(basis) + [q], nmain) == family_rank(list(basis), nmain)
    key = _t_weight_grading(q.nvars).of_polynomial(q)
    block = [b for b in blocks[key] if b is not q]
    return family_rank(block + [q], nmain) == family_rank(block, nmain)


def spans_equal(a: Sequence[SparsePolynomial], b: Sequence[SparsePolynomial],
                nmain: int = NT) -> bool:
    ra, rb = span_rank(a, nmain), span_rank(b, nmain)
    return ra == rb == span_rank(list(a) + list(b), nmain)


def permute_t(p: SparsePolynomial, perm: dict[int, int]) -> SparsePolynomial:
    """Substitute t_i -> t_{perm[i]} (1-based); parameters untouched."""
    def f(e):
        out = list(e)
        for i in range(1, NT + 1):
            out[perm[i] - 1] = e[i - 1]
        return out
    return p.map_exponents(f, p.nvars)


def multiplier_permutation(k: int) -> dict[int, int]:
    return {i: (k * i) % ORDER for i in range(1, NT + 1)}


@dataclass
class SymmetryReport:
    ok: bool
    failures: list[int]


def verify_c3_symmetry(system: Sequence[SparsePolynomial] | None = None, multiplier: int = 3,
                       nmain: int = NT, data_dir=None) -> SymmetryReport:
    """Does t_i -> t_{3i mod 13} map every quadric into the span of the system?"""
    system = list(system) if system is not None else reference_system("c3", data_dir)
    perm = multiplier_permutation(multiplier)
    failures = [i for i, q in enumerate(system) if not in_span(system, permute_t(q, perm), nmain)]
    return SymmetryReport(not failures, failures)


# ---------------------------------------------------------------------------
# Laurent monomials in the parameters

@dataclass(frozen=True)
class ScaleFactor:
    """(-1)^sign_exponent * constant * prod(param_j ^ exponents[j]).

    Exponents may be rational; a fractional one stands for the principal
    branch of the corresponding root.
    """

    sign: int
    constant: Fraction
    exponents: tuple[Fraction, ...]
    sign_exponent: Fraction | None = None

    @property
    def integral(self) -> bool:
        return all(Fraction(x).denominator == 1 for x in self.exponents) and self.sign_exponent is None

    def to_string(self, names: Sequence[str]) -> str:
        parts = []
        if self.constant != 1:
            parts.append(str(self.constant))
        for n, k in zip(names, self.exponents):
            k = Fraction(k)
            if k == 1:
                parts.append(n)
            elif k.denominator != 1:
                parts.append(f"{n}^({k})")
            elif k:
                parts.append(f"{n}^{k}")
        if self.sign_exponent is not None:
            parts.insert(0, f"(-1)^({self.sign_exponent})")
        body = "*".join(parts) if parts else "1"
        return ("-" if self.sign < 0 else "") + body

    def value(self, params: Sequence, domain: Domain):
        """Exact value for integral factors; complex principal branch otherwise."""
        if not self.integral:
            v = complex(self.sign * self.constant)
            if self.sign_exponent is not None:
                v *= complex(-1) ** float(self.sign_exponent)
            for x, k in zip(params, self.exponents):
                v *= complex(x) ** float(k)
            return v
        v = domain.convert(self.sign * self.constant)
        for x, k in zip(params, self.exponents):
            k = int(k)
            if k > 0:
                v = domain.mul(v, domain.pow(x, k))
            elif k < 0:
                v = domain.mul(v, domain.pow(domain.inv(x), -k))
        return v

    def raised(self, n: int) -> ScaleFactor:
        """The same factor written in u_j with param_j = u_j^n."""
        return ScaleFactor(self.sign, self.constant, tuple(Fraction(x) * n for x in self.exponents),
                           self.sign_exponent)


def apply_laurent(p: SparsePolynomial, nmain: int, term_factor) -> SparsePolynomial:
    """Multiply each term by a signed Laurent monomial in the parameters, then clear
    denominators by the smallest monomial making every exponent nonnegative.

    ``term_factor(main_exponents, param_exponents)`` returns (coefficient
    multiplier, new main exponents, parameter exponent shift).
    """
    dom = p.domain
    staged = []
    for e, c in p.items():
        mult, new_main, shift = term_factor(e[:nmain], e[nmain:])
        staged.append((tuple(new_main), tuple(a + b for a, b in zip(e[nmain:], shift)),
                       dom.mul(c, dom.convert(mult))))
    k = p.nvars - nmain
    low = [min((pe[j] for _, pe, _ in staged), default=0) for j in range(k)]
    terms: dict[tuple[int, ...], object] = {}
    for m, pe, c in staged:
        e = m + tuple(a - min(lo, 0) for a, lo in zip(pe, low))
        terms[e] = dom.add(terms[e], c) if e in terms else c
    return SparsePolynomial(p.nvars, dom, terms)


def transport_parameters(p: SparsePolynomial, images: Sequence[ScaleFactor],
                         nmain: int = NT) -> SparsePolynomial:
    """Substitute param_j -> images[j] (signed Laurent monomials), clearing denominators."""
    if not all(img.integral for img in images):
        raise ValueError("parameter images need integer exponents")
    def factor(main, pe):
        mult = Fraction(1)
        shift = [0] * len(pe)
        for j, kexp in enumerate(pe):
            img = images[j]
            mult *= (img.sign * img.constant) ** kexp
            for l, x in enumerate(img.exponents):
                shift[l] += int(x) * kexp
        shift = [s - k for s, k in zip(shift, pe)]  # replace, not multiply
        return mult, main, shift
    return apply_laurent(p, nmain, factor)


def scale_variables(p: SparsePolynomial, factors: Sequence[ScaleFactor],
                    nmain: int = NT) -> SparsePolynomial:
    """Substitute t_i -> s_i t_i with Laurent-monomial s_i, clearing denominators."""
    if not all(f.integral for f in factors):
        raise ValueError("scale factors need integer exponents; see ScaleFactor.raised")
    k = p.nvars - nmain

    def factor(main, pe):
        mult = Fraction(1)
        shift = [0] * k
        for s, e in zip(factors, main):
            if e:
                mult *= (s.sign * s.constant) ** e
                for l, x in enumerate(s.exponents):
                    shift[l] += int(x) * e
        return mult, main, shift
    return apply_laurent(p, nmain, factor)


# ---------------------------------------------------------------------------
# diagonal rescaling between two systems

class NoScaling(ValueError):
    pass


def coprime_base(numbers: Sequence[int]) -> list[int]:
    """Pairwise coprime integers > 1 generating every input multiplicatively."""
    base: list[int] = []
    for n in numbers:
        queue = [abs(n)]
        while queue:
            x = queue.pop()
            if x <= 1:
                continue
            for i, b in enumerate(base):
                g = gcd(x, b)
                if g == 1:
                    continue
                if x == b:
                    break
                base.pop(i)
                queue += [g, b // g, x // g]
                break
            else:
                base.append(x)
    return sorted(base)


def _valuations(n: int, base: Sequence[int]) -> list[int]:
    out = []
    n = abs(n)
    for b in base:
        v = 0
        while n % b == 0:
            n //= b
            v += 1
        out.append(v)
    if n != 1:
        raise ArithmeticError("number not generated by the coprime base")
    return out


def _det(m: list[list[SparsePolynomial]]) -> SparsePolynomial:
    n = len(m)
    if n == 1:
        return m[0][0]
    total = None
    for perm in itertools.permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term = m[0][perm[0]]
        for i in range(1, n):
            term = term * m[i][perm[i]]
        term = term if sign > 0 else -term
        total = term if total is None else total + term
    return total


def _laurent_ratio(num: SparsePolynomial, den: SparsePolynomial):
    """(constant, exponents) with num = constant * x^exponents * den, or None."""
    (en, cn), (ed, cd) = num.leading_term(), den.leading_term()
    c = Fraction(cn) / Fraction(cd)
    m = tuple(a - b for a, b in zip(en, ed))
    k = num.nvars
    lhs = num * SparsePolynomial.monomial(tuple(max(-x, 0) for x in m), k, num.domain)
    rhs = den * SparsePolynomial.monomial(tuple(max(x, 0) for x in m), k, num.domain, c)
    return (c, m) if lhs == rhs else None


def _solve_integer(rows: list[list[int]], rhs: list[int], n: int) -> list[int]:
    """Integer solution of rows . x = rhs via column Hermite reduction (A U = H)."""
    a = [list(r) for r in rows]
    u = [[int(i == j) for j in range(n)] for i in range(n)]

    def colop(dst: int, src: int, f: int) -> None:
        for r in a:
            r[dst] -= f * r[src]
        for r in u:
            r[dst] -= f * r[src]

    def swap(i: int, j: int) -> None:
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in u:
            r[i], r[j] = r[j], r[i]

    pivots: list[int | None] = []
    c = 0
    for row in a:
        while c < n:
            nz = [j for j in range(c, n) if row[j]]
            if not nz:
                break
            j = min(nz, key=lambda j: abs(row[j]))
            swap(c, j)
            for k in range(c + 1, n):
                if row[k]:
                    colop(k, c, row[k] // row[c])
            if all(row[k] == 0 for k in range(c + 1, n)):
                break
        if c < n and row[c]:
            pivots.append(c)
            c += 1
        else:
            pivots.append(None)
    y = [0] * n
    for row, b, pc in zip(a, rhs, pivots):
        s = b - sum(row[j] * y[j] for j in range(c if pc is None else pc))
        if pc is None:
            if s:
                raise NoScaling("monomial consistency equations are inconsistent")
            continue
        if s % row[pc]:
            raise NoScaling("no integer solution")
        y[pc] = s // row[pc]
    return [sum(u[i][j] * y[j] for j in range(n)) for i in range(n)]


def _solve_gf2(rows: list[list[int]], rhs: list[int], n: int) -> list[int]:
    aug = [[v % 2 for v in r] + [b % 2] for r, b in zip(rows, rhs)]
    piv_cols = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(aug)) if aug[i][c]), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        for i in range(len(aug)):
            if i != r and aug[i][c]:
                aug[i] = [(a + b) % 2 for a, b in zip(aug[i], aug[r])]
        piv_cols.append(c)
        r += 1
    if any(row[n] for row in aug[r:]):
        raise NoScaling("sign equations are inconsistent")
    x = [0] * n
    for i, c in enumerate(piv_cols):
        x[c] = aug[i][n]
    return x


@dataclass
class Rescaling:
    factors: list[ScaleFactor]
    param_names: tuple[str, ...]

    def to_strings(self) -> list[str]:
        return [f.to_string(self.param_names) for f in self.factors]


def find_rescaling(source: Sequence[SparsePolynomial], target: Sequence[SparsePolynomial],
                   param_names: Sequence[str] = ("d1", "d2"), nmain: int = NT) -> Rescaling:
    """Diagonal t_i -> s_i t_i (s_i signed Laurent monomials in the parameters,
    times rational constants) carrying span(source) onto span(target).

    Per t-weight block the Plucker coordinates must agree up to one factor
    per block, which gives linear equations for the logarithms of the s_i:
    exponents over Q, signs over GF(2), constants over a coprime base.
    Raises NoScaling when the equations have no solution or the solution
    fails the final span check.
    """
    if not source or source[0].domain != QQ:
        raise NoScaling("rescaling search needs rational systems")
    k = source[0].nvars - nmain
    ba, bb = _blocks(source), _blocks(target)
    if ba is None or bb is None or set(ba) != set(bb):
        raise NoScaling("systems are not weight-homogeneous with matching weight classes")
    keys = sorted(ba)
    nunk = nmain + len(keys)
    equations = []                                  # (lhs row, sign, constant, exponents)
    for bi, key in enumerate(keys):
        ra, cols_a = _block_matrix(ba[key], nmain)
        rb, cols_b = _block_matrix(bb[key], nmain)
        r = len(ra)
        if r != len(rb) or family_rank(ba[key], nmain) != r or family_rank(bb[key], nmain) != r:
            raise NoScaling(f"weight block {key[0]} has mismatched or dependent rows")
        cols = sorted(set(cols_a) | set(cols_b))
        for subset in itertools.combinations(cols, r):
            pa = _det([[row.get(c, SparsePolynomial.zero(k, QQ)) for c in subset] for row in ra])
            pb = _det([[row.get(c, SparsePolynomial.zero(k, QQ)) for c in subset] for row in rb])
            if pa.is_zero() != pb.is_zero():
                raise NoScaling(f"Plucker zero patterns differ in weight block {key[0]}")
            if pa.is_zero():
                continue
            ratio = _laurent_ratio(pb, pa)
            if ratio is None:
                raise NoScaling(f"Plucker ratio in weight block {key[0]} is not a monomial")
            c, m = ratio
            lhs = [0] * nunk
            for mono in subset:
                for i, e in enumerate(mono):
                    lhs[i] += e
            lhs[nmain + bi] = -1
            equations.append((lhs, -1 if c < 0 else 1, abs(c), m))
    if not equations:
        raise NoScaling("no constraints")
    base = coprime_base([x for _, _, c, _ in equations for x in (c.numerator, c.denominator)])
    rows = [lhs for lhs, _, _, _ in equations]
    exps = [_solve_exponents(rows, [m[j] for _, _, _, m in equations], nunk) for j in range(k)]
    consts = []
    for b in base:
        rhs = [_valuations(c.numerator, [b])[0] - _valuations(c.denominator, [b])[0]
               for _, _, c, _ in equations]
        consts.append(_solve_integer(rows, rhs, nunk))
    signs = _solve_gf2(rows, [1 if s < 0 else 0 for _, s, _, _ in equations], nunk)
    factors = []
    for i in range(nmain):
        const = Fraction(1)
        for b, v in zip(base, (consts[j][i] for j in range(len(base)))):
            const *= Fraction(b) ** v
        factors.append(ScaleFactor(-1 if signs[i] else 1, const,
                                   tuple(Fraction(exps[j][i]) for j in range(k))))
    if not rescaling_is_valid(source, target, factors, nmain):
        raise NoScaling("candidate scaling fails the span check")
    return Rescaling(factors, tuple(param_names))


def rescaling_is_valid(source: Sequence[SparsePolynomial], target: Sequence[SparsePolynomial],
                       factors: Sequence[ScaleFactor], nmain: int = NT) -> bool:
    """Exact span check over Q(u) with param_j = u_j^n, n clearing all exponent denominators."""
    n = 1
    for f in factors:
        for x in f.exponents:
            n = n * Fraction(x).denominator // gcd(n, Fraction(x).denominator)

    def lift(p: SparsePolynomial) -> SparsePolynomial:
        return p.map_exponents(lambda e: tuple(e[:nmain]) + tuple(n * x for x in e[nmain:]), p.nvars)

    raised = [f.raised(n) for f in factors]
    scaled = [scale_variables(lift(p), raised, nmain) for p in source]
    return spans_equal(scaled, [lift(p) for p in target], nmain)


def _solve_exponents(rows: list[list[int]], rhs: list[int], n: int) -> list[Fraction]:
    """Integer solution when one exists, otherwise a rational one (roots of parameters)."""
    try:
        return [Fraction(x) for x in _solve_integer(rows, rhs, n)]
    except NoScaling as exc:
        if "inconsistent" in str(exc):
            raise
    return _solve_rational([[Fraction(v) for v in r] for r in rows], [Fraction(b) for b in rhs], n)


def _solve_rational(rows: list[list[Fraction]], rhs: list[Fraction], n: int) -> list[Fraction]:
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    piv_cols = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(aug)) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [x * inv for x in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        piv_cols.append(c)
        r += 1
    if any(row[n] != 0 for row in aug[r:]):
        raise NoScaling("monomial consistency equations are inconsistent")
    x = [Fraction(0)] * n
    for i, c in enumerate(piv_cols):
        x[c] = aug[i][n]
    return x


def _block_matrix(polys, nmain):
    rows = [split_parameters(p, nmain) for p in polys]
    cols = sorted({m for r in rows for m in r})
    return rows, cols


# ---------------------------------------------------------------------------
# the order-4 coordinate change between parameter points

GALOIS_PARAMETER_MAP = (ScaleFactor(-1, Fraction(1), (0, -1)),   # d1 -> -1/d2
                        ScaleFactor(1, Fraction(1), (1, 0)))     # d2 -> d1


def galois_substitution(data_dir=None) -> dict[int, SparsePolynomial]:
    """0-based t-index -> image polynomial in (t1..t12, d1, d2)."""
    out = {}
    for lhs, poly in datafiles.load_equations("galois_map.txt", TD_NAMES, "->", data_dir):
        out[int(lhs.lstrip("t")) - 1] = poly
    return out


def transport_point(d1, d2, domain: Domain):
    """(d1, d2) -> (-1/d2, d1)."""
    return domain.neg(domain.inv(d2)), d1


def verify_galois_map(d1=None, d2=None, domain: Domain = QQ, system=None,
                      substitution: dict[int, SparsePolynomial] | None = None,
                      data_dir=None) -> bool:
    """Pull the system at (-1/d2, d1) back through the coordinate change and test
    that every quadric lands in the span of the system at (d1, d2).

    With ``d1 = d2 = None`` the test is symbolic over Q(d1, d2).
    """
    system = list(system) if system is not None else reference_system("c3", data_dir)
    sub = substitution if substitution is not None else galois_substitution(data_dir)
    n = NT + 2
    if d1 is None:
        ok = True
        for q in system:
            moved = transport_parameters(q, GALOIS_PARAMETER_MAP)
            pulled = moved.substitute({i: s for i, s in sub.items()}, n)
            ok = ok and in_span(system, pulled)
        return ok
    e1, e2 = transport_point(d1, d2, domain)
    here = specialize(system, [d1, d2], domain)
    there = specialize(system, [e1, e2], domain)
    img = {i: specialize([s], [d1, d2], domain)[0] for i, s in sub.items()}
    return all(in_span(here, q.substitute(img, NT)) for q in there)


def galois_orbit_closure(d1, d2, domain: Domain, system=None, data_dir=None) -> dict:
    """Compose the coordinate change around the parameter orbit of length 4.

    Each step must land in the span at the next orbit point; the composite
    must be diagonal and preserve the span at the start.
    """
    system = list(system) if system is not None else reference_system("c3", data_dir)
    sub = galois_substitution(data_dir)
    points = [(domain.convert(d1), domain.convert(d2))]
    for _ in range(4):
        points.append(transport_point(*points[-1], domain))
    returns = points[4] == points[0]
    steps_ok = all(verify_galois_map(a, b, domain, system, sub) for a, b in points[:4])
    # composite substitution: t -> phi_{p0}(phi_{p1}(phi_{p2}(phi_{p3}(t))))
    comp = {i: SparsePolynomial.variable(i, NT, domain) for i in range(NT)}
    for a, b in reversed(points[:4]):
        img = {i: specialize([s], [a, b], domain)[0] for i, s in sub.items()}
        comp = {i: p.substitute(img, NT) for i, p in comp.items()}
    diagonal = all(len(p) == 1 and p.monomials()[0][i] == 1 for i, p in comp.items())
    here = specialize(system, [d1, d2], domain)
    preserved = all(in_span(here, q.substitute(comp, NT)) for q in here)
    return {"orbit_length_4": returns, "steps_ok": steps_ok, "composite_diagonal": diagonal,
            "composite_preserves_span": preserved}


# ---------------------------------------------------------------------------
# constraint identity

def symbolic_constraint_sum(data_dir=None) -> SparsePolynomial:
    """Sum of the restricted invariant quadrics with all twelve d_w symbolic."""
    names = tuple(f"d{i}" for i in range(1, 13))
    params = CutParameters.general([SparsePolynomial.variable(i, 12, QQ) for i in range(12)],
                                   QQ, names)
    return invariant_sum(params, "second", data_dir)


def constraint_coefficients(data_dir=None) -> dict[tuple[int, int], SparsePolynomial]:
    """Coefficient (a polynomial in d1..d12) of each t_i t_j in the symbolic sum."""
    s = symbolic_constraint_sum(data_dir)
    out = {}
    for m, c in split_parameters(s, NT).items():
        idx = [i + 1 for i, k in enumerate(m) for _ in range(k)]
        out[tuple(idx)] = c
    return out


def expected_constraint_polynomials() -> dict[tuple[int, int], SparsePolynomial]:
    """-(1 + d_i d_{13-i}) for the monomial t_i t_{13-i}, i = 1..6."""
    names = [f"d{i}" for i in range(1, 13)]
    return {(i, 13 - i): parse_polynomial(f"-1 - d{i}*d{13 - i}", names, QQ) for i in range(1, 7)}


def rational_rank(rows) -> int:
    return rank_rational(rows)


# ---------------------------------------------------------------------------
# numeric helpers

def full_parameter_vector(d1: complex, d2: complex, rest: Sequence = (1, 1, 1, 1)) -> list[complex]:
    """d_1..d_12 as complex numbers, with d_{13-i} = -1/d_i."""
    free = [complex(d1), complex(d2)] + [complex(x) for x in rest]
    return free + [-1 / free[5 - j] for j in range(6)]


def surviving_indices(data_dir=None) -> list[int]:
    """1-based P-index identified with t_w (second member for w <= 6, first for w >= 7)."""
    return [second if w <= 6 else first
            for w, (first, second) in enumerate(weight_pairing(data_dir), start=1)]


def cut_condition_matrix(d1: complex, d2: complex, rest: Sequence = (1, 1, 1, 1),
                         data_dir=None):
    """15 x 27 complex matrix of the linear cut conditions on the P-coordinates:
    P9, P18, P27 and P_first + d_w P_second for w = 1..12."""
    import numpy as np

    inv_vars = datafiles.load_json("torus.json", data_dir)["invariant_variables"]
    d = full_parameter_vector(d1, d2, rest)
    rows = []
    for i in inv_vars:
        r = np.zeros(27, dtype=complex)
        r[i - 1] = 1
        rows.append(r)
    for w, (first, second) in enumerate(weight_pairing(data_dir), start=1):
        r = np.zeros(27, dtype=complex)
        r[first - 1] = 1
        r[second - 1] = d[w - 1]
        rows.append(r)
    return np.array(rows)


def numeric_cut(d1: complex, d2: complex, data_dir=None) -> list[SparsePolynomial]:
    """The 26 quadrics over C at (d1, d2), d3..d6 = 1 (exact build, then specialised)."""
    from .polyring import CC
    return specialize(symbolic_cut(data_dir).quadrics, [complex(d1), complex(d2)], CC)
