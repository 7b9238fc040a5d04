"""Sparse multivariate polynomials over a single coefficient domain.

Terms are stored in a dict keyed by exponent tuples. Iteration order is the
graded lexicographic order (highest term first), so printing and column
indexing are deterministic.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence

from .domains import QQ, Domain, DomainMismatch, convert_scalar

Exponents = tuple[int, ...]


def grlex_key(e: Exponents) -> tuple[int, Exponents]:
    """Sort key for the graded lexicographic order (larger key = larger term)."""
    return (sum(e), e)


class InhomogeneousError(ValueError):
    pass


class SparsePolynomial:
    """Immutable sparse polynomial; zero coefficients are never stored."""

    __slots__ = ("nvars", "domain", "_terms", "_hash")

    def __init__(self, nvars: int, domain: Domain, terms: Mapping[Exponents, object] | None = None,
                 *, _trusted: bool = False):
        self.nvars = nvars
        self.domain = domain
        self._hash = None
        if _trusted:
            self._terms = terms
            return
        clean: dict[Exponents, object] = {}
        if terms:
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != nvars or any(k < 0 for k in e):
                    raise ValueError(f"bad exponent vector {e} for {nvars} variables")
                c = domain.convert(c)
                if not domain.is_zero(c):
                    clean[e] = c
        self._terms = clean

    # -- construction -----------------------------------------------------
    @classmethod
    def zero(cls, nvars: int, domain: Domain = QQ) -> SparsePolynomial:
        return cls(nvars, domain, {}, _trusted=True)

    @classmethod
    def constant(cls, c, nvars: int, domain: Domain = QQ) -> SparsePolynomial:
        return cls(nvars, domain, {(0,) * nvars: c})

    @classmethod
    def variable(cls, i: int, nvars: int, domain: Domain = QQ) -> SparsePolynomial:
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, domain, {tuple(e): 1})

    @classmethod
    def monomial(cls, e: Exponents, nvars: int, domain: Domain = QQ, coeff=1) -> SparsePolynomial:
        return cls(nvars, domain, {tuple(e): coeff})

    @classmethod
    def linear_form(cls, coeffs: Mapping[int, object], nvars: int,
                    domain: Domain = QQ) -> SparsePolynomial:
        terms = {}
        for i, c in coeffs.items():
            e = [0] * nvars
            e[i] = 1
            terms[tuple(e)] = c
        return cls(nvars, domain, terms)

    # -- inspection -------------------------------------------------------
    def terms(self) -> list[tuple[Exponents, object]]:
        """Terms in canonical order, leading (largest) term first."""
        return sorted(self._terms.items(), key=lambda t: grlex_key(t[0]), reverse=True)

    def monomials(self) -> list[Exponents]:
        return [e for e, _ in self.terms()]

    def coefficient(self, e: Exponents):
        return self._terms.get(tuple(e), self.domain.zero())

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def leading_term(self) -> tuple[Exponents, object]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self._terms, key=grlex_key)
        return e, self._terms[e]

    def total_degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    def homogeneous_degree(self) -> int:
        """Common degree of all terms; raises InhomogeneousError otherwise."""
        degs = {sum(e) for e in self._terms}
        if len(degs) != 1:
            raise InhomogeneousError(f"polynomial is not homogeneous (degrees {sorted(degs)})")
        return degs.pop()

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self._terms}) <= 1

    def support_variables(self) -> set[int]:
        return {i for e in self._terms for i, k in enumerate(e) if k}

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparsePolynomial):
            return NotImplemented
        return (self.nvars == other.nvars and self.domain == other.domain
                and self._terms == other._terms)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    # -- arithmetic -------------------------------------------------------
    def _check(self, other: SparsePolynomial) -> None:
        if self.nvars != other.nvars:
            raise DomainMismatch(f"variable counts differ: {self.nvars} vs {other.nvars}")
        if self.domain != other.domain:
            raise DomainMismatch(f"coefficient domains differ: {self.domain} vs {other.domain}")

    def _coerce(self, other) -> SparsePolynomial:
        if isinstance(other, SparsePolynomial):
            self._check(other)
            return other
        return SparsePolynomial.constant(other, self.nvars, self.domain)

    def __add__(self, other) -> SparsePolynomial:
        other = self._coerce(other)
        dom = self.domain
        out = dict(self._terms)
        for e, c in other._terms.items():
            if e in out:
                s = dom.add(out[e], c)
                if dom.is_zero(s):
                    del out[e]
                else:
                    out[e] = s
            else:
                out[e] = c
        return SparsePolynomial(self.nvars, dom, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self) -> SparsePolynomial:
        dom = self.domain
        return SparsePolynomial(self.nvars, dom, {e: dom.neg(c) for e, c in self._terms.items()},
                                _trusted=True)

    def __sub__(self, other) -> SparsePolynomial:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> SparsePolynomial:
        return (-self) + other

    def __mul__(self, other) -> SparsePolynomial:
        if not isinstance(other, SparsePolynomial):
            return self.scale(self.domain.convert(other))
        self._check(other)
        dom = self.domain
        out: dict[Exponents, object] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c = dom.mul(c1, c2)
                if e in out:
                    out[e] = dom.add(out[e], c)
                else:
                    out[e] = c
        out = {e: c for e, c in out.items() if not dom.is_zero(c)}
        return SparsePolynomial(self.nvars, dom, out, _trusted=True)

    def __rmul__(self, other) -> SparsePolynomial:
        return self.scale(self.domain.convert(other))

    def scale(self, c) -> SparsePolynomial:
        dom = self.domain
        if dom.is_zero(c):
            return SparsePolynomial.zero(self.nvars, dom)
        out = {e: dom.mul(v, c) for e, v in self._terms.items()}
        out = {e: v for e, v in out.items() if not dom.is_zero(v)}
        return SparsePolynomial(self.nvars, dom, out, _trusted=True)

    def __pow__(self, k: int) -> SparsePolynomial:
        if k < 0:
            raise ValueError("negative power")
        result = SparsePolynomial.constant(1, self.nvars, self.domain)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- calculus and substitution ----------------------------------------
    def partial_derivative(self, i: int) -> SparsePolynomial:
        if not 0 <= i < self.nvars:
            raise IndexError(f"variable index {i} out of range")
        dom = self.domain
        out = {}
        for e, c in self._terms.items():
            k = e[i]
            if k:
                ne = e[:i] + (k - 1,) + e[i + 1:]
                v = dom.mul(c, dom.convert(k))
                if not dom.is_zero(v):
                    out[ne] = v
        return SparsePolynomial(self.nvars, dom, out, _trusted=True)

    def gradient(self) -> list[SparsePolynomial]:
        return [self.partial_derivative(i) for i in range(self.nvars)]

    def substitute(self, mapping: Mapping[int, SparsePolynomial], target_nvars: int | None = None
                   ) -> SparsePolynomial:
        """Replace variable i by ``mapping[i]``; unmapped variables stay (same index).

        All images must share one variable count (``target_nvars``) and the
        coefficient domain of ``self``.
        """
        dom = self.domain
        if target_nvars is None:
            target_nvars = next(iter(mapping.values())).nvars if mapping else self.nvars
        images: list[SparsePolynomial] = []
        for i in range(self.nvars):
            if i in mapping:
                img = mapping[i]
                if img.domain != dom:
                    raise DomainMismatch(f"substitution for variable {i} lives over {img.domain}")
                if img.nvars != target_nvars:
                    raise DomainMismatch("substitution images have inconsistent variable counts")
            else:
                if i >= target_nvars:
                    raise ValueError(f"variable {i} unmapped and absent from target ring")
                img = SparsePolynomial.variable(i, target_nvars, dom)
            images.append(img)
        powers: dict[tuple[int, int], SparsePolynomial] = {}

        def power(i: int, k: int) -> SparsePolynomial:
            key = (i, k)
            if key not in powers:
                powers[key] = images[i] if k == 1 else power(i, k - 1) * images[i]
            return powers[key]

        acc: dict[Exponents, object] = {}
        for e, c in self._terms.items():
            term = SparsePolynomial.constant(c, target_nvars, dom)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            for te, tc in term._terms.items():
                acc[te] = dom.add(acc[te], tc) if te in acc else tc
        acc = {e: c for e, c in acc.items() if not dom.is_zero(c)}
        return SparsePolynomial(target_nvars, dom, acc, _trusted=True)

    def substitute_linear(self, mapping: Mapping[int, SparsePolynomial],
                          target_nvars: int | None = None) -> SparsePolynomial:
        """Substitution by linear forms (degree <= 1, no constant term)."""
        for i, form in mapping.items():
            if any(sum(e) != 1 for e, _ in form.items()):
                raise ValueError(f"image of variable {i} is not a linear form")
        return self.substitute(mapping, target_nvars)

    def evaluate(self, point: Sequence):
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} coordinates, expected {self.nvars}")
        dom = self.domain
        pt = [dom.convert(x) for x in point]
        total = dom.zero()
        for e, c in self._terms.items():
            v = c
            for x, k in zip(pt, e):
                if k:
                    v = dom.mul(v, dom.pow(x, k))
            total = dom.add(total, v)
        return total

    def map_coefficients(self, target: Domain, sqrt_m2: int | None = None) -> SparsePolynomial:
        """Coefficient-wise image in ``target`` (see :func:`convert_scalar`)."""
        out = {e: convert_scalar(c, self.domain, target, sqrt_m2) for e, c in self._terms.items()}
        return SparsePolynomial(self.nvars, target, out)

    def map_exponents(self, f, nvars: int) -> SparsePolynomial:
        """Apply ``f`` to every exponent vector; colliding terms are summed."""
        dom = self.domain
        out: dict[Exponents, object] = {}
        for e, c in self._terms.items():
            ne = tuple(f(e))
            out[ne] = dom.add(out[ne], c) if ne in out else c
        out = {e: c for e, c in out.items() if not dom.is_zero(c)}
        return SparsePolynomial(nvars, dom, out, _trusted=True)

    # -- text format ------------------------------------------------------
    def to_string(self, variables: Sequence[str]) -> str:
        if len(variables) != self.nvars:
            raise ValueError("variable name list has wrong length")
        if not self._terms:
            return "0"
        dom = self.domain
        pieces = []
        for e, c in self.terms():
            s = dom.format(c)
            sign = "+"
            if s.startswith("-"):
                sign, s = "-", s[1:]
            factors = [s]
            for name, k in zip(variables, e):
                if k == 1:
                    factors.append(name)
                elif k > 1:
                    factors.append(f"{name}^{k}")
            pieces.append((sign, "*".join(factors)))
        first_sign, first = pieces[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        names = [f"x{i + 1}" for i in range(self.nvars)]
        return f"SparsePolynomial[{self.domain}]({self.to_string(names)})"


def parse_polynomial(text: str, variables: Sequence[str], domain: Domain = QQ) -> SparsePolynomial:
    """Parse the textual polynomial format.

    Grammar: a sum of signed terms; a term is a ``*``-product of factors; a
    factor is a number (``3``, ``1/2``), the token ``r2`` (sqrt(-2)), a
    variable with optional ``^k``, or a parenthesised coefficient literal of
    the domain (``(3+2r2)``, ``(1.5-2j)``).
    """
    index = {name: i for i, name in enumerate(variables)}
    n = len(variables)
    s = text.strip()
    if s == "0":
        return SparsePolynomial.zero(n, domain)
    terms = _split_terms(s)
    result: dict[Exponents, object] = {}
    for sign, body in terms:
        coeff = domain.convert(-1 if sign == "-" else 1)
        exps = [0] * n
        for factor in _split_factors(body):
            if factor.startswith("("):
                coeff = domain.mul(coeff, domain.parse(factor))
                continue
            base, _, power = factor.partition("^")
            k = int(power) if power else 1
            if base in index:
                exps[index[base]] += k
            elif base == "r2":
                coeff = domain.mul(coeff, domain.pow(domain.parse("(r2)"), k))
            else:
                try:
                    value = domain.parse(base)
                except (ValueError, ZeroDivisionError) as exc:
                    raise ValueError(f"unknown factor {factor!r}") from exc
                coeff = domain.mul(coeff, domain.pow(value, k))
        e = tuple(exps)
        result[e] = domain.add(result[e], coeff) if e in result else coeff
    return SparsePolynomial(n, domain, result)


def _split_terms(s: str) -> list[tuple[str, str]]:
    out, depth, start, sign = [], 0, 0, "+"
    i = 0
    if s and s[0] in "+-":
        sign, i, start = s[0], 1, 1
    while i < len(s):
        ch = s[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0 and i > start and s[i - 1] not in "eE*^":
            out.append((sign, s[start:i].strip()))
            sign, start = ch, i + 1
        i += 1
    out.append((sign, s[start:].strip()))
    if any(not body for _, body in out):
        raise ValueError(f"malformed polynomial text {s!r}")
    return out


def _split_factors(body: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "*" and depth == 0:
            out.append(cur.strip())
            cur = ""
        else:
            cur += ch
    out.append(cur.strip())
    return [f for f in out if f]


def polynomial_ring(names: Iterable[str], domain: Domain = QQ) -> list[SparsePolynomial]:
    """Generator polynomials for the given variable names."""
    names = list(names)
    return [SparsePolynomial.variable(i, len(names), domain) for i in range(len(names))]

