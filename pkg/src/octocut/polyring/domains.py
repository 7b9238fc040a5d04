"""Coefficient domains: rationals, Q(sqrt(-2)), prime fields, complex doubles.

Each domain is a small immutable object that knows how to do arithmetic on
its own element representation. Elements themselves are plain Python values
(``Fraction``, :class:`QR2`, ``int`` reduced mod p, ``complex``) so that
polynomial code can stay generic without wrapping every scalar.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class DomainMismatch(ValueError):
    """Raised when values from two different coefficient domains meet."""


class ReductionError(ValueError):
    """Raised when a coefficient has no image in the requested domain."""


@dataclass(frozen=True, slots=True)
class QR2:
    """The number a + b*sqrt(-2) with rational a, b."""

    a: Fraction
    b: Fraction = Fraction(0)

    def __add__(self, other: QR2) -> QR2:
        return QR2(self.a + other.a, self.b + other.b)

    def __sub__(self, other: QR2) -> QR2:
        return QR2(self.a - other.a, self.b - other.b)

    def __neg__(self) -> QR2:
        return QR2(-self.a, -self.b)

    def __mul__(self, other: QR2) -> QR2:
        # (sqrt(-2))^2 = -2
        return QR2(self.a * other.a - 2 * self.b * other.b,
                   self.a * other.b + self.b * other.a)

    def norm(self) -> Fraction:
        return self.a * self.a + 2 * self.b * self.b

    def inverse(self) -> QR2:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in Q(sqrt(-2))")
        return QR2(self.a / n, -self.b / n)

    def __bool__(self) -> bool:
        return bool(self.a) or bool(self.b)


def _fmt_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class Domain:
    """Base class; subclasses implement arithmetic on their elements."""

    name = "abstract"
    exact = True

    def zero(self):
        return self.convert(0)

    def one(self):
        return self.convert(1)

    def add(self, x, y):
        return x + y

    def sub(self, x, y):
        return x - y

    def neg(self, x):
        return -x

    def mul(self, x, y):
        return x * y

    def is_zero(self, x) -> bool:
        return not x

    def inv(self, x):
        raise NotImplementedError

    def pow(self, x, e: int):
        r = self.one()
        while e:
            if e & 1:
                r = self.mul(r, x)
            x = self.mul(x, x)
            e >>= 1
        return r

    def convert(self, x):
        raise NotImplementedError

    def format(self, x) -> str:
        raise NotImplementedError

    def parse(self, s: str):
        raise NotImplementedError

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self.__dict__ == other.__dict__

    def __hash__(self) -> int:
        return hash((type(self).__name__, tuple(sorted(self.__dict__.items()))))

    def __repr__(self) -> str:
        return self.name


class RationalField(Domain):
    name = "q"

    def convert(self, x) -> Fraction:
        if isinstance(x, (int, Fraction)):
            return Fraction(x)
        raise DomainMismatch(f"cannot treat {x!r} as a rational")

    def inv(self, x: Fraction) -> Fraction:
        return 1 / x

    def format(self, x: Fraction) -> str:
        return _fmt_fraction(x)

    def parse(self, s: str) -> Fraction:
        return Fraction(s)


class QuadraticField(Domain):
    """Q(sqrt(-2)); the only extension the octonionic cut needs."""

    name = "qr2"

    def convert(self, x) -> QR2:
        if isinstance(x, QR2):
            return x
        if isinstance(x, (int, Fraction)):
            return QR2(Fraction(x))
        raise DomainMismatch(f"cannot treat {x!r} as an element of Q(sqrt(-2))")

    def inv(self, x: QR2) -> QR2:
        return x.inverse()

    def format(self, x: QR2) -> str:
        if not x.b:
            return _fmt_fraction(x.a)
        b = _fmt_fraction(abs(x.b))
        sign = "-" if x.b < 0 else "+"
        return f"({_fmt_fraction(x.a)}{sign}{b}r2)"

    def parse(self, s: str) -> QR2:
        s = s.strip()
        if s.startswith("(") and s.endswith(")"):
            s = s[1:-1].strip()
        if "r2" not in s:
            return QR2(Fraction(s))
        body = s[:-2].rstrip() if s.endswith("r2") else None
        if body is None:
            raise ValueError(f"malformed Q(sqrt(-2)) literal {s!r}")
        # split "a+b" / "a-b" / "b" at the last top-level sign that is not leading
        k = max(body.rfind("+"), body.rfind("-"))
        if k <= 0:
            a, b = "0", body or "1"
        else:
            a, b = body[:k], body[k:]
        if b in ("+", "-", ""):
            b = b + "1"
        return QR2(Fraction(a.strip()), Fraction(b.replace(" ", "")))


class PrimeField(Domain):
    """Integers modulo an odd prime below 2**31."""

    def __init__(self, p: int):
        if not (2 < p < 2**31) or not _is_prime(p):
            raise ValueError(f"modulus must be an odd prime below 2**31, got {p}")
        self.p = p

    @property
    def name(self) -> str:  # type: ignore[override]
        return f"fp:{self.p}"

    def add(self, x, y):
        return (x + y) % self.p

    def sub(self, x, y):
        return (x - y) % self.p

    def neg(self, x):
        return (-x) % self.p

    def mul(self, x, y):
        return (x * y) % self.p

    def inv(self, x: int) -> int:
        if x % self.p == 0:
            raise ZeroDivisionError("inverse of zero mod p")
        return pow(x, -1, self.p)

    def convert(self, x) -> int:
        if isinstance(x, bool):
            x = int(x)
        if isinstance(x, int):
            return x % self.p
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ReductionError(f"denominator of {x} not invertible mod {self.p}")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        raise DomainMismatch(f"cannot treat {x!r} as an element of F_{self.p}")

    def format(self, x: int) -> str:
        return str(x)

    def parse(self, s: str) -> int:
        return self.convert(Fraction(s))


class ComplexField(Domain):
    name = "c"
    exact = False

    def convert(self, x) -> complex:
        if isinstance(x, (int, float, Fraction, complex)):
            return complex(x)
        raise DomainMismatch(f"cannot treat {x!r} as a complex number")

    def inv(self, x: complex) -> complex:
        return 1 / x

    def is_zero(self, x) -> bool:
        return x == 0

    def format(self, x: complex) -> str:
        return repr(x) if x.imag else f"({x.real!r}+0j)"

    def parse(self, s: str) -> complex:
        return complex(s.replace(" ", ""))


QQ = RationalField()
QQ_R2 = QuadraticField()
CC = ComplexField()


def GF(p: int) -> PrimeField:
    return PrimeField(p)


def domain_from_name(name: str) -> Domain:
    """Parse a domain tag such as ``q``, ``qr2``, ``fp:10007`` or ``c``."""
    if name == "q":
        return QQ
    if name == "qr2":
        return QQ_R2
    if name == "c":
        return CC
    if name.startswith("fp:"):
        return PrimeField(int(name[3:]))
    raise ValueError(f"unknown field tag {name!r}")


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    # deterministic Miller-Rabin for n < 3.3e24
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def sqrt_mod(a: int, p: int) -> int:
    """Smallest square root of ``a`` modulo the odd prime ``p`` (Tonelli-Shanks)."""
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        raise ReductionError(f"{a} is not a square mod {p}")
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return min(r, p - r)


def convert_scalar(x, source: Domain, target: Domain, sqrt_m2: int | None = None):
    """Image of one coefficient under the canonical map ``source -> target``.

    Allowed maps: identity, Q -> anything, Q(sqrt(-2)) -> F_p (needs a square
    root of -2 mod p, computed if not given), exact -> C (lossy, one way).
    """
    if source == target:
        return x
    if isinstance(source, RationalField):
        return target.convert(x)
    if isinstance(source, QuadraticField):
        if isinstance(target, PrimeField):
            if x.b == 0:
                return target.convert(x.a)
            r = sqrt_m2 if sqrt_m2 is not None else sqrt_mod(-2, target.p)
            if (r * r + 2) % target.p:
                raise ReductionError(f"{r} is not a square root of -2 mod {target.p}")
            return target.add(target.convert(x.a), target.mul(target.convert(x.b), r))
        if isinstance(target, ComplexField):
            return complex(float(x.a), float(x.b) * 2**0.5)
    raise DomainMismatch(f"no coefficient map {source} -> {target}")
