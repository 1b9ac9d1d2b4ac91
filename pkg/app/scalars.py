"""
Exact scalars: rationals, the cyclotomic field Q(w) with w a primitive cube
root of unity, jets truncated after h^2, and free-abelian monomials used by
the constraint solver.

Rationals are sympy's ``QQ`` elements (gmpy2 backed when available).
"""
import logging
import re
from typing import Mapping, Union

from sympy.polys.domains import QQ

from app.errors import DivisionByZero, IncompatibleMonoids, NotInvertible, ScalarError

logger = logging.getLogger(__name__)

Rational = type(QQ(0))
JET_ORDER = 2


def rational(num, den=1):
    """Build a reduced rational; ``den`` must be nonzero."""
    if den == 0:
        raise DivisionByZero(f"rational with zero denominator: {num}/{den}")
    return QQ(num, den)


def _to_rational(value):
    if isinstance(value, bool):
        raise ScalarError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return QQ(value)
    if isinstance(value, Rational):
        return value
    raise ScalarError(f"not a rational: {value!r}")


def format_rational(value) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class CycScalar:
    """Element u + v*w of Q(w), reduced with w^2 = -1 - w."""

    __slots__ = ("u", "v")

    def __init__(self, u=0, v=0):
        object.__setattr__(self, "u", _to_rational(u))
        object.__setattr__(self, "v", _to_rational(v))

    def __setattr__(self, name, value):
        raise AttributeError("CycScalar is immutable")

    @classmethod
    def coerce(cls, value) -> "CycScalar":
        if isinstance(value, CycScalar):
            return value
        return cls(_to_rational(value))

    @staticmethod
    def _other(value):
        if isinstance(value, CycScalar):
            return value
        if isinstance(value, (int, Rational)) and not isinstance(value, bool):
            return CycScalar(value)
        return None

    def __add__(self, other):
        other = self._other(other)
        if other is None:
            return NotImplemented
        return CycScalar(self.u + other.u, self.v + other.v)

    __radd__ = __add__

    def __neg__(self):
        return CycScalar(-self.u, -self.v)

    def __sub__(self, other):
        other = self._other(other)
        if other is None:
            return NotImplemented
        return CycScalar(self.u - other.u, self.v - other.v)

    def __rsub__(self, other):
        other = self._other(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._other(other)
        if other is None:
            return NotImplemented
        uu = self.u * other.u
        vv = self.v * other.v
        return CycScalar(uu - vv, self.u * other.v + self.v * other.u - vv)

    __rmul__ = __mul__

    def conjugate(self) -> "CycScalar":
        """Galois conjugate, w -> w^2."""
        return CycScalar(self.u - self.v, -self.v)

    def norm(self):
        return self.u * self.u - self.u * self.v + self.v * self.v

    def inverse(self) -> "CycScalar":
        if not self:
            raise DivisionByZero("inverse of zero in Q(w)")
        norm = self.norm()
        conj = self.conjugate()
        return CycScalar(conj.u / norm, conj.v / norm)

    def __truediv__(self, other):
        other = self._other(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._other(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        base = self if exponent >= 0 else self.inverse()
        acc = CycScalar(1)
        for bit in bin(abs(exponent))[2:]:
            acc = acc * acc
            if bit == "1":
                acc = acc * base
        return acc

    def __bool__(self):
        return bool(self.u) or bool(self.v)

    def __eq__(self, other):
        other = self._other(other)
        if other is None:
            return NotImplemented
        return self.u == other.u and self.v == other.v

    def __hash__(self):
        if not self.v:
            return hash(self.u)
        return hash((self.u, self.v))

    def is_rational(self) -> bool:
        return not self.v

    def __repr__(self):
        return f"CycScalar({self})"

    def __str__(self):
        return format_scalar(self)


Scalar = Union[CycScalar, int]


def omega() -> CycScalar:
    """The primitive cube root of unity w."""
    return CycScalar(0, 1)


def as_scalar(value) -> CycScalar:
    if isinstance(value, str):
        return parse_scalar(value)
    try:
        return CycScalar.coerce(value)
    except ScalarError:
        raise ScalarError(f"not a scalar: {value!r}")


def cyc_arith(op: str, x: CycScalar, y: CycScalar | None = None) -> CycScalar:
    """Field arithmetic in Q(w): ``add``, ``mul`` or ``inv``."""
    if op == "add":
        return x + y
    if op == "mul":
        return x * y
    if op == "inv":
        return CycScalar.coerce(x).inverse()
    raise ScalarError(f"unknown operation: {op}")


def cyc_pow(x: CycScalar, exponent: int) -> CycScalar:
    return CycScalar.coerce(x) ** exponent


def format_scalar(value: CycScalar) -> str:
    """Text form with ``w`` for the cube root, e.g. ``1/4 + 1/2w``."""
    value = CycScalar.coerce(value)
    if not value.v:
        return format_rational(value.u)
    if value.v == 1:
        wpart = "w"
    elif value.v == -1:
        wpart = "-w"
    else:
        wpart = f"{format_rational(value.v)}w"
    if not value.u:
        return wpart
    if wpart.startswith("-"):
        return f"{format_rational(value.u)} - {wpart[1:]}"
    return f"{format_rational(value.u)} + {wpart}"


_TERM = re.compile(r"([+-]?)([^+-]+)")
_RATIONAL = re.compile(r"(\d+)(?:/(\d+))?")


def parse_rational(text: str):
    text = text.strip()
    sign = 1
    if text[:1] in "+-":
        sign = -1 if text[0] == "-" else 1
        text = text[1:].strip()
    match = _RATIONAL.fullmatch(text)
    if not match:
        raise ScalarError(f"invalid rational: {text!r}")
    num = int(match.group(1))
    den = int(match.group(2) or 1)
    return sign * rational(num, den)


def parse_scalar(text: str) -> CycScalar:
    """Inverse of :func:`format_scalar`; also accepts a surrounding pair of parentheses."""
    compact = text.replace(" ", "")
    if compact.startswith("(") and compact.endswith(")"):
        compact = compact[1:-1]
    if not compact:
        raise ScalarError(f"empty scalar text: {text!r}")
    u = QQ(0)
    v = QQ(0)
    consumed = 0
    for match in _TERM.finditer(compact):
        if match.start() != consumed:
            raise ScalarError(f"invalid scalar text: {text!r}")
        consumed = match.end()
        sign = -1 if match.group(1) == "-" else 1
        body = match.group(2)
        if body.endswith("w"):
            coeff = body[:-1].rstrip("*")
            v += sign * (parse_rational(coeff) if coeff else QQ(1))
        else:
            u += sign * parse_rational(body)
    if consumed != len(compact):
        raise ScalarError(f"invalid scalar text: {text!r}")
    return CycScalar(u, v)


def scalar_to_json(value) -> dict:
    value = CycScalar.coerce(value)
    if value.is_rational():
        return {"r": [int(value.u.numerator), int(value.u.denominator)]}
    return {
        "c": [
            [int(value.u.numerator), int(value.u.denominator)],
            [int(value.v.numerator), int(value.v.denominator)],
        ]
    }


def _pair_to_rational(pair):
    if (
        not isinstance(pair, list)
        or len(pair) != 2
        or not all(isinstance(x, int) and not isinstance(x, bool) for x in pair)
    ):
        raise ScalarError(f"expected [num, den], got {pair!r}")
    return rational(pair[0], pair[1])


def scalar_from_json(obj) -> CycScalar:
    """Decode ``{"r": [n, d]}``, ``{"c": [[n1, d1], [n2, d2]]}``, ``[n, d]`` or an integer."""
    if isinstance(obj, bool):
        raise ScalarError(f"not a scalar: {obj!r}")
    if isinstance(obj, int):
        return CycScalar(obj)
    if isinstance(obj, str):
        return parse_scalar(obj)
    if isinstance(obj, list):
        return CycScalar(_pair_to_rational(obj))
    if isinstance(obj, dict) and set(obj) == {"r"}:
        return CycScalar(_pair_to_rational(obj["r"]))
    if isinstance(obj, dict) and set(obj) == {"c"}:
        parts = obj["c"]
        if not isinstance(parts, list) or len(parts) != 2:
            raise ScalarError(f"expected two rational parts, got {parts!r}")
        return CycScalar(_pair_to_rational(parts[0]), _pair_to_rational(parts[1]))
    raise ScalarError(f"not a scalar: {obj!r}")


class Jet:
    """Truncated power series c0 + c1*h + c2*h^2 with Q(w) coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, c0=0, c1=0, c2=0):
        object.__setattr__(
            self, "coeffs", tuple(CycScalar.coerce(c) for c in (c0, c1, c2))
        )

    def __setattr__(self, name, value):
        raise AttributeError("Jet is immutable")

    @classmethod
    def h(cls) -> "Jet":
        return cls(0, 1, 0)

    @classmethod
    def coerce(cls, value) -> "Jet":
        if isinstance(value, Jet):
            return value
        return cls(value)

    @staticmethod
    def _other(value):
        if isinstance(value, Jet):
            return value
        if isinstance(value, CycScalar) or (
            isinstance(value, (int, Rational)) and not isinstance(value, bool)
        ):
            return Jet(value)
        return None

    def coeff(self, k: int) -> CycScalar:
        return self.coeffs[k]

    def __add__(self, other):
        other = self._other(other)
        if other is None:
            return NotImplemented
        return Jet(*(x + y for x, y in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return Jet(*(-x for x in self.coeffs))

    def __sub__(self, other):
        other = self._other(other)
        if other is None:
            return NotImplemented
        return Jet(*(x - y for x, y in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        other = self._other(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._other(other)
        if other is None:
            return NotImplemented
        a0, a1, a2 = self.coeffs
        b0, b1, b2 = other.coeffs
        return Jet(a0 * b0, a0 * b1 + a1 * b0, a0 * b2 + a1 * b1 + a2 * b0)

    __rmul__ = __mul__

    def inverse(self) -> "Jet":
        c0, c1, c2 = self.coeffs
        if not c0:
            raise NotInvertible(f"jet {self} has zero constant term")
        d0 = c0.inverse()
        d1 = -c1 * d0 * d0
        d2 = (c1 * c1 - c0 * c2) * d0 * d0 * d0
        return Jet(d0, d1, d2)

    def __truediv__(self, other):
        other = self._other(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._other(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        base = self if exponent >= 0 else self.inverse()
        acc = Jet(1)
        for _ in range(abs(exponent)):
            acc = acc * base
        return acc

    def __bool__(self):
        return any(self.coeffs)

    def __eq__(self, other):
        other = self._other(other)
        if other is None:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        if not self.coeffs[1] and not self.coeffs[2]:
            return hash(self.coeffs[0])
        return hash(self.coeffs)

    def __repr__(self):
        return f"Jet({self})"

    def __str__(self):
        return " + ".join(
            f"({format_scalar(c)})h^{k}" for k, c in enumerate(self.coeffs)
        )


def jet_coefficient(value, k: int) -> CycScalar:
    """h^k coefficient of a jet; plain scalars are constant jets."""
    if isinstance(value, Jet):
        return value.coeff(k)
    return CycScalar.coerce(value) if k == 0 else CycScalar(0)


def jet_arith(op: str, x: Jet, y: Jet | None = None) -> Jet:
    """Ring arithmetic modulo h^3: ``add``, ``mul`` or ``inv``."""
    if op == "add":
        return Jet.coerce(x) + y
    if op == "mul":
        return Jet.coerce(x) * y
    if op == "inv":
        return Jet.coerce(x).inverse()
    raise ScalarError(f"unknown operation: {op}")


def jet_pow(x: Jet, exponent: int) -> Jet:
    return Jet.coerce(x) ** exponent


class Monomial:
    """Element of the free abelian group on ``a, u1, u2, ...``.

    With ``a_mod3`` the exponent of ``a`` lives in Z/3.
    """

    __slots__ = ("exps", "a_mod3")

    def __init__(self, exps: Mapping[str, int] | None = None, a_mod3: bool = False):
        cleaned = {}
        for symbol, exponent in (exps or {}).items():
            exponent = int(exponent)
            if a_mod3 and symbol == "a":
                exponent %= 3
            if exponent:
                cleaned[symbol] = exponent
        object.__setattr__(self, "exps", dict(sorted(cleaned.items(), key=_symbol_key)))
        object.__setattr__(self, "a_mod3", bool(a_mod3))

    def __setattr__(self, name, value):
        raise AttributeError("Monomial is immutable")

    def exponent(self, symbol: str) -> int:
        return self.exps.get(symbol, 0)

    def __mul__(self, other):
        if not isinstance(other, Monomial):
            return NotImplemented
        return mono_mul(self, other)

    def inverse(self) -> "Monomial":
        return Monomial({s: -e for s, e in self.exps.items()}, self.a_mod3)

    def __pow__(self, exponent: int):
        return Monomial({s: e * exponent for s, e in self.exps.items()}, self.a_mod3)

    def evaluate(self, values: Mapping[str, object]):
        """Substitute scalar (or jet) values for the symbols."""
        result = CycScalar(1)
        for symbol, exponent in self.exps.items():
            if symbol not in values:
                raise ScalarError(f"no value for symbol {symbol}")
            value = values[symbol]
            if not isinstance(value, Jet):
                value = CycScalar.coerce(value)
            result = result * (value ** exponent)
        return result

    def __eq__(self, other):
        if not isinstance(other, Monomial):
            return NotImplemented
        return self.exps == other.exps and self.a_mod3 == other.a_mod3

    def __hash__(self):
        return hash((tuple(self.exps.items()), self.a_mod3))

    def __repr__(self):
        return f"Monomial({self})"

    def __str__(self):
        if not self.exps:
            return "1"
        parts = []
        for symbol, exponent in self.exps.items():
            parts.append(symbol if exponent == 1 else f"{symbol}^{exponent}")
        return "*".join(parts)

    def to_json(self) -> dict:
        return dict(self.exps)


def _symbol_key(item):
    symbol = item[0]
    if symbol == "a":
        return (0, 0, symbol)
    if symbol[:1] == "u" and symbol[1:].isdigit():
        return (1, int(symbol[1:]), symbol)
    return (2, 0, symbol)


def mono_mul(x: Monomial, y: Monomial) -> Monomial:
    """Exponent-wise product; both factors must agree on ``a_mod3``."""
    if x.a_mod3 != y.a_mod3:
        raise IncompatibleMonoids(
            f"cannot multiply a_mod3={x.a_mod3} monomial by a_mod3={y.a_mod3} monomial"
        )
    exps = dict(x.exps)
    for symbol, exponent in y.exps.items():
        exps[symbol] = exps.get(symbol, 0) + exponent
    return Monomial(exps, x.a_mod3)
