"""
Multiparameter parameter sets, the standard generalized symmetry P and the
Hecke / braid / sl checks on it.
"""
import logging
import random
from dataclasses import dataclass, field
from typing import Mapping

from app.errors import FormatError, ParamError, ScalarError
from app.scalars import CycScalar, Jet, format_scalar, rational, scalar_from_json, scalar_to_json
from app.tensorspace import PairOp, TripleOp, compose, identity_op, lift_to_triple

logger = logging.getLogger(__name__)


def _value(x):
    return x if isinstance(x, Jet) else CycScalar.coerce(x)


@dataclass(frozen=True)
class ParamSet:
    """Dimension ``n``, Hecke parameter ``a`` and ``q[(i, j)]`` for i < j.

    ``q^{ji} = 1/q^{ij}`` and ``q^{ii} = 1`` are derived, never stored.
    Values are ``CycScalar`` or, for classical limits, ``Jet``.
    """

    n: int
    a: object
    q: Mapping[tuple[int, int], object] = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 2:
            raise ParamError(f"dimension must be at least 2, got {self.n!r}")
        a = _value(self.a)
        if a == 0 or a == -1:
            raise ParamError(f"a must not be 0 or -1, got {a}")
        q = {}
        for (i, j), value in self.q.items():
            if not (1 <= i < j <= self.n):
                raise ParamError(f"q index ({i},{j}) must satisfy 1 <= i < j <= {self.n}")
            value = _value(value)
            if not value:
                raise ParamError(f"q^{{{i}{j}}} must be nonzero")
            q[(i, j)] = value
        for i in range(1, self.n + 1):
            for j in range(i + 1, self.n + 1):
                q.setdefault((i, j), CycScalar(1))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "q", dict(sorted(q.items())))

    def qv(self, i: int, j: int):
        """q^{ij} for any ordered pair."""
        if i == j:
            return CycScalar(1)
        if i < j:
            return self.q[(i, j)]
        return 1 / self.q[(j, i)]

    def hat_q(self, i: int, j: int):
        """q^{ij}/a when i >= j, otherwise q^{ij}."""
        if i >= j:
            return self.qv(i, j) / self.a
        return self.qv(i, j)

    def r(self, i: int, j: int):
        """Anti-plane parameter r^{ij} = a q^{ij} for i < j."""
        return self.a * self.qv(i, j)

    def pairs(self) -> list[tuple[int, int]]:
        return list(self.q)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "a": scalar_to_json(self.a),
            "q": [
                {"i": i, "j": j, "val": scalar_to_json(v)}
                for (i, j), v in self.q.items()
            ],
        }

    def describe(self) -> str:
        lines = [f"n = {self.n}", f"a = {format_scalar(self.a)}"]
        lines += [f"q{i}{j} = {format_scalar(v)}" for (i, j), v in self.q.items()]
        return "\n".join(lines)

    @classmethod
    def from_json(cls, obj, path: str | None = None) -> "ParamSet":
        if not isinstance(obj, dict):
            raise FormatError("parameter file must be an object", path)
        for key in ("n", "a"):
            if key not in obj:
                raise FormatError(f"missing field '{key}'", path)
        n = obj["n"]
        if not isinstance(n, int) or isinstance(n, bool):
            raise FormatError(f"n must be an integer, got {n!r}", path, "/n")
        try:
            a = scalar_from_json(obj["a"])
        except ScalarError as exc:
            raise FormatError(str(exc), path, "/a")
        q = {}
        for pos, entry in enumerate(obj.get("q", [])):
            pointer = f"/q/{pos}"
            try:
                key = (int(entry["i"]), int(entry["j"]))
                value = scalar_from_json(entry["val"])
            except (KeyError, TypeError, ValueError) as exc:
                raise FormatError(f"q entry needs i, j, val: {exc}", path, pointer)
            except ScalarError as exc:
                raise FormatError(str(exc), path, pointer + "/val")
            if key in q:
                raise FormatError(f"duplicate q entry {key}", path, pointer)
            q[key] = value
        try:
            return cls(n, a, q)
        except ParamError as exc:
            raise FormatError(str(exc), path)


def random_params(n: int, rng: random.Random, a=None) -> ParamSet:
    """Sample a ParamSet with small random nonzero rational q's."""
    if a is None:
        a = rng.choice([2, 3, 5, -2])
    q = {}
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            num = rng.choice([k for k in range(-7, 8) if k])
            q[(i, j)] = rational(num, rng.randint(1, 6))
    return ParamSet(n, a, q)


def build_standard_P(params: ParamSet) -> PairOp:
    """Closed form: [(i,j),(j,i)] = q^{ji} (i<j), a q^{ji} (i>j), 1 (i=j); [(i,j),(i,j)] = 1-a (i<j)."""
    n = params.n
    a = params.a
    entries = {}
    for i in range(1, n + 1):
        entries[((i, i), (i, i))] = CycScalar(1)
        for j in range(i + 1, n + 1):
            entries[((i, j), (j, i))] = params.qv(j, i)
            entries[((j, i), (i, j))] = a * params.qv(i, j)
            entries[((i, j), (i, j))] = 1 - a
    return PairOp(n, entries)


def _check_a(a) -> None:
    if a == 0 or a == -1:
        raise ParamError(f"a must not be 0 or -1, got {a}")


@dataclass
class HeckeReport:
    passed: bool
    residual: PairOp

    def to_dict(self) -> dict:
        return {"pass": self.passed, "residual_entries": self.residual.to_json()["entries"]}


@dataclass
class BraidReport:
    passed: bool
    residual: TripleOp
    form: str = "braid"

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "form": self.form,
            "residual_entries": self.residual.to_json()["entries"],
        }


@dataclass
class Theorem2Report:
    passed: bool
    minus_one_residual: TripleOp
    plus_a_residual: TripleOp

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "braid_verdict": "pass" if self.passed else "fail",
            "residual_entries": {
                "P_minus_1": self.minus_one_residual.to_json()["entries"],
                "P_plus_a": self.plus_a_residual.to_json()["entries"],
            },
        }


@dataclass
class SlReport:
    passed: bool
    ratios: dict[int, object]

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "per_j": [
                {"j": j, "pass": ratio == 1, "ratio": scalar_to_json(ratio)}
                for j, ratio in self.ratios.items()
            ],
        }


def check_hecke(P: PairOp, a) -> HeckeReport:
    """Residual of (P - 1)(P + a)."""
    a = _value(a)
    _check_a(a)
    one = identity_op(P.n)
    residual = compose(P - one, P + one.scale(a))
    return HeckeReport(residual.is_zero(), residual)


def braid_residual(P: PairOp) -> TripleOp:
    p12 = lift_to_triple(P, "12")
    p23 = lift_to_triple(P, "23")
    return compose(compose(p12, p23), p12) - compose(compose(p23, p12), p23)


def check_braid(A: PairOp, form: str = "braid") -> BraidReport:
    """P12 P23 P12 = P23 P12 P23, or R12 R13 R23 = R23 R13 R12 for ``form='qybe'``."""
    if form == "braid":
        residual = braid_residual(A)
    elif form == "qybe":
        r12 = lift_to_triple(A, "12")
        r13 = lift_to_triple(A, "13")
        r23 = lift_to_triple(A, "23")
        residual = compose(compose(r12, r13), r23) - compose(compose(r23, r13), r12)
    else:
        raise ParamError(f"unknown braid form {form!r}")
    logger.debug("braid check (%s) on n=%d: %d residual entries", form, A.n, len(residual))
    return BraidReport(residual.is_zero(), residual, form)


def check_theorem2(P: PairOp, a) -> Theorem2Report:
    """braid(P12 - 1) and braid(P12 + a); both vanish iff braid holds when a != -1."""
    a = _value(a)
    _check_a(a)
    braid = braid_residual(P)
    one = identity_op(P.n)
    first = compose(braid, lift_to_triple(P - one, "12"))
    second = compose(braid, lift_to_triple(P + one.scale(a), "12"))
    return Theorem2Report(first.is_zero() and second.is_zero(), first, second)


def convert_P_R(A: PairOp, direction: str = "p_to_r") -> PairOp:
    """Swap the output legs: out[(i,j),(l,k)] = in[(i,j),(k,l)]; an involution."""
    if direction not in ("p_to_r", "r_to_p"):
        raise ParamError(f"unknown direction {direction!r}")
    return PairOp(A.n, {(inp, (l, k)): v for (inp, (k, l)), v in A.entries.items()})


def check_sl_condition(params: ParamSet) -> SlReport:
    """Squared form (prod_i q^{ij})^2 a^{2j} = a^{N+1}, one ratio per j."""
    n = params.n
    target = params.a ** (n + 1)
    ratios = {}
    for j in range(1, n + 1):
        prod = CycScalar(1)
        for i in range(1, n + 1):
            prod = prod * params.qv(i, j)
        ratios[j] = prod * prod * params.a ** (2 * j) / target
    return SlReport(all(r == 1 for r in ratios.values()), ratios)


def r_params(params: ParamSet) -> dict[tuple[int, int], object]:
    """Anti-plane parameters r^{ij} = a q^{ij} for i < j."""
    return {(i, j): params.r(i, j) for i, j in params.pairs()}
