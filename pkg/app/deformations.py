"""
Elementary deformations of the standard P, their parameter constraints, the
trivial deformation subspace, gauge fixing and the exact first-order solver
used as an oracle for small N.

Index placement: for an elementary deformation the pair carried as the
"upper" matrix-unit index is the *output* pair of the input-major operator (``transposed``).
``calibrate_placement`` re-derives this from reference families.
"""
import logging
from collections import Counter
from dataclasses import dataclass, field, replace
from functools import lru_cache
from itertools import product

from sympy import Matrix

from app.errors import FormatError, GaugeError, ParamError, ScalarError, ScaleError, SpecError
from app.lattice import (
    coordinate_parametrization,
    integer_kernel,
    integer_solution,
    modular_solution,
    torsion_factors,
)
from app.linalg import RowEchelon, nullspace, rank, solve
from app.scalars import CycScalar, Jet, Monomial, omega, rational, scalar_from_json, scalar_to_json
from app.standard_p import ParamSet, build_standard_P
from app.tensorspace import PairOp, TripleOp, compose, identity_op, lift_to_triple, sum_ops

logger = logging.getLogger(__name__)

ORACLE_MAX_N = 4
PLACEMENT = "transposed"
PLACEMENTS = ("transposed", "direct")


@dataclass(frozen=True)
class DeformationSpec:
    """An elementary deformation.

    Principal: ``case`` 1 has (k, l) = (i-1, j+1) with i <= j; ``case`` 2 has
    (k, l) = (i+1, j-1) with k <= l.  Exceptional: j = i+1 and k is i-1 or
    j+1; ``side`` upper puts the pair (i, j) on the output.
    """

    variant: str
    i: int
    j: int | None = None
    case: int | None = None
    side: str | None = None
    k: int | None = None
    amplitude: object = field(default_factory=lambda: CycScalar(1))

    def __post_init__(self):
        if not isinstance(self.amplitude, Jet):
            object.__setattr__(self, "amplitude", CycScalar.coerce(self.amplitude))
        if not self.amplitude:
            raise SpecError("amplitude must be nonzero")
        if self.variant == "principal":
            if self.case not in (1, 2) or self.j is None:
                raise SpecError(f"principal spec needs case 1 or 2 and j, got case={self.case}")
            k, i, j, l = self.quadruple()
            if self.case == 1 and not i <= j:
                raise SpecError(f"case 1 needs i <= j, got i={i}, j={j}")
            if self.case == 2 and not k <= l:
                raise SpecError(f"case 2 needs i+1 <= j-1, got i={i}, j={j}")
        elif self.variant == "exceptional":
            if self.side not in ("upper", "lower") or self.k is None:
                raise SpecError(f"exceptional spec needs side upper/lower and k, got {self.side}")
            object.__setattr__(self, "j", self.i + 1)
            if self.k not in (self.i - 1, self.i + 2):
                raise SpecError(f"exceptional k must be i-1 or i+2, got k={self.k}, i={self.i}")
        else:
            raise SpecError(f"unknown variant {self.variant!r}")

    @classmethod
    def principal(cls, case: int, i: int, j: int, amplitude=1) -> "DeformationSpec":
        return cls("principal", i, j, case=case, amplitude=amplitude)

    @classmethod
    def exceptional(cls, side: str, i: int, k: int, amplitude=1) -> "DeformationSpec":
        return cls("exceptional", i, i + 1, side=side, k=k, amplitude=amplitude)

    @property
    def is_principal(self) -> bool:
        return self.variant == "principal"

    def quadruple(self) -> tuple[int, int, int, int]:
        """(k, i, j, l) of a principal spec."""
        if self.case == 1:
            return self.i - 1, self.i, self.j, self.j + 1
        return self.i + 1, self.i, self.j, self.j - 1

    def indices(self) -> tuple[int, ...]:
        if self.is_principal:
            return self.quadruple()
        return self.i, self.j, self.k

    def validate(self, n: int) -> None:
        bad = [x for x in self.indices() if not 1 <= x <= n]
        if bad:
            raise SpecError(f"spec indices {self.indices()} out of range 1..{n}")

    def pairs(self) -> tuple[tuple[int, int], tuple[int, int]]:
        """(output-side pair, input-side pair) in the transposed reading."""
        if self.is_principal:
            k, i, j, l = self.quadruple()
            return (i, j), (k, l)
        if self.side == "upper":
            return (self.i, self.j), (self.k, self.k)
        return (self.k, self.k), (self.i, self.j)

    def with_amplitude(self, amplitude) -> "DeformationSpec":
        return replace(self, amplitude=amplitude)

    def to_json(self) -> dict:
        if self.is_principal:
            return {"variant": "principal", "case": self.case, "i": self.i, "j": self.j,
                    "amplitude": scalar_to_json(self.amplitude)}
        return {"variant": "exceptional", "side": self.side, "i": self.i, "k": self.k,
                "amplitude": scalar_to_json(self.amplitude)}

    def label(self) -> str:
        if self.is_principal:
            return f"principal case {self.case} (k,i,j,l)={self.quadruple()}"
        return f"exceptional {self.side} (i,j,k)={self.indices()}"

    @classmethod
    def from_json(cls, obj, path: str | None = None) -> "DeformationSpec":
        if not isinstance(obj, dict) or "variant" not in obj:
            raise FormatError("deformation spec needs 'variant'", path)
        try:
            amplitude = scalar_from_json(obj.get("amplitude", 1))
        except ScalarError as exc:
            raise FormatError(str(exc), path, "/amplitude")
        try:
            if obj["variant"] == "principal":
                return cls.principal(obj["case"], obj["i"], obj["j"], amplitude)
            if obj["variant"] == "exceptional":
                return cls.exceptional(obj["side"], obj["i"], obj["k"], amplitude)
        except KeyError as exc:
            raise FormatError(f"missing field {exc}", path)
        raise FormatError(f"unknown variant {obj['variant']!r}", path, "/variant")


def enumerate_specs(n: int) -> list[DeformationSpec]:
    """Every valid elementary deformation for dimension n (unit amplitude)."""
    specs = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            for case in (1, 2):
                try:
                    spec = DeformationSpec.principal(case, i, j)
                    spec.validate(n)
                except SpecError:
                    continue
                specs.append(spec)
    for i in range(1, n):
        for k in (i - 1, i + 2):
            if 1 <= k <= n:
                for side in ("upper", "lower"):
                    specs.append(DeformationSpec.exceptional(side, i, k))
    return specs


def _check_a_preconditions(params: ParamSet, spec: DeformationSpec) -> None:
    a = params.a
    if a * a == 1:
        raise ParamError(f"elementary deformations need a^2 != 1, got a = {a}")
    if not spec.is_principal and a * a * a != 1:
        raise ParamError(f"exceptional deformations need a^3 = 1, got a = {a}")


def _two_slot(params: ParamSet, in_pair, out_pair, mu) -> PairOp:
    """Hecke-compatible two-entry operator from input pair {x<=y} to output pair {u<=v}."""
    x, y = sorted(in_pair)
    u, v = sorted(out_pair)
    ratio = -params.qv(x, y) * params.qv(u, v)
    if u < v:
        ratio = ratio * params.a
    return PairOp(params.n, {((x, y), (v, u)): mu, ((y, x), (u, v)): ratio * mu})


def _build(params: ParamSet, spec: DeformationSpec, placement: str) -> PairOp:
    upper, lower = spec.pairs()
    if placement == "transposed":
        return _two_slot(params, lower, upper, spec.amplitude)
    if placement == "direct":
        return _two_slot(params, upper, lower, spec.amplitude)
    raise SpecError(f"unknown placement {placement!r}")


def build_P1(params: ParamSet, spec: DeformationSpec, placement: str | None = None) -> PairOp:
    """Two-entry elementary deformation P1 of the standard P."""
    spec.validate(params.n)
    _check_a_preconditions(params, spec)
    return _build(params, spec, placement or PLACEMENT)


def combine(ops: list[PairOp]) -> PairOp:
    """Entry-wise sum; exactness of the sum is only known after check_braid."""
    if not ops:
        raise SpecError("nothing to combine")
    return sum_ops(ops, ops[0].n)


# -- constraints -------------------------------------------------------------

def constraint_rows(n: int, spec: DeformationSpec) -> list[tuple[list[tuple[int, int, int]], int]]:
    """Per m: (factors (s, t, power) of prod (q^{st})^power, exponent of a on the right)."""
    spec.validate(n)
    rows = []
    for m in range(1, n + 1):
        if spec.is_principal:
            k, i, j, l = spec.quadruple()
            x = (m == i) - (m == j)
            factors = [(i, m, 1), (j, m, 1), (m, k, 1), (m, l, 1)]
            rows.append((factors, x if spec.case == 1 else -x))
        else:
            i, j, k = spec.i, spec.j, spec.k
            factors = [(k, m, 2), (m, j, 1), (m, i, 1)]
            if spec.side == "upper":
                rhs = (m == i) - (m == j)
            elif k == i - 1:
                rhs = (m == k) - (m == i)
            else:
                # mirror image of k = i-1 under m -> n+1-m
                rhs = (m == j) - (m == k)
            rows.append((factors, rhs))
    return rows


def quadruple_invariants(params: ParamSet, spec: DeformationSpec) -> dict[str, object]:
    k, i, j, l = spec.quadruple()
    q = params.qv
    return {
        "x": q(i, j) * q(j, k) * q(j, l),
        "y": q(i, j) * q(k, i) * q(l, i),
        "u": q(k, l) * q(l, j) * q(l, i),
        "v": q(k, l) * q(i, k) * q(j, k),
    }


@dataclass
class ConstraintReport:
    passed: bool
    ratios: dict[int, object]
    invariants: dict[str, object] | None = None
    expected_invariants: dict[str, object] | None = None

    @property
    def failed(self) -> list[int]:
        return [m for m, r in self.ratios.items() if r != 1]

    @property
    def invariants_match(self) -> bool | None:
        if self.invariants is None:
            return None
        return self.invariants == self.expected_invariants

    def to_dict(self) -> dict:
        doc = {
            "pass": self.passed,
            "per_m": [{"m": m, "pass": r == 1, "ratio": scalar_to_json(r)} for m, r in self.ratios.items()],
        }
        if self.invariants is not None:
            doc["invariants"] = {k: scalar_to_json(v) for k, v in self.invariants.items()}
            doc["invariants_match"] = self.invariants_match
        return doc


def check_constraints(params: ParamSet, spec: DeformationSpec) -> ConstraintReport:
    """Evaluate the multiplicative constraints of ``spec`` for every m."""
    ratios = {}
    for m, (factors, a_exp) in enumerate(constraint_rows(params.n, spec), start=1):
        lhs = CycScalar(1)
        for s, t, power in factors:
            lhs = lhs * params.qv(s, t) ** power
        ratios[m] = lhs / params.a ** a_exp
    report = ConstraintReport(all(r == 1 for r in ratios.values()), ratios)
    if params.n == 4 and spec.is_principal and len(set(spec.quadruple())) == 4:
        report.invariants = quadruple_invariants(params, spec)
        a = params.a
        one = CycScalar(1)
        x = 1 / a if spec.case == 1 else a
        report.expected_invariants = {"x": x, "y": x, "u": one, "v": one}
    return report


@dataclass
class ParamFamily:
    """Multiplicative parametrization of a constraint solution set."""

    n: int
    free_symbols: list[str]
    assignment: dict[tuple[int, int], Monomial]
    a_constraint: str = "none"
    notes: list[str] = field(default_factory=list)

    @property
    def a_mod3(self) -> bool:
        return self.a_constraint == "cube_root_of_unity"

    def to_json(self) -> dict:
        return {
            "free": list(self.free_symbols),
            "assign": [
                {"i": i, "j": j, "mono": mono.to_json()} for (i, j), mono in self.assignment.items()
            ],
            "a_mod3": self.a_mod3,
            "notes": list(self.notes),
        }

    def describe(self) -> str:
        lines = [f"free: {', '.join(self.free_symbols)}"]
        if self.a_mod3:
            lines.append("a: primitive cube root of unity")
        lines += [f"q{i}{j} = {mono}" for (i, j), mono in self.assignment.items()]
        lines += [f"note: {note}" for note in self.notes]
        return "\n".join(lines)


def _pairs(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def solve_constraints(n: int, spec: DeformationSpec) -> ParamFamily:
    """Solve the constraints of ``spec`` on the exponent lattice.

    q^{ij} = a^{e_0} u1^{e_1} ...; the a-exponents are integers for the
    principal series and live in Z/3 for the exceptional one.
    """
    rows = constraint_rows(n, spec)
    pairs = _pairs(n)
    column = {pair: pos for pos, pair in enumerate(pairs)}
    matrix = Matrix.zeros(len(rows), len(pairs))
    rhs = []
    for r, (factors, a_exp) in enumerate(rows):
        for s, t, power in factors:
            if s < t:
                matrix[r, column[(s, t)]] += power
            elif s > t:
                matrix[r, column[(t, s)]] -= power
        rhs.append(a_exp)
    kernel = integer_kernel(matrix)
    torsion = torsion_factors(matrix)
    if torsion:
        logger.warning("constraints of %s have torsion %s; root-of-unity components dropped", spec.label(), torsion)
    if spec.is_principal:
        offset = integer_solution(matrix, rhs)
    else:
        offset = modular_solution(matrix, rhs, 3)
    kernel, offset, selected = coordinate_parametrization(kernel, offset)
    order = [selected[c] for c in sorted(selected)]
    order += [g for g in range(kernel.shape[1]) if g not in order]
    names = {g: f"u{pos}" for pos, g in enumerate(order, start=1)}
    a_mod3 = not spec.is_principal
    assignment = {}
    for pos, pair in enumerate(pairs):
        exps = {"a": int(offset[pos])}
        for g, name in names.items():
            exps[name] = int(kernel[pos, g])
        assignment[pair] = Monomial(exps, a_mod3)
    notes = ["a^2 != 1"]
    if a_mod3:
        notes = ["a^3 = 1 and a != 1"]
    for coord in sorted(selected):
        i, j = pairs[coord]
        notes.append(f"{names[selected[coord]]} = q{i}{j}")
    logger.info("solved constraints of %s: %d free generators", spec.label(), len(names))
    return ParamFamily(
        n,
        ["a"] + [names[g] for g in order],
        assignment,
        "cube_root_of_unity" if a_mod3 else "none",
        notes,
    )


def instantiate(family: ParamFamily, values: dict[str, object]) -> ParamSet:
    """Substitute nonzero values for the free symbols (a defaults to w when constrained)."""
    values = dict(values)
    if family.a_mod3:
        values.setdefault("a", omega())
    for symbol in family.free_symbols:
        if symbol not in values:
            raise ParamError(f"no value for free symbol {symbol}")
        if not values[symbol]:
            raise ParamError(f"free symbol {symbol} must be nonzero")
    q = {pair: mono.evaluate(values) for pair, mono in family.assignment.items()}
    return ParamSet(family.n, values["a"], q)


# -- trivial deformations and the first-order system -------------------------

def trivial_basis(params: ParamSet) -> list[PairOp]:
    """PZ - ZP for Z = A(x)1 + 1(x)A over elementary A, plus dP/dq^{ij}."""
    n = params.n
    P = build_standard_P(params)
    basis = []
    for s in range(1, n + 1):
        for t in range(1, n + 1):
            entries = {}
            for j in range(1, n + 1):
                key = ((s, j), (t, j))
                entries[key] = entries.get(key, 0) + 1
                key = ((j, s), (j, t))
                entries[key] = entries.get(key, 0) + 1
            z = PairOp(n, entries)
            basis.append(compose(P, z) - compose(z, P))
    for i, j in _pairs(n):
        q = params.qv(i, j)
        basis.append(PairOp(n, {((i, j), (j, i)): -1 / (q * q), ((j, i), (i, j)): params.a}))
    return basis


def signature(key) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Multiset differences (in - out, out - in) of an operator slot."""
    inp, out = Counter(key[0]), Counter(key[1])
    return tuple(sorted((inp - out).elements())), tuple(sorted((out - inp).elements()))


class BraidLinearization:
    """Order-e and order-e^2 parts of braid(P + e X), block-diagonal by slot signature.

    Given ``a``, the linearized Hecke residual of X joins the braid rows; both
    preserve the index multiset, so the signature blocks are shared.
    """

    def __init__(self, P: PairOp, a=None):
        self.P = P
        self.n = P.n
        self.a = a
        self.p12 = lift_to_triple(P, "12")
        self.p23 = lift_to_triple(P, "23")
        self.p12p23 = compose(self.p12, self.p23)
        self.p23p12 = compose(self.p23, self.p12)
        self._columns: dict | None = None
        self._hecke_columns: dict | None = None

    def apply(self, X: PairOp) -> TripleOp:
        x12 = lift_to_triple(X, "12")
        x23 = lift_to_triple(X, "23")
        lhs = compose(x12, self.p23p12) + compose(compose(self.p12, x23), self.p12) + compose(self.p12p23, x12)
        rhs = compose(x23, self.p12p23) + compose(compose(self.p23, x12), self.p23) + compose(self.p23p12, x23)
        return lhs - rhs

    def quadratic(self, X: PairOp) -> TripleOp:
        x12 = lift_to_triple(X, "12")
        x23 = lift_to_triple(X, "23")
        lhs = (
            compose(compose(x12, x23), self.p12)
            + compose(compose(x12, self.p23), x12)
            + compose(compose(self.p12, x23), x12)
        )
        rhs = (
            compose(compose(x23, x12), self.p23)
            + compose(compose(x23, self.p12), x23)
            + compose(compose(self.p23, x12), x23)
        )
        return lhs - rhs

    def slots(self) -> list:
        rng = range(1, self.n + 1)
        return [((i, j), (k, l)) for i, j, k, l in product(rng, repeat=4)]

    def blocks(self) -> dict:
        blocks: dict = {}
        for slot in self.slots():
            blocks.setdefault(signature(slot), []).append(slot)
        return blocks

    def columns(self) -> dict:
        if self._columns is None:
            self._columns = {
                slot: self.apply(PairOp(self.n, {slot: 1})) for slot in self.slots()
            }
            logger.debug("linearized braid: %d unknown slots", len(self._columns))
        return self._columns

    def hecke_columns(self) -> dict:
        if self.a is None:
            raise ParamError("Hecke rows need the parameter a")
        if self._hecke_columns is None:
            self._hecke_columns = {
                slot: hecke_residual(self.P, PairOp(self.n, {slot: 1}), self.a) for slot in self.slots()
            }
        return self._hecke_columns

    def block_rows(self, slots: list, hecke: bool = False) -> dict:
        """Rows keyed ("braid", key) and, with ``hecke``, ("hecke", key)."""
        sources = [("braid", self.columns())]
        if hecke:
            sources.append(("hecke", self.hecke_columns()))
        rows: dict = {}
        for tag, columns in sources:
            for col, slot in enumerate(slots):
                for row_key, value in columns[slot].entries.items():
                    rows.setdefault((tag, row_key), {})[col] = value
        return rows


def linearized_braid_operator(P: PairOp, a=None) -> BraidLinearization:
    return BraidLinearization(P, a)


def hecke_residual(P: PairOp, P1: PairOp, a) -> PairOp:
    one = identity_op(P.n)
    return compose(P1, P + one.scale(a)) + compose(P - one, P1)


def first_order_residuals(P: PairOp, P1: PairOp, a) -> tuple[TripleOp, PairOp]:
    """Order-e braid residual and linearized Hecke residual P1(P + a) + (P - 1)P1."""
    return BraidLinearization(P).apply(P1), hecke_residual(P, P1, a)


def normalization_directions(params: ParamSet) -> list[PairOp]:
    """Braid-preserving variations that move the Hecke eigenvalues: P, dP/da, and 1 at a = 1."""
    n = params.n
    dP_da = {}
    for i, j in _pairs(n):
        dP_da[((j, i), (i, j))] = params.qv(i, j)
        dP_da[((i, j), (i, j))] = -1
    directions = [build_standard_P(params), PairOp(n, dP_da)]
    if params.a == 1:
        directions.append(identity_op(n))
    return directions


@dataclass
class FirstOrderBasis:
    """Braid solutions, the Hecke-compatible ones, and their split into trivial and essential."""

    basis: list[PairOp]
    trivial_dim: int
    essential_dim: int
    trivial_span_dim: int = 0
    hecke_free: bool = True
    essential: list[PairOp] = field(default_factory=list)
    essential_signatures: list = field(default_factory=list)
    hecke_basis: list[PairOp] = field(default_factory=list)

    @property
    def solution_dim(self) -> int:
        return len(self.basis)

    @property
    def hecke_solution_dim(self) -> int:
        return len(self.hecke_basis)

    def to_dict(self) -> dict:
        return {
            "solution_dim": self.solution_dim,
            "hecke_solution_dim": self.hecke_solution_dim,
            "trivial_dim": self.trivial_dim,
            "trivial_span_dim": self.trivial_span_dim,
            "essential_dim": self.essential_dim,
            "hecke_free": self.hecke_free,
            "essential_signatures": [[list(a), list(b)] for a, b in self.essential_signatures],
            "essential_directions": [op.to_json() for op in self.essential],
        }


def _slot_index(n: int):
    rng = range(1, n + 1)
    return {((i, j), (k, l)): pos for pos, (i, j, k, l) in enumerate(product(rng, repeat=4))}


def _encode(op: PairOp, index) -> dict[int, object]:
    return {index[key]: value for key, value in op.entries.items()}


def solve_first_order(params: ParamSet) -> FirstOrderBasis:
    """All first-order deformations of the standard P by exact elimination.

    ``basis`` spans the braid solutions.  Essential directions are counted in
    the Hecke-compatible subspace (a held fixed) modulo trivial deformations;
    ``hecke_free`` records whether every braid solution is Hecke-compatible up
    to the normalization directions.
    """
    if params.n > ORACLE_MAX_N:
        raise ScaleError(f"first-order solver supports n <= {ORACLE_MAX_N}, got {params.n}")
    P = build_standard_P(params)
    system = BraidLinearization(P, params.a)
    solutions = []
    hecke_solutions = []
    for sig, slots in sorted(system.blocks().items()):
        for vector in nullspace(system.block_rows(slots).values(), range(len(slots))):
            solutions.append(PairOp(params.n, {slots[c]: v for c, v in vector.items()}))
        for vector in nullspace(system.block_rows(slots, hecke=True).values(), range(len(slots))):
            hecke_solutions.append(PairOp(params.n, {slots[c]: v for c, v in vector.items()}))
    index = _slot_index(params.n)
    trivial = [_encode(t, index) for t in trivial_basis(params)]
    trivial_span = rank(trivial)
    echelon = RowEchelon()
    echelon.extend(trivial)
    essential = [op for op in hecke_solutions if echelon.add(_encode(op, index))]
    intersection = len(hecke_solutions) + trivial_span - echelon.rank
    residues = RowEchelon()
    residues.extend(_encode(hecke_residual(P, d, params.a), index) for d in normalization_directions(params))
    hecke_free = all(residues.contains(_encode(hecke_residual(P, s, params.a), index)) for s in solutions)
    sigs = sorted({signature(next(iter(op.entries))) for op in essential})
    logger.info(
        "first-order solve n=%d: %d braid solutions, %d Hecke-compatible, %d trivial, %d essential",
        params.n, len(solutions), len(hecke_solutions), intersection, len(essential),
    )
    return FirstOrderBasis(
        solutions, intersection, len(essential), trivial_span, hecke_free, essential, sigs, hecke_solutions
    )


def essential_dimension(params: ParamSet) -> int:
    return solve_first_order(params).essential_dim


def essential_directions(params: ParamSet) -> list[PairOp]:
    return solve_first_order(params).essential


def essential_signatures(params: ParamSet) -> list:
    """Slot signatures (in - out, out - in) carrying essential directions."""
    return solve_first_order(params).essential_signatures


def _low_slots(n: int) -> list:
    rng = range(1, n + 1)
    return [
        ((i, j), (k, l))
        for i, j, k, l in product(rng, repeat=4)
        if len({i, j, k, l}) <= 2
    ]


def gauge_fix(params: ParamSet, P1: PairOp) -> PairOp:
    """Unique representative of P1 modulo trivial deformations with no entries on <= 2 indices."""
    if params.a == 1:
        raise GaugeError("gauge fixing needs a != 1")
    P = build_standard_P(params)
    if not BraidLinearization(P).apply(P1).is_zero():
        raise GaugeError("input has a nonzero linearized braid residual")
    trivial = trivial_basis(params)
    slots = _low_slots(params.n)
    rows = [{t: op.get(*slot) for t, op in enumerate(trivial) if op.get(*slot)} for slot in slots]
    rhs = [P1.get(*slot) for slot in slots]
    coeffs = solve(rows, rhs, range(len(trivial)))
    if coeffs is None:
        raise GaugeError("no trivial deformation matches the low-index entries")
    fixed = P1
    for t, c in coeffs.items():
        fixed = fixed - trivial[t].scale(c)
    leftover = [slot for slot in slots if fixed.get(*slot)]
    if leftover:
        raise GaugeError(f"low-index entries remain after gauge fixing: {leftover[:3]}")
    return fixed


@dataclass
class ObstructionReport:
    solvable: bool
    P2: PairOp | None
    failed_signatures: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "pass": self.solvable,
            "solvable": self.solvable,
            "P2": self.P2.to_json() if self.P2 is not None else None,
            "failed_signatures": [[list(a), list(b)] for a, b in self.failed_signatures],
        }


def second_order_obstruction(params: ParamSet, P1: PairOp) -> ObstructionReport:
    """Solve the order-e^2 braid and Hecke equations for P2 given a first-order P1.

    Braid: L(P2) = -Q(P1).  Hecke with a fixed: P2(P + a) + (P - 1)P2 = -P1 P1.
    """
    if params.n > ORACLE_MAX_N:
        raise ScaleError(f"second-order solver supports n <= {ORACLE_MAX_N}, got {params.n}")
    P = build_standard_P(params)
    system = BraidLinearization(P, params.a)
    if not system.apply(P1).is_zero():
        raise SpecError("P1 has a nonzero linearized braid residual")
    if not hecke_residual(P, P1, params.a).is_zero():
        raise SpecError("P1 has a nonzero linearized Hecke residual")
    target = {("braid", key): -value for key, value in system.quadratic(P1).entries.items()}
    target.update({("hecke", key): -value for key, value in compose(P1, P1).entries.items()})
    if not target:
        return ObstructionReport(True, PairOp(params.n))
    blocks = system.blocks()
    by_sig: dict = {}
    for key, value in target.items():
        by_sig.setdefault(signature(key[1]), {})[key] = value
    P2_entries = {}
    failed = []
    for sig, wanted in sorted(by_sig.items()):
        slots = blocks.get(sig, [])
        rows = system.block_rows(slots, hecke=True) if slots else {}
        keys = sorted(set(rows) | set(wanted))
        solution = solve([rows.get(k, {}) for k in keys], [wanted.get(k, 0) for k in keys], range(len(slots)))
        if solution is None:
            failed.append(sig)
            continue
        for col, value in solution.items():
            P2_entries[slots[col]] = value
    if failed:
        logger.info("second-order obstruction in %d blocks", len(failed))
        return ObstructionReport(False, None, failed)
    return ObstructionReport(True, PairOp(params.n, P2_entries))


# -- placement calibration ---------------------------------------------------

def reference_family(series: str) -> tuple[ParamSet, DeformationSpec]:
    if series == "principal":
        params = ParamSet(4, 2, {
            (1, 2): 3, (1, 3): 5, (2, 3): 7, (1, 4): 15, (2, 4): 42, (3, 4): rational(5, 14),
        })
        return params, DeformationSpec.principal(1, 2, 3)
    if series == "exceptional":
        params = ParamSet(3, omega(), {(2, 3): 2, (1, 3): rational(1, 2), (1, 2): omega() / 4})
        return params, DeformationSpec.exceptional("upper", 1, 3)
    raise SpecError(f"unknown series {series!r}")


@lru_cache(maxsize=None)
def calibrate_placement(series: str = "principal") -> str:
    """Placement whose elementary deformation has zero braid residual on the reference family."""
    params, spec = reference_family(series)
    system = BraidLinearization(build_standard_P(params))
    for placement in PLACEMENTS:
        if system.apply(_build(params, spec, placement)).is_zero():
            logger.debug("placement calibration for %s: %s", series, placement)
            return placement
    raise SpecError(f"no placement satisfies the braid relation for the {series} reference family")
