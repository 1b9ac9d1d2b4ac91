"""
Classical limits: expand R(h) around a = 1, q = 1 with jets and read off the
classical r-matrix, build r0 and the elementary shift delta r directly, and
check the Belavin-Drinfeld and classical Yang-Baxter conditions.

Frames: ``r_from_R_jet`` returns r in the frame produced by converting P to
R.  ``flip_transpose`` of that operator is the matrix-unit frame used by
``build_r0`` and ``build_delta_r``.
"""
import logging
from dataclasses import dataclass, field

from app.deformations import DeformationSpec, build_P1, check_constraints
from app.errors import ConstraintError, ConventionError, FormatError, ParamError, ScalarError, SpecError
from app.scalars import CycScalar, Jet, jet_coefficient, scalar_from_json, scalar_to_json
from app.standard_p import ParamSet, build_standard_P, convert_P_R
from app.tensorspace import PairOp, commutator, flip_conjugate, flip_transpose, lift_to_triple

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClassicalParams:
    """First-order data a = 1 + h, q^{ij} = 1 + h p^{ij} and a rational amplitude epsilon."""

    n: int
    p: dict = field(default_factory=dict)
    epsilon: object = 0

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 2:
            raise ParamError(f"dimension must be at least 2, got {self.n!r}")
        p = {}
        for (i, j), value in self.p.items():
            if not 1 <= i < j <= self.n:
                raise ParamError(f"p index ({i},{j}) must satisfy 1 <= i < j <= {self.n}")
            p[(i, j)] = CycScalar.coerce(value)
        for i in range(1, self.n + 1):
            for j in range(i + 1, self.n + 1):
                p.setdefault((i, j), CycScalar(0))
        object.__setattr__(self, "p", dict(sorted(p.items())))
        object.__setattr__(self, "epsilon", CycScalar.coerce(self.epsilon))

    def pv(self, i: int, j: int) -> CycScalar:
        """Antisymmetric extension: p^{ii} = 0, p^{ji} = -p^{ij}."""
        if i == j:
            return CycScalar(0)
        if i < j:
            return self.p[(i, j)]
        return -self.p[(j, i)]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "p": [{"i": i, "j": j, "val": scalar_to_json(v)} for (i, j), v in self.p.items()],
            "epsilon": scalar_to_json(self.epsilon),
        }

    @classmethod
    def from_json(cls, obj, path: str | None = None) -> "ClassicalParams":
        if not isinstance(obj, dict) or "n" not in obj:
            raise FormatError("classical parameter file needs 'n'", path)
        p = {}
        for pos, entry in enumerate(obj.get("p", [])):
            pointer = f"/p/{pos}"
            try:
                key = (int(entry["i"]), int(entry["j"]))
                value = scalar_from_json(entry["val"])
            except (KeyError, TypeError, ValueError) as exc:
                raise FormatError(f"p entry needs i, j, val: {exc}", path, pointer)
            except ScalarError as exc:
                raise FormatError(str(exc), path, pointer + "/val")
            if not value.is_rational():
                raise FormatError("p values must be rational", path, pointer + "/val")
            p[key] = value
        try:
            epsilon = scalar_from_json(obj.get("epsilon", 0))
        except ScalarError as exc:
            raise FormatError(str(exc), path, "/epsilon")
        if not epsilon.is_rational():
            raise FormatError("epsilon must be rational", path, "/epsilon")
        try:
            return cls(obj["n"], p, epsilon)
        except ParamError as exc:
            raise FormatError(str(exc), path)


def jet_params(cp: ClassicalParams) -> ParamSet:
    """The jet-valued ParamSet a = 1 + h, q^{ij} = 1 + h p^{ij}."""
    return ParamSet(cp.n, Jet(1, 1), {pair: Jet(1, value) for pair, value in cp.p.items()})


def _require_principal(spec: DeformationSpec) -> None:
    if not spec.is_principal:
        raise SpecError("exceptional deformations live at a^3 = 1 and have no expansion around a = 1")


@dataclass
class LinearReport:
    passed: bool
    residuals: dict[int, CycScalar]

    @property
    def failed(self) -> list[int]:
        return [m for m, value in self.residuals.items() if value]

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "per_m": [
                {"m": m, "pass": not value, "residual": scalar_to_json(value)}
                for m, value in self.residuals.items()
            ],
        }


def linearized_constraints(cp: ClassicalParams, spec: DeformationSpec) -> LinearReport:
    """Order-h part of the constraint ratios on the jet family."""
    _require_principal(spec)
    report = check_constraints(jet_params(cp), spec)
    residuals = {m: jet_coefficient(ratio, 1) for m, ratio in report.ratios.items()}
    return LinearReport(not any(residuals.values()), residuals)


def r_from_R_jet(cp: ClassicalParams, spec: DeformationSpec | None = None) -> PairOp:
    """r with R = 1 - h r + O(h^2), R the converted P (+ epsilon h P1)."""
    params = jet_params(cp)
    P = build_standard_P(params)
    if spec is not None and cp.epsilon:
        _require_principal(spec)
        linear = linearized_constraints(cp, spec)
        if not linear.passed:
            raise ConstraintError(f"constraints fail at order h for m in {linear.failed}")
        P = P + build_P1(params, spec.with_amplitude(Jet(0, cp.epsilon)))
    R = convert_P_R(P)
    n = cp.n
    for (inp, out), value in R.entries.items():
        expected = 1 if inp == out else 0
        if jet_coefficient(value, 0) != expected:
            raise ConventionError(f"R at h^0 is not the identity at {inp} -> {out}")
    for idx in ((i, j) for i in range(1, n + 1) for j in range(1, n + 1)):
        if (idx, idx) not in R.entries:
            raise ConventionError(f"R at h^0 misses the identity entry at {idx}")
    r = PairOp(n, {key: -jet_coefficient(value, 1) for key, value in R.entries.items()})
    logger.debug("extracted r for n=%d with %d entries", n, len(r))
    return r


def build_r0(cp: ClassicalParams) -> PairOp:
    """Off-diagonal [in (i,j), out (j,i)] = 1 and diagonal p^{ij}, -(1 + p^{ij}) for i < j."""
    entries = {}
    for (i, j), p in cp.p.items():
        entries[((i, j), (j, i))] = 1
        entries[((j, i), (j, i))] = p
        entries[((i, j), (i, j))] = -(1 + p)
    return PairOp(cp.n, entries)


def build_delta_r(spec: DeformationSpec, n: int | None = None) -> PairOp:
    """[in (i,j), out (k,l)] = 1 and [in (j,i), out (l,k)] = -1."""
    _require_principal(spec)
    k, i, j, l = spec.quadruple()
    n = n or max(spec.quadruple())
    spec.validate(n)
    return PairOp(n, {((i, j), (k, l)): 1, ((j, i), (l, k)): -1})


def check_bd(cp: ClassicalParams, spec: DeformationSpec) -> LinearReport:
    """p^{lm} + p^{km} + p^{mi} + p^{mj} = delta_m^j - delta_m^i (signs flipped in case 2)."""
    _require_principal(spec)
    spec.validate(cp.n)
    k, i, j, l = spec.quadruple()
    sign = 1 if spec.case == 1 else -1
    residuals = {}
    for m in range(1, cp.n + 1):
        lhs = cp.pv(l, m) + cp.pv(k, m) + cp.pv(m, i) + cp.pv(m, j)
        residuals[m] = lhs - sign * ((m == j) - (m == i))
    return LinearReport(not any(residuals.values()), residuals)


@dataclass
class CybeReport:
    passed: bool
    residual: object

    def to_dict(self) -> dict:
        return {"pass": self.passed, "residual_entries": self.residual.to_json()["entries"]}


def check_cybe(r: PairOp) -> CybeReport:
    """[r12, r13] + [r12, r23] + [r13, r23] = 0."""
    r12 = lift_to_triple(r, "12")
    r13 = lift_to_triple(r, "13")
    r23 = lift_to_triple(r, "23")
    residual = commutator(r12, r13) + commutator(r12, r23) + commutator(r13, r23)
    return CybeReport(residual.is_zero(), residual)


@dataclass(frozen=True)
class FlipComparison:
    verdict: str
    frame: str | None = None

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "frame": self.frame}


def compare_up_to_flip(r1: PairOp, r2: PairOp) -> FlipComparison:
    """equal, equal_after_flip (frame ``conjugate`` or ``transpose``) or different."""
    r1._check(r2)
    if r1 == r2:
        return FlipComparison("equal")
    if flip_conjugate(r1) == r2:
        return FlipComparison("equal_after_flip", "conjugate")
    if flip_transpose(r1) == r2:
        return FlipComparison("equal_after_flip", "transpose")
    return FlipComparison("different")
