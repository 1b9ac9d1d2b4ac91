"""
Esoteric quantum gl(2n-1): the one-parameter point with q^{ij} = 1/q off
the anti-diagonal, 1/q^2 on it and a = q^2, deformed by the chain of
coefficients mu_1 .. mu_{n-1}.

Matrix-unit terms M_{s1}^{t1} (x) M_{s2}^{t2} are placed with
``matrix_unit_key(..., "computational")``, i.e. directly in the R frame.
"""
import logging
from dataclasses import dataclass, field
from typing import NamedTuple

from app.errors import FormatError, ParamError, ScalarError, SpecError
from app.relations import (
    Relation,
    antiplane_relations,
    cross_relations,
    normalize,
    plane_relations,
    relation_in_span,
    render_relation,
    same_relation_span,
)
from app.scalars import CycScalar, scalar_from_json, scalar_to_json
from app.standard_p import BraidReport, HeckeReport, ParamSet, build_standard_P, check_braid, check_hecke, convert_P_R
from app.tensorspace import PairOp, matrix_unit_key

logger = logging.getLogger(__name__)

LAMBDA_PLACEMENTS = ("hecke", "printed")


@dataclass(frozen=True)
class EsotericSpec:
    """Esoteric gl(2n-1) data: ``n``, ``q`` and ``mu = (mu_1, ..., mu_{n-1})``."""

    n: int
    q: object
    mu: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 2:
            raise SpecError(f"esoteric n must be at least 2, got {self.n!r}")
        q = CycScalar.coerce(self.q)
        if not q or q ** 4 == 1:
            raise ParamError(f"esoteric q needs q != 0 and q^4 != 1, got {q}")
        mu = tuple(CycScalar.coerce(m) for m in self.mu)
        if len(mu) != self.n - 1:
            raise SpecError(f"expected {self.n - 1} mu values, got {len(mu)}")
        cutoff = next((pos for pos, m in enumerate(mu) if m), len(mu))
        if any(not m for m in mu[cutoff:]):
            raise SpecError(f"zero mu values must form a prefix, got {[str(m) for m in mu]}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "mu", mu)

    @property
    def dimension(self) -> int:
        return 2 * self.n - 1

    @property
    def cutoff(self) -> int:
        """Number of leading zero mu's."""
        return next((pos for pos, m in enumerate(self.mu) if m), len(self.mu))

    def prime(self, i: int) -> int:
        return 2 * self.n - i

    def mu_at(self, i: int) -> CycScalar:
        return self.mu[i - 1]

    def active(self) -> range:
        """Indices i with k < i < n."""
        return range(self.cutoff + 1, self.n)

    def to_json(self) -> dict:
        return {"n": self.n, "q": scalar_to_json(self.q), "mu": [scalar_to_json(m) for m in self.mu]}

    @classmethod
    def from_json(cls, obj, path: str | None = None) -> "EsotericSpec":
        if not isinstance(obj, dict) or "n" not in obj or "q" not in obj:
            raise FormatError("esoteric spec needs 'n' and 'q'", path)
        try:
            q = scalar_from_json(obj["q"])
        except ScalarError as exc:
            raise FormatError(str(exc), path, "/q")
        mu = []
        for pos, value in enumerate(obj.get("mu", [])):
            try:
                mu.append(scalar_from_json(value))
            except ScalarError as exc:
                raise FormatError(str(exc), path, f"/mu/{pos}")
        try:
            return cls(obj["n"], q, tuple(mu))
        except (SpecError, ParamError) as exc:
            raise FormatError(str(exc), path)


class EsotericCoeffs(NamedTuple):
    mu_prime: list
    lam: dict
    lam_prime: dict

    def to_json(self) -> dict:
        return {
            "mu_prime": [scalar_to_json(m) for m in self.mu_prime],
            "lambda": [{"i": i, "j": j, "val": scalar_to_json(v)} for (i, j), v in sorted(self.lam.items())],
            "lambda_prime": [
                {"i": i, "j": j, "val": scalar_to_json(v)} for (i, j), v in sorted(self.lam_prime.items())
            ],
        }


def esoteric_params(spec: EsotericSpec) -> ParamSet:
    """The parameter point: 1/q off the anti-diagonal, 1/q^2 on it, a = q^2."""
    big_n = spec.dimension
    q = spec.q
    values = {}
    for i in range(1, big_n + 1):
        for j in range(i + 1, big_n + 1):
            values[(i, j)] = 1 / (q * q) if i + j == 2 * spec.n else 1 / q
    return ParamSet(big_n, q * q, values)


def esoteric_coeffs(spec: EsotericSpec) -> EsotericCoeffs:
    """mu'_i = -q^{2(i-n)} mu_i; lambda, lambda' for k < i < j < n."""
    n, q = spec.n, spec.q
    q2 = q * q
    mu_prime = [-(q2 ** (i - n)) * spec.mu_at(i) for i in range(1, n)]
    lam, lam_prime = {}, {}
    active = spec.active()
    for i in active:
        for j in active:
            if i < j:
                ratio = spec.mu_at(i) / spec.mu_at(j)
                lam[(i, j)] = (1 - q2) * q2 ** (i - j) * ratio
                lam_prime[(i, j)] = (q2 - 1) * ratio
    return EsotericCoeffs(mu_prime, lam, lam_prime)


def _term(entries: dict, coeff, lower: tuple[int, int], upper: tuple[int, int]) -> None:
    """Add coeff * M_{lower[0]}^{upper[0]} (x) M_{lower[1]}^{upper[1]}."""
    key = matrix_unit_key(upper, lower, "computational")
    entries[key] = entries.get(key, CycScalar(0)) + coeff


def build_esoteric_R0(spec: EsotericSpec) -> PairOp:
    n, q = spec.n, spec.q
    big_n = spec.dimension
    entries: dict = {}
    for i in range(1, big_n + 1):
        _term(entries, 1, (i, i), (i, i))
        for j in range(1, big_n + 1):
            if i < j:
                _term(entries, 1 - q * q, (j, i), (i, j))
            if i != j and i + j != 2 * n:
                _term(entries, q, (i, j), (i, j))
    for i in range(1, n):
        ip = spec.prime(i)
        _term(entries, 1, (i, ip), (i, ip))
        _term(entries, q * q, (ip, i), (ip, i))
    return PairOp(big_n, entries)


def build_esoteric_R1(spec: EsotericSpec, lambda_placement: str = "hecke",
                      coeffs: EsotericCoeffs | None = None) -> PairOp:
    if lambda_placement not in LAMBDA_PLACEMENTS:
        raise SpecError(f"unknown lambda placement {lambda_placement!r}")
    coeffs = coeffs or esoteric_coeffs(spec)
    n = spec.n
    q2 = spec.q * spec.q
    entries: dict = {}
    for i in spec.active():
        ip = spec.prime(i)
        entries[((i, ip), (n, n))] = spec.mu_at(i)
        entries[((ip, i), (n, n))] = coeffs.mu_prime[i - 1]
    for (i, j), lam in coeffs.lam.items():
        ip, jp = spec.prime(i), spec.prime(j)
        lam_prime = coeffs.lam_prime[(i, j)]
        if lambda_placement == "hecke":
            entries[((i, ip), (j, jp))] = lam_prime
            entries[((ip, i), (jp, j))] = lam
        else:
            entries[((ip, i), (jp, j))] = lam_prime
            entries[((i, ip), (j, jp))] = q2 * lam
    return PairOp(spec.dimension, entries)


def build_esoteric_R(spec: EsotericSpec, lambda_placement: str = "hecke",
                     overrides: dict | None = None) -> PairOp:
    """R = R0 + R1 in the R frame.

    ``overrides`` may replace derived coefficients:
    ``{"mu_prime": {i: v}, "lambda": {(i, j): v}, "lambda_prime": {(i, j): v}}``.
    """
    coeffs = esoteric_coeffs(spec)
    if overrides:
        mu_prime = list(coeffs.mu_prime)
        for i, value in overrides.get("mu_prime", {}).items():
            mu_prime[i - 1] = CycScalar.coerce(value)
        lam = {**coeffs.lam, **{k: CycScalar.coerce(v) for k, v in overrides.get("lambda", {}).items()}}
        lam_prime = {
            **coeffs.lam_prime,
            **{k: CycScalar.coerce(v) for k, v in overrides.get("lambda_prime", {}).items()},
        }
        unknown = (set(lam) | set(lam_prime)) - set(coeffs.lam)
        if unknown:
            raise SpecError(f"lambda overrides outside k < i < j < n: {sorted(unknown)}")
        coeffs = EsotericCoeffs(mu_prime, lam, lam_prime)
    return build_esoteric_R0(spec) + build_esoteric_R1(spec, lambda_placement, coeffs)


def build_esoteric_P(spec: EsotericSpec, lambda_placement: str = "hecke", overrides: dict | None = None) -> PairOp:
    return convert_P_R(build_esoteric_R(spec, lambda_placement, overrides), "r_to_p")


@dataclass
class EsotericReport:
    passed: bool
    braid: BraidReport
    hecke: HeckeReport
    lambda_placement: str = "hecke"

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "lambda_placement": self.lambda_placement,
            "braid": self.braid.to_dict(),
            "hecke": self.hecke.to_dict(),
        }


def check_esoteric(spec: EsotericSpec, lambda_placement: str = "hecke",
                   overrides: dict | None = None) -> EsotericReport:
    """Braid and Hecke (a = q^2) on the converted P."""
    P = build_esoteric_P(spec, lambda_placement, overrides)
    braid = check_braid(P)
    hecke = check_hecke(P, spec.q * spec.q)
    report = EsotericReport(braid.passed and hecke.passed, braid, hecke, lambda_placement)
    if not report.passed and lambda_placement == "printed":
        logger.warning(
            "printed lambda normalization fails for n=%d: braid=%s hecke=%s",
            spec.n, braid.passed, hecke.passed,
        )
    return report


def _x(i):
    return ("x", i)


def _t(i):
    return ("θ", i)


def expected_relations(spec: EsotericSpec) -> tuple[list[Relation], list[Relation]]:
    """Plane and anti-plane relations of the deformed algebra in closed form."""
    n = spec.n
    big_n = spec.dimension
    params = esoteric_params(spec)
    a = params.a
    coeffs = esoteric_coeffs(spec)
    inv_q2 = 1 / (spec.q * spec.q)
    plane, antiplane = [], []
    for i in range(1, big_n + 1):
        if i != n:
            antiplane.append(normalize({(_t(i), _t(i)): CycScalar(1)}, "antiplane"))
        for j in range(i + 1, big_n + 1):
            if i + j == 2 * n:
                continue
            plane.append(normalize({(_x(i), _x(j)): CycScalar(1), (_x(j), _x(i)): -params.qv(i, j)}, "plane"))
            antiplane.append(normalize({(_t(i), _t(j)): CycScalar(1), (_t(j), _t(i)): a * params.qv(i, j)}, "antiplane"))
    for j in range(1, n):
        jp = spec.prime(j)
        x_vec = {(_x(j), _x(jp)): CycScalar(1), (_x(jp), _x(j)): -inv_q2}
        t_vec = {(_t(j), _t(jp)): CycScalar(1), (_t(jp), _t(j)): CycScalar(1)}
        for (i, jj), lam in coeffs.lam.items():
            if jj == j:
                ip = spec.prime(i)
                x_vec[(_x(ip), _x(i))] = -inv_q2 * lam
                t_vec[(_t(ip), _t(i))] = lam
        plane.append(normalize(x_vec, "plane"))
        antiplane.append(normalize(t_vec, "antiplane"))
    top = {(_t(n), _t(n)): CycScalar(1)}
    for i in range(1, n):
        if coeffs.mu_prime[i - 1]:
            top[(_t(spec.prime(i)), _t(i))] = coeffs.mu_prime[i - 1]
    antiplane.append(normalize(top, "antiplane"))
    return plane, antiplane


def expected_cross_block(spec: EsotericSpec) -> list[Relation]:
    """Mixed relations on the anti-diagonal words x^i θ^{i'}, in closed form.

    Off the anti-diagonal the mixed relations are those of the undeformed point.
    """
    n = spec.n
    q2 = spec.q * spec.q
    inv_q2 = 1 / q2
    coeffs = esoteric_coeffs(spec)
    block = []
    for j in range(1, n):
        jp = spec.prime(j)
        low = {(_x(j), _t(jp)): CycScalar(1), (_t(jp), _x(j)): -inv_q2, (_t(j), _x(jp)): 1 - inv_q2}
        high = {(_t(j), _x(jp)): CycScalar(1), (_x(jp), _t(j)): CycScalar(-1)}
        for (i, jj), lam in coeffs.lam.items():
            if jj == j:
                ip = spec.prime(i)
                low[(_t(ip), _x(i))] = -inv_q2 * lam
                high[(_t(i), _x(ip))] = inv_q2 * coeffs.lam_prime[(i, j)]
        block.append(normalize(low, "cross"))
        block.append(normalize(high, "cross"))
    top = {(_t(n), _x(n)): CycScalar(1), (_x(n), _t(n)): -q2}
    for i in spec.active():
        ip = spec.prime(i)
        top[(_t(i), _x(ip))] = spec.mu_at(i)
        top[(_t(ip), _x(i))] = coeffs.mu_prime[i - 1]
    block.append(normalize(top, "cross"))
    return block


@dataclass
class EsotericRelationsReport:
    passed: bool
    plane_match: bool
    antiplane_match: bool
    cross_match: bool
    per_relation: list[tuple[str, bool]]
    cross_block_match: bool = True

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "plane_match": self.plane_match,
            "antiplane_match": self.antiplane_match,
            "cross_match": self.cross_match,
            "cross_block_match": self.cross_block_match,
            "relations": [{"text": text, "match": ok} for text, ok in self.per_relation],
        }


def esoteric_relations(spec: EsotericSpec, lambda_placement: str = "hecke") -> EsotericRelationsReport:
    """Compare relations extracted from the built P with the closed-form list."""
    P = build_esoteric_P(spec, lambda_placement)
    params = esoteric_params(spec)
    a = params.a
    plane = plane_relations(P)
    antiplane = antiplane_relations(P, a)
    want_plane, want_antiplane = expected_relations(spec)
    per_relation = [(render_relation(r), relation_in_span(r, plane)) for r in want_plane]
    per_relation += [(render_relation(r), relation_in_span(r, antiplane)) for r in want_antiplane]
    plane_match = same_relation_span(plane, want_plane)
    antiplane_match = same_relation_span(antiplane, want_antiplane)
    big_n = spec.dimension
    columns = [(i, j) for i in range(1, big_n + 1) for j in range(1, big_n + 1)]
    deformed = dict(zip(columns, cross_relations(P, a)))
    standard = dict(zip(columns, cross_relations(build_standard_P(params), a)))
    off_diagonal_match = all(
        deformed[(i, j)] == standard[(i, j)] for i, j in columns if i + j != 2 * spec.n
    )
    block = [deformed[(i, spec.prime(i))] for i in range(1, big_n + 1)]
    want_block = expected_cross_block(spec)
    per_relation += [(render_relation(r), relation_in_span(r, block)) for r in want_block]
    cross_block_match = same_relation_span(block, want_block)
    cross_match = off_diagonal_match and cross_block_match
    passed = plane_match and antiplane_match and cross_match
    logger.info("esoteric relations n=%d: %s", spec.n, "match" if passed else "mismatch")
    return EsotericRelationsReport(
        passed, plane_match, antiplane_match, cross_match, per_relation, cross_block_match
    )
