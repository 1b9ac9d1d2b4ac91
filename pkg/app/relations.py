"""
Quadratic relations of the quantum plane, anti-plane and their cross
commutation, read off from a generalized symmetry P.
"""
import logging
import re
from dataclasses import dataclass
from typing import Iterable

from app.errors import FormatError, ParamError, ScalarError
from app.linalg import RowEchelon, rank, rref
from app.scalars import CycScalar, format_scalar, parse_scalar
from app.tensorspace import PairOp, identity_op

logger = logging.getLogger(__name__)

Symbol = tuple[str, int]
Word = tuple[Symbol, ...]

LETTER_ORDER = {"x": 0, "θ": 1}


def word_key(word: Word):
    return tuple((LETTER_ORDER[letter], index) for letter, index in word)


@dataclass(frozen=True)
class Relation:
    """``sum coeff * word = 0`` with the smallest word carrying coefficient 1."""

    kind: str
    terms: tuple[tuple[Word, CycScalar], ...]

    def vector(self) -> dict[Word, CycScalar]:
        return dict(self.terms)

    def __str__(self):
        return render_relation(self)


def _sym_text(symbol: Symbol) -> str:
    return f"{symbol[0]}{symbol[1]}"


def _word_text(word: Word) -> str:
    return "*".join(_sym_text(s) for s in word)


def render_relation(relation: Relation) -> str:
    """Text form, e.g. ``x1*x2 - (2)*x2*x1 = 0``."""
    parts = []
    for pos, (word, coeff) in enumerate(relation.terms):
        sign = "+"
        if coeff.is_rational() and coeff.u < 0:
            sign, coeff = "-", -coeff
        if pos == 0:
            body = _word_text(word) if coeff == 1 else f"({format_scalar(coeff)})*{_word_text(word)}"
            parts.append(body if sign == "+" else f"-{body}")
        else:
            parts.append(f"{sign} ({format_scalar(coeff)})*{_word_text(word)}")
    return " ".join(parts) + " = 0"


_SYMBOL = re.compile(r"(x|θ|t)(\d+)")
_TERM = re.compile(r"\s*([+-])?\s*(?:\(([^)]*)\)\*)?((?:(?:x|θ|t)\d+\*?)+)\s*")


def _classify(words: Iterable[Word]) -> str:
    letters = {tuple(letter for letter, _ in word) for word in words}
    if letters <= {("x", "x")}:
        return "plane"
    if letters <= {("θ", "θ")}:
        return "antiplane"
    return "cross"


def parse_relation(text: str) -> Relation:
    """Inverse of :func:`render_relation`; ``t`` is accepted for θ."""
    body, sep, rhs = text.partition("=")
    if not sep or rhs.strip() != "0":
        raise FormatError(f"relation must end with '= 0': {text!r}")
    terms = {}
    consumed = 0
    for match in _TERM.finditer(body):
        if match.start() != consumed or not match.group(0).strip():
            break
        consumed = match.end()
        sign = -1 if match.group(1) == "-" else 1
        try:
            coeff = parse_scalar(match.group(2)) if match.group(2) is not None else CycScalar(1)
        except ScalarError as exc:
            raise FormatError(str(exc))
        word = tuple(
            ("θ" if letter == "t" else letter, int(index))
            for letter, index in _SYMBOL.findall(match.group(3))
        )
        terms[word] = terms.get(word, CycScalar(0)) + sign * coeff
    if consumed != len(body):
        raise FormatError(f"cannot parse relation: {text!r}")
    return normalize({w: c for w, c in terms.items() if c})


def normalize(vector: dict[Word, CycScalar], kind: str | None = None) -> Relation:
    ordered = sorted(((w, c) for w, c in vector.items() if c), key=lambda wc: word_key(wc[0]))
    if not ordered:
        raise ParamError("zero relation")
    lead = ordered[0][1].inverse()
    terms = tuple((w, c * lead) for w, c in ordered)
    return Relation(kind or _classify(w for w, _ in terms), terms)


def _word_index(n: int, letters: tuple[str, str]):
    words = sorted(
        (((letters[0], i), (letters[1], j)) for i in range(1, n + 1) for j in range(1, n + 1)),
        key=word_key,
    )
    return words, {w: pos for pos, w in enumerate(words)}


def _column_vectors(op: PairOp, letters: tuple[str, str]) -> list[dict[int, CycScalar]]:
    """One vector per output pair: sum over inputs (i,j) of op[(i,j), out] * word(i,j)."""
    words, index = _word_index(op.n, letters)
    columns: dict[tuple[int, int], dict[int, CycScalar]] = {}
    for ((i, j), out), value in op.entries.items():
        columns.setdefault(out, {})[index[((letters[0], i), (letters[1], j))]] = value
    return [columns[out] for out in sorted(columns)]


def _basis_relations(vectors, letters, kind: str, n: int) -> list[Relation]:
    words, _ = _word_index(n, letters)
    relations = []
    for row in rref(vectors):
        relations.append(normalize({words[c]: v for c, v in row.items()}, kind))
    return relations


def relation_basis(op: PairOp, letters: tuple[str, str] = ("x", "x")) -> list[dict[int, CycScalar]]:
    """Reduced row echelon basis of the relation vectors of ``op``."""
    return rref(_column_vectors(op, letters))


def plane_relations(P: PairOp) -> list[Relation]:
    """Basis of the relations xx(P - 1) = 0."""
    minus = P - identity_op(P.n)
    return _basis_relations(_column_vectors(minus, ("x", "x")), ("x", "x"), "plane", P.n)


def _check_a(a) -> CycScalar:
    a = CycScalar.coerce(a)
    if a == 0 or a == -1:
        raise ParamError(f"a must not be 0 or -1, got {a}")
    return a


def antiplane_relations(P: PairOp, a) -> list[Relation]:
    """Basis of the relations θθ(P + a) = 0."""
    a = _check_a(a)
    plus = P + identity_op(P.n).scale(a)
    return _basis_relations(_column_vectors(plus, ("θ", "θ")), ("θ", "θ"), "antiplane", P.n)


def cross_relations(P: PairOp, a) -> list[Relation]:
    """For every (i, j): a x^i θ^j - sum P[(k,l),(i,j)] θ^k x^l = 0."""
    a = CycScalar.coerce(a)
    if a == 0:
        raise ParamError("a must be nonzero")
    n = P.n
    relations = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            vector = {(("x", i), ("θ", j)): a}
            for ((k, l), out), value in P.entries.items():
                if out == (i, j):
                    word = (("θ", k), ("x", l))
                    vector[word] = vector.get(word, CycScalar(0)) - value
            relations.append(normalize(vector, "cross"))
    return relations


def degree3_dims(P: PairOp, a) -> tuple[int, int]:
    """Dimensions of the degree-3 parts of the plane and anti-plane algebras."""
    a = _check_a(a)
    n = P.n
    one = identity_op(n)
    dims = []
    for op in (P - one, P + one.scale(a)):
        rows = rref(_column_vectors(op, ("x", "x")))
        echelon = RowEchelon()
        for row in rows:
            for m in range(1, n + 1):
                left = {}
                right = {}
                for col, value in row.items():
                    i, j = divmod(col, n)
                    left[(i * n + j) * n + (m - 1)] = value
                    right[((m - 1) * n + i) * n + j] = value
                echelon.add(left)
                echelon.add(right)
        dims.append(n ** 3 - echelon.rank)
    logger.debug("degree-3 dimensions for n=%d: %s", n, dims)
    return dims[0], dims[1]


def same_relation_span(first: Iterable[Relation], second: Iterable[Relation]) -> bool:
    index: dict[Word, int] = {}

    def encode(relation):
        return {index.setdefault(w, len(index)): c for w, c in relation.terms}

    left = [encode(r) for r in first]
    right = [encode(r) for r in second]
    return rank(left) == rank(right) == rank(left + right)


def relation_in_span(relation: Relation, span: Iterable[Relation]) -> bool:
    index: dict[Word, int] = {}

    def encode(rel):
        return {index.setdefault(w, len(index)): c for w, c in rel.terms}

    echelon = RowEchelon()
    echelon.extend(encode(r) for r in span)
    return echelon.contains(encode(relation))


def relations_to_json(relations: Iterable[Relation]) -> list[dict]:
    return [{"kind": r.kind, "text": render_relation(r)} for r in relations]
