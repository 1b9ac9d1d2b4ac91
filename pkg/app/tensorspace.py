"""
Sparse operators on V(x)V and V(x)V(x)V.

Entries are input-major: the action on a row tensor t is
``(tA)[out] = sum over in of t[in] * A[in, out]``, and ``compose(A, B)``
means "apply A, then B".  Values may be any exact ring element
(``CycScalar`` or ``Jet``); zero values are never stored.
"""
import logging
from collections import defaultdict
from itertools import product
from typing import Callable, Iterable, Iterator, Mapping

from app.errors import FormatError, ScalarError, ShapeError
from app.scalars import CycScalar, Jet, scalar_from_json, scalar_to_json

logger = logging.getLogger(__name__)

Index = tuple[int, ...]
Key = tuple[Index, Index]


def _clean(value):
    if isinstance(value, Jet):
        return value
    return CycScalar.coerce(value)


class SparseOp:
    """Common implementation of :class:`PairOp` and :class:`TripleOp`."""

    arity = 0
    __slots__ = ("n", "entries")

    def __init__(self, n: int, entries: Mapping[Key, object] | None = None):
        if n < 1:
            raise ShapeError(f"dimension must be at least 1, got {n}")
        cleaned = {}
        for (inp, out), value in (entries or {}).items():
            inp, out = tuple(inp), tuple(out)
            if len(inp) != self.arity or len(out) != self.arity:
                raise ShapeError(
                    f"{type(self).__name__} keys need {self.arity} indices, got {inp}, {out}"
                )
            if not all(1 <= i <= n for i in inp + out):
                raise ShapeError(f"index out of range 1..{n}: {inp} -> {out}")
            value = _clean(value)
            if value:
                cleaned[(inp, out)] = value
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "entries", cleaned)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def get(self, inp: Index, out: Index):
        return self.entries.get((tuple(inp), tuple(out)), CycScalar(0))

    def items(self) -> list[tuple[Key, object]]:
        return sorted(self.entries.items(), key=lambda kv: kv[0])

    def __len__(self):
        return len(self.entries)

    def __iter__(self) -> Iterator[Key]:
        return iter(sorted(self.entries))

    def is_zero(self) -> bool:
        return not self.entries

    def _check(self, other):
        if type(other) is not type(self):
            raise ShapeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.n != self.n:
            raise ShapeError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        if not isinstance(other, SparseOp):
            return NotImplemented
        self._check(other)
        entries = dict(self.entries)
        for key, value in other.entries.items():
            entries[key] = entries[key] + value if key in entries else value
        return type(self)(self.n, entries)

    def __neg__(self):
        return type(self)(self.n, {k: -v for k, v in self.entries.items()})

    def __sub__(self, other):
        if not isinstance(other, SparseOp):
            return NotImplemented
        return self + (-other)

    def scale(self, factor):
        return type(self)(self.n, {k: v * factor for k, v in self.entries.items()})

    def __mul__(self, factor):
        if isinstance(factor, SparseOp):
            return NotImplemented
        return self.scale(factor)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return compose(self, other)

    def __eq__(self, other):
        if not isinstance(other, SparseOp):
            return NotImplemented
        return type(self) is type(other) and self.n == other.n and self.entries == other.entries

    def __hash__(self):
        return hash((type(self).__name__, self.n, frozenset(self.entries.items())))

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, nnz={len(self.entries)})"

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "entries": [
                {"in": list(inp), "out": list(out), "val": scalar_to_json(value)}
                for (inp, out), value in self.items()
            ],
        }

    @classmethod
    def from_json(cls, obj, path: str | None = None):
        if not isinstance(obj, dict) or "n" not in obj or "entries" not in obj:
            raise FormatError("operator needs 'n' and 'entries'", path)
        n = obj["n"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise FormatError(f"invalid dimension {n!r}", path, "/n")
        entries = {}
        for pos, entry in enumerate(obj["entries"]):
            pointer = f"/entries/{pos}"
            try:
                key = (tuple(entry["in"]), tuple(entry["out"]))
                value = scalar_from_json(entry["val"])
            except (KeyError, TypeError) as exc:
                raise FormatError(f"entry needs in/out/val: {exc}", path, pointer)
            except ScalarError as exc:
                raise FormatError(str(exc), path, pointer + "/val")
            if key in entries:
                raise FormatError(f"duplicate entry {key}", path, pointer)
            entries[key] = value
        try:
            return cls(n, entries)
        except ShapeError as exc:
            raise FormatError(str(exc), path)


class PairOp(SparseOp):
    """Operator on V(x)V keyed by ((i, j), (k, l))."""

    arity = 2
    __slots__ = ()


class TripleOp(SparseOp):
    """Operator on V(x)V(x)V keyed by ((i, j, k), (l, m, o))."""

    arity = 3
    __slots__ = ()


def compose(a: SparseOp, b: SparseOp) -> SparseOp:
    """Row-action product: ``t(AB) = (tA)B``."""
    a._check(b)
    rows = defaultdict(list)
    for (mid, out), value in b.entries.items():
        rows[mid].append((out, value))
    acc = {}
    for (inp, mid), left in a.entries.items():
        for out, right in rows.get(mid, ()):
            key = (inp, out)
            term = left * right
            acc[key] = acc[key] + term if key in acc else term
    return type(a)(a.n, acc)


pair_compose = compose


def identity_op(n: int, arity: int = 2) -> SparseOp:
    cls = PairOp if arity == 2 else TripleOp
    one = CycScalar(1)
    return cls(n, {(idx, idx): one for idx in product(range(1, n + 1), repeat=arity)})


def flip_op(n: int) -> PairOp:
    """The flip: entries [(i, j), (j, i)] = 1."""
    one = CycScalar(1)
    return PairOp(
        n, {((i, j), (j, i)): one for i in range(1, n + 1) for j in range(1, n + 1)}
    )


def unit_op(n: int, inp: Index, out: Index, value=1) -> PairOp:
    return PairOp(n, {(tuple(inp), tuple(out)): value})


def lift_to_triple(a: PairOp, legs: str) -> TripleOp:
    """Let ``a`` act on legs 12, 23 or 13 of V(x)V(x)V."""
    if legs not in ("12", "23", "13"):
        raise ShapeError(f"unknown leg placement {legs!r}")
    entries = {}
    for ((i, j), (k, l)), value in a.entries.items():
        for m in range(1, a.n + 1):
            if legs == "12":
                key = ((i, j, m), (k, l, m))
            elif legs == "23":
                key = ((m, i, j), (m, k, l))
            else:
                key = ((i, m, j), (k, m, l))
            entries[key] = value
    return TripleOp(a.n, entries)


def transpose_op(a: SparseOp) -> SparseOp:
    return type(a)(a.n, {(out, inp): v for (inp, out), v in a.entries.items()})


def flip_conjugate(a: PairOp) -> PairOp:
    """sigma A sigma: both tensor legs swapped on input and output."""
    return PairOp(
        a.n, {((j, i), (l, k)): v for ((i, j), (k, l)), v in a.entries.items()}
    )


def flip_transpose(a: PairOp) -> PairOp:
    """sigma A^T sigma: entry [(i, j), (k, l)] moves to [(l, k), (j, i)]."""
    return PairOp(
        a.n, {((l, k), (j, i)): v for ((i, j), (k, l)), v in a.entries.items()}
    )


def map_entries(a: SparseOp, fn: Callable[[object], object]) -> SparseOp:
    return type(a)(a.n, {k: fn(v) for k, v in a.entries.items()})


def commutator(a: SparseOp, b: SparseOp) -> SparseOp:
    return compose(a, b) - compose(b, a)


def sum_ops(ops: Iterable[SparseOp], n: int, arity: int = 2) -> SparseOp:
    total = PairOp(n) if arity == 2 else TripleOp(n)
    for op in ops:
        total = total + op
    return total


def matrix_unit_key(upper: tuple[int, int], lower: tuple[int, int], frame: str = "literal") -> Key:
    """Slot of the term M_{l1}^{u1} (x) M_{l2}^{u2}.

    ``literal`` reads upper indices as input and lower indices as output;
    ``computational`` is its flip-transpose, the frame produced by
    converting P to R.
    """
    (u1, u2), (l1, l2) = upper, lower
    if frame == "literal":
        return ((u1, u2), (l1, l2))
    if frame == "computational":
        return ((l2, l1), (u2, u1))
    raise ShapeError(f"unknown frame {frame!r}")
