"""
JSON file formats.

Every file type is decoded through the ``from_json`` of its domain type so
that errors carry the file path and a JSON pointer.  Writers are
deterministic: sorted keys, two-space indent, trailing newline.
"""
import json
import logging
from pathlib import Path

from app.classical_limit import ClassicalParams
from app.deformations import DeformationSpec
from app.errors import FormatError
from app.esoteric import EsotericSpec
from app.standard_p import ParamSet
from app.tensorspace import PairOp

logger = logging.getLogger(__name__)

DECODERS = {
    "params": ParamSet.from_json,
    "operator": PairOp.from_json,
    "spec": DeformationSpec.from_json,
    "classical": ClassicalParams.from_json,
    "esoteric": EsotericSpec.from_json,
}


def read_json(path: str | Path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read file: {exc.strerror}", str(path))
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}", str(path))


def load(kind: str, path: str | Path):
    """Read and decode a file of the given kind."""
    if kind not in DECODERS:
        raise FormatError(f"unknown file kind {kind!r}", str(path))
    obj = read_json(path)
    logger.debug("decoding %s file %s", kind, path)
    return DECODERS[kind](obj, str(path))


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_json(path: str | Path, doc) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8")
